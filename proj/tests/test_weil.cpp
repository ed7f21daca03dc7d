#include "charclass/regulator.hpp"
#include "charclass/weil.hpp"
#include "common.hpp"

#include <array>
#include <map>

using namespace charclass;

namespace {

WeilElement th(int a) { return WeilElement::theta(a); }
WeilElement om(int a) { return WeilElement::omega(a); }

TEST(WeilD, SquareIsZero) {
  std::mt19937_64 rng(21);
  LieData L = gl_n_real(2);
  WeilDifferential d(L);
  for (int t = 0; t < 50; ++t) {
    WeilElement w = random_weil_element(L, 1 + t % 5, 3, rng);
    EXPECT_TRUE(d(d(w)).is_zero()) << "trial " << t;
  }
}

TEST(WeilD, Abelian) {
  LieData L = abelian(3);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(weil_d(th(a), L), om(a));
    EXPECT_TRUE(weil_d(om(a), L).is_zero());
  }
}

TEST(WeilD, ProductOfCurvaturesByHand) {
  LieData L = gl_n_real(2);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 5}, {4, 4}, {2, 7}}) {
    WeilElement expect;
    for (int c = 0; c < L.dim; ++c)
      for (int e = 0; e < L.dim; ++e) {
        if (L.sc(a, c, e) != 0) expect -= th(c) * om(e) * om(b) * QI(L.sc(a, c, e));
        if (L.sc(b, c, e) != 0) expect -= om(a) * th(c) * om(e) * QI(L.sc(b, c, e));
      }
    EXPECT_EQ(weil_d(om(a) * om(b), L), expect);
  }
}

TEST(Contract, Basics) {
  std::mt19937_64 rng(22);
  LieData L = gl_n_real(2);
  for (int xi = 0; xi < L.dim; ++xi) EXPECT_EQ(contract(th(xi), xi, L), WeilElement(QI(1)));
  EXPECT_TRUE(contract(om(3), 3, L).is_zero());
  for (int t = 0; t < 20; ++t) {
    WeilElement w = random_weil_element(L, 1 + t % 4, 4, rng);
    int xi = t % L.dim;
    EXPECT_TRUE(contract(contract(w, xi, L), xi, L).is_zero());
    EXPECT_EQ(weil_d(contract(w, xi, L), L) + contract(weil_d(w, L), xi, L), coadjoint(w, xi, L));
  }
  EXPECT_THROW(contract(th(0), L.dim, L), std::out_of_range);
}

TEST(BasicBasis, LineCase) {
  LieData L = gl_n_real(1);
  auto b1 = basic_basis(L, 1);
  ASSERT_EQ(b1.size(), 1u);
  ASSERT_EQ(b1[0].size(), 1u);
  EXPECT_EQ(b1[0].terms().begin()->first, (WKey{std::uint64_t{1} << 1, {}}));
  auto b0 = basic_basis(L, 0);
  ASSERT_EQ(b0.size(), 1u);
  EXPECT_EQ(b0[0].degree(), 0);
}

// Independent rank computation: structure constants recomputed in floating point from
// the matrix basis, coadjoint action on the horizontal ambient space built directly.
int horizontal_invariant_dimension_gl2_degree3() {
  LieData L = gl_n_real(2);
  const int dim = 8, n = 2;
  Eigen::MatrixXd B(dim, dim);
  auto vec = [&](const CMat& m) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        v(i * n + j) = m(i, j).real();
        v(n * n + i * n + j) = m(i, j).imag();
      }
    return v;
  };
  std::vector<CMat> e;
  for (auto& q : L.basis) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = q(i, j).to_complex();
    e.push_back(m);
  }
  for (int a = 0; a < dim; ++a) B.col(a) = vec(e[a]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  std::vector<double> c(dim * dim * dim);
  auto C = [&](int a, int b, int cc) -> double& { return c[(a * dim + b) * dim + cc]; };
  for (int b = 0; b < dim; ++b)
    for (int cc = 0; cc < dim; ++cc) {
      Eigen::VectorXd coords = lu.solve(vec(e[b] * e[cc] - e[cc] * e[b]));
      for (int a = 0; a < dim; ++a) C(a, b, cc) = coords(a);
    }

  std::vector<int> P{4, 5, 6, 7}, K{0, 1, 2, 3};
  // ambient monomials: theta triples from P, then theta^b Omega^a with b in P
  std::map<std::array<int, 3>, int> index;
  int cols = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) index[{0, P[i] * 10 + P[j], P[k]}] = cols++;
  for (int b : P)
    for (int a = 0; a < dim; ++a) index[{1, b, a}] = cols++;
  EXPECT_EQ(cols, 36);

  auto triple_slot = [&](std::array<int, 3> t, double& sign) -> int {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return -1;
    sign = 1;
    for (int pass = 0; pass < 2; ++pass)
      for (int y = 0; y < 2; ++y)
        if (t[y] > t[y + 1]) {
          std::swap(t[y], t[y + 1]);
          sign = -sign;
        }
    return index.at({0, t[0] * 10 + t[1], t[2]});
  };

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4 * cols, cols);
  int block = 0;
  for (int xi : K) {
    for (auto& [key, col] : index) {
      if (key[0] == 0) {
        std::array<int, 3> t{key[1] / 10, key[1] % 10, key[2]};
        for (int pos = 0; pos < 3; ++pos)
          for (int y = 0; y < dim; ++y) {
            double s = -C(t[pos], xi, y);
            if (std::abs(s) < 1e-14) continue;
            EXPECT_GE(y, 4) << "coadjoint action leaves p";
            auto u = t;
            u[pos] = y;
            double sign;
            int row = triple_slot(u, sign);
            if (row >= 0) M(block * cols + row, col) += sign * s;
          }
      } else {
        int b = key[1], a = key[2];
        for (int y = 0; y < dim; ++y) {
          double s = -C(b, xi, y);
          if (std::abs(s) > 1e-14) M(block * cols + index.at({1, y, a}), col) += s;
          double s2 = -C(a, xi, y);
          if (std::abs(s2) > 1e-14) M(block * cols + index.at({1, b, y}), col) += s2;
        }
      }
    }
    ++block;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9) ++rank;
  return cols - rank;
}

TEST(BasicBasis, Gl2DegreeThreeMatchesIndependentRank) {
  LieData L = gl_n_real(2);
  int expected = horizontal_invariant_dimension_gl2_degree3();
  EXPECT_EQ(static_cast<int>(basic_basis(L, 3).size()), expected);
  EXPECT_GT(expected, 0);
}

TEST(EmbedInvariant, LineCaseAndBasic) {
  LieData L1 = gl_n_real(1);
  WeilElement c1 = embed_invariant(InvariantPolynomial{1, 1, PolyKind::C}, L1);
  EXPECT_EQ(c1, om(1) * QI(-1) + om(0) * QI(0, -1));
  LieData L2 = gl_n_real(2);
  for (int p = 1; p <= 2; ++p) {
    WeilElement q = embed_q(L2, p);
    EXPECT_TRUE(is_basic(q, L2));
    EXPECT_TRUE(weil_d(q, L2).is_zero());
  }
}

TEST(Transgress, LineCaseIsMinusThetaP) {
  TransgressionForm t = transgress_qp(1, 1);
  EXPECT_EQ(t.element, th(1) * QI(-1));
  EXPECT_TRUE(t.residual_zero);
  EXPECT_EQ(t.lattice, "R");
}

TEST(Transgress, ExactResidualsAndBasic) {
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}}) {
    LieData L = gl_n_real(n);
    TransgressionForm t = transgress_qp(n, p);
    EXPECT_TRUE((weil_d(t.element, L) - embed_q(L, p)).is_zero());
    EXPECT_TRUE(is_basic(t.element, L));
    EXPECT_EQ(t.theta_only, t.element.theta_part());
    if (p == 1) {
      EXPECT_EQ(t.element, t.theta_only);
    }
    // closed basic space in degree 2p-1 is trivial: T_p is unique
    EXPECT_TRUE(t.closed.empty());
  }
  EXPECT_EQ(transgress_qp(2, 2).lattice, "iR");
}

TEST(Transgress, ZeroRightHandSide) {
  LieData L = gl_n_real(2);
  EXPECT_TRUE(transgress(L, 1, WeilElement()).element.is_zero());
}

TEST(Transgress, RejectsBadInput) {
  LieData L = gl_n_real(1);
  EXPECT_THROW(transgress(L, 1, om(0)), TransgressionError);
  EXPECT_THROW(transgress_qp(1, 2), std::invalid_argument);
}

TEST(RestrictToUn, TwiceDerivativeIsChern) {
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}}) {
    LieData u = u_n(n);
    WeilElement r = restrict_to_un(transgress_qp(n, p).element, n);
    EXPECT_EQ(weil_d(r, u) * QI(2), embed_invariant(InvariantPolynomial{n, p, PolyKind::C}, u));
  }
  EXPECT_TRUE(restrict_to_un(WeilElement(), 2).is_zero());
}

TEST(RestrictToUn, LineCaseByHand) {
  WeilElement r = restrict_to_un(th(1) * QI(-1), 1);
  EXPECT_EQ(r, th(0) * QI::frac(-1, 2) * QI::i());
}

TEST(WeilJson, RoundTrip) {
  WeilElement t = transgress_qp(2, 2).element;
  EXPECT_EQ(weil_from_json(to_json(t)), t);
  nlohmann::json j = to_json(transgress_qp(1, 1).element);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["theta_indices"], nlohmann::json::array({1}));
  EXPECT_EQ(j[0]["coeff"][0], "-1");
}

}  // namespace
