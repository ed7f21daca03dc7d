#include "charclass/simforms.hpp"
#include "common.hpp"

#include <cmath>

using namespace charclass;
using namespace charclass::testing;

namespace {

// Gauss-Legendre nodes on [0, 1] from the eigenvalues of the Jacobi matrix.
std::pair<Eigen::VectorXd, Eigen::VectorXd> golub_welsch(int k) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd x = (es.eigenvalues().array() + 1.0) / 2.0;
  Eigen::VectorXd w = es.eigenvectors().row(0).transpose().array().square();
  return {x, w};
}

// Collapsed-coordinate quadrature of t_1^a_1...t_m^a_m over {t >= 0, sum t <= 1}.
double numeric_simplex_integral(const std::vector<int>& a) {
  int m = static_cast<int>(a.size());
  auto [x, w] = golub_welsch(12);
  double total = 0;
  std::vector<int> idx(m, 0);
  while (true) {
    double rest = 1, jac = 1, val = 1, wt = 1;
    for (int j = 0; j < m; ++j) {
      double t = rest * x(idx[j]);
      val *= std::pow(t, a[j]);
      jac *= rest;
      rest *= 1 - x(idx[j]);
      wt *= w(idx[j]);
    }
    total += wt * jac * val;
    int j = 0;
    while (j < m && ++idx[j] == x.size()) idx[j++] = 0;
    if (j == m) break;
  }
  return total;
}

Form top_monomial(const std::vector<int>& a) {
  int m = static_cast<int>(a.size());
  Form f = Form::constant(m, QI(1));
  for (int j = 0; j < m; ++j)
    for (int e = 0; e < a[j]; ++e) f = f * Form::var(m, j);
  for (int j = 0; j < m; ++j) f = f * Form::dvar(m, j);
  return f;
}

TEST(SimplexIntegral, SmallCases) {
  EXPECT_EQ(Form::dvar(1, 0).integrate_simplex(), QI(1));
  EXPECT_EQ(top_monomial({1, 0}).integrate_simplex(), QI::frac(1, 6));
  EXPECT_EQ(top_monomial({0, 0, 0}).integrate_simplex(), QI::frac(1, 6));
}

TEST(SimplexIntegral, MatchesNumericQuadrature) {
  for (int m = 1; m <= 3; ++m)
    for (int s = 0; s < 40; ++s) {
      std::vector<int> a(m);
      int r = s;
      for (int j = 0; j < m; ++j) {
        a[j] = r % 4;
        r /= 4;
      }
      double exact = top_monomial(a).integrate_simplex().to_complex().real();
      EXPECT_NEAR(exact, numeric_simplex_integral(a), 1e-12) << "m=" << m << " s=" << s;
    }
}

TEST(PolyForm, RandomFormsCompatible) {
  std::mt19937_64 rng(31);
  SSet x = sphere2();
  for (int deg = 0; deg <= 2; ++deg) EXPECT_TRUE(is_compatible(x, random_compatible_form(x, deg, rng)));
}

TEST(PolyForm, IncompatibleFormDetected) {
  std::mt19937_64 rng(32);
  SSet x = sphere2();
  PolyForm f = random_compatible_form(x, 0, rng);
  f.at(1, 0) += Form::var(1, 0);
  EXPECT_FALSE(compatibility_violations(x, f).empty());
}

TEST(PolyForm, ExactIdentities) {
  std::mt19937_64 rng(33);
  SSet x = sphere2();
  for (int t = 0; t < 6; ++t) {
    int a = t % 3, b = (t / 3) % 2;
    PolyForm f = random_compatible_form(x, a, rng), g = random_compatible_form(x, b, rng);
    EXPECT_TRUE(f.d().d().is_zero());
    QI sign((a * b) % 2 ? -1 : 1);
    EXPECT_EQ(wedge(f, g), wedge(g, f) * sign);
    EXPECT_EQ(wedge(f, g).d(), wedge(f.d(), g) + wedge(f, g.d()) * QI(a % 2 ? -1 : 1));
    EXPECT_TRUE(is_compatible(x, wedge(f, g)));
    EXPECT_TRUE(is_compatible(x, f.d()));
  }
}

TEST(PolyForm, IntegrationIsChainMap) {
  std::mt19937_64 rng(34);
  SSet x = sphere2();
  for (int deg = 0; deg <= 1; ++deg)
    for (int t = 0; t < 3; ++t) {
      PolyForm f = random_compatible_form(x, deg, rng);
      EXPECT_EQ(coboundary(x, integrate_to_cochain(x, f, deg)), integrate_to_cochain(x, f.d(), deg + 1));
    }
}

TEST(FiberIntegration, Basics) {
  Form tdt = Form::var(1, 0) * Form::dvar(1, 0);
  EXPECT_EQ(tdt.fiber_integrate_first(), Form::constant(0, QI::frac(1, 2)));
  // pulled back from the base: no dt
  Form base = Form::var(3, 1) * Form::var(3, 2) * Form::dvar(3, 2);
  EXPECT_TRUE(base.fiber_integrate_first().is_zero());
}

TEST(FiberIntegration, HomotopyFormula) {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 30; ++t) {
    int nv = 2 + t % 3, deg = t % (nv + 1);
    Form phi = random_form(nv, deg, 3, 5, rng);
    Form lhs = phi.d().fiber_integrate_first() + phi.fiber_integrate_first().d();
    EXPECT_EQ(lhs, phi.slice(0, 1) - phi.slice(0, 0)) << "trial " << t;
  }
}

TEST(CochainB, HandPrismOverEdge) {
  SSet edge = simplicial_complex({{0, 1}});
  SSet pr = prism(edge);
  EXPECT_EQ(pr.count(0), 4);
  EXPECT_EQ(pr.count(1), 5);
  ASSERT_EQ(pr.count(2), 2);
  QCochain f(2, 2);
  int up = pr.find(detail::simplex_id({0, 2, 3}))->index;
  int down = pr.find(detail::simplex_id({0, 1, 3}))->index;
  f.values[up] = QI(7);
  f.values[down] = QI(3);
  QCochain b = cochain_B(pr, f);
  ASSERT_EQ(b.values.size(), 1u);
  EXPECT_EQ(b.values[0], QI(7 - 3));
}

TEST(CochainB, HomotopyFormulaOnRandomCochains) {
  std::mt19937_64 rng(36);
  std::uniform_int_distribution<int> v(-9, 9);
  for (const SSet& base : {simplicial_complex({{0, 1}}), simplicial_complex({{0, 1, 2}}), sphere2()}) {
    SSet pr = prism(base);
    for (int deg = 1; deg <= base.top_dim(); ++deg) {
      QCochain f(deg, pr.count(deg));
      for (auto& c : f.values) c = QI(v(rng));
      QCochain lhs = cochain_B(pr, coboundary(pr, f)) + coboundary(base, cochain_B(pr, f));
      EXPECT_EQ(lhs, cochain_end(pr, f, 1) - cochain_end(pr, f, 0));
    }
  }
}

TEST(CochainB, PointBase) {
  SSet pr = prism(simplicial_complex({{0}}));
  QCochain g(0, 2);
  g.values = {QI(5), QI(-2)};
  QCochain bdg = cochain_B(pr, coboundary(pr, g));
  ASSERT_EQ(bdg.values.size(), 1u);
  EXPECT_EQ(bdg.values[0], QI(-2 - 5));
  SSet plain = simplicial_complex({{0}});
  EXPECT_THROW(cochain_B(plain, g), std::invalid_argument);
}

TEST(PrismCounts, Sphere) { EXPECT_EQ(prism(sphere2()).total_cells(), 70); }

TEST(BarSSet, OneGeneratorDepthOne) {
  CMat g = CMat::Identity(1, 1) * 2.0;
  SSet b = bar_sset({g}, 1);
  ASSERT_EQ(b.count(0), 1);
  ASSERT_EQ(b.count(1), 1);
  EXPECT_EQ(b.face(1, 0, 0), 0);
  EXPECT_EQ(b.face(1, 0, 1), 0);
}

TEST(BarSSet, TwoGenerators) {
  std::mt19937_64 rng(37);
  std::vector<CMat> gens{random_matrix(2, rng), random_matrix(2, rng)};
  std::vector<std::vector<BarCellInfo>> info;
  SSet b2 = bar_sset(gens, 2, &info);
  int generated = 0;
  for (auto& level : info)
    for (auto& c : level) generated += c.from_generators;
  EXPECT_EQ(generated, 1 + 2 + 4);
  // face closure adds the products g_i g_j in dimension 1
  EXPECT_EQ(b2.count(1), 2 + 4);
  SSet b3 = bar_sset(gens, 3);
  EXPECT_TRUE(b3.identity_violations().empty());
  EXPECT_THROW(bar_sset({CMat::Zero(2, 2)}, 1), std::domain_error);
}

TEST(SSetJson, RoundTrip) {
  SSet x = sphere2();
  SSet y = SSet::from_json(x.to_json());
  EXPECT_EQ(y.to_json(), x.to_json());
  nlohmann::json bad = x.to_json();
  bad["faces"]["[0,1,2]"] = {"[0,1]", "[0,1]", "[0,1]"};
  EXPECT_THROW(SSet::from_json(bad), std::invalid_argument);
}

}  // namespace
