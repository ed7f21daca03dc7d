// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "charclass/verify.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace charclass;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void need(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "" : "FAILED ") + what);
  }
};

void report(int id, const Outcome& o, double secs, double budget) {
  bool ok = o.pass && secs < budget;
  std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << " (" << std::fixed;
  std::cout.precision(2);
  std::cout << secs << " s, budget " << budget << " s)";
  std::cout.unsetf(std::ios::fixed);
  for (auto& n : o.notes) std::cout << "; " << n;
  std::cout << std::endl;
}

// 1. exact Weil identities
Outcome weil_suite() {
  Outcome o;
  std::mt19937_64 rng(101);
  for (int n = 1; n <= 2; ++n) {
    LieData L = gl_n_real(n);
    WeilDifferential d(L);
    bool dd = true;
    for (int t = 0; t < 20; ++t) dd = dd && d(d(random_weil_element(L, 1 + t % 4, 4, rng))).is_zero();
    o.need(dd, "d^2 = 0 on gl_" + std::to_string(n));
  }
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}}) {
    std::string tag = "(" + std::to_string(n) + "," + std::to_string(p) + ")";
    LieData L = gl_n_real(n), u = u_n(n);
    const TransgressionForm& t = transgression_table(n, p);
    o.need((weil_d(t.element, L) - embed_q(L, p)).is_zero(), "dT - Q = 0 " + tag);
    o.need(is_basic(t.element, L), "T basic " + tag);
    WeilElement lhs = weil_d(restrict_to_un(t.element, n), u) * QI(2);
    o.need((lhs - embed_invariant(InvariantPolynomial{n, p, PolyKind::C}, u)).is_zero(), "2 dT = C on u_n " + tag);
  }
  return o;
}

// 2. invariant polynomials on 100 random matrices per (n, p)
Outcome invpoly_suite() {
  Outcome o;
  std::mt19937_64 rng(202);
  double wq = 0, wc = 0, wl = 0;
  bool exact = true;
  for (int n = 1; n <= 3; ++n)
    for (int p = 1; p <= n; ++p)
      for (int t = 0; t < 100; ++t) {
        CMat x = random_cmat(n, rng, 1.0, false);
        wq = std::max(wq, std::abs(pq_split(n, p, cartan_split(x).k_part).second));
        wc = std::max(wc, std::abs(chern_poly(n, p, x) - 2.0 * qp_pair(n, p, x, CMat::Zero(n, n))));
        auto [pp, qq] = pq_split(n, p, x);
        cplx ip = std::pow(cplx(0, 1), p), ip1 = std::pow(cplx(0, 1), p - 1);
        wl = std::max({wl, std::abs((pp / ip).imag()), std::abs((qq / ip1).imag())});

        QSqMat a = random_qmat(n, rng);
        QSqMat k(n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) k(i, j) = a(i, j) - a(j, i).conj();
        QI ipq(1), ip1q(1);
        for (int e = 0; e < p; ++e) ipq = ipq * QI::i();
        for (int e = 0; e < p - 1; ++e) ip1q = ip1q * QI::i();
        auto [ep, eq] = pq_split(n, p, a);
        exact = exact && pq_split(n, p, k).second.is_zero();
        exact = exact && (chern_poly(n, p, a) - qp_pair(n, p, a, QSqMat(n)) * QI(2)).is_zero();
        exact = exact && (ep * ipq.conj()).im() == 0 && (eq * ip1q.conj()).im() == 0;
        exact = exact && (ep + eq - chern_poly(n, p, a)).is_zero();
      }
  o.need(wq < 1e-12, "Q_p on u_n max " + sci(wq));
  o.need(wc < 1e-12, "C_p - 2 Q_p(X,0) max " + sci(wc));
  o.need(wl < 1e-12, "lattice residual max " + sci(wl));
  o.need(exact, "rational identities exact");
  return o;
}

// 3. p = 1 anchor, Borel normalization, block stability
Outcome anchor_suite() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), lr(-3, 3);
  double anchor = 0, borel = 0, block = 0;
  for (int t = 0; t < 100; ++t) {
    cplx g = std::polar(std::exp(lr(rng)), ang(rng));
    CMat e1 = CMat::Identity(1, 1), g1(1, 1), g2 = CMat::Identity(2, 2);
    g1(0, 0) = g;
    g2(0, 0) = g;
    RegulatorValue v = cs_cocycle(1, 1, {e1, g1});
    anchor = std::max(anchor, std::abs(v.reduced - std::log(std::abs(g))));
    borel = std::max(borel, std::abs(borel_cocycle(1, 1, {e1, g1}).raw - 2.0 * v.raw));
    block = std::max(block, std::abs(cs_cocycle(2, 1, {CMat::Identity(2, 2), g2}).reduced - v.reduced));
  }
  o.need(anchor < 1e-8, "anchor max " + sci(anchor));
  o.need(borel == 0.0, "borel - 2 cs max " + sci(borel));
  o.need(block < 1e-7, "block stability max " + sci(block));
  return o;
}

std::vector<CMat> random_tuple(int n, int len, std::mt19937_64& rng) {
  std::vector<CMat> t;
  for (int i = 0; i < len; ++i) t.push_back(random_cmat(n, rng));
  return t;
}

// 4. cocycle identity, convergence, invariance, solution independence
Outcome cocycle_suite() {
  Outcome o;
  std::mt19937_64 rng(404);
  QuadratureConfig o16;
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}}) {
    double worst = 0;
    for (int t = 0; t < 5; ++t) worst = std::max(worst, std::abs(cs_coboundary(n, p, random_tuple(n, 2 * p + 1, rng), o16)));
    o.need(worst < 5e-5, "delta cs (" + std::to_string(n) + "," + std::to_string(p) + ") max " + sci(worst));
  }
  double worst22 = 0;
  for (int t = 0; t < 5; ++t) worst22 = std::max(worst22, std::abs(cs_coboundary(2, 2, random_tuple(2, 5, rng), o16)));
  o.need(worst22 < 5e-4, "delta cs (2,2) batch of 5 max " + sci(worst22));

  // residual must at least halve per doubling until it reaches the finite-difference floor
  const double floor = 1e-9;
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}}) {
    auto tuple = random_tuple(n, 2 * p + 1, rng);
    std::string seq;
    bool halving = true;
    double prev = -1;
    for (int order : {2, 4, 8, 16, 32}) {
      QuadratureConfig c;
      c.order = order;
      double r = std::abs(cs_coboundary(n, p, tuple, c));
      seq += (seq.empty() ? "" : " ") + sci(r);
      if (prev >= 0 && !(r <= prev / 2 || r <= floor)) halving = false;
      prev = r;
    }
    o.need(halving, "halving (" + std::to_string(n) + "," + std::to_string(p) + ") orders 2..32: " + seq);
  }

  double inv = 0;
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}}) {
    auto t = random_tuple(n, 2 * p, rng);
    CMat h = random_cmat(n, rng);
    std::vector<CMat> ht;
    for (auto& g : t) ht.push_back(h * g);
    inv = std::max(inv, std::abs(cs_cocycle(n, p, t, o16).raw - cs_cocycle(n, p, ht, o16).raw));
  }
  o.need(inv < 1e-6, "left invariance max " + sci(inv));

  // T_p + z for closed basic z: the closed space is checked to be zero, so the solution is unique
  std::size_t closed_dim = 0;
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}}) closed_dim += transgression_table(n, p).closed.size();
  o.need(closed_dim == 0, "solution independence: closed basic space has dimension " + std::to_string(closed_dim) +
                              ", so T_p is unique and the check is vacuous");
  return o;
}

// 5. exact simplicial identities on sets with at most 20 cells
Outcome simplicial_suite() {
  Outcome o;
  std::mt19937_64 rng(505);
  SSet x = sphere2();
  SSet edge = simplicial_complex({{0, 1}});
  SSet pr = prism(edge);
  o.need(x.total_cells() <= 20 && pr.total_cells() <= 20,
         "cells " + std::to_string(x.total_cells()) + " and " + std::to_string(pr.total_cells()));

  bool fiber = true;
  for (int t = 0; t < 20; ++t) {
    int nv = 2 + t % 2, deg = t % (nv + 1);
    Form phi = random_form(nv, deg, 3, 5, rng);
    fiber = fiber && (phi.d().fiber_integrate_first() + phi.fiber_integrate_first().d() == phi.slice(0, 1) - phi.slice(0, 0));
  }
  o.need(fiber, "fiber homotopy formula on forms");

  bool cochain = true;
  std::uniform_int_distribution<int> v(-9, 9);
  for (int deg = 0; deg <= 1; ++deg) {
    QCochain f(deg, pr.count(deg));
    for (auto& c : f.values) c = QI(Rational(v(rng)), Rational(v(rng)));
    QCochain lhs = cochain_B(pr, coboundary(pr, f));
    if (deg > 0) lhs += coboundary(edge, cochain_B(pr, f));
    cochain = cochain && lhs == cochain_end(pr, f, 1) - cochain_end(pr, f, 0);
  }
  o.need(cochain, "prism homotopy formula on cochains");

  bool chain = true;
  for (int deg = 0; deg <= 1; ++deg) {
    PolyForm f = random_compatible_form(x, deg, rng);
    chain = chain && coboundary(x, integrate_to_cochain(x, f, deg)) == integrate_to_cochain(x, f.d(), deg + 1);
  }
  o.need(chain, "integration is a chain map");

  bool closed = true, eta = true, split = true, dident = true;
  for (int n = 1; n <= 2; ++n) {
    SimpConnection w0 = random_connection(x, n, rng), w1 = random_connection(x, n, rng);
    for (int p = 1; p <= n; ++p) {
      closed = closed && chern_form(x, w0, p).d().is_zero() && chern_form(x, w1, p).d().is_zero();
      eta = eta && eta_p(x, w0, w1, p).d() == chern_form(x, w1, p) - chern_form(x, w0, p);
      SimpConnection flat(x, n);
      CSRep rep = flat_rep(x, flat, p, QCochain(2 * p - 1, x.count(2 * p - 1)));
      dident = dident && connection_change(x, rep, flat, w1).d_identity_residual == 0;
    }
    split = split && curvature_splitting_residual(x, w0, w1) == 0;
  }
  o.need(closed, "Chern forms closed");
  o.need(eta, "d eta_p = c_p(1) - c_p(0)");
  o.need(split, "curvature splitting");
  o.need(dident, "connection change equals D(eta_p, 0)");
  return o;
}

// 6. filtration corpus
Outcome filtration_suite() {
  Outcome o;
  CoordSystem zw{{"z", "w"}, {}};
  auto f1 = parse_form("dz/w^2", zw);
  auto diag = restrict_diagonal(f1, "w", "z", "z");
  auto f2 = parse_form("dw^dz/w^2", zw);
  auto dw = parse_form("dw", zw);
  o.need(q_level(f1) == 1 && q_membership(f1) == "Q^1, not Q^2", "dz/w^2 in Q^1");
  o.need(diag.str() == "dz/z^2" && q_level(diag) == 0, "diagonal restriction dz/z^2 not in Q^1");
  o.need(q_level(f2) == 1, "dw^dz/w^2 not in Q^2");
  o.need(q_level(dw) + q_level(f1) == 2 && q_level(wedge(dw, f1)) == 1, "Q not multiplicative");
  CoordSystem z{{"z"}, {}};
  auto lz = parse_form("dz/z", z);
  o.need(q_level(dw) == 1 && q_level(lz) == 1 && f_level(lz) == 1 && classification_summary(lz) == "log, F^1, Q^1",
         "disc cases");

  const std::vector<std::string> names{"x", "y", "z"};
  int forms = 0;
  bool mono = true;
  for (int nv = 1; nv <= 3; ++nv)
    for (int nb = 0; nb <= nv; ++nb) {
      CoordSystem cs;
      for (int v = 0; v < nv; ++v) (v < nb ? cs.boundary : cs.interior).push_back(names[v]);
      std::vector<int> e(nv, -3);
      while (true) {
        bool valid = true;
        for (int v = nb; v < nv; ++v) valid = valid && e[v] >= 0;
        if (valid)
          for (std::uint32_t w = 0; w < (1u << nv); ++w) {
            LogMeroForm f(cs);
            f.add(LogMeroForm::Key{e, w}, QI(1));
            ++forms;
            if (q_level(f.d()) < q_level(f)) mono = false;
          }
        int v = 0;
        while (v < nv && ++e[v] > 3) e[v++] = -3;
        if (v == nv) break;
      }
    }
  o.need(mono, "d preserves Q-level on " + std::to_string(forms) + " monomials");
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 7. byte-identical verify reports
Outcome determinism_suite() {
  Outcome o;
  const std::uint64_t seed = 2024;
  o.need(run_verify("all", seed).dump(1) == run_verify("all", seed).dump(1), "in-process reports identical");
  auto dir = std::filesystem::temp_directory_path();
  auto a = dir / "charclass_accept_a.json", b = dir / "charclass_accept_b.json";
  int codes = 0;
  for (auto& f : {a, b}) {
    std::string cmd = std::string("\"") + CHARCLASS_CLI + "\" verify --suite all --seed " + std::to_string(seed) +
                      " --out \"" + f.string() + "\" 2>/dev/null";
    int status = std::system(cmd.c_str());
    codes += WIFEXITED(status) ? WEXITSTATUS(status) : 99;
  }
  std::string ra = slurp(a), rb = slurp(b);
  o.need(codes == 0, "CLI exit codes zero");
  o.need(!ra.empty() && ra == rb, "CLI reports byte-identical (" + std::to_string(ra.size()) + " bytes)");
  return o;
}

}  // namespace

int main() {
  struct Item {
    int id;
    double budget;
    Outcome (*fn)();
  };
  const std::vector<Item> items{{1, 10, weil_suite},        {2, 5, invpoly_suite},      {3, 30, anchor_suite},
                                {4, 600, cocycle_suite},    {5, 60, simplicial_suite},  {6, 5, filtration_suite},
                                {7, 120, determinism_suite}};
  bool all = true;
  for (auto& it : items) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = it.fn();
    } catch (const std::exception& e) {
      o.need(false, std::string("exception: ") + e.what());
    }
    double secs = seconds_since(t0);
    report(it.id, o, secs, it.budget);
    all = all && o.pass && secs < it.budget;
  }
  return all ? 0 : 1;
}
