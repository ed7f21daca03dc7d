#pragma once

// Geodesic simplices in GL_n(C)/U(n), quadrature of invariant forms over them, the
// Cheeger-Simons and Borel cocycles, the van Est chain-map check, and evaluation
// on bar cycles.

#include "charclass/matlie.hpp"
#include "charclass/sset.hpp"
#include "charclass/weil.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace charclass {

enum class OrbitModel {
  orbit,  // gK -> g g*, p-coordinate Y^{-1/2} dY Y^{-1/2} / 2
  polar   // gK -> (g g*)^{1/2}, p-coordinate Y^{-1/2} dY Y^{-1/2}
};

struct QuadratureConfig {
  int order = 16;
  double diff_step = 1e-6;
  int max_m = 4;
  bool exact_derivatives = false;  // Daleckii-Krein derivatives instead of central differences
  OrbitModel model = OrbitModel::orbit;
  int threads = 0;  // 0: CHARCLASS_THREADS or hardware concurrency

  void validate() const {
    if (order < 2 || order > 64) throw std::invalid_argument("quadrature order must be in [2, 64]");
    if (!(diff_step > 0)) throw std::invalid_argument("diff_step must be positive");
  }
};

inline int thread_count(const QuadratureConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("CHARCLASS_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates fn(i) for i < count on up to `threads` workers; results stay in index order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, int threads, F fn) {
  std::vector<R> out(count);
  std::size_t t = std::min<std::size_t>(std::max(threads, 1), count);
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += t) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rule on [0, 1]

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int order) {
    if (order < 1) throw std::invalid_argument("GaussLegendre: order must be positive");
    nodes.resize(order);
    weights.resize(order);
    for (int i = 0; i < order; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
      double dp = 1.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      // roots come out descending, so the mapped nodes ascend
      nodes[i] = 0.5 * (1.0 - x);
      weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

// ---------------------------------------------------------------------------
// Geodesic simplices

struct GeodesicSimplexSpec {
  int n = 0;
  std::vector<CMat> vertices;  // homogeneous tuple (g_0..g_m)

  int m() const { return static_cast<int>(vertices.size()) - 1; }
  void validate(int max_m) const {
    if (vertices.empty()) throw std::invalid_argument("geodesic simplex needs at least one vertex");
    if (m() > max_m) throw std::invalid_argument("geodesic simplex dimension exceeds max_m");
    for (auto& g : vertices) {
      if (g.rows() != n) throw std::invalid_argument("geodesic simplex: matrix size differs from n");
      require_invertible(g, "geodesic simplex");
    }
  }
};

inline SymSpacePoint vertex_point(const CMat& g, OrbitModel model) {
  return model == OrbitModel::orbit ? orbit_point(g) : to_base_point(g);
}

// Point and coordinate derivatives of the cone parametrization at cube coordinates c.
struct SimplexJet {
  CMat y;
  std::vector<CMat> dy;
};

class GeodesicSimplex {
 public:
  GeodesicSimplex(const GeodesicSimplexSpec& spec, const QuadratureConfig& cfg) : cfg_(cfg) {
    spec.validate(cfg.max_m);
    for (auto& g : spec.vertices) {
      SymSpacePoint p = vertex_point(g, cfg.model);
      points_.push_back(p.matrix());
      sqrt_.push_back(pd_sqrt(p));
      isqrt_.push_back(pd_inv_sqrt(p));
    }
  }

  int m() const { return static_cast<int>(points_.size()) - 1; }

  // Delta(g_k..g_m)(c_{k+1}..c_m) = geodesic(P_k, Delta(g_{k+1}..g_m)(..), c_{k+1}).
  CMat point(const std::vector<double>& c) const { return point_from(0, c); }

  SimplexJet jet(const std::vector<double>& c) const {
    if (cfg_.exact_derivatives) return jet_from(0, c);
    SimplexJet j{point(c), {}};
    for (int k = 0; k < m(); ++k) {
      std::vector<double> cp(c), cm(c);
      cp[k] += cfg_.diff_step;
      cm[k] -= cfg_.diff_step;
      j.dy.push_back((point(cp) - point(cm)) / (2.0 * cfg_.diff_step));
    }
    return j;
  }

 private:
  CMat mid(int k, const CMat& f) const {
    CMat mm = isqrt_[k] * f * isqrt_[k];
    return (mm + mm.adjoint()) / 2.0;
  }

  CMat point_from(int k, const std::vector<double>& c) const {
    if (k == m()) return points_[k];
    CMat f = point_from(k + 1, c);
    double t = c[k];
    if (t == 0.0) return points_[k];
    if (t == 1.0) return f;
    CMat mt = hermitian_apply(mid(k, f), [t](double x) { return std::pow(x, t); });
    CMat y = sqrt_[k] * mt * sqrt_[k];
    return (y + y.adjoint()) / 2.0;
  }

  SimplexJet jet_from(int k, const std::vector<double>& c) const {
    if (k == m()) return {points_[k], {}};
    SimplexJet inner = jet_from(k + 1, c);
    double t = c[k];
    Eigen::SelfAdjointEigenSolver<CMat> es(mid(k, inner.y));
    const CMat& u = es.eigenvectors();
    Eigen::VectorXd lam = es.eigenvalues();
    int n = static_cast<int>(lam.size());
    Eigen::VectorXd lt(n), lg(n);
    for (int i = 0; i < n; ++i) {
      lt(i) = std::pow(lam(i), t);
      lg(i) = std::log(lam(i));
    }
    const CMat& s = sqrt_[k];
    SimplexJet out;
    out.y = s * u * lt.cast<cplx>().asDiagonal() * u.adjoint() * s;
    out.y = (out.y + out.y.adjoint()) / 2.0;
    Eigen::VectorXd dt(n);
    for (int i = 0; i < n; ++i) dt(i) = lt(i) * lg(i);
    out.dy.push_back(s * u * dt.cast<cplx>().asDiagonal() * u.adjoint() * s);
    // Daleckii-Krein divided differences of x -> x^t.
    Eigen::MatrixXd gam(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double la = lam(a), lb = lam(b);
        if (std::abs(la - lb) <= 1e-9 * std::max(la, lb)) {
          gam(a, b) = t * std::pow(0.5 * (la + lb), t - 1.0);
        } else {
          double lr = std::log(la) - std::log(lb);
          gam(a, b) = lt(b) * std::expm1(t * lr) / (la - lb);
        }
      }
    for (auto& e : inner.dy) {
      CMat d = u.adjoint() * (isqrt_[k] * e * isqrt_[k]) * u;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) d(a, b) *= gam(a, b);
      out.dy.push_back(s * u * d * u.adjoint() * s);
    }
    return out;
  }

  QuadratureConfig cfg_;
  std::vector<CMat> points_, sqrt_, isqrt_;
};

inline SymSpacePoint geodesic_simplex_point(const GeodesicSimplexSpec& spec, const std::vector<double>& coords,
                                            const QuadratureConfig& cfg = {}) {
  GeodesicSimplex s(spec, cfg);
  if (static_cast<int>(coords.size()) != s.m()) throw std::invalid_argument("geodesic_simplex_point: wrong number of coordinates");
  return SymSpacePoint(s.point(coords));
}

// ---------------------------------------------------------------------------
// Forms in Lambda g* evaluated on tangent data

// Theta-only form with float coefficients, evaluated by the determinant convention.
class LinearForm {
 public:
  LinearForm() = default;
  LinearForm(const WeilElement& w, int dim) : dim_(dim) {
    degree_ = -1;
    for (auto& [k, c] : w.terms()) {
      if (!k.omega.empty()) throw std::invalid_argument("LinearForm: element has curvature generators");
      auto idx = theta_indices(k);
      int d = static_cast<int>(idx.size());
      if (degree_ >= 0 && d != degree_) throw std::invalid_argument("LinearForm: element is not homogeneous");
      degree_ = d;
      terms_.emplace_back(idx, c.to_complex());
    }
  }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }

  // coords[j][a] = theta^a(v_j)
  cplx operator()(const std::vector<std::vector<double>>& coords) const {
    cplx total = 0;
    for (auto& [idx, c] : terms_) {
      int d = static_cast<int>(idx.size());
      if (d == 0) {
        total += c;
        continue;
      }
      Eigen::MatrixXd mat(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) mat(i, j) = coords[j][idx[i]];
      total += c * mat.determinant();
    }
    return total;
  }

 private:
  int dim_ = 0;
  int degree_ = -1;
  std::vector<std::pair<std::vector<int>, cplx>> terms_;
};

enum class Trivialization {
  invariant,     // p-coordinates of the tangent vectors; for K-invariant horizontal forms
  maurer_cartan  // S^{-1} dS with S = Y^{1/2}; for arbitrary forms in Lambda g*
};

inline CMat sqrt_derivative(const CMat& y, const CMat& dy) {
  Eigen::SelfAdjointEigenSolver<CMat> es(y);
  const CMat& u = es.eigenvectors();
  Eigen::VectorXd r = es.eigenvalues().cwiseSqrt();
  CMat d = u.adjoint() * dy * u;
  for (int a = 0; a < d.rows(); ++a)
    for (int b = 0; b < d.cols(); ++b) d(a, b) /= (r(a) + r(b));
  return u * d * u.adjoint();
}

struct IntegralResult {
  cplx value = 0;
  cplx coarse = 0;  // same rule at half order
  double est_error = 0;
};

// int over Delta_e(g_0..g_m) of the form, by tensor Gauss-Legendre on the cone cube.
inline IntegralResult integrate_form(const WeilElement& form, const GeodesicSimplexSpec& spec,
                                     const QuadratureConfig& cfg, Trivialization triv = Trivialization::invariant) {
  cfg.validate();
  LieData L = gl_n_real(spec.n);
  LinearForm lf(form, L.dim);
  spec.validate(cfg.max_m);
  int m = spec.m();
  if (!lf.is_zero() && lf.degree() != m) throw std::invalid_argument("integrate: form degree differs from simplex dimension");
  if (lf.is_zero()) return {};
  GeodesicSimplex simplex(spec, cfg);

  auto tangent_coords = [&](const SimplexJet& j) {
    std::vector<std::vector<double>> coords;
    if (triv == Trivialization::invariant) {
      SymSpacePoint y(j.y, 1e-8);
      double f = cfg.model == OrbitModel::orbit ? 0.5 : 1.0;
      for (auto& v : j.dy) {
        CMat h = (v + v.adjoint()) / 2.0;
        coords.push_back(L.coordinates(CMat(tangent_to_p(y, h) * f)));
      }
    } else {
      SymSpacePoint y(j.y, 1e-8);
      CMat si = pd_inv_sqrt(y);
      for (auto& v : j.dy) {
        CMat h = (v + v.adjoint()) / 2.0;
        coords.push_back(L.coordinates(CMat(si * sqrt_derivative(j.y, h))));
      }
    }
    return coords;
  };

  auto eval_at = [&](const std::vector<double>& c) -> cplx {
    if (triv == Trivialization::maurer_cartan && !cfg.exact_derivatives) {
      CMat y = simplex.point(c);
      SymSpacePoint yp(y, 1e-8);
      CMat si = pd_inv_sqrt(yp);
      std::vector<std::vector<double>> coords;
      for (int k = 0; k < m; ++k) {
        std::vector<double> cp(c), cm(c);
        cp[k] += cfg.diff_step;
        cm[k] -= cfg.diff_step;
        CMat sp = pd_sqrt(SymSpacePoint(simplex.point(cp), 1e-8));
        CMat sm = pd_sqrt(SymSpacePoint(simplex.point(cm), 1e-8));
        coords.push_back(L.coordinates(CMat(si * (sp - sm) / (2.0 * cfg.diff_step))));
      }
      return lf(coords);
    }
    return lf(tangent_coords(simplex.jet(c)));
  };

  auto rule = [&](int order) -> cplx {
    if (m == 0) return eval_at({});
    GaussLegendre gl(order);
    std::vector<int> idx(m, 0);
    cplx total = 0;
    std::vector<double> c(m);
    while (true) {
      double w = 1.0;
      for (int k = 0; k < m; ++k) {
        c[k] = gl.nodes[idx[k]];
        w *= gl.weights[idx[k]];
      }
      total += w * eval_at(c);
      int k = m - 1;
      while (k >= 0 && ++idx[k] == order) idx[k--] = 0;
      if (k < 0) break;
    }
    return total;
  };

  IntegralResult r;
  r.value = rule(cfg.order);
  r.coarse = m == 0 ? r.value : rule(std::max(1, cfg.order / 2));
  r.est_error = std::abs(r.value - r.coarse);
  return r;
}

inline cplx integrate_invariant_form(const WeilElement& form, const GeodesicSimplexSpec& spec,
                                     const QuadratureConfig& cfg = {}) {
  return integrate_form(form, spec, cfg, Trivialization::invariant).value;
}

// ---------------------------------------------------------------------------
// Transgression table

inline const TransgressionForm& transgression_table(int n, int p) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, TransgressionForm> table;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, p);
  auto it = table.find(key);
  if (it == table.end()) it = table.emplace(key, transgress_qp(n, p)).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Regulator values

struct RegulatorValue {
  cplx raw = 0;
  int p = 1;
  double reduced = 0;  // coefficient of i^{p-1}: raw = a i^p + reduced i^{p-1}, a real
  double est_error = 0;
};

inline double reduce_mod_Rp(cplx raw, int p) {
  return (raw / std::pow(cplx(0, 1), p - 1)).real();
}

inline RegulatorValue make_value(cplx raw, int p, double est) { return {raw, p, reduce_mod_Rp(raw, p), est}; }

inline void require_tuple(int n, int p, const std::vector<CMat>& tuple, std::size_t len) {
  if (p < 1 || p > n) throw std::invalid_argument("regulator: need 1 <= p <= n");
  if (tuple.size() != len) throw std::invalid_argument("regulator: tuple has the wrong length");
}

// -int T over the geodesic simplex of the tuple, for an arbitrary theta-only T.
inline RegulatorValue cs_value_with(const WeilElement& t_theta, int n, int p, const std::vector<CMat>& tuple,
                                    const QuadratureConfig& cfg = {}) {
  auto r = integrate_form(t_theta, GeodesicSimplexSpec{n, tuple}, cfg);
  return make_value(-r.value, p, r.est_error);
}

inline RegulatorValue cs_cocycle(int n, int p, const std::vector<CMat>& tuple, const QuadratureConfig& cfg = {}) {
  require_tuple(n, p, tuple, 2 * p);
  return cs_value_with(transgression_table(n, p).theta_only, n, p, tuple, cfg);
}

inline RegulatorValue borel_cocycle(int n, int p, const std::vector<CMat>& tuple, const QuadratureConfig& cfg = {}) {
  RegulatorValue c = cs_cocycle(n, p, tuple, cfg);
  return make_value(2.0 * c.raw, p, 2.0 * c.est_error);
}

// (delta f)(g_0..g_{2p}) for f = cs_cocycle.
inline cplx cs_coboundary(int n, int p, const std::vector<CMat>& tuple, const QuadratureConfig& cfg = {}) {
  require_tuple(n, p, tuple, 2 * p + 1);
  cplx total = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    std::vector<CMat> f(tuple);
    f.erase(f.begin() + i);
    cplx v = cs_cocycle(n, p, f, cfg).raw;
    total += (i % 2) ? -v : v;
  }
  return total;
}

// ---------------------------------------------------------------------------
// van Est chain map check: delta f_omega = f_{d omega}, with f_omega the integral of the
// pullback of the left-invariant form omega along the section Y -> Y^{1/2}.

inline WeilElement ce_differential(const WeilElement& w, const LieData& L) { return weil_d(w, L).theta_part(); }

inline double vanest_chainmap_check(const WeilElement& omega, int n, const std::vector<std::vector<CMat>>& tuples,
                                    const QuadratureConfig& cfg = {}) {
  LieData L = gl_n_real(n);
  int m = omega.degree();
  if (omega.is_zero()) return 0.0;
  if (m < 0) throw std::invalid_argument("vanest_chainmap_check: form is not homogeneous");
  if (m + 1 > cfg.max_m) throw std::invalid_argument("vanest_chainmap_check: degree exceeds max_m");
  WeilElement dw = ce_differential(omega, L);
  double worst = 0;
  for (auto& t : tuples) {
    if (static_cast<int>(t.size()) != m + 2) throw std::invalid_argument("vanest_chainmap_check: tuples need m+2 entries");
    cplx lhs = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::vector<CMat> f(t);
      f.erase(f.begin() + i);
      cplx v = integrate_form(omega, GeodesicSimplexSpec{n, f}, cfg, Trivialization::maurer_cartan).value;
      lhs += (i % 2) ? -v : v;
    }
    cplx rhs = dw.is_zero() ? cplx(0)
                            : integrate_form(dw, GeodesicSimplexSpec{n, t}, cfg, Trivialization::maurer_cartan).value;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Bar cycles

struct BarChainTerm {
  long long coeff = 1;
  std::vector<CMat> tuple;  // inhomogeneous (h_1..h_m)
};

struct BarCycle {
  std::vector<CMat> generators;
  std::vector<BarChainTerm> chains;
};

// Faces of the inhomogeneous bar complex, combined with numerical identification of
// equal tuples. Returns the nonzero boundary cells.
inline std::vector<BarChainTerm> bar_boundary(const std::vector<BarChainTerm>& chain) {
  std::vector<BarChainTerm> acc;
  auto add = [&](const std::vector<CMat>& t, long long c) {
    for (auto& a : acc)
      if (detail::same_tuple(a.tuple, t)) {
        a.coeff += c;
        return;
      }
    acc.push_back({c, t});
  };
  for (auto& term : chain) {
    int m = static_cast<int>(term.tuple.size());
    if (m == 0) continue;
    for (int i = 0; i <= m; ++i) {
      std::vector<CMat> f;
      if (i == 0) {
        f.assign(term.tuple.begin() + 1, term.tuple.end());
      } else if (i == m) {
        f.assign(term.tuple.begin(), term.tuple.end() - 1);
      } else {
        for (int k = 0; k < m; ++k) {
          if (k == i - 1) f.push_back(term.tuple[k] * term.tuple[k + 1]);
          else if (k != i) f.push_back(term.tuple[k]);
        }
      }
      add(f, (i % 2) ? -term.coeff : term.coeff);
    }
  }
  std::vector<BarChainTerm> out;
  for (auto& a : acc)
    if (a.coeff != 0) out.push_back(a);
  return out;
}

// (h_1..h_m) -> (e, h_1, h_1 h_2, ..., h_1 ... h_m).
inline std::vector<CMat> homogeneous_tuple(const std::vector<CMat>& inhom, int n) {
  std::vector<CMat> out{CMat::Identity(n, n)};
  for (auto& h : inhom) out.push_back(out.back() * h);
  return out;
}

class NotACycle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline RegulatorValue evaluate_on_cycle(const BarCycle& cycle, int p, const QuadratureConfig& cfg = {}) {
  if (cycle.chains.empty()) return make_value(0, p, 0);
  int n = static_cast<int>(cycle.chains.front().tuple.empty() ? cycle.generators.at(0).rows()
                                                               : cycle.chains.front().tuple.front().rows());
  for (auto& t : cycle.chains) {
    if (static_cast<int>(t.tuple.size()) != 2 * p - 1) throw std::invalid_argument("bar cycle: tuples need 2p-1 entries");
    for (auto& h : t.tuple) require_invertible(h, "bar cycle");
  }
  auto bd = bar_boundary(cycle.chains);
  if (!bd.empty()) {
    std::string msg = "bar chain is not a cycle; nonzero boundary cells:";
    for (auto& b : bd) msg += " [coeff " + std::to_string(b.coeff) + ", length " + std::to_string(b.tuple.size()) + "]";
    throw NotACycle(msg);
  }
  auto vals = parallel_map<RegulatorValue>(cycle.chains.size(), thread_count(cfg), [&](std::size_t i) {
    return cs_cocycle(n, p, homogeneous_tuple(cycle.chains[i].tuple, n), cfg);
  });
  cplx raw = 0;
  double est = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    raw += static_cast<double>(cycle.chains[i].coeff) * vals[i].raw;
    est += std::abs(static_cast<double>(cycle.chains[i].coeff)) * vals[i].est_error;
  }
  return make_value(raw, p, est);
}

// {"generators": [matrix...], "chains": [{"coeff": int, "tuple": [[word]...]}]}; a word lists
// generator indices, with -(k+1) standing for the inverse of generator k.
inline BarCycle bar_cycle_from_json(const nlohmann::json& j) {
  BarCycle c;
  for (auto& g : j.at("generators")) c.generators.push_back(matrix_from_json(g));
  if (c.generators.empty()) throw std::invalid_argument("bar cycle: no generators");
  int n = static_cast<int>(c.generators[0].rows());
  for (auto& g : c.generators) {
    if (g.rows() != n) throw std::invalid_argument("bar cycle: generators differ in size");
    require_invertible(g, "bar cycle generator");
  }
  for (auto& t : j.at("chains")) {
    BarChainTerm term;
    term.coeff = t.value("coeff", 1LL);
    for (auto& w : t.at("tuple")) {
      CMat h = CMat::Identity(n, n);
      for (auto& x : w) {
        int k = x.get<int>();
        int idx = k >= 0 ? k : -k - 1;
        if (idx >= static_cast<int>(c.generators.size())) throw std::invalid_argument("bar cycle: generator index out of range");
        h = h * (k >= 0 ? c.generators[idx] : CMat(c.generators[idx].inverse()));
      }
      term.tuple.push_back(h);
    }
    c.chains.push_back(std::move(term));
  }
  return c;
}

}  // namespace charclass
