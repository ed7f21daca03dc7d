#pragma once

// Chern-Weil calculus on simplicial bundles given by local connection data:
// curvature, Chern forms, the transgression form eta_p, character and cone
// representatives, connection change and the universal connection sum t_j pi_j^* omega.

#include "charclass/forms.hpp"
#include "charclass/invpoly.hpp"
#include "charclass/simforms.hpp"
#include "charclass/sset.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace charclass {

// Per-cell matrix-valued forms on a simplicial set.
class MatrixPolyForm {
 public:
  MatrixPolyForm() = default;
  MatrixPolyForm(const SSet& x, int n) : n_(n), cells_(x.top_dim() + 1) {
    for (int m = 0; m <= x.top_dim(); ++m) cells_[m].assign(x.count(m), FormMatrix(n, m));
  }

  int n() const { return n_; }
  int top_dim() const { return static_cast<int>(cells_.size()) - 1; }
  int count(int m) const { return static_cast<int>(cells_.at(m).size()); }
  FormMatrix& at(int m, int s) { return cells_.at(m).at(s); }
  const FormMatrix& at(int m, int s) const { return cells_.at(m).at(s); }

  template <class F>
  MatrixPolyForm map(F fn) const {
    MatrixPolyForm out = *this;
    for (auto& row : out.cells_)
      for (auto& f : row) f = fn(f);
    return out;
  }
  template <class F>
  MatrixPolyForm zip(const MatrixPolyForm& o, F fn) const {
    if (o.cells_.size() != cells_.size() || o.n_ != n_)
      throw std::invalid_argument("MatrixPolyForm: mismatched bundles");
    MatrixPolyForm out = *this;
    for (std::size_t m = 0; m < cells_.size(); ++m) {
      if (o.cells_[m].size() != cells_[m].size()) throw std::invalid_argument("MatrixPolyForm: mismatched bundles");
      for (std::size_t s = 0; s < cells_[m].size(); ++s) out.cells_[m][s] = fn(cells_[m][s], o.cells_[m][s]);
    }
    return out;
  }
  template <class F>
  PolyForm to_scalar(const SSet& x, F fn) const {
    PolyForm out(x);
    for (int m = 0; m <= top_dim(); ++m)
      for (int s = 0; s < count(m); ++s) out.at(m, s) = fn(at(m, s));
    return out;
  }
  bool is_zero() const {
    for (auto& row : cells_)
      for (auto& f : row)
        if (!f.is_zero()) return false;
    return true;
  }
  friend bool operator==(const MatrixPolyForm& a, const MatrixPolyForm& b) {
    return a.n_ == b.n_ && a.cells_ == b.cells_;
  }

 private:
  int n_ = 0;
  std::vector<std::vector<FormMatrix>> cells_;
};

using SimpConnection = MatrixPolyForm;

inline std::vector<std::string> compatibility_violations(const SSet& x, const MatrixPolyForm& f) {
  std::vector<std::string> bad;
  for (int i = 0; i < f.n(); ++i)
    for (int j = 0; j < f.n(); ++j) {
      auto b = compatibility_violations_by(x, [&](int m, int s) -> const Form& { return f.at(m, s)(i, j); });
      bad.insert(bad.end(), b.begin(), b.end());
    }
  return bad;
}

template <class Rng>
SimpConnection random_connection(const SSet& x, int n, Rng& rng, int nterms = 2) {
  SimpConnection c(x, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      PolyForm e = random_compatible_form(x, 1, rng, nterms);
      for (int m = 0; m <= x.top_dim(); ++m)
        for (int s = 0; s < x.count(m); ++s) c.at(m, s)(i, j) = e.at(m, s);
    }
  return c;
}

inline FormMatrix curvature(const FormMatrix& w) { return w.d() + w * w; }

inline MatrixPolyForm curvature(const SimpConnection& w) {
  return w.map([](const FormMatrix& a) { return curvature(a); });
}

inline PolyForm chern_form(const SSet& x, const SimpConnection& w, int k) {
  if (k < 0 || k > w.n()) throw std::out_of_range("chern_form: k out of range");
  MatrixPolyForm th = curvature(w);
  return th.to_scalar(x, [k](const FormMatrix& t) { return chern_of(t, k); });
}

// ---------------------------------------------------------------------------
// Interval direction: forms on I x patch with the interval coordinate t as variable 0.

inline AffineMap lift_to_cylinder(int m) {
  AffineMap f = AffineMap::zero(m + 1, m);
  for (int j = 0; j < m; ++j) f.matrix[j][j + 1] = 1;
  return f;
}

inline Form drop_dt(const Form& f) {
  Form out(f.nvars());
  for (auto& [k, c] : f.terms())
    if (!(k.wedge & 1u)) out.add(k, c);
  return out;
}

// int_0^1 (.) dt of a form whose coefficients depend polynomially on t = variable 0.
inline Form integrate_parameter_first(const Form& f) {
  Form out(f.nvars() - 1);
  for (auto& [k, c] : f.terms()) {
    if (k.wedge & 1u) throw std::invalid_argument("integrate_parameter_first: form contains dt");
    FKey nk{k.wedge >> 1, std::vector<int>(k.exps.begin() + 1, k.exps.end())};
    out.add(nk, c * QI(Rational(1, k.exps[0] + 1)));
  }
  return out;
}

struct CylinderData {
  FormMatrix omega;        // lifted w1 - w0
  FormMatrix connection;   // w0 + t omega on I x patch
  FormMatrix full_curv;    // curvature of d_t + connection
  FormMatrix path_curv;    // Theta_t, t as a parameter
};

inline CylinderData cylinder(const FormMatrix& w0, const FormMatrix& w1) {
  int m = w0.nvars();
  AffineMap lift = lift_to_cylinder(m);
  CylinderData c;
  FormMatrix a0 = w0.pullback(lift);
  c.omega = w1.pullback(lift) - a0;
  FormMatrix tw = c.omega.map([&](const Form& f) { return Form::var(m + 1, 0) * f; }, m + 1);
  c.connection = a0 + tw;
  c.full_curv = curvature(c.connection);
  c.path_curv = c.connection.d().map(drop_dt, m + 1) + c.connection * c.connection;
  return c;
}

// eta_p = p int_0^1 mu(omega, Theta_t, ..., Theta_t) dt, cellwise.
inline Form eta_p(const FormMatrix& w0, const FormMatrix& w1, int p) {
  if (p < 1 || p > w0.n()) throw std::out_of_range("eta_p: degree out of range");
  CylinderData c = cylinder(w0, w1);
  std::vector<FormMatrix> args(p, c.path_curv);
  args[0] = c.omega;
  Form integrand = mixed_chern(args) * QI(p);
  return integrate_parameter_first(integrand);
}

// The same form as the fiber integral of c_p over the cylinder.
inline Form eta_p_fiber(const FormMatrix& w0, const FormMatrix& w1, int p) {
  CylinderData c = cylinder(w0, w1);
  return chern_of(c.full_curv, p).fiber_integrate_first();
}

inline void require_same_bundle(const SimpConnection& a, const SimpConnection& b) {
  if (a.n() != b.n() || a.top_dim() != b.top_dim())
    throw std::invalid_argument("connections live on different bundles");
  for (int m = 0; m <= a.top_dim(); ++m)
    if (a.count(m) != b.count(m)) throw std::invalid_argument("connections live on different simplicial sets");
}

inline PolyForm eta_p(const SSet& x, const SimpConnection& w0, const SimpConnection& w1, int p) {
  require_same_bundle(w0, w1);
  PolyForm out(x);
  for (int m = 0; m <= x.top_dim(); ++m)
    for (int s = 0; s < x.count(m); ++s) out.at(m, s) = eta_p(w0.at(m, s), w1.at(m, s), p);
  return out;
}

// Number of nonzero entries of Theta - (Theta_t + dt ^ omega) over all cells; zero when
// the curvature of d_t + w_t splits.
inline int curvature_splitting_residual(const SSet& x, const SimpConnection& w0, const SimpConnection& w1) {
  require_same_bundle(w0, w1);
  int bad = 0;
  for (int m = 0; m <= x.top_dim(); ++m)
    for (int s = 0; s < x.count(m); ++s) {
      CylinderData c = cylinder(w0.at(m, s), w1.at(m, s));
      FormMatrix dtw = c.omega.map([&](const Form& f) { return Form::dvar(m + 1, 0) * f; }, m + 1);
      FormMatrix r = c.full_curv - c.path_curv - dtw;
      for (int i = 0; i < w0.n(); ++i)
        for (int j = 0; j < w0.n(); ++j) bad += static_cast<int>(r(i, j).terms().size());
    }
  return bad;
}

// ---------------------------------------------------------------------------
// Representatives

// Lattice Z(p) = (2 pi i)^p Z and R(p) = i^p R tests on complex values.
inline bool equal_mod_lattice(std::complex<double> a, std::complex<double> b, int p, const std::string& lattice,
                              double tol = 1e-9) {
  std::complex<double> diff = a - b;
  std::complex<double> ip = std::pow(std::complex<double>(0, 1), p);
  if (lattice == "R(p)") {
    std::complex<double> r = diff / ip;
    return std::abs(r.imag()) < tol;
  }
  if (lattice == "Z(p)") {
    std::complex<double> unit = std::pow(std::complex<double>(0, 2 * std::numbers::pi), p);
    std::complex<double> r = diff / unit;
    return std::abs(r.imag()) < tol && std::abs(r.real() - std::round(r.real())) < tol;
  }
  return std::abs(diff) < tol;
}

// Differential-character representative: closed 2p-form alpha and a cochain y with
// delta y = int alpha. The cone element is (alpha, -y).
struct CSRep {
  int p = 1;
  PolyForm form;
  QCochain y;
  std::string lattice = "Z(p)";
};

// delta y - int alpha; exact zero for a valid representative with rational data.
inline QCochain csrep_residual(const SSet& x, const CSRep& r) {
  return coboundary(x, r.y) - integrate_to_cochain(x, r.form, 2 * r.p);
}

inline CSRep flat_rep(const SSet& x, const SimpConnection& w, int p, QCochain y) {
  CSRep r{p, chern_form(x, w, p), std::move(y), "Z(p)"};
  if (!r.form.is_zero()) throw std::invalid_argument("flat_rep: connection has nonzero Chern form");
  if (r.y.degree != 2 * p - 1) throw std::invalid_argument("flat_rep: cochain has the wrong degree");
  if (!csrep_residual(x, r).is_zero()) throw std::invalid_argument("flat_rep: cochain is not a cocycle");
  return r;
}

// Cone complex element (alpha, f) with D(alpha, f) = (-d alpha, delta f + int alpha).
struct ConeElement {
  PolyForm form;
  QCochain cochain;
};

inline ConeElement cone_D(const SSet& x, const ConeElement& e) {
  PolyForm da = e.form.d() * QI(-1);
  QCochain c = coboundary(x, e.cochain);
  c += integrate_to_cochain(x, e.form, c.degree);
  return {da, c};
}

struct ConnectionChange {
  CSRep rep;
  PolyForm eta;
  int d_identity_residual = 0;  // nonzero terms/cells of (rep0 cone) - (rep1 cone) - D(eta, 0)
};

inline ConnectionChange connection_change(const SSet& x, const CSRep& rep, const SimpConnection& w0,
                                          const SimpConnection& w1) {
  require_same_bundle(w0, w1);
  if (!(chern_form(x, w0, rep.p) == rep.form))
    throw std::invalid_argument("connection_change: representative does not match the initial connection");
  ConnectionChange out;
  out.eta = eta_p(x, w0, w1, rep.p);
  out.rep.p = rep.p;
  out.rep.lattice = rep.lattice;
  out.rep.form = chern_form(x, w1, rep.p);
  out.rep.y = rep.y + integrate_to_cochain(x, out.eta, 2 * rep.p - 1);

  ConeElement before{rep.form, -rep.y}, after{out.rep.form, -out.rep.y};
  ConeElement deta = cone_D(x, ConeElement{out.eta, QCochain(2 * rep.p - 2, x.count(2 * rep.p - 2))});
  PolyForm rf = before.form - after.form - deta.form;
  QCochain rc = before.cochain - after.cochain - deta.cochain;
  for (int m = 0; m <= x.top_dim(); ++m)
    for (int s = 0; s < x.count(m); ++s) out.d_identity_residual += static_cast<int>(rf.at(m, s).terms().size());
  for (auto& v : rc.values)
    if (!v.is_zero()) ++out.d_identity_residual;
  return out;
}

struct DBRep {
  int p = 1;
  PolyForm form;     // F^p part
  QCochain cochain;  // C/Z(p) part, equal to -y
  std::string lattice = "Z(p)";
  int cocycle_residual = 0;  // nonzero terms/cells of D(alpha, -y)
};

inline DBRep db_image(const SSet& x, const CSRep& rep, bool form_in_Fp) {
  if (!form_in_Fp) throw std::invalid_argument("db_image: top form is not tagged as lying in F^p");
  DBRep out{rep.p, rep.form, -rep.y, rep.lattice, 0};
  ConeElement d = cone_D(x, ConeElement{out.form, out.cochain});
  for (int m = 0; m <= x.top_dim(); ++m)
    for (int s = 0; s < x.count(m); ++s) out.cocycle_residual += static_cast<int>(d.form.at(m, s).terms().size());
  for (auto& v : d.cochain.values)
    if (!v.is_zero()) ++out.cocycle_residual;
  return out;
}

// ---------------------------------------------------------------------------
// Universal connection on patch x Delta^m: sum_j t_j pi_j^* omega.

inline FormMatrix universal_connection_eval(const std::vector<FormMatrix>& pulled) {
  if (pulled.empty()) throw std::invalid_argument("universal_connection_eval: empty tuple");
  int m = static_cast<int>(pulled.size()) - 1;
  int k = pulled[0].nvars();
  int n = pulled[0].n();
  AffineMap lift = AffineMap::zero(k + m, k);
  for (int j = 0; j < k; ++j) lift.matrix[j][j] = 1;
  FormMatrix out(n, k + m);
  for (int j = 0; j <= m; ++j) {
    if (pulled[j].n() != n || pulled[j].nvars() != k)
      throw std::invalid_argument("universal_connection_eval: label mismatch");
    Form tj(k + m);
    if (j == 0) {
      tj = Form::constant(k + m, QI(1));
      for (int i = 0; i < m; ++i) tj -= Form::var(k + m, k + i);
    } else {
      tj = Form::var(k + m, k + j - 1);
    }
    out += pulled[j].pullback(lift).map([&](const Form& f) { return tj * f; }, k + m);
  }
  return out;
}

inline QSqMat inverse(const QSqMat& a) {
  int n = a.n();
  QSqMat m = a, inv = QSqMat::identity(n);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && m(piv, c).is_zero()) ++piv;
    if (piv == n) throw std::domain_error("inverse: matrix is singular");
    for (int j = 0; j < n; ++j) {
      std::swap(m(c, j), m(piv, j));
      std::swap(inv(c, j), inv(piv, j));
    }
    QI s = QI(1) / m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) *= s;
      inv(c, j) *= s;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || m(r, c).is_zero()) continue;
      QI f = m(r, c);
      for (int j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

// pi_j^* omega = g_j^{-1} omega g_j for a tuple of constant transition matrices.
inline FormMatrix universal_connection_eval(const FormMatrix& omega, const std::vector<QSqMat>& tuple) {
  std::vector<FormMatrix> pulled;
  for (auto& g : tuple) {
    if (g.n() != omega.n()) throw std::invalid_argument("universal_connection_eval: label mismatch");
    QSqMat gi = inverse(g);
    auto lift = [&](const QSqMat& c) {
      std::vector<std::vector<QI>> rows(c.n(), std::vector<QI>(c.n()));
      for (int i = 0; i < c.n(); ++i)
        for (int j = 0; j < c.n(); ++j) rows[i][j] = c(i, j);
      return FormMatrix::from_scalar(rows, Form::constant(omega.nvars(), QI(1)));
    };
    pulled.push_back(lift(gi) * omega * lift(g));
  }
  return universal_connection_eval(pulled);
}

// ---------------------------------------------------------------------------
// JSON export

inline nlohmann::json form_to_json(const Form& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& [k, c] : f.terms()) {
    std::vector<int> w;
    for (int i = 0; i < f.nvars(); ++i)
      if (k.wedge & (1u << i)) w.push_back(i + 1);
    arr.push_back({{"exponents", k.exps}, {"wedge", w}, {"coeff", {to_string(c.re()), to_string(c.im())}}});
  }
  return arr;
}

inline nlohmann::json polyform_to_json(const SSet& x, const PolyForm& f) {
  nlohmann::json j = nlohmann::json::object();
  for (int m = 0; m <= x.top_dim(); ++m)
    for (int s = 0; s < x.count(m); ++s)
      if (!f.at(m, s).is_zero()) j[x.cell(m, s).id] = form_to_json(f.at(m, s));
  return j;
}

inline nlohmann::json cochain_to_json(const SSet& x, const QCochain& c) {
  nlohmann::json j = nlohmann::json::object();
  for (int s = 0; s < static_cast<int>(c.values.size()); ++s) {
    auto z = c.values[s].to_complex();
    j[x.cell(c.degree, s).id] = {z.real(), z.imag()};
  }
  return j;
}

inline nlohmann::json to_json(const SSet& x, const CSRep& r) {
  return {{"p", r.p}, {"lattice", r.lattice}, {"form", polyform_to_json(x, r.form)}, {"cochain", cochain_to_json(x, r.y)}};
}

inline nlohmann::json to_json(const SSet& x, const DBRep& r) {
  return {{"p", r.p},
          {"lattice", r.lattice},
          {"form", polyform_to_json(x, r.form)},
          {"cochain", cochain_to_json(x, r.cochain)}};
}

}  // namespace charclass
