#pragma once

// Complex matrices, the Cartan decomposition gl_n(C) = u_n + Herm_n, and the
// positive-definite model of GL_n(C)/U(n).

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace charclass {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

inline double default_hermitian_tol = 1e-10;

struct CartanVector {
  CMat k_part;  // skew-Hermitian
  CMat p_part;  // Hermitian
};

inline CartanVector cartan_split(const CMat& x) {
  CMat xs = x.adjoint();
  return {(x - xs) / 2.0, (x + xs) / 2.0};
}

inline bool is_hermitian(const CMat& h, double tol = default_hermitian_tol) {
  if (h.rows() != h.cols()) return false;
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

inline bool is_finite(const CMat& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (!std::isfinite(m(i).real()) || !std::isfinite(m(i).imag())) return false;
  return true;
}

// f applied to the spectrum of a Hermitian matrix.
inline CMat hermitian_apply(const CMat& h, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw std::domain_error("eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = f(ev(i));
  const CMat& u = es.eigenvectors();
  return u * ev.cast<cplx>().asDiagonal() * u.adjoint();
}

class SymSpacePoint {
 public:
  SymSpacePoint() = default;
  explicit SymSpacePoint(CMat y, double tol = default_hermitian_tol) : y_(std::move(y)) {
    if (!is_finite(y_)) throw std::domain_error("SymSpacePoint: non-finite entries");
    if (!is_hermitian(y_, tol)) throw std::domain_error("SymSpacePoint: matrix is not Hermitian");
    y_ = (y_ + y_.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(y_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::domain_error("SymSpacePoint: matrix is not positive-definite");
  }

  const CMat& matrix() const { return y_; }
  Eigen::Index n() const { return y_.rows(); }

 private:
  CMat y_;
};

inline void require_hermitian(const CMat& h, const char* what) {
  if (!is_hermitian(h)) throw std::domain_error(std::string(what) + ": argument is not Hermitian");
}

inline SymSpacePoint pd_exp(const CMat& h) {
  require_hermitian(h, "pd_exp");
  return SymSpacePoint(hermitian_apply(h, [](double x) { return std::exp(x); }));
}

inline CMat pd_log(const SymSpacePoint& y) {
  return hermitian_apply(y.matrix(), [](double x) { return std::log(x); });
}

inline CMat pd_sqrt(const SymSpacePoint& y) {
  return hermitian_apply(y.matrix(), [](double x) { return std::sqrt(x); });
}

inline CMat pd_inv_sqrt(const SymSpacePoint& y) {
  return hermitian_apply(y.matrix(), [](double x) { return 1.0 / std::sqrt(x); });
}

// Affine-invariant geodesic A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}.
inline SymSpacePoint geodesic(const SymSpacePoint& a, const SymSpacePoint& b, double t) {
  if (a.n() != b.n()) throw std::domain_error("geodesic: size mismatch");
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  CMat s = pd_sqrt(a);
  CMat si = pd_inv_sqrt(a);
  CMat m = si * b.matrix() * si;
  m = (m + m.adjoint()) / 2.0;
  CMat mt = hermitian_apply(m, [t](double x) { return std::pow(x, t); });
  CMat y = s * mt * s;
  return SymSpacePoint((y + y.adjoint()) / 2.0);
}

inline void require_invertible(const CMat& g, const char* what) {
  if (g.rows() != g.cols() || g.rows() == 0)
    throw std::domain_error(std::string(what) + ": matrix is not square");
  if (!is_finite(g)) throw std::domain_error(std::string(what) + ": non-finite entries");
  Eigen::JacobiSVD<CMat> svd(g);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-14 * sv(0) || sv(0) == 0.0)
    throw std::domain_error(std::string(what) + ": matrix is singular");
}

// Polar part (g g*)^{1/2}.
inline SymSpacePoint to_base_point(const CMat& g) {
  require_invertible(g, "to_base_point");
  CMat y = g * g.adjoint();
  return SymSpacePoint(hermitian_apply((y + y.adjoint()) / 2.0, [](double x) { return std::sqrt(x); }));
}

// Orbit of the identity under Y -> g Y g*.
inline SymSpacePoint orbit_point(const CMat& g) {
  require_invertible(g, "orbit_point");
  CMat y = g * g.adjoint();
  return SymSpacePoint((y + y.adjoint()) / 2.0);
}

inline CMat tangent_to_p(const SymSpacePoint& y, const CMat& v) {
  require_hermitian(v, "tangent_to_p");
  CMat si = pd_inv_sqrt(y);
  CMat x = si * v * si;
  return (x + x.adjoint()) / 2.0;
}

inline CMat act(const CMat& g, const CMat& y) { return g * y * g.adjoint(); }

// {"n": n, "entries": [[[re, im], ...], ...]} row-major.
inline nlohmann::json matrix_to_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return {{"n", m.rows()}, {"entries", rows}};
}

inline CMat matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
    throw std::invalid_argument("matrix JSON needs 'n' and 'entries'");
  int n = j.at("n").get<int>();
  if (n <= 0) throw std::invalid_argument("matrix JSON: n must be positive");
  const auto& e = j.at("entries");
  if (!e.is_array() || static_cast<int>(e.size()) != n)
    throw std::invalid_argument("matrix JSON: expected n rows");
  CMat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!e[i].is_array() || static_cast<int>(e[i].size()) != n)
      throw std::invalid_argument("matrix JSON: expected n columns");
    for (int k = 0; k < n; ++k) {
      const auto& z = e[i][k];
      if (z.is_number()) {
        m(i, k) = cplx(z.get<double>(), 0.0);
      } else if (z.is_array() && z.size() == 2) {
        m(i, k) = cplx(z[0].get<double>(), z[1].get<double>());
      } else {
        throw std::invalid_argument("matrix JSON: entry must be [re, im]");
      }
    }
  }
  return m;
}

}  // namespace charclass
