#pragma once

// Invariant polynomials C_k on gl_n(C), their polarizations, and the split
// C_p = P_p + Q_p. Everything is generic over the scalar: std::complex<double>
// or the exact QI.

#include "charclass/matlie.hpp"
#include "charclass/qi.hpp"

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace charclass {

template <class S>
class SqMat {
 public:
  SqMat() = default;
  explicit SqMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, S(0)) {}

  static SqMat identity(int n) {
    SqMat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  int n() const { return n_; }
  S& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const S& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  SqMat& operator+=(const SqMat& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  SqMat& operator*=(const S& s) {
    for (auto& x : a_) x *= s;
    return *this;
  }
  friend SqMat operator+(SqMat a, const SqMat& b) { return a += b; }
  friend SqMat operator*(const SqMat& a, const SqMat& b) {
    SqMat c(a.n_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k) {
        if (is_zero_scalar(a(i, k))) continue;
        for (int j = 0; j < a.n_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }
  friend bool operator==(const SqMat& a, const SqMat& b) { return a.n_ == b.n_ && a.a_ == b.a_; }

  SqMat conjugate() const {
    SqMat c(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) c.a_[i] = conj_scalar(a_[i]);
    return c;
  }

  S trace() const {
    S t(0);
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  static bool is_zero_scalar(const S& s) {
    if constexpr (std::is_same_v<S, QI>) return s.is_zero();
    else return s == S(0);
  }
  static S conj_scalar(const S& s) {
    if constexpr (std::is_same_v<S, QI>) return s.conj();
    else return std::conj(s);
  }

 private:
  int n_ = 0;
  std::vector<S> a_;
};

using CSqMat = SqMat<cplx>;
using QSqMat = SqMat<QI>;

inline CSqMat to_sqmat(const CMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  CSqMat r(static_cast<int>(m.rows()));
  for (int i = 0; i < r.n(); ++i)
    for (int j = 0; j < r.n(); ++j) r(i, j) = m(i, j);
  return r;
}

inline CSqMat to_float(const QSqMat& m) {
  CSqMat r(m.n());
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j) r(i, j) = m(i, j).to_complex();
  return r;
}

// [C_0(A), ..., C_n(A)] with det(tI - A) = sum_k C_k(A) t^{n-k}, via Faddeev-LeVerrier.
template <class S>
std::vector<S> chern_coefficients(const SqMat<S>& a) {
  int n = a.n();
  std::vector<S> c(n + 1, S(0));
  c[0] = S(1);
  SqMat<S> m(n);
  for (int k = 1; k <= n; ++k) {
    SqMat<S> next = a * m;
    for (int i = 0; i < n; ++i) next(i, i) += c[k - 1];
    m = std::move(next);
    S tr = (a * m).trace();
    c[k] = -tr / S(k);
  }
  return c;
}

template <class S>
S chern_poly(int n, int k, const SqMat<S>& a) {
  if (a.n() != n) throw std::invalid_argument("chern_poly: matrix size differs from n");
  if (k < 0 || k > n) throw std::out_of_range("chern_poly: k out of range");
  if (k == 0) return S(1);
  return chern_coefficients(a)[k];
}

inline cplx chern_poly(int n, int k, const CMat& a) { return chern_poly(n, k, to_sqmat(a)); }

inline long long factorial(int k) {
  long long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Symmetric p-linear form mu with mu(X,...,X) = C_p(X), by inclusion-exclusion over subsets.
template <class S>
S polarize(int n, int p, const std::vector<SqMat<S>>& xs) {
  if (static_cast<int>(xs.size()) != p)
    throw std::invalid_argument("polarize: expected exactly p arguments");
  if (p < 1 || p > n) throw std::out_of_range("polarize: degree out of range");
  S total(0);
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    SqMat<S> sum(n);
    int size = 0;
    for (int i = 0; i < p; ++i)
      if (mask & (1u << i)) {
        sum += xs[i];
        ++size;
      }
    S v = chern_poly(n, p, sum);
    if ((p - size) % 2) total -= v;
    else total += v;
  }
  return total / S(static_cast<long>(factorial(p)));
}

inline cplx polarize(int n, int p, const std::vector<CMat>& xs) {
  std::vector<CSqMat> ys;
  for (auto& x : xs) ys.push_back(to_sqmat(x));
  return polarize(n, p, ys);
}

// (P_p(X), Q_p(X)).
template <class S>
std::pair<S, S> pq_split(int n, int p, const SqMat<S>& x) {
  S c = chern_poly(n, p, x);
  S cbar = chern_poly(n, p, x.conjugate());
  if (p % 2) cbar = -cbar;
  S half = S(1) / S(2);
  S pp = (c + cbar) * half;
  return {pp, c - pp};
}

inline std::pair<cplx, cplx> pq_split(int n, int p, const CMat& x) { return pq_split(n, p, to_sqmat(x)); }

// Complexified Q_p on pairs (X, Y) in gl_n + gl_n.
template <class S>
S qp_pair(int n, int p, const SqMat<S>& x, const SqMat<S>& y) {
  S cy = chern_poly(n, p, y);
  if (p % 2) cy = -cy;
  return (chern_poly(n, p, x) - cy) * (S(1) / S(2));
}

inline cplx qp_pair(int n, int p, const CMat& x, const CMat& y) {
  return qp_pair(n, p, to_sqmat(x), to_sqmat(y));
}

enum class PolyKind { C, P, Q };

struct InvariantPolynomial {
  int n = 1;
  int p = 1;
  PolyKind kind = PolyKind::C;

  template <class S>
  S operator()(const SqMat<S>& x) const {
    switch (kind) {
      case PolyKind::C: return chern_poly(n, p, x);
      case PolyKind::P: return pq_split(n, p, x).first;
      case PolyKind::Q: return pq_split(n, p, x).second;
    }
    return S(0);
  }

  // Inclusion-exclusion polarization of this polynomial.
  template <class S>
  S polar(const std::vector<SqMat<S>>& xs) const {
    if (static_cast<int>(xs.size()) != p)
      throw std::invalid_argument("polar: expected exactly p arguments");
    S total(0);
    for (unsigned mask = 1; mask < (1u << p); ++mask) {
      SqMat<S> sum(n);
      int size = 0;
      for (int i = 0; i < p; ++i)
        if (mask & (1u << i)) {
          sum += xs[i];
          ++size;
        }
      S v = (*this)(sum);
      if ((p - size) % 2) total -= v;
      else total += v;
    }
    return total / S(static_cast<long>(factorial(p)));
  }
};

}  // namespace charclass
