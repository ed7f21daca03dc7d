#pragma once

// Exact Gaussian-rational scalars: a + b i with a, b in Q.

#include <boost/multiprecision/gmp.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace charclass {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

class QI {
 public:
  QI() = default;
  QI(int re) : re_(re) {}                        // NOLINT
  QI(long re) : re_(re) {}                       // NOLINT
  QI(long long re) : re_(re) {}                  // NOLINT
  QI(Rational re) : re_(std::move(re)) {}        // NOLINT
  QI(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static QI i() { return QI(Rational(0), Rational(1)); }
  static QI frac(long long num, long long den) { return QI(Rational(num, den)); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_real() const { return im_ == 0; }
  bool is_imag() const { return re_ == 0; }

  QI conj() const { return QI(re_, -im_); }
  Rational norm2() const { return re_ * re_ + im_ * im_; }

  QI operator-() const { return QI(-re_, -im_); }

  QI& operator+=(const QI& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  QI& operator-=(const QI& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  QI& operator*=(const QI& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  QI& operator/=(const QI& o) {
    if (o.is_zero()) throw std::domain_error("QI: division by zero");
    Rational d = o.norm2();
    Rational r = (re_ * o.re_ + im_ * o.im_) / d;
    im_ = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(r);
    return *this;
  }

  friend QI operator+(QI a, const QI& b) { return a += b; }
  friend QI operator-(QI a, const QI& b) { return a -= b; }
  friend QI operator*(QI a, const QI& b) { return a *= b; }
  friend QI operator/(QI a, const QI& b) { return a /= b; }
  friend bool operator==(const QI& a, const QI& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const QI& a, const QI& b) { return !(a == b); }

  std::complex<double> to_complex() const {
    return {re_.convert_to<double>(), im_.convert_to<double>()};
  }

  std::string str() const {
    if (im_ == 0) return to_string(re_);
    if (re_ == 0) return to_string(im_) + "i";
    std::string im = to_string(im_);
    if (im[0] != '-') im = "+" + im;
    return "(" + to_string(re_) + im + "i)";
  }

  friend std::ostream& operator<<(std::ostream& os, const QI& q) { return os << q.str(); }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline QI conj(const QI& q) { return q.conj(); }
inline bool is_zero(const QI& q) { return q.is_zero(); }

// Powers of i: i^k for any integer k.
inline QI i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return QI(1);
    case 1: return QI::i();
    case 2: return QI(-1);
    default: return -QI::i();
  }
}

// Smallest coefficient lattice among {R, iR} containing q, or "C".
inline std::string lattice_of(const QI& q) {
  if (q.is_real()) return "R";
  if (q.is_imag()) return "iR";
  return "C";
}

inline std::string join_lattice(const std::string& a, const std::string& b) {
  if (a == "0") return b;
  if (b == "0") return a;
  return a == b ? a : "C";
}

}  // namespace charclass
