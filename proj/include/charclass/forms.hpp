#pragma once

// Polynomial differential forms on a coordinate patch R^k with exact Q(i)
// coefficients: sums of  c * x^alpha dx_{i1} ^ ... ^ dx_{is}  with i1 < ... < is.

#include "charclass/qi.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace charclass {

struct FKey {
  std::uint32_t wedge = 0;
  std::vector<int> exps;

  int degree() const { return std::popcount(wedge); }
  friend bool operator<(const FKey& a, const FKey& b) {
    if (a.wedge != b.wedge) return a.wedge < b.wedge;
    return a.exps < b.exps;
  }
  friend bool operator==(const FKey& a, const FKey& b) { return a.wedge == b.wedge && a.exps == b.exps; }
};

// Sign of dx_A ^ dx_B relative to the sorted product; 0 when they overlap.
inline int wedge_sign(std::uint32_t a, std::uint32_t b) {
  if (a & b) return 0;
  int inv = 0;
  std::uint32_t bb = b;
  while (bb) {
    int j = std::countr_zero(bb);
    bb &= bb - 1;
    inv += std::popcount(j >= 31 ? 0u : (a >> (j + 1)));
  }
  return (inv % 2) ? -1 : 1;
}

// x = offset + matrix * y, mapping a patch with `src_vars` coordinates y into one with
// `dst_vars` coordinates x.
struct AffineMap {
  int src_vars = 0;
  int dst_vars = 0;
  std::vector<Rational> offset;               // dst_vars
  std::vector<std::vector<Rational>> matrix;  // dst_vars x src_vars

  static AffineMap identity(int k) {
    AffineMap m{k, k, std::vector<Rational>(k, Rational(0)),
                std::vector<std::vector<Rational>>(k, std::vector<Rational>(k, Rational(0)))};
    for (int i = 0; i < k; ++i) m.matrix[i][i] = 1;
    return m;
  }
  static AffineMap zero(int src, int dst) {
    return AffineMap{src, dst, std::vector<Rational>(dst, Rational(0)),
                     std::vector<std::vector<Rational>>(dst, std::vector<Rational>(src, Rational(0)))};
  }
};

class Form {
 public:
  using Terms = std::map<FKey, QI>;

  Form() = default;
  explicit Form(int nvars) : nvars_(nvars) {
    if (nvars < 0 || nvars > 31) throw std::invalid_argument("Form: unsupported number of variables");
  }

  static Form constant(int nvars, const QI& c) {
    Form f(nvars);
    f.add(FKey{0, std::vector<int>(nvars, 0)}, c);
    return f;
  }
  static Form var(int nvars, int i, const QI& c = QI(1)) {
    Form f(nvars);
    FKey k{0, std::vector<int>(nvars, 0)};
    k.exps.at(i) = 1;
    f.add(k, c);
    return f;
  }
  static Form dvar(int nvars, int i, const QI& c = QI(1)) {
    Form f(nvars);
    if (i < 0 || i >= nvars) throw std::out_of_range("dvar: variable out of range");
    f.add(FKey{std::uint32_t{1} << i, std::vector<int>(nvars, 0)}, c);
    return f;
  }

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const FKey& k, const QI& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  // -1 for zero, -2 for mixed degree.
  int degree() const {
    if (terms_.empty()) return -1;
    int d = terms_.begin()->first.degree();
    for (auto& [k, c] : terms_)
      if (k.degree() != d) return -2;
    return d;
  }

  Form part_of_degree(int s) const {
    Form out(nvars_);
    for (auto& [k, c] : terms_)
      if (k.degree() == s) out.add(k, c);
    return out;
  }

  Form& operator+=(const Form& o) {
    check(o);
    for (auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  Form& operator-=(const Form& o) {
    check(o);
    for (auto& [k, c] : o.terms_) add(k, -c);
    return *this;
  }
  Form& operator*=(const QI& s) {
    if (s.is_zero()) terms_.clear();
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(Form a) { return a *= QI(-1); }
  friend Form operator*(Form a, const QI& s) { return a *= s; }
  friend Form operator*(const QI& s, Form a) { return a *= s; }
  friend bool operator==(const Form& a, const Form& b) {
    return a.terms_ == b.terms_ && (a.nvars_ == b.nvars_ || a.terms_.empty());
  }

  // Wedge product.
  friend Form operator*(const Form& a, const Form& b) {
    a.check(b);
    Form out(a.nvars_);
    for (auto& [ka, ca] : a.terms_)
      for (auto& [kb, cb] : b.terms_) {
        int s = wedge_sign(ka.wedge, kb.wedge);
        if (!s) continue;
        FKey k{ka.wedge | kb.wedge, ka.exps};
        for (int i = 0; i < a.nvars_; ++i) k.exps[i] += kb.exps[i];
        QI c = ca * cb;
        out.add(k, s > 0 ? c : -c);
      }
    return out;
  }

  // Exterior derivative.
  Form d() const {
    Form out(nvars_);
    for (auto& [k, c] : terms_)
      for (int v = 0; v < nvars_; ++v) {
        if (k.exps[v] == 0) continue;
        std::uint32_t bit = std::uint32_t{1} << v;
        if (k.wedge & bit) continue;
        int below = std::popcount(k.wedge & (bit - 1));
        FKey nk{k.wedge | bit, k.exps};
        nk.exps[v] -= 1;
        QI nc = c * QI(k.exps[v]);
        out.add(nk, (below % 2) ? -nc : nc);
      }
    return out;
  }

  // Pullback along x = F(y).
  Form pullback(const AffineMap& f) const {
    if (f.dst_vars != nvars_) throw std::invalid_argument("pullback: map target does not match form");
    int k = f.src_vars;
    std::vector<Form> xs, dxs;
    for (int i = 0; i < nvars_; ++i) {
      Form x = constant(k, QI(f.offset[i]));
      Form dx(k);
      for (int j = 0; j < k; ++j)
        if (f.matrix[i][j] != 0) {
          x += var(k, j, QI(f.matrix[i][j]));
          dx += dvar(k, j, QI(f.matrix[i][j]));
        }
      xs.push_back(std::move(x));
      dxs.push_back(std::move(dx));
    }
    std::map<std::pair<int, int>, Form> powers;
    auto power = [&](int i, int e) -> const Form& {
      auto key = std::make_pair(i, e);
      auto it = powers.find(key);
      if (it != powers.end()) return it->second;
      Form r = constant(k, QI(1));
      for (int j = 0; j < e; ++j) r = r * xs[i];
      return powers.emplace(key, std::move(r)).first->second;
    };
    Form out(k);
    for (auto& [key, c] : terms_) {
      Form t = constant(k, c);
      for (int i = 0; i < nvars_; ++i) {
        if (key.exps[i] < 0) throw std::domain_error("pullback: negative exponent");
        if (key.exps[i] > 0) t = t * power(i, key.exps[i]);
      }
      std::uint32_t w = key.wedge;
      while (w && !t.is_zero()) {
        int i = std::countr_zero(w);
        w &= w - 1;
        t = t * dxs[i];
      }
      out += t;
    }
    return out;
  }

  // Integral over the standard simplex {x_i >= 0, sum x_i <= 1} oriented by dx_1 ^ ... ^ dx_k.
  // Only the top-degree part contributes; int x^alpha = prod(alpha_i!) / (|alpha| + k)!.
  QI integrate_simplex() const {
    std::uint32_t top = nvars_ == 0 ? 0 : ((std::uint32_t{1} << nvars_) - 1);
    QI total(0);
    for (auto& [key, c] : terms_) {
      if (key.wedge != top) continue;
      BigInt num = 1, den = 1;
      int sum = 0;
      for (int e : key.exps) {
        for (int j = 2; j <= e; ++j) num *= j;
        sum += e;
      }
      for (int j = 2; j <= sum + nvars_; ++j) den *= j;
      total += c * QI(Rational(num, den));
    }
    return total;
  }

  // Fiber integration over the first coordinate t in [0, 1]: int_0^1 (d/dt contracted into phi).
  Form fiber_integrate_first() const {
    if (nvars_ < 1) throw std::invalid_argument("fiber integration needs an interval coordinate");
    Form out(nvars_ - 1);
    for (auto& [key, c] : terms_) {
      if (!(key.wedge & 1u)) continue;
      FKey nk{key.wedge >> 1, std::vector<int>(key.exps.begin() + 1, key.exps.end())};
      out.add(nk, c * QI(Rational(1, key.exps[0] + 1)));
    }
    return out;
  }

  // Restriction to the slice {x_var = value}, dropping that coordinate.
  Form slice(int var_index, const Rational& value) const {
    Form out(nvars_ - 1);
    std::uint32_t bit = std::uint32_t{1} << var_index;
    for (auto& [key, c] : terms_) {
      if (key.wedge & bit) continue;
      Rational f = 1;
      for (int j = 0; j < key.exps[var_index]; ++j) f *= value;
      if (f == 0) continue;
      FKey nk;
      std::uint32_t low = key.wedge & (bit - 1);
      std::uint32_t high = (key.wedge >> 1) & ~(bit - 1);
      nk.wedge = low | high;
      nk.exps = key.exps;
      nk.exps.erase(nk.exps.begin() + var_index);
      out.add(nk, c * QI(f));
    }
    return out;
  }

  // Value of a 0-form at a rational point (testing helper).
  QI evaluate(const std::vector<Rational>& x) const {
    QI total(0);
    for (auto& [key, c] : terms_) {
      if (key.wedge) continue;
      Rational m = 1;
      for (int i = 0; i < nvars_; ++i)
        for (int j = 0; j < key.exps[i]; ++j) m *= x[i];
      total += c * QI(m);
    }
    return total;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [key, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += c.str();
      for (int i = 0; i < nvars_; ++i)
        if (key.exps[i]) s += " x" + std::to_string(i) + (key.exps[i] > 1 ? "^" + std::to_string(key.exps[i]) : "");
      for (int i = 0; i < nvars_; ++i)
        if (key.wedge & (1u << i)) s += " dx" + std::to_string(i);
    }
    return s;
  }

 private:
  void check(const Form& o) const {
    if (o.nvars_ != nvars_ && !o.terms_.empty() && !terms_.empty())
      throw std::invalid_argument("Form: patches differ in dimension");
  }
  // Allow adding into a default-constructed (0-variable) accumulator.
  friend class FormMatrix;

  int nvars_ = 0;
  Terms terms_;
};

// Graded commutator sign for a ^ b = (-1)^{|a||b|} b ^ a.
inline int koszul(int da, int db) { return (da * db) % 2 ? -1 : 1; }

// n x n matrices of forms with the wedge-matrix product.
class FormMatrix {
 public:
  FormMatrix() = default;
  FormMatrix(int n, int nvars) : n_(n), nvars_(nvars), e_(static_cast<std::size_t>(n) * n, Form(nvars)) {}

  int n() const { return n_; }
  int nvars() const { return nvars_; }
  Form& operator()(int i, int j) { return e_[static_cast<std::size_t>(i) * n_ + j]; }
  const Form& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }

  bool is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](const Form& f) { return f.is_zero(); });
  }

  FormMatrix& operator+=(const FormMatrix& o) {
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
  }
  FormMatrix& operator-=(const FormMatrix& o) {
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
  }
  FormMatrix& operator*=(const QI& s) {
    for (auto& f : e_) f *= s;
    return *this;
  }
  friend FormMatrix operator+(FormMatrix a, const FormMatrix& b) { return a += b; }
  friend FormMatrix operator-(FormMatrix a, const FormMatrix& b) { return a -= b; }
  friend FormMatrix operator*(FormMatrix a, const QI& s) { return a *= s; }
  friend FormMatrix operator*(const FormMatrix& a, const FormMatrix& b) {
    FormMatrix c(a.n_, a.nvars_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (int j = 0; j < a.n_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }
  friend bool operator==(const FormMatrix& a, const FormMatrix& b) { return a.e_ == b.e_; }

  FormMatrix d() const {
    FormMatrix c(n_, nvars_);
    for (std::size_t i = 0; i < e_.size(); ++i) c.e_[i] = e_[i].d();
    return c;
  }

  FormMatrix pullback(const AffineMap& f) const {
    FormMatrix c(n_, f.src_vars);
    for (std::size_t i = 0; i < e_.size(); ++i) c.e_[i] = e_[i].pullback(f);
    return c;
  }

  template <class F>
  FormMatrix map(F fn, int nvars) const {
    FormMatrix c(n_, nvars);
    for (std::size_t i = 0; i < e_.size(); ++i) c.e_[i] = fn(e_[i]);
    return c;
  }

  Form trace() const {
    Form t(nvars_);
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  // Constant matrix times a scalar form.
  static FormMatrix from_scalar(const std::vector<std::vector<QI>>& m, const Form& f) {
    int n = static_cast<int>(m.size());
    FormMatrix c(n, f.nvars());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!m[i][j].is_zero()) c(i, j) = f * m[i][j];
    return c;
  }

 private:
  int n_ = 0;
  int nvars_ = 0;
  std::vector<Form> e_;
};

// Mixed discriminant form of C_p:
//   mu(X_1..X_p) = (-1)^p / p! * sum_{|S|=p} sum_{pi in Sym(S)} sgn(pi) sum_{tau in S_p}
//                  prod_k (X_{tau(k)})_{s_k, pi(s_k)}
// with the product taken in the order k = 1..p. Symmetric when the entries commute
// (even forms), and well defined when at most one argument has odd entries.
inline Form mixed_chern(const std::vector<FormMatrix>& xs) {
  int p = static_cast<int>(xs.size());
  if (p == 0) throw std::invalid_argument("mixed_chern: no arguments");
  int n = xs[0].n();
  int nv = xs[0].nvars();
  Form total(nv);
  std::vector<int> tau(p);
  for (int i = 0; i < p; ++i) tau[i] = i;
  std::vector<std::vector<int>> taus;
  do taus.push_back(tau);
  while (std::next_permutation(tau.begin(), tau.end()));

  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != p) continue;
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    std::vector<int> pi(s);
    do {
      // sign of pi as a permutation of s
      int inv = 0;
      for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
          if (pi[a] > pi[b]) ++inv;
      Form term(nv);
      for (auto& t : taus) {
        Form prod = Form::constant(nv, QI(1));
        for (int k = 0; k < p && !prod.is_zero(); ++k) prod = prod * xs[t[k]](s[k], pi[k]);
        term += prod;
      }
      total += (inv % 2) ? -term : term;
    } while (std::next_permutation(pi.begin(), pi.end()));
  }
  long long f = 1;
  for (int i = 2; i <= p; ++i) f *= i;
  QI scale(Rational((p % 2) ? -1 : 1, f));
  return total * scale;
}

inline Form chern_of(const FormMatrix& theta, int k) {
  if (k == 0) return Form::constant(theta.nvars(), QI(1));
  return mixed_chern(std::vector<FormMatrix>(k, theta));
}

template <class Rng>
Form random_polynomial(int nvars, int max_degree, int nterms, Rng& rng, int range = 3) {
  std::uniform_int_distribution<int> ex(0, max_degree);
  std::uniform_int_distribution<int> co(-range, range);
  Form f(nvars);
  for (int t = 0; t < nterms; ++t) {
    FKey k{0, std::vector<int>(nvars, 0)};
    int budget = max_degree;
    for (int i = 0; i < nvars && budget > 0; ++i) {
      std::uniform_int_distribution<int> e(0, budget);
      k.exps[i] = e(rng);
      budget -= k.exps[i];
    }
    f.add(k, QI(Rational(co(rng)), Rational(co(rng))));
  }
  (void)ex;
  return f;
}

// Random polynomial form of the given degree on a patch.
template <class Rng>
Form random_form(int nvars, int degree, int max_poly_degree, int nterms, Rng& rng) {
  Form out(nvars);
  if (degree > nvars) return out;
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1u << nvars); ++m)
    if (std::popcount(m) == degree) masks.push_back(m);
  std::uniform_int_distribution<std::size_t> pick(0, masks.size() - 1);
  for (int t = 0; t < nterms; ++t) {
    Form coeff = random_polynomial(nvars, max_poly_degree, 1, rng);
    for (auto& [k, c] : coeff.terms()) out.add(FKey{masks[pick(rng)], k.exps}, c);
  }
  return out;
}

}  // namespace charclass
