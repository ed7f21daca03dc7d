#pragma once

// The Weil algebra W(g) = Lambda g* (x) S g* over Q(i), its Cartan differential,
// the K-basic subcomplex W(g, K), and the exact transgression solver dT = Q.
//
// Real basis of gl_n(C) adapted to the Cartan decomposition (indices in this order):
//   k = u_n :  A_jk = E_jk - E_kj, S_jk = i(E_jk + E_kj)  (pairs j < k), D_j = i E_jj
//   p       :  B_jk = E_jk + E_kj, T_jk = i(E_jk - E_kj)  (pairs j < k), H_j = E_jj
// so the first n^2 indices span k and the last n^2 span p.

#include "charclass/exact_linalg.hpp"
#include "charclass/invpoly.hpp"
#include "charclass/qi.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace charclass {

enum class LieFamily { abstract, gl_n_real, u_n };

struct LieData {
  int dim = 0;
  // c[(a * dim + b) * dim + c] = c^a_{bc}, [e_b, e_c] = sum_a c^a_{bc} e_a.
  std::vector<Rational> structure;
  std::vector<int> k_indices;
  std::vector<std::string> labels;
  LieFamily family = LieFamily::abstract;
  int n = 0;                   // matrix size for the matrix families
  std::vector<QSqMat> basis;   // matrix realization when available

  const Rational& sc(int a, int b, int c) const {
    return structure[(static_cast<std::size_t>(a) * dim + b) * dim + c];
  }
  Rational& sc(int a, int b, int c) {
    return structure[(static_cast<std::size_t>(a) * dim + b) * dim + c];
  }

  bool in_k(int a) const {
    return std::find(k_indices.begin(), k_indices.end(), a) != k_indices.end();
  }

  std::vector<int> p_indices() const {
    std::vector<int> out;
    for (int a = 0; a < dim; ++a)
      if (!in_k(a)) out.push_back(a);
    return out;
  }

  // Largest residual of antisymmetry, Jacobi and closure of k; zero means valid.
  Rational validation_residual() const {
    Rational worst = 0;
    auto upd = [&](const Rational& r) {
      Rational a = abs(r);
      if (a > worst) worst = a;
    };
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c) upd(sc(a, b, c) + sc(a, c, b));
    for (int x = 0; x < dim; ++x)
      for (int y = 0; y < dim; ++y)
        for (int z = 0; z < dim; ++z)
          for (int a = 0; a < dim; ++a) {
            // [[x,y],z] + [[y,z],x] + [[z,x],y]
            Rational s = 0;
            for (int m = 0; m < dim; ++m) {
              s += sc(m, x, y) * sc(a, m, z);
              s += sc(m, y, z) * sc(a, m, x);
              s += sc(m, z, x) * sc(a, m, y);
            }
            upd(s);
          }
    for (int x : k_indices)
      for (int y : k_indices)
        for (int a = 0; a < dim; ++a)
          if (!in_k(a)) upd(sc(a, x, y));
    return worst;
  }

  void validate() const {
    if (validation_residual() != 0) throw std::invalid_argument("LieData: structure constants invalid");
  }

  // Exact real coordinates of a matrix in the basis (matrix families only).
  std::vector<Rational> coordinates(const QSqMat& x) const;
  std::vector<double> coordinates(const CMat& x) const;
};

namespace detail {

inline std::vector<std::pair<int, int>> index_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) out.emplace_back(j, k);
  return out;
}

template <class R, class Get>
std::vector<R> gl_coords(int n, Get get) {
  // get(i, j) -> (re, im) of entry (i, j)
  auto prs = index_pairs(n);
  std::vector<R> out(2 * n * n, R(0));
  int idx = 0;
  // k part of X is (X - X*)/2, p part is (X + X*)/2.
  for (auto [j, k] : prs) {
    auto [ajk, bjk] = get(j, k);
    auto [akj, bkj] = get(k, j);
    out[idx++] = (ajk - akj) / 2;  // A: Re K_jk
    out[idx++] = (bjk + bkj) / 2;  // S: Im K_jk
  }
  for (int j = 0; j < n; ++j) out[idx++] = get(j, j).second;  // D
  for (auto [j, k] : prs) {
    auto [ajk, bjk] = get(j, k);
    auto [akj, bkj] = get(k, j);
    out[idx++] = (ajk + akj) / 2;  // B: Re P_jk
    out[idx++] = (bjk - bkj) / 2;  // T: Im P_jk
  }
  for (int j = 0; j < n; ++j) out[idx++] = get(j, j).first;  // H
  return out;
}

}  // namespace detail

inline std::vector<Rational> LieData::coordinates(const QSqMat& x) const {
  if (family == LieFamily::abstract) throw std::logic_error("coordinates: no matrix realization");
  auto all = detail::gl_coords<Rational>(
      n, [&](int i, int j) { return std::pair<Rational, Rational>(x(i, j).re(), x(i, j).im()); });
  if (family == LieFamily::gl_n_real) return all;
  return std::vector<Rational>(all.begin(), all.begin() + n * n);
}

inline std::vector<double> LieData::coordinates(const CMat& x) const {
  if (family == LieFamily::abstract) throw std::logic_error("coordinates: no matrix realization");
  auto all = detail::gl_coords<double>(
      n, [&](int i, int j) { return std::pair<double, double>(x(i, j).real(), x(i, j).imag()); });
  if (family == LieFamily::gl_n_real) return all;
  return std::vector<double>(all.begin(), all.begin() + n * n);
}

namespace detail {

inline void fill_structure(LieData& L) {
  L.structure.assign(static_cast<std::size_t>(L.dim) * L.dim * L.dim, Rational(0));
  for (int b = 0; b < L.dim; ++b)
    for (int c = 0; c < L.dim; ++c) {
      QSqMat br = L.basis[b] * L.basis[c];
      QSqMat rb = L.basis[c] * L.basis[b];
      rb *= QI(-1);
      br += rb;
      auto co = L.coordinates(br);
      for (int a = 0; a < L.dim; ++a) L.sc(a, b, c) = co[a];
    }
}

}  // namespace detail

// gl_n(C) viewed as a real Lie algebra with k = u_n.
inline LieData gl_n_real(int n) {
  if (n < 1) throw std::invalid_argument("gl_n_real: n must be positive");
  LieData L;
  L.n = n;
  L.dim = 2 * n * n;
  L.family = LieFamily::gl_n_real;
  auto prs = detail::index_pairs(n);
  auto E = [n](int j, int k, QI v) {
    QSqMat m(n);
    m(j, k) = v;
    return m;
  };
  auto lbl = [](const char* s, int j, int k) {
    return std::string(s) + std::to_string(j + 1) + std::to_string(k + 1);
  };
  QI i = QI::i();
  for (auto [j, k] : prs) {
    L.basis.push_back(E(j, k, 1) + E(k, j, -1));
    L.labels.push_back(lbl("A", j, k));
    L.basis.push_back(E(j, k, i) + E(k, j, i));
    L.labels.push_back(lbl("S", j, k));
  }
  for (int j = 0; j < n; ++j) {
    L.basis.push_back(E(j, j, i));
    L.labels.push_back("D" + std::to_string(j + 1));
  }
  for (auto [j, k] : prs) {
    L.basis.push_back(E(j, k, 1) + E(k, j, 1));
    L.labels.push_back(lbl("B", j, k));
    L.basis.push_back(E(j, k, i) + E(k, j, -i));
    L.labels.push_back(lbl("T", j, k));
  }
  for (int j = 0; j < n; ++j) {
    L.basis.push_back(E(j, j, 1));
    L.labels.push_back("H" + std::to_string(j + 1));
  }
  for (int a = 0; a < n * n; ++a) L.k_indices.push_back(a);
  detail::fill_structure(L);
  return L;
}

// u_n with the k-part of the adapted gl_n basis; K trivial.
inline LieData u_n(int n) {
  LieData g = gl_n_real(n);
  LieData L;
  L.n = n;
  L.dim = n * n;
  L.family = LieFamily::u_n;
  L.basis.assign(g.basis.begin(), g.basis.begin() + n * n);
  L.labels.assign(g.labels.begin(), g.labels.begin() + n * n);
  detail::fill_structure(L);
  return L;
}

inline LieData abelian(int dim, std::vector<int> k_indices = {}) {
  LieData L;
  L.dim = dim;
  L.structure.assign(static_cast<std::size_t>(dim) * dim * dim, Rational(0));
  L.k_indices = std::move(k_indices);
  for (int a = 0; a < dim; ++a) L.labels.push_back("e" + std::to_string(a + 1));
  return L;
}

// ---------------------------------------------------------------------------
// Weil elements

struct WKey {
  std::uint64_t theta = 0;           // odd generators, one bit per basis index
  std::vector<std::uint8_t> omega;   // even generators, sorted multiset

  int theta_degree() const { return std::popcount(theta); }
  int degree() const { return theta_degree() + 2 * static_cast<int>(omega.size()); }

  friend bool operator<(const WKey& a, const WKey& b) {
    if (a.theta != b.theta) return a.theta < b.theta;
    return a.omega < b.omega;
  }
  friend bool operator==(const WKey& a, const WKey& b) {
    return a.theta == b.theta && a.omega == b.omega;
  }
};

class WeilElement {
 public:
  using Terms = std::map<WKey, QI>;

  WeilElement() = default;
  explicit WeilElement(const QI& c) {
    if (!c.is_zero()) terms_[WKey{}] = c;
  }

  static WeilElement theta(int a, QI c = QI(1)) {
    WeilElement w;
    w.add(WKey{std::uint64_t{1} << a, {}}, c);
    return w;
  }
  static WeilElement omega(int a, QI c = QI(1)) {
    WeilElement w;
    w.add(WKey{0, {static_cast<std::uint8_t>(a)}}, c);
    return w;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add(const WKey& k, const QI& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  QI coeff(const WKey& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? QI(0) : it->second;
  }

  // -1 when empty; otherwise the degree when homogeneous, -2 when mixed.
  int degree() const {
    if (terms_.empty()) return -1;
    int d = terms_.begin()->first.degree();
    for (auto& [k, c] : terms_)
      if (k.degree() != d) return -2;
    return d;
  }

  WeilElement& operator+=(const WeilElement& o) {
    for (auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  WeilElement& operator-=(const WeilElement& o) {
    for (auto& [k, c] : o.terms_) add(k, -c);
    return *this;
  }
  WeilElement& operator*=(const QI& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  friend WeilElement operator+(WeilElement a, const WeilElement& b) { return a += b; }
  friend WeilElement operator-(WeilElement a, const WeilElement& b) { return a -= b; }
  friend WeilElement operator*(WeilElement a, const QI& s) { return a *= s; }
  friend WeilElement operator*(const QI& s, WeilElement a) { return a *= s; }
  friend bool operator==(const WeilElement& a, const WeilElement& b) { return a.terms_ == b.terms_; }

  // Product of basis monomials: sign and key, or nullopt when a theta repeats.
  static std::optional<std::pair<int, WKey>> mul_keys(const WKey& a, const WKey& b) {
    if (a.theta & b.theta) return std::nullopt;
    // sign = (-1)^{#(i in a, j in b, i > j)}
    int inv = 0;
    std::uint64_t bb = b.theta;
    while (bb) {
      int j = std::countr_zero(bb);
      bb &= bb - 1;
      std::uint64_t above = j >= 63 ? 0 : (a.theta >> (j + 1));
      inv += std::popcount(above);
    }
    WKey k;
    k.theta = a.theta | b.theta;
    k.omega.reserve(a.omega.size() + b.omega.size());
    std::merge(a.omega.begin(), a.omega.end(), b.omega.begin(), b.omega.end(),
               std::back_inserter(k.omega));
    return std::make_pair((inv % 2) ? -1 : 1, std::move(k));
  }

  friend WeilElement operator*(const WeilElement& a, const WeilElement& b) {
    WeilElement out;
    for (auto& [ka, ca] : a.terms_)
      for (auto& [kb, cb] : b.terms_) {
        auto m = mul_keys(ka, kb);
        if (!m) continue;
        QI c = ca * cb;
        if (m->first < 0) c = -c;
        out.add(m->second, c);
      }
    return out;
  }

  // Part with no Omega factors.
  WeilElement theta_part() const {
    WeilElement out;
    for (auto& [k, c] : terms_)
      if (k.omega.empty()) out.add(k, c);
    return out;
  }

  std::string lattice() const {
    std::string l = "0";
    for (auto& [k, c] : terms_) l = join_lattice(l, lattice_of(c));
    return l;
  }

 private:
  Terms terms_;
};

inline std::vector<int> theta_indices(const WKey& k) {
  std::vector<int> out;
  std::uint64_t t = k.theta;
  while (t) {
    out.push_back(std::countr_zero(t));
    t &= t - 1;
  }
  return out;
}

inline WeilElement monomial(const WKey& k, const QI& c = QI(1)) {
  WeilElement w;
  w.add(k, c);
  return w;
}

// d theta^a = Omega^a - 1/2 c^a_{bc} theta^b theta^c
inline WeilElement d_theta(const LieData& L, int a) {
  WeilElement w = WeilElement::omega(a);
  for (int b = 0; b < L.dim; ++b)
    for (int c = b + 1; c < L.dim; ++c) {
      const Rational& s = L.sc(a, b, c);
      if (s == 0) continue;
      w.add(WKey{(std::uint64_t{1} << b) | (std::uint64_t{1} << c), {}}, QI(Rational(-s)));
    }
  return w;
}

// d Omega^a = -c^a_{bc} theta^b Omega^c
inline WeilElement d_omega(const LieData& L, int a) {
  WeilElement w;
  for (int b = 0; b < L.dim; ++b)
    for (int c = 0; c < L.dim; ++c) {
      const Rational& s = L.sc(a, b, c);
      if (s == 0) continue;
      w.add(WKey{std::uint64_t{1} << b, {static_cast<std::uint8_t>(c)}}, QI(Rational(-s)));
    }
  return w;
}

namespace detail {

// Applies a derivation D of parity `odd` given on generators to a monomial.
template <class OnTheta, class OnOmega>
WeilElement derive_monomial(const WKey& key, const QI& coeff, bool odd, OnTheta on_theta,
                            OnOmega on_omega) {
  WeilElement out;
  auto th = theta_indices(key);
  int r = static_cast<int>(th.size());
  for (int j = 0; j < r; ++j) {
    WKey before{0, {}}, after{0, key.omega};
    for (int i = 0; i < j; ++i) before.theta |= std::uint64_t{1} << th[i];
    for (int i = j + 1; i < r; ++i) after.theta |= std::uint64_t{1} << th[i];
    WeilElement img = on_theta(th[j]);
    if (img.is_zero()) continue;
    QI c = coeff;
    if (odd && (j % 2)) c = -c;
    out += monomial(before, c) * img * monomial(after);
  }
  for (std::size_t j = 0; j < key.omega.size(); ++j) {
    if (j > 0 && key.omega[j] == key.omega[j - 1]) continue;
    int mult = static_cast<int>(std::count(key.omega.begin(), key.omega.end(), key.omega[j]));
    WeilElement img = on_omega(key.omega[j]);
    if (img.is_zero()) continue;
    WKey rest{0, key.omega};
    rest.omega.erase(rest.omega.begin() + static_cast<long>(j));
    WKey thetas{key.theta, {}};
    QI c = coeff * QI(mult);
    if (odd && (r % 2)) c = -c;
    out += monomial(thetas, c) * img * monomial(rest);
  }
  return out;
}

}  // namespace detail

class WeilDifferential {
 public:
  explicit WeilDifferential(const LieData& L) : L_(&L) {
    for (int a = 0; a < L.dim; ++a) {
      dth_.push_back(d_theta(L, a));
      dom_.push_back(d_omega(L, a));
    }
  }

  WeilElement operator()(const WeilElement& w) const {
    WeilElement out;
    for (auto& [k, c] : w.terms())
      out += detail::derive_monomial(
          k, c, true, [&](int a) { return dth_[a]; }, [&](int a) { return dom_[a]; });
    return out;
  }

  const LieData& lie() const { return *L_; }

 private:
  const LieData* L_;
  std::vector<WeilElement> dth_, dom_;
};

inline WeilElement weil_d(const WeilElement& w, const LieData& L) { return WeilDifferential(L)(w); }

// Interior product: iota_xi theta^a = delta^a_xi, iota_xi Omega^a = 0.
inline WeilElement contract(const WeilElement& w, int xi, const LieData& L) {
  if (xi < 0 || xi >= L.dim) throw std::out_of_range("contract: basis index out of range");
  WeilElement out;
  std::uint64_t bit = std::uint64_t{1} << xi;
  for (auto& [k, c] : w.terms()) {
    if (!(k.theta & bit)) continue;
    int below = std::popcount(k.theta & (bit - 1));
    WKey r{k.theta & ~bit, k.omega};
    out.add(r, (below % 2) ? -c : c);
  }
  return out;
}

// Coadjoint action of e_xi: theta^a -> -c^a_{xi b} theta^b, Omega^a -> -c^a_{xi b} Omega^b.
inline WeilElement coadjoint(const WeilElement& w, int xi, const LieData& L) {
  if (xi < 0 || xi >= L.dim) throw std::out_of_range("coadjoint: basis index out of range");
  std::vector<WeilElement> th(L.dim), om(L.dim);
  for (int a = 0; a < L.dim; ++a)
    for (int b = 0; b < L.dim; ++b) {
      const Rational& s = L.sc(a, xi, b);
      if (s == 0) continue;
      th[a].add(WKey{std::uint64_t{1} << b, {}}, QI(Rational(-s)));
      om[a].add(WKey{0, {static_cast<std::uint8_t>(b)}}, QI(Rational(-s)));
    }
  WeilElement out;
  for (auto& [k, c] : w.terms())
    out += detail::derive_monomial(
        k, c, false, [&](int a) { return th[a]; }, [&](int a) { return om[a]; });
  return out;
}

// ---------------------------------------------------------------------------
// Monomial bases and coordinates

class MonomialBasis {
 public:
  MonomialBasis(int dim, int degree, std::vector<int> theta_allowed = {}) : dim_(dim), degree_(degree) {
    if (theta_allowed.empty())
      for (int a = 0; a < dim; ++a) theta_allowed.push_back(a);
    for (int s = 0; 2 * s <= degree; ++s) {
      int r = degree - 2 * s;
      if (r > static_cast<int>(theta_allowed.size())) continue;
      auto subsets = subsets_of(theta_allowed, r);
      auto multis = multisets(dim, s);
      for (auto t : subsets)
        for (auto& m : multis) {
          WKey k{t, m};
          index_.emplace(k, static_cast<int>(keys_.size()));
          keys_.push_back(std::move(k));
        }
    }
  }

  int size() const { return static_cast<int>(keys_.size()); }
  int degree() const { return degree_; }
  const WKey& key(int i) const { return keys_[i]; }
  std::optional<int> index(const WKey& k) const {
    auto it = index_.find(k);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  DenseVec vectorize(const WeilElement& w) const {
    DenseVec v(keys_.size(), QI(0));
    for (auto& [k, c] : w.terms()) {
      auto i = index(k);
      if (!i) throw std::logic_error("vectorize: monomial outside the basis");
      v[*i] = c;
    }
    return v;
  }

  WeilElement element(const DenseVec& v) const {
    WeilElement w;
    for (std::size_t i = 0; i < v.size(); ++i) w.add(keys_[i], v[i]);
    return w;
  }

  static std::vector<std::vector<std::uint8_t>> multisets(int dim, int s) {
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<std::uint8_t> cur;
    auto rec = [&](auto&& self, int start) -> void {
      if (static_cast<int>(cur.size()) == s) {
        out.push_back(cur);
        return;
      }
      for (int a = start; a < dim; ++a) {
        cur.push_back(static_cast<std::uint8_t>(a));
        self(self, a);
        cur.pop_back();
      }
    };
    rec(rec, 0);
    return out;
  }

  static std::vector<std::uint64_t> subsets_of(const std::vector<int>& allowed, int r) {
    std::vector<std::uint64_t> out;
    auto rec = [&](auto&& self, std::size_t start, int left, std::uint64_t acc) -> void {
      if (left == 0) {
        out.push_back(acc);
        return;
      }
      for (std::size_t i = start; i < allowed.size(); ++i)
        self(self, i + 1, left - 1, acc | (std::uint64_t{1} << allowed[i]));
    };
    rec(rec, 0, r, 0);
    return out;
  }

 private:
  int dim_;
  int degree_;
  std::vector<WKey> keys_;
  std::map<WKey, int> index_;
};

// Basis of the K-basic elements of the given degree: the null space of the stacked
// constraints iota_xi w = 0 and L_xi w = 0 for every xi in k.
inline std::vector<WeilElement> basic_basis(const LieData& L, int degree) {
  if (degree < 0) return {};
  MonomialBasis amb(L.dim, degree);
  if (L.k_indices.empty()) {
    std::vector<WeilElement> out;
    for (int i = 0; i < amb.size(); ++i) out.push_back(monomial(amb.key(i)));
    return out;
  }
  MonomialBasis lower(L.dim, degree - 1);
  std::vector<SparseRow> rows;
  for (int xi : L.k_indices) {
    std::map<int, SparseRow> by_target_iota, by_target_lie;
    for (int col = 0; col < amb.size(); ++col) {
      WeilElement m = monomial(amb.key(col));
      WeilElement ic = contract(m, xi, L);
      WeilElement lc = coadjoint(m, xi, L);
      for (auto& [k, c] : ic.terms()) by_target_iota[*lower.index(k)][col] = c;
      for (auto& [k, c] : lc.terms()) by_target_lie[*amb.index(k)][col] = c;
    }
    for (auto& [t, r] : by_target_iota) rows.push_back(std::move(r));
    for (auto& [t, r] : by_target_lie) rows.push_back(std::move(r));
  }
  std::vector<WeilElement> out;
  for (auto& v : nullspace(rows, amb.size())) out.push_back(amb.element(v));
  return out;
}

inline bool is_basic(const WeilElement& w, const LieData& L) {
  for (int xi : L.k_indices)
    if (!contract(w, xi, L).is_zero() || !coadjoint(w, xi, L).is_zero()) return false;
  return true;
}

// Theta-free element sum mu(e_a1..e_ap) Omega^a1...Omega^ap of an invariant polynomial.
inline WeilElement embed_invariant(const InvariantPolynomial& phi, const LieData& L) {
  if (L.basis.empty()) throw std::logic_error("embed_invariant: Lie algebra has no matrix realization");
  if (phi.n != L.n) throw std::invalid_argument("embed_invariant: matrix size mismatch");
  WeilElement out;
  for (auto& ms : MonomialBasis::multisets(L.dim, phi.p)) {
    std::vector<QSqMat> args;
    for (auto a : ms) args.push_back(L.basis[a]);
    QI mu = phi.polar(args);
    if (mu.is_zero()) continue;
    // multinomial p! / prod(mult!)
    long long mult = factorial(phi.p);
    for (std::size_t i = 0; i < ms.size();) {
      std::size_t j = i;
      while (j < ms.size() && ms[j] == ms[i]) ++j;
      mult /= factorial(static_cast<int>(j - i));
      i = j;
    }
    out.add(WKey{0, ms}, mu * QI(mult));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transgression

struct TransgressionForm {
  int p = 0;
  int n = 0;
  WeilElement element;              // full K-basic solution of dT = Q
  WeilElement theta_only;           // Omega-free part, an element of Lambda^{2p-1} p*
  std::string lattice;              // empirical coefficient lattice: "0", "R", "iR" or "C"
  std::vector<WeilElement> closed;  // basis of closed basic elements in degree 2p-1
  bool residual_zero = false;       // dT - Q == 0 exactly
};

class TransgressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Restriction of a theta-free polynomial element to k (Omega^a -> 0 for a outside k).
inline WeilElement restrict_to_k(const WeilElement& q, const LieData& L) {
  WeilElement out;
  for (auto& [k, c] : q.terms()) {
    if (k.theta) continue;
    bool ok = std::all_of(k.omega.begin(), k.omega.end(), [&](int a) { return L.in_k(a); });
    if (ok) out.add(k, c);
  }
  return out;
}

inline TransgressionForm transgress(const LieData& L, int p, const WeilElement& q) {
  if (p < 1) throw std::invalid_argument("transgress: p must be positive");
  int deg = q.degree();
  if (deg != -1 && deg != 2 * p) throw TransgressionError("transgress: Q is not homogeneous of degree 2p");
  WeilDifferential d(L);
  if (!is_basic(q, L)) throw TransgressionError("transgress: Q is not K-basic");
  if (!d(q).is_zero()) throw TransgressionError("transgress: Q is not closed");
  if (!restrict_to_k(q, L).is_zero()) throw TransgressionError("transgress: Q has nonzero image in I(K)");

  auto basis = basic_basis(L, 2 * p - 1);
  MonomialBasis src(L.dim, 2 * p - 1), dst(L.dim, 2 * p);
  int r = static_cast<int>(basis.size());

  // Columns: basic basis elements; rows: coordinates in degree 2p.
  std::vector<DenseVec> bvec, dbvec;
  for (auto& b : basis) {
    bvec.push_back(src.vectorize(b));
    dbvec.push_back(dst.vectorize(d(b)));
  }
  std::vector<SparseRow> rows(dst.size());
  for (int i = 0; i < r; ++i)
    for (int t = 0; t < dst.size(); ++t)
      if (!dbvec[i][t].is_zero()) rows[t][i] = dbvec[i][t];
  DenseVec rhs = dst.vectorize(q);

  // Closed basic elements: kernel of the restricted differential.
  Echelon kern(r);
  for (auto& row : rows) kern.insert(row);
  std::vector<DenseVec> z = kern.nullspace();

  TransgressionForm out;
  out.p = p;
  out.n = L.n;
  for (auto& zc : z) {
    WeilElement e;
    for (int i = 0; i < r; ++i)
      if (!zc[i].is_zero()) e += basis[i] * zc[i];
    out.closed.push_back(std::move(e));
  }

  // Minimum coordinate norm: orthogonal (Hermitian) to the closed directions.
  for (auto& zc : z) {
    DenseVec amb(src.size(), QI(0));
    for (int i = 0; i < r; ++i)
      if (!zc[i].is_zero())
        for (int j = 0; j < src.size(); ++j) amb[j] += zc[i] * bvec[i][j];
    SparseRow row;
    for (int i = 0; i < r; ++i) {
      QI s(0);
      for (int j = 0; j < src.size(); ++j)
        if (!amb[j].is_zero() && !bvec[i][j].is_zero()) s += amb[j].conj() * bvec[i][j];
      if (!s.is_zero()) row[i] = s;
    }
    rows.push_back(std::move(row));
    rhs.push_back(QI(0));
  }

  auto sol = solve(rows, rhs, r);
  if (!sol) throw TransgressionError("transgress: not exact in basic subcomplex");
  for (int i = 0; i < r; ++i)
    if (!(*sol)[i].is_zero()) out.element += basis[i] * (*sol)[i];
  out.theta_only = out.element.theta_part();
  out.lattice = out.element.lattice();
  out.residual_zero = (d(out.element) - q).is_zero();
  if (!out.residual_zero) throw TransgressionError("transgress: residual is nonzero");
  return out;
}

inline WeilElement embed_q(const LieData& L, int p) {
  return embed_invariant(InvariantPolynomial{L.n, p, PolyKind::Q}, L);
}

// T_p for gl_n(C)_R relative to U(n).
inline TransgressionForm transgress_qp(int n, int p) {
  if (p < 1 || p > n) throw std::invalid_argument("transgress_qp: need 1 <= p <= n");
  LieData L = gl_n_real(n);
  return transgress(L, p, embed_q(L, p));
}

// Substitution matrix of the complexified restriction to u_n + 0:
// theta^a -> sum_kappa R[a][kappa] phi^kappa with R = 1/2 (theta^a(Z) + i theta^a(-iZ)).
inline std::vector<std::vector<QI>> un_restriction_matrix(int n) {
  LieData g = gl_n_real(n);
  LieData u = u_n(n);
  std::vector<std::vector<QI>> R(g.dim, std::vector<QI>(u.dim, QI(0)));
  QI half = QI::frac(1, 2);
  for (int kappa = 0; kappa < u.dim; ++kappa) {
    QSqMat z = u.basis[kappa];
    QSqMat miz = z;
    miz *= -QI::i();
    auto cz = g.coordinates(z);
    auto cmiz = g.coordinates(miz);
    for (int a = 0; a < g.dim; ++a) R[a][kappa] = half * (QI(cz[a]) + QI::i() * QI(cmiz[a]));
  }
  return R;
}

inline WeilElement restrict_to_un(const WeilElement& t, int n) {
  auto R = un_restriction_matrix(n);
  int udim = n * n;
  std::vector<WeilElement> th(R.size()), om(R.size());
  for (std::size_t a = 0; a < R.size(); ++a)
    for (int k = 0; k < udim; ++k) {
      if (R[a][k].is_zero()) continue;
      th[a] += WeilElement::theta(k, R[a][k]);
      om[a] += WeilElement::omega(k, R[a][k]);
    }
  WeilElement out;
  for (auto& [key, c] : t.terms()) {
    WeilElement m(c);
    for (int a : theta_indices(key)) m = m * th[a];
    for (auto a : key.omega) m = m * om[a];
    out += m;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export and random elements

inline nlohmann::json to_json(const WeilElement& w) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& [k, c] : w.terms()) {
    std::vector<int> om(k.omega.begin(), k.omega.end());
    arr.push_back({{"theta_indices", theta_indices(k)},
                   {"omega_indices", om},
                   {"coeff", {to_string(c.re()), to_string(c.im())}}});
  }
  return arr;
}

inline WeilElement weil_from_json(const nlohmann::json& j) {
  WeilElement w;
  for (auto& t : j) {
    WKey k;
    for (int a : t.at("theta_indices").get<std::vector<int>>()) {
      if (k.theta & (std::uint64_t{1} << a)) throw std::invalid_argument("repeated theta index");
      k.theta |= std::uint64_t{1} << a;
    }
    // theta indices are listed increasing in the canonical export
    auto om = t.at("omega_indices").get<std::vector<int>>();
    std::sort(om.begin(), om.end());
    for (int a : om) k.omega.push_back(static_cast<std::uint8_t>(a));
    auto co = t.at("coeff");
    w.add(k, QI(parse_rational(co[0].get<std::string>()), parse_rational(co[1].get<std::string>())));
  }
  return w;
}

template <class Rng>
QI random_small_qi(Rng& rng, int range = 3) {
  std::uniform_int_distribution<int> d(-range, range);
  return QI(Rational(d(rng)), Rational(d(rng)));
}

template <class Rng>
WeilElement random_weil_element(const LieData& L, int degree, int nterms, Rng& rng) {
  MonomialBasis b(L.dim, degree);
  WeilElement w;
  if (b.size() == 0) return w;
  std::uniform_int_distribution<int> pick(0, b.size() - 1);
  for (int i = 0; i < nterms; ++i) w.add(b.key(pick(rng)), random_small_qi(rng));
  return w;
}

}  // namespace charclass
