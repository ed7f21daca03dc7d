#pragma once

// Compatible polynomial forms on a semi-simplicial set. On an m-cell the coordinates
// are t_1..t_m (form variables 0..m-1) with t_0 = 1 - sum t_j eliminated.

#include "charclass/forms.hpp"
#include "charclass/sset.hpp"

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace charclass {

// Pullback of cell coordinates along the face map d_i : Delta^{m-1} -> Delta^m.
inline AffineMap face_map(int m, int i) {
  if (m < 1 || i < 0 || i > m) throw std::out_of_range("face_map: index out of range");
  AffineMap f = AffineMap::zero(m - 1, m);
  // target coordinate t_j is stored at row j-1
  if (i == 0) {
    f.offset[0] = 1;
    for (int k = 0; k < m - 1; ++k) f.matrix[0][k] = -1;
    for (int j = 2; j <= m; ++j) f.matrix[j - 1][j - 2] = 1;
  } else {
    for (int j = 1; j <= m; ++j) {
      if (j < i) f.matrix[j - 1][j - 1] = 1;
      else if (j > i) f.matrix[j - 1][j - 2] = 1;
    }
  }
  return f;
}

// Barycentric coordinate t_k on an m-cell as a 0-form.
inline Form barycentric(int m, int k) {
  if (k == 0) {
    Form f = Form::constant(m, QI(1));
    for (int j = 0; j < m; ++j) f -= Form::var(m, j);
    return f;
  }
  return Form::var(m, k - 1);
}

class PolyForm {
 public:
  PolyForm() = default;
  explicit PolyForm(const SSet& x) : cells_(x.top_dim() + 1) {
    for (int m = 0; m <= x.top_dim(); ++m) cells_[m].assign(x.count(m), Form(m));
  }

  int top_dim() const { return static_cast<int>(cells_.size()) - 1; }
  Form& at(int dim, int index) { return cells_.at(dim).at(index); }
  const Form& at(int dim, int index) const { return cells_.at(dim).at(index); }

  template <class F>
  PolyForm map(F fn) const {
    PolyForm out = *this;
    for (auto& row : out.cells_)
      for (auto& f : row) f = fn(f);
    return out;
  }

  PolyForm d() const {
    return map([](const Form& f) { return f.d(); });
  }

  PolyForm& operator+=(const PolyForm& o) {
    check(o);
    for (std::size_t m = 0; m < cells_.size(); ++m)
      for (std::size_t s = 0; s < cells_[m].size(); ++s) cells_[m][s] += o.cells_[m][s];
    return *this;
  }
  PolyForm& operator-=(const PolyForm& o) {
    check(o);
    for (std::size_t m = 0; m < cells_.size(); ++m)
      for (std::size_t s = 0; s < cells_[m].size(); ++s) cells_[m][s] -= o.cells_[m][s];
    return *this;
  }
  PolyForm& operator*=(const QI& c) {
    for (auto& row : cells_)
      for (auto& f : row) f *= c;
    return *this;
  }
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator*(PolyForm a, const QI& c) { return a *= c; }
  friend bool operator==(const PolyForm& a, const PolyForm& b) { return a.cells_ == b.cells_; }

  friend PolyForm wedge(const PolyForm& a, const PolyForm& b) {
    a.check(b);
    PolyForm out = a;
    for (std::size_t m = 0; m < a.cells_.size(); ++m)
      for (std::size_t s = 0; s < a.cells_[m].size(); ++s) out.cells_[m][s] = a.cells_[m][s] * b.cells_[m][s];
    return out;
  }

  bool is_zero() const {
    for (auto& row : cells_)
      for (auto& f : row)
        if (!f.is_zero()) return false;
    return true;
  }

 private:
  void check(const PolyForm& o) const {
    if (o.cells_.size() != cells_.size()) throw std::invalid_argument("PolyForm: different simplicial sets");
    for (std::size_t m = 0; m < cells_.size(); ++m)
      if (o.cells_[m].size() != cells_[m].size())
        throw std::invalid_argument("PolyForm: different simplicial sets");
  }

  std::vector<std::vector<Form>> cells_;
};

// Cells whose face pullbacks disagree with the stored face forms.
template <class Get>
std::vector<std::string> compatibility_violations_by(const SSet& x, Get get) {
  std::vector<std::string> bad;
  for (int m = 1; m <= x.top_dim(); ++m)
    for (int s = 0; s < x.count(m); ++s)
      for (int i = 0; i <= m; ++i) {
        auto pulled = get(m, s).pullback(face_map(m, i));
        if (!(pulled == get(m - 1, x.face(m, s, i))))
          bad.push_back(x.cell(m, s).id + " face " + std::to_string(i));
      }
  return bad;
}

inline std::vector<std::string> compatibility_violations(const SSet& x, const PolyForm& f) {
  return compatibility_violations_by(x, [&](int m, int s) -> const Form& { return f.at(m, s); });
}

inline bool is_compatible(const SSet& x, const PolyForm& f) { return compatibility_violations(x, f).empty(); }

// Value on each s-cell is the integral of its form over Delta^s.
inline QCochain integrate_to_cochain(const SSet& x, const PolyForm& f, int s) {
  QCochain c(s, x.count(s));
  for (int i = 0; i < x.count(s); ++i) c.values[i] = f.at(s, i).integrate_simplex();
  return c;
}

// Global vertex functions: t_v restricted to a cell is the sum of its barycentric
// coordinates sitting at vertex v. Polynomials in these and their differentials
// are automatically compatible.
struct VertexMonomial {
  QI coeff;
  std::vector<std::pair<int, int>> powers;  // (vertex, exponent)
  std::vector<int> differentials;           // vertices, wedge order
};

inline Form restrict_vertex_monomial(const SSet& x, int m, int s, const VertexMonomial& vm) {
  auto verts = x.vertices(m, s);
  auto tv = [&](int v) {
    Form f(m);
    for (int k = 0; k <= m; ++k)
      if (verts[k] == v) f += barycentric(m, k);
    return f;
  };
  Form out = Form::constant(m, vm.coeff);
  for (auto [v, e] : vm.powers) {
    Form t = tv(v);
    for (int i = 0; i < e && !out.is_zero(); ++i) out = out * t;
  }
  for (int v : vm.differentials) {
    if (out.is_zero()) break;
    out = out * tv(v).d();
  }
  return out;
}

inline bool is_face_of_higher(const SSet& x, int m, int s) {
  for (int c = 0; c < x.count(m + 1); ++c)
    for (int i = 0; i <= m + 1; ++i)
      if (x.face(m + 1, c, i) == s) return true;
  return false;
}

// Random compatible form of degree `deg`: vertex-function polynomials plus bubble
// terms t_0 ... t_m * (random) on cells of dimension >= deg.
template <class Rng>
PolyForm random_compatible_form(const SSet& x, int deg, Rng& rng, int nterms = 3, bool bubbles = true) {
  PolyForm out(x);
  int nv = x.count(0);
  if (nv == 0) return out;
  std::uniform_int_distribution<int> vpick(0, nv - 1), epick(0, 2), cpick(-3, 3);
  std::vector<VertexMonomial> mons;
  for (int t = 0; t < nterms; ++t) {
    VertexMonomial vm{QI(Rational(cpick(rng)), Rational(cpick(rng))), {}, {}};
    int nf = epick(rng);
    for (int i = 0; i < nf; ++i) vm.powers.emplace_back(vpick(rng), 1 + epick(rng) % 2);
    for (int i = 0; i < deg; ++i) vm.differentials.push_back(vpick(rng));
    mons.push_back(vm);
  }
  for (int m = 0; m <= x.top_dim(); ++m)
    for (int s = 0; s < x.count(m); ++s)
      for (auto& vm : mons) out.at(m, s) += restrict_vertex_monomial(x, m, s, vm);
  if (bubbles)
    for (int m = std::max(deg, 1); m <= x.top_dim(); ++m)
      for (int s = 0; s < x.count(m); ++s) {
        if (is_face_of_higher(x, m, s)) continue;
        Form b = Form::constant(m, QI(1));
        for (int k = 0; k <= m; ++k) b = b * barycentric(m, k);
        out.at(m, s) += b * random_form(m, deg, 1, 2, rng);
      }
  return out;
}

}  // namespace charclass
