#pragma once

// Finite semi-simplicial sets, cochains, and the builders used by the library:
// ordered simplicial complexes, the 2-sphere, prisms I x M, and bar complexes.

#include "charclass/matlie.hpp"
#include "charclass/qi.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <complex>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace charclass {

struct CellRef {
  int dim = 0;
  int index = 0;
  friend bool operator<(const CellRef& a, const CellRef& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.index < b.index;
  }
  friend bool operator==(const CellRef& a, const CellRef& b) { return a.dim == b.dim && a.index == b.index; }
};

// I x sigma as a signed sum of top cells, and the two end inclusions.
struct PrismData {
  // indexed like the base cells: [dim][index]
  std::vector<std::vector<std::vector<std::pair<int, int>>>> cylinder;  // (cell index in dim+1, sign)
  std::vector<std::vector<int>> end0;
  std::vector<std::vector<int>> end1;
};

class SSet {
 public:
  struct Cell {
    std::string id;
    std::vector<int> faces;  // indices into dimension dim-1
    nlohmann::json label;
  };

  int top_dim() const { return static_cast<int>(cells_.size()) - 1; }
  int count(int dim) const {
    return dim < 0 || dim > top_dim() ? 0 : static_cast<int>(cells_[dim].size());
  }
  int total_cells() const {
    int t = 0;
    for (auto& c : cells_) t += static_cast<int>(c.size());
    return t;
  }
  const Cell& cell(int dim, int index) const { return cells_.at(dim).at(index); }
  int face(int dim, int index, int i) const { return cells_.at(dim).at(index).faces.at(i); }

  std::optional<CellRef> find(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }

  int add_cell(int dim, std::string id, std::vector<int> faces, nlohmann::json label = {}) {
    if (dim < 0) throw std::invalid_argument("SSet: negative dimension");
    if (dim > 0 && static_cast<int>(faces.size()) != dim + 1)
      throw std::invalid_argument("SSet: cell " + id + " needs dim+1 faces");
    if (dim == 0 && !faces.empty()) throw std::invalid_argument("SSet: vertices have no faces");
    for (int f : faces)
      if (f < 0 || f >= count(dim - 1)) throw std::invalid_argument("SSet: face of " + id + " out of range");
    if (by_id_.count(id)) throw std::invalid_argument("SSet: duplicate cell id " + id);
    while (top_dim() < dim) cells_.emplace_back();
    cells_[dim].push_back(Cell{id, std::move(faces), std::move(label)});
    int idx = static_cast<int>(cells_[dim].size()) - 1;
    by_id_[cells_[dim].back().id] = CellRef{dim, idx};
    return idx;
  }

  // Exhaustive check of d_i d_j = d_{j-1} d_i for i < j.
  std::vector<std::string> identity_violations() const {
    std::vector<std::string> bad;
    for (int m = 2; m <= top_dim(); ++m)
      for (int s = 0; s < count(m); ++s)
        for (int j = 0; j <= m; ++j)
          for (int i = 0; i < j; ++i) {
            int a = face(m - 1, face(m, s, j), i);
            int b = face(m - 1, face(m, s, i), j - 1);
            if (a != b)
              bad.push_back(cell(m, s).id + ": d" + std::to_string(i) + "d" + std::to_string(j));
          }
    return bad;
  }
  void validate() const {
    auto bad = identity_violations();
    if (!bad.empty()) throw std::invalid_argument("SSet: simplicial identity fails at " + bad.front());
  }

  // Vertex k of a cell, through iterated faces.
  int vertex(int dim, int index, int k) const {
    while (dim > 0) {
      if (k < dim) {
        index = face(dim, index, dim);
      } else {
        index = face(dim, index, 0);
        --k;
      }
      --dim;
    }
    return index;
  }
  std::vector<int> vertices(int dim, int index) const {
    std::vector<int> v;
    for (int k = 0; k <= dim; ++k) v.push_back(vertex(dim, index, k));
    return v;
  }

  const std::optional<PrismData>& prism() const { return prism_; }
  void set_prism(PrismData p) { prism_ = std::move(p); }

  nlohmann::json to_json() const {
    nlohmann::json cells = nlohmann::json::object(), faces = nlohmann::json::object(),
                   labels = nlohmann::json::object();
    for (int m = 0; m <= top_dim(); ++m) {
      nlohmann::json ids = nlohmann::json::array();
      for (auto& c : cells_[m]) {
        ids.push_back(c.id);
        if (m > 0) {
          nlohmann::json f = nlohmann::json::array();
          for (int x : c.faces) f.push_back(cells_[m - 1][x].id);
          faces[c.id] = f;
        }
        if (!c.label.is_null()) labels[c.id] = c.label;
      }
      cells[std::to_string(m)] = ids;
    }
    return {{"cells", cells}, {"faces", faces}, {"labels", labels}};
  }

  static SSet from_json(const nlohmann::json& j) {
    SSet s;
    const auto& cells = j.at("cells");
    int top = -1;
    for (auto& [k, v] : cells.items()) top = std::max(top, std::stoi(k));
    for (int m = 0; m <= top; ++m) {
      auto key = std::to_string(m);
      if (!cells.contains(key)) throw std::invalid_argument("SSet JSON: missing dimension " + key);
      for (auto& idj : cells.at(key)) {
        std::string id = idj.get<std::string>();
        std::vector<int> f;
        if (m > 0) {
          for (auto& fj : j.at("faces").at(id)) {
            auto r = s.find(fj.get<std::string>());
            if (!r || r->dim != m - 1) throw std::invalid_argument("SSet JSON: bad face of " + id);
            f.push_back(r->index);
          }
        }
        nlohmann::json label;
        if (j.contains("labels") && j.at("labels").contains(id)) label = j.at("labels").at(id);
        s.add_cell(m, id, f, label);
      }
    }
    s.validate();
    return s;
  }

 private:
  std::vector<std::vector<Cell>> cells_;
  std::map<std::string, CellRef> by_id_;
  std::optional<PrismData> prism_;
};

// ---------------------------------------------------------------------------
// Ordered simplicial complexes

namespace detail {
inline std::string simplex_id(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}
}  // namespace detail

// All faces of the given simplices (vertex lists are sorted). Cell ids are "[v0,..,vm]".
inline SSet simplicial_complex(std::vector<std::vector<int>> simplices) {
  std::vector<std::set<std::vector<int>>> by_dim;
  for (auto& s : simplices) {
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw std::invalid_argument("simplicial_complex: repeated vertex");
    int m = static_cast<int>(s.size()) - 1;
    for (unsigned mask = 1; mask < (1u << (m + 1)); ++mask) {
      std::vector<int> f;
      for (int i = 0; i <= m; ++i)
        if (mask & (1u << i)) f.push_back(s[i]);
      int d = static_cast<int>(f.size()) - 1;
      if (static_cast<int>(by_dim.size()) <= d) by_dim.resize(d + 1);
      by_dim[d].insert(f);
    }
  }
  SSet out;
  for (std::size_t d = 0; d < by_dim.size(); ++d)
    for (auto& v : by_dim[d]) {
      std::vector<int> faces;
      if (d > 0)
        for (std::size_t i = 0; i <= d; ++i) {
          std::vector<int> f(v);
          f.erase(f.begin() + i);
          faces.push_back(out.find(detail::simplex_id(f))->index);
        }
      out.add_cell(static_cast<int>(d), detail::simplex_id(v), faces, v);
    }
  out.validate();
  return out;
}

// Boundary of the 3-simplex: 4 + 6 + 4 cells.
inline SSet sphere2() { return simplicial_complex({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}); }

// I x M for an ordered simplicial complex M built by simplicial_complex. Vertex (e, v) is
// numbered e * V + v; the prism over (v0..vm) is triangulated by the shuffles
// ((0,v0)..(0,vj),(1,vj)..(1,vm)) with sign (-1)^j.
inline SSet prism(const SSet& base) {
  int nv = base.count(0);
  std::vector<std::vector<int>> tops;
  for (int m = 0; m <= base.top_dim(); ++m)
    for (int s = 0; s < base.count(m); ++s) {
      auto v = base.cell(m, s).label.get<std::vector<int>>();
      for (int j = 0; j <= m; ++j) {
        std::vector<int> t;
        for (int i = 0; i <= j; ++i) t.push_back(v[i]);
        for (int i = j; i <= m; ++i) t.push_back(nv + v[i]);
        tops.push_back(t);
      }
    }
  SSet out = simplicial_complex(tops);
  PrismData pd;
  pd.cylinder.resize(base.top_dim() + 1);
  pd.end0.resize(base.top_dim() + 1);
  pd.end1.resize(base.top_dim() + 1);
  for (int m = 0; m <= base.top_dim(); ++m)
    for (int s = 0; s < base.count(m); ++s) {
      auto v = base.cell(m, s).label.get<std::vector<int>>();
      std::vector<std::pair<int, int>> cyl;
      for (int j = 0; j <= m; ++j) {
        std::vector<int> t;
        for (int i = 0; i <= j; ++i) t.push_back(v[i]);
        for (int i = j; i <= m; ++i) t.push_back(nv + v[i]);
        cyl.emplace_back(out.find(detail::simplex_id(t))->index, (j % 2) ? -1 : 1);
      }
      pd.cylinder[m].push_back(cyl);
      std::vector<int> v1(v);
      for (auto& x : v1) x += nv;
      pd.end0[m].push_back(out.find(detail::simplex_id(v))->index);
      pd.end1[m].push_back(out.find(detail::simplex_id(v1))->index);
    }
  out.set_prism(std::move(pd));
  return out;
}

// ---------------------------------------------------------------------------
// Cochains

template <class S>
struct Cochain {
  int degree = 0;
  std::vector<S> values;  // indexed by cell index in `degree`
  std::string lattice = "0";

  Cochain() = default;
  Cochain(int deg, int ncells) : degree(deg), values(ncells, S(0)) {}

  Cochain& operator+=(const Cochain& o) {
    check(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  Cochain& operator-=(const Cochain& o) {
    check(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
  friend Cochain operator-(Cochain a) {
    for (auto& v : a.values) v = -v;
    return a;
  }
  friend bool operator==(const Cochain& a, const Cochain& b) {
    return a.degree == b.degree && a.values == b.values;
  }
  bool is_zero() const {
    return std::all_of(values.begin(), values.end(), [](const S& s) { return s == S(0); });
  }

 private:
  void check(const Cochain& o) const {
    if (o.degree != degree || o.values.size() != values.size())
      throw std::invalid_argument("Cochain: degree or support mismatch");
  }
};

using QCochain = Cochain<QI>;
using CCochain = Cochain<std::complex<double>>;

// (delta f)(sigma) = sum_i (-1)^i f(d_i sigma).
template <class S>
Cochain<S> coboundary(const SSet& x, const Cochain<S>& f) {
  int m = f.degree + 1;
  Cochain<S> out(m, x.count(m));
  out.lattice = f.lattice;
  for (int s = 0; s < x.count(m); ++s)
    for (int i = 0; i <= m; ++i) {
      const S& v = f.values.at(x.face(m, s, i));
      if (i % 2) out.values[s] -= v;
      else out.values[s] += v;
    }
  return out;
}

// (B f)(sigma) = f(I x sigma) on a prism complex.
template <class S>
Cochain<S> cochain_B(const SSet& prism_set, const Cochain<S>& f) {
  if (!prism_set.prism()) throw std::invalid_argument("cochain_B: missing prism structure");
  const auto& pd = *prism_set.prism();
  int m = f.degree - 1;
  if (m < 0 || m >= static_cast<int>(pd.cylinder.size())) return Cochain<S>(std::max(m, 0), 0);
  Cochain<S> out(m, static_cast<int>(pd.cylinder[m].size()));
  out.lattice = f.lattice;
  for (std::size_t s = 0; s < pd.cylinder[m].size(); ++s)
    for (auto [c, sign] : pd.cylinder[m][s]) {
      if (sign > 0) out.values[s] += f.values.at(c);
      else out.values[s] -= f.values.at(c);
    }
  return out;
}

// Restriction to the end {e} x M.
template <class S>
Cochain<S> cochain_end(const SSet& prism_set, const Cochain<S>& f, int e) {
  if (!prism_set.prism()) throw std::invalid_argument("cochain_end: missing prism structure");
  const auto& idx = e == 0 ? prism_set.prism()->end0 : prism_set.prism()->end1;
  int m = f.degree;
  Cochain<S> out(m, m < static_cast<int>(idx.size()) ? static_cast<int>(idx[m].size()) : 0);
  out.lattice = f.lattice;
  for (std::size_t s = 0; s < out.values.size(); ++s) out.values[s] = f.values.at(idx[m][s]);
  return out;
}

// ---------------------------------------------------------------------------
// Bar construction

struct BarCellInfo {
  std::vector<CMat> tuple;
  bool from_generators = false;
};

namespace detail {
inline bool same_matrix(const CMat& a, const CMat& b, double tol = 1e-10) {
  double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}
inline bool same_tuple(const std::vector<CMat>& a, const std::vector<CMat>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_matrix(a[i], b[i])) return false;
  return true;
}
}  // namespace detail

// Inhomogeneous bar cells (h_1..h_m) with d_0 = drop h_1, d_i = merge h_i h_{i+1},
// d_m = drop h_m. Generated by all generator tuples up to `depth`, closed under faces.
inline SSet bar_sset(const std::vector<CMat>& generators, int depth, std::vector<std::vector<BarCellInfo>>* info = nullptr) {
  if (depth < 0 || depth > 4) throw std::invalid_argument("bar_sset: depth must be in [0, 4]");
  for (auto& g : generators) require_invertible(g, "bar_sset");
  std::vector<std::vector<BarCellInfo>> cells(depth + 1);
  auto intern = [&](int m, const std::vector<CMat>& t, bool gen) -> int {
    for (std::size_t i = 0; i < cells[m].size(); ++i)
      if (detail::same_tuple(cells[m][i].tuple, t)) {
        cells[m][i].from_generators = cells[m][i].from_generators || gen;
        return static_cast<int>(i);
      }
    cells[m].push_back(BarCellInfo{t, gen});
    return static_cast<int>(cells[m].size()) - 1;
  };
  intern(0, {}, true);
  std::vector<std::vector<int>> words{{}};
  for (int m = 1; m <= depth; ++m) {
    std::vector<std::vector<int>> next;
    for (auto& w : words)
      for (std::size_t g = 0; g < generators.size(); ++g) {
        auto w2 = w;
        w2.push_back(static_cast<int>(g));
        std::vector<CMat> t;
        for (int x : w2) t.push_back(generators[x]);
        intern(m, t, true);
        next.push_back(w2);
      }
    words = std::move(next);
  }
  auto face_tuple = [](const std::vector<CMat>& t, int i) {
    int m = static_cast<int>(t.size());
    std::vector<CMat> f;
    if (i == 0) {
      f.assign(t.begin() + 1, t.end());
    } else if (i == m) {
      f.assign(t.begin(), t.end() - 1);
    } else {
      for (int k = 0; k < m; ++k) {
        if (k == i - 1) f.push_back(t[k] * t[k + 1]);
        else if (k != i) f.push_back(t[k]);
      }
    }
    return f;
  };
  // close downward
  for (int m = depth; m >= 1; --m)
    for (std::size_t s = 0; s < cells[m].size(); ++s)
      for (int i = 0; i <= m; ++i) intern(m - 1, face_tuple(cells[m][s].tuple, i), false);

  SSet out;
  for (int m = 0; m <= depth; ++m)
    for (std::size_t s = 0; s < cells[m].size(); ++s) {
      std::vector<int> faces;
      if (m > 0)
        for (int i = 0; i <= m; ++i) {
          auto f = face_tuple(cells[m][s].tuple, i);
          for (std::size_t k = 0; k < cells[m - 1].size(); ++k)
            if (detail::same_tuple(cells[m - 1][k].tuple, f)) {
              faces.push_back(static_cast<int>(k));
              break;
            }
        }
      nlohmann::json label = nlohmann::json::array();
      for (auto& h : cells[m][s].tuple) label.push_back(matrix_to_json(h));
      out.add_cell(m, "b" + std::to_string(m) + "_" + std::to_string(s), faces,
                   {{"tuple", label}, {"generator_cell", cells[m][s].from_generators}});
    }
  out.validate();
  if (info) *info = std::move(cells);
  return out;
}

}  // namespace charclass
