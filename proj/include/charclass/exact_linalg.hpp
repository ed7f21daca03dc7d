#pragma once

// Exact sparse row reduction over Q(i).

#include "charclass/qi.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace charclass {

using SparseRow = std::map<int, QI>;
using DenseVec = std::vector<QI>;

// Incrementally maintained reduced row echelon form.
class Echelon {
 public:
  explicit Echelon(int ncols) : ncols_(ncols) {}

  int ncols() const { return ncols_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  const std::map<int, SparseRow>& rows() const { return rows_; }

  // Returns true if the row increased the rank.
  bool insert(SparseRow row) {
    reduce(row);
    if (row.empty()) return false;
    auto [pivot, lead] = *row.begin();
    QI inv = QI(1) / lead;
    for (auto& [c, v] : row) v *= inv;
    for (auto& [pc, other] : rows_) {
      auto it = other.find(pivot);
      if (it == other.end()) continue;
      QI f = it->second;
      axpy(other, -f, row);
    }
    rows_.emplace(pivot, std::move(row));
    return true;
  }

  void reduce(SparseRow& row) const {
    std::vector<std::pair<int, QI>> hits;
    for (auto& [c, v] : row)
      if (rows_.count(c)) hits.emplace_back(c, v);
    for (auto& [c, v] : hits) axpy(row, -v, rows_.at(c));
  }

  bool is_pivot(int c) const { return rows_.count(c) > 0; }

  std::vector<DenseVec> nullspace() const {
    std::vector<DenseVec> basis;
    for (int f = 0; f < ncols_; ++f) {
      if (is_pivot(f)) continue;
      DenseVec v(ncols_, QI(0));
      v[f] = QI(1);
      for (auto& [pc, row] : rows_) {
        auto it = row.find(f);
        if (it != row.end()) v[pc] = -it->second;
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  static void axpy(SparseRow& dst, const QI& a, const SparseRow& src) {
    if (a.is_zero()) return;
    for (auto& [c, v] : src) {
      auto [it, fresh] = dst.try_emplace(c, QI(0));
      it->second += a * v;
      if (it->second.is_zero()) dst.erase(it);
    }
  }

 private:
  int ncols_;
  std::map<int, SparseRow> rows_;
};

inline SparseRow to_sparse(const DenseVec& v) {
  SparseRow r;
  for (int i = 0; i < static_cast<int>(v.size()); ++i)
    if (!v[i].is_zero()) r.emplace(i, v[i]);
  return r;
}

// Basis of {x : A x = 0} for A given by sparse rows.
inline std::vector<DenseVec> nullspace(const std::vector<SparseRow>& rows, int ncols) {
  Echelon e(ncols);
  for (auto& r : rows) e.insert(r);
  return e.nullspace();
}

inline int rank(const std::vector<SparseRow>& rows, int ncols) {
  Echelon e(ncols);
  for (auto& r : rows) e.insert(r);
  return e.rank();
}

// One solution of A x = b (free variables set to zero), or nullopt when inconsistent.
inline std::optional<DenseVec> solve(const std::vector<SparseRow>& rows, const DenseVec& rhs,
                                     int ncols) {
  Echelon e(ncols + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SparseRow r = rows[i];
    if (!rhs[i].is_zero()) r[ncols] = rhs[i];
    e.insert(std::move(r));
  }
  if (e.is_pivot(ncols)) return std::nullopt;
  DenseVec x(ncols, QI(0));
  for (auto& [pc, row] : e.rows()) {
    auto it = row.find(ncols);
    if (it != row.end()) x[pc] = it->second;
  }
  return x;
}

}  // namespace charclass
