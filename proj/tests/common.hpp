#pragma once

#include "charclass/matlie.hpp"

#include <gtest/gtest.h>

#include <random>

namespace charclass::testing {

inline CMat random_matrix(int n, std::mt19937_64& rng, double scale = 0.5) {
  std::normal_distribution<double> d;
  CMat m = CMat::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) += cplx(d(rng), d(rng)) * scale;
  return m;
}

inline CMat random_hermitian(int n, std::mt19937_64& rng, double norm) {
  std::normal_distribution<double> d;
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
  CMat h = (m + m.adjoint()) / 2.0;
  return h * (norm / h.operatorNorm());
}

inline double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace charclass::testing
