#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ozf/dense.hpp"

namespace ozf {

/// constant + sum_i coeff_i * x_{var_i} (duplicate variable entries allowed).
struct AffineScalar {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;
  std::string name;

  void add(int var, double coeff) {
    if (coeff != 0.0) terms.emplace_back(var, coeff);
  }
  double eval(const Vector& x) const {
    double v = constant;
    for (const auto& [i, c] : terms) v += c * x[i];
    return v;
  }
};

/// Symmetric-matrix-valued affine map constant + sum_i x_{var_i} * coeff_i.
struct AffineMatrix {
  Matrix constant;
  std::vector<std::pair<int, Matrix>> terms;

  Eigen::Index size() const { return constant.rows(); }
  Matrix eval(const Vector& x) const {
    Matrix M = constant;
    for (const auto& [i, C] : terms) M += x[i] * C;
    return M;
  }
};

}  // namespace ozf
