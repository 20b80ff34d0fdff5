// Dense-table interpolation for matrix-valued functions on uniform grids.
// Cubic (4-point Lagrange) local interpolation: O(h^4) accuracy, O(1) eval.
#pragma once

#include "mscat/core.hpp"

namespace mscat {

class MatrixTable {
 public:
  MatrixTable() = default;
  MatrixTable(double t0, double dt, std::vector<CMatrix> samples);

  bool empty() const { return samples_.empty(); }
  double t_min() const { return t0_; }
  double t_max() const { return t0_ + dt_ * (samples_.size() - 1); }
  int rows() const { return samples_.empty() ? 0 : (int)samples_[0].rows(); }

  // Evaluates at t; clamps to the table range (callers keep t inside).
  CMatrix eval(double t) const;

 private:
  double t0_ = 0.0, dt_ = 1.0;
  std::vector<CMatrix> samples_;
};

}  // namespace mscat
