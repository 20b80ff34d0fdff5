// Potential specifications on the half line.  Q(x) is hermitian n x n,
// compactly supported: identically zero for x >= support_bound().
#pragma once

#include "mscat/core.hpp"

namespace mscat {

enum class PotentialForm { Zero, SquareWell, Sampled };

class PotentialSpec {
 public:
  static PotentialSpec zero(int n);
  // Q(x) = depth * I_n on [0, width), zero beyond.
  static PotentialSpec square_well(double depth, double width, int n = 1);
  // Piecewise-linear interpolation of hermitian samples on an ascending grid;
  // constant below the first node, zero at and beyond support_bound.
  static PotentialSpec sampled(std::vector<double> grid,
                               std::vector<CMatrix> values,
                               double support_bound = -1.0);

  int n() const { return n_; }
  PotentialForm form() const { return form_; }
  double support_bound() const { return support_bound_; }
  double depth() const { return depth_; }
  double width() const { return width_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<CMatrix>& values() const { return values_; }

  CMatrix eval(double x) const;
  // Allocation-free variant for integrator inner loops; out must be n x n.
  void eval_into(double x, CMatrix& out) const;

  // Points in (0, support_bound) where Q or its slope may jump; integration
  // is restarted there so each smooth piece is seen at full order.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  // max over x of the largest |eigenvalue| of Q(x).
  double max_norm() const;

 private:
  PotentialSpec() = default;
  int n_ = 1;
  PotentialForm form_ = PotentialForm::Zero;
  double support_bound_ = 0.0;
  double depth_ = 0.0, width_ = 0.0;
  std::vector<double> grid_;
  std::vector<CMatrix> values_;
  std::vector<double> breakpoints_;
};

struct PotentialReport {
  int n = 0;
  double herm_defect_max = 0.0;
  double weighted_integral = 0.0;  // integral of (1+t) |Q(t)| dt
  double support_bound = 0.0;
  double max_norm = 0.0;
};

// Checks hermiticity and integrability of (1+t)|Q(t)|; throws ValidationError
// on non-hermitian data.
PotentialReport validate_potential(const PotentialSpec& p,
                                   double herm_tol = 1e-10);

struct KGrid {
  std::vector<double> values;  // ascending, strictly positive
  double k_max = 0.0;

  static KGrid uniform(double k_min, double k_max, int n_k);
  int size() const { return static_cast<int>(values.size()); }
  // Uniform spacing, required by the Fourier synthesis; throws GridMismatch
  // if the grid is not equispaced.
  double spacing() const;
};

}  // namespace mscat
