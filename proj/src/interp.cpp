#include "mscat/interp.hpp"

#include <cmath>

namespace mscat {

MatrixTable::MatrixTable(double t0, double dt, std::vector<CMatrix> samples)
    : t0_(t0), dt_(dt), samples_(std::move(samples)) {
  if (samples_.size() < 4)
    throw ValidationError("interpolation table needs >= 4 samples");
  if (dt_ <= 0.0) throw ValidationError("table spacing must be positive");
}

CMatrix MatrixTable::eval(double t) const {
  const int m = static_cast<int>(samples_.size());
  double s = (t - t0_) / dt_;
  if (s <= 0.0) s = 0.0;
  if (s >= m - 1) s = m - 1 - 1e-12;
  int i = static_cast<int>(std::floor(s));
  // 4-point stencil centered on the interval [i, i+1]
  int lo = i - 1;
  if (lo < 0) lo = 0;
  if (lo > m - 4) lo = m - 4;
  double u = s - lo;  // position within the stencil, in [0, 3]
  // Lagrange weights on nodes {0, 1, 2, 3}
  double w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
  double w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
  double w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
  double w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
  return w0 * samples_[lo] + w1 * samples_[lo + 1] + w2 * samples_[lo + 2] +
         w3 * samples_[lo + 3];
}

}  // namespace mscat
