#include "mscat/potential.hpp"

#include <algorithm>
#include <cmath>

namespace mscat {

PotentialSpec PotentialSpec::zero(int n) {
  if (n < 1) throw ValidationError("potential size must be positive");
  PotentialSpec p;
  p.n_ = n;
  p.form_ = PotentialForm::Zero;
  p.support_bound_ = 0.0;
  return p;
}

PotentialSpec PotentialSpec::square_well(double depth, double width, int n) {
  if (n < 1) throw ValidationError("potential size must be positive");
  if (width <= 0.0) throw ValidationError("square well width must be positive");
  PotentialSpec p;
  p.n_ = n;
  p.form_ = PotentialForm::SquareWell;
  p.depth_ = depth;
  p.width_ = width;
  p.support_bound_ = width;
  p.breakpoints_ = {width};
  return p;
}

PotentialSpec PotentialSpec::sampled(std::vector<double> grid,
                                     std::vector<CMatrix> values,
                                     double support_bound) {
  if (grid.size() < 2) throw ValidationError("sampled grid needs >= 2 nodes");
  if (grid.size() != values.size())
    throw ShapeMismatch("grid and value counts differ");
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw ValidationError("sample grid must be strictly increasing");
  if (grid.front() < 0.0)
    throw ValidationError("sample grid must lie in x >= 0");
  const int n = static_cast<int>(values.front().rows());
  for (const auto& v : values)
    if (v.rows() != n || v.cols() != n)
      throw ShapeMismatch("inconsistent sample dimensions");
  PotentialSpec p;
  p.n_ = n;
  p.form_ = PotentialForm::Sampled;
  p.grid_ = std::move(grid);
  p.values_ = std::move(values);
  p.support_bound_ = support_bound < 0.0 ? p.grid_.back() : support_bound;
  if (p.support_bound_ < p.grid_.back())
    throw ValidationError("support bound below last sample node");
  for (size_t i = 0; i + 1 < p.grid_.size(); ++i)
    if (p.grid_[i] > 0.0) p.breakpoints_.push_back(p.grid_[i]);
  if (p.grid_.back() < p.support_bound_) p.breakpoints_.push_back(p.grid_.back());
  return p;
}

CMatrix PotentialSpec::eval(double x) const {
  CMatrix out(n_, n_);
  eval_into(x, out);
  return out;
}

void PotentialSpec::eval_into(double x, CMatrix& out) const {
  switch (form_) {
    case PotentialForm::Zero:
      out.setZero();
      return;
    case PotentialForm::SquareWell:
      if (x >= 0.0 && x < width_) {
        out.setZero();
        out.diagonal().setConstant(depth_);
      } else {
        out.setZero();
      }
      return;
    case PotentialForm::Sampled: {
      if (x >= support_bound_) {
        out.setZero();
        return;
      }
      if (x <= grid_.front()) {
        out = values_.front();
        return;
      }
      if (x >= grid_.back()) {
        // between the last node and the support bound: taper linearly to 0
        double span = support_bound_ - grid_.back();
        double w = span > 0.0 ? (support_bound_ - x) / span : 0.0;
        out = w * values_.back();
        return;
      }
      auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
      size_t hi = static_cast<size_t>(it - grid_.begin());
      size_t lo = hi - 1;
      double w = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
      out = (1.0 - w) * values_[lo] + w * values_[hi];
      return;
    }
  }
  out.setZero();
}

double PotentialSpec::max_norm() const {
  switch (form_) {
    case PotentialForm::Zero:
      return 0.0;
    case PotentialForm::SquareWell:
      return std::abs(depth_);
    case PotentialForm::Sampled: {
      double m = 0.0;
      for (const auto& v : values_) m = std::max(m, herm_max_abs_eig(v));
      return m;
    }
  }
  return 0.0;
}

PotentialReport validate_potential(const PotentialSpec& p, double herm_tol) {
  PotentialReport rep;
  rep.n = p.n();
  rep.support_bound = p.support_bound();
  rep.max_norm = p.max_norm();

  if (p.form() == PotentialForm::Sampled) {
    for (size_t i = 0; i < p.values().size(); ++i) {
      double d = herm_defect(p.values()[i]);
      rep.herm_defect_max = std::max(rep.herm_defect_max, d);
      if (d > herm_tol * std::max(1.0, p.values()[i].norm()))
        throw ValidationError("non-hermitian sample at node " +
                              std::to_string(i));
    }
  }

  // integral of (1+t)|Q(t)| dt over [0, support_bound], panel-wise trapezoid
  // with endpoint values taken from inside each smooth panel.
  std::vector<double> edges = {0.0};
  for (double b : p.breakpoints()) edges.push_back(b);
  edges.push_back(p.support_bound());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  double total = 0.0;
  for (size_t e = 0; e + 1 < edges.size(); ++e) {
    double a = edges[e], b = edges[e + 1];
    if (b <= a) continue;
    const int m = 64;
    double h = (b - a) / m;
    double s = 0.0;
    for (int j = 0; j <= m; ++j) {
      double x = a + j * h;
      // evaluate just inside the panel so jumps at edges do not leak across
      double xi = std::min(std::max(x, a + 1e-12 * (b - a)),
                           b - 1e-12 * (b - a));
      double f = (1.0 + x) * herm_max_abs_eig(p.eval(xi));
      s += (j == 0 || j == m) ? 0.5 * f : f;
    }
    total += s * h;
  }
  rep.weighted_integral = total;
  return rep;
}

KGrid KGrid::uniform(double k_min, double k_max, int n_k) {
  if (n_k < 2) throw ValidationError("k-grid needs at least 2 points");
  if (k_min <= 0.0)
    throw UnsupportedK("k-grid must exclude k = 0; got k_min <= 0");
  if (k_max <= k_min) throw ValidationError("k_max must exceed k_min");
  KGrid g;
  g.values.resize(n_k);
  double dk = (k_max - k_min) / (n_k - 1);
  for (int i = 0; i < n_k; ++i) g.values[i] = k_min + i * dk;
  g.values.back() = k_max;
  g.k_max = k_max;
  return g;
}

double KGrid::spacing() const {
  if (values.size() < 2) throw GridMismatch("k-grid too small");
  double dk = values[1] - values[0];
  for (size_t i = 1; i + 1 < values.size(); ++i) {
    double d = values[i + 1] - values[i];
    if (std::abs(d - dk) > 1e-9 * std::max(1.0, dk))
      throw GridMismatch("k-grid is not equispaced");
  }
  return dk;
}

}  // namespace mscat
