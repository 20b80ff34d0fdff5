#include "mscat/ode.hpp"

#include <algorithm>
#include <cmath>

namespace mscat {

namespace {

// Fehlberg 7(8) coefficients, 13 stages.  The embedded difference uses
// stages 0, 10, 11, 12 only.
constexpr int NS = 13;
constexpr double C[NS] = {0.0,       2.0 / 27, 1.0 / 9, 1.0 / 6, 5.0 / 12,
                          0.5,       5.0 / 6,  1.0 / 6, 2.0 / 3, 1.0 / 3,
                          1.0,       0.0,      1.0};

constexpr double A[NS][NS] = {
    {},
    {2.0 / 27},
    {1.0 / 36, 1.0 / 12},
    {1.0 / 24, 0.0, 1.0 / 8},
    {5.0 / 12, 0.0, -25.0 / 16, 25.0 / 16},
    {1.0 / 20, 0.0, 0.0, 1.0 / 4, 1.0 / 5},
    {-25.0 / 108, 0.0, 0.0, 125.0 / 108, -65.0 / 27, 125.0 / 54},
    {31.0 / 300, 0.0, 0.0, 0.0, 61.0 / 225, -2.0 / 9, 13.0 / 900},
    {2.0, 0.0, 0.0, -53.0 / 6, 704.0 / 45, -107.0 / 9, 67.0 / 90, 3.0},
    {-91.0 / 108, 0.0, 0.0, 23.0 / 108, -976.0 / 135, 311.0 / 54, -19.0 / 60,
     17.0 / 6, -1.0 / 12},
    {2383.0 / 4100, 0.0, 0.0, -341.0 / 164, 4496.0 / 1025, -301.0 / 82,
     2133.0 / 4100, 45.0 / 82, 45.0 / 164, 18.0 / 41},
    {3.0 / 205, 0.0, 0.0, 0.0, 0.0, -6.0 / 41, -3.0 / 205, -3.0 / 41,
     3.0 / 41, 6.0 / 41, 0.0},
    {-1777.0 / 4100, 0.0, 0.0, -341.0 / 164, 4496.0 / 1025, -289.0 / 82,
     2193.0 / 4100, 51.0 / 82, 33.0 / 164, 12.0 / 41, 0.0, 1.0},
};

constexpr double B8[NS] = {0.0,       0.0,       0.0, 0.0,        0.0,
                           34.0 / 105, 9.0 / 35,  9.0 / 35,
                           9.0 / 280,  9.0 / 280, 0.0, 41.0 / 840, 41.0 / 840};

constexpr double ERRC = 41.0 / 840;

}  // namespace

SchrodingerPropagator::SchrodingerPropagator(const PotentialSpec& p, Complex k,
                                             Form form, OdeOptions opt)
    : p_(&p), k_(k), form_(form), opt_(opt), n_(p.n()) {
  q_.resize(n_, n_);
  stage_.assign(NS, CMatrix::Zero(2 * n_, n_));
  ytmp_.resize(2 * n_, n_);
  ynew_.resize(2 * n_, n_);
  err_.resize(2 * n_, n_);
}

void SchrodingerPropagator::rhs(double x, const CMatrix& y, CMatrix& dy) {
  p_->eval_into(std::clamp(x, eval_lo_, eval_hi_), q_);
  dy.topRows(n_) = y.bottomRows(n_);
  dy.bottomRows(n_).noalias() = q_ * y.topRows(n_);
  if (form_ == Form::Scaled) {
    dy.bottomRows(n_) -= (2.0 * I_UNIT * k_) * y.bottomRows(n_);
  } else {
    dy.bottomRows(n_) -= (k_ * k_) * y.topRows(n_);
  }
}

void SchrodingerPropagator::segment(double a, double b, CMatrix& state) {
  const double dir = (b > a) ? 1.0 : -1.0;
  const double len = std::abs(b - a);
  if (len == 0.0) return;
  // keep Q evaluations strictly inside (min(a,b), max(a,b)), away from any
  // jump sitting exactly on a segment edge
  const double nudge = 1e-12 * (1.0 + std::max(std::abs(a), std::abs(b)));
  eval_lo_ = std::min(a, b) + std::min(nudge, 0.25 * len);
  eval_hi_ = std::max(a, b) - std::min(nudge, 0.25 * len);
  double h = h_last_ != 0.0 ? std::abs(h_last_)
                            : std::min(len, 0.25 / (1.0 + std::abs(k_)));
  h = std::min(h, len);
  double x = a;
  long steps = 0;
  while (dir * (b - x) > 1e-14 * (1.0 + std::abs(b))) {
    if (++steps > opt_.max_steps)
      throw IntegrationFailure("step budget exhausted at x = " +
                               std::to_string(x));
    h = std::min(h, std::abs(b - x));
    double hs = dir * h;

    rhs(x, state, stage_[0]);
    for (int i = 1; i < NS; ++i) {
      ytmp_ = state;
      for (int j = 0; j < i; ++j)
        if (A[i][j] != 0.0) ytmp_ += (hs * A[i][j]) * stage_[j];
      rhs(x + C[i] * hs, ytmp_, stage_[i]);
    }
    ynew_ = state;
    for (int i = 0; i < NS; ++i)
      if (B8[i] != 0.0) ynew_ += (hs * B8[i]) * stage_[i];
    err_ = (hs * ERRC) * (stage_[0] + stage_[10] - stage_[11] - stage_[12]);

    double enorm = 0.0;
    for (int r = 0; r < 2 * n_; ++r)
      for (int c = 0; c < n_; ++c) {
        double scale = opt_.atol +
                       opt_.rtol * std::max(std::abs(state(r, c)),
                                            std::abs(ynew_(r, c)));
        enorm = std::max(enorm, std::abs(err_(r, c)) / scale);
      }

    if (enorm <= 1.0) {
      x += hs;
      state.swap(ynew_);
      double grow = (enorm > 1e-12) ? 0.9 * std::pow(enorm, -0.125) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(enorm, -1.0 / 7.0), 0.1, 0.9);
    }
    if (h < 1e-13 * (1.0 + std::abs(x)))
      throw IntegrationFailure("step size underflow at x = " +
                               std::to_string(x));
  }
  h_last_ = dir * h;
}

void SchrodingerPropagator::advance(double x_from, double x_to, CMatrix& Y,
                                    CMatrix& Yx) {
  if (Y.rows() != n_ || Y.cols() != n_ || Yx.rows() != n_ || Yx.cols() != n_)
    throw ShapeMismatch("state dimensions do not match the potential");
  if (x_from == x_to) return;

  // collect interior breakpoints in traversal order
  std::vector<double> cuts;
  double lo = std::min(x_from, x_to), hi = std::max(x_from, x_to);
  for (double b : p_->breakpoints())
    if (b > lo + 1e-14 && b < hi - 1e-14) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  if (x_to < x_from) std::reverse(cuts.begin(), cuts.end());
  cuts.push_back(x_to);

  CMatrix state(2 * n_, n_);
  state.topRows(n_) = Y;
  state.bottomRows(n_) = Yx;
  double x = x_from;
  for (double c : cuts) {
    segment(x, c, state);
    x = c;
  }
  Y = state.topRows(n_);
  Yx = state.bottomRows(n_);
}

}  // namespace mscat
