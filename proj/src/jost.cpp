#include "mscat/jost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mscat {

JostSamples jost_solution(const PotentialSpec& p, Complex k,
                          const std::vector<double>& x_eval, OdeOptions opt) {
  if (k.imag() < -1e-12)
    throw UnsupportedK("Jost solution requires Im k >= 0; got Im k = " +
                       std::to_string(k.imag()));
  if (x_eval.empty()) throw ValidationError("empty evaluation grid");
  for (double x : x_eval)
    if (x < 0.0) throw ValidationError("evaluation point x < 0");

  const int n = p.n();
  const double sb = p.support_bound();
  JostSamples out;
  out.k = k;
  out.x = x_eval;
  out.F.assign(x_eval.size(), CMatrix());
  out.Fx.assign(x_eval.size(), CMatrix());

  auto free_values = [&](double x, CMatrix& F, CMatrix& Fx) {
    Complex ph = std::exp(I_UNIT * k * x);
    F = ph * CMatrix::Identity(n, n);
    Fx = (I_UNIT * k * ph) * CMatrix::Identity(n, n);
  };

  // indices sorted by descending x, so one backward pass covers them all
  std::vector<size_t> order(x_eval.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return x_eval[a] > x_eval[b]; });

  SchrodingerPropagator prop(p, k, SchrodingerPropagator::Form::Scaled, opt);
  CMatrix G = CMatrix::Identity(n, n);
  CMatrix Gx = CMatrix::Zero(n, n);
  double x_cur = sb;
  bool started = false;

  for (size_t idx : order) {
    double x = x_eval[idx];
    if (x >= sb) {
      free_values(x, out.F[idx], out.Fx[idx]);
      continue;
    }
    if (!started) {
      x_cur = sb;
      started = true;
    }
    prop.advance(x_cur, x, G, Gx);
    x_cur = x;
    Complex ph = std::exp(I_UNIT * k * x);
    out.F[idx] = ph * G;
    out.Fx[idx] = ph * (Gx + I_UNIT * k * G);
  }
  return out;
}

StandardSamples standard_solutions(const PotentialSpec& p, Complex k,
                                   const std::vector<double>& x_eval,
                                   OdeOptions opt) {
  if (x_eval.empty()) throw ValidationError("empty evaluation grid");
  for (double x : x_eval)
    if (x < 0.0) throw ValidationError("evaluation point x < 0");

  const int n = p.n();
  StandardSamples out;
  out.k = k;
  out.x = x_eval;
  out.Th.assign(x_eval.size(), CMatrix());
  out.Thx.assign(x_eval.size(), CMatrix());
  out.Ph.assign(x_eval.size(), CMatrix());
  out.Phx.assign(x_eval.size(), CMatrix());

  std::vector<size_t> order(x_eval.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return x_eval[a] < x_eval[b]; });

  SchrodingerPropagator prop_t(p, k, SchrodingerPropagator::Form::Standard,
                               opt);
  SchrodingerPropagator prop_p(p, k, SchrodingerPropagator::Form::Standard,
                               opt);
  CMatrix Th = CMatrix::Identity(n, n), Thx = CMatrix::Zero(n, n);
  CMatrix Ph = CMatrix::Zero(n, n), Phx = CMatrix::Identity(n, n);
  double x_cur = 0.0;
  for (size_t idx : order) {
    double x = x_eval[idx];
    prop_t.advance(x_cur, x, Th, Thx);
    prop_p.advance(x_cur, x, Ph, Phx);
    x_cur = x;
    out.Th[idx] = Th;
    out.Thx[idx] = Thx;
    out.Ph[idx] = Ph;
    out.Phx[idx] = Phx;
  }
  return out;
}

}  // namespace mscat
