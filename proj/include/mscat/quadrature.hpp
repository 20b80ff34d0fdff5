// Quadrature helpers: Gauss-Legendre rules, composite panels anchored at a
// right endpoint (so panel sets nest as the left endpoint slides down),
// Filon-type oscillatory weights on uniform grids, and the sine integral.
#pragma once

#include "mscat/core.hpp"

namespace mscat {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// m-point Gauss-Legendre rule on [-1, 1].
QuadRule gauss_legendre(int m);

// Gauss-Legendre rule mapped to [a, b].
QuadRule gauss_legendre_on(int m, double a, double b);

// Composite rule on [a, b]: ceil((b-a)/panel_len) equal panels, gl_order
// points each.  Nodes ascend.
QuadRule composite_gauss(double a, double b, double panel_len, int gl_order);

// Sine integral Si(x) = int_0^x sin(s)/s ds, |error| ~ 1e-14.
double sine_integral(double x);

// Filon weights for one uniform panel: with theta = h*t,
//   int_a^{a+h} f(k) e^{ikt} dk  ~=  h e^{iat} (w0 f(a) + w1 f(a+h)),
// exact when f is linear on the panel.
void filon_weights(double theta, Complex& w0, Complex& w1);

// int over the uniform grid ks of samples f_j e^{i k t} dk by panel-wise
// Filon (linear) quadrature; f has one sample per grid point.
CMatrix filon_transform(const std::vector<double>& ks,
                        const std::vector<CMatrix>& f, double t);

// Same quadrature for scalar samples.
Complex filon_transform_scalar(const std::vector<double>& ks,
                               const std::vector<Complex>& f, double t);

}  // namespace mscat
