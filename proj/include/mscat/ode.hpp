// Adaptive Runge-Kutta-Fehlberg 7(8) propagation of the matrix Schrodinger
// system.  Two formulations:
//
//  Standard:  Y'' = (Q(x) - k^2) Y            (regular solutions from x = 0)
//  Scaled:    G'' = Q(x) G - 2ik G'           (G = e^{-ikx} F, Jost form)
//
// The scaled form integrates the Jost solution backward from the support
// bound, where G = I and G' = 0 exactly; it is free of the e^{ikx} envelope,
// so the free tail costs nothing and purely imaginary k never underflows.
#pragma once

#include "mscat/potential.hpp"

namespace mscat {

struct OdeOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  long max_steps = 2000000;
};

class SchrodingerPropagator {
 public:
  enum class Form { Standard, Scaled };

  SchrodingerPropagator(const PotentialSpec& p, Complex k, Form form,
                        OdeOptions opt = {});

  // Advance (Y, Yx) from x_from to x_to, either direction; integration is
  // restarted at potential breakpoints so panels keep full order.
  void advance(double x_from, double x_to, CMatrix& Y, CMatrix& Yx);

 private:
  void rhs(double x, const CMatrix& y, CMatrix& dy);
  void segment(double a, double b, CMatrix& state);

  const PotentialSpec* p_;
  Complex k_;
  Form form_;
  OdeOptions opt_;
  int n_;
  double h_last_ = 0.0;
  // Q may jump exactly at segment ends (panel edges); evaluation points are
  // clamped just inside the current segment, where Q is continuous.
  double eval_lo_ = 0.0, eval_hi_ = 0.0;
  CMatrix q_;                    // scratch for Q(x)
  std::vector<CMatrix> stage_;   // 13 RK stages
  CMatrix ytmp_, ynew_, err_;
};

}  // namespace mscat
