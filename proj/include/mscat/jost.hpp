// Jost and regular solutions of -F'' + Q F = k^2 F on the half line.
//
// The Jost solution F(x,k) -> e^{ikx} I as x -> infinity, analytic in
// Im k > 0.  Since Q vanishes at and beyond the support bound, F equals
// e^{ikx} I there exactly, and is integrated backward from the support bound
// in the phase-scaled variable G = e^{-ikx} F.
//
// The regular pair Theta, Phi is entire in k with
//   Theta(0) = I, Theta'(0) = 0,   Phi(0) = 0, Phi'(0) = I.
#pragma once

#include "mscat/ode.hpp"

namespace mscat {

struct JostSamples {
  Complex k;
  std::vector<double> x;
  std::vector<CMatrix> F;
  std::vector<CMatrix> Fx;
};

// Requires Im k >= 0 (UnsupportedK otherwise).
JostSamples jost_solution(const PotentialSpec& p, Complex k,
                          const std::vector<double>& x_eval,
                          OdeOptions opt = {});

struct StandardSamples {
  Complex k;
  std::vector<double> x;
  std::vector<CMatrix> Th, Thx;  // Theta and derivative
  std::vector<CMatrix> Ph, Phx;  // Phi and derivative
};

StandardSamples standard_solutions(const PotentialSpec& p, Complex k,
                                   const std::vector<double>& x_eval,
                                   OdeOptions opt = {});

}  // namespace mscat
