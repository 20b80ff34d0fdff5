// Direct scattering: from (Q, U) to the scattering matrix, bound states and
// normalization matrices.
//
// Conventions (fixed by the requirement Psi = Xi Mm^{-1} = F_- + F_+ S and
// verified against the free closed forms):
//
//   X±(k) = F(0,±k)^* B - F_x(0,±k)^* A          (^* = conjugate transpose)
//   M±(k) = ± X±(k) / (2ik)
//   S(k)  = M+ M-^{-1} = -X+ X-^{-1}
//
// M- continues to Im k > 0 through F(0, iy):
//   X-(iy) = F(0,iy)^* B - F_x(0,iy)^* A,   M-(iy) = X-(iy) / (2y).
// Bound states sit at the zeros of det M-(iy), y > 0.
#pragma once

#include "mscat/boundary.hpp"
#include "mscat/jost.hpp"

#include <array>

namespace mscat {

struct BoundaryValues {
  Complex k;
  CMatrix Fp, Fxp;  // F(0, +k), F_x(0, +k)
  CMatrix Fm, Fxm;  // F(0, -k), F_x(0, -k)
};

// Jost data at the origin for real k != 0.
BoundaryValues jost_boundary_values(const PotentialSpec& p, double k,
                                    OdeOptions opt = {});

struct MMatrices {
  Complex k;
  CMatrix Xp, Xm;
  CMatrix Mp, Mm;
};

MMatrices m_matrices(const BoundaryValues& bv, const BoundaryCondition& bc);

// S = -Xp Xm^{-1}; throws SingularMinus when Xm is numerically singular.
// rcond_out, when given, receives the reciprocal condition estimate of Xm.
CMatrix scattering_matrix(const MMatrices& m, double rcond_floor = 1e-12,
                          double* rcond_out = nullptr);

// Frobenius residuals, each normalized by 2|k|, of the four identities
//   F- F-x^* - F+ F+x^* = 2ik I         F+x F+^* - F-x F-^* = 2ik I
//   F-x F-x^* - F+x F+x^* = 0           F- F-^*  - F+ F+^*  = 0
std::array<double, 4> jost_identity_residuals(const BoundaryValues& bv);

// X-(iy) for y > 0.
CMatrix xminus_imag(const PotentialSpec& p, const BoundaryCondition& bc,
                    double y, OdeOptions opt = {});

struct BoundState {
  double kappa = 0.0;
  int multiplicity = 0;
  CMatrix P;  // orthogonal projector onto the left null space of M-(i kappa)
  CMatrix A;  // int_0^inf F^* F (t, i kappa) dt
  CMatrix C;  // hermitian nonnegative normalization matrix, C = P B^{-1/2}
};

struct DirectOptions {
  OdeOptions ode;
  int n_scan = 400;
  double kappa_min = 1e-3;
  // Scan ceiling uses sqrt(max|Q|) + 1 plus the boundary binding scale
  // (capped); states bound more tightly than the cap are not searched.
  double bc_binding_cap = 40.0;
  double rank_tol = 1e-7;      // singular-value rank cut, relative
  double root_rel_tol = 1e-5;  // accept a refined dip as a root below this
  bool with_bound_states = true;
};

// max over eigenphases theta of U of tan(theta/2) where positive (the
// kappa of the boundary-induced free bound state), capped.
double boundary_binding_scale(const BoundaryCondition& bc, double cap);

// Scan [kappa_min, kappa_max] (log-spaced) for dips of the smallest singular
// value of X-(iy); refine each dip to 1e-10 and classify rank.  Fills kappa,
// multiplicity, P.  RangeTooCoarse if one scan cell holds several dips.
std::vector<BoundState> find_bound_states(const PotentialSpec& p,
                                          const BoundaryCondition& bc,
                                          double kappa_min, double kappa_max,
                                          const DirectOptions& opt = {});

// Fills A and C for a located bound state (NotARoot if kappa is not one).
void normalization_matrices(const PotentialSpec& p,
                            const BoundaryCondition& bc, BoundState& bs,
                            const DirectOptions& opt = {});

struct VirtualLevelReport {
  double eps = 0.0;
  double sigma_eps = 0.0;   // smallest singular value of the boundary form
  double sigma_2eps = 0.0;  // applied to F(., i eps) resp. F(., 2i eps)
  double ratio = 0.0;
  bool flagged = false;
};

// A zero-energy (virtual) level makes the boundary form applied to F(., iy)
// vanish linearly as y -> 0; the ratio sigma(eps)/sigma(2 eps) then drops to
// ~1/2 while a regular origin keeps it near 1.
VirtualLevelReport check_no_virtual_levels(const PotentialSpec& p,
                                           const BoundaryCondition& bc,
                                           double eps = 1e-3,
                                           OdeOptions opt = {});

struct ScatteringData {
  int n = 0;
  KGrid kgrid;
  std::vector<CMatrix> S;  // one per k sample
  CMatrix uhat;
  std::vector<BoundState> bound_states;
};

struct DirectDiagnostics {
  double unitarity_max = 0.0;
  std::array<double, 4> identity_max{};
  double s_uhat_gap = 0.0;    // ||S(k_max) - uhat||_F
  double minus_rcond_min = 1.0;
};

ScatteringData compute_scattering(const PotentialSpec& p,
                                  const BoundaryCondition& bc,
                                  const KGrid& kgrid,
                                  DirectDiagnostics* diag = nullptr,
                                  const DirectOptions& opt = {});

struct WaveSamples {
  Complex k;
  std::vector<double> x;
  std::vector<CMatrix> Psi, Psix;  // physical solution F_- + F_+ S
  double route_gap = 0.0;          // max distance to Xi M-^{-1}
  double boundary_res = 0.0;
};

WaveSamples scattered_wave(const PotentialSpec& p, const BoundaryCondition& bc,
                           double k, const std::vector<double>& x_eval,
                           OdeOptions opt = {});

}  // namespace mscat
