// Inverse scattering: from scattering data to the transformation-operator
// kernel K(x,y) via the Marchenko integral equation
//
//   G(x+y) + K(x,y) + int_x^T K(x,t) G(t+y) dt = 0,     x <= y <= T,
//
// and from K to the potential Q(x) = -2 dK(x,x)/dx and the boundary matrix.
//
// The data kernel combines the bound-state sum with the Fourier transform of
// S - uhat:  G(t) = sum_l C_l^2 e^{-kappa_l t}
//                   + (1/2 pi) int (S(k) - uhat) e^{ikt} dk.
// The integral over the negative axis is folded onto the positive samples
// through S(-k) = S(k)^{-1} = S(k)^* (unitarity), making G hermitian by
// construction; how far the data itself is from satisfying that relation is
// reported as the asymmetry.
#pragma once

#include "mscat/direct.hpp"
#include "mscat/interp.hpp"

namespace mscat {

struct MarchenkoParams {
  // Truncation T of the y,t domain: max(T_min, x range, 10/min kappa),
  // capped at T_cap.
  double T_min = 15.0;
  double T_cap = 40.0;
  // Nystrom quadrature: Gauss-Legendre panels anchored at T, so the node set
  // nests as x decreases.  The density is fixed (independent of the x and k
  // grids); it resolves oscillations up to k_max ~ panel_order/panel_len.
  double panel_len = 0.2;
  int panel_order = 8;
  // Sample spacing cap of the synthesized G table; the synthesis tightens
  // it automatically to 64 samples per shortest oscillation period 2pi/kmax.
  double table_dt = 0.01;
  // raised-cosine taper over the last fraction of the k grid, with the
  // tapered and truncated O(1/k) tail restored analytically from a fit of
  // ik(S - uhat) over [tail_fit_lo, tail_fit_hi] * k_max
  double taper_frac = 0.10;
  double tail_fit_lo = 0.80;
  double tail_fit_hi = 0.90;
  double decay_threshold = 0.25;  // admissible ||S(k_max) - uhat||_F
  double unitarity_tol = 1e-6;
  double cond_limit = 1e10;
  double roughness_limit = 2.0;
  int n_probes = 5;    // boundary-recovery probe frequencies
  bool force = false;  // demote admissibility screens to diagnostics
};

// Synthesized data kernel with cubic-interpolated dense tables for G and G'.
class KernelG {
 public:
  KernelG(const ScatteringData& sd, double t_max,
          const MarchenkoParams& prm = {});

  int n() const { return n_; }
  double t_max() const { return tmax_; }
  CMatrix eval(double t) const { return table_.eval(t); }
  CMatrix deriv(double t) const { return dtable_.eval(t); }
  void eval_into(double t, CMatrix& out) const;
  double asymmetry() const { return asym_; }
  double decay_gap() const { return decay_gap_; }
  double max_norm() const { return max_norm_; }

 private:
  int n_ = 0;
  double tmax_ = 0.0;
  double asym_ = 0.0;
  double decay_gap_ = 0.0;
  double max_norm_ = 0.0;
  MatrixTable table_, dtable_;
};

// G sampled on a caller grid (t >= 0).
std::vector<CMatrix> kernel_G(const ScatteringData& sd,
                              const std::vector<double>& tgrid,
                              const MarchenkoParams& prm = {});

// Domain truncation: max(T_min, x range, 10/min kappa), capped at T_cap
// (never below the x range).
double marchenko_T(const ScatteringData& sd, double x_back,
                   const MarchenkoParams& prm = {});

// One Marchenko solve at fixed x on the Nystrom nodes of [x, T].
struct MarchenkoSolution {
  double x = 0.0;
  double T = 0.0;
  std::vector<double> nodes;    // quadrature nodes in [x, T]
  std::vector<double> weights;
  std::vector<CMatrix> K;       // K(x, nodes[j])
  double rcond = 1.0;
  double residual = 0.0;        // discrete-system residual, relative
};

MarchenkoSolution marchenko_solve(const KernelG& G, double x, double T,
                                  const MarchenkoParams& prm = {});

// Nystrom off-node evaluation K(x,y) = -G(x+y) - sum w_l K_l G(t_l + y).
CMatrix kernel_value(const KernelG& G, const MarchenkoSolution& sol, double y);
std::vector<CMatrix> kernel_values(const KernelG& G,
                                   const MarchenkoSolution& sol,
                                   const std::vector<double>& ygrid);

// Descending sweep over an ascending x grid; panels anchored at T keep the
// already-factored part of the operator reusable from one x to the next.
struct SweepOutputs {
  std::vector<double> x;            // as given, ascending
  std::vector<CMatrix> Kdiag;       // K(x,x)
  std::vector<double> offdiag_max;  // max |off-diagonal entry| of K(x,.)
  double T = 0.0;

  // exports at the smallest x (boundary recovery wants x = 0)
  std::vector<double> t0_nodes, t0_weights;
  std::vector<CMatrix> K0;   // K(x0, t)
  std::vector<CMatrix> K0x;  // dK/dx (x0, t)
  CMatrix K00;               // K(x0, x0)

  // optional dense evaluations: K(x_i, y_j) for y_j >= x_i, else zero
  std::vector<std::vector<CMatrix>> Keval;

  double cond_estimate = 1.0;
  double residual_max = 0.0;  // re-quadrature residual at probe x values
};

SweepOutputs marchenko_sweep(const KernelG& G, const std::vector<double>& xgrid,
                             double T, const MarchenkoParams& prm = {},
                             const std::vector<double>* eval_y = nullptr);

// Q(x) = -2 dK(x,x)/dx by 4th-order finite differences on a uniform grid.
struct PotentialRecovery {
  std::vector<double> x;
  std::vector<CMatrix> Q;
  double herm_defect_max = 0.0;
  double roughness = 0.0;  // 4th-vs-2nd difference ratio of the diagonal
};

PotentialRecovery recover_potential(const std::vector<double>& xgrid,
                                    const std::vector<CMatrix>& Kdiag,
                                    double roughness_limit = 2.0);

// U from the scattered wave at the origin: with Psi = F_- + F_+ S assembled
// out of the kernel exports, U = (Psi - i Psi_x)(Psi + i Psi_x)^{-1},
// averaged over probe frequencies and polar-projected; the probe spread
// measures the (ideally absent) k-dependence.
struct BoundaryRecovery {
  CMatrix U;
  double spread = 0.0;
  std::vector<double> probes;
  int used_probes = 0;
};

BoundaryRecovery recover_boundary(const ScatteringData& sd,
                                  const SweepOutputs& sweep,
                                  const MarchenkoParams& prm = {});

struct InverseDiagnostics {
  double asymmetry = 0.0;
  double decay_gap = 0.0;
  double cond_estimate = 1.0;
  double residual_max = 0.0;
  double herm_defect_max = 0.0;
  double roughness = 0.0;
  double probe_spread = 0.0;
  double T = 0.0;
};

struct ReconstructionResult {
  std::vector<double> x;
  std::vector<CMatrix> Q;
  CMatrix U;
  InverseDiagnostics diag;
};

// Admissibility screens shared by the inversion entry points: unitarity of
// S on the grid, uhat a hermitian involution, positive kappa with hermitian
// nonnegative C, and decay of S to uhat at k_max.  Throws ValidationError /
// ShapeMismatch / InsufficientDecay; prm.force demotes every screen.
void screen_scattering_data(const ScatteringData& sd,
                            const MarchenkoParams& prm = {});

// Full inverse pipeline with admissibility screens (unitarity of S, involutive
// hermitian uhat, positive kappa with hermitian nonnegative C, decay of
// S - uhat); prm.force demotes screen failures to diagnostics.
ReconstructionResult invert_full(const ScatteringData& sd,
                                 const std::vector<double>& xgrid,
                                 const MarchenkoParams& prm = {});

}  // namespace mscat
