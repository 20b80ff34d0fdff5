// Star-graph specialization.  A diagonal potential with a diagonal node
// condition decouples into n independent scalar half-line problems, one per
// edge.  Edge i is driven by its reflection coefficient R_i(k) = S_ii(k)
// and the per-edge normalization constants gamma_{l,i} = (C_l^2)_ii, so the
// full matrix Marchenko equation splits into n scalar ones.
#pragma once

#include "mscat/direct.hpp"
#include "mscat/marchenko.hpp"

namespace mscat {

struct StarBoundState {
  double kappa = 0.0;
  std::vector<double> gamma;  // per-edge nonnegative normalization constants
};

struct StarScatteringData {
  int n = 0;  // edge count
  KGrid kgrid;
  std::vector<std::vector<Complex>> R;  // R[i][j]: edge i at kgrid.values[j]
  std::vector<double> uhat;             // per-edge asymptote of R_i, each +-1
  std::vector<StarBoundState> bound_states;
};

// Diagonal extraction: R_i = S_ii, uhat_i = uhat_ii, gamma_{l,i} = (C_l^2)_ii.
// Throws NotDiagonal when any S sample carries off-diagonal Frobenius mass
// above offdiag_tol * ||S||_F, and ValidationError when uhat is not a
// diagonal +-1 matrix, when some |R_i(k)| exceeds 1 beyond rounding, or when
// a normalization constant comes out negative.
StarScatteringData extract_star_data(const ScatteringData& sd,
                                     double offdiag_tol = 1e-6);

// The n = 1 ScatteringData view of one edge; bound states that carry no
// weight on the edge (gamma = 0) are dropped.
ScatteringData star_edge_data(const StarScatteringData& star, int edge);

// Runs the scalar inverse pipeline (admissibility screens, kernel synthesis,
// descending sweep, derivative stencils) on one edge and returns the real
// potential samples on xgrid.  The largest imaginary residue of the
// reconstruction -- zero in exact arithmetic for admissible scalar data --
// is reported through imag_defect when given.  Boundary recovery is not
// attempted here: the per-edge data only determines the scalar phase.
std::vector<double> scalar_marchenko_invert(const StarScatteringData& star,
                                            int edge,
                                            const std::vector<double>& xgrid,
                                            const MarchenkoParams& prm = {},
                                            double* imag_defect = nullptr);

// diag(q_1, ..., q_n) as a sampled potential on the common xgrid; the result
// passes validate_potential.  Throws GridMismatch when an edge's sample
// count differs from the grid's.
PotentialSpec assemble_diagonal(const std::vector<double>& xgrid,
                                const std::vector<std::vector<double>>& q_edges);

}  // namespace mscat
