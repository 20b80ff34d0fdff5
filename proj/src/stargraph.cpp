#include "mscat/stargraph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mscat {

StarScatteringData extract_star_data(const ScatteringData& sd,
                                     double offdiag_tol) {
  if (sd.n <= 0) throw ValidationError("scattering data has no channels");
  if (sd.kgrid.size() != static_cast<int>(sd.S.size()))
    throw GridMismatch("k grid and S sample counts differ");
  const int n = sd.n;

  StarScatteringData star;
  star.n = n;
  star.kgrid = sd.kgrid;
  star.R.assign(n, std::vector<Complex>(sd.S.size()));

  for (size_t j = 0; j < sd.S.size(); ++j) {
    const CMatrix& s = sd.S[j];
    if (s.rows() != n || s.cols() != n)
      throw ShapeMismatch("S sample has the wrong shape");
    const double total = s.norm();
    double off2 = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (p != q) off2 += std::norm(s(p, q));
    const double off = std::sqrt(off2);
    if (off > offdiag_tol * (total + 1e-300))
      throw NotDiagonal("off-diagonal mass " + format_real(off) +
                        " of S at k = " + format_real(sd.kgrid.values[j]) +
                        " exceeds " + format_real(offdiag_tol) + "*||S||");
    for (int i = 0; i < n; ++i) {
      const Complex r = s(i, i);
      if (std::abs(r) > 1.0 + 1e-6)
        throw ValidationError("|R_" + std::to_string(i + 1) +
                              "| = " + format_real(std::abs(r)) +
                              " exceeds 1 at k = " +
                              format_real(sd.kgrid.values[j]));
      star.R[i][j] = r;
    }
  }

  if (sd.uhat.rows() != n || sd.uhat.cols() != n)
    throw ShapeMismatch("uhat has the wrong shape");
  star.uhat.resize(n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p != q && std::abs(sd.uhat(p, q)) > 1e-8)
        throw ValidationError("uhat is not diagonal");
    }
    const Complex u = sd.uhat(p, p);
    if (std::abs(u.imag()) > 1e-8 || std::abs(std::abs(u.real()) - 1.0) > 1e-8)
      throw ValidationError("diagonal uhat entry is not +-1");
    star.uhat[p] = u.real() > 0.0 ? 1.0 : -1.0;
  }

  for (const auto& bs : sd.bound_states) {
    if (!(bs.kappa > 0.0))
      throw ValidationError("bound state with non-positive kappa");
    if (bs.C.rows() != n || bs.C.cols() != n)
      throw ShapeMismatch("normalization matrix has the wrong shape");
    const CMatrix c2 = bs.C * bs.C;
    StarBoundState sb;
    sb.kappa = bs.kappa;
    sb.gamma.resize(n);
    for (int i = 0; i < n; ++i) {
      const Complex g = c2(i, i);
      if (std::abs(g.imag()) > 1e-10 * (1.0 + std::abs(g)) ||
          g.real() < -1e-10)
        throw ValidationError("normalization constant is not nonnegative");
      sb.gamma[i] = std::max(0.0, g.real());
    }
    star.bound_states.push_back(std::move(sb));
  }
  return star;
}

ScatteringData star_edge_data(const StarScatteringData& star, int edge) {
  if (star.n <= 0) throw ValidationError("star data has no edges");
  if (edge < 0 || edge >= star.n)
    throw ValidationError("edge index out of range");
  if (static_cast<int>(star.R.size()) != star.n ||
      static_cast<int>(star.uhat.size()) != star.n)
    throw ShapeMismatch("star data arrays do not match the edge count");
  if (star.R[edge].size() != static_cast<size_t>(star.kgrid.size()))
    throw GridMismatch("reflection samples do not match the k grid");

  ScatteringData e;
  e.n = 1;
  e.kgrid = star.kgrid;
  e.S.reserve(star.R[edge].size());
  for (const Complex& r : star.R[edge]) {
    CMatrix s(1, 1);
    s(0, 0) = r;
    e.S.push_back(std::move(s));
  }
  e.uhat = CMatrix::Constant(1, 1, Complex(star.uhat[edge], 0.0));
  for (const auto& sb : star.bound_states) {
    if (static_cast<int>(sb.gamma.size()) != star.n)
      throw ShapeMismatch("normalization constants do not match edge count");
    if (!(sb.gamma[edge] > 0.0)) continue;  // state absent on this edge
    BoundState bs;
    bs.kappa = sb.kappa;
    bs.multiplicity = 1;
    bs.P = CMatrix::Identity(1, 1);
    bs.A = CMatrix::Zero(1, 1);
    bs.C = CMatrix::Constant(1, 1, Complex(std::sqrt(sb.gamma[edge]), 0.0));
    e.bound_states.push_back(std::move(bs));
  }
  return e;
}

std::vector<double> scalar_marchenko_invert(const StarScatteringData& star,
                                            int edge,
                                            const std::vector<double>& xgrid,
                                            const MarchenkoParams& prm,
                                            double* imag_defect) {
  const ScatteringData e = star_edge_data(star, edge);
  screen_scattering_data(e, prm);
  if (xgrid.size() < 7)
    throw ValidationError("x grid too small for potential recovery");

  const double T = marchenko_T(e, xgrid.back(), prm);
  KernelG G(e, 2.0 * T, prm);
  const SweepOutputs sweep = marchenko_sweep(G, xgrid, T, prm);
  const PotentialRecovery pot =
      recover_potential(xgrid, sweep.Kdiag, prm.roughness_limit);

  std::vector<double> q(xgrid.size());
  for (size_t i = 0; i < q.size(); ++i) q[i] = pot.Q[i](0, 0).real();
  // recover_potential hermitizes its output, so for a scalar channel the
  // imaginary residue survives only in the recorded defect |z - conj(z)|.
  if (imag_defect) *imag_defect = 0.5 * pot.herm_defect_max;
  return q;
}

PotentialSpec assemble_diagonal(
    const std::vector<double>& xgrid,
    const std::vector<std::vector<double>>& q_edges) {
  if (q_edges.empty()) throw ValidationError("no edges to assemble");
  if (xgrid.size() < 2)
    throw ValidationError("x grid too small to assemble a potential");
  const int n = static_cast<int>(q_edges.size());
  for (int i = 0; i < n; ++i)
    if (q_edges[i].size() != xgrid.size())
      throw GridMismatch("edge " + std::to_string(i + 1) + " has " +
                         std::to_string(q_edges[i].size()) +
                         " samples, x grid has " +
                         std::to_string(xgrid.size()));

  std::vector<CMatrix> values(xgrid.size(), CMatrix::Zero(n, n));
  for (size_t j = 0; j < xgrid.size(); ++j)
    for (int i = 0; i < n; ++i) values[j](i, i) = q_edges[i][j];
  PotentialSpec p = PotentialSpec::sampled(xgrid, std::move(values));
  validate_potential(p);
  return p;
}

}  // namespace mscat
