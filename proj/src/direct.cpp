#include "mscat/direct.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>

#include "mscat/quadrature.hpp"

namespace mscat {

namespace {

double smallest_sv(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1);
}

// Golden-section minimization of a unimodal f on [a, b] to absolute xtol.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol) {
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

BoundaryValues jost_boundary_values(const PotentialSpec& p, double k,
                                    OdeOptions opt) {
  if (k == 0.0) throw UnsupportedK("boundary values need k != 0");
  const std::vector<double> origin{0.0};
  JostSamples plus = jost_solution(p, Complex(k, 0.0), origin, opt);
  JostSamples minus = jost_solution(p, Complex(-k, 0.0), origin, opt);
  BoundaryValues bv;
  bv.k = Complex(k, 0.0);
  bv.Fp = plus.F[0];
  bv.Fxp = plus.Fx[0];
  bv.Fm = minus.F[0];
  bv.Fxm = minus.Fx[0];
  return bv;
}

MMatrices m_matrices(const BoundaryValues& bv, const BoundaryCondition& bc) {
  if (bv.Fp.rows() != bc.n)
    throw ShapeMismatch("Jost data is " + std::to_string(bv.Fp.rows()) +
                        " channels, boundary is " + std::to_string(bc.n));
  MMatrices m;
  m.k = bv.k;
  m.Xp = bv.Fp.adjoint() * bc.B - bv.Fxp.adjoint() * bc.A;
  m.Xm = bv.Fm.adjoint() * bc.B - bv.Fxm.adjoint() * bc.A;
  const Complex twoik = 2.0 * I_UNIT * bv.k;
  m.Mp = m.Xp / twoik;
  m.Mm = -m.Xm / twoik;
  return m;
}

CMatrix scattering_matrix(const MMatrices& m, double rcond_floor,
                          double* rcond_out) {
  // Right division S Xm = -Xp done as a transposed solve.
  Eigen::PartialPivLU<CMatrix> lu(m.Xm.transpose());
  const double rc = lu.rcond();
  if (rcond_out) *rcond_out = rc;
  if (!(rc > rcond_floor))
    throw SingularMinus("X-(k) has rcond " + std::to_string(rc) + " at k = " +
                        format_complex(m.k));
  return lu.solve(CMatrix(-m.Xp.transpose())).transpose();
}

std::array<double, 4> jost_identity_residuals(const BoundaryValues& bv) {
  const int n = static_cast<int>(bv.Fp.rows());
  const CMatrix id = CMatrix::Identity(n, n);
  const Complex twoik = 2.0 * I_UNIT * bv.k;
  const double scale = 2.0 * std::abs(bv.k);
  std::array<double, 4> r{};
  r[0] = (bv.Fm * bv.Fxm.adjoint() - bv.Fp * bv.Fxp.adjoint() - twoik * id)
             .norm() /
         scale;
  r[1] = (bv.Fxp * bv.Fp.adjoint() - bv.Fxm * bv.Fm.adjoint() - twoik * id)
             .norm() /
         scale;
  r[2] =
      (bv.Fxm * bv.Fxm.adjoint() - bv.Fxp * bv.Fxp.adjoint()).norm() / scale;
  r[3] = (bv.Fm * bv.Fm.adjoint() - bv.Fp * bv.Fp.adjoint()).norm() / scale;
  return r;
}

CMatrix xminus_imag(const PotentialSpec& p, const BoundaryCondition& bc,
                    double y, OdeOptions opt) {
  if (!(y > 0.0)) throw UnsupportedK("X-(iy) continuation needs y > 0");
  JostSamples js = jost_solution(p, Complex(0.0, y), {0.0}, opt);
  return js.F[0].adjoint() * bc.B - js.Fx[0].adjoint() * bc.A;
}

double boundary_binding_scale(const BoundaryCondition& bc, double cap) {
  Eigen::ComplexEigenSolver<CMatrix> es(bc.U, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw EigendecompositionFailure("boundary matrix eigenvalues");
  double best = 0.0;
  for (int j = 0; j < bc.n; ++j) {
    const double theta = std::arg(es.eigenvalues()(j));
    // Eigenphase in (0, pi) binds a free state at kappa = tan(theta/2);
    // phases at or past pi (Dirichlet-like channels) bind nothing finite.
    if (theta > 1e-9 && theta < M_PI - 1e-9)
      best = std::max(best, std::min(std::tan(0.5 * theta), cap));
  }
  return best;
}

std::vector<BoundState> find_bound_states(const PotentialSpec& p,
                                          const BoundaryCondition& bc,
                                          double kappa_min, double kappa_max,
                                          const DirectOptions& opt) {
  if (!(kappa_min > 0.0) || !(kappa_max > kappa_min))
    throw ValidationError("bound-state scan needs 0 < kappa_min < kappa_max");
  auto sigma = [&](double y) { return smallest_sv(xminus_imag(p, bc, y, opt.ode)); };

  const int m = std::max(opt.n_scan, 16);
  std::vector<double> ys(m), sig(m);
  const double lmin = std::log(kappa_min), lmax = std::log(kappa_max);
  for (int i = 0; i < m; ++i) {
    ys[i] = std::exp(lmin + (lmax - lmin) * i / (m - 1));
    sig[i] = sigma(ys[i]);
  }
  const double sig_scale = *std::max_element(sig.begin(), sig.end());

  std::vector<int> candidates;
  for (int i = 0; i < m; ++i) {
    const bool left_ok = (i == 0) || sig[i] < sig[i - 1];
    const bool right_ok = (i == m - 1) || sig[i] < sig[i + 1];
    if (left_ok && right_ok && sig[i] < 0.5 * sig_scale)
      candidates.push_back(i);
  }

  std::vector<BoundState> found;
  for (int i : candidates) {
    double lo = ys[std::max(i - 1, 0)];
    double hi = ys[std::min(i + 1, m - 1)];

    // Sub-scan the bracket: several separated dips inside one scan cell mean
    // the scan cannot isolate roots at this resolution.
    constexpr int sub = 33;
    std::array<double, sub> ts, ss;
    for (int j = 0; j < sub; ++j) {
      ts[j] = lo + (hi - lo) * j / (sub - 1.0);
      ss[j] = sigma(ts[j]);
    }
    int dips = 0, best = 0;
    for (int j = 1; j + 1 < sub; ++j) {
      if (ss[j] < ss[j - 1] && ss[j] < ss[j + 1]) ++dips;
      if (ss[j] < ss[best]) best = j;
    }
    if (dips > 1)
      throw RangeTooCoarse(
          "several singular-value dips inside one scan cell near kappa = " +
          std::to_string(ys[i]) + "; increase the scan resolution");
    if (best == 0 || best == sub - 1) continue;  // monotone: dip was spurious

    const double kappa =
        golden_min(sigma, ts[best - 1], ts[best + 1], 1e-10);

    Eigen::JacobiSVD<CMatrix> svd(xminus_imag(p, bc, kappa, opt.ode),
                                  Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    // Reference scale: at a root every bound channel vanishes, and with a
    // full kernel smax itself vanishes, so the off-root scan level sets the
    // scale.
    const double sref = std::max(smax, sig_scale);
    if (!(smin <= opt.root_rel_tol * std::max(sref, 1e-300)))
      continue;  // shallow dip, not a zero

    bool dup = false;
    for (const auto& b : found)
      if (std::abs(b.kappa - kappa) < 1e-8 * (1.0 + kappa)) dup = true;
    if (dup) continue;

    BoundState bs;
    bs.kappa = kappa;
    int mult = 0;
    for (int j = 0; j < sv.size(); ++j)
      if (sv(j) <= opt.rank_tol * sref) ++mult;
    bs.multiplicity = std::max(mult, 1);
    const CMatrix ur = svd.matrixU().rightCols(bs.multiplicity);
    bs.P = ur * ur.adjoint();
    found.push_back(std::move(bs));
  }

  std::sort(found.begin(), found.end(),
            [](const BoundState& a, const BoundState& b) {
              return a.kappa < b.kappa;
            });
  return found;
}

void normalization_matrices(const PotentialSpec& p,
                            const BoundaryCondition& bc, BoundState& bs,
                            const DirectOptions& opt) {
  const double kappa = bs.kappa;
  if (!(kappa > 0.0)) throw NotARoot("kappa must be positive");

  Eigen::JacobiSVD<CMatrix> svd(xminus_imag(p, bc, kappa, opt.ode),
                                Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  // off-root probes set the scale (at the root itself smax can vanish too)
  const double sref =
      std::max({smax, xminus_imag(p, bc, 0.5 * kappa, opt.ode).norm(),
                xminus_imag(p, bc, 1.5 * kappa, opt.ode).norm(), 1e-300});
  if (!(smin <= 10.0 * opt.root_rel_tol * sref))
    throw NotARoot("kappa = " + format_real(kappa) +
                   " is not a zero of the continued minus matrix (relative "
                   "smallest singular value " +
                   format_real(smin / sref) + ")");
  if (bs.P.size() == 0) {
    int mult = 0;
    for (int j = 0; j < sv.size(); ++j)
      if (sv(j) <= opt.rank_tol * sref) ++mult;
    bs.multiplicity = std::max(mult, 1);
    const CMatrix ur = svd.matrixU().rightCols(bs.multiplicity);
    bs.P = ur * ur.adjoint();
  }

  const int n = p.n();
  const double sb = p.support_bound();
  CMatrix Al = CMatrix::Zero(n, n);
  if (sb > 0.0) {
    const QuadRule qr =
        composite_gauss(0.0, sb, std::min(0.5, 2.5 / kappa), 16);
    JostSamples js = jost_solution(p, Complex(0.0, kappa), qr.nodes, opt.ode);
    for (size_t i = 0; i < qr.nodes.size(); ++i)
      Al += qr.weights[i] * (js.F[i].adjoint() * js.F[i]);
  }
  // Beyond the support bound F(t) = e^{-kappa t} I exactly, so the tail
  // integrates in closed form.
  Al += std::exp(-2.0 * kappa * sb) / (2.0 * kappa) *
        CMatrix::Identity(n, n);
  bs.A = herm(Al);

  const CMatrix perp = CMatrix::Identity(n, n) - bs.P;
  const CMatrix Bl = herm(bs.P * bs.A * bs.P + perp);
  bs.C = herm(bs.P * herm_inv_sqrt(Bl) * bs.P);
}

VirtualLevelReport check_no_virtual_levels(const PotentialSpec& p,
                                           const BoundaryCondition& bc,
                                           double eps, OdeOptions opt) {
  VirtualLevelReport r;
  r.eps = eps;
  r.sigma_eps = smallest_sv(xminus_imag(p, bc, eps, opt));
  r.sigma_2eps = smallest_sv(xminus_imag(p, bc, 2.0 * eps, opt));
  r.ratio = r.sigma_eps / std::max(r.sigma_2eps, 1e-300);
  // A virtual level makes sigma vanish linearly in eps (ratio -> 1/2);
  // a regular origin keeps sigma flat (ratio -> 1).
  r.flagged = r.ratio < 0.66;
  return r;
}

ScatteringData compute_scattering(const PotentialSpec& p,
                                  const BoundaryCondition& bc,
                                  const KGrid& kgrid,
                                  DirectDiagnostics* diag,
                                  const DirectOptions& opt) {
  if (p.n() != bc.n)
    throw ShapeMismatch("potential has " + std::to_string(p.n()) +
                        " channels, boundary has " + std::to_string(bc.n));
  if (kgrid.size() == 0) throw ValidationError("empty k grid");

  ScatteringData sd;
  sd.n = p.n();
  sd.kgrid = kgrid;
  sd.uhat = compute_uhat(bc);
  sd.S.reserve(kgrid.values.size());

  DirectDiagnostics d;
  const CMatrix id = CMatrix::Identity(sd.n, sd.n);
  for (double k : kgrid.values) {
    const BoundaryValues bv = jost_boundary_values(p, k, opt.ode);
    const MMatrices mm = m_matrices(bv, bc);
    double rc = 1.0;
    CMatrix S = scattering_matrix(mm, 1e-12, &rc);
    d.minus_rcond_min = std::min(d.minus_rcond_min, rc);
    d.unitarity_max =
        std::max(d.unitarity_max, (S.adjoint() * S - id).norm());
    const auto res = jost_identity_residuals(bv);
    for (int j = 0; j < 4; ++j)
      d.identity_max[j] = std::max(d.identity_max[j], res[j]);
    sd.S.push_back(std::move(S));
  }
  d.s_uhat_gap = (sd.S.back() - sd.uhat).norm();

  if (opt.with_bound_states) {
    const double kappa_max = std::sqrt(std::max(p.max_norm(), 0.0)) + 1.0 +
                             boundary_binding_scale(bc, opt.bc_binding_cap);
    sd.bound_states =
        find_bound_states(p, bc, opt.kappa_min, kappa_max, opt);
    for (auto& bs : sd.bound_states)
      normalization_matrices(p, bc, bs, opt);
  }

  if (diag) *diag = d;
  return sd;
}

WaveSamples scattered_wave(const PotentialSpec& p, const BoundaryCondition& bc,
                           double k, const std::vector<double>& x_eval,
                           OdeOptions opt) {
  if (k == 0.0) throw UnsupportedK("scattered wave needs k != 0");
  const BoundaryValues bv = jost_boundary_values(p, k, opt);
  const MMatrices mm = m_matrices(bv, bc);
  const CMatrix S = scattering_matrix(mm);

  WaveSamples ws;
  ws.k = Complex(k, 0.0);
  ws.x = x_eval;
  JostSamples jp = jost_solution(p, Complex(k, 0.0), x_eval, opt);
  JostSamples jm = jost_solution(p, Complex(-k, 0.0), x_eval, opt);
  StandardSamples st = standard_solutions(p, Complex(k, 0.0), x_eval, opt);

  // Second representation Xi(x) M-^{-1} with Xi = Theta A + Phi B and
  // M-^{-1} = -2ik Xm^{-1}.
  Eigen::PartialPivLU<CMatrix> lu(mm.Xm.transpose());
  const Complex twoik = 2.0 * I_UNIT * ws.k;
  auto via_regular = [&](const CMatrix& th, const CMatrix& ph) {
    const CMatrix xi = th * bc.A + ph * bc.B;
    return CMatrix(-twoik * lu.solve(CMatrix(xi.transpose())).transpose());
  };

  ws.Psi.resize(x_eval.size());
  ws.Psix.resize(x_eval.size());
  for (size_t i = 0; i < x_eval.size(); ++i) {
    ws.Psi[i] = jm.F[i] + jp.F[i] * S;
    ws.Psix[i] = jm.Fx[i] + jp.Fx[i] * S;
    const CMatrix alt = via_regular(st.Th[i], st.Ph[i]);
    ws.route_gap = std::max(ws.route_gap, (ws.Psi[i] - alt).norm());
  }
  const CMatrix psi0 = bv.Fm + bv.Fp * S;
  const CMatrix psix0 = bv.Fxm + bv.Fxp * S;
  ws.boundary_res = boundary_residual(psi0, psix0, bc);
  return ws;
}

}  // namespace mscat
