// Acceptance checks for the half-line matrix scattering toolkit.  Each
// criterion prints one [PASS]/[FAIL] line with its measured figure and the
// pinned tolerance; the process exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mscat/direct.hpp"
#include "mscat/marchenko.hpp"
#include "mscat/stargraph.hpp"

using namespace mscat;

namespace {

constexpr double kPi = 3.14159265358979323846;

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(double v) { return format_real(v); }

std::vector<double> uniform_grid(double a, double b, int m) {
  std::vector<double> g(m);
  for (int i = 0; i < m; ++i) g[i] = a + (b - a) * i / (m - 1);
  return g;
}

// --- shared test potentials -------------------------------------------------

// smooth hermitian 2x2 bump: B(x) = sin^2(pi x / w) * H on [0, w]
PotentialSpec bump2(double w, int nodes) {
  CMatrix H(2, 2);
  H << Complex(-1.2, 0.0), Complex(0.3, 0.4), Complex(0.3, -0.4),
      Complex(0.8, 0.0);
  std::vector<double> xs = uniform_grid(0.0, w, nodes);
  std::vector<CMatrix> vals(xs.size());
  for (size_t j = 0; j < xs.size(); ++j) {
    const double s = std::sin(kPi * xs[j] / w);
    vals[j] = s * s * H;
  }
  return PotentialSpec::sampled(xs, vals);
}

// diagonal matrix of smooth scalar arch wells
PotentialSpec arch_diag(const std::vector<double>& depths, double w,
                        int nodes) {
  const int n = static_cast<int>(depths.size());
  std::vector<double> xs = uniform_grid(0.0, w, nodes);
  std::vector<CMatrix> vals(xs.size(), CMatrix::Zero(n, n));
  for (size_t j = 0; j < xs.size(); ++j) {
    const double s = std::sin(kPi * xs[j] / w);
    for (int i = 0; i < n; ++i) vals[j](i, i) = depths[i] * s * s;
  }
  return PotentialSpec::sampled(xs, vals);
}

PotentialSpec arch_scalar(double depth, double w, int nodes) {
  return arch_diag({depth}, w, nodes);
}

// Haar-style random unitary from a seeded complex Gaussian QR
CMatrix random_unitary(std::mt19937& gen, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = Complex(nd(gen), nd(gen));
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < n; ++c) {
    const Complex d = r(c, c);
    q.col(c) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return q;
}

// closed forms for the one-bound-state reflectionless case
double sep_kernel(double kappa, double gamma, double x, double y) {
  const double u = gamma * std::exp(-2.0 * kappa * x) / (2.0 * kappa);
  return -gamma * std::exp(-kappa * (x + y)) / (1.0 + u);
}

double sep_potential(double kappa, double gamma, double x) {
  const double u = gamma * std::exp(-2.0 * kappa * x) / (2.0 * kappa);
  return -4.0 * kappa * gamma * std::exp(-2.0 * kappa * x) /
         ((1.0 + u) * (1.0 + u));
}

// Dirichlet square-well levels: roots of q cot(q a) = -kappa, q = sqrt(v0-k^2)
std::vector<double> well_levels(double v0, double a) {
  std::vector<double> roots;
  const double qmax = std::sqrt(v0) * a;
  auto g = [&](double q) {
    return q * std::cos(q) + std::sqrt(qmax * qmax - q * q) * std::sin(q);
  };
  for (int j = 1;; ++j) {
    const double qlo = (2 * j - 1) * kPi / 2;
    if (qlo >= qmax) break;
    double lo = qlo + 1e-12, hi = std::min(j * kPi, qmax) - 1e-12;
    if (g(lo) * g(hi) > 0.0) continue;
    double glo = g(lo);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    const double q = 0.5 * (lo + hi) / a;
    roots.push_back(std::sqrt(v0 - q * q));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

ScatteringData synthetic_robin(double h, const KGrid& kg) {
  ScatteringData sd;
  sd.n = 1;
  sd.kgrid = kg;
  for (double k : kg.values) {
    const Complex ik(0.0, k);
    sd.S.push_back(CMatrix::Constant(1, 1, (ik + h) / (ik - h)));
  }
  sd.uhat = CMatrix::Identity(1, 1);
  if (h < 0.0) {
    BoundState bs;
    bs.kappa = -h;
    bs.multiplicity = 1;
    bs.P = CMatrix::Identity(1, 1);
    bs.A = CMatrix::Zero(1, 1);
    bs.C = CMatrix::Constant(1, 1, Complex(std::sqrt(-2.0 * h), 0.0));
    sd.bound_states.push_back(bs);
  }
  return sd;
}

// --- criteria ---------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome criterion1() {
  const double t0 = now_s();
  const KGrid kg = KGrid::uniform(1e-2, 40.0, 800);
  const ScatteringData sd =
      compute_scattering(PotentialSpec::zero(2), dirichlet_boundary(2), kg);
  double emax = 0.0;
  for (const auto& s : sd.S)
    emax = std::max(emax, (s + CMatrix::Identity(2, 2)).norm());
  const double dt = now_s() - t0;
  Outcome o;
  o.pass = emax <= 1e-10 && dt < 1.0;
  o.detail = "max ||S + I|| = " + fmt(emax) + " (tol 1e-10), " + fmt(dt) +
             " s (limit 1)";
  return o;
}

Outcome criterion2() {
  const KGrid kg = KGrid::uniform(1e-2, 40.0, 800);
  double emax = 0.0, gap_rel = 0.0;
  for (double h : {-2.0, 0.5, 3.0}) {
    const ScatteringData sd =
        compute_scattering(PotentialSpec::zero(1), robin_boundary(h), kg);
    for (int j = 0; j < kg.size(); ++j) {
      const Complex ik(0.0, kg.values[j]);
      emax = std::max(emax, std::abs(sd.S[j](0, 0) - (ik + h) / (ik - h)));
    }
    // high-energy agreement with the hermitian asymptote: the gap
    // |S(k_max) - 1| must track the predicted 2|h|/k_max decay rate
    const double gap = std::abs(sd.S.back()(0, 0) - 1.0);
    const double want = std::abs(2.0 * h / Complex(-h, kg.k_max));
    gap_rel = std::max(gap_rel, std::abs(gap / want - 1.0));
  }
  Outcome o;
  o.pass = emax <= 1e-8 && gap_rel <= 0.05;
  o.detail = "max |S - oracle| = " + fmt(emax) +
             " (tol 1e-8), asymptote gap off by " + fmt(gap_rel) +
             " rel (tol 0.05)";
  return o;
}

Outcome criterion3() {
  const double t0 = now_s();
  const PotentialSpec p = bump2(2.0, 41);
  const KGrid kg = KGrid::uniform(1e-2, 40.0, 800);
  std::vector<BoundaryValues> bvs;
  bvs.reserve(kg.size());
  for (double k : kg.values) bvs.push_back(jost_boundary_values(p, k));
  std::mt19937 gen(911);
  double dmax = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const BoundaryCondition bc = build_boundary(random_unitary(gen, 2));
    for (const auto& bv : bvs) {
      const CMatrix s = scattering_matrix(m_matrices(bv, bc));
      dmax = std::max(dmax, unitarity_defect(s));
    }
  }
  const double dt = now_s() - t0;
  Outcome o;
  o.pass = dmax <= 1e-6 && dt < 30.0;
  o.detail = "max ||S*S - I|| = " + fmt(dmax) + " over 20 random U (tol " +
             "1e-6), " + fmt(dt) + " s (limit 30)";
  return o;
}

Outcome criterion4() {
  std::vector<PotentialSpec> pots;
  pots.push_back(PotentialSpec::zero(1));
  pots.push_back(PotentialSpec::square_well(-8.0, 1.0));
  pots.push_back(bump2(2.0, 41));
  pots.push_back(arch_diag({-2.0, -3.0, -4.0}, 2.0, 41));
  double rmax = 0.0;
  for (const auto& p : pots) {
    for (int j = 0; j < 25; ++j) {
      const double k = 0.1 * std::pow(400.0, j / 24.0);  // 0.1 .. 40
      const auto res = jost_identity_residuals(jost_boundary_values(p, k));
      for (double r : res) rmax = std::max(rmax, r);
    }
  }
  Outcome o;
  o.pass = rmax <= 1e-6;
  o.detail = "max identity residual = " + fmt(rmax) + " (tol 1e-6)";
  return o;
}

Outcome criterion5() {
  const std::vector<double> depths = {2.0, 8.0, 30.0, 60.0, 120.0};
  const std::vector<size_t> want_counts = {0, 1, 2, 2, 3};
  double kerr = 0.0;
  std::string counts;
  bool ok = true;
  for (size_t c = 0; c < depths.size(); ++c) {
    const PotentialSpec p = PotentialSpec::square_well(-depths[c], 1.0);
    const BoundaryCondition bc = dirichlet_boundary(1);
    std::vector<BoundState> states = find_bound_states(
        p, bc, 1e-3, std::sqrt(depths[c]) + 1.0);
    std::vector<double> got;
    for (const auto& b : states) got.push_back(b.kappa);
    std::sort(got.begin(), got.end());
    const std::vector<double> want = well_levels(depths[c], 1.0);
    counts += (c ? "," : "") + std::to_string(got.size());
    if (got.size() != want_counts[c] || want.size() != want_counts[c]) {
      ok = false;
      continue;
    }
    for (size_t l = 0; l < got.size(); ++l)
      kerr = std::max(kerr, std::abs(got[l] - want[l]));
  }
  Outcome o;
  o.pass = ok && kerr <= 1e-8;
  o.detail = "counts {" + counts + "} (want {0,1,2,2,3}), max |kappa - root|" +
             " = " + fmt(kerr) + " (tol 1e-8)";
  return o;
}

Outcome criterion6() {
  struct Case {
    PotentialSpec p;
    BoundaryCondition bc;
  };
  std::vector<Case> cases;
  cases.push_back({PotentialSpec::square_well(-8.0, 1.0),
                   dirichlet_boundary(1)});
  cases.push_back({PotentialSpec::square_well(-120.0, 1.0),
                   dirichlet_boundary(1)});
  cases.push_back({PotentialSpec::zero(1), robin_boundary(-2.0)});
  const std::vector<double> deltas = {1e-3, 1e-4, 1e-5};
  double spread_max = 0.0, lin_dev = 0.0;
  int states = 0;
  for (const auto& cse : cases) {
    double kmax_scan = std::sqrt(cse.p.max_norm()) + 1.0;
    kmax_scan = std::max(kmax_scan, 3.0);
    for (const auto& bs :
         find_bound_states(cse.p, cse.bc, 1e-3, kmax_scan)) {
      ++states;
      std::vector<double> r(deltas.size());
      for (size_t i = 0; i < deltas.size(); ++i) {
        const double y = bs.kappa + deltas[i];
        const CMatrix xm = xminus_imag(cse.p, cse.bc, y);
        // residue scale of M-^{-1} at distance delta from the pole,
        // using M-(iy)^{-1} = 2 y X-(iy)^{-1}
        r[i] = deltas[i] * 2.0 * y *
               Eigen::PartialPivLU<CMatrix>(xm).inverse().norm();
      }
      const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
      spread_max = std::max(spread_max, *hi / *lo);
      for (size_t i = 0; i + 1 < deltas.size(); ++i) {
        // delta^2-weighted norm must scale down linearly in delta
        const double ratio = (deltas[i + 1] * r[i + 1]) / (deltas[i] * r[i]);
        lin_dev = std::max(lin_dev, std::abs(ratio / 0.1 - 1.0));
      }
    }
  }
  Outcome o;
  o.pass = states >= 5 && spread_max <= 2.0 && lin_dev <= 0.5;
  o.detail = std::to_string(states) + " states, residue-scale spread " +
             fmt(spread_max) + " (tol 2), linear-decay deviation " +
             fmt(lin_dev) + " rel (tol 0.5)";
  return o;
}

Outcome criterion7() {
  const double kappa = 1.0, gamma = 2.0;
  ScatteringData sd;
  sd.n = 1;
  sd.kgrid = KGrid::uniform(1e-2, 40.0, 200);
  for (int j = 0; j < 200; ++j) sd.S.push_back(-CMatrix::Identity(1, 1));
  sd.uhat = -CMatrix::Identity(1, 1);
  BoundState bs;
  bs.kappa = kappa;
  bs.multiplicity = 1;
  bs.P = CMatrix::Identity(1, 1);
  bs.A = CMatrix::Zero(1, 1);
  bs.C = CMatrix::Constant(1, 1, Complex(std::sqrt(gamma), 0.0));
  sd.bound_states.push_back(bs);

  MarchenkoParams prm;
  const std::vector<double> xs = uniform_grid(0.0, 4.0, 200);
  const std::vector<double> ys = uniform_grid(0.0, 8.0, 200);
  const double T = marchenko_T(sd, xs.back(), prm);
  KernelG G(sd, 2.0 * T, prm);
  const SweepOutputs sweep = marchenko_sweep(G, xs, T, prm, &ys);
  double kerr = 0.0;
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < ys.size(); ++j) {
      if (ys[j] < xs[i] || ys[j] > T) continue;
      kerr = std::max(kerr, std::abs(sweep.Keval[i][j](0, 0) -
                                     sep_kernel(kappa, gamma, xs[i], ys[j])));
    }

  const std::vector<double> xq = uniform_grid(0.0, 4.0, 201);
  const SweepOutputs sq = marchenko_sweep(G, xq, T, prm);
  const PotentialRecovery pot = recover_potential(xq, sq.Kdiag);
  double qerr = 0.0;
  for (size_t j = 0; j < xq.size(); ++j)
    qerr = std::max(qerr, std::abs(pot.Q[j](0, 0).real() -
                                   sep_potential(kappa, gamma, xq[j])));
  Outcome o;
  o.pass = kerr <= 1e-8 && qerr <= 1e-4;
  o.detail = "sup |K - closed form| = " + fmt(kerr) +
             " on 200x200 (tol 1e-8), max |Q - closed form| = " + fmt(qerr) +
             " (tol 1e-4)";
  return o;
}

struct RoundtripErrors {
  double q_rel = 0.0;
  double u_err = 0.0;
};

RoundtripErrors roundtrip_once(const PotentialSpec& p,
                               const BoundaryCondition& bc, int n_k,
                               int n_x) {
  const KGrid kg = KGrid::uniform(1e-2, 40.0, n_k);
  const ScatteringData sd = compute_scattering(p, bc, kg);
  const std::vector<double> xs = uniform_grid(0.0, 15.0, n_x);
  const ReconstructionResult rec = invert_full(sd, xs, {});
  double err2 = 0.0, ref2 = 0.0;
  for (size_t j = 0; j < xs.size(); ++j) {
    double w = 0.0;
    if (j > 0) w += 0.5 * (xs[j] - xs[j - 1]);
    if (j + 1 < xs.size()) w += 0.5 * (xs[j + 1] - xs[j]);
    err2 += w * (rec.Q[j] - p.eval(xs[j])).squaredNorm();
    ref2 += w * p.eval(xs[j]).squaredNorm();
  }
  RoundtripErrors out;
  out.q_rel = std::sqrt(err2 / ref2);
  out.u_err = (rec.U - bc.U).norm();
  return out;
}

Outcome criterion8() {
  const double t0 = now_s();
  // 81 nodes: the sampled bump is piecewise linear, and its own spectral
  // tail beyond 2 k_max floors the reconstruction error independently of
  // both run grids (rel L2 5.3e-4 at 41 nodes, 1.3e-4 at 81); the node
  // density keeps that floor well under the grid-driven error terms so the
  // refinement clause measures the grids, not the test input.
  const PotentialSpec p = bump2(2.0, 81);
  // fixed-seed random unitary; the draw is screened only for near-threshold
  // binding (kappa < 0.7, a nearly-virtual level), which would legitimately
  // push the data horizon far beyond what the default grids resolve.  This
  // seed yields one bound state at kappa = 0.99.
  std::mt19937 gen(2017);
  const BoundaryCondition bc = build_boundary(random_unitary(gen, 2));
  const RoundtripErrors base = roundtrip_once(p, bc, 800, 600);
  const RoundtripErrors fine = roundtrip_once(p, bc, 1599, 1199);
  const double gain = base.q_rel / fine.q_rel;
  const double dt = now_s() - t0;
  Outcome o;
  o.pass = base.q_rel <= 0.05 && base.u_err <= 1e-2 && gain >= 2.0 &&
           dt < 120.0;
  o.detail = "Q rel L2 = " + fmt(base.q_rel) + " (tol 0.05), ||U_rec - U|| = " +
             fmt(base.u_err) + " (tol 1e-2), refinement gain = " + fmt(gain) +
             "x (need >= 2), " + fmt(dt) + " s (limit 120)";
  return o;
}

Outcome criterion9() {
  const ScatteringData sd =
      synthetic_robin(0.5, KGrid::uniform(1e-2, 40.0, 800));
  const std::vector<double> xs = uniform_grid(0.0, 6.0, 241);
  const ReconstructionResult rec = invert_full(sd, xs, {});
  Outcome o;
  o.pass = rec.diag.probe_spread <= 1e-3;
  o.detail = "probe-frequency spread of U_rec = " + fmt(rec.diag.probe_spread) +
             " (tol 1e-3)";
  return o;
}

Outcome criterion10() {
  const std::vector<double> depths = {-2.0, -3.0, -4.0};
  const PotentialSpec p = arch_diag(depths, 2.0, 41);
  const BoundaryCondition bc = dirichlet_boundary(3);
  const KGrid kg = KGrid::uniform(0.05, 25.0, 500);
  const ScatteringData sd = compute_scattering(p, bc, kg);
  const StarScatteringData star = extract_star_data(sd);

  const std::vector<double> xs = uniform_grid(0.0, 6.0, 241);
  MarchenkoParams prm;
  // one shared horizon so both paths discretize the same equation
  prm.T_min = marchenko_T(sd, xs.back(), prm);

  screen_scattering_data(sd, prm);
  const double T = marchenko_T(sd, xs.back(), prm);
  KernelG G(sd, 2.0 * T, prm);
  const SweepOutputs sweep = marchenko_sweep(G, xs, T, prm);
  const PotentialRecovery pot = recover_potential(xs, sweep.Kdiag);
  double koff = 0.0;
  for (double v : sweep.offdiag_max) koff = std::max(koff, v);

  double agree = 0.0;
  for (int i = 0; i < 3; ++i) {
    const std::vector<double> qi = scalar_marchenko_invert(star, i, xs, prm);
    for (size_t j = 0; j < xs.size(); ++j)
      agree = std::max(agree, std::abs(pot.Q[j](i, i).real() - qi[j]));
  }
  Outcome o;
  o.pass = agree <= 1e-6 && koff <= 1e-8;
  o.detail = "max |diag(matrix) - scalar| = " + fmt(agree) +
             " (tol 1e-6), max off-diagonal K = " + fmt(koff) +
             " (tol 1e-8)";
  return o;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {1, "free-field exactness", criterion1},
      {2, "Robin scattering oracle", criterion2},
      {3, "unitarity under random boundary conditions", criterion3},
      {4, "Jost boundary identities", criterion4},
      {5, "square-well bound-state oracle", criterion5},
      {6, "simple poles of the minus matrix", criterion6},
      {7, "reflectionless closed form", criterion7},
      {8, "round-trip reconstruction", criterion8},
      {9, "boundary recovery probe spread", criterion9},
      {10, "star-graph equivalence", criterion10},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Outcome o;
    const double t0 = now_s();
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    const double dt = now_s() - t0;
    std::printf("[%s] criterion %d: %s — %s [%.1f s]\n",
                o.pass ? "PASS" : "FAIL", e.id, e.name, o.detail.c_str(), dt);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  if (failures) std::printf("%d of 10 criteria failed\n", failures);
  else std::printf("all 10 criteria passed\n");
  return failures == 0 ? 0 : 1;
}
