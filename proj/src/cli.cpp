#include "mscat/cli.hpp"

#include "mscat/io.hpp"
#include "mscat/stargraph.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <sstream>

namespace mscat {

namespace {

using nlohmann::json;

std::vector<double> uniform_x(double x_max, int n_x) {
  std::vector<double> xs(n_x);
  for (int i = 0; i < n_x; ++i) xs[i] = x_max * i / (n_x - 1);
  return xs;
}

MarchenkoParams params_from(const RunConfig& cfg) {
  MarchenkoParams prm;
  prm.force = cfg.force;
  prm.unitarity_tol = cfg.unitarity_tol;
  return prm;
}

// trapezoid-weighted relative L2 distance between matrix sample sets;
// falls back to the absolute distance for a vanishing reference.
struct L2Pair {
  double abs = 0.0;
  double rel = 0.0;
};

L2Pair potential_l2(const std::vector<double>& xs,
                    const std::vector<CMatrix>& a,
                    const std::vector<CMatrix>& b) {
  double err2 = 0.0, ref2 = 0.0;
  for (size_t j = 0; j < xs.size(); ++j) {
    double w = 0.0;
    if (j > 0) w += 0.5 * (xs[j] - xs[j - 1]);
    if (j + 1 < xs.size()) w += 0.5 * (xs[j + 1] - xs[j]);
    err2 += w * (a[j] - b[j]).squaredNorm();
    ref2 += w * b[j].squaredNorm();
  }
  L2Pair out;
  out.abs = std::sqrt(err2);
  const double ref = std::sqrt(ref2);
  out.rel = ref > 1e-9 ? out.abs / ref : out.abs;
  return out;
}

void print_inverse_summary(std::ostream& os, const InverseDiagnostics& d) {
  os << "T: " << format_real(d.T) << "\n";
  os << "data asymmetry: " << format_real(d.asymmetry) << "\n";
  os << "||S(k_max) - uhat||: " << format_real(d.decay_gap) << "\n";
  os << "condition estimate: " << format_real(d.cond_estimate) << "\n";
  os << "equation residual: " << format_real(d.residual_max) << "\n";
  os << "hermiticity defect: " << format_real(d.herm_defect_max) << "\n";
  os << "diagonal roughness: " << format_real(d.roughness) << "\n";
  os << "boundary probe spread: " << format_real(d.probe_spread) << "\n";
}

json inverse_json(const InverseDiagnostics& d) {
  return json{{"T", d.T},
              {"asymmetry", d.asymmetry},
              {"decay_gap", d.decay_gap},
              {"cond_estimate", d.cond_estimate},
              {"residual_max", d.residual_max},
              {"herm_defect_max", d.herm_defect_max},
              {"roughness", d.roughness},
              {"probe_spread", d.probe_spread}};
}

int do_direct(const RunConfig& cfg, std::ostream& out) {
  const SampledPotential sp = read_potential_file(cfg.potential_path);
  const PotentialSpec p = sp.to_spec();
  validate_potential(p);
  const CMatrix u = read_boundary_file(cfg.boundary_path);
  const BoundaryCondition bc = build_boundary(u);
  if (bc.n != p.n())
    throw ShapeMismatch("potential has " + std::to_string(p.n()) +
                        " channels, boundary has " + std::to_string(bc.n));
  const KGrid kgrid = KGrid::uniform(cfg.k_min, cfg.k_max, cfg.n_k);
  DirectDiagnostics diag;
  const ScatteringData sd = compute_scattering(p, bc, kgrid, &diag);
  const std::string data_path = cfg.out_path + ".data";
  write_scattering_file(data_path, sd);
  out << "bound states: " << sd.bound_states.size() << "\n";
  out << "max unitarity defect: " << format_real(diag.unitarity_max) << "\n";
  out << "||S(k_max) - uhat||: " << format_real(diag.s_uhat_gap) << "\n";
  out << "wrote " << data_path << "\n";
  if (cfg.json_summary) {
    json j{{"mode", "direct"},
           {"bound_states", sd.bound_states.size()},
           {"unitarity_max", diag.unitarity_max},
           {"s_uhat_gap", diag.s_uhat_gap},
           {"data_file", data_path}};
    out << j.dump() << "\n";
  }
  return 0;
}

int do_inverse(const RunConfig& cfg, std::ostream& out) {
  const ScatteringData sd = read_scattering_file(cfg.data_path);
  const std::vector<double> xs = uniform_x(cfg.x_max, cfg.n_x);
  const ReconstructionResult rec = invert_full(sd, xs, params_from(cfg));
  const std::string q_path = cfg.out_path + ".q";
  const std::string u_path = cfg.out_path + ".u";
  write_potential_file(q_path, rec.x, rec.Q);
  write_boundary_file(u_path, rec.U);
  print_inverse_summary(out, rec.diag);
  out << "wrote " << q_path << " and " << u_path << "\n";
  if (cfg.json_summary) {
    json j = inverse_json(rec.diag);
    j["mode"] = "inverse";
    j["q_file"] = q_path;
    j["u_file"] = u_path;
    out << j.dump() << "\n";
  }
  return 0;
}

int do_roundtrip(const RunConfig& cfg, std::ostream& out) {
  const SampledPotential sp = read_potential_file(cfg.potential_path);
  const PotentialSpec p = sp.to_spec();
  validate_potential(p);
  const CMatrix u = read_boundary_file(cfg.boundary_path);
  const BoundaryCondition bc = build_boundary(u);
  if (bc.n != p.n())
    throw ShapeMismatch("potential has " + std::to_string(p.n()) +
                        " channels, boundary has " + std::to_string(bc.n));
  const KGrid kgrid = KGrid::uniform(cfg.k_min, cfg.k_max, cfg.n_k);
  DirectDiagnostics ddiag;
  const ScatteringData sd = compute_scattering(p, bc, kgrid, &ddiag);
  const std::vector<double> xs = uniform_x(cfg.x_max, cfg.n_x);
  const ReconstructionResult rec = invert_full(sd, xs, params_from(cfg));

  std::vector<CMatrix> q_true(xs.size());
  for (size_t j = 0; j < xs.size(); ++j) q_true[j] = p.eval(xs[j]);
  const L2Pair l2 = potential_l2(xs, rec.Q, q_true);
  const double u_err = (rec.U - bc.U).norm();
  const bool pass = l2.rel <= cfg.q_rel_tol && u_err <= cfg.u_tol;

  out << "bound states: " << sd.bound_states.size() << "\n";
  out << "max unitarity defect: " << format_real(ddiag.unitarity_max) << "\n";
  print_inverse_summary(out, rec.diag);
  out << "potential relative L2 error: " << format_real(l2.rel) << "\n";
  out << "boundary matrix error: " << format_real(u_err) << "\n";
  out << "status: " << (pass ? "pass" : "fail") << "\n";
  if (!cfg.out_path.empty()) {
    write_scattering_file(cfg.out_path + ".data", sd);
    write_potential_file(cfg.out_path + ".q", rec.x, rec.Q);
    write_boundary_file(cfg.out_path + ".u", rec.U);
    out << "wrote " << cfg.out_path << ".data/.q/.u\n";
  }
  if (cfg.json_summary) {
    json j = inverse_json(rec.diag);
    j["mode"] = "roundtrip";
    j["bound_states"] = sd.bound_states.size();
    j["unitarity_max"] = ddiag.unitarity_max;
    j["q_rel_l2"] = l2.rel;
    j["q_abs_l2"] = l2.abs;
    j["u_error"] = u_err;
    j["pass"] = pass;
    out << j.dump() << "\n";
  }
  return pass ? 0 : 1;
}

int do_stargraph(const RunConfig& cfg, std::ostream& out) {
  const ScatteringData sd = read_scattering_file(cfg.data_path);
  const StarScatteringData star = extract_star_data(sd);
  const std::vector<double> xs = uniform_x(cfg.x_max, cfg.n_x);
  const MarchenkoParams prm = params_from(cfg);
  std::vector<std::vector<double>> q_edges;
  json edges = json::array();
  for (int i = 0; i < star.n; ++i) {
    double imag_defect = 0.0;
    q_edges.push_back(
        scalar_marchenko_invert(star, i, xs, prm, &imag_defect));
    double qmax = 0.0;
    for (double v : q_edges.back()) qmax = std::max(qmax, std::abs(v));
    out << "edge " << (i + 1) << ": max |Q| = " << format_real(qmax)
        << ", imaginary residue = " << format_real(imag_defect) << "\n";
    edges.push_back({{"max_q", qmax}, {"imag_defect", imag_defect}});
  }
  const PotentialSpec rec = assemble_diagonal(xs, q_edges);
  std::vector<CMatrix> q(xs.size());
  for (size_t j = 0; j < xs.size(); ++j) q[j] = rec.eval(xs[j]);
  const std::string q_path = cfg.out_path + ".q";
  write_potential_file(q_path, xs, q);
  out << "wrote " << q_path << "\n";
  if (cfg.json_summary) {
    json j{{"mode", "stargraph"},
           {"edges", edges},
           {"n", star.n},
           {"q_file", q_path}};
    out << j.dump() << "\n";
  }
  return 0;
}

// --- selftest -------------------------------------------------------------

double sep_potential(double kappa, double gamma, double x) {
  const double u = gamma * std::exp(-2.0 * kappa * x) / (2.0 * kappa);
  return -4.0 * kappa * gamma * std::exp(-2.0 * kappa * x) /
         ((1.0 + u) * (1.0 + u));
}

// kappa of the single Dirichlet square-well level: q cot(q a) = -kappa with
// q = sqrt(v0 - kappa^2), solved by bisection.
double well_kappa(double v0, double a, double lo, double hi) {
  auto f = [&](double kap) {
    const double q = std::sqrt(v0 - kap * kap);
    return q * std::cos(q * a) / std::sin(q * a) + kap;
  };
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

int do_selftest(std::ostream& out) {
  int failed = 0;
  auto report = [&](const std::string& name, bool ok,
                    const std::string& detail) {
    out << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
    if (!ok) ++failed;
  };

  {  // free Dirichlet and Neumann: S constant at -I resp. +I
    const KGrid kg = KGrid::uniform(0.5, 20.0, 40);
    for (int sign : {-1, +1}) {
      const BoundaryCondition bc =
          sign < 0 ? dirichlet_boundary(2) : neumann_boundary(2);
      const ScatteringData sd = compute_scattering(PotentialSpec::zero(2), bc, kg);
      double emax = 0.0;
      for (const auto& s : sd.S)
        emax = std::max(
            emax, (s - double(sign) * CMatrix::Identity(2, 2)).norm());
      report(sign < 0 ? "free Dirichlet" : "free Neumann", emax <= 1e-10,
             "max deviation " + format_real(emax));
    }
  }
  {  // free Robin: S = (ik+h)/(ik-h)
    const double h = 0.5;
    const KGrid kg = KGrid::uniform(0.5, 20.0, 40);
    const ScatteringData sd =
        compute_scattering(PotentialSpec::zero(1), robin_boundary(h), kg);
    double emax = 0.0;
    for (int j = 0; j < kg.size(); ++j) {
      const Complex ik(0.0, kg.values[j]);
      emax = std::max(emax, std::abs(sd.S[j](0, 0) - (ik + h) / (ik - h)));
    }
    report("free Robin", emax <= 1e-8, "max deviation " + format_real(emax));
  }
  {  // reflectionless: bound-state-only data against the closed form
    StarScatteringData star;
    star.n = 1;
    star.kgrid = KGrid::uniform(0.01, 40.0, 80);
    star.uhat = {-1.0};
    star.R.assign(1, std::vector<Complex>(80, Complex(-1.0, 0.0)));
    star.bound_states.push_back({1.0, {2.0}});
    const std::vector<double> xs = uniform_x(5.0, 201);
    const std::vector<double> q = scalar_marchenko_invert(star, 0, xs);
    double emax = 0.0;
    for (size_t j = 0; j < xs.size(); ++j)
      emax = std::max(emax, std::abs(q[j] - sep_potential(1.0, 2.0, xs[j])));
    report("reflectionless", emax <= 1e-4,
           "max deviation " + format_real(emax));
  }
  {  // square well: one Dirichlet level against the transcendental root
    const double v0 = 8.0;
    const PotentialSpec p = PotentialSpec::square_well(-v0, 1.0);
    const KGrid kg = KGrid::uniform(0.5, 5.0, 16);
    const ScatteringData sd =
        compute_scattering(p, dirichlet_boundary(1), kg);
    const double want = well_kappa(v0, 1.0, 0.01, 2.3);
    bool ok = sd.bound_states.size() == 1;
    std::string detail;
    if (ok) {
      const double got = sd.bound_states[0].kappa;
      ok = std::abs(got - want) <= 1e-8;
      detail = "kappa " + format_real(got) + " vs root " + format_real(want);
    } else {
      detail =
          "expected 1 level, found " + std::to_string(sd.bound_states.size());
    }
    report("square well", ok, detail);
  }
  out << (failed == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failed == 0 ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"half-line matrix Schrodinger scattering toolkit"};
  app.require_subcommand(1);
  app.add_flag("--json-summary", cfg.json_summary,
               "append a one-line JSON summary to stdout");

  auto add_grid_k = [&](CLI::App* sub) {
    sub->add_option("--kmin", cfg.k_min, "smallest k sample");
    sub->add_option("--kmax", cfg.k_max, "largest k sample");
    sub->add_option("--nk", cfg.n_k, "number of k samples");
  };
  auto add_grid_x = [&](CLI::App* sub) {
    sub->add_option("--xmax", cfg.x_max, "right end of the x grid");
    sub->add_option("--nx", cfg.n_x, "number of x samples");
  };

  CLI::App* direct = app.add_subcommand(
      "direct", "potential + boundary -> scattering data");
  direct->fallthrough();
  direct->add_option("--potential", cfg.potential_path, "potential file")
      ->required();
  direct->add_option("--boundary", cfg.boundary_path, "boundary file")
      ->required();
  direct->add_option("--out", cfg.out_path, "output prefix")->required();
  add_grid_k(direct);

  CLI::App* inverse = app.add_subcommand(
      "inverse", "scattering data -> potential + boundary");
  inverse->fallthrough();
  inverse->add_option("--data", cfg.data_path, "scattering data file")
      ->required();
  inverse->add_option("--out", cfg.out_path, "output prefix")->required();
  add_grid_x(inverse);
  inverse->add_flag("--force", cfg.force,
                    "demote admissibility screens to diagnostics");

  CLI::App* roundtrip = app.add_subcommand(
      "roundtrip", "direct then inverse, with an error report");
  roundtrip->fallthrough();
  roundtrip->add_option("--potential", cfg.potential_path, "potential file")
      ->required();
  roundtrip->add_option("--boundary", cfg.boundary_path, "boundary file")
      ->required();
  roundtrip->add_option("--out", cfg.out_path, "optional output prefix");
  add_grid_k(roundtrip);
  add_grid_x(roundtrip);
  roundtrip->add_flag("--force", cfg.force,
                      "demote admissibility screens to diagnostics");

  CLI::App* stargraph = app.add_subcommand(
      "stargraph", "diagonal scattering data -> per-edge potentials");
  stargraph->fallthrough();
  stargraph->add_option("--data", cfg.data_path, "scattering data file")
      ->required();
  stargraph->add_option("--out", cfg.out_path, "output prefix")->required();
  add_grid_x(stargraph);
  stargraph->add_flag("--force", cfg.force,
                      "demote admissibility screens to diagnostics");

  CLI::App* selftest =
      app.add_subcommand("selftest", "run the built-in analytic checks");
  selftest->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream dummy;
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorCode::Parse);
  }

  try {
    if (direct->parsed()) {
      cfg.mode = "direct";
      cfg.validate();
      return do_direct(cfg, out);
    }
    if (inverse->parsed()) {
      cfg.mode = "inverse";
      cfg.validate();
      return do_inverse(cfg, out);
    }
    if (roundtrip->parsed()) {
      cfg.mode = "roundtrip";
      cfg.validate();
      return do_roundtrip(cfg, out);
    }
    if (stargraph->parsed()) {
      cfg.mode = "stargraph";
      cfg.validate();
      return do_stargraph(cfg, out);
    }
    cfg.mode = "selftest";
    return do_selftest(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (cfg.json_summary) {
      json j{{"mode", cfg.mode},
             {"error", e.what()},
             {"exit_code", static_cast<int>(e.code())}};
      out << j.dump() << "\n";
    }
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    if (cfg.json_summary) {
      json j{{"mode", cfg.mode}, {"error", e.what()}, {"exit_code", 1}};
      out << j.dump() << "\n";
    }
    return static_cast<int>(ErrorCode::Generic);
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("mscat");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mscat
