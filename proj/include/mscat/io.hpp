// Text file formats and run configuration.
//
// Every file is UTF-8 text.  '#' starts a comment that runs to end of line,
// blank lines are skipped, numeric fields are comma-separated, and a complex
// number occupies two consecutive fields "re,im".  Values are written with
// 17 significant digits, so a write-then-read round trip reproduces every
// double bit-exactly.
//
//   potential file:   header "n,points", then one row per sample:
//                     "x, re(Q11), im(Q11), re(Q12), ..." (row-major).
//   boundary file:    header "n", then n rows of 2n fields (re,im pairs of
//                     one row of U).
//   scattering file:  section headers in brackets, in order:
//                       [kgrid]       one k per line
//                       [S]           one row-major n*n sample per line
//                       [uhat]        n rows like the boundary file
//                       [boundstates] per state: "kappa <value>" line, then
//                                     n rows of C (row-major re,im pairs)
//
// Readers accept arbitrary comment/blank interleaving; writers emit a short
// comment header describing the layout.
#pragma once

#include "mscat/direct.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mscat {

struct SampledPotential {
  int n = 0;
  std::vector<double> x;
  std::vector<CMatrix> Q;

  PotentialSpec to_spec() const;  // piecewise-linear PotentialSpec
};

// Fixed-point decimal text for a double: 17 significant digits, "%.17g".
std::string format_full(double v);

void write_potential(std::ostream& os, const std::vector<double>& x,
                     const std::vector<CMatrix>& Q);
void write_potential_file(const std::string& path,
                          const std::vector<double>& x,
                          const std::vector<CMatrix>& Q);
SampledPotential read_potential(std::istream& is);
SampledPotential read_potential_file(const std::string& path);

void write_boundary(std::ostream& os, const CMatrix& U);
void write_boundary_file(const std::string& path, const CMatrix& U);
CMatrix read_boundary(std::istream& is);
CMatrix read_boundary_file(const std::string& path);

void write_scattering(std::ostream& os, const ScatteringData& sd);
void write_scattering_file(const std::string& path, const ScatteringData& sd);
ScatteringData read_scattering(std::istream& is);
ScatteringData read_scattering_file(const std::string& path);

struct RunConfig {
  std::string mode;  // direct | inverse | roundtrip | stargraph | selftest
  std::string potential_path;
  std::string boundary_path;
  std::string data_path;
  std::string out_path;
  double k_min = 1e-2;
  double k_max = 40.0;
  int n_k = 800;
  double x_max = 15.0;
  int n_x = 600;
  double unitarity_tol = 1e-6;
  double residual_tol = 1e-8;
  double q_rel_tol = 5e-2;  // round-trip acceptance on the potential
  double u_tol = 1e-2;      // round-trip acceptance on the boundary matrix
  bool force = false;
  bool json_summary = false;

  // n_k >= 16, n_x >= 16, 0 < k_min < k_max, x_max > 0, tolerances > 0.
  void validate() const;
};

}  // namespace mscat
