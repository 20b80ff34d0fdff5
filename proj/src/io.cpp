#include "mscat/io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mscat {

namespace {

// One logical line: comments stripped, surrounding whitespace trimmed,
// blanks skipped.  Returns false at end of stream.
bool next_line(std::istream& is, std::string& out, int& lineno) {
  std::string raw;
  while (std::getline(is, raw)) {
    ++lineno;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    size_t b = raw.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    size_t e = raw.find_last_not_of(" \t\r\n");
    out = raw.substr(b, e - b + 1);
    return true;
  }
  return false;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int lineno) {
  const char* b = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(b, &end);
  if (end == b) throw ParseError("expected a number at line " +
                                 std::to_string(lineno) + ", got '" + s + "'");
  while (*end != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*end)))
      throw ParseError("trailing characters after number at line " +
                       std::to_string(lineno) + ": '" + s + "'");
    ++end;
  }
  return v;
}

long parse_int(const std::string& s, int lineno) {
  const double v = parse_double(s, lineno);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v)
    throw ParseError("expected an integer at line " + std::to_string(lineno) +
                     ", got '" + s + "'");
  return n;
}

std::vector<double> parse_row(const std::string& line, size_t expected,
                              int lineno) {
  const std::vector<std::string> fields = split_fields(line);
  if (fields.size() != expected)
    throw ParseError("expected " + std::to_string(expected) +
                     " fields at line " + std::to_string(lineno) + ", got " +
                     std::to_string(fields.size()));
  std::vector<double> out(fields.size());
  for (size_t i = 0; i < fields.size(); ++i)
    out[i] = parse_double(fields[i], lineno);
  return out;
}

void append_matrix_row_major(std::string& line, const CMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      line += ", " + format_full(m(r, c).real());
      line += ", " + format_full(m(r, c).imag());
    }
}

CMatrix matrix_from_flat(const std::vector<double>& v, size_t offset, int n) {
  CMatrix m(n, n);
  size_t p = offset;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      m(r, c) = Complex(v[p], v[p + 1]);
      p += 2;
    }
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return is;
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PotentialSpec SampledPotential::to_spec() const {
  return PotentialSpec::sampled(x, Q);
}

void write_potential(std::ostream& os, const std::vector<double>& x,
                     const std::vector<CMatrix>& Q) {
  if (x.size() != Q.size())
    throw ShapeMismatch("potential grid and sample counts differ");
  if (x.empty()) throw ValidationError("no potential samples to write");
  const int n = static_cast<int>(Q.front().rows());
  os << "# hermitian matrix potential samples\n";
  os << "# header: n, points; rows: x, re(Q11), im(Q11), ... row-major\n";
  os << n << ", " << x.size() << "\n";
  for (size_t j = 0; j < x.size(); ++j) {
    if (Q[j].rows() != n || Q[j].cols() != n)
      throw ShapeMismatch("potential sample has the wrong shape");
    std::string line = format_full(x[j]);
    append_matrix_row_major(line, Q[j]);
    os << line << "\n";
  }
}

SampledPotential read_potential(std::istream& is) {
  int lineno = 0;
  std::string line;
  if (!next_line(is, line, lineno))
    throw ParseError("empty potential file");
  const std::vector<std::string> hdr = split_fields(line);
  if (hdr.size() != 2)
    throw ParseError("potential header must be 'n, points' (line " +
                     std::to_string(lineno) + ")");
  const long n = parse_int(hdr[0], lineno);
  const long pts = parse_int(hdr[1], lineno);
  if (n < 1 || n > 64)
    throw ValidationError("channel count " + std::to_string(n) +
                          " out of range [1, 64]");
  if (pts < 2)
    throw ValidationError("potential needs at least two samples");
  SampledPotential out;
  out.n = static_cast<int>(n);
  out.x.reserve(pts);
  out.Q.reserve(pts);
  const size_t row_len = 1 + 2 * static_cast<size_t>(n) * n;
  for (long j = 0; j < pts; ++j) {
    if (!next_line(is, line, lineno))
      throw ParseError("potential file ends after " + std::to_string(j) +
                       " of " + std::to_string(pts) + " rows");
    const std::vector<double> row = parse_row(line, row_len, lineno);
    out.x.push_back(row[0]);
    out.Q.push_back(matrix_from_flat(row, 1, out.n));
  }
  if (next_line(is, line, lineno))
    throw ParseError("unexpected content after the last potential row (line " +
                     std::to_string(lineno) + ")");
  for (size_t j = 1; j < out.x.size(); ++j)
    if (!(out.x[j] > out.x[j - 1]))
      throw ValidationError("potential grid is not strictly ascending");
  return out;
}

void write_boundary(std::ostream& os, const CMatrix& U) {
  if (U.rows() != U.cols() || U.rows() < 1)
    throw ShapeMismatch("boundary matrix must be square");
  os << "# unitary boundary matrix\n";
  os << "# header: n; then n rows of re,im pairs\n";
  os << U.rows() << "\n";
  for (Eigen::Index r = 0; r < U.rows(); ++r) {
    std::string line;
    for (Eigen::Index c = 0; c < U.cols(); ++c) {
      if (c) line += ", ";
      line += format_full(U(r, c).real()) + ", " + format_full(U(r, c).imag());
    }
    os << line << "\n";
  }
}

CMatrix read_boundary(std::istream& is) {
  int lineno = 0;
  std::string line;
  if (!next_line(is, line, lineno)) throw ParseError("empty boundary file");
  const std::vector<std::string> hdr = split_fields(line);
  if (hdr.size() != 1)
    throw ParseError("boundary header must be a single channel count (line " +
                     std::to_string(lineno) + ")");
  const long n = parse_int(hdr[0], lineno);
  if (n < 1 || n > 64)
    throw ValidationError("channel count " + std::to_string(n) +
                          " out of range [1, 64]");
  CMatrix U(n, n);
  for (long r = 0; r < n; ++r) {
    if (!next_line(is, line, lineno))
      throw ParseError("boundary file ends after " + std::to_string(r) +
                       " of " + std::to_string(n) + " rows");
    const std::vector<double> row =
        parse_row(line, 2 * static_cast<size_t>(n), lineno);
    for (long c = 0; c < n; ++c)
      U(r, c) = Complex(row[2 * c], row[2 * c + 1]);
  }
  if (next_line(is, line, lineno))
    throw ParseError("unexpected content after the last boundary row (line " +
                     std::to_string(lineno) + ")");
  return U;
}

void write_scattering(std::ostream& os, const ScatteringData& sd) {
  if (sd.n < 1) throw ValidationError("scattering data has no channels");
  if (sd.kgrid.size() != static_cast<int>(sd.S.size()))
    throw GridMismatch("k grid and S sample counts differ");
  os << "# scattering data: n = " << sd.n << "\n";
  os << "# sections: [kgrid], [S] (row-major per k), [uhat], [boundstates]\n";
  os << "[kgrid]\n";
  for (double k : sd.kgrid.values) os << format_full(k) << "\n";
  os << "[S]\n";
  for (const CMatrix& s : sd.S) {
    if (s.rows() != sd.n || s.cols() != sd.n)
      throw ShapeMismatch("S sample has the wrong shape");
    std::string line;
    append_matrix_row_major(line, s);
    os << line.substr(2) << "\n";  // drop the leading ", "
  }
  os << "[uhat]\n";
  {
    std::string line;
    for (Eigen::Index r = 0; r < sd.uhat.rows(); ++r) {
      line.clear();
      for (Eigen::Index c = 0; c < sd.uhat.cols(); ++c) {
        if (c) line += ", ";
        line += format_full(sd.uhat(r, c).real()) + ", " +
                format_full(sd.uhat(r, c).imag());
      }
      os << line << "\n";
    }
  }
  os << "[boundstates]\n";
  for (const auto& bs : sd.bound_states) {
    os << "kappa " << format_full(bs.kappa) << "\n";
    std::string line;
    for (Eigen::Index r = 0; r < bs.C.rows(); ++r) {
      line.clear();
      for (Eigen::Index c = 0; c < bs.C.cols(); ++c) {
        if (c) line += ", ";
        line += format_full(bs.C(r, c).real()) + ", " +
                format_full(bs.C(r, c).imag());
      }
      os << line << "\n";
    }
  }
}

ScatteringData read_scattering(std::istream& is) {
  int lineno = 0;
  std::string line;
  std::vector<double> ks;
  std::vector<std::vector<double>> s_rows, u_rows;
  struct RawState {
    double kappa;
    std::vector<std::vector<double>> c_rows;
  };
  std::vector<RawState> states;

  enum Section { None, Kgrid, Smat, Uhat, Bound } sec = None;
  bool saw[4] = {false, false, false, false};
  while (next_line(is, line, lineno)) {
    if (line.front() == '[') {
      if (line == "[kgrid]") sec = Kgrid;
      else if (line == "[S]") sec = Smat;
      else if (line == "[uhat]") sec = Uhat;
      else if (line == "[boundstates]") sec = Bound;
      else
        throw ParseError("unknown section " + line + " at line " +
                         std::to_string(lineno));
      if (saw[sec - 1])
        throw ParseError("duplicate section " + line + " at line " +
                         std::to_string(lineno));
      saw[sec - 1] = true;
      continue;
    }
    switch (sec) {
      case None:
        throw ParseError("content before the first section at line " +
                         std::to_string(lineno));
      case Kgrid:
        ks.push_back(parse_double(line, lineno));
        break;
      case Smat:
        s_rows.push_back(parse_row(line, split_fields(line).size(), lineno));
        break;
      case Uhat:
        u_rows.push_back(parse_row(line, split_fields(line).size(), lineno));
        break;
      case Bound:
        if (line.rfind("kappa", 0) == 0) {
          RawState st;
          st.kappa = parse_double(line.substr(5), lineno);
          states.push_back(std::move(st));
        } else {
          if (states.empty())
            throw ParseError("bound-state row before any kappa at line " +
                             std::to_string(lineno));
          states.back().c_rows.push_back(
              parse_row(line, split_fields(line).size(), lineno));
        }
        break;
    }
  }
  if (!saw[0] || !saw[1] || !saw[2])
    throw ParseError("scattering file needs [kgrid], [S] and [uhat] sections");
  if (ks.size() < 2) throw ValidationError("k grid needs at least 2 samples");
  if (s_rows.size() != ks.size())
    throw GridMismatch("S sample count " + std::to_string(s_rows.size()) +
                       " does not match k grid size " +
                       std::to_string(ks.size()));
  if (u_rows.empty()) throw ParseError("[uhat] section is empty");
  const int n = static_cast<int>(u_rows.size());
  for (const auto& r : u_rows)
    if (r.size() != 2 * static_cast<size_t>(n))
      throw ParseError("uhat rows must hold " + std::to_string(2 * n) +
                       " fields");
  const size_t flat = 2 * static_cast<size_t>(n) * n;
  ScatteringData sd;
  sd.n = n;
  sd.kgrid.values = ks;
  sd.kgrid.k_max = ks.back();
  for (size_t j = 1; j < ks.size(); ++j)
    if (!(ks[j] > ks[j - 1]))
      throw ValidationError("k grid is not strictly ascending");
  if (!(ks.front() > 0.0))
    throw ValidationError("k grid must be strictly positive");
  sd.S.reserve(s_rows.size());
  for (const auto& r : s_rows) {
    if (r.size() != flat)
      throw ParseError("S rows must hold " + std::to_string(flat) +
                       " fields for n = " + std::to_string(n));
    sd.S.push_back(matrix_from_flat(r, 0, n));
  }
  sd.uhat.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      sd.uhat(r, c) = Complex(u_rows[r][2 * c], u_rows[r][2 * c + 1]);
  for (const auto& st : states) {
    BoundState bs;
    bs.kappa = st.kappa;
    bs.multiplicity = 1;
    if (st.c_rows.size() != static_cast<size_t>(n))
      throw ParseError("bound state needs " + std::to_string(n) +
                       " rows of C");
    bs.C.resize(n, n);
    for (int r = 0; r < n; ++r) {
      if (st.c_rows[r].size() != 2 * static_cast<size_t>(n))
        throw ParseError("C rows must hold " + std::to_string(2 * n) +
                         " fields");
      for (int c = 0; c < n; ++c)
        bs.C(r, c) = Complex(st.c_rows[r][2 * c], st.c_rows[r][2 * c + 1]);
    }
    bs.P = CMatrix::Identity(n, n);
    bs.A = CMatrix::Zero(n, n);
    sd.bound_states.push_back(std::move(bs));
  }
  return sd;
}

void write_potential_file(const std::string& path,
                          const std::vector<double>& x,
                          const std::vector<CMatrix>& Q) {
  auto os = open_out(path);
  write_potential(os, x, Q);
  if (!os) throw IoError("failed writing '" + path + "'");
}

SampledPotential read_potential_file(const std::string& path) {
  auto is = open_in(path);
  return read_potential(is);
}

void write_boundary_file(const std::string& path, const CMatrix& U) {
  auto os = open_out(path);
  write_boundary(os, U);
  if (!os) throw IoError("failed writing '" + path + "'");
}

CMatrix read_boundary_file(const std::string& path) {
  auto is = open_in(path);
  return read_boundary(is);
}

void write_scattering_file(const std::string& path,
                           const ScatteringData& sd) {
  auto os = open_out(path);
  write_scattering(os, sd);
  if (!os) throw IoError("failed writing '" + path + "'");
}

ScatteringData read_scattering_file(const std::string& path) {
  auto is = open_in(path);
  return read_scattering(is);
}

void RunConfig::validate() const {
  if (n_k < 16) throw ValidationError("n_k must be at least 16");
  if (n_x < 16) throw ValidationError("n_x must be at least 16");
  if (!(k_min > 0.0) || !(k_max > k_min))
    throw ValidationError("need 0 < k_min < k_max");
  if (!(x_max > 0.0)) throw ValidationError("x_max must be positive");
  if (!(unitarity_tol > 0.0) || !(residual_tol > 0.0) || !(q_rel_tol > 0.0) ||
      !(u_tol > 0.0))
    throw ValidationError("tolerances must be positive");
}

}  // namespace mscat
