#pragma once

// Scenario files wire a Hamiltonian, a base path, a trivialization, a
// stepping method, and observables into one reproducible run. The format
// is flat key = value lines grouped by [section], with # comments.
// Parsing reports the first malformed line; validation collects every
// semantic problem before giving up.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qfibre/evolution.hpp"

// The CMake target injects the project version; plain -I consumers
// still get a compilable header.
#ifndef QFIBRE_VERSION
#define QFIBRE_VERSION "unknown"
#endif

namespace qfibre {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigFile {
  // Section "" holds keys that precede any [section] header.
  std::map<std::string, std::vector<ConfigEntry>> sections;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline bool valid_ident(const std::string& s) {
  if (s.empty()) return false;
  for (const char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

inline std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

inline ConfigFile parse_config(const std::string& text) {
  ConfigFile out;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigSyntaxError(at + "unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!detail::valid_ident(section))
        throw ConfigSyntaxError(at + "bad section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigSyntaxError(at + "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!detail::valid_ident(key))
      throw ConfigSyntaxError(at + "bad key '" + key + "'");
    if (value.empty()) throw ConfigSyntaxError(at + "empty value for '" + key + "'");
    for (const auto& e : out.sections[section])
      if (e.key == key)
        throw ConfigSyntaxError(at + "duplicate key '" + key + "' in [" +
                                section + "]");
    out.sections[section].push_back({key, value, line_no});
  }
  return out;
}

inline ConfigFile load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigSyntaxError("cannot open config file " + file);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// Typed access on top of a parsed file. Lookups mark keys as consumed so
// that leftovers (usually typos) surface as validation errors. Problems
// accumulate; callers throw one ConfigValidationError at the end.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigFile& cfg) : cfg_(cfg) {}

  bool has(const std::string& section, const std::string& key) const {
    const auto it = cfg_.sections.find(section);
    if (it == cfg_.sections.end()) return false;
    for (const auto& e : it->second)
      if (e.key == key) return true;
    return false;
  }

  std::optional<std::string> raw(const std::string& section,
                                 const std::string& key) {
    const auto it = cfg_.sections.find(section);
    if (it == cfg_.sections.end()) return std::nullopt;
    for (const auto& e : it->second) {
      if (e.key == key) {
        consumed_.insert(section + "\n" + key);
        return e.value;
      }
    }
    return std::nullopt;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) {
    return raw(section, key).value_or(fallback);
  }

  std::string require_string(const std::string& section,
                             const std::string& key) {
    auto v = raw(section, key);
    if (!v) {
      fail(section, key, "missing");
      return "";
    }
    return *v;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) {
    const auto v = raw(section, key);
    return v ? parse_double(section, key, *v) : fallback;
  }

  double require_double(const std::string& section, const std::string& key) {
    const auto v = raw(section, key);
    if (!v) {
      fail(section, key, "missing");
      return 0;
    }
    return parse_double(section, key, *v);
  }

  long get_int(const std::string& section, const std::string& key,
               long fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      const long n = std::stol(*v, &used);
      if (used != v->size()) throw std::invalid_argument("");
      return n;
    } catch (const std::exception&) {
      fail(section, key, "not an integer: '" + *v + "'");
      return fallback;
    }
  }

  std::vector<double> require_list(const std::string& section,
                                   const std::string& key) {
    const auto v = raw(section, key);
    if (!v) {
      fail(section, key, "missing");
      return {};
    }
    return parse_list(section, key, *v);
  }

  std::vector<double> parse_list(const std::string& section,
                                 const std::string& key,
                                 const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
      item = detail::trim(item);
      if (item.empty()) {
        fail(section, key, "empty list entry");
        return {};
      }
      out.push_back(parse_double(section, key, item));
    }
    if (out.empty()) fail(section, key, "empty list");
    return out;
  }

  void fail(const std::string& section, const std::string& key,
            const std::string& message) {
    const std::string where = section.empty() ? key : section + "." + key;
    errors_.push_back(where + ": " + message);
  }

  // True when every present key was looked up by some builder.
  void check_consumed() {
    for (const auto& [section, entries] : cfg_.sections)
      for (const auto& e : entries)
        if (!consumed_.count(section + "\n" + e.key))
          fail(section, e.key, "unrecognized key");
  }

  const std::vector<ConfigEntry>* section(const std::string& name) {
    const auto it = cfg_.sections.find(name);
    return it == cfg_.sections.end() ? nullptr : &it->second;
  }

  const std::vector<std::string>& errors() const { return errors_; }

  void throw_if_failed() const {
    if (errors_.empty()) return;
    std::string joined = "invalid scenario:";
    for (const auto& e : errors_) joined += "\n  " + e;
    throw ConfigValidationError(joined);
  }

 private:
  double parse_double(const std::string& section, const std::string& key,
                      const std::string& text) {
    try {
      std::size_t used = 0;
      const double x = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("");
      return x;
    } catch (const std::exception&) {
      fail(section, key, "not a number: '" + text + "'");
      return 0;
    }
  }

  const ConfigFile& cfg_;
  std::set<std::string> consumed_;
  std::vector<std::string> errors_;
};

struct Scenario {
  std::string name;
  unsigned seed = 1;
  Vector initial_state;
  TimeDependentHamiltonian hamiltonian;
  BasePath path;
  Trivialization trivialization;
  PropagatorMethod method;
  std::vector<std::pair<std::string, Matrix>> observables;
  Tolerances tolerances;
};

namespace detail {

// Named matrices plus two escape hatches: a seeded draw and an explicit
// row-major re,im list.
inline Matrix parse_matrix(ConfigReader& r, const std::string& section,
                           const std::string& key, const std::string& text,
                           int dim) {
  const auto two_level = [&](const Matrix& m) {
    if (dim != 2) {
      r.fail(section, key, "'" + text + "' needs dim = 2");
      return Matrix(Matrix::Identity(dim, dim));
    }
    return m;
  };
  if (text == "identity") return Matrix::Identity(dim, dim);
  if (text == "pauli_x") return two_level(pauli_x());
  if (text == "pauli_y") return two_level(pauli_y());
  if (text == "pauli_z") return two_level(pauli_z());
  if (text == "spin_x") return spin_x(dim);
  if (text == "spin_y") return spin_y(dim);
  if (text == "spin_z") return spin_z(dim);
  if (text.rfind("seeded_hermitian:", 0) == 0) {
    try {
      return random_hermitian(dim, std::stoul(text.substr(17)));
    } catch (const std::exception&) {
      r.fail(section, key, "bad seed in '" + text + "'");
      return Matrix::Identity(dim, dim);
    }
  }
  const std::vector<double> flat = r.parse_list(section, key, text);
  if (int(flat.size()) != 2 * dim * dim) {
    r.fail(section, key, "need " + std::to_string(2 * dim * dim) +
                             " numbers (re,im row major), got " +
                             std::to_string(flat.size()));
    return Matrix::Identity(dim, dim);
  }
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const std::size_t k = 2 * std::size_t(i * dim + j);
      m(i, j) = Complex(flat[k], flat[k + 1]);
    }
  return m;
}

inline std::vector<Matrix> parse_matrix_series(ConfigReader& r,
                                               const std::string& section,
                                               std::size_t count, int dim,
                                               double scale) {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::string key = "matrix." + std::to_string(k);
    const auto text = r.raw(section, key);
    if (!text) {
      r.fail(section, key, "missing");
      out.push_back(Matrix::Identity(dim, dim));
      continue;
    }
    out.push_back(scale * parse_matrix(r, section, key, *text, dim));
  }
  return out;
}

inline TimeDependentHamiltonian build_hamiltonian(ConfigReader& r, int dim,
                                                  double hbar, double t0,
                                                  double t1) {
  const std::string section = "hamiltonian";
  const std::string family = r.require_string(section, "family");
  const double scale = r.get_double(section, "scale", 1.0);
  const double htol = r.get_double(section, "hermiticity_tol", 1e-10);
  const double corruption = r.get_double(section, "corruption", 0.0);
  const auto finish = [&](TimeDependentHamiltonian h) {
    if (corruption != 0.0) h.set_corruption(corruption);
    return h;
  };
  const auto fallback = [&] {
    return TimeDependentHamiltonian::constant(Matrix::Identity(dim, dim), t0,
                                              t1, hbar > 0 ? hbar : 1.0);
  };
  try {
    if (family == "constant") {
      const std::string text = r.require_string(section, "matrix");
      if (!r.errors().empty()) return fallback();
      return finish(TimeDependentHamiltonian::constant(
          scale * parse_matrix(r, section, "matrix", text, dim), t0, t1, hbar,
          htol));
    }
    if (family == "piecewise_constant") {
      const std::vector<double> edges = r.require_list(section, "breakpoints");
      if (edges.size() < 2) {
        r.fail(section, "breakpoints", "need at least two");
        return fallback();
      }
      if (edges.front() > t0 || edges.back() < t1)
        r.fail(section, "breakpoints", "must cover the path time interval");
      auto segs = parse_matrix_series(r, section, edges.size() - 1, dim, scale);
      if (!r.errors().empty()) return fallback();
      return finish(TimeDependentHamiltonian::piecewise_constant(
          edges, std::move(segs), hbar, htol));
    }
    if (family == "two_level_drive") {
      if (dim != 2) r.fail(section, "family", "two_level_drive needs dim = 2");
      const double delta = r.require_double(section, "delta");
      const double rabi = r.require_double(section, "rabi");
      const double drive = r.require_double(section, "drive");
      if (!r.errors().empty()) return fallback();
      return finish(TimeDependentHamiltonian::two_level_drive(
          delta, rabi, drive, t0, t1, hbar, htol));
    }
    if (family == "tabulated") {
      const std::vector<double> times = r.require_list(section, "times");
      if (times.size() < 2) {
        r.fail(section, "times", "need at least two");
        return fallback();
      }
      if (times.front() > t0 || times.back() < t1)
        r.fail(section, "times", "must cover the path time interval");
      auto samples = parse_matrix_series(r, section, times.size(), dim, scale);
      if (!r.errors().empty()) return fallback();
      return finish(TimeDependentHamiltonian::tabulated(
          times, std::move(samples), hbar, htol));
    }
    r.fail(section, "family", "unknown family '" + family + "'");
  } catch (const Error& e) {
    r.fail(section, "family", e.what());
  }
  return fallback();
}

inline BasePath build_path(ConfigReader& r) {
  const std::string section = "path";
  const std::string family = r.get_string(section, "family", "line");
  const double a = r.get_double(section, "t_begin", 0.0);
  const double b = r.get_double(section, "t_end", 1.0);
  const long cells = r.get_int(section, "cells", 128);
  const auto fallback = [] {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
    v(0) = 1;
    return BasePath::line(z, v, 0.0, 1.0, 2);
  };
  if (!(b > a)) {
    r.fail(section, "t_end", "need t_end > t_begin");
    return fallback();
  }
  if (cells < 1 || cells > (1L << 22)) {
    r.fail(section, "cells", "need 1 <= cells <= " + std::to_string(1L << 22));
    return fallback();
  }
  try {
    if (family == "line") {
      const auto s = r.require_list(section, "start");
      const auto v = r.require_list(section, "velocity");
      if (s.empty() || s.size() != v.size()) {
        r.fail(section, "velocity", "start and velocity sizes differ");
        return fallback();
      }
      Eigen::VectorXd sv = Eigen::Map<const Eigen::VectorXd>(s.data(), s.size());
      Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
      return BasePath::line(sv, vv, a, b, int(cells));
    }
    if (family == "circle") {
      const double radius = r.require_double(section, "radius");
      if (!(radius > 0)) {
        r.fail(section, "radius", "need radius > 0");
        return fallback();
      }
      return BasePath::circle(radius, a, b, int(cells));
    }
    if (family == "figure_eight")
      return BasePath::figure_eight(a, b, int(cells));
    r.fail(section, "family", "unknown family '" + family + "'");
  } catch (const Error& e) {
    r.fail(section, "family", e.what());
  }
  return fallback();
}

inline Trivialization build_trivialization(ConfigReader& r, int dim,
                                           int base_dim) {
  const std::string section = "trivialization";
  const std::string family = r.get_string(section, "family", "identity");
  try {
    if (family == "identity") return Trivialization::identity(dim);
    if (family == "rotation_field") {
      const std::string axis = r.get_string(section, "axis", "z");
      const auto k = r.require_list(section, "wavevector");
      if (int(k.size()) != base_dim) {
        r.fail(section, "wavevector",
               "need " + std::to_string(base_dim) + " components");
        return Trivialization::identity(dim);
      }
      Eigen::VectorXd kv = Eigen::Map<const Eigen::VectorXd>(k.data(), k.size());
      return Trivialization::rotation_field(dim, axis_from_string(axis), kv);
    }
    if (family == "seeded_random") {
      const long seed = r.get_int(section, "seed", 1);
      if (seed < 0) {
        r.fail(section, "seed", "need seed >= 0");
        return Trivialization::identity(dim);
      }
      return Trivialization::seeded_random_unitary(dim, unsigned(seed));
    }
    r.fail(section, "family", "unknown family '" + family + "'");
  } catch (const Error& e) {
    r.fail(section, "family", e.what());
  }
  return Trivialization::identity(dim);
}

inline PropagatorMethod build_method(ConfigReader& r) {
  const std::string section = "method";
  PropagatorMethod m;
  const std::string scheme = r.get_string(section, "scheme", "magnus_midpoint");
  try {
    m.scheme = scheme_from_string(scheme);
  } catch (const Error& e) {
    r.fail(section, "scheme", e.what());
  }
  const long steps = r.get_int(section, "steps", 256);
  if (steps < 1 || steps > (1L << 22))
    r.fail(section, "steps", "need 1 <= steps <= " + std::to_string(1L << 22));
  else
    m.steps = int(steps);
  return m;
}

inline std::vector<std::pair<std::string, Matrix>> build_observables(
    ConfigReader& r, int dim, double hermiticity_tol) {
  std::vector<std::pair<std::string, Matrix>> out;
  const auto* entries = r.section("observables");
  if (!entries) return out;
  for (const auto& e : *entries) {
    const auto text = r.raw("observables", e.key);
    Matrix m = parse_matrix(r, "observables", e.key, *text, dim);
    if (!is_hermitian(m, hermiticity_tol))
      r.fail("observables", e.key, "observable is not hermitian");
    out.emplace_back(e.key, std::move(m));
  }
  return out;
}

}  // namespace detail

inline Scenario build_scenario(const ConfigFile& cfg) {
  ConfigReader r(cfg);
  std::string name = r.get_string("", "name", "scenario");
  if (!detail::valid_ident(name)) {
    r.fail("", "name", "bad scenario name '" + name + "'");
    name = "scenario";
  }
  const long dim = r.get_int("", "dim", 2);
  const double hbar = r.get_double("", "hbar", 1.0);
  const long seed = r.get_int("", "seed", 1);
  if (dim < 1 || dim > 64) r.fail("", "dim", "need 1 <= dim <= 64");
  if (!(hbar > 0)) r.fail("", "hbar", "need hbar > 0");
  if (seed < 0) r.fail("", "seed", "need seed >= 0");

  Tolerances tol;
  tol.hermiticity = r.get_double("tolerances", "hermiticity", tol.hermiticity);
  tol.unitarity = r.get_double("tolerances", "unitarity", tol.unitarity);
  tol.equality = r.get_double("tolerances", "equality", tol.equality);
  if (!(tol.hermiticity > 0) || !(tol.unitarity > 0) || !(tol.equality > 0))
    r.fail("tolerances", "hermiticity", "tolerances must be positive");
  r.throw_if_failed();  // dim and tolerances gate everything below

  const int n = int(dim);
  BasePath path = detail::build_path(r);
  TimeDependentHamiltonian ham =
      detail::build_hamiltonian(r, n, hbar, path.t_begin(), path.t_end());
  Trivialization triv = detail::build_trivialization(r, n, path.base_dim());
  PropagatorMethod method = detail::build_method(r);
  auto observables = detail::build_observables(r, n, tol.hermiticity);

  Vector psi0 = Vector::Zero(n);
  if (r.has("", "initial_state")) {
    const auto flat = r.require_list("", "initial_state");
    if (int(flat.size()) != 2 * n) {
      r.fail("", "initial_state",
             "need " + std::to_string(2 * n) + " numbers (re,im pairs)");
    } else {
      for (int k = 0; k < n; ++k)
        psi0(k) = Complex(flat[2 * k], flat[2 * k + 1]);
    }
  } else {
    psi0(0) = 1.0;
  }
  if (psi0.norm() == 0.0) r.fail("", "initial_state", "state has zero norm");

  const bool has_exact_form =
      ham.family() == HamiltonianFamily::constant ||
      ham.family() == HamiltonianFamily::piecewise_constant;
  if (method.scheme == Scheme::exact_constant && !has_exact_form)
    r.fail("method", "scheme",
           "exact_constant needs a constant or piecewise_constant family");

  r.check_consumed();
  r.throw_if_failed();
  return {std::move(name), unsigned(seed),    std::move(psi0),
          std::move(ham),  std::move(path),   std::move(triv),
          method,          std::move(observables), tol};
}

inline Scenario load_scenario(const std::string& file) {
  return build_scenario(load_config(file));
}

// One trace row per path grid time: base point, ambient state, fibre
// components, squared norm, fibre expectations, and the gap between the
// step propagator and the nearest unitary.
struct RunResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline RunResult run_scenario(const Scenario& sc) {
  const int n = sc.hamiltonian.dim();
  const int d = sc.path.base_dim();
  RunResult out;
  out.columns.push_back("t");
  for (int i = 0; i < d; ++i) out.columns.push_back("x" + std::to_string(i));
  for (int k = 0; k < n; ++k) {
    out.columns.push_back("psi" + std::to_string(k) + "_re");
    out.columns.push_back("psi" + std::to_string(k) + "_im");
  }
  for (int k = 0; k < n; ++k) {
    out.columns.push_back("phi" + std::to_string(k) + "_re");
    out.columns.push_back("phi" + std::to_string(k) + "_im");
  }
  out.columns.push_back("norm2");
  for (const auto& [name, m] : sc.observables) out.columns.push_back(name);
  out.columns.push_back("unitarity_defect");

  Propagator u(sc.hamiltonian, sc.path.t_begin(), sc.path.t_end(), sc.method);
  out.rows.reserve(sc.path.grid().size());
  for (const double t : sc.path.grid()) {
    const Matrix ut = u.at(t);
    const Vector psi = ut * sc.initial_state;
    const Eigen::VectorXd x = sc.path.at(t);
    const FibreVector v = to_fibre(sc.trivialization, x, psi);
    std::vector<double> row;
    row.reserve(out.columns.size());
    row.push_back(t);
    for (int i = 0; i < d; ++i) row.push_back(x(i));
    for (int k = 0; k < n; ++k) {
      row.push_back(psi(k).real());
      row.push_back(psi(k).imag());
    }
    for (int k = 0; k < n; ++k) {
      row.push_back(v.components(k).real());
      row.push_back(v.components(k).imag());
    }
    row.push_back(psi.squaredNorm());
    for (const auto& [name, m] : sc.observables)
      row.push_back(bundle_expectation(m, v, sc.trivialization).real());
    row.push_back(unitarity_defect(ut));
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline void write_table_csv(std::ostream& os, const RunResult& r) {
  for (std::size_t i = 0; i < r.columns.size(); ++i)
    os << (i ? "," : "") << r.columns[i];
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << detail::g17(row[i]);
    os << '\n';
  }
}

// Sidecar describing a written trace; deliberately timestamp-free so
// reruns are byte identical.
inline void write_run_meta(std::ostream& os, const Scenario& sc,
                           const std::string& config_text,
                           const RunResult& result) {
  os << "name = " << sc.name << '\n'
     << "tool_version = " << QFIBRE_VERSION << '\n'
     << "config_hash = "
     << detail::hex64(fnv1a(config_text.data(), config_text.size())) << '\n'
     << "rows = " << result.rows.size() << '\n'
     << "columns = " << result.columns.size() << '\n';
}

// Every structural invariant the run is supposed to keep, in one report:
// generator hermiticity, propagator unitarity, norm conservation, the
// transport axioms with both conjugation records, the two conjugation
// verdicts and their agreement, the trivialization round trip, and the
// agreement of the two lifting routes.
inline AxiomReport check_invariants(const Scenario& sc, int samples = 60,
                                    std::optional<unsigned> seed = {}) {
  const unsigned s0 = seed.value_or(sc.seed);
  const Tolerances& tol = sc.tolerances;
  AxiomReport report;
  const auto& grid = sc.path.grid();
  std::mt19937_64 rng(s0);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);

  double herm = 0;
  for (int k = 0; k < samples; ++k)
    herm = std::max(herm,
                    hermiticity_defect(sc.hamiltonian.at(grid[pick(rng)])));
  report.records.push_back({sc.name, "hamiltonian_hermiticity", herm,
                            tol.hermiticity, herm <= tol.hermiticity});

  Propagator u(sc.hamiltonian, sc.path.t_begin(), sc.path.t_end(), sc.method);
  double unit = 0;
  double norm_drift = 0;
  const double norm0 = sc.initial_state.squaredNorm();
  for (int k = 0; k < samples; ++k) {
    const Matrix ut = u.at(grid[pick(rng)]);
    unit = std::max(unit, unitarity_defect(ut));
    norm_drift = std::max(
        norm_drift,
        std::abs(Vector(ut * sc.initial_state).squaredNorm() - norm0));
  }
  report.records.push_back({sc.name, "propagator_unitarity", unit,
                            tol.unitarity, unit <= tol.unitarity});
  report.records.push_back({sc.name, "norm_conservation", norm_drift,
                            tol.unitarity, norm_drift <= tol.unitarity});

  AxiomReport props = transport_property_report(
      sc.hamiltonian, sc.path, sc.trivialization, sc.method, samples, s0 + 1,
      tol);
  for (auto& rec : props.records) {
    rec.law = sc.name;
    report.records.push_back(rec);
  }

  TransportLaw law = evolution_transport(sc.hamiltonian, sc.path,
                                         sc.trivialization, sc.method);
  const auto h =
      is_hermitian_transport(law, sc.path, sc.trivialization, samples, s0 + 2,
                             tol.unitarity);
  const auto w =
      is_unitary_transport(law, sc.path, sc.trivialization, samples, s0 + 3,
                           tol.unitarity);
  report.records.push_back({sc.name, "hermitian_conjugation", h.max_defect,
                            tol.unitarity, h.holds});
  report.records.push_back({sc.name, "unitary_conjugation", w.max_defect,
                            tol.unitarity, w.holds});
  report.records.push_back({sc.name, "conjugation_verdicts_agree",
                            std::abs(double(h.holds) - double(w.holds)), 0.5,
                            h.holds == w.holds});

  const double trip =
      round_trip_defect(law, u, sc.path, sc.trivialization, samples, s0 + 4);
  report.records.push_back(
      {sc.name, "round_trip", trip, tol.equality, trip <= tol.equality});

  const PathLifting la = lift_state(sc.hamiltonian, sc.path, sc.trivialization,
                                    sc.initial_state, sc.method);
  const PathLifting lb =
      lift_state_by_transport(sc.hamiltonian, sc.path, sc.trivialization,
                              sc.initial_state, sc.method);
  const double routes = lifting_defect(la, lb);
  report.records.push_back({sc.name, "lifting_route_agreement", routes,
                            tol.equality, routes <= tol.equality});
  return report;
}

// Error of the terminal propagator against a closed form (or against a
// rung twice as fine when no closed form exists), with the observed
// convergence order between consecutive rungs.
struct ConvergenceRow {
  int steps = 0;
  double error = 0;
  double order = 0;
  double unitarity_defect = 0;
};

inline std::vector<ConvergenceRow> convergence_study(
    const Scenario& sc, const std::vector<int>& ladder) {
  if (ladder.empty()) throw DomainError("convergence_study: empty ladder");
  for (const int n : ladder)
    if (n < 1) throw DomainError("convergence_study: steps must be positive");
  const double a = sc.path.t_begin();
  const double b = sc.path.t_end();
  Matrix ref;
  try {
    ref = closed_form_propagator(sc.hamiltonian, b, a);
  } catch (const MethodMismatchError&) {
    int finest = 0;
    for (const int n : ladder) finest = std::max(finest, n);
    Propagator fine(sc.hamiltonian, a, b,
                    {sc.method.scheme, 2 * finest});
    ref = fine(b, a);
  }
  std::vector<ConvergenceRow> out;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    Propagator u(sc.hamiltonian, a, b, {sc.method.scheme, ladder[i]});
    const Matrix ub = u(b, a);
    ConvergenceRow row;
    row.steps = ladder[i];
    row.error = max_abs(Matrix(ub - ref));
    row.unitarity_defect = unitarity_defect(ub);
    if (i > 0 && row.error > 0 && out[i - 1].error > 0 &&
        ladder[i] != ladder[i - 1]) {
      row.order = std::log(out[i - 1].error / row.error) /
                  std::log(double(ladder[i]) / double(ladder[i - 1]));
    }
    out.push_back(row);
  }
  return out;
}

inline void write_convergence_csv(std::ostream& os,
                                  const std::vector<ConvergenceRow>& rows) {
  os << "steps,error,order,unitarity_defect\n";
  for (const auto& r : rows)
    os << r.steps << ',' << detail::g17(r.error) << ',' << detail::g17(r.order)
       << ',' << detail::g17(r.unitarity_defect) << '\n';
}

}  // namespace qfibre
