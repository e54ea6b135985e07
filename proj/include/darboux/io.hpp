#pragma once

#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "darboux/elliptic.hpp"
#include "darboux/errors.hpp"
#include "darboux/sampled.hpp"
#include "darboux/spectral.hpp"

namespace darboux::io {

/// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  const char* b = s.c_str();
  while (*b == ' ' || *b == '\t') ++b;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(b, &end);
  while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == b || (end && *end != '\0') || errno == ERANGE) throw ParseError("not a number: '" + s + "'");
  return v;
}

/// Header row plus one line per sample; all columns must have equal length.
inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::span<const double>>& columns,
                      const std::vector<std::string>& comments = {}) {
  if (header.size() != columns.size()) throw ShapeError("write_csv: header/column count mismatch");
  for (const auto& c : comments) os << "# " << c << '\n';
  for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
  os << '\n';
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != n) throw ShapeError("write_csv: columns differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << fmt17(columns[j][i]);
    os << '\n';
  }
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

/// Reads a potential from CSV: optional leading "# period=T" comment, a header
/// row with an "x" column and the requested value column, uniformly spaced x.
inline SampledPotential read_potential_csv(std::istream& is, const std::string& column = "V",
                                           std::optional<double> period = std::nullopt) {
  std::string line;
  std::optional<double> file_period;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("period=");
      if (pos != std::string::npos) file_period = parse_double(trim(line.substr(pos + 7)));
      continue;
    }
    header = split(line);
    break;
  }
  if (header.empty()) throw ParseError("potential CSV: missing header row");
  int ix = -1, iv = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string h = trim(header[j]);
    if (h == "x") ix = static_cast<int>(j);
    if (h == column) iv = static_cast<int>(j);
  }
  if (ix < 0) throw ParseError("potential CSV: no 'x' column");
  if (iv < 0) throw ParseError("potential CSV: no '" + column + "' column");
  std::vector<double> xs, vs;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line);
    if (f.size() != header.size()) {
      throw ParseError("potential CSV: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                       " fields, expected " + std::to_string(header.size()));
    }
    xs.push_back(parse_double(f[static_cast<std::size_t>(ix)]));
    vs.push_back(parse_double(f[static_cast<std::size_t>(iv)]));
  }
  if (xs.size() < 2) throw ParseError("potential CSV: fewer than two samples");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(dx > 0)) throw ShapeError("potential CSV: x must increase");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - (xs.front() + static_cast<double>(i) * dx)) > 1e-9 * std::max(1.0, std::abs(xs[i]))) {
      throw ShapeError("potential CSV: x is not uniformly spaced");
    }
    if (!std::isfinite(vs[i])) throw ShapeError("potential CSV: non-finite potential value");
  }
  SampledPotential v{xs.front(), dx, std::move(vs), period ? period : file_period, column};
  return v;
}

inline SampledPotential read_potential_csv(const std::string& path, const std::string& column = "V",
                                           std::optional<double> period = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_potential_csv(in, column, period);
}

// --- golden vectors ----------------------------------------------------------

/// One reference value: fn in {wp, wpp, zeta, sigma, sn}, all numbers as decimal strings.
struct GoldenRecord {
  std::string fn;
  double m = 0.0;
  cplx z;
  cplx value;
};

inline GoldenRecord parse_golden_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("golden record: ") + e.what());
  }
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw ParseError(std::string("golden record: missing field ") + key);
    return parse_double(j[key].get<std::string>());
  };
  GoldenRecord r;
  if (!j.contains("fn") || !j["fn"].is_string()) throw ParseError("golden record: missing field fn");
  r.fn = j["fn"].get<std::string>();
  if (r.fn != "wp" && r.fn != "wpp" && r.fn != "zeta" && r.fn != "sigma" && r.fn != "sn") {
    throw ParseError("golden record: unknown function '" + r.fn + "'");
  }
  r.m = str("m");
  r.z = {str("z_re"), str("z_im")};
  r.value = {str("val_re"), str("val_im")};
  return r;
}

inline std::vector<GoldenRecord> read_golden(std::istream& is) {
  std::vector<GoldenRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_golden_line(line));
  }
  return out;
}

inline std::vector<GoldenRecord> read_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_golden(in);
}

/// Library value for a golden record.
inline cplx evaluate_golden(const GoldenRecord& r) {
  if (r.fn == "sn") return jacobi_sn(r.z.real(), r.m);
  const Weierstrass w(invariants_from_modulus(r.m));
  if (r.fn == "wp") return w.p(r.z);
  if (r.fn == "wpp") return w.dp(r.z);
  if (r.fn == "zeta") return w.zeta(r.z);
  return w.sigma(r.z);
}

/// |computed - reference| / max(1, |reference|).
inline double golden_error(const GoldenRecord& r) {
  return std::abs(evaluate_golden(r) - r.value) / std::max(1.0, std::abs(r.value));
}

// --- JSON --------------------------------------------------------------------

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const SpectralReport& rep) {
  ordered_json j;
  j["band_edges"] = ordered_json::array();
  for (const auto& e : rep.band_edges) {
    j["band_edges"].push_back({{"energy", e.energy}, {"type", e.type == EdgeType::lower ? "lower" : "upper"}});
  }
  j["bound_states"] = ordered_json::array();
  for (const auto& b : rep.bound_states) {
    j["bound_states"].push_back(
        {{"energy", b.energy}, {"nodes", b.nodes}, {"residual", b.residual}, {"decay", b.decay}});
  }
  j["discriminant_samples"] = ordered_json::array();
  for (const auto& d : rep.discriminant_samples) {
    j["discriminant_samples"].push_back({{"energy", d.energy}, {"value", d.value}});
  }
  return j;
}

inline ordered_json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace darboux::io
