// Data ingestion and report serialization for the command-line tools.
//
// Points travel as CSV, one point per row of comma-separated decimals, with
// `#`-prefixed header comments carrying space metadata and an optional
// trailing weights column (announced by `# weights=1`).  Reports are JSON
// trees; doubles are emitted in shortest round-trip form and the non-finite
// values that legitimately appear in certificates (r0 on flat spaces, the
// probe floor) become the strings "inf"/"-inf"/"nan".
#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rmest/certify.hpp"
#include "rmest/errors.hpp"
#include "rmest/geometry.hpp"
#include "rmest/objective.hpp"
#include "rmest/solver.hpp"

namespace rmest::io {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Number formatting

/// Shortest decimal that parses back to exactly `v`; "inf"/"-inf"/"nan" for
/// the non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Strict double parser (whole token must be consumed); accepts the same
/// "inf"/"-inf"/"nan" spellings format_double produces.
inline double parse_double(std::string_view token) {
  std::size_t b = token.find_first_not_of(" \t\r");
  std::size_t e = token.find_last_not_of(" \t\r");
  if (b == std::string_view::npos)
    throw ValidationError("empty numeric field");
  token = token.substr(b, e - b + 1);
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw ValidationError("malformed number '" + std::string(token) + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Space specification strings: kind:key=value[,key=value]

/// Canonical spec for a space, e.g. "sphere:dim=2,radius=1".
inline std::string space_spec(const ManifoldSpace& space) {
  std::string s = to_string(space.kind());
  s += ":dim=" + std::to_string(space.dim());
  if (space.kind() == SpaceKind::sphere)
    s += ",radius=" + format_double(space.scale());
  if (space.kind() == SpaceKind::hyperbolic)
    s += ",curvature=" + format_double(space.scale());
  return s;
}

/// Parses "euclidean:dim=3", "sphere:dim=2[,radius=R]",
/// "hyperbolic:dim=3[,curvature=K]".  Scale parameters default to 1.
inline ManifoldSpace parse_space(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  int dim = 0;
  bool have_dim = false;
  double scale = 1.0;
  const char* scale_key = kind == "sphere"      ? "radius"
                          : kind == "hyperbolic" ? "curvature"
                                                 : nullptr;
  std::string_view rest =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{}
                                           : rest.substr(comma + 1);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("space spec item '" + std::string(item) +
                            "' is not key=value");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "dim") {
      dim = static_cast<int>(parse_double(value));
      have_dim = true;
    } else if (scale_key != nullptr && key == scale_key) {
      scale = parse_double(value);
    } else {
      throw ValidationError("unknown space parameter '" + std::string(key) +
                            "' for kind '" + std::string(kind) + "'");
    }
  }
  if (!have_dim)
    throw ValidationError("space spec '" + std::string(spec) +
                          "' is missing dim=");
  if (kind == "euclidean") return ManifoldSpace::euclidean(dim);
  if (kind == "sphere") return ManifoldSpace::sphere(dim, scale);
  if (kind == "hyperbolic") return ManifoldSpace::hyperbolic(dim, scale);
  throw ValidationError("unknown space kind '" + std::string(kind) +
                        "' (expected euclidean, sphere, or hyperbolic)");
}

// ---------------------------------------------------------------------------
// CSV datasets

struct Dataset {
  std::string space;     // "# space=..." metadata when present
  bool has_weights = false;
  std::vector<std::vector<double>> rows;  // coordinates only
  std::vector<double> weights;            // parallel to rows iff has_weights
};

inline void write_csv(std::ostream& os, const ManifoldSpace& space,
                      const WeightedSample& sample, bool include_weights = true) {
  os << "# space=" << space_spec(space) << "\n";
  if (include_weights) os << "# weights=1\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const std::vector<double>& c = sample.points[i].coords;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j) os << ",";
      os << format_double(c[j]);
    }
    if (include_weights) os << "," << format_double(sample.weights[i]);
    os << "\n";
  }
}

/// Reads the CSV format emitted by write_csv.  Ragged rows and malformed
/// numbers raise ValidationError naming the (1-based) line.
inline Dataset read_csv(std::istream& is) {
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;  // blank
    if (line[start] == '#') {
      const std::string_view meta =
          std::string_view(line).substr(start + 1);
      const std::size_t eq = meta.find('=');
      if (eq == std::string_view::npos) continue;  // free-form comment
      std::string_view key = meta.substr(0, eq);
      key.remove_prefix(std::min(key.find_first_not_of(" \t"), key.size()));
      const std::size_t kend = key.find_last_not_of(" \t");
      if (kend != std::string_view::npos) key = key.substr(0, kend + 1);
      const std::string_view value = meta.substr(eq + 1);
      if (key == "space") ds.space = std::string(value);
      if (key == "weights") ds.has_weights = value == "1";
      continue;
    }
    std::vector<double> fields;
    std::string_view rest = line;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view token = rest.substr(0, comma);
      try {
        fields.push_back(parse_double(token));
      } catch (const ValidationError& e) {
        throw ValidationError("line " + std::to_string(lineno) + ": " +
                              e.what());
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw ValidationError("line " + std::to_string(lineno) + ": has " +
                            std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(width));
    if (ds.has_weights) {
      ds.weights.push_back(fields.back());
      fields.pop_back();
    }
    ds.rows.push_back(std::move(fields));
  }
  return ds;
}

/// Validates and converts parsed rows into a sample on `space`.
inline WeightedSample to_sample(const ManifoldSpace& space, const Dataset& ds) {
  if (ds.rows.empty()) throw ValidationError("no data rows");
  std::vector<Point> pts;
  pts.reserve(ds.rows.size());
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    try {
      pts.push_back(space.make_point(ds.rows[i]));
    } catch (const ValidationError& e) {
      throw ValidationError("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return make_sample(space, std::move(pts),
                     ds.has_weights ? ds.weights : std::vector<double>{});
}

inline WeightedSample read_csv_sample(const ManifoldSpace& space,
                                      std::istream& is) {
  return to_sample(space, read_csv(is));
}

// ---------------------------------------------------------------------------
// JSON report builders

/// Finite doubles stay numbers; inf/nan become their string spellings so the
/// report remains standard JSON.
inline ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline ordered_json json_point(const Point& p) {
  ordered_json a = ordered_json::array();
  for (double c : p.coords) a.push_back(json_number(c));
  return a;
}

inline ordered_json report_solver_params(const SolverParams& p) {
  ordered_json j;
  j["max_iters"] = p.max_iters;
  j["grad_tol"] = json_number(p.grad_tol);
  j["step_tol"] = json_number(p.step_tol);
  j["seed"] = p.seed;
  return j;
}

inline ordered_json report_estimate(const EstimateResult& r) {
  ordered_json j;
  j["status"] = to_string(r.status);
  j["minimizer"] = json_point(r.minimizer);
  j["value"] = json_number(r.value);
  j["grad_norm"] = json_number(r.grad_norm);
  j["iters"] = r.iters;
  ordered_json trace = ordered_json::array();
  for (const TraceEntry& t : r.trace) {
    ordered_json e;
    e["iter"] = t.iter;
    e["value"] = json_number(t.value);
    e["grad_norm"] = json_number(t.grad_norm);
    e["step"] = json_number(t.step);
    trace.push_back(std::move(e));
  }
  j["trace"] = std::move(trace);
  return j;
}

inline ordered_json report_certificate(const Certificate& c) {
  ordered_json j;
  j["loss_class"] = to_string(c.loss_class);
  ordered_json ball;
  ball["center"] = json_point(c.enclosing_ball.center);
  ball["radius"] = json_number(c.enclosing_ball.radius);
  ball["iterations"] = c.enclosing_ball.iterations;
  j["enclosing_ball"] = std::move(ball);
  j["r0"] = json_number(c.r0_value);
  j["a2_satisfied"] = c.a2_satisfied;
  j["collinear"] = c.collinear;
  j["theorem_clause"] = to_string(c.theorem_clause);
  j["existence"] = c.existence_guaranteed ? "guaranteed" : "not_certified";
  j["uniqueness"] = c.uniqueness_guaranteed ? "guaranteed" : "not_certified";
  j["reason"] = c.reason;
  ordered_json probe;
  probe["center"] = json_point(c.probe_center);
  probe["radius"] = json_number(c.probe_radius);
  probe["n_starts"] = c.probe_runs.runs.size();
  probe["n_converged"] = c.probe_runs.n_converged;
  probe["cluster_count"] = c.probe.cluster_count;
  probe["max_intercluster_distance"] =
      json_number(c.probe.max_intercluster_distance);
  probe["min_second_derivative_seen"] =
      json_number(c.probe.min_second_derivative_seen);
  ordered_json clusters = ordered_json::array();
  for (const Cluster& cl : c.probe_runs.clusters) {
    ordered_json e;
    e["representative"] = json_point(cl.representative);
    e["value"] = json_number(cl.value);
    e["size"] = cl.size;
    clusters.push_back(std::move(e));
  }
  probe["clusters"] = std::move(clusters);
  j["probe"] = std::move(probe);
  return j;
}

}  // namespace rmest::io
