// Command-line front end: estimation runs, standalone certification,
// verification suites, and fixture generation.
//
// Exit codes: 0 success/certified, 1 input error, 2 non-convergence,
// 3 not-certified.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmest/certify.hpp"
#include "rmest/errors.hpp"
#include "rmest/io.hpp"
#include "rmest/solver.hpp"
#include "rmest/verify.hpp"

namespace {

using rmest::io::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitNotCertified = 3;

struct CommonOpts {
  std::string space_spec;
  std::string loss_spec = "lp:p=2";
  std::string in_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int max_iters = 500;
  double grad_tol = 1e-9;
  int starts = 50;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool needs_input) {
  cmd->add_option("--space", o.space_spec,
                  "space spec, e.g. sphere:dim=2,radius=1 (defaults to the "
                  "input file's metadata)");
  cmd->add_option("--loss", o.loss_spec, "loss spec, e.g. huber:c=1.345")
      ->capture_default_str();
  auto* in = cmd->add_option("--in", o.in_path, "input CSV of points");
  if (needs_input) in->required();
  cmd->add_option("--out", o.out_path, "report destination (default stdout)");
  cmd->add_option("--seed", o.seed, "root seed for all randomness")
      ->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "solver iteration budget")
      ->capture_default_str();
  cmd->add_option("--grad-tol", o.grad_tol, "gradient norm tolerance")
      ->capture_default_str();
  cmd->add_option("--starts", o.starts, "random multi-start count")
      ->capture_default_str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw rmest::ValidationError("cannot open output file " + out_path);
  f << text << "\n";
}

/// Space from --space and/or the CSV metadata; they must agree when both
/// are present.
rmest::ManifoldSpace resolve_space(const CommonOpts& o,
                                   const rmest::io::Dataset& ds) {
  if (o.space_spec.empty()) {
    if (ds.space.empty())
      throw rmest::ValidationError(
          "no --space given and the input has no space metadata");
    return rmest::io::parse_space(ds.space);
  }
  const rmest::ManifoldSpace space = rmest::io::parse_space(o.space_spec);
  if (!ds.space.empty()) {
    const rmest::ManifoldSpace meta = rmest::io::parse_space(ds.space);
    if (rmest::io::space_spec(meta) != rmest::io::space_spec(space))
      throw rmest::ValidationError("--space " + rmest::io::space_spec(space) +
                                   " disagrees with input metadata " +
                                   rmest::io::space_spec(meta));
  }
  return space;
}

rmest::io::Dataset load_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw rmest::ValidationError("cannot open input file " + path);
  return rmest::io::read_csv(f);
}

ordered_json config_block(const std::string& command, const CommonOpts& o,
                          const rmest::ManifoldSpace& space) {
  ordered_json j;
  j["command"] = command;
  j["space"] = rmest::io::space_spec(space);
  j["loss"] = o.loss_spec;
  if (!o.in_path.empty()) j["in"] = o.in_path;
  j["seed"] = o.seed;
  j["starts"] = o.starts;
  j["max_iters"] = o.max_iters;
  j["grad_tol"] = rmest::io::json_number(o.grad_tol);
  return j;
}

rmest::ProbeParams probe_params(const CommonOpts& o) {
  rmest::ProbeParams pp;
  pp.n_starts = o.starts;
  pp.seed = o.seed;
  pp.solver.max_iters = o.max_iters;
  pp.solver.grad_tol = o.grad_tol;
  pp.solver.seed = o.seed;
  return pp;
}

int cmd_estimate(const CommonOpts& o) {
  const rmest::io::Dataset ds = load_dataset(o.in_path);
  const rmest::ManifoldSpace space = resolve_space(o, ds);
  const rmest::WeightedSample sample = rmest::io::to_sample(space, ds);
  const rmest::LossFunction loss = rmest::LossFunction::parse(o.loss_spec);

  // One multi-start pass serves both the estimate and the certificate's
  // empirical probe.
  const rmest::Certificate cert =
      rmest::build_certificate(space, sample, loss, probe_params(o));

  const rmest::MultiStartResult& ms = cert.probe_runs;
  const rmest::RunRecord* best = nullptr;
  if (!ms.clusters.empty()) {
    best = &ms.runs[ms.clusters.front().representative_run];
  } else {
    for (const rmest::RunRecord& run : ms.runs)
      if (run.error.empty() &&
          (best == nullptr || run.result.value < best->result.value))
        best = &run;
  }

  ordered_json report;
  report["config"] = config_block("estimate", o, space);
  report["n_points"] = sample.size();
  if (best != nullptr)
    report["estimate"] = rmest::io::report_estimate(best->result);
  report["certificate"] = rmest::io::report_certificate(cert);
  emit(report.dump(2), o.out_path);

  const bool converged =
      best != nullptr && best->result.status == rmest::SolveStatus::converged;
  std::cerr << "estimate: " << (converged ? "converged" : "not converged")
            << ", uniqueness "
            << (cert.uniqueness_guaranteed ? "guaranteed" : "not certified")
            << "\n";
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_check(const CommonOpts& o) {
  const rmest::io::Dataset ds = load_dataset(o.in_path);
  const rmest::ManifoldSpace space = resolve_space(o, ds);
  const rmest::WeightedSample sample = rmest::io::to_sample(space, ds);
  const rmest::LossFunction loss = rmest::LossFunction::parse(o.loss_spec);
  const rmest::Certificate cert =
      rmest::build_certificate(space, sample, loss, probe_params(o));

  ordered_json report;
  report["config"] = config_block("check", o, space);
  report["n_points"] = sample.size();
  report["certificate"] = rmest::io::report_certificate(cert);
  emit(report.dump(2), o.out_path);

  std::cerr << "check: uniqueness "
            << (cert.uniqueness_guaranteed ? "guaranteed" : "not certified");
  if (!cert.reason.empty()) std::cerr << " (" << cert.reason << ")";
  std::cerr << "\n";
  return cert.uniqueness_guaranteed ? kExitOk : kExitNotCertified;
}

int cmd_verify(const CommonOpts& o, const std::string& suites_csv) {
  std::vector<std::string> names;
  if (suites_csv.empty()) {
    names = rmest::verify::VerifySession::suite_names();
  } else {
    std::stringstream ss(suites_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto& known = rmest::verify::VerifySession::suite_names();
      if (std::find(known.begin(), known.end(), item) == known.end())
        throw rmest::ValidationError("unknown verification suite '" + item +
                                     "'");
      names.push_back(item);
    }
    if (names.empty())
      throw rmest::ValidationError("--suite given but no suite names parsed");
  }

  rmest::verify::VerifySession session({o.seed});
  ordered_json report;
  report["command"] = "verify";
  report["seed"] = o.seed;
  ordered_json suites = ordered_json::array();
  bool all_passed = true;
  for (const std::string& name : names) {
    const rmest::verify::SuiteResult r = session.run_suite(name);
    ordered_json e;
    e["name"] = r.name;
    e["passed"] = r.passed;
    e["trials"] = r.trials;
    e["worst_margin"] = rmest::io::json_number(r.worst_margin);
    e["detail"] = r.detail;
    suites.push_back(std::move(e));
    all_passed = all_passed && r.passed;
    std::cerr << (r.passed ? "PASS " : "FAIL ") << name << ": " << r.detail
              << "\n";
  }
  report["suites"] = std::move(suites);
  report["all_passed"] = all_passed;
  emit(report.dump(2), o.out_path);
  return all_passed ? kExitOk : kExitNotConverged;
}

int cmd_gen(const CommonOpts& o, const std::string& kind, int n,
            double radius) {
  if (o.space_spec.empty())
    throw rmest::ValidationError("gen requires --space");
  const rmest::ManifoldSpace space = rmest::io::parse_space(o.space_spec);
  std::vector<rmest::Point> pts;
  if (kind == "cap") {
    std::mt19937_64 g = rmest::rng::make_engine(o.seed, "fixture-cap");
    for (int i = 0; i < n; ++i)
      pts.push_back(
          space.random_point_in_ball(space.base_point(), radius, g));
  } else if (kind == "collinear") {
    std::mt19937_64 g = rmest::rng::make_engine(o.seed, "fixture-collinear");
    const rmest::Point base = space.base_point();
    const std::vector<double> dir = space.tangent_basis(base)[0].components;
    for (int i = 0; i < n; ++i) {
      const double t = rmest::rng::uniform(g, -radius, radius);
      pts.push_back(space.exp(base, rmest::vec::scale(dir, t)));
    }
  } else if (kind == "antipodal") {
    pts = rmest::counterexample(space,
                                rmest::CounterexampleKind::antipodal_pair)
              .points;
  } else if (kind == "equator") {
    pts = rmest::counterexample(
              space, rmest::CounterexampleKind::equator_mass, n)
              .points;
  } else {
    throw rmest::ValidationError("unknown fixture kind '" + kind +
                                 "' (cap, collinear, antipodal, equator)");
  }
  const rmest::WeightedSample sample = rmest::make_sample(space, pts);
  std::ostringstream os;
  rmest::io::write_csv(os, space, sample, /*include_weights=*/false);
  std::string text = os.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  emit(text, o.out_path);
  std::cerr << "gen: " << sample.size() << " points (" << kind << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"M-estimators of location on constant-curvature manifolds"};
  app.require_subcommand(1);

  CommonOpts est_o, chk_o, ver_o, gen_o;
  std::string suites_csv;
  std::string gen_kind = "cap";
  int gen_n = 50;
  double gen_radius = 0.3;

  CLI::App* est = app.add_subcommand(
      "estimate", "minimize the weighted risk and certify the result");
  add_common_flags(est, est_o, true);

  CLI::App* chk = app.add_subcommand(
      "check", "build an existence/uniqueness certificate only");
  add_common_flags(chk, chk_o, true);

  CLI::App* ver =
      app.add_subcommand("verify", "run the built-in property suites");
  add_common_flags(ver, ver_o, false);
  ver->add_option("--suite", suites_csv,
                  "comma-separated subset of suites (default: all)");

  CLI::App* gen = app.add_subcommand("gen", "generate a fixture dataset");
  add_common_flags(gen, gen_o, false);
  gen->add_option("--kind", gen_kind,
                  "cap | collinear | antipodal | equator")
      ->capture_default_str();
  gen->add_option("--n", gen_n, "point count (equator: mass count)")
      ->capture_default_str();
  gen->add_option("--radius", gen_radius, "cap/collinear extent")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return cmd_estimate(est_o);
    if (chk->parsed()) return cmd_check(chk_o);
    if (ver->parsed()) return cmd_verify(ver_o, suites_csv);
    if (gen->parsed()) return cmd_gen(gen_o, gen_kind, gen_n, gen_radius);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
