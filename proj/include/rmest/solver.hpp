// Minimization of the empirical objective: Riemannian gradient descent with
// Armijo backtracking (primary, works for every loss), Weiszfeld-type IRLS
// (convex losses only, much faster on them), and a multi-start driver that
// clusters converged minimizers -- the empirical uniqueness probe.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rmest/errors.hpp"
#include "rmest/geometry.hpp"
#include "rmest/losses.hpp"
#include "rmest/objective.hpp"
#include "rmest/rng.hpp"
#include "rmest/vec.hpp"

namespace rmest {

struct SolverParams {
  int max_iters = 500;
  double grad_tol = 1e-9;
  double step_tol = 1e-12;
  double armijo_c = 1e-4;       // sufficient-decrease constant, in (0,1)
  double backtrack_factor = 0.5;  // step shrink per rejected trial, in (0,1)
  double initial_step = 1.0;
  double irls_damping = 1.0;    // fixed-point step scaling, in (0,1]
  std::uint64_t seed = 0;
};

inline void validate(const SolverParams& p) {
  if (p.max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (!(p.grad_tol > 0.0)) throw ValidationError("grad_tol must be > 0");
  if (!(p.step_tol > 0.0)) throw ValidationError("step_tol must be > 0");
  if (!(p.armijo_c > 0.0 && p.armijo_c < 1.0))
    throw ValidationError("armijo_c must lie in (0,1)");
  if (!(p.backtrack_factor > 0.0 && p.backtrack_factor < 1.0))
    throw ValidationError("backtrack_factor must lie in (0,1)");
  if (!(p.initial_step > 0.0))
    throw ValidationError("initial_step must be > 0");
  if (!(p.irls_damping > 0.0 && p.irls_damping <= 1.0))
    throw ValidationError("irls_damping must lie in (0,1]");
}

enum class SolveStatus { converged, max_iters, stalled };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    default: return "stalled";
  }
}

struct TraceEntry {
  int iter;
  double value;
  double grad_norm;
  double step;  // geodesic length of the accepted step (0 for the start)
};

struct EstimateResult {
  Point minimizer;
  double value = 0.0;
  double grad_norm = 0.0;
  int iters = 0;
  SolveStatus status = SolveStatus::stalled;
  std::vector<TraceEntry> trace;
};

namespace detail {

constexpr int kMaxHalvings = 60;

// Largest tangent-vector norm a single exp step may use; keeps iterates
// well inside the injectivity domain on spheres.
inline double step_cap(const ManifoldSpace& space) {
  return 0.49 * space.injectivity_radius();
}

// Smallest objective decrease that double arithmetic can still certify at
// level f.  Below this, risk differences are rounding noise and descent has
// to be arbitrated by the gradient norm instead.
inline double resolution_gate(double f) {
  return 32.0 * std::numeric_limits<double>::epsilon() *
         std::max(1.0, std::abs(f));
}

}  // namespace detail

/// Riemannian gradient descent with Armijo backtracking on the risk.
/// Accepted steps decrease F by at least armijo_c * alpha * |grad|^2;
/// 60 consecutive rejected halvings end the run with status=stalled.
inline EstimateResult minimize_rgd(const ManifoldSpace& space,
                                   const WeightedSample& sample,
                                   const LossFunction& loss, const Point& init,
                                   const SolverParams& params = {}) {
  validate(params);
  if (static_cast<int>(init.coords.size()) != space.ambient_dim() ||
      space.representation_residual(init.coords) > 1e-9)
    throw ValidationError("initial point is not a valid point of the space");

  EstimateResult res;
  Point m = init;
  ObjectiveValue obj = risk_with_gradient(space, sample, loss, m);
  res.trace.push_back({0, obj.value, obj.grad_norm, 0.0});

  int k = 0;
  while (true) {
    if (obj.grad_norm <= params.grad_tol) {
      res.status = SolveStatus::converged;
      break;
    }
    if (k >= params.max_iters) {
      res.status = SolveStatus::max_iters;
      break;
    }

    double alpha = params.initial_step;
    const double cap = detail::step_cap(space);
    if (std::isfinite(cap) && alpha * obj.grad_norm > cap)
      alpha = cap / obj.grad_norm;

    const double gate = detail::resolution_gate(obj.value);
    bool accepted = false;
    bool refine = false;  // only after a sufficient-decrease acceptance
    Point cand = m;
    ObjectiveValue cand_obj = obj;
    double cand_f = obj.value;
    for (int halving = 0; halving < detail::kMaxHalvings; ++halving) {
      try {
        const Point trial =
            space.exp(m, vec::scale(obj.grad.components, -alpha));
        const double f_new = risk(space, sample, loss, trial);
        const double required =
            params.armijo_c * alpha * obj.grad_norm * obj.grad_norm;
        if (required >= gate) {
          // Armijo sufficient decrease, certifiable at double resolution.
          if (f_new <= obj.value - required) {
            cand = trial;
            cand_f = f_new;
            accepted = refine = true;
            break;
          }
        } else if (f_new <= obj.value + gate) {
          // The decrease Armijo would demand is beneath the rounding noise
          // of F, so risk comparisons cannot arbitrate (a full step whose
          // true decrease is sub-ulp may round one ulp high).  Accept on
          // genuine gradient contraction instead.
          ObjectiveValue trial_obj = risk_with_gradient(space, sample, loss, trial);
          if (trial_obj.grad_norm <= 0.999 * obj.grad_norm) {
            cand = trial;
            cand_f = f_new;
            cand_obj = std::move(trial_obj);
            accepted = true;
            break;
          }
        }
      } catch (const GeodesicDomainError&) {
        // candidate walked too close to a cut locus; shrink and retry
      }
      alpha *= params.backtrack_factor;
    }
    if (!accepted) {
      res.status = SolveStatus::stalled;
      break;
    }
    if (refine) {
      // Greedy step refinement: with a loose Armijo constant the first
      // accepted step can badly overshoot (a near-reflection that barely
      // decreases F and zig-zags).  Keep halving while this strictly
      // improves the risk, which lands within a factor of the ideal step.
      for (int extra = 0; extra < detail::kMaxHalvings; ++extra) {
        const double alpha2 = alpha * params.backtrack_factor;
        try {
          const Point trial =
              space.exp(m, vec::scale(obj.grad.components, -alpha2));
          const double f2 = risk(space, sample, loss, trial);
          if (f2 < cand_f) {
            alpha = alpha2;
            cand = trial;
            cand_f = f2;
            continue;
          }
        } catch (const GeodesicDomainError&) {
        }
        break;
      }
      cand_obj = risk_with_gradient(space, sample, loss, cand);
    }
    const double step_len = alpha * obj.grad_norm;

    m = cand;
    // Sub-resolution acceptances may carry a one-ulp-high risk reading;
    // clamping keeps the reported trace exactly non-increasing.
    cand_obj.value = std::min(cand_obj.value, obj.value);
    obj = std::move(cand_obj);
    ++k;
    res.trace.push_back({k, obj.value, obj.grad_norm, step_len});

    if (step_len <= params.step_tol) {
      res.status = obj.grad_norm <= params.grad_tol ? SolveStatus::converged
                                                    : SolveStatus::stalled;
      break;
    }
  }

  res.minimizer = std::move(m);
  res.value = obj.value;
  res.grad_norm = obj.grad_norm;
  res.iters = k;
  return res;
}

/// Weiszfeld-type IRLS: the stationarity condition rewritten as a weighted
/// tangent mean, m <- exp_m( sum_i w_i W(d_i) Log_m(x_i) / sum_i w_i W(d_i) ),
/// W = rho'/t.  Requires a convex (C2/C3) loss; redescending weights may
/// vanish globally and are rejected.  Steps that fail to descend are halved
/// (safeguard), so the same monotone-trace contract holds as for RGD.
inline EstimateResult minimize_irls(const ManifoldSpace& space,
                                    const WeightedSample& sample,
                                    const LossFunction& loss, const Point& init,
                                    const SolverParams& params = {}) {
  validate(params);
  if (loss.declared_class() == ConditionClass::C1only)
    throw UnsupportedLossError(
        "IRLS requires a C2 or C3 loss; " + loss.spec_string() +
        " is redescending and its weights may vanish globally");
  if (static_cast<int>(init.coords.size()) != space.ambient_dim() ||
      space.representation_residual(init.coords) > 1e-9)
    throw ValidationError("initial point is not a valid point of the space");

  EstimateResult res;
  Point m = init;
  ObjectiveValue obj = risk_with_gradient(space, sample, loss, m);
  res.trace.push_back({0, obj.value, obj.grad_norm, 0.0});

  const std::size_t n = sample.size();
  const std::size_t a = static_cast<std::size_t>(space.ambient_dim());
  int k = 0;
  while (true) {
    if (obj.grad_norm <= params.grad_tol) {
      res.status = SolveStatus::converged;
      break;
    }
    if (k >= params.max_iters) {
      res.status = SolveStatus::max_iters;
      break;
    }

    const std::vector<double> ds = sample_distances(space, sample, m);
    std::vector<double> omega(n, 0.0);
    std::vector<std::vector<double>> logs(n);
    std::size_t n_excluded = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ds[i] <= detail::kAtomTol) {
        const double w0 = loss.weight(0.0);
        if (!std::isfinite(w0)) {
          ++n_excluded;  // Weiszfeld exclusion of the atom
          continue;
        }
        omega[i] = sample.weights[i] * w0;  // zero Log; denominator only
        continue;
      }
      omega[i] = sample.weights[i] * loss.weight(ds[i]);
      logs[i] = space.log(m, sample.points[i]).components;
    }
    const double denom = vec::pairwise_sum(omega);
    if (!(denom > 0.0)) {
      if (n_excluded == n) {
        // Entire mass sits at m: it is the exact minimizer (F = 0).
        res.status = SolveStatus::converged;
        break;
      }
      throw DegenerateWeightsError(
          "all IRLS weights vanished at the current iterate");
    }

    std::vector<double> v(a, 0.0);
    std::vector<double> terms(n);
    for (std::size_t j = 0; j < a; ++j) {
      for (std::size_t i = 0; i < n; ++i)
        terms[i] = logs[i].empty() ? 0.0 : omega[i] * logs[i][j];
      v[j] = vec::pairwise_sum(terms);
    }
    double scale = params.irls_damping / denom;
    double vn = std::sqrt(std::max(0.0, space.inner(m, v, v))) * scale;
    const double cap = detail::step_cap(space);
    if (std::isfinite(cap) && vn > cap) {
      scale *= cap / vn;
      vn = cap;
    }

    const double gate = detail::resolution_gate(obj.value);
    bool accepted = false;
    Point cand = m;
    ObjectiveValue cand_obj = obj;
    double step_len = 0.0;
    for (int halving = 0; halving < detail::kMaxHalvings; ++halving) {
      try {
        const Point trial = space.exp(m, vec::scale(v, scale));
        const double f_new = risk(space, sample, loss, trial);
        if (f_new <= obj.value - gate) {
          cand = trial;
          cand_obj = risk_with_gradient(space, sample, loss, trial);
          step_len = vn;
          accepted = true;
          break;
        }
        if (f_new <= obj.value + gate) {
          // Decrease is below F's rounding resolution (see minimize_rgd);
          // require genuine gradient contraction instead.
          ObjectiveValue trial_obj = risk_with_gradient(space, sample, loss, trial);
          if (trial_obj.grad_norm <= 0.999 * obj.grad_norm) {
            cand = trial;
            cand_obj = std::move(trial_obj);
            step_len = vn;
            accepted = true;
            break;
          }
        }
      } catch (const GeodesicDomainError&) {
      }
      scale *= 0.5;
      vn *= 0.5;
    }
    if (!accepted) {
      res.status = SolveStatus::stalled;
      break;
    }

    m = cand;
    cand_obj.value = std::min(cand_obj.value, obj.value);  // see minimize_rgd
    obj = std::move(cand_obj);
    ++k;
    res.trace.push_back({k, obj.value, obj.grad_norm, step_len});

    if (step_len <= params.step_tol) {
      res.status = obj.grad_norm <= params.grad_tol ? SolveStatus::converged
                                                    : SolveStatus::stalled;
      break;
    }
  }

  res.minimizer = std::move(m);
  res.value = obj.value;
  res.grad_norm = obj.grad_norm;
  res.iters = k;
  return res;
}

// ---------------------------------------------------------------------------
// Multi-start uniqueness probing
// ---------------------------------------------------------------------------

struct RunRecord {
  EstimateResult result;   // meaningful only when error is empty
  std::string error;       // captured exception message, empty on success
  bool from_data_point = false;
};

struct Cluster {
  int representative_run;  // run index of the best member
  Point representative;
  double value;            // best objective value in the cluster
  int size;                // number of converged runs in the cluster
};

struct MultiStartResult {
  std::vector<RunRecord> runs;      // n_starts random starts, then data points
  std::vector<Cluster> clusters;    // sorted by value, then run index
  int n_converged = 0;
};

/// Runs minimize_rgd from n_starts random points of B_radius(center) plus
/// every data point, then single-linkage clusters the converged minimizers
/// at geodesic threshold 1e-5.  Runs that throw (e.g. a data-point start
/// antipodal to another sample point) are recorded and excluded.
inline MultiStartResult multi_start(const ManifoldSpace& space,
                                    const WeightedSample& sample,
                                    const LossFunction& loss,
                                    const Point& center, double radius,
                                    int n_starts,
                                    const SolverParams& params = {}) {
  validate(params);
  if (n_starts < 1) throw ValidationError("n_starts must be >= 1");
  if (!(radius > 0.0) || radius >= space.injectivity_radius())
    throw ValidationError("multi-start region radius must lie in (0, r_inj)");

  constexpr double kClusterThreshold = 1e-5;

  MultiStartResult out;
  const auto run_from = [&](const Point& init, bool from_data) {
    RunRecord rec;
    rec.from_data_point = from_data;
    try {
      rec.result = minimize_rgd(space, sample, loss, init, params);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    out.runs.push_back(std::move(rec));
  };

  for (int i = 0; i < n_starts; ++i) {
    std::mt19937_64 g = rng::make_engine(params.seed, "starts",
                                         static_cast<std::uint64_t>(i));
    run_from(space.random_point_in_ball(center, radius, g), false);
  }
  for (const Point& x : sample.points) run_from(x, true);

  // Single-linkage clustering of converged minimizers, in run-index order.
  std::vector<std::vector<int>> members;  // run indices per cluster
  for (std::size_t r = 0; r < out.runs.size(); ++r) {
    const RunRecord& rec = out.runs[r];
    if (!rec.error.empty() || rec.result.status != SolveStatus::converged)
      continue;
    ++out.n_converged;
    std::vector<std::size_t> touching;
    for (std::size_t c = 0; c < members.size(); ++c)
      for (int idx : members[c]) {
        if (space.dist(rec.result.minimizer,
                       out.runs[static_cast<std::size_t>(idx)]
                           .result.minimizer) <= kClusterThreshold) {
          touching.push_back(c);
          break;
        }
      }
    if (touching.empty()) {
      members.push_back({static_cast<int>(r)});
    } else {
      // merge all touched clusters into the first
      std::vector<int>& home = members[touching.front()];
      home.push_back(static_cast<int>(r));
      for (std::size_t t = touching.size(); t-- > 1;) {
        std::vector<int>& other = members[touching[t]];
        home.insert(home.end(), other.begin(), other.end());
        members.erase(members.begin() +
                      static_cast<std::ptrdiff_t>(touching[t]));
      }
    }
  }

  for (const std::vector<int>& ms : members) {
    Cluster c;
    c.size = static_cast<int>(ms.size());
    c.representative_run = -1;
    c.value = std::numeric_limits<double>::infinity();
    for (int idx : ms) {
      const EstimateResult& er = out.runs[static_cast<std::size_t>(idx)].result;
      if (er.value < c.value ||
          (er.value == c.value && idx < c.representative_run)) {
        c.value = er.value;
        c.representative_run = idx;
        c.representative = er.minimizer;
      }
    }
    out.clusters.push_back(std::move(c));
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              if (a.value != b.value) return a.value < b.value;
              return a.representative_run < b.representative_run;
            });
  return out;
}

}  // namespace rmest
