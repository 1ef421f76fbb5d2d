// Checkable certificates for existence/uniqueness of the M-estimator:
// the (A2) support-radius condition with its r0 bound, an approximate
// geodesic 1-center as the ball witness, collinearity detection, the
// theorem-clause resolution, Hessian-comparison spot checks, and canonical
// counterexample samples that defeat the hypotheses.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rmest/errors.hpp"
#include "rmest/geometry.hpp"
#include "rmest/losses.hpp"
#include "rmest/objective.hpp"
#include "rmest/rng.hpp"
#include "rmest/solver.hpp"
#include "rmest/vec.hpp"

namespace rmest {

/// Uniqueness radius of Theorem 3: the support of the sample must lie in an
/// open ball of radius r0 around some p0.  With Delta the curvature upper
/// bound, r0 = (1/2) min{pi/(2 sqrt(Delta)), r_inj} for C2 losses and
/// (1/2) min{pi/sqrt(Delta), r_inj} for C3 losses, reading pi/sqrt(Delta)
/// as +infinity when Delta <= 0.
inline double r0(const ManifoldSpace& space, ConditionClass loss_class) {
  if (loss_class == ConditionClass::C1only)
    throw UnsupportedLossError(
        "no uniqueness radius for a C1-only loss: Theorem 3 requires C2 or "
        "C3");
  const double delta = space.curvature_upper_bound();
  double curv = std::numeric_limits<double>::infinity();
  if (delta > 0.0) {
    curv = 3.14159265358979323846 / std::sqrt(delta);
    if (loss_class == ConditionClass::C2) curv *= 0.5;
  }
  return 0.5 * std::min(curv, space.injectivity_radius());
}

// ---------------------------------------------------------------------------
// Approximate minimal enclosing ball (geodesic 1-center)
// ---------------------------------------------------------------------------

struct BallEstimate {
  Point center;
  double radius = 0.0;
  int iterations = 0;
};

namespace detail {

inline double covering_radius(const ManifoldSpace& space,
                              const WeightedSample& sample, const Point& c) {
  double r = 0.0;
  for (const Point& x : sample.points) r = std::max(r, space.dist(c, x));
  return r;
}

}  // namespace detail

/// Iterated farthest-point stepping (the Badoiu-Clarkson scheme on
/// geodesics): center <- geodesic_point(center, farthest, 1/(k+1)).  The
/// returned radius is the exact covering radius of the best center seen, so
/// the covering invariant holds by construction; the iteration budget is
/// sized so the radius is within (1+tol) of optimal on ball-coverable data.
inline BallEstimate minimal_enclosing_ball(const ManifoldSpace& space,
                                           const WeightedSample& sample,
                                           double tol = 1e-3) {
  if (!(tol > 0.0)) throw ValidationError("enclosing-ball tol must be > 0");
  const double r_inj = space.injectivity_radius();
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = i + 1; j < sample.size(); ++j)
      if (space.dist(sample.points[i], sample.points[j]) >= r_inj - 1e-9)
        throw NotCoverableError(
            "sample diameter reaches the injectivity radius (points " +
            std::to_string(i) + " and " + std::to_string(j) +
            "); no enclosing ball exists");

  Point center = sample.points[0];
  double best_r = detail::covering_radius(space, sample, center);
  Point best_c = center;
  int done = 0;
  if (best_r > 0.0) {
    const int budget = static_cast<int>(std::ceil(4.0 / tol));
    for (int k = 1; k <= budget; ++k) {
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t i = 0; i < sample.size(); ++i) {
        const double d = space.dist(center, sample.points[i]);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      try {
        center = space.geodesic_point(center, sample.points[far],
                                      1.0 / (k + 1.0));
      } catch (const GeodesicDomainError&) {
        break;  // center drifted antipodal to a point; keep the best cover
      }
      done = k;
      const double r = detail::covering_radius(space, sample, center);
      if (r < best_r) {
        best_r = r;
        best_c = center;
      }
    }
  }
  return BallEstimate{std::move(best_c), best_r, done};
}

// ---------------------------------------------------------------------------
// Collinearity
// ---------------------------------------------------------------------------

struct CollinearityReport {
  bool collinear;
  std::size_t witness_index;  // most off-geodesic point
  double witness_distance;
};

namespace detail {

// Nearest point, on the complete geodesic through a and b, to x.  Works by
// projecting onto the 2-plane (through the origin for the embedded models)
// that carries the geodesic and renormalizing back to the manifold.
inline Point nearest_on_geodesic(const ManifoldSpace& space, const Point& a,
                                 const Point& b, const Point& x) {
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      std::vector<double> u = vec::sub(b.coords, a.coords);
      const double un = vec::norm(u);
      for (double& c : u) c /= un;
      const std::vector<double> xa = vec::sub(x.coords, a.coords);
      const double t = vec::dot(xa, u);
      std::vector<double> nearest = a.coords;
      vec::axpy(nearest, t, u);
      return space.make_point(std::move(nearest));
    }
    case SpaceKind::sphere: {
      const double R = space.scale();
      std::vector<double> e0 = vec::scale(a.coords, 1.0 / R);
      std::vector<double> w = b.coords;
      vec::axpy(w, -vec::dot(b.coords, e0), e0);
      const double wn = vec::norm(w);
      std::vector<double> proj = vec::scale(e0, vec::dot(x.coords, e0));
      if (wn > 1e-12 * R) {
        const std::vector<double> e1 = vec::scale(w, 1.0 / wn);
        vec::axpy(proj, vec::dot(x.coords, e1), e1);
      }
      const double pn = vec::norm(proj);
      if (pn <= 1e-12 * R) {
        // x is metrically orthogonal to the great circle: every point of it
        // is nearest; return the one under a, a quarter turn away.
        return a;
      }
      return space.make_point(vec::scale(proj, R / pn));
    }
    default: {  // hyperbolic
      const double kappa = space.scale();
      const double rt = std::sqrt(kappa);
      std::vector<double> e0 = vec::scale(a.coords, rt);  // <e0,e0>_L = -1
      std::vector<double> w = b.coords;
      vec::axpy(w, detail::minkowski_dot(b.coords, e0), e0);
      const double wn2 = detail::minkowski_dot(w, w);  // spacelike: > 0
      std::vector<double> proj =
          vec::scale(e0, -detail::minkowski_dot(x.coords, e0));
      if (wn2 > 1e-24) {
        const std::vector<double> e1 = vec::scale(w, 1.0 / std::sqrt(wn2));
        vec::axpy(proj, detail::minkowski_dot(x.coords, e1), e1);
      }
      const double q2 = -detail::minkowski_dot(proj, proj);
      std::vector<double> nearest =
          vec::scale(proj, 1.0 / std::sqrt(kappa * q2));
      if (nearest[0] < 0.0) nearest = vec::scale(nearest, -1.0);
      return space.make_point(std::move(nearest));
    }
  }
}

}  // namespace detail

/// True iff every sample point lies within tol of the complete geodesic
/// through the two farthest-apart points.  One- and two-point samples are
/// trivially collinear.
inline CollinearityReport check_collinearity(const ManifoldSpace& space,
                                             const WeightedSample& sample,
                                             double tol = 1e-8) {
  if (!(tol > 0.0)) throw ValidationError("collinearity tol must be > 0");
  const std::size_t n = sample.size();
  if (n <= 2) return CollinearityReport{true, 0, 0.0};

  std::size_t ia = 0, ib = 0;
  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = space.dist(sample.points[i], sample.points[j]);
      if (d > diam) {
        diam = d;
        ia = i;
        ib = j;
      }
    }
  if (diam >= space.injectivity_radius() - 1e-9)
    throw GeodesicDomainError(
        "farthest sample pair lies at or beyond the cut locus; the spanning "
        "geodesic is not unique");
  if (diam <= tol) return CollinearityReport{true, 0, 0.0};

  const Point& a = sample.points[ia];
  const Point& b = sample.points[ib];
  std::size_t worst = 0;
  double worst_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point nearest =
        detail::nearest_on_geodesic(space, a, b, sample.points[i]);
    const double off = space.dist(sample.points[i], nearest);
    if (off > worst_d) {
      worst_d = off;
      worst = i;
    }
  }
  return CollinearityReport{worst_d <= tol, worst, worst_d};
}

// ---------------------------------------------------------------------------
// Hessian comparison spot check
// ---------------------------------------------------------------------------

struct HessianComparison {
  double lhs;  // second difference of arclength s -> d(x, gamma(s))
  double rhs;  // (sn_Delta'/sn_Delta)(d) * sin^2(alpha)
  bool ok;     // lhs >= rhs - 1e-5
};

/// Checks d''(x, gamma(s)) >= (sn'/sn)(d) sin^2(alpha) at the point gamma(t)
/// of the geodesic from p to q, with gamma reparametrized by arclength so
/// the comparison constant-free form applies.  Returns nullopt (skipped)
/// when x is too close to gamma(t) for the stencil to be accurate, when the
/// distance leaves the comparison's validity cap for Delta > 0, or when a
/// stencil evaluation crosses the cut locus.
inline std::optional<HessianComparison> hessian_comparison_check(
    const ManifoldSpace& space, const Point& x, const Point& p, const Point& q,
    double t) {
  const double L = space.dist(p, q);
  if (L <= 0.0) return std::nullopt;
  const double hs = 1e-4;       // arclength step
  const double dt = hs / L;

  try {
    const Point gt = space.geodesic_point(p, q, t);
    const double d0 = space.dist(x, gt);
    // Validity floor: the fourth derivative of s -> d(x, gamma(s)) grows
    // like 1/d^3 as x approaches the geodesic, so the hs^2 truncation error
    // of the stencil stays below ~7e-7 only for d0 >= 0.15.
    if (d0 < 0.15) return std::nullopt;
    const double delta = space.curvature_upper_bound();
    if (delta > 0.0) {
      const double cap = 0.5 * 3.14159265358979323846 / std::sqrt(delta);
      if (d0 >= cap - 1e-8) return std::nullopt;  // outside validity cap
    }
    if (d0 >= space.injectivity_radius() - 1e-6) return std::nullopt;

    const double dm = space.dist(x, space.geodesic_point(p, q, t - dt));
    const double dp = space.dist(x, space.geodesic_point(p, q, t + dt));
    const double lhs = (dm - 2.0 * d0 + dp) / (hs * hs);

    // alpha: angle at gamma(t) between the geodesic's direction and the
    // minimal geodesic to x.
    TangentVector dir = space.log(gt, q);
    double dn = space.tangent_norm(dir);
    if (dn <= 1e-12) {
      dir = space.log(gt, p);
      dn = space.tangent_norm(dir);
      if (dn <= 1e-12) return std::nullopt;
    }
    const TangentVector to_x = space.log(gt, x);
    double ca = space.inner(gt, dir.components, to_x.components) / (dn * d0);
    ca = std::clamp(ca, -1.0, 1.0);
    const double sin2 = std::max(0.0, 1.0 - ca * ca);
    const double rhs = sn_delta_prime(d0, delta) / sn_delta(d0, delta) * sin2;
    return HessianComparison{lhs, rhs, lhs >= rhs - 1e-5};
  } catch (const GeodesicDomainError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Counterexamples
// ---------------------------------------------------------------------------

enum class CounterexampleKind { antipodal_pair, collinear_median, equator_mass };

inline const char* to_string(CounterexampleKind k) {
  switch (k) {
    case CounterexampleKind::antipodal_pair: return "antipodal_pair";
    case CounterexampleKind::collinear_median: return "collinear_median";
    default: return "equator_mass";
  }
}

inline CounterexampleKind parse_counterexample_kind(std::string_view name) {
  if (name == "antipodal_pair") return CounterexampleKind::antipodal_pair;
  if (name == "collinear_median") return CounterexampleKind::collinear_median;
  if (name == "equator_mass") return CounterexampleKind::equator_mass;
  throw ValidationError("unknown counterexample kind '" + std::string(name) +
                        "'");
}

/// Canonical samples that defeat the uniqueness hypotheses: an antipodal
/// pair (violates A2 outright), an even number of distinct points on one
/// geodesic (defeats Thm 3(a) with the absolute loss: the whole median
/// segment minimizes), and m equally spaced equator points (both poles
/// minimize by symmetry).  The spherical kinds require a sphere.
inline WeightedSample counterexample(const ManifoldSpace& space,
                                     CounterexampleKind kind, int m = 4) {
  switch (kind) {
    case CounterexampleKind::antipodal_pair: {
      if (space.kind() != SpaceKind::sphere)
        throw ValidationError("antipodal_pair requires a sphere");
      const Point x = space.base_point();
      Point y = x;
      for (double& c : y.coords) c = -c;
      return make_sample(space, {x, space.make_point(y.coords)});
    }
    case CounterexampleKind::collinear_median: {
      const Point p = space.base_point();
      const std::vector<TangentVector> basis = space.tangent_basis(p);
      const Point q = space.exp(p, basis[0].components);
      return make_sample(space, {p, q});
    }
    default: {  // equator_mass
      if (space.kind() != SpaceKind::sphere)
        throw ValidationError("equator_mass requires a sphere");
      if (m < 3)
        throw ValidationError("equator_mass needs at least 3 points");
      if (space.dim() < 2)
        throw ValidationError("equator_mass needs a sphere of dimension >= 2");
      const double R = space.scale();
      std::vector<Point> pts;
      const double two_pi = 2.0 * 3.14159265358979323846;
      for (int j = 0; j < m; ++j) {
        std::vector<double> c(
            static_cast<std::size_t>(space.ambient_dim()), 0.0);
        c[0] = R * std::cos(two_pi * j / m);
        c[1] = R * std::sin(two_pi * j / m);
        pts.push_back(space.make_point(std::move(c)));
      }
      return make_sample(space, pts);
    }
  }
}

// ---------------------------------------------------------------------------
// Certificate composition
// ---------------------------------------------------------------------------

enum class TheoremClause { thm3a, thm3b, none };

inline const char* to_string(TheoremClause c) {
  switch (c) {
    case TheoremClause::thm3a: return "Thm3a";
    case TheoremClause::thm3b: return "Thm3b";
    default: return "none";
  }
}

struct ProbeParams {
  int n_starts = 50;
  int n_second_derivative_probes = 64;
  std::uint64_t seed = 0;
  SolverParams solver;
};

struct ProbeSummary {
  int cluster_count = 0;
  double max_intercluster_distance = 0.0;
  double min_second_derivative_seen =
      std::numeric_limits<double>::infinity();  // +inf if every probe skipped
};

struct Certificate {
  ConditionClass loss_class = ConditionClass::C1only;
  BallEstimate enclosing_ball;
  double r0_value = std::numeric_limits<double>::quiet_NaN();
  bool a2_satisfied = false;
  bool collinear = false;
  TheoremClause theorem_clause = TheoremClause::none;
  bool existence_guaranteed = true;  // Corollary 1: finite samples always
  bool uniqueness_guaranteed = false;
  std::string reason;  // why uniqueness is not certified; empty otherwise
  ProbeSummary probe;
  MultiStartResult probe_runs;
  Point probe_center;
  double probe_radius = 0.0;
};

/// Composes classification, r0, the enclosing-ball witness and the
/// collinearity check into the uniqueness verdict of Theorem 3, and always
/// attaches an empirical multi-start probe.  Never claims uniqueness outside
/// the theorem's hypotheses; a failed component downgrades the verdict to
/// not-certified with the failure as the reason.
inline Certificate build_certificate(const ManifoldSpace& space,
                                     const WeightedSample& sample,
                                     const LossFunction& loss,
                                     const ProbeParams& params = {}) {
  Certificate cert;
  std::vector<std::string> reasons;

  const ClassifyReport rep = classify(loss);
  cert.loss_class = rep.verified;
  switch (cert.loss_class) {
    case ConditionClass::C3: cert.theorem_clause = TheoremClause::thm3b; break;
    case ConditionClass::C2: cert.theorem_clause = TheoremClause::thm3a; break;
    default:
      cert.theorem_clause = TheoremClause::none;
      reasons.push_back("loss " + loss.spec_string() +
                        " is C1-only: Theorem 3 has no uniqueness clause");
  }
  if (cert.loss_class != ConditionClass::C1only)
    cert.r0_value = r0(space, cert.loss_class);

  bool ball_ok = true;
  try {
    cert.enclosing_ball = minimal_enclosing_ball(space, sample);
  } catch (const NotCoverableError& e) {
    ball_ok = false;
    cert.enclosing_ball = BallEstimate{
        sample.points[0], std::numeric_limits<double>::infinity(), 0};
    reasons.push_back(e.what());
  }

  // (A2) demands an *open* ball of radius r0; insist on strict inequality
  // with margin so a radius equal to r0 up to rounding never certifies.
  cert.a2_satisfied = cert.enclosing_ball.radius < cert.r0_value - 1e-12;
  if (!cert.a2_satisfied && ball_ok &&
      cert.loss_class != ConditionClass::C1only)
    reasons.push_back("support ball radius " +
                      std::to_string(cert.enclosing_ball.radius) +
                      " is not strictly inside r0");

  try {
    cert.collinear = check_collinearity(space, sample).collinear;
  } catch (const GeodesicDomainError& e) {
    cert.collinear = true;  // conservative: blocks the Thm3a route only
    reasons.push_back(std::string("collinearity check failed: ") + e.what());
  }
  if (cert.theorem_clause == TheoremClause::thm3a && cert.collinear &&
      cert.a2_satisfied)
    reasons.push_back(
        "sample is collinear: Theorem 3(a) requires non-collinear support");

  cert.uniqueness_guaranteed =
      (cert.theorem_clause == TheoremClause::thm3b && cert.a2_satisfied) ||
      (cert.theorem_clause == TheoremClause::thm3a && cert.a2_satisfied &&
       !cert.collinear);
  if (!cert.uniqueness_guaranteed)
    for (const std::string& r : reasons)
      cert.reason += (cert.reason.empty() ? "" : "; ") + r;

  // Empirical probe: multi-start clustering plus second-derivative spot
  // checks along random geodesics of the probe region.
  cert.probe_center =
      ball_ok ? cert.enclosing_ball.center : sample.points[0];
  double pr = ball_ok ? std::max(2.0 * cert.enclosing_ball.radius, 0.1)
                      : std::numeric_limits<double>::infinity();
  if (std::isfinite(space.injectivity_radius()))
    pr = std::min(pr, 0.45 * space.injectivity_radius());
  cert.probe_radius = pr;

  SolverParams sp = params.solver;
  sp.seed = rng::stream_seed(params.seed, "probe_starts");
  cert.probe_runs = multi_start(space, sample, loss, cert.probe_center, pr,
                                params.n_starts, sp);
  cert.probe.cluster_count =
      static_cast<int>(cert.probe_runs.clusters.size());
  for (std::size_t i = 0; i < cert.probe_runs.clusters.size(); ++i)
    for (std::size_t j = i + 1; j < cert.probe_runs.clusters.size(); ++j)
      cert.probe.max_intercluster_distance = std::max(
          cert.probe.max_intercluster_distance,
          space.dist(cert.probe_runs.clusters[i].representative,
                     cert.probe_runs.clusters[j].representative));

  // Confine convexity probes to the certified ball when there is one: that
  // is where the theorem speaks.  (On positively curved spaces, negative
  // values outside the pi/(2 sqrt(Delta)) cap are genuine and expected.)
  double probe_ball = pr;
  if (std::isfinite(cert.r0_value))
    probe_ball = std::min(probe_ball, cert.r0_value);
  std::mt19937_64 pg = rng::make_engine(params.seed, "probe_pairs");
  for (int i = 0; i < params.n_second_derivative_probes; ++i) {
    const Point a =
        space.random_point_in_ball(cert.probe_center, probe_ball, pg);
    const Point b =
        space.random_point_in_ball(cert.probe_center, probe_ball, pg);
    const double t = rng::uniform(pg, 0.1, 0.9);
    const std::optional<double> d2 =
        second_derivative_along(space, sample, loss, a, b, t);
    if (d2 && *d2 < cert.probe.min_second_derivative_seen)
      cert.probe.min_second_derivative_seen = *d2;
  }
  return cert;
}

}  // namespace rmest
