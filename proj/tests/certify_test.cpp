#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "rmest/certify.hpp"
#include "rmest/errors.hpp"
#include "rmest/geometry.hpp"
#include "rmest/losses.hpp"
#include "rmest/objective.hpp"
#include "rmest/rng.hpp"
#include "rmest/solver.hpp"
#include "rmest/vec.hpp"

using namespace rmest;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQuarterPiSq = 2.4674011002723395;  // (pi/2)^2
const double kInf = std::numeric_limits<double>::infinity();

WeightedSample ball_sample(const ManifoldSpace& s, std::size_t n, double radius,
                           std::mt19937_64& g) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back(s.random_point_in_ball(s.base_point(), radius, g));
  return make_sample(s, pts);
}

// Unit tangent at p orthogonal (in the metric) to the given unit direction.
std::vector<double> orthogonal_unit(const ManifoldSpace& s, const Point& p,
                                    const std::vector<double>& dir) {
  for (const TangentVector& b : s.tangent_basis(p)) {
    std::vector<double> w = b.components;
    vec::axpy(w, -s.inner(p, w, dir), dir);
    const double n = std::sqrt(std::max(0.0, s.inner(p, w, w)));
    if (n > 1e-6) return vec::scale(w, 1.0 / n);
  }
  throw std::runtime_error("no orthogonal direction found");
}

}  // namespace

TEST_CASE("r0 pinned values and monotonicity") {
  const ManifoldSpace s1 = ManifoldSpace::sphere(2);
  CHECK(r0(s1, ConditionClass::C2) == Catch::Approx(kPi / 4.0).epsilon(1e-15));
  CHECK(r0(s1, ConditionClass::C3) == Catch::Approx(kPi / 2.0).epsilon(1e-15));

  const ManifoldSpace s2 = ManifoldSpace::sphere(2, 2.0);  // Delta = 1/4
  CHECK(r0(s2, ConditionClass::C2) == Catch::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(r0(s2, ConditionClass::C3) == Catch::Approx(kPi).epsilon(1e-15));

  for (const ManifoldSpace& s :
       {ManifoldSpace::euclidean(3), ManifoldSpace::hyperbolic(2),
        ManifoldSpace::hyperbolic(3, 2.0)}) {
    CHECK(r0(s, ConditionClass::C2) == kInf);
    CHECK(r0(s, ConditionClass::C3) == kInf);
  }

  for (const ManifoldSpace& s :
       {ManifoldSpace::euclidean(2), ManifoldSpace::sphere(3),
        ManifoldSpace::sphere(2, 0.7), ManifoldSpace::hyperbolic(2)}) {
    CHECK(r0(s, ConditionClass::C3) >= r0(s, ConditionClass::C2));
    CHECK_THROWS_AS(r0(s, ConditionClass::C1only), UnsupportedLossError);
  }
}

TEST_CASE("enclosing ball: pinned euclidean and degenerate cases") {
  const ManifoldSpace s = ManifoldSpace::euclidean(1);
  const WeightedSample two =
      make_sample(s, {s.make_point({0.0}), s.make_point({2.0})});
  const BallEstimate ball = minimal_enclosing_ball(s, two);
  CHECK(std::abs(ball.center.coords[0] - 1.0) < 1e-9);
  CHECK(std::abs(ball.radius - 1.0) < 1e-9);

  const WeightedSample one = make_sample(s, {s.make_point({3.5})});
  const BallEstimate b1 = minimal_enclosing_ball(s, one);
  CHECK(b1.radius == 0.0);
  CHECK(b1.center.coords[0] == 3.5);

  CHECK_THROWS_AS(minimal_enclosing_ball(s, two, 0.0), ValidationError);
}

TEST_CASE("enclosing ball recovers a known spherical circumradius") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const Point q = s.base_point();
  const std::vector<TangentVector> basis = s.tangent_basis(q);
  std::vector<Point> pts;
  for (int j = 0; j < 3; ++j) {
    const double phi = 2.0 * kPi * j / 3.0;
    std::vector<double> v = vec::scale(basis[0].components, 0.3 * std::cos(phi));
    vec::axpy(v, 0.3 * std::sin(phi), basis[1].components);
    pts.push_back(s.exp(q, v));
  }
  const WeightedSample sample = make_sample(s, pts);
  const BallEstimate ball = minimal_enclosing_ball(s, sample);
  CHECK(ball.radius >= 0.3 - 1e-9);          // optimal radius is 0.3
  CHECK(ball.radius <= 0.3 * (1.0 + 1e-3));  // within (1+tol) of optimal
  CHECK(s.dist(ball.center, q) < 2e-3);
}

TEST_CASE("enclosing ball covering invariant on random data") {
  for (const ManifoldSpace& s :
       {ManifoldSpace::euclidean(3), ManifoldSpace::sphere(3),
        ManifoldSpace::hyperbolic(2)}) {
    std::mt19937_64 g = rng::make_engine(5, "meb", s.kind() == SpaceKind::sphere);
    const double radius = std::min(1.3, 0.45 * s.injectivity_radius());
    const WeightedSample sample = ball_sample(s, 15, radius, g);
    const BallEstimate ball = minimal_enclosing_ball(s, sample);
    for (const Point& x : sample.points)
      CHECK(s.dist(ball.center, x) <= ball.radius + 1e-9);
    CHECK(ball.radius <= radius + 1e-9);  // draw center already covers
  }
}

TEST_CASE("enclosing ball refuses antipodal data") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const WeightedSample pair =
      counterexample(s, CounterexampleKind::antipodal_pair);
  CHECK_THROWS_AS(minimal_enclosing_ball(s, pair), NotCoverableError);
}

TEST_CASE("collinearity: spherical equator and a measured perturbation") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const auto eq = [&](double theta) {
    return s.make_point({std::cos(theta), std::sin(theta), 0.0});
  };
  const WeightedSample on = make_sample(s, {eq(0.0), eq(0.6), eq(1.2)});
  const CollinearityReport r1 = check_collinearity(s, on);
  CHECK(r1.collinear);
  CHECK(r1.witness_distance <= 1e-8);

  // Perturb the middle point 0.1 pole-ward: its distance to the equator
  // great circle is exactly 0.1.
  const Point mid = s.exp(eq(0.6), std::vector<double>{0.0, 0.0, 0.1});
  const WeightedSample off = make_sample(s, {eq(0.0), mid, eq(1.2)});
  const CollinearityReport r2 = check_collinearity(s, off);
  CHECK(!r2.collinear);
  CHECK(r2.witness_index == 1);
  CHECK(std::abs(r2.witness_distance - 0.1) < 1e-9);
}

TEST_CASE("collinearity: euclidean oracle distance and trivial cases") {
  const ManifoldSpace s = ManifoldSpace::euclidean(2);
  const WeightedSample sample =
      make_sample(s, {s.make_point({0.0, 0.0}), s.make_point({4.0, 0.0}),
                      s.make_point({1.0, 0.3})});
  const CollinearityReport r = check_collinearity(s, sample);
  CHECK(!r.collinear);
  CHECK(r.witness_index == 2);
  CHECK(std::abs(r.witness_distance - 0.3) < 1e-12);  // height above the axis

  const WeightedSample two =
      make_sample(s, {s.make_point({0.0, 1.0}), s.make_point({2.0, 5.0})});
  CHECK(check_collinearity(s, two).collinear);
  const WeightedSample one = make_sample(s, {s.make_point({7.0, -1.0})});
  CHECK(check_collinearity(s, one).collinear);
}

TEST_CASE("collinearity: hyperbolic geodesic with an exact offset") {
  const ManifoldSpace s = ManifoldSpace::hyperbolic(3);
  const Point p = s.base_point();
  const std::vector<double> u = s.tangent_basis(p)[0].components;
  const Point q = s.exp(p, vec::scale(u, 1.0));
  const Point g03 = s.exp(p, vec::scale(u, 0.3));
  const Point g07 = s.exp(p, vec::scale(u, 0.7));
  const WeightedSample on = make_sample(s, {p, q, g03, g07});
  CHECK(check_collinearity(s, on).collinear);

  // Push the parameter-0.3 point off by 0.05 orthogonally to the geodesic:
  // the foot of the perpendicular is where it left, so its distance to the
  // complete geodesic is exactly 0.05.
  const std::vector<double> dir_raw = s.log(g03, q).components;
  const double dn = std::sqrt(s.inner(g03, dir_raw, dir_raw));
  const std::vector<double> w =
      orthogonal_unit(s, g03, vec::scale(dir_raw, 1.0 / dn));
  const Point moved = s.exp(g03, vec::scale(w, 0.05));
  const WeightedSample off = make_sample(s, {p, q, moved, g07});
  const CollinearityReport r = check_collinearity(s, off);
  CHECK(!r.collinear);
  CHECK(r.witness_index == 2);
  CHECK(std::abs(r.witness_distance - 0.05) < 1e-9);
}

TEST_CASE("collinearity refuses an antipodal farthest pair") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const WeightedSample sample = make_sample(
      s, {s.make_point({1.0, 0.0, 0.0}), s.make_point({-1.0, 0.0, 0.0}),
          s.make_point({0.0, 1.0, 0.0})});
  CHECK_THROWS_AS(check_collinearity(s, sample), GeodesicDomainError);
}

TEST_CASE("hessian comparison: euclidean equality against the closed form") {
  const ManifoldSpace s = ManifoldSpace::euclidean(3);
  std::mt19937_64 g = rng::make_engine(13, "hessline");
  for (int rep = 0; rep < 50; ++rep) {
    const Point p = s.random_point_in_ball(s.base_point(), 2.0, g);
    const Point q = s.random_point_in_ball(s.base_point(), 2.0, g);
    const Point x = s.random_point_in_ball(s.base_point(), 2.0, g);
    const double t = rng::uniform(g, 0.2, 0.8);
    const auto hc = hessian_comparison_check(s, x, p, q, t);
    if (!hc) continue;

    // Independent closed form: gamma(t) = p + t(q-p); for a straight line,
    // d''(s) = sin^2(alpha)/d exactly.
    std::vector<double> gt = p.coords;
    for (std::size_t j = 0; j < 3; ++j)
      gt[j] += t * (q.coords[j] - p.coords[j]);
    std::vector<double> diff(3), dirv(3);
    double d2 = 0.0, L2 = 0.0, dot = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      diff[j] = x.coords[j] - gt[j];
      dirv[j] = q.coords[j] - p.coords[j];
      d2 += diff[j] * diff[j];
      L2 += dirv[j] * dirv[j];
      dot += diff[j] * dirv[j];
    }
    const double d = std::sqrt(d2);
    const double ca = dot / (d * std::sqrt(L2));
    const double rhs_oracle = (1.0 - ca * ca) / d;
    CHECK(std::abs(hc->rhs - rhs_oracle) < 1e-9);
    CHECK(std::abs(hc->lhs - hc->rhs) < 1e-6);  // flat space: equality
    CHECK(hc->ok);
  }
}

TEST_CASE("hessian comparison: point on the geodesic degenerates to 0 >= 0") {
  for (const ManifoldSpace& s :
       {ManifoldSpace::euclidean(2), ManifoldSpace::sphere(2),
        ManifoldSpace::hyperbolic(2)}) {
    const Point p = s.base_point();
    const Point q = s.exp(p, vec::scale(s.tangent_basis(p)[0].components, 0.8));
    const Point x = s.geodesic_point(p, q, 0.8);  // 0.4 past gamma(0.3)
    const auto hc = hessian_comparison_check(s, x, p, q, 0.3);
    REQUIRE(hc.has_value());
    CHECK(std::abs(hc->lhs) < 1e-6);
    CHECK(std::abs(hc->rhs) < 1e-12);
    CHECK(hc->ok);
  }
}

TEST_CASE("hessian comparison holds on randomized curved-space trials") {
  for (const ManifoldSpace& s :
       {ManifoldSpace::sphere(2), ManifoldSpace::sphere(3, 1.7),
        ManifoldSpace::hyperbolic(2), ManifoldSpace::hyperbolic(3, 2.0)}) {
    std::mt19937_64 g = rng::make_engine(19, to_string(s.kind()), s.dim());
    const double cap = std::min(1.1, 0.3 * s.injectivity_radius());
    int valid = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      const Point p = s.random_point_in_ball(s.base_point(), cap, g);
      const Point q = s.random_point_in_ball(s.base_point(), cap, g);
      const Point x = s.random_point_in_ball(s.base_point(), cap, g);
      const double t = rng::uniform(g, 0.1, 0.9);
      const auto hc = hessian_comparison_check(s, x, p, q, t);
      if (!hc) continue;
      ++valid;
      CHECK(hc->ok);
    }
    INFO("space " << to_string(s.kind()) << " valid " << valid);
    CHECK(valid >= 600);
  }
}

TEST_CASE("hessian comparison skips degenerate and out-of-cap queries") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const Point p = s.make_point({1.0, 0.0, 0.0});
  const Point q = s.make_point({0.0, 1.0, 0.0});
  const Point far = s.make_point({-1.0, 0.0, 0.0});  // d = pi > pi/2 cap
  CHECK(!hessian_comparison_check(s, far, p, q, 0.5).has_value());
  const Point mid = s.geodesic_point(p, q, 0.5);
  CHECK(!hessian_comparison_check(s, mid, p, q, 0.5).has_value());
}

TEST_CASE("counterexample constructions") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const WeightedSample anti =
      counterexample(s, CounterexampleKind::antipodal_pair);
  REQUIRE(anti.size() == 2);
  CHECK(std::abs(s.dist(anti.points[0], anti.points[1]) - kPi) < 1e-12);

  const ManifoldSpace e1 = ManifoldSpace::euclidean(1);
  const WeightedSample med =
      counterexample(e1, CounterexampleKind::collinear_median);
  REQUIRE(med.size() == 2);
  CHECK(med.points[0].coords[0] == 0.0);
  CHECK(med.points[1].coords[0] == 1.0);

  const WeightedSample eq = counterexample(s, CounterexampleKind::equator_mass, 4);
  REQUIRE(eq.size() == 4);
  for (const Point& x : eq.points) CHECK(x.coords[2] == 0.0);
  CHECK(std::abs(s.dist(eq.points[0], eq.points[1]) - kPi / 2.0) < 1e-12);
  CHECK(std::abs(s.dist(eq.points[0], eq.points[2]) - kPi) < 1e-12);

  CHECK_THROWS_AS(
      counterexample(ManifoldSpace::euclidean(2),
                     CounterexampleKind::antipodal_pair),
      ValidationError);
  CHECK_THROWS_AS(counterexample(s, CounterexampleKind::equator_mass, 2),
                  ValidationError);
  CHECK(parse_counterexample_kind("equator_mass") ==
        CounterexampleKind::equator_mass);
  CHECK_THROWS_AS(parse_counterexample_kind("bogus"), ValidationError);
}

TEST_CASE("antipodal pair defeats uniqueness with equal-value clusters") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const WeightedSample sample =
      counterexample(s, CounterexampleKind::antipodal_pair);
  SolverParams params;
  params.seed = 99;
  const MultiStartResult ms =
      multi_start(s, sample, LossFunction::lp(2.0),
                  s.make_point({0.0, 0.0, 1.0}), 1.2, 12, params);
  CHECK(ms.clusters.size() >= 2);
  for (const Cluster& c : ms.clusters)
    CHECK(std::abs(c.value - kQuarterPiSq) < 1e-8);
}

TEST_CASE("collinear median yields a flat minimizer segment") {
  const ManifoldSpace s = ManifoldSpace::euclidean(1);
  const WeightedSample sample =
      counterexample(s, CounterexampleKind::collinear_median);
  SolverParams params;
  params.seed = 4;
  const MultiStartResult ms =
      multi_start(s, sample, LossFunction::absolute(),
                  s.make_point({0.5}), 0.6, 8, params);
  CHECK(ms.clusters.size() >= 2);
  for (const Cluster& c : ms.clusters) {
    CHECK(c.value == 0.5);
    CHECK(c.representative.coords[0] >= -1e-9);
    CHECK(c.representative.coords[0] <= 1.0 + 1e-9);
  }
}

TEST_CASE("equator mass sends minimizers to both poles") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const WeightedSample sample =
      counterexample(s, CounterexampleKind::equator_mass, 4);
  SolverParams params;
  params.seed = 21;
  const MultiStartResult ms = multi_start(s, sample, LossFunction::lp(2.0),
                                          sample.points[0], 1.5, 16, params);
  REQUIRE(ms.clusters.size() >= 2);
  const Point north = s.make_point({0.0, 0.0, 1.0});
  const Point south = s.make_point({0.0, 0.0, -1.0});
  bool seen_north = false, seen_south = false;
  for (const Cluster& c : ms.clusters) {
    CHECK(std::abs(c.value - kQuarterPiSq) < 1e-8);
    if (s.dist(c.representative, north) < 1e-5) seen_north = true;
    if (s.dist(c.representative, south) < 1e-5) seen_south = true;
  }
  CHECK(seen_north);
  CHECK(seen_south);
  // Starting from a data point steps onto the cut locus of its antipode.
  CHECK(!ms.runs[16].error.empty());
}

TEST_CASE("certificate: certified C3 sphere cap") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  std::mt19937_64 g = rng::make_engine(31, "cert3");
  const WeightedSample sample = ball_sample(s, 10, 0.3, g);
  const Certificate cert =
      build_certificate(s, sample, LossFunction::lp(2.0));
  CHECK(cert.loss_class == ConditionClass::C3);
  CHECK(cert.theorem_clause == TheoremClause::thm3b);
  CHECK(cert.r0_value == Catch::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(cert.a2_satisfied);
  CHECK(cert.existence_guaranteed);
  CHECK(cert.uniqueness_guaranteed);
  CHECK(cert.reason.empty());
  CHECK(cert.probe.cluster_count == 1);
  CHECK(cert.probe.max_intercluster_distance == 0.0);
  CHECK(cert.probe.min_second_derivative_seen > 0.0);
  CHECK(cert.probe.min_second_derivative_seen < kInf);
}

TEST_CASE("certificate: collinearity blocks Thm3a but not Thm3b") {
  const ManifoldSpace s = ManifoldSpace::euclidean(2);
  std::vector<Point> pts;
  for (double t : {0.0, 0.4, 1.1, 1.7})
    pts.push_back(s.make_point({t, 0.5 * t}));
  const WeightedSample sample = make_sample(s, pts);

  const Certificate c2 =
      build_certificate(s, sample, LossFunction::huber(1.0));
  CHECK(c2.loss_class == ConditionClass::C2);
  CHECK(c2.theorem_clause == TheoremClause::thm3a);
  CHECK(c2.r0_value == kInf);
  CHECK(c2.a2_satisfied);
  CHECK(c2.collinear);
  CHECK(!c2.uniqueness_guaranteed);
  CHECK(c2.reason.find("collinear") != std::string::npos);

  const Certificate c3 = build_certificate(s, sample, LossFunction::lp(2.0));
  CHECK(c3.theorem_clause == TheoremClause::thm3b);
  CHECK(c3.collinear);
  CHECK(c3.uniqueness_guaranteed);  // Thm3b does not require non-collinearity
  CHECK(c3.probe.cluster_count == 1);
}

TEST_CASE("certificate: C1-only loss gets no uniqueness clause") {
  const ManifoldSpace s = ManifoldSpace::euclidean(2);
  std::mt19937_64 g = rng::make_engine(37, "cert1");
  const WeightedSample sample = ball_sample(s, 8, 0.5, g);
  const Certificate cert =
      build_certificate(s, sample, LossFunction::tukey(1.0));
  CHECK(cert.loss_class == ConditionClass::C1only);
  CHECK(cert.theorem_clause == TheoremClause::none);
  CHECK(std::isnan(cert.r0_value));
  CHECK(!cert.a2_satisfied);
  CHECK(cert.existence_guaranteed);
  CHECK(!cert.uniqueness_guaranteed);
  CHECK(cert.reason.find("C1-only") != std::string::npos);
}

TEST_CASE("certificate: antipodal data downgrades with a coverage reason") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  const WeightedSample sample =
      counterexample(s, CounterexampleKind::antipodal_pair);
  ProbeParams pp;
  pp.n_starts = 16;
  const Certificate cert =
      build_certificate(s, sample, LossFunction::lp(2.0), pp);
  CHECK(!cert.a2_satisfied);
  CHECK(!cert.uniqueness_guaranteed);
  CHECK(cert.enclosing_ball.radius == kInf);
  CHECK(cert.reason.find("diameter") != std::string::npos);
  CHECK(cert.probe.cluster_count >= 2);
}

TEST_CASE("certificate: C2 sphere cap certifies when non-collinear") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  std::mt19937_64 g = rng::make_engine(41, "cert2");
  const WeightedSample sample = ball_sample(s, 8, 0.9 * kPi / 4.0, g);
  REQUIRE(!check_collinearity(s, sample).collinear);
  const Certificate cert =
      build_certificate(s, sample, LossFunction::huber(1.0));
  CHECK(cert.loss_class == ConditionClass::C2);
  CHECK(cert.theorem_clause == TheoremClause::thm3a);
  CHECK(cert.r0_value == Catch::Approx(kPi / 4.0).epsilon(1e-15));
  CHECK(cert.a2_satisfied);
  CHECK(cert.uniqueness_guaranteed);
  CHECK(cert.probe.cluster_count == 1);
}

TEST_CASE("certificate soundness, containment, and the compactness property") {
  // Random instances across spaces and losses: wherever the certificate
  // claims uniqueness the probe must find exactly one cluster; every
  // converged minimizer must lie in B_{r0}(p0) (Lemma 3, slack 1e-6) and
  // beat 10^3 random probe points of the 3x data ball (Proposition 1).
  const std::vector<ManifoldSpace> spaces = {ManifoldSpace::euclidean(2),
                                             ManifoldSpace::sphere(2),
                                             ManifoldSpace::hyperbolic(3)};
  const std::vector<LossFunction> losses = {
      LossFunction::lp(2.0), LossFunction::huber(1.345),
      LossFunction::softplus2()};
  int certified = 0;
  for (const ManifoldSpace& s : spaces) {
    for (const LossFunction& loss : losses) {
      std::mt19937_64 g =
          rng::make_engine(43, loss.spec_string() + to_string(s.kind()));
      const double radius = std::min(0.5, 0.2 * s.injectivity_radius());
      const WeightedSample sample = ball_sample(s, 7, radius, g);
      ProbeParams pp;
      pp.n_starts = 12;
      pp.seed = 7;
      const Certificate cert = build_certificate(s, sample, loss, pp);
      CAPTURE(to_string(s.kind()), loss.spec_string());
      if (cert.uniqueness_guaranteed) {
        ++certified;
        CHECK(cert.probe.cluster_count == 1);
      }
      if (cert.a2_satisfied) {
        for (const RunRecord& run : cert.probe_runs.runs) {
          if (!run.error.empty() ||
              run.result.status != SolveStatus::converged)
            continue;
          CHECK(s.dist(run.result.minimizer, cert.enclosing_ball.center) <=
                cert.r0_value + 1e-6);
        }
      }
      if (!cert.probe_runs.clusters.empty()) {
        const double best = cert.probe_runs.clusters.front().value;
        const double ball3 =
            std::min(std::max(3.0 * cert.enclosing_ball.radius, 0.1),
                     0.9 * s.injectivity_radius());
        std::mt19937_64 pg = rng::make_engine(47, "prop1");
        double min_probe = kInf;
        for (int i = 0; i < 1000; ++i) {
          const Point z = s.random_point_in_ball(cert.enclosing_ball.center,
                                                 ball3, pg);
          min_probe = std::min(min_probe, risk(s, sample, loss, z));
        }
        CHECK(best <= min_probe + 1e-12);
      }
    }
  }
  CHECK(certified >= 6);  // most of these benign instances must certify
}

TEST_CASE("certificates are deterministic") {
  const ManifoldSpace s = ManifoldSpace::sphere(2);
  std::mt19937_64 g = rng::make_engine(53, "det");
  const WeightedSample sample = ball_sample(s, 9, 0.4, g);
  ProbeParams pp;
  pp.n_starts = 10;
  pp.seed = 77;
  const Certificate a = build_certificate(s, sample, LossFunction::lp(2.0), pp);
  const Certificate b = build_certificate(s, sample, LossFunction::lp(2.0), pp);
  CHECK(a.probe.cluster_count == b.probe.cluster_count);
  CHECK(a.probe.max_intercluster_distance == b.probe.max_intercluster_distance);
  CHECK(a.probe.min_second_derivative_seen ==
        b.probe.min_second_derivative_seen);
  CHECK(a.enclosing_ball.radius == b.enclosing_ball.radius);
  for (std::size_t j = 0; j < a.enclosing_ball.center.coords.size(); ++j)
    CHECK(a.enclosing_ball.center.coords[j] == b.enclosing_ball.center.coords[j]);
}
