#include <catch2/catch_amalgamated.hpp>

#include "rmest/errors.hpp"
#include "rmest/verify.hpp"

using namespace rmest;
using verify::SuiteResult;
using verify::VerifySession;

TEST_CASE("suite catalog matches the acceptance criteria order") {
  const std::vector<std::string>& names = VerifySession::suite_names();
  REQUIRE(names.size() == 12);
  CHECK(names.front() == "geometry_exactness");
  CHECK(names[4] == "uniqueness_c3");
  CHECK(names.back() == "determinism");
  VerifySession session;
  CHECK_THROWS_AS(session.run_suite("bogus"), ValidationError);
}

TEST_CASE("fast suites pass and report sane metadata") {
  VerifySession session({0});
  for (const std::string& name :
       {"geometry_exactness", "gradient_check", "lemma2", "hessian_comparison",
        "counterexamples", "determinism"}) {
    const SuiteResult r = session.run_suite(name);
    INFO(name << ": " << r.detail);
    CHECK(r.passed);
    CHECK(r.name == name);
    CHECK(r.trials > 0);
    CHECK(r.worst_margin >= 0.0);
    CHECK(!r.detail.empty());
  }
}

TEST_CASE("suite results are memoized within a session") {
  VerifySession session({3});
  const SuiteResult a = session.run_suite("lemma2");
  const SuiteResult b = session.run_suite("lemma2");
  CHECK(a.worst_margin == b.worst_margin);
  CHECK(a.trials == b.trials);
  CHECK(a.detail == b.detail);
}

TEST_CASE("two sessions with the same seed agree exactly") {
  VerifySession s1({11}), s2({11});
  const SuiteResult a = s1.run_suite("gradient_check");
  const SuiteResult b = s2.run_suite("gradient_check");
  CHECK(a.worst_margin == b.worst_margin);
  CHECK(a.detail == b.detail);
}

TEST_CASE("the weiszfeld oracle solves a known fermat point") {
  // Equilateral-ish benchmark: the geometric median of (0,0), (1,0), (0,1)
  // is ((3-sqrt(3))/6, (3-sqrt(3))/6).
  const std::vector<std::vector<double>> xs = {{0.0, 0.0}, {1.0, 0.0},
                                               {0.0, 1.0}};
  const std::vector<double> ws = {1.0, 1.0, 1.0};
  REQUIRE(verify::detail::median_is_interior(xs, ws));
  const std::vector<double> y = verify::detail::weiszfeld_oracle(xs, ws);
  const double expect = (3.0 - std::sqrt(3.0)) / 6.0;
  CHECK(std::abs(y[0] - expect) < 1e-10);
  CHECK(std::abs(y[1] - expect) < 1e-10);
}

TEST_CASE("the vertex screen flags a dominant-weight atom") {
  // Weight 10 at the origin outweighs the pull of the other two points, so
  // the median sits at that vertex and the screen must reject the instance.
  const std::vector<std::vector<double>> xs = {{0.0, 0.0}, {1.0, 0.0},
                                               {0.0, 1.0}};
  CHECK(!verify::detail::median_is_interior(xs, {10.0, 1.0, 1.0}));
}
