// The empirical M-estimation objective
//
//   F_n(m) = sum_i w_i rho(d(x_i, m)),
//
// its exact Riemannian gradient
//
//   grad F_n(m) = -sum_i w_i rho'(d_i) Log_m(x_i)/d_i,
//
// and a numerical second-derivative probe along geodesics (the convexity
// certificate's raw signal).  Summation is pairwise in input order so results
// are bit-for-bit reproducible.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rmest/errors.hpp"
#include "rmest/geometry.hpp"
#include "rmest/losses.hpp"
#include "rmest/vec.hpp"

namespace rmest {

namespace detail {
// Below this geodesic distance a sample point counts as coinciding with the
// evaluation point (atom).
constexpr double kAtomTol = 1e-12;
}  // namespace detail

struct WeightedSample {
  std::vector<Point> points;
  std::vector<double> weights;  // nonnegative, normalized to sum 1

  std::size_t size() const { return points.size(); }
};

/// Validates points against `space`, normalizes weights to sum 1 (uniform
/// when omitted).
inline WeightedSample make_sample(const ManifoldSpace& space,
                                  std::vector<Point> points,
                                  std::vector<double> weights = {}) {
  const std::size_t n = points.size();
  if (n == 0) throw ValidationError("sample must contain at least one point");
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(points[i].coords.size()) != space.ambient_dim() ||
        space.representation_residual(points[i].coords) > 1e-9)
      throw ValidationError("sample point " + std::to_string(i) +
                            " is not a valid point of the given space");
  }
  if (weights.empty()) {
    weights.assign(n, 1.0 / static_cast<double>(n));
  } else {
    if (weights.size() != n)
      throw ValidationError("got " + std::to_string(weights.size()) +
                            " weights for " + std::to_string(n) + " points");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
        throw ValidationError("weight " + std::to_string(i) +
                              " must be finite and nonnegative");
      total += weights[i];
    }
    if (!(total > 0.0))
      throw ValidationError("weights must not all vanish");
    for (double& w : weights) w /= total;
  }
  return WeightedSample{std::move(points), std::move(weights)};
}

/// Geodesic distances from m to every sample point, with the spherical
/// cut-locus guard (d < pi R - 1e-9) applied per index.
inline std::vector<double> sample_distances(const ManifoldSpace& space,
                                            const WeightedSample& sample,
                                            const Point& m) {
  const double guard = space.injectivity_radius() - 1e-9;
  std::vector<double> ds(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    ds[i] = space.dist(sample.points[i], m);
    if (ds[i] >= guard)
      throw GeodesicDomainError(
          "sample point " + std::to_string(i) +
          " lies at or beyond the cut locus of the evaluation point "
          "(distance " + std::to_string(ds[i]) + ")");
  }
  return ds;
}

inline double risk_from_distances(const LossFunction& loss,
                                  const WeightedSample& sample,
                                  const std::vector<double>& ds) {
  std::vector<double> terms(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    terms[i] = sample.weights[i] * loss.evaluate(ds[i], 0);
  return vec::pairwise_sum(terms);
}

/// F_n(m).  Always finite for finite samples.
inline double risk(const ManifoldSpace& space, const WeightedSample& sample,
                   const LossFunction& loss, const Point& m) {
  return risk_from_distances(loss, sample, sample_distances(space, sample, m));
}

struct ObjectiveValue {
  double value;
  TangentVector grad;
  double grad_norm;
  int n_coincident;  // sample points within kAtomTol of m
};

/// Value and gradient in one pass.  Terms at coincident points contribute
/// zero: analytically when rho'(0+) = 0, by the Weiszfeld exclusion rule
/// (dropped and counted) when rho'(0+) > 0.
inline ObjectiveValue risk_with_gradient(const ManifoldSpace& space,
                                         const WeightedSample& sample,
                                         const LossFunction& loss,
                                         const Point& m) {
  const std::vector<double> ds = sample_distances(space, sample, m);
  const std::size_t n = sample.size();
  const std::size_t a = static_cast<std::size_t>(space.ambient_dim());

  int n_coincident = 0;
  std::vector<double> coef(n, 0.0);
  std::vector<std::vector<double>> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (ds[i] <= detail::kAtomTol) {
      ++n_coincident;
      continue;  // zero contribution either way; see note above
    }
    coef[i] = -sample.weights[i] * loss.weight(ds[i]);
    logs[i] = space.log(m, sample.points[i]).components;
  }

  std::vector<double> comps(a, 0.0);
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < a; ++j) {
    for (std::size_t i = 0; i < n; ++i)
      terms[i] = logs[i].empty() ? 0.0 : coef[i] * logs[i][j];
    comps[j] = vec::pairwise_sum(terms);
  }

  TangentVector grad = space.make_tangent(m, std::move(comps));
  const double gn = space.tangent_norm(grad);
  return ObjectiveValue{risk_from_distances(loss, sample, ds), std::move(grad),
                        gn, n_coincident};
}

inline TangentVector riemannian_gradient(const ManifoldSpace& space,
                                         const WeightedSample& sample,
                                         const LossFunction& loss,
                                         const Point& m) {
  return risk_with_gradient(space, sample, loss, m).grad;
}

/// Second central difference of s -> F_n(gamma(s)) at s = t, where gamma is
/// the geodesic with gamma(0) = p, gamma(1) = q, using step 1e-4 * d(p, q).
/// Returns nullopt (skipped) when a stencil point is too close to a sample
/// atom or to a distance in the loss's exception set S, where the difference
/// quotient would straddle a derivative jump.
inline std::optional<double> second_derivative_along(
    const ManifoldSpace& space, const WeightedSample& sample,
    const LossFunction& loss, const Point& p, const Point& q, double t) {
  const double d = space.dist(p, q);
  if (d <= 0.0) return std::nullopt;
  const double h = 1e-4 * d;
  const std::vector<double> S = loss.exception_set();
  const double pad = h * d + 1e-8;  // stencil arc half-width plus slack

  double g[3];
  const double ss[3] = {t - h, t, t + h};
  try {
    for (int k = 0; k < 3; ++k) {
      const Point gp = space.geodesic_point(p, q, ss[k]);
      const std::vector<double> ds = sample_distances(space, sample, gp);
      for (double di : ds) {
        if (di <= pad) return std::nullopt;  // atom inside the stencil span
        for (double s : S)
          if (std::abs(di - s) <= pad) return std::nullopt;
      }
      g[k] = risk_from_distances(loss, sample, ds);
    }
  } catch (const GeodesicDomainError&) {
    return std::nullopt;  // stencil touched the cut locus
  }
  return (g[0] - 2.0 * g[1] + g[2]) / (h * h);
}

}  // namespace rmest
