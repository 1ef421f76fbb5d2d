// Constant-curvature model manifolds with closed-form geodesic primitives.
//
// Three model spaces are bundled, one per sign of the curvature bound:
//   euclidean  R^k                          (Delta = 0)
//   sphere     radius-R sphere in R^{k+1}   (Delta = 1/R^2)
//   hyperbolic hyperboloid sheet in R^{k+1} (Delta = -kappa)
// Points are stored in ambient coordinates (unit-scaled embedding for the
// sphere, Minkowski hyperboloid for hyperbolic space), which keeps exp, log
// and dist exact up to rounding.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rmest/errors.hpp"
#include "rmest/rng.hpp"
#include "rmest/vec.hpp"

namespace rmest {

enum class SpaceKind { euclidean, sphere, hyperbolic };

inline const char* to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::euclidean: return "euclidean";
    case SpaceKind::sphere: return "sphere";
    default: return "hyperbolic";
  }
}

/// A point of a model space, in ambient coordinates.  Construct through
/// ManifoldSpace::make_point so the representation constraint is enforced.
struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
};

/// Tangent vector at `base`, in ambient coordinates.
struct TangentVector {
  Point base;
  std::vector<double> components;
};

struct CurvatureConstants {
  double delta;        // least upper bound of sectional curvature
  double r_inj;        // injectivity radius (may be +inf)
  double r_cx_bound;   // lower bound on the regular convexity radius
};

/// sn_Delta(s): sin(s*sqrt(D))/sqrt(D) for D>0, s for D=0,
/// sinh(s*sqrt(|D|))/sqrt(|D|) for D<0.  Continuous in D at 0.
inline double sn_delta(double s, double delta) {
  if (delta > 0.0) {
    const double r = std::sqrt(delta);
    return std::sin(s * r) / r;
  }
  if (delta < 0.0) {
    const double r = std::sqrt(-delta);
    return std::sinh(s * r) / r;
  }
  return s;
}

/// d/ds sn_Delta(s).
inline double sn_delta_prime(double s, double delta) {
  if (delta > 0.0) return std::cos(s * std::sqrt(delta));
  if (delta < 0.0) return std::cosh(s * std::sqrt(-delta));
  return 1.0;
}

namespace detail {

constexpr double kRenormGate = 1e-6;   // residual above this is rejected
constexpr double kCutLocusPad = 1e-9;  // strict cut-locus guard on spheres

inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

inline double sinhc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

inline double minkowski_dot(std::span<const double> a,
                            std::span<const double> b) {
  double s = -a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace detail

/// A model geometry together with the curvature constants the uniqueness
/// theory depends on.  Cheap value type; all operations are pure.
class ManifoldSpace {
 public:
  static ManifoldSpace euclidean(int dim) {
    return ManifoldSpace(SpaceKind::euclidean, dim, 1.0);
  }
  /// Sphere of radius `radius` (curvature 1/radius^2).
  static ManifoldSpace sphere(int dim, double radius = 1.0) {
    return ManifoldSpace(SpaceKind::sphere, dim, radius);
  }
  /// Hyperbolic space of curvature -kappa (kappa > 0).
  static ManifoldSpace hyperbolic(int dim, double kappa = 1.0) {
    return ManifoldSpace(SpaceKind::hyperbolic, dim, kappa);
  }

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double scale() const { return scale_; }

  int ambient_dim() const {
    return kind_ == SpaceKind::euclidean ? dim_ : dim_ + 1;
  }

  /// Least upper bound of sectional curvature.
  double curvature_upper_bound() const {
    switch (kind_) {
      case SpaceKind::euclidean: return 0.0;
      case SpaceKind::sphere: return 1.0 / (scale_ * scale_);
      default: return -scale_;
    }
  }

  double injectivity_radius() const {
    return kind_ == SpaceKind::sphere
               ? 3.14159265358979323846 * scale_
               : std::numeric_limits<double>::infinity();
  }

  /// (Delta, r_inj, r_cx) with r_cx = min{pi/sqrt(Delta), r_inj}/2 and
  /// pi/sqrt(Delta) read as +inf when Delta <= 0.
  CurvatureConstants curvature_constants() const {
    const double delta = curvature_upper_bound();
    const double rinj = injectivity_radius();
    const double pi_over_sqrt =
        delta > 0.0 ? 3.14159265358979323846 / std::sqrt(delta)
                    : std::numeric_limits<double>::infinity();
    return {delta, rinj, 0.5 * std::min(pi_over_sqrt, rinj)};
  }

  /// Canonical base point: origin, (R,0,..,0), or the hyperboloid apex.
  Point base_point() const {
    std::vector<double> c(static_cast<std::size_t>(ambient_dim()), 0.0);
    if (kind_ == SpaceKind::sphere) c[0] = scale_;
    if (kind_ == SpaceKind::hyperbolic) c[0] = 1.0 / std::sqrt(scale_);
    return Point(std::move(c));
  }

  /// Representation residual of raw coordinates (0 means exactly on-model).
  double representation_residual(std::span<const double> c) const {
    switch (kind_) {
      case SpaceKind::euclidean: return 0.0;
      case SpaceKind::sphere: {
        const double n = vec::norm(c);
        return n <= 0.0 ? 1.0 : std::abs(n / scale_ - 1.0);
      }
      default: {
        if (c[0] <= 0.0) return 1.0;
        const double q = -scale_ * detail::minkowski_dot(c, c);
        return q <= 0.0 ? 1.0 : std::abs(std::sqrt(q) - 1.0);
      }
    }
  }

  /// Validates raw coordinates and renormalizes small ingestion round-off.
  /// Residuals above 1e-6 are rejected rather than silently repaired.
  Point make_point(std::vector<double> coords) const {
    if (static_cast<int>(coords.size()) != ambient_dim())
      throw ValidationError("point has " + std::to_string(coords.size()) +
                            " coordinates, expected " +
                            std::to_string(ambient_dim()));
    if (!detail::all_finite(coords))
      throw ValidationError("point has non-finite coordinates");
    const double res = representation_residual(coords);
    if (res > detail::kRenormGate)
      throw ValidationError("point violates the " +
                            std::string(to_string(kind_)) +
                            " representation constraint (residual " +
                            std::to_string(res) + ")");
    renormalize(coords);
    return Point(std::move(coords));
  }

  /// Validates tangency of raw components at `base`, projecting out small
  /// defects; same 1e-6 accept/reject gate as make_point.
  TangentVector make_tangent(const Point& base,
                             std::vector<double> components) const {
    if (static_cast<int>(components.size()) != ambient_dim())
      throw ValidationError("tangent vector dimension mismatch");
    if (!detail::all_finite(components))
      throw ValidationError("tangent vector has non-finite components");
    const double defect = tangency_defect(base, components);
    if (defect > detail::kRenormGate *
                     std::max(1.0, vec::norm(components)))
      throw ValidationError("vector is not tangent at base (defect " +
                            std::to_string(defect) + ")");
    project_tangent(base, components);
    return TangentVector{base, std::move(components)};
  }

  TangentVector zero_tangent(const Point& base) const {
    return TangentVector{
        base, std::vector<double>(static_cast<std::size_t>(ambient_dim()), 0.0)};
  }

  /// Riemannian inner product of two tangent coordinate vectors at a point.
  double inner(const Point& /*base*/, std::span<const double> v,
               std::span<const double> w) const {
    return kind_ == SpaceKind::hyperbolic ? detail::minkowski_dot(v, w)
                                          : vec::dot(v, w);
  }

  double tangent_norm(const TangentVector& v) const {
    return std::sqrt(std::max(0.0, inner(v.base, v.components, v.components)));
  }

  /// Geodesic distance; closed form per model space.  The sphere uses the
  /// chord/anti-chord atan2 form, which stays accurate at both ends.
  double dist(const Point& p, const Point& q) const {
    switch (kind_) {
      case SpaceKind::euclidean:
        return std::sqrt(vec::dist2(p.coords, q.coords));
      case SpaceKind::sphere: {
        const double dc = std::sqrt(vec::dist2(p.coords, q.coords));
        const std::vector<double> s = vec::add(p.coords, q.coords);
        return 2.0 * scale_ * std::atan2(dc, vec::norm(s));
      }
      default: {
        const std::vector<double> d = vec::sub(p.coords, q.coords);
        const double m2 = std::max(0.0, detail::minkowski_dot(d, d));
        const double rk = std::sqrt(scale_);
        return (2.0 / rk) * std::asinh(0.5 * rk * std::sqrt(m2));
      }
    }
  }

  /// Log map: initial velocity of the minimal geodesic p -> q, with
  /// |log_p(q)| = dist(p, q).  Throws at/beyond the cut locus on spheres.
  TangentVector log(const Point& p, const Point& q) const {
    const double d = dist(p, q);
    switch (kind_) {
      case SpaceKind::euclidean:
        return TangentVector{p, vec::sub(q.coords, p.coords)};
      case SpaceKind::sphere: {
        if (d >= injectivity_radius() - detail::kCutLocusPad)
          throw GeodesicDomainError(
              "log map undefined: target at or beyond the cut locus "
              "(distance " + std::to_string(d) + ")");
        if (d == 0.0) return zero_tangent(p);
        // q_perp = (q - p) + (|p-q|^2 / 2R^2) p  -- cancellation-free
        // tangential component of q at p.
        std::vector<double> w = vec::sub(q.coords, p.coords);
        const double chord2 = vec::dot(w, w);
        vec::axpy(w, 0.5 * chord2 / (scale_ * scale_), p.coords);
        const double wn = vec::norm(w);
        if (wn == 0.0) return zero_tangent(p);
        return TangentVector{p, vec::scale(w, d / wn)};
      }
      default: {
        if (d == 0.0) return zero_tangent(p);
        // q_perp = (q - p) - (kappa |p-q|_L^2 / 2) p
        std::vector<double> w = vec::sub(q.coords, p.coords);
        const double m2 = std::max(0.0, detail::minkowski_dot(w, w));
        vec::axpy(w, -0.5 * scale_ * m2, p.coords);
        const double wn = std::sqrt(
            std::max(0.0, detail::minkowski_dot(w, w)));
        if (wn == 0.0) return zero_tangent(p);
        return TangentVector{p, vec::scale(w, d / wn)};
      }
    }
  }

  /// Exp map: endpoint of the geodesic with initial velocity v.
  Point exp(const Point& p, const TangentVector& v) const {
    return exp(p, std::span<const double>(v.components));
  }

  Point exp(const Point& p, std::span<const double> v) const {
    switch (kind_) {
      case SpaceKind::euclidean:
        return Point(vec::add(p.coords, v));
      case SpaceKind::sphere: {
        const double n = vec::norm(v);
        const double theta = n / scale_;
        std::vector<double> r = vec::scale(p.coords, std::cos(theta));
        vec::axpy(r, detail::sinc(theta), v);
        renormalize(r);
        return Point(std::move(r));
      }
      default: {
        const double n = std::sqrt(std::max(0.0, detail::minkowski_dot(v, v)));
        const double phi = std::sqrt(scale_) * n;
        std::vector<double> r = vec::scale(p.coords, std::cosh(phi));
        vec::axpy(r, detail::sinhc(phi), v);
        renormalize(r);
        return Point(std::move(r));
      }
    }
  }

  /// Point at parameter t of the geodesic through p (t=0) and q (t=1);
  /// t outside [0,1] extends the geodesic.
  Point geodesic_point(const Point& p, const Point& q, double t) const {
    if (kind_ == SpaceKind::euclidean) {
      std::vector<double> r = p.coords;
      for (std::size_t i = 0; i < r.size(); ++i)
        r[i] += t * (q.coords[i] - r[i]);
      return Point(std::move(r));
    }
    const TangentVector v = log(p, q);
    return exp(p, vec::scale(v.components, t));
  }

  /// Metric-orthonormal basis of the tangent space at p (dim() vectors).
  std::vector<TangentVector> tangent_basis(const Point& p) const {
    std::vector<TangentVector> basis;
    basis.reserve(static_cast<std::size_t>(dim_));
    const int a = ambient_dim();
    for (int i = 0; i < a && static_cast<int>(basis.size()) < dim_; ++i) {
      std::vector<double> c(static_cast<std::size_t>(a), 0.0);
      c[static_cast<std::size_t>(i)] = 1.0;
      project_tangent(p, c);
      for (const TangentVector& b : basis)
        vec::axpy(c, -inner(p, c, b.components), b.components);
      const double n = std::sqrt(std::max(0.0, inner(p, c, c)));
      if (n > 1e-10)
        basis.push_back(TangentVector{p, vec::scale(c, 1.0 / n)});
    }
    return basis;
  }

  /// Pseudo-random point of the open ball B_radius(center); isotropic
  /// direction, flat-volume radial profile.  Deterministic per engine state.
  Point random_point_in_ball(const Point& center, double radius,
                             std::mt19937_64& g) const {
    if (!(radius > 0.0) || radius >= injectivity_radius())
      throw GeodesicDomainError("ball radius must lie in (0, r_inj)");
    const std::vector<TangentVector> basis = tangent_basis(center);
    std::vector<double> dir(static_cast<std::size_t>(ambient_dim()), 0.0);
    double n = 0.0;
    do {
      std::fill(dir.begin(), dir.end(), 0.0);
      for (const TangentVector& b : basis)
        vec::axpy(dir, rng::normal(g), b.components);
      n = std::sqrt(std::max(0.0, inner(center, dir, dir)));
    } while (n < 1e-12);
    const double u = rng::uniform01(g);
    const double s = radius * std::pow(u, 1.0 / static_cast<double>(dim_));
    return exp(center, vec::scale(dir, s / n));
  }

  Point random_point_in_ball(const Point& center, double radius,
                             std::uint64_t seed) const {
    std::mt19937_64 g(rng::stream_seed(seed, "ball"));
    return random_point_in_ball(center, radius, g);
  }

  bool operator==(const ManifoldSpace& o) const {
    return kind_ == o.kind_ && dim_ == o.dim_ && scale_ == o.scale_;
  }

 private:
  ManifoldSpace(SpaceKind kind, int dim, double scale)
      : kind_(kind), dim_(dim), scale_(scale) {
    if (dim < 1) throw ValidationError("manifold dimension must be >= 1");
    if (!(scale > 0.0)) throw ValidationError("scale must be positive");
  }

  void renormalize(std::vector<double>& c) const {
    if (kind_ == SpaceKind::sphere) {
      const double n = vec::norm(c);
      const double f = scale_ / n;
      for (double& x : c) x *= f;
    } else if (kind_ == SpaceKind::hyperbolic) {
      const double q = -scale_ * detail::minkowski_dot(c, c);
      const double f = 1.0 / std::sqrt(q);
      for (double& x : c) x *= f;
    }
  }

  double tangency_defect(const Point& base,
                         std::span<const double> v) const {
    switch (kind_) {
      case SpaceKind::euclidean: return 0.0;
      case SpaceKind::sphere:
        return std::abs(vec::dot(v, base.coords)) / scale_;
      default:
        return std::abs(detail::minkowski_dot(v, base.coords)) *
               std::sqrt(scale_);
    }
  }

  // Removes the normal component of v at base (exact idempotent projection).
  void project_tangent(const Point& base, std::vector<double>& v) const {
    if (kind_ == SpaceKind::sphere) {
      const double a = vec::dot(v, base.coords) / (scale_ * scale_);
      vec::axpy(v, -a, base.coords);
    } else if (kind_ == SpaceKind::hyperbolic) {
      const double a = detail::minkowski_dot(v, base.coords) * scale_;
      vec::axpy(v, a, base.coords);
    }
  }

  SpaceKind kind_;
  int dim_;
  double scale_;
};

}  // namespace rmest
