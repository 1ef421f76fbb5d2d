// Catalog of loss functions rho: [0, inf) -> [0, inf) with closed-form
// derivatives, IRLS weights, and machine-checkable classification into the
// condition classes the uniqueness theory distinguishes:
//
//   C1     non-decreasing, continuous, rho(0) = 0           (existence)
//   C2     rho' > 0 non-decreasing; rho'' >= 0 off a
//          countable exception set S                        (uniqueness, convex)
//   C3     rho'(0+) = 0, rho'' positive with
//          t rho''(t) >= rho'(t)                            (uniqueness, smooth)
//
// C3 implies C2.  The operational C3 test checks the consequence the theory
// actually consumes -- the inequality rho'(t) <= t rho''(t) -- rather than
// literal monotonicity of rho'' (see classify below).
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "rmest/errors.hpp"

namespace rmest {

enum class LossKind {
  huber,
  tukey,
  welsch,
  andrews,
  logcosh,
  lp,
  softplus2,
  abs,
  pseudo_huber,
};

enum class ConditionClass { C1only, C2, C3 };

inline const char* to_string(ConditionClass c) {
  switch (c) {
    case ConditionClass::C1only: return "C1only";
    case ConditionClass::C2: return "C2";
    default: return "C3";
  }
}

namespace detail {

constexpr double kPi = 3.14159265358979323846;

inline double softplus_shifted(double t) {
  // log((1 + e^t)/2), overflow-free for t >= 0; equals 0 exactly at t = 0.
  return t + std::log1p(std::exp(-t)) - std::log1p(1.0);
}

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// One member of the loss catalog.  Immutable value type; construct through
/// the factories or parse().
class LossFunction {
 public:
  static LossFunction huber(double c) { return {LossKind::huber, c}; }
  static LossFunction tukey(double c) { return {LossKind::tukey, c}; }
  static LossFunction welsch(double c) { return {LossKind::welsch, c}; }
  static LossFunction andrews(double c) { return {LossKind::andrews, c}; }
  static LossFunction logcosh() { return {LossKind::logcosh, 0.0}; }
  static LossFunction lp(double p) { return {LossKind::lp, p}; }
  static LossFunction softplus2() { return {LossKind::softplus2, 0.0}; }
  static LossFunction absolute() { return {LossKind::abs, 0.0}; }
  static LossFunction pseudo_huber(double c) {
    return {LossKind::pseudo_huber, c};
  }

  /// Parses the CLI grammar: `huber:c=1.345`, `lp:p=2`, `logcosh`,
  /// `softplus2`, `abs`, `pseudo_huber:c=1`, ...
  static LossFunction parse(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    std::string_view param_part =
        colon == std::string_view::npos ? std::string_view{}
                                        : spec.substr(colon + 1);

    const auto need = [&](std::string_view key) {
      const auto eq = param_part.find('=');
      if (eq == std::string_view::npos || param_part.substr(0, eq) != key)
        throw ValidationError("loss '" + std::string(name) + "' requires " +
                              std::string(key) + "=<value>");
      const std::string_view num = param_part.substr(eq + 1);
      double v = 0.0;
      const auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc{} || p != num.data() + num.size())
        throw ValidationError("bad numeric value '" + std::string(num) +
                              "' in loss spec '" + std::string(spec) + "'");
      return v;
    };
    const auto bare = [&](LossFunction f) {
      if (!param_part.empty())
        throw ValidationError("loss '" + std::string(name) +
                              "' takes no parameters");
      return f;
    };

    if (name == "huber") return huber(need("c"));
    if (name == "tukey") return tukey(need("c"));
    if (name == "welsch") return welsch(need("c"));
    if (name == "andrews") return andrews(need("c"));
    if (name == "logcosh") return bare(logcosh());
    if (name == "lp") return lp(need("p"));
    if (name == "softplus2") return bare(softplus2());
    if (name == "abs") return bare(absolute());
    if (name == "pseudo_huber") return pseudo_huber(need("c"));
    throw ValidationError("unknown loss '" + std::string(name) + "'");
  }

  LossKind kind() const { return kind_; }

  /// Cutoff c for the cutoff family, exponent p for lp; meaningless otherwise.
  double parameter() const { return param_; }

  const char* name() const {
    switch (kind_) {
      case LossKind::huber: return "huber";
      case LossKind::tukey: return "tukey";
      case LossKind::welsch: return "welsch";
      case LossKind::andrews: return "andrews";
      case LossKind::logcosh: return "logcosh";
      case LossKind::lp: return "lp";
      case LossKind::softplus2: return "softplus2";
      case LossKind::abs: return "abs";
      default: return "pseudo_huber";
    }
  }

  /// Canonical spec string, e.g. "huber:c=1.345"; parse(spec_string()) is
  /// the identity.
  std::string spec_string() const {
    switch (kind_) {
      case LossKind::logcosh:
      case LossKind::softplus2:
      case LossKind::abs: return name();
      case LossKind::lp: return "lp:p=" + detail::format_double(param_);
      default:
        return std::string(name()) + ":c=" + detail::format_double(param_);
    }
  }

  ConditionClass declared_class() const {
    switch (kind_) {
      case LossKind::tukey:
      case LossKind::welsch:
      case LossKind::andrews: return ConditionClass::C1only;
      case LossKind::lp:
        return param_ >= 2.0 ? ConditionClass::C3 : ConditionClass::C2;
      case LossKind::softplus2: return ConditionClass::C3;
      default: return ConditionClass::C2;
    }
  }

  /// Points where rho'' is undefined (jump of rho').  Countable set S of C2.
  std::vector<double> exception_set() const {
    switch (kind_) {
      case LossKind::huber: return {param_};
      case LossKind::andrews: return {detail::kPi * param_};
      default: return {};
    }
  }

  /// sup rho = lim_{t->inf} rho(t); +inf for the unbounded losses.
  double sup_value() const {
    switch (kind_) {
      case LossKind::tukey: return param_ * param_ / 6.0;
      case LossKind::welsch: return 1.0;
      case LossKind::andrews: return 2.0 * param_ * param_;
      default: return std::numeric_limits<double>::infinity();
    }
  }

  /// Right derivative rho'(0+).
  double rho_prime_at_zero() const {
    if (kind_ == LossKind::abs) return 1.0;
    if (kind_ == LossKind::lp && param_ == 1.0) return 1.0;
    return 0.0;
  }

  /// rho, rho' or rho'' at t >= 0.  order=1 at t=0 is the right derivative;
  /// order=2 is rejected on the exception set S.
  double evaluate(double t, int order = 0) const {
    if (t < 0.0)
      throw LossDomainError("loss argument must be nonnegative, got " +
                            detail::format_double(t));
    if (order < 0 || order > 2)
      throw LossDomainError("derivative order must be 0, 1 or 2");
    if (order == 2) {
      for (double s : exception_set())
        if (t == s)
          throw LossDomainError("rho'' undefined at t=" +
                                detail::format_double(t) + " for " +
                                spec_string());
    }
    switch (kind_) {
      case LossKind::huber: {
        const double c = param_;
        if (order == 0) return t <= c ? t * t : c * (2.0 * t - c);
        if (order == 1) return t <= c ? 2.0 * t : 2.0 * c;
        return t < c ? 2.0 : 0.0;
      }
      case LossKind::tukey: {
        const double c = param_;
        if (t >= c) return order == 0 ? c * c / 6.0 : 0.0;
        const double u = (t / c) * (t / c);
        const double v = 1.0 - u;
        if (order == 0) return c * c / 6.0 * (1.0 - v * v * v);
        if (order == 1) return t * v * v;
        return v * (1.0 - 5.0 * u);
      }
      case LossKind::welsch: {
        const double c = param_;
        const double u = (t / c) * (t / c);
        const double e = std::exp(-u);
        if (order == 0) return -std::expm1(-u);
        if (order == 1) return 2.0 * t / (c * c) * e;
        return 2.0 / (c * c) * (1.0 - 2.0 * u) * e;
      }
      case LossKind::andrews: {
        const double c = param_;
        if (t > detail::kPi * c) return order == 0 ? 2.0 * c * c : 0.0;
        if (order == 0) return c * c * (1.0 - std::cos(t / c));
        if (order == 1) return c * std::sin(t / c);
        return std::cos(t / c);
      }
      case LossKind::logcosh: {
        // log cosh t = t + log1p(e^{-2t}) - log 2, overflow-free.
        if (order == 0)
          return t + std::log1p(std::exp(-2.0 * t)) - std::log1p(1.0);
        if (order == 1) return std::tanh(t);
        const double s = 2.0 * std::exp(-t) / (1.0 + std::exp(-2.0 * t));
        return s * s;  // sech^2 t
      }
      case LossKind::lp: {
        const double p = param_;
        if (order == 0) return std::pow(t, p);
        if (order == 1)
          return t == 0.0 ? (p == 1.0 ? 1.0 : 0.0) : p * std::pow(t, p - 1.0);
        if (p == 1.0) return 0.0;
        return p * (p - 1.0) * std::pow(t, p - 2.0);  // +inf at 0 for p < 2
      }
      case LossKind::softplus2: {
        const double g = detail::softplus_shifted(t);
        if (order == 0) return g * g;
        const double s = detail::sigmoid(t);
        if (order == 1) return 2.0 * g * s;
        const double e = std::exp(-t);
        const double one_minus_s = e / (1.0 + e);
        return 2.0 * (s * s + g * s * one_minus_s);
      }
      case LossKind::abs:
        return order == 0 ? t : (order == 1 ? 1.0 : 0.0);
      default: {  // pseudo_huber
        const double c = param_;
        const double u = (t / c) * (t / c);
        const double r = std::sqrt(1.0 + u);
        if (order == 0) return t * t / (1.0 + r);  // c^2(sqrt(1+u)-1), stable
        if (order == 1) return t / r;
        return 1.0 / (r * r * r);
      }
    }
  }

  /// IRLS weight rho'(t)/t, with the analytic limit at t=0.  The limit is
  /// +inf when rho'(0+) > 0 (handled by the solver's atom-exclusion rule).
  double weight(double t) const {
    if (t < 0.0) throw LossDomainError("weight argument must be nonnegative");
    if (t > 0.0) return evaluate(t, 1) / t;
    switch (kind_) {
      case LossKind::huber: return 2.0;
      case LossKind::tukey: return 1.0;
      case LossKind::welsch: return 2.0 / (param_ * param_);
      case LossKind::andrews: return 1.0;
      case LossKind::logcosh: return 1.0;
      case LossKind::lp:
        if (param_ == 2.0) return 2.0;
        if (param_ > 2.0) return 0.0;
        return std::numeric_limits<double>::infinity();
      case LossKind::softplus2: return 0.5;
      case LossKind::abs: return std::numeric_limits<double>::infinity();
      default: return 1.0;  // pseudo_huber
    }
  }

  /// t rho''(t) - rho'(t), the slack in the inequality C3 guarantees
  /// (Lemma-2 gap).  Nonnegative up to rounding for every C3 loss.
  double lemma2_gap(double t) const {
    if (declared_class() != ConditionClass::C3)
      throw ClassificationError("lemma2_gap requires a C3 loss, got " +
                                spec_string() + " (" +
                                to_string(declared_class()) + ")");
    if (!(t > 0.0))
      throw LossDomainError("lemma2_gap requires t > 0");
    return t * evaluate(t, 2) - evaluate(t, 1);
  }

  bool operator==(const LossFunction& o) const {
    return kind_ == o.kind_ && param_ == o.param_;
  }

 private:
  LossFunction(LossKind kind, double param) : kind_(kind), param_(param) {
    const bool needs_c =
        kind == LossKind::huber || kind == LossKind::tukey ||
        kind == LossKind::welsch || kind == LossKind::andrews ||
        kind == LossKind::pseudo_huber;
    if (needs_c && !(param > 0.0))
      throw ValidationError("cutoff c must be positive");
    if (kind == LossKind::lp && !(param >= 1.0))
      throw ValidationError("lp exponent must satisfy p >= 1");
  }

  LossKind kind_;
  double param_;
};

/// All catalog members at their customary tuning constants, for sweeps.
inline std::vector<LossFunction> bundled_losses() {
  return {LossFunction::huber(1.345),   LossFunction::tukey(4.685),
          LossFunction::welsch(2.985),  LossFunction::andrews(1.339),
          LossFunction::logcosh(),      LossFunction::lp(2),
          LossFunction::lp(1.5),        LossFunction::lp(3),
          LossFunction::softplus2(),    LossFunction::absolute(),
          LossFunction::pseudo_huber(1.0)};
}

// ---------------------------------------------------------------------------
// Grid-based classification
// ---------------------------------------------------------------------------

struct ClassifyGrid {
  double t_min = 1e-6;
  double t_max = 1e3;   // raised to 10x the cutoff if that is larger
  int points = 1000;
};

/// A grid point refuting (violations) or qualifying (advisories) a check.
struct ClassifyWitness {
  std::string check;
  double t;
  double value;
};

struct ClassifyReport {
  ConditionClass verified;
  std::vector<ClassifyWitness> violations;  // why higher classes were ruled out
  std::vector<ClassifyWitness> advisories;  // non-fatal observations
};

/// Verifies the declared condition class on a log-spaced grid and returns the
/// evidence.  A grid can refute but not prove; agreement with the hand
/// declaration is therefore required, and disagreement throws.
///
/// The C3 check is operational: rho'(0+) = 0, rho'' > 0 on the grid, and the
/// gap t rho''(t) - rho'(t) >= -1e-12 -- the inequality the uniqueness proof
/// consumes.  Literal non-monotonicity of rho'' is recorded as an advisory
/// (the shifted softplus-square loss dips in the tail while still satisfying
/// the gap inequality everywhere).
inline ClassifyReport classify(const LossFunction& loss,
                               const ClassifyGrid& grid_in = {}) {
  constexpr double kTol = 1e-12;
  ClassifyGrid grid = grid_in;
  const bool has_cutoff =
      loss.kind() == LossKind::huber || loss.kind() == LossKind::tukey ||
      loss.kind() == LossKind::welsch || loss.kind() == LossKind::andrews ||
      loss.kind() == LossKind::pseudo_huber;
  if (has_cutoff) grid.t_max = std::max(grid.t_max, 10.0 * loss.parameter());
  if (grid.points < 2 || !(grid.t_min > 0.0) || !(grid.t_max > grid.t_min))
    throw ValidationError("malformed classification grid");

  std::vector<double> ts(static_cast<std::size_t>(grid.points));
  const double ratio = grid.t_max / grid.t_min;
  for (int i = 0; i < grid.points; ++i)
    ts[static_cast<std::size_t>(i)] =
        grid.t_min *
        std::pow(ratio, static_cast<double>(i) / (grid.points - 1));

  const std::vector<double> S = loss.exception_set();
  const auto near_S = [&](double t) {
    for (double s : S)
      if (std::abs(t - s) <= 1e-9) return true;
    return false;
  };

  ClassifyReport rep;
  bool c1_ok = true, c2_ok = true, c3_ok = true;
  const auto refute = [&](bool& flag, const char* check, double t, double v) {
    flag = false;
    rep.violations.push_back({check, t, v});
  };

  // --- C1: rho(0) = 0, non-decreasing over the grid.
  if (std::abs(loss.evaluate(0.0, 0)) > kTol)
    refute(c1_ok, "C1:rho(0)=0", 0.0, loss.evaluate(0.0, 0));
  double prev_rho = loss.evaluate(0.0, 0);
  for (double t : ts) {
    const double r = loss.evaluate(t, 0);
    if (r < prev_rho - kTol * std::max(1.0, std::abs(prev_rho)))
      refute(c1_ok, "C1:monotone", t, r - prev_rho);
    prev_rho = r;
  }

  // --- C2: rho' positive and non-decreasing; rho'' >= 0 off S.
  double prev_rp = 0.0;
  bool have_prev_rp = false;
  for (double t : ts) {
    const double rp = loss.evaluate(t, 1);
    if (!(rp > 0.0)) {
      refute(c2_ok, "C2:rho'>0", t, rp);
      break;
    }
    if (have_prev_rp && rp < prev_rp - kTol * std::max(1.0, prev_rp)) {
      refute(c2_ok, "C2:rho'monotone", t, rp - prev_rp);
      break;
    }
    prev_rp = rp;
    have_prev_rp = true;
  }
  if (c2_ok)
    for (double t : ts) {
      if (near_S(t)) continue;
      const double rpp = loss.evaluate(t, 2);
      if (rpp < -kTol) {
        refute(c2_ok, "C2:rho''>=0", t, rpp);
        break;
      }
    }

  // --- C3 (operational): rho'(0+) = 0, S empty, rho'' > 0, gap >= -1e-12.
  if (std::abs(loss.rho_prime_at_zero()) > kTol)
    refute(c3_ok, "C3:rho'(0+)=0", 0.0, loss.rho_prime_at_zero());
  if (!S.empty())
    refute(c3_ok, "C3:smooth", S.front(), 0.0);
  if (c3_ok) {
    double prev_rpp = 0.0;
    bool have_prev_rpp = false;
    for (double t : ts) {
      const double rpp = loss.evaluate(t, 2);
      if (!(rpp > 0.0)) {
        refute(c3_ok, "C3:rho''>0", t, rpp);
        break;
      }
      const double gap = t * rpp - loss.evaluate(t, 1);
      if (gap < -kTol) {
        refute(c3_ok, "C3:gap", t, gap);
        break;
      }
      if (have_prev_rpp && rpp < prev_rpp - kTol * std::max(1.0, prev_rpp))
        rep.advisories.push_back({"C3:rho''monotone", t, rpp - prev_rpp});
      prev_rpp = rpp;
      have_prev_rpp = true;
    }
  }

  if (!c1_ok)
    throw ClassificationError(loss.spec_string() +
                              " fails C1 on the verification grid");
  rep.verified = c3_ok ? ConditionClass::C3
                       : (c2_ok ? ConditionClass::C2 : ConditionClass::C1only);

  if (rep.verified != loss.declared_class()) {
    std::string msg = loss.spec_string() + ": declared " +
                      to_string(loss.declared_class()) + " but verified " +
                      to_string(rep.verified);
    if (!rep.violations.empty()) {
      const auto& w = rep.violations.front();
      msg += " (first witness: " + w.check +
             " at t=" + detail::format_double(w.t) + ")";
    }
    throw ClassificationError(msg);
  }
  return rep;
}

}  // namespace rmest
