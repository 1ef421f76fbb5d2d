// Small dense-vector helpers used by the geometry and objective code.
// Dimensions here are tiny (ambient dimension of a model space), so plain
// std::vector<double> with free functions is all that is needed.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace rmest::vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> add(std::span<const double> a,
                               std::span<const double> b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline std::vector<double> sub(std::span<const double> a,
                               std::span<const double> b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline std::vector<double> scale(std::span<const double> a, double s) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// r += s * a
inline void axpy(std::vector<double>& r, double s, std::span<const double> a) {
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += s * a[i];
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Pairwise (cascade) summation. Summation order depends only on the term
// order, so results are reproducible bit-for-bit for a fixed input order.
inline double pairwise_sum(std::span<const double> terms) {
  const std::size_t n = terms.size();
  if (n == 0) return 0.0;
  if (n <= 4) {
    double s = terms[0];
    for (std::size_t i = 1; i < n; ++i) s += terms[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(terms.subspan(0, half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace rmest::vec
