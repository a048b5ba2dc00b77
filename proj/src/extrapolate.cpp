#include "loop3pt/extrapolate/extrapolate.hpp"

#include "loop3pt/analytic/structure_constants.hpp"
#include "loop3pt/correlator/correlator.hpp"
#include "loop3pt/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace loop3pt {

SizeSeries::SizeSeries(std::vector<std::pair<int, double>> points) {
  for (const auto& [L, v] : points) add(L, v);
}

void SizeSeries::add(int L, double value) {
  auto it = std::lower_bound(points_.begin(), points_.end(), L,
                             [](const std::pair<int, double>& p, int size) { return p.first < size; });
  if (it != points_.end() && it->first == L) throw DomainError("size " + std::to_string(L) + " appears twice");
  points_.insert(it, {L, value});
}

bool SizeSeries::has(int L) const {
  return std::any_of(points_.begin(), points_.end(), [L](const auto& p) { return p.first == L; });
}

double SizeSeries::at(int L) const {
  for (const auto& [size, v] : points_) {
    if (size == L) return v;
  }
  throw MissingSize("no value at L = " + std::to_string(L));
}

int SizeSeries::min_size() const {
  if (points_.empty()) throw MissingSize("empty series");
  return points_.front().first;
}

int SizeSeries::max_size() const {
  if (points_.empty()) throw MissingSize("empty series");
  return points_.back().first;
}

int SizeSeries::stride() const {
  const bool all_even = std::all_of(points_.begin(), points_.end(), [](const auto& p) { return p.first % 2 == 0; });
  return all_even && points_.size() > 1 ? 2 : 1;
}

Extrapolation extrapolate_poly(const SizeSeries& series, int l_min, int l_max) {
  if (l_min > l_max) throw DomainError("empty extrapolation window");
  const int step = series.stride();
  std::vector<long double> x, y;
  for (int L = l_min; L <= l_max; L += step) {
    if (!series.has(L)) throw MissingSize("no value at L = " + std::to_string(L));
    x.push_back(1.0L / L);
    y.push_back(series.at(L));
  }
  const int k = static_cast<int>(x.size());
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  Mat v(k, k);
  Vec rhs(k);
  for (int i = 0; i < k; ++i) {
    long double p = 1;
    for (int j = 0; j < k; ++j, p *= x[i]) v(i, j) = p;
    rhs(i) = y[i];
  }
  const Vec c = v.fullPivLu().solve(rhs);
  // Neville's scheme evaluates the interpolant at 1/L = 0 more accurately than
  // the monomial coefficients do.
  std::vector<long double> t = y;
  for (int m = 1; m < k; ++m) {
    for (int i = 0; i + m < k; ++i) t[i] = (x[i + m] * t[i] - x[i] * t[i + 1]) / (x[i + m] - x[i]);
  }
  Extrapolation out;
  out.limit = static_cast<double>(t[0]);
  for (int j = 0; j < k; ++j) out.coefficients.push_back(static_cast<double>(c(j)));
  out.l_min = l_min;
  out.l_max = l_min + (k - 1) * step;
  return out;
}

Estimate estimate_limit(const SizeSeries& series, int l_min, int l_max) {
  Estimate e;
  e.fit = extrapolate_poly(series, l_min, l_max);
  const int step = series.stride();
  if (e.fit.l_max - e.fit.l_min >= 2 * step) {
    const double a = extrapolate_poly(series, l_min + step, e.fit.l_max).limit;
    const double b = extrapolate_poly(series, l_min, e.fit.l_max - step).limit;
    e.error = std::max(std::abs(a - e.fit.limit), std::abs(b - e.fit.limit));
  }
  return e;
}

Estimate estimate_limit(const SizeSeries& series) {
  return estimate_limit(series, series.min_size(), series.max_size());
}

Comparison compare_with_omega(const Estimate& estimate, double omega) {
  Comparison c;
  c.limit = estimate.fit.limit;
  c.error = estimate.error;
  c.omega = omega;
  c.ratio = c.limit / omega;
  c.abs_deviation = std::abs(c.limit - omega);
  c.rel_deviation = c.abs_deviation / std::abs(omega);
  c.l_min = estimate.fit.l_min;
  c.l_max = estimate.fit.l_max;
  return c;
}

Comparison compare_with_omega(const Estimate& estimate, const CorrelatorSpec& spec, const PrecisionContext& pc) {
  const auto& f = spec.fields;
  return compare_with_omega(estimate, omega(f[0], f[1], f[2], spec.params(), pc));
}

}  // namespace loop3pt
