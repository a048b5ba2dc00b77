#pragma once

#include "loop3pt/analytic/params.hpp"

#include <array>
#include <vector>

namespace loop3pt {

struct CorrelatorSpec;

// Values of one lattice quantity at several sizes, sorted by L.
class SizeSeries {
 public:
  SizeSeries() = default;
  SizeSeries(std::vector<std::pair<int, double>> points);

  void add(int L, double value);
  const std::vector<std::pair<int, double>>& points() const { return points_; }
  bool has(int L) const;
  double at(int L) const;
  int min_size() const;
  int max_size() const;
  // Spacing between consecutive sizes: 2 when every size is even (PSU), else 1.
  int stride() const;

 private:
  std::vector<std::pair<int, double>> points_;
};

struct Extrapolation {
  double limit = 0.0;
  std::vector<double> coefficients;  // in powers of 1/L, constant term first
  int l_min = 0;
  int l_max = 0;
};

// Exact polynomial interpolation in 1/L through every size of the window
// [l_min, l_max] (stepping by the series stride); the constant term is the
// L → ∞ estimate.
Extrapolation extrapolate_poly(const SizeSeries& series, int l_min, int l_max);

// Extrapolation over a window with an error bar given by the largest change
// of the limit when one size is removed from either end of the window.
struct Estimate {
  Extrapolation fit;
  double error = 0.0;
};

Estimate estimate_limit(const SizeSeries& series, int l_min, int l_max);
Estimate estimate_limit(const SizeSeries& series);

struct Comparison {
  double limit = 0.0;
  double error = 0.0;
  double omega = 0.0;
  double ratio = 0.0;
  double abs_deviation = 0.0;
  double rel_deviation = 0.0;
  int l_min = 0;
  int l_max = 0;
};

Comparison compare_with_omega(const Estimate& estimate, double omega);
// ω of the spec's field triple at its β².
Comparison compare_with_omega(const Estimate& estimate, const CorrelatorSpec& spec, const PrecisionContext& pc);

}  // namespace loop3pt
