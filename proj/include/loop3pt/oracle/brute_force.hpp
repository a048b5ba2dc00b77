#pragma once

#include "loop3pt/analytic/params.hpp"

#include <array>
#include <cstdint>

namespace loop3pt::oracle {

// Direct sum over every vertex configuration of an L × 2M cylinder, with loop
// and line connectivity found by walking the resulting graph. Shares nothing
// with the link-pattern engine; used to certify it on tiny lattices.
struct BruteForceSpec {
  ModelKind model = ModelKind::On;
  int sites = 3;
  int half_rows = 1;  // M: rows below the middle insertion, and rows above it
  std::array<double, 9> rho{};
  double n = 1.0;
  double w = 1.0;   // weight of loops crossing the seam an odd number of times
  int bottom_legs = 0;
  int middle_legs = 0;
  int top_legs = 0;
  bool seam_bottom = false;  // seam crosses the wrap edges of the lower M rows
  bool seam_top = false;     // and/or of the upper M rows
};

struct BruteForceResult {
  double z = 0.0;
  std::uint64_t configurations = 0;  // vertex assignments visited
};

BruteForceResult brute_force_z(const BruteForceSpec& spec);

}  // namespace loop3pt::oracle
