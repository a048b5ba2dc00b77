#pragma once

#include "loop3pt/analytic/params.hpp"
#include "loop3pt/linkpattern/state_vector.hpp"
#include "loop3pt/scalar.hpp"
#include "loop3pt/transfer/transfer.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace loop3pt {

struct Scaling {
  int alpha = 0;    // power of π/L, one of −1, 0, 1
  double f = 1.0;   // one of 1, √2, 1/√2
};

// Connectivity plan for a bottom field whose legs partly connect back to
// itself. Bottom labels follow the cyclic order of the legs: first the legs
// reaching the top, then the left ends of the enclosures, then the legs
// reaching the middle field, then the right ends of the enclosures (nested).
struct EnclosurePlan {
  int l1 = 0, l2 = 0, l3 = 0;
  std::vector<std::pair<int, int>> enclosures;  // bottom label pairs
  std::vector<std::pair<int, int>> to_middle;   // (bottom label, middle label)
  std::vector<int> to_top;                      // bottom labels, in top site order

  static EnclosurePlan standard(int l1, int l2, int l3);
  int enclosure_count() const { return static_cast<int>(enclosures.size()); }
  // Throws PlanMismatch when the plan does not describe legs (l1, l2, l3).
  void validate() const;
};

struct CorrelatorSpec {
  std::array<FieldLabel, 3> fields;
  int L = 4;
  int M = 0;  // 0 selects the default 20·L
  ModelKind model = ModelKind::On;
  double beta_sq = 1.0;
  PrecisionContext precision{};
  std::optional<EnclosurePlan> enclosure;
  std::optional<Scaling> scaling;

  int rows() const { return M > 0 ? M : 20 * L; }
  ModelParams params() const { return ModelParams::from_beta_sq(beta_sq); }
  bool has_spin() const;
  void validate() const;
};

// A statistical sum stored as (re + i·im)·2^exp2.
struct ZValue {
  double re = 0.0;
  double im = 0.0;
  long exp2 = 0;

  double log10_abs() const;
  // Value divided by another, as an ordinary double (re part only for real data).
  double ratio_to(const ZValue& other) const;
};

struct RunResult {
  CorrelatorSpec spec;
  ZValue z123, z220, z202, z000, z101, z303;
  double c123_re = 0.0;
  double c123_im = 0.0;
  double c123_abs = 0.0;
  std::optional<double> scaled;  // (π/L)^α f |C₁₂₃| when a scaling is requested
  int digits_used = 15;
  bool cancellation_warning = false;
  double wall_time_s = 0.0;
};

// Leg/seam layout of one statistical sum ⟨ψ_top| T^M O T^M |ψ_bottom⟩.
struct ZLayout {
  int bottom_legs = 0;
  int middle_legs = 0;
  int top_legs = 0;
  bool seam_bottom = false;
  bool seam_top = false;
  double seam_w = 0.0;

  // Layout of ⟨V_a V_b V_c⟩ with a at the bottom, b in the middle, c on top.
  bool operator==(const ZLayout&) const = default;

  static ZLayout of(const FieldLabel& a, const FieldLabel& b, const FieldLabel& c,
                    const ModelParams& p);
};

// Amplitudes d[σ₁][σ₂][σ₃] (row-major, extents ℓ₁, ℓ₂, ℓ₃ with 0 read as 1).
template <class S>
struct AmplitudeTable {
  std::array<int, 3> extent{1, 1, 1};
  std::vector<Scaled<S>> d;

  Scaled<S>& at(int a, int b, int c) { return d[(a * extent[1] + b) * extent[2] + c]; }
  const Scaled<S>& at(int a, int b, int c) const { return d[(a * extent[1] + b) * extent[2] + c]; }
};

// Spinless statistical sum with marker-only bookkeeping.
Scaled<double> z_markers(const CorrelatorSpec& spec, const ZLayout& layout);

// Spinless Z₁₂₃ of spec's triple with marker-only bookkeeping.
Scaled<double> z123(const CorrelatorSpec& spec);

// One amplitude with labelled bookkeeping and cyclic shifts (σ₁, σ₂, σ₃).
template <class S>
Scaled<S> z123_amplitude(const CorrelatorSpec& spec, int s1, int s2, int s3);

// All ℓ₁ℓ₂ℓ₃ amplitudes of the triple and the phase-weighted sum.
template <class S>
std::pair<AmplitudeTable<S>, Complex<S>> spin_z123(const CorrelatorSpec& spec, long* exp2);

// Spinless Z₁₂₃ with only the contractions of spec.enclosure allowed.
template <class S>
Scaled<S> enclosure_z(const CorrelatorSpec& spec);

RunResult c123(const CorrelatorSpec& spec);

double apply_scaling(double c, int alpha, double f, int L);
double apply_scaling(const RunResult& result, int alpha, double f);


}  // namespace loop3pt
