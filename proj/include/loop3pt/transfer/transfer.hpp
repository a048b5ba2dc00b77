#pragma once

#include "loop3pt/analytic/params.hpp"
#include "loop3pt/linkpattern/state_vector.hpp"

#include <array>

namespace loop3pt {

// Local vertex weights ρ₁…ρ₉ (index 0…8). Pictures, with edges named by the
// side of the vertex they sit on:
//   ρ1 empty          ρ2 left-top        ρ3 bottom-right    ρ4 bottom-left
//   ρ5 top-right      ρ6 left-right      ρ7 bottom-top
//   ρ8 left-top and bottom-right         ρ9 bottom-left and top-right
template <class S>
struct VertexWeightsT {
  std::array<S, 9> rho{};

  bool fully_packed() const {
    for (int i = 0; i < 7; ++i) {
      if (rho[i] != 0) return false;
    }
    return true;
  }
};
using VertexWeights = VertexWeightsT<double>;

template <class S>
VertexWeightsT<S> weights_for(ModelKind model, double beta_sq);

template <class S>
S loop_weight_of(double beta_sq) {
  using std::cos;
  return -2 * cos(pi_value<S>() * S(beta_sq));
}

struct SeamConfig {
  enum class Segment { BottomHalf, TopHalf, FullHeight };
  bool active = false;
  Segment segment = Segment::BottomHalf;
  double w = 0.0;
};

// Everything a row sweep needs besides the state.
template <class S>
struct RowContext {
  VertexWeightsT<S> weights;
  S n{0};
  S w{0};  // weight of loops with odd seam parity
  const lp::DefectRules* rules = nullptr;
  bool normalize = true;
};

// One full row of the transfer matrix. When seam is true, the periodic wrap
// edge of every vertex row crosses the seam. Patterns with fewer than
// prune_below defects are dropped.
template <class S>
lp::StateVector<S> apply_transfer_row(const lp::StateVector<S>& v, const RowContext<S>& ctx,
                                      bool seam, int prune_below);

// Convenience form with double weights.
lp::StateVector<double> apply_transfer_row(const lp::StateVector<double>& v, const VertexWeights& w,
                                           double n, const SeamConfig& seam, int prune_below,
                                           const lp::DefectRules& rules);

enum class MiddleMode { Plain, Labelled };

// Insertion of a leg field in the middle of the cylinder: the vertical edges
// above sites 1…⌊ℓ₂/2⌋ are cut; each lower half-edge ends a strand coming from
// below and each upper half-edge starts a new middle defect. For odd ℓ₂ the
// edge above site ⌊ℓ₂/2⌋+1 carries one extra half-edge, pointing down or up;
// with odd_symmetrization the two choices are averaged, otherwise only the
// downward one is used.
struct MiddleOperator {
  int legs = 0;
  int shift = 0;
  MiddleMode mode = MiddleMode::Plain;
  bool odd_symmetrization = true;

  // Tag of the middle leg with counter-clockwise index q (0…ℓ₂−1). Downward
  // legs at sites 0…k come first, upward legs follow from site k back to 0.
  lp::DefectTag tag_for(int q) const;
};

template <class S>
lp::StateVector<S> apply_middle_operator(const lp::StateVector<S>& v, const MiddleOperator& op,
                                         const lp::DefectRules& rules);

}  // namespace loop3pt
