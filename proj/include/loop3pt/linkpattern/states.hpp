#pragma once

#include "loop3pt/linkpattern/state_vector.hpp"

#include <vector>

namespace loop3pt::lp {

// Vacuum boundary state: all sites empty (O(n)) or nearest-neighbour arcs
// (1 2)(3 4)… (PSU).
LinkPattern vacuum_pattern(int sites, ModelKind model);

// ℓ₁ bottom-marked defects on sites 1…ℓ₁, the rest as in the vacuum. In
// labelled mode the defect at site x carries label (x + σ₁) mod ℓ₁.
LinkPattern bottom_pattern(int sites, int legs, int shift, ModelKind model, Bookkeeping mode);

// Top boundary pattern with ℓ₃ defects. Markers mode: all defects are
// Top-marked and accept any incoming defect. Labelled mode: the first
// (ℓ₂+ℓ₃−ℓ₁)/2 sites carry middle labels ℓ₂−1, ℓ₂−2, …, the next
// (ℓ₁+ℓ₃−ℓ₂)/2 carry bottom labels in increasing order; the whole sequence is
// then rotated so that the tag at site x is the unrotated tag at x − σ₃.
LinkPattern top_pattern(int sites, int l1, int l2, int l3, int shift, ModelKind model,
                        Bookkeeping mode);

template <class S>
StateVector<S> single(const LinkPattern& p, Bookkeeping mode) {
  StateVector<S> v(p.sites(), mode);
  v.add(p, S(1));
  return v;
}

template <class S>
StateVector<S> vacuum_state(int sites, ModelKind model) {
  return single<S>(vacuum_pattern(sites, model), Bookkeeping::Markers);
}

template <class S>
StateVector<S> bottom_state(int sites, int legs, int shift, ModelKind model, Bookkeeping mode) {
  return single<S>(bottom_pattern(sites, legs, shift, model, mode), mode);
}

template <class S>
StateVector<S> top_state(int sites, int l1, int l2, int l3, int shift, ModelKind model,
                         Bookkeeping mode) {
  return single<S>(top_pattern(sites, l1, l2, l3, shift, model, mode), mode);
}

// All valid patterns with the given number of defects, every defect carrying
// the given marker with label 0, in a deterministic order.
std::vector<LinkPattern> enumerate_patterns(int sites, int defects, ModelKind model,
                                            Marker marker = Marker::Bottom);

}  // namespace loop3pt::lp
