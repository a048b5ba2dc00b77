#pragma once

#include "loop3pt/linkpattern/state_vector.hpp"

namespace loop3pt::lp {

// Result of gluing a ket pattern (below) with a bra pattern (above).
struct PairOutcome {
  bool valid = false;
  int loops = 0;      // closed loops with seam parity 0
  int odd_loops = 0;  // closed loops with seam parity 1
};

// Every ket defect must reach a bra defect accepted by rules.can_attach; ket
// defects meeting each other, bra defects meeting each other, or an empty
// site facing an occupied one make the pairing vanish.
PairOutcome pattern_pair(const LinkPattern& ket, const LinkPattern& bra, const DefectRules& rules);

template <class S>
S pair_weight(const PairOutcome& o, const S& n, const S& w) {
  if (!o.valid) return S(0);
  S out = 1;
  for (int i = 0; i < o.loops; ++i) out *= n;
  for (int i = 0; i < o.odd_loops; ++i) out *= w;
  return out;
}

// Σ ket_i bra_j ⟨bra_j|ket_i⟩, returned as mantissa and binary exponent.
template <class S>
Scaled<S> bilinear_pair(const StateVector<S>& ket, const StateVector<S>& bra, const S& n,
                        const S& w, const DefectRules& rules) {
  if (ket.sites() != bra.sites()) throw ModeMismatch("bilinear_pair: site counts differ");
  const int sites = ket.sites();
  std::vector<std::pair<LinkPattern, S>> bras;
  bras.reserve(bra.size());
  for (const auto& kv : bra.entries()) bras.emplace_back(LinkPattern::decode({kv.first}, sites), kv.second);
  S total = 0;
  for (const auto& kv : ket.entries()) {
    const LinkPattern a = LinkPattern::decode({kv.first}, sites);
    for (const auto& [b, cb] : bras) {
      const PairOutcome o = pattern_pair(a, b, rules);
      if (o.valid) total += kv.second * cb * pair_weight(o, n, w);
    }
  }
  return {total, ket.exp2() + bra.exp2()};
}

// Lattice translation u (site x → x+1) and reflection P (x → L−1−x).
LinkPattern translate(const LinkPattern& p);
LinkPattern reflect_parity(const LinkPattern& p);

template <class S, class Fn>
StateVector<S> map_patterns(const StateVector<S>& v, Fn&& fn) {
  StateVector<S> out(v.sites(), v.mode());
  out.set_exp2(v.exp2());
  out.set_seam(v.seam());
  for (const auto& kv : v.entries()) out.add(fn(LinkPattern::decode({kv.first}, v.sites())), kv.second);
  return out;
}

template <class S>
StateVector<S> translate(const StateVector<S>& v) {
  return map_patterns(v, [](const LinkPattern& p) { return translate(p); });
}

template <class S>
StateVector<S> reflect_parity(const StateVector<S>& v) {
  return map_patterns(v, [](const LinkPattern& p) { return reflect_parity(p); });
}

}  // namespace loop3pt::lp
