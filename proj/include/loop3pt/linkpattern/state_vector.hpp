#pragma once

#include "loop3pt/linkpattern/pattern.hpp"
#include "loop3pt/scalar.hpp"

#include <absl/container/flat_hash_map.h>

#include <bitset>

namespace loop3pt::lp {

// Which defect pairs may meet. "contract" governs two defects of the evolving
// state meeting inside the lattice; "attach" governs a state defect reaching a
// defect of the top (bra) pattern.
class DefectRules {
 public:
  // Only bottom/middle pairs contract; top defects accept anything with the
  // same marker and label, or any marker when they are Top-marked.
  static DefectRules markers();
  // As markers(), but contraction also requires equal labels.
  static DefectRules labelled();
  // No contraction at all (bottom half of the cylinder).
  static DefectRules none();
  // Contraction allowed exactly for the listed tag pairs.
  static DefectRules pairs(const std::vector<std::pair<DefectTag, DefectTag>>& allowed);

  bool can_contract(unsigned a, unsigned b) const { return contract_[a * 64 + b]; }
  bool can_attach(unsigned ket, unsigned bra) const { return attach_[ket * 64 + bra]; }

  void allow_contract(DefectTag a, DefectTag b);

 private:
  DefectRules();
  std::bitset<64 * 64> contract_;
  std::bitset<64 * 64> attach_;
};

template <class S>
class StateVector {
 public:
  using Map = absl::flat_hash_map<Code, S, CodeHash>;

  StateVector() = default;
  StateVector(int sites, Bookkeeping mode) : sites_(sites), mode_(mode) {}

  int sites() const { return sites_; }
  Bookkeeping mode() const { return mode_; }
  long exp2() const { return exp2_; }
  void set_exp2(long e) { exp2_ = e; }
  bool seam() const { return seam_; }
  void set_seam(bool on) { seam_ = on; }

  Map& entries() { return entries_; }
  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void add(Code c, const S& value) {
    auto [it, inserted] = entries_.try_emplace(c, value);
    if (!inserted) it->second += value;
  }
  void add(const LinkPattern& p, const S& value) { add(p.encode().code, value); }

  // Coefficient including the 2^exp2 factor.
  S coefficient(const LinkPattern& p) const {
    auto it = entries_.find(p.encode().code);
    if (it == entries_.end()) return S(0);
    return scale2(it->second, exp2_);
  }

  void cleanup() {
    absl::erase_if(entries_, [](const auto& kv) { return kv.second == 0; });
  }

  // Rescales by a power of two so that the largest |coefficient| lies in [½, 1).
  void normalize() {
    using std::abs;
    S big = 0;
    for (const auto& kv : entries_) {
      S a = abs(kv.second);
      if (a > big) big = a;
    }
    if (big == 0) return;
    const long e = exponent2(big);
    if (e == 0) return;
    for (auto& kv : entries_) kv.second = scale2(kv.second, -e);
    exp2_ += e;
  }

  template <class T>
  StateVector<T> convert() const {
    StateVector<T> out(sites_, mode_);
    out.set_exp2(exp2_);
    out.set_seam(seam_);
    for (const auto& kv : entries_) out.add(kv.first, T(kv.second));
    return out;
  }

 private:
  int sites_ = 0;
  Bookkeeping mode_ = Bookkeeping::Markers;
  bool seam_ = false;
  long exp2_ = 0;
  Map entries_;
};

}  // namespace loop3pt::lp
