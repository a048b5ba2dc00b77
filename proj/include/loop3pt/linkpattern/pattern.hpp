#pragma once

#include "loop3pt/analytic/params.hpp"
#include "loop3pt/errors.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace loop3pt::lp {

// Each site occupies a 6-bit field of a 128-bit integer. Symbols:
//   0 empty, 1 arc opening (seam parity 0), 2 arc opening (parity 1),
//   3 arc closing, 4 + tag for a defect.
// Arcs are matched as balanced parentheses in site order; an arc whose
// interval contains the defects of the pattern is understood to run around
// the back of the cylinder.
using Code = unsigned __int128;

constexpr int kSlotBits = 6;
constexpr int kMaxSlots = 21;
constexpr int kMaxSites = 19;  // two extra slots are needed during a row sweep
constexpr int kMaxLabel = 20;

constexpr unsigned kEmpty = 0;
constexpr unsigned kOpen = 1;
constexpr unsigned kOpenOdd = 2;
constexpr unsigned kClose = 3;
constexpr unsigned kDefectBase = 4;

enum class Marker : std::uint8_t { Bottom = 0, Middle = 1, Top = 2 };

struct DefectTag {
  Marker marker = Marker::Bottom;
  int label = 0;

  unsigned code() const { return static_cast<unsigned>(marker) * kMaxLabel + label; }
  static DefectTag from_code(unsigned c) {
    return {static_cast<Marker>(c / kMaxLabel), static_cast<int>(c % kMaxLabel)};
  }
  bool operator==(const DefectTag& o) const { return marker == o.marker && label == o.label; }
};

inline unsigned defect_symbol(DefectTag t) { return kDefectBase + t.code(); }
inline bool is_open(unsigned s) { return s == kOpen || s == kOpenOdd; }
inline bool is_defect(unsigned s) { return s >= kDefectBase; }
inline unsigned tag_of(unsigned s) { return s - kDefectBase; }

inline unsigned slot(Code c, int i) { return static_cast<unsigned>(c >> (kSlotBits * i)) & 63u; }
inline Code with_slot(Code c, int i, unsigned s) {
  const Code mask = Code(63) << (kSlotBits * i);
  return (c & ~mask) | (Code(s) << (kSlotBits * i));
}

// Partner of the arc end at slot i among slots [0, n).
inline int partner(Code c, int n, int i) {
  const unsigned s = slot(c, i);
  int depth = 0;
  if (is_open(s)) {
    for (int j = i + 1; j < n; ++j) {
      const unsigned t = slot(c, j);
      if (is_open(t)) {
        ++depth;
      } else if (t == kClose) {
        if (depth == 0) return j;
        --depth;
      }
    }
  } else {
    for (int j = i - 1; j >= 0; --j) {
      const unsigned t = slot(c, j);
      if (t == kClose) {
        ++depth;
      } else if (is_open(t)) {
        if (depth == 0) return j;
        --depth;
      }
    }
  }
  throw InvalidPattern("unbalanced arc in pattern code");
}

struct CodeHash {
  std::size_t operator()(Code c) const {
    std::uint64_t lo = static_cast<std::uint64_t>(c);
    std::uint64_t hi = static_cast<std::uint64_t>(c >> 64);
    std::uint64_t h = lo * 0x9E3779B97F4A7C15ull ^ (hi + 0x632BE59BD9B4E019ull + (lo << 6) + (lo >> 2));
    h ^= h >> 31;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 29;
    return static_cast<std::size_t>(h);
  }
};

struct PatternKey {
  Code code = 0;
  bool operator==(const PatternKey& o) const { return code == o.code; }
  bool operator!=(const PatternKey& o) const { return code != o.code; }
};

// Which defect information survives in a state space.
enum class Bookkeeping { Markers, Labelled };

// Decoded link pattern on L sites.
class LinkPattern {
 public:
  LinkPattern() = default;
  explicit LinkPattern(int sites);

  // Builders. Arcs are given as site pairs in any order.
  static LinkPattern from_parts(int sites, const std::vector<std::pair<int, int>>& arcs,
                                const std::vector<std::pair<int, DefectTag>>& defects,
                                const std::vector<int>& odd_arcs = {});

  int sites() const { return sites_; }
  unsigned symbol(int i) const { return sym_[i]; }
  bool empty_at(int i) const { return sym_[i] == kEmpty; }
  bool defect_at(int i) const { return is_defect(sym_[i]); }
  bool arc_at(int i) const { return sym_[i] != kEmpty && !is_defect(sym_[i]); }
  DefectTag tag(int i) const { return DefectTag::from_code(tag_of(sym_[i])); }
  int partner(int i) const { return partner_[i]; }
  int parity(int i) const;  // seam parity of the arc through site i
  int defect_count() const;
  std::vector<int> defect_sites() const;

  PatternKey encode() const;
  static LinkPattern decode(PatternKey key, int sites);
  static LinkPattern decode(PatternKey key, int sites, ModelKind model, Bookkeeping mode);

  // Checks planarity and defect rules; throws InvalidPattern.
  void validate(ModelKind model, Bookkeeping mode) const;

  // Stable ASCII rendering: one token per site, separated by spaces.
  //   "."  empty      "(" ")"  arc with parity 0      "[" "]"  arc with parity 1
  //   "b3" "m0" "t0"  defect with marker and label
  std::string render() const;
  static LinkPattern parse(const std::string& text);

  bool operator==(const LinkPattern& o) const { return sites_ == o.sites_ && sym_ == o.sym_; }

 private:
  void rebuild_partners();

  int sites_ = 0;
  std::array<std::uint8_t, kMaxSlots> sym_{};
  std::array<std::int8_t, kMaxSlots> partner_{};
};

}  // namespace loop3pt::lp
