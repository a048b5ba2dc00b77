#include "loop3pt/linkpattern/bilinear.hpp"
#include "loop3pt/linkpattern/states.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace loop3pt::lp {

LinkPattern::LinkPattern(int sites) : sites_(sites) {
  if (sites < 0 || sites > kMaxSlots) throw CapacityError("pattern size out of range");
  partner_.fill(-1);
}

void LinkPattern::rebuild_partners() {
  partner_.fill(-1);
  std::vector<int> stack;
  for (int i = 0; i < sites_; ++i) {
    const unsigned s = sym_[i];
    if (is_open(s)) {
      stack.push_back(i);
    } else if (s == kClose) {
      if (stack.empty()) throw InvalidPattern("unmatched arc closing at site " + std::to_string(i));
      partner_[i] = static_cast<std::int8_t>(stack.back());
      partner_[stack.back()] = static_cast<std::int8_t>(i);
      stack.pop_back();
    } else if (s > kDefectBase + 3 * kMaxLabel - 1) {
      throw InvalidPattern("bad symbol");
    }
  }
  if (!stack.empty()) throw InvalidPattern("unmatched arc opening at site " + std::to_string(stack.back()));
}

LinkPattern LinkPattern::from_parts(int sites, const std::vector<std::pair<int, int>>& arcs,
                                    const std::vector<std::pair<int, DefectTag>>& defects,
                                    const std::vector<int>& odd_arcs) {
  LinkPattern p(sites);
  auto claim = [&](int i, unsigned s) {
    if (i < 0 || i >= sites) throw InvalidPattern("site index out of range");
    if (p.sym_[i] != kEmpty) throw InvalidPattern("site " + std::to_string(i) + " used twice");
    p.sym_[i] = static_cast<std::uint8_t>(s);
  };
  for (auto [a, b] : arcs) {
    if (a > b) std::swap(a, b);
    if (a == b) throw InvalidPattern("arc with identical ends");
    const bool odd = std::find(odd_arcs.begin(), odd_arcs.end(), a) != odd_arcs.end() ||
                     std::find(odd_arcs.begin(), odd_arcs.end(), b) != odd_arcs.end();
    claim(a, odd ? kOpenOdd : kOpen);
    claim(b, kClose);
  }
  for (const auto& [x, t] : defects) {
    if (t.label < 0 || t.label >= kMaxLabel) throw InvalidPattern("defect label out of range");
    claim(x, defect_symbol(t));
  }
  p.rebuild_partners();
  for (auto [a, b] : arcs) {
    if (p.partner_[a] != b) throw InvalidPattern("crossing arcs");
  }
  return p;
}

int LinkPattern::parity(int i) const {
  const int lo = std::min(i, static_cast<int>(partner_[i]));
  return sym_[lo] == kOpenOdd ? 1 : 0;
}

int LinkPattern::defect_count() const {
  int n = 0;
  for (int i = 0; i < sites_; ++i) n += defect_at(i) ? 1 : 0;
  return n;
}

std::vector<int> LinkPattern::defect_sites() const {
  std::vector<int> out;
  for (int i = 0; i < sites_; ++i) {
    if (defect_at(i)) out.push_back(i);
  }
  return out;
}

PatternKey LinkPattern::encode() const {
  Code c = 0;
  for (int i = 0; i < sites_; ++i) c |= Code(sym_[i]) << (kSlotBits * i);
  return {c};
}

LinkPattern LinkPattern::decode(PatternKey key, int sites) {
  LinkPattern p(sites);
  for (int i = 0; i < sites; ++i) p.sym_[i] = static_cast<std::uint8_t>(slot(key.code, i));
  if (sites < kMaxSlots && (key.code >> (kSlotBits * sites)) != 0) {
    throw InvalidPattern("pattern key has content beyond the last site");
  }
  p.rebuild_partners();
  return p;
}

LinkPattern LinkPattern::decode(PatternKey key, int sites, ModelKind model, Bookkeeping mode) {
  LinkPattern p = decode(key, sites);
  p.validate(model, mode);
  return p;
}

void LinkPattern::validate(ModelKind model, Bookkeeping mode) const {
  if (sites_ > kMaxSites) throw CapacityError("at most " + std::to_string(kMaxSites) + " sites");
  if (model == ModelKind::Psu) {
    if (sites_ % 2 != 0) throw InvalidPattern("PSU patterns need an even number of sites");
    for (int i = 0; i < sites_; ++i) {
      if (empty_at(i)) throw InvalidPattern("PSU patterns have no empty sites");
    }
  }
  // Defects reaching a boundary (bottom or top) and middle defects each act as
  // a barrier: an arc must keep all of them on one side.
  auto boundary = [](Marker m) { return m != Marker::Middle; };
  for (int i = 0; i < sites_; ++i) {
    if (!is_open(sym_[i])) continue;
    const int j = partner_[i];
    int in_b = 0, out_b = 0, in_m = 0, out_m = 0;
    for (int x = 0; x < sites_; ++x) {
      if (!defect_at(x)) continue;
      const bool inside = x > i && x < j;
      if (boundary(tag(x).marker)) {
        (inside ? in_b : out_b)++;
      } else {
        (inside ? in_m : out_m)++;
      }
    }
    if ((in_b && out_b) || (in_m && out_m)) {
      throw InvalidPattern("arc (" + std::to_string(i) + "," + std::to_string(j) +
                           ") separates defects of one kind");
    }
  }
  std::array<std::array<int, kMaxLabel>, 3> seen{};
  for (int x = 0; x < sites_; ++x) {
    if (!defect_at(x)) continue;
    const DefectTag t = tag(x);
    if (mode == Bookkeeping::Markers && t.label != 0) {
      throw InvalidPattern("labels are not stored in markers-only bookkeeping");
    }
    if (mode == Bookkeeping::Labelled && seen[static_cast<int>(t.marker)][t.label]++) {
      throw InvalidPattern("repeated defect label");
    }
  }
}

std::string LinkPattern::render() const {
  static const char markers[] = {'b', 'm', 't'};
  std::ostringstream out;
  for (int i = 0; i < sites_; ++i) {
    if (i) out << ' ';
    const unsigned s = sym_[i];
    if (s == kEmpty) {
      out << '.';
    } else if (is_defect(s)) {
      const DefectTag t = tag(i);
      out << markers[static_cast<int>(t.marker)] << t.label;
    } else {
      const bool odd = parity(i) == 1;
      out << (is_open(s) ? (odd ? '[' : '(') : (odd ? ']' : ')'));
    }
  }
  return out.str();
}

LinkPattern LinkPattern::parse(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  LinkPattern p(static_cast<int>(tokens.size()));
  std::vector<int> odd_stack;
  for (int i = 0; i < p.sites_; ++i) {
    const std::string& t = tokens[i];
    unsigned s = kEmpty;
    if (t == ".") {
      s = kEmpty;
    } else if (t == "(") {
      s = kOpen;
    } else if (t == "[") {
      s = kOpenOdd;
    } else if (t == ")" || t == "]") {
      s = kClose;
    } else if (t.size() >= 2 && (t[0] == 'b' || t[0] == 'm' || t[0] == 't')) {
      const Marker m = t[0] == 'b' ? Marker::Bottom : t[0] == 'm' ? Marker::Middle : Marker::Top;
      const int label = std::stoi(t.substr(1));
      if (label < 0 || label >= kMaxLabel) throw InvalidPattern("label out of range: " + t);
      s = defect_symbol({m, label});
    } else {
      throw InvalidPattern("unknown token '" + t + "'");
    }
    p.sym_[i] = static_cast<std::uint8_t>(s);
  }
  p.rebuild_partners();
  for (int i = 0; i < p.sites_; ++i) {
    if (p.sym_[i] != kClose) continue;
    const bool square = tokens[i] == "]";
    if (square != (p.sym_[p.partner_[i]] == kOpenOdd)) throw InvalidPattern("mismatched bracket kinds");
  }
  return p;
}

namespace {

LinkPattern remap(const LinkPattern& p, const std::function<int(int)>& f) {
  std::vector<std::pair<int, int>> arcs;
  std::vector<int> odd;
  std::vector<std::pair<int, DefectTag>> defects;
  for (int i = 0; i < p.sites(); ++i) {
    if (p.defect_at(i)) {
      defects.emplace_back(f(i), p.tag(i));
    } else if (p.arc_at(i) && i < p.partner(i)) {
      arcs.emplace_back(f(i), f(p.partner(i)));
      if (p.parity(i)) odd.push_back(f(i));
    }
  }
  return LinkPattern::from_parts(p.sites(), arcs, defects, odd);
}

}  // namespace

LinkPattern translate(const LinkPattern& p) {
  const int n = p.sites();
  return remap(p, [n](int x) { return (x + 1) % n; });
}

LinkPattern reflect_parity(const LinkPattern& p) {
  const int n = p.sites();
  return remap(p, [n](int x) { return n - 1 - x; });
}

DefectRules::DefectRules() = default;

DefectRules DefectRules::none() {
  DefectRules r;
  for (unsigned a = 0; a < 3 * kMaxLabel; ++a) {
    const DefectTag ta = DefectTag::from_code(a);
    for (unsigned b = 0; b < 3 * kMaxLabel; ++b) {
      const DefectTag tb = DefectTag::from_code(b);
      if (ta.marker == Marker::Top) continue;
      if (tb.marker == Marker::Top || ta == tb) r.attach_.set(a * 64 + b);
    }
  }
  return r;
}

DefectRules DefectRules::markers() {
  DefectRules r = none();
  for (unsigned a = 0; a < 3 * kMaxLabel; ++a) {
    for (unsigned b = 0; b < 3 * kMaxLabel; ++b) {
      const DefectTag ta = DefectTag::from_code(a), tb = DefectTag::from_code(b);
      if (ta.marker != Marker::Top && tb.marker != Marker::Top && ta.marker != tb.marker) {
        r.contract_.set(a * 64 + b);
      }
    }
  }
  return r;
}

DefectRules DefectRules::labelled() {
  DefectRules r = none();
  for (unsigned a = 0; a < 3 * kMaxLabel; ++a) {
    for (unsigned b = 0; b < 3 * kMaxLabel; ++b) {
      const DefectTag ta = DefectTag::from_code(a), tb = DefectTag::from_code(b);
      if (ta.marker != Marker::Top && tb.marker != Marker::Top && ta.marker != tb.marker &&
          ta.label == tb.label) {
        r.contract_.set(a * 64 + b);
      }
    }
  }
  return r;
}

DefectRules DefectRules::pairs(const std::vector<std::pair<DefectTag, DefectTag>>& allowed) {
  DefectRules r = none();
  for (const auto& [a, b] : allowed) r.allow_contract(a, b);
  return r;
}

void DefectRules::allow_contract(DefectTag a, DefectTag b) {
  contract_.set(a.code() * 64 + b.code());
  contract_.set(b.code() * 64 + a.code());
}

PairOutcome pattern_pair(const LinkPattern& ket, const LinkPattern& bra, const DefectRules& rules) {
  PairOutcome out;
  const int n = ket.sites();
  if (bra.sites() != n) return out;
  for (int x = 0; x < n; ++x) {
    if (ket.empty_at(x) != bra.empty_at(x)) return out;
  }
  std::array<bool, kMaxSlots> seen{};
  for (int start = 0; start < n; ++start) {
    if (!ket.defect_at(start) || seen[start]) continue;
    const unsigned from = tag_of(ket.symbol(start));
    int x = start;
    while (true) {
      seen[x] = true;
      if (bra.defect_at(x)) {
        if (!rules.can_attach(from, tag_of(bra.symbol(x)))) return out;
        break;
      }
      const int y = bra.partner(x);
      seen[y] = true;
      if (ket.defect_at(y)) {
        // Two state defects joined through a bra arc contract at the boundary.
        if (!rules.can_contract(from, tag_of(ket.symbol(y)))) return out;
        break;
      }
      x = ket.partner(y);
    }
  }
  for (int x = 0; x < n; ++x) {
    if (bra.defect_at(x) && !seen[x]) return out;  // bra defect left without a state defect
  }
  for (int start = 0; start < n; ++start) {
    if (seen[start] || ket.empty_at(start)) continue;
    int parity = 0;
    int x = start;
    do {
      const int y = ket.partner(x);
      parity ^= ket.parity(x);
      seen[x] = seen[y] = true;
      parity ^= bra.parity(y);
      x = bra.partner(y);
    } while (x != start);
    (parity ? out.odd_loops : out.loops)++;
  }
  out.valid = true;
  return out;
}

LinkPattern vacuum_pattern(int sites, ModelKind model) {
  return bottom_pattern(sites, 0, 0, model, Bookkeeping::Markers);
}

namespace {

void check_capacity(int sites, int legs, ModelKind model) {
  if (sites > kMaxSites) throw CapacityError("at most " + std::to_string(kMaxSites) + " sites");
  if (legs > sites) throw CapacityError("more legs than sites");
  if (legs > kMaxLabel) throw CapacityError("too many legs for label storage");
  if (model == ModelKind::Psu && (sites - legs) % 2 != 0) {
    throw ParityError("PSU patterns need L - legs even");
  }
}

LinkPattern with_vacuum_tail(int sites, const std::vector<std::pair<int, DefectTag>>& defects,
                             ModelKind model) {
  std::vector<std::pair<int, int>> arcs;
  if (model == ModelKind::Psu) {
    for (int x = static_cast<int>(defects.size()); x + 1 < sites; x += 2) arcs.emplace_back(x, x + 1);
  }
  return LinkPattern::from_parts(sites, arcs, defects);
}

int mod(int a, int m) { return ((a % m) + m) % m; }

}  // namespace

LinkPattern bottom_pattern(int sites, int legs, int shift, ModelKind model, Bookkeeping mode) {
  check_capacity(sites, legs, model);
  std::vector<std::pair<int, DefectTag>> defects;
  for (int x = 0; x < legs; ++x) {
    const int label = mode == Bookkeeping::Labelled ? mod(x + shift, legs) : 0;
    defects.emplace_back(x, DefectTag{Marker::Bottom, label});
  }
  return with_vacuum_tail(sites, defects, model);
}

LinkPattern top_pattern(int sites, int l1, int l2, int l3, int shift, ModelKind model,
                        Bookkeeping mode) {
  if (l3 < std::abs(l1 - l2) || l3 > l1 + l2 || (l1 + l2 + l3) % 2 != 0) {
    throw TriangleError("top sector " + std::to_string(l3) + " not in the fusion of " +
                        std::to_string(l1) + " and " + std::to_string(l2));
  }
  check_capacity(sites, l3, model);
  std::vector<DefectTag> tags;
  if (mode == Bookkeeping::Markers) {
    tags.assign(l3, DefectTag{Marker::Top, 0});
  } else {
    const int from_middle = (l2 + l3 - l1) / 2;
    const int first_bottom = (l1 + l2 - l3) / 2;
    for (int j = 0; j < from_middle; ++j) tags.push_back({Marker::Middle, l2 - 1 - j});
    for (int label = first_bottom; label < l1; ++label) tags.push_back({Marker::Bottom, label});
  }
  std::vector<std::pair<int, DefectTag>> defects;
  for (int x = 0; x < l3; ++x) defects.emplace_back(x, tags[mod(x - shift, l3)]);
  return with_vacuum_tail(sites, defects, model);
}

std::vector<LinkPattern> enumerate_patterns(int sites, int defects, ModelKind model, Marker marker) {
  std::vector<LinkPattern> out;
  std::vector<unsigned> sym(sites);
  const unsigned dsym = defect_symbol({marker, 0});
  const Bookkeeping mode = Bookkeeping::Markers;
  std::function<void(int, int, int)> rec = [&](int i, int depth, int left) {
    const int remaining = sites - i;
    if (depth + left > remaining) return;
    if (i == sites) {
      LinkPattern p(sites);
      Code c = 0;
      for (int k = 0; k < sites; ++k) c |= Code(sym[k]) << (kSlotBits * k);
      p = LinkPattern::decode({c}, sites);
      try {
        p.validate(model, mode);
      } catch (const InvalidPattern&) {
        return;
      }
      out.push_back(p);
      return;
    }
    if (model == ModelKind::On) {
      sym[i] = kEmpty;
      rec(i + 1, depth, left);
    }
    sym[i] = kOpen;
    rec(i + 1, depth + 1, left);
    if (depth > 0) {
      sym[i] = kClose;
      rec(i + 1, depth - 1, left);
    }
    if (left > 0) {
      sym[i] = dsym;
      rec(i + 1, depth, left - 1);
    }
  };
  rec(0, 0, defects);
  return out;
}

}  // namespace loop3pt::lp
