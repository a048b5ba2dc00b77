#include "loop3pt/correlator/correlator.hpp"

#include "loop3pt/linkpattern/bilinear.hpp"
#include "loop3pt/linkpattern/states.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace loop3pt {

using lp::Bookkeeping;
using lp::DefectRules;
using lp::DefectTag;
using lp::LinkPattern;
using lp::Marker;
using lp::StateVector;

// ---------------------------------------------------------------- plans ----

EnclosurePlan EnclosurePlan::standard(int l1, int l2, int l3) {
  EnclosurePlan plan;
  plan.l1 = l1;
  plan.l2 = l2;
  plan.l3 = l3;
  if (l1 <= l2 + l3 || (l1 - l2 - l3) % 2 != 0) {
    throw PlanMismatch("enclosures need l1 > l2 + l3 with l1 - l2 - l3 even");
  }
  const int e = (l1 - l2 - l3) / 2;
  for (int i = 0; i < l3; ++i) plan.to_top.push_back(i);
  for (int i = 0; i < e; ++i) plan.enclosures.emplace_back(l3 + i, l1 - 1 - i);
  for (int i = 0; i < l2; ++i) plan.to_middle.emplace_back(l3 + e + i, i);
  return plan;
}

void EnclosurePlan::validate() const {
  std::vector<int> used(l1, 0);
  auto use = [&](int label) {
    if (label < 0 || label >= l1) throw PlanMismatch("plan uses bottom label outside 0..l1-1");
    if (used[label]++) throw PlanMismatch("plan uses a bottom label twice");
  };
  for (auto [a, b] : enclosures) {
    use(a);
    use(b);
  }
  std::vector<int> mid_used(l2, 0);
  for (auto [a, q] : to_middle) {
    use(a);
    if (q < 0 || q >= l2 || mid_used[q]++) throw PlanMismatch("plan middle labels invalid");
  }
  for (int a : to_top) use(a);
  if (static_cast<int>(to_middle.size()) != l2) throw PlanMismatch("every middle leg must reach the bottom field");
  if (static_cast<int>(to_top.size()) != l3) throw PlanMismatch("every top leg must reach the bottom field");
  if (std::count(used.begin(), used.end(), 1) != l1) throw PlanMismatch("plan leaves bottom legs unassigned");
  if (l1 > lp::kMaxLabel) throw PlanMismatch("too many legs");
}

// ---------------------------------------------------------------- specs ----

bool CorrelatorSpec::has_spin() const {
  return std::any_of(fields.begin(), fields.end(), [](const FieldLabel& f) { return f.has_spin(); });
}

void CorrelatorSpec::validate() const {
  precision.validate();
  const ModelParams p = params();
  (void)weights_for<double>(model, beta_sq);
  if (L < 1 || L > lp::kMaxSites) throw CapacityError("L must be in 1.." + std::to_string(lp::kMaxSites));
  if (M < 0) throw DomainError("M must be >= 0");
  const int l1 = fields[0].legs(), l2 = fields[1].legs(), l3 = fields[2].legs();
  if ((l1 + l2 + l3) % 2 != 0) throw ParityError("leg numbers must sum to an even integer");
  for (const FieldLabel& f : fields) {
    if (f.legs() > L) throw CapacityError("field " + f.describe() + " has more legs than sites");
    if (model == ModelKind::Psu) {
      if (!f.is_leg() && !f.is_identity()) throw UnsupportedMode("PSU(n) runs take leg fields only");
      if (f.legs() % 2 != 0) throw ParityError("PSU(n) fields need an even number of legs");
      if (L % 2 != 0) throw ParityError("PSU(n) needs even L");
    }
  }
  if (enclosure) {
    enclosure->validate();
    if (enclosure->l1 != l1 || enclosure->l2 != l2 || enclosure->l3 != l3) {
      throw PlanMismatch("enclosure plan leg numbers differ from the fields");
    }
    if (has_spin()) throw UnsupportedMode("spin fields with enclosures are not implemented");
    for (const FieldLabel& f : fields) {
      if (!f.is_leg()) throw UnsupportedMode("enclosures with diagonal fields are not implemented");
    }
  } else if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) {
    throw TriangleError("legs (" + std::to_string(l1) + "," + std::to_string(l2) + "," +
                        std::to_string(l3) + ") violate the triangle rule");
  }
  if (has_spin()) {
    for (const FieldLabel& f : fields) {
      if (!f.is_leg()) throw UnsupportedMode("spin fields with diagonal fields are not implemented");
    }
  }
  (void)p;
}

ZLayout ZLayout::of(const FieldLabel& a, const FieldLabel& b, const FieldLabel& c,
                    const ModelParams& p) {
  (void)p;
  ZLayout z;
  z.bottom_legs = a.legs();
  z.middle_legs = b.legs();
  z.top_legs = c.legs();
  auto seam_field = [](const FieldLabel& f) { return !f.is_leg() && !f.is_identity(); };
  std::vector<const FieldLabel*> diag;
  for (const FieldLabel* f : {&a, &b, &c}) {
    if (seam_field(*f)) diag.push_back(f);
  }
  if (diag.empty()) return z;
  for (const FieldLabel* f : diag) {
    if (f->s() != diag.front()->s()) throw UnsupportedMode("diagonal fields with different s");
  }
  z.seam_w = diag.front()->diagonal_weight();
  const bool middle_trivial = b.is_identity();
  if (seam_field(b)) {
    if (seam_field(c)) throw UnsupportedMode("diagonal fields in the middle and on top");
    z.seam_bottom = true;
  } else if (seam_field(a)) {
    z.seam_bottom = true;
    z.seam_top = middle_trivial;
  } else {
    z.seam_top = true;
    z.seam_bottom = middle_trivial;
  }
  return z;
}

// ---------------------------------------------------------------- values ---

double ZValue::log10_abs() const {
  return std::log10(std::hypot(re, im)) + static_cast<double>(exp2) * std::log10(2.0);
}

double ZValue::ratio_to(const ZValue& other) const {
  return re / other.re * std::exp2(static_cast<double>(exp2 - other.exp2));
}

namespace {

template <class S>
ZValue to_zvalue(const Complex<S>& z, long exp2) {
  using std::abs;
  const S big = std::max(abs(z.re), abs(z.im));
  ZValue out;
  if (big == 0) return out;
  const long e = exponent2(big);
  out.re = to_double(scale2(z.re, -e));
  out.im = to_double(scale2(z.im, -e));
  out.exp2 = exp2 + e;
  return out;
}

template <class S>
ZValue to_zvalue(const Scaled<S>& z) {
  return to_zvalue(Complex<S>{z.mantissa, S(0)}, z.exp2);
}

// ---------------------------------------------------------------- engine ---

template <class S>
struct Engine {
  int L = 0;
  int M = 0;
  ModelKind model = ModelKind::On;
  VertexWeightsT<S> weights;
  S n{0};

  Engine(const CorrelatorSpec& spec)
      : L(spec.L), M(spec.rows()), model(spec.model),
        weights(weights_for<S>(spec.model, spec.beta_sq)), n(loop_weight_of<S>(spec.beta_sq)) {}

  StateVector<S> rows(StateVector<S> v, const S& w, bool seam, const DefectRules& rules,
                      int prune) const {
    RowContext<S> ctx{weights, n, w, &rules, true};
    for (int t = 0; t < M; ++t) v = apply_transfer_row(v, ctx, seam, prune);
    return v;
  }

  Scaled<S> project(const StateVector<S>& v, const LinkPattern& top, const S& w,
                    const DefectRules& rules) const {
    S total = 0;
    for (const auto& [c, coef] : v.entries()) {
      const lp::PairOutcome o = lp::pattern_pair(LinkPattern::decode({c}, L), top, rules);
      if (o.valid) total += coef * lp::pair_weight(o, n, w);
    }
    return {total, v.exp2()};
  }
};

template <class S>
S seam_weight(const ZLayout& layout, const S& n) {
  if (!layout.seam_bottom && !layout.seam_top) return n;
  return S(layout.seam_w);
}

// Lower halves T^M|ψ⟩ keyed by (legs, seam, seam weight), shared between the
// statistical sums of one run.
template <class S>
using LowerCache = std::map<std::tuple<int, bool, double>, StateVector<S>>;

template <class S>
Scaled<S> z_markers_impl(const CorrelatorSpec& spec, const ZLayout& z, LowerCache<S>* cache = nullptr) {
  Engine<S> eng(spec);
  const S w = seam_weight(z, eng.n);
  const DefectRules markers = DefectRules::markers();
  auto lower = [&] {
    StateVector<S> v = lp::single<S>(
        lp::bottom_pattern(spec.L, z.bottom_legs, 0, spec.model, Bookkeeping::Markers), Bookkeeping::Markers);
    return eng.rows(std::move(v), w, z.seam_bottom, DefectRules::none(), 0);
  };
  StateVector<S> v(spec.L, Bookkeeping::Markers);
  if (cache) {
    const auto key = std::make_tuple(z.bottom_legs, z.seam_bottom, z.seam_bottom ? z.seam_w : 0.0);
    auto it = cache->find(key);
    if (it == cache->end()) it = cache->emplace(key, lower()).first;
    v = it->second;
  } else {
    v = lower();
  }
  if (z.middle_legs > 0) {
    MiddleOperator op{z.middle_legs, 0, MiddleMode::Plain, true};
    v = apply_middle_operator(v, op, markers);
  }
  v = eng.rows(std::move(v), w, z.seam_top, markers, z.top_legs);
  if (z.top_legs == 0 && z.bottom_legs != z.middle_legs) return {S(0), 0};
  const LinkPattern top = z.top_legs > 0
                              ? lp::top_pattern(spec.L, z.bottom_legs, z.middle_legs, z.top_legs, 0,
                                                spec.model, Bookkeeping::Markers)
                              : lp::vacuum_pattern(spec.L, spec.model);
  return eng.project(v, top, w, markers);
}

// Cyclic relabelling of bottom defects: label → label + shift (mod legs).
template <class S>
StateVector<S> shift_bottom_labels(const StateVector<S>& v, int legs, int shift) {
  if (shift == 0) return v;
  return lp::map_patterns(v, [&](const LinkPattern& p) {
    std::vector<std::pair<int, int>> arcs;
    std::vector<int> odd;
    std::vector<std::pair<int, DefectTag>> defects;
    for (int i = 0; i < p.sites(); ++i) {
      if (p.defect_at(i)) {
        DefectTag t = p.tag(i);
        if (t.marker == Marker::Bottom) t.label = (t.label + shift) % legs;
        defects.emplace_back(i, t);
      } else if (p.arc_at(i) && i < p.partner(i)) {
        arcs.emplace_back(i, p.partner(i));
        if (p.parity(i)) odd.push_back(i);
      }
    }
    return LinkPattern::from_parts(p.sites(), arcs, defects, odd);
  });
}

// Top pattern for labelled bookkeeping, either the default spin layout or the
// one dictated by an enclosure plan.
LinkPattern labelled_top(const CorrelatorSpec& spec, int l1, int l2, int l3, int shift,
                         const EnclosurePlan* plan) {
  if (!plan) return lp::top_pattern(spec.L, l1, l2, l3, shift, spec.model, Bookkeeping::Labelled);
  std::vector<std::pair<int, DefectTag>> defects;
  for (int y = 0; y < l3; ++y) {
    const int src = ((y - shift) % l3 + l3) % l3;
    defects.emplace_back(y, DefectTag{Marker::Bottom, plan->to_top[src]});
  }
  std::vector<std::pair<int, int>> arcs;
  if (spec.model == ModelKind::Psu) {
    for (int x = l3; x + 1 < spec.L; x += 2) arcs.emplace_back(x, x + 1);
  }
  return LinkPattern::from_parts(spec.L, arcs, defects);
}

DefectRules labelled_rules(const EnclosurePlan* plan) {
  if (!plan) return DefectRules::labelled();
  std::vector<std::pair<DefectTag, DefectTag>> allowed;
  for (auto [a, b] : plan->enclosures) allowed.push_back({{Marker::Bottom, a}, {Marker::Bottom, b}});
  for (auto [a, q] : plan->to_middle) allowed.push_back({{Marker::Bottom, a}, {Marker::Middle, q}});
  return DefectRules::pairs(allowed);
}

// Number of shift triples (with σ₁ = 0 when fix_bottom) under which the
// canonical σ = 0 connection pattern remains label-consistent. Every lattice
// configuration is counted this many times in the sum over shifts.
int multiplicity(int l1, int l2, int l3, bool fix_bottom, const EnclosurePlan* plan) {
  const int e1 = std::max(l1, 1), e2 = std::max(l2, 1), e3 = std::max(l3, 1);
  auto mod = [](int a, int m) { return ((a % m) + m) % m; };
  // Tags on the top at shift 0, as (marker, label).
  std::vector<DefectTag> top0;
  std::vector<std::array<int, 3>> pairs;  // kind, a, b: 0 b-m, 1 b-top, 2 m-top, 3 b-b
  if (plan) {
    for (int y = 0; y < l3; ++y) top0.push_back({Marker::Bottom, plan->to_top[y]});
    for (auto [a, b] : plan->enclosures) pairs.push_back({3, a, b});
    for (auto [a, q] : plan->to_middle) pairs.push_back({0, a, q});
    for (int y = 0; y < l3; ++y) pairs.push_back({1, plan->to_top[y], y});
  } else {
    const int from_middle = (l2 + l3 - l1) / 2, first_bottom = (l1 + l2 - l3) / 2;
    for (int j = 0; j < from_middle; ++j) top0.push_back({Marker::Middle, l2 - 1 - j});
    for (int b = first_bottom; b < l1; ++b) top0.push_back({Marker::Bottom, b});
    for (int i = 0; i < first_bottom; ++i) pairs.push_back({0, i, i});
    for (int y = 0; y < l3; ++y) {
      if (top0[y].marker == Marker::Bottom) {
        pairs.push_back({1, top0[y].label, y});
      } else {
        pairs.push_back({2, top0[y].label, y});
      }
    }
  }
  std::set<std::pair<int, int>> enclosure_set;
  std::set<std::pair<int, int>> middle_set;
  if (plan) {
    for (auto [a, b] : plan->enclosures) {
      enclosure_set.insert({a, b});
      enclosure_set.insert({b, a});
    }
    for (auto [a, q] : plan->to_middle) middle_set.insert({a, q});
  }
  int count = 0;
  for (int s1 = 0; s1 < (fix_bottom ? 1 : e1); ++s1) {
    for (int s2 = 0; s2 < e2; ++s2) {
      for (int s3 = 0; s3 < e3; ++s3) {
        bool ok = true;
        for (const auto& [kind, a, b] : pairs) {
          const int la = mod(a + s1, e1);
          if (kind == 0) {
            const int lq = mod(b - s2, e2);
            ok = plan ? middle_set.count({la, lq}) > 0 : la == lq;
          } else if (kind == 3) {
            ok = enclosure_set.count({la, mod(b + s1, e1)}) > 0;
          } else {
            const DefectTag t = top0[mod(b - s3, e3)];
            if (kind == 1) {
              ok = t.marker == Marker::Bottom && t.label == la;
            } else {
              ok = t.marker == Marker::Middle && t.label == mod(a - s2, e2);
            }
          }
          if (!ok) break;
        }
        count += ok ? 1 : 0;
      }
    }
  }
  return std::max(count, 1);
}

template <class S>
AmplitudeTable<S> amplitudes(const CorrelatorSpec& spec, const ZLayout& z, bool fix_bottom,
                             const EnclosurePlan* plan) {
  Engine<S> eng(spec);
  const int l1 = z.bottom_legs, l2 = z.middle_legs, l3 = z.top_legs;
  AmplitudeTable<S> table;
  table.extent = {std::max(l1, 1), std::max(l2, 1), std::max(l3, 1)};
  table.d.assign(table.extent[0] * table.extent[1] * table.extent[2], Scaled<S>{});
  const DefectRules none = DefectRules::none();
  const DefectRules rules = labelled_rules(plan);
  StateVector<S> bottom = lp::single<S>(
      lp::bottom_pattern(spec.L, l1, 0, spec.model, Bookkeeping::Labelled), Bookkeeping::Labelled);
  bottom = eng.rows(std::move(bottom), eng.n, false, none, 0);
  std::vector<LinkPattern> tops;
  for (int s3 = 0; s3 < table.extent[2]; ++s3) {
    if (l3 > 0) {
      tops.push_back(labelled_top(spec, l1, l2, l3, s3, plan));
    } else {
      tops.push_back(lp::vacuum_pattern(spec.L, spec.model));
    }
  }
  for (int s1 = 0; s1 < (fix_bottom ? 1 : table.extent[0]); ++s1) {
    const StateVector<S> b1 = l1 > 0 ? shift_bottom_labels(bottom, l1, s1) : bottom;
    for (int s2 = 0; s2 < table.extent[1]; ++s2) {
      StateVector<S> v = b1;
      if (l2 > 0) {
        MiddleOperator op{l2, s2, MiddleMode::Labelled, true};
        v = apply_middle_operator(v, op, rules);
      }
      v = eng.rows(std::move(v), eng.n, false, rules, l3);
      for (int s3 = 0; s3 < table.extent[2]; ++s3) table.at(s1, s2, s3) = eng.project(v, tops[s3], eng.n, rules);
    }
  }
  return table;
}

// Phase e^{iπ s σ} for a leg field with ℓ legs and integer conformal spin j = r s:
// s σ = 2 j σ / ℓ exactly.
template <class S>
Complex<S> phase(const FieldLabel& f, int sigma) {
  using std::cos;
  using std::sin;
  if (!f.is_leg() || f.s() == 0.0) return {S(1), S(0)};
  const long j = std::lround(f.r() * f.s());
  const S angle = pi_value<S>() * S(2 * j * sigma) / S(f.legs());
  return {cos(angle), sin(angle)};
}

struct PhaseSum {
  long exp2 = 0;
  double lost_digits = 0.0;  // log10(max|d| / |Z|)
};

template <class S>
Complex<S> phase_sum(const AmplitudeTable<S>& t, const std::array<const FieldLabel*, 3>& f,
                     bool fix_bottom, int mult, PhaseSum& info) {
  using std::abs;
  long emax = std::numeric_limits<long>::min();
  for (const auto& d : t.d) {
    if (d.mantissa != 0) emax = std::max(emax, d.exp2 + exponent2(d.mantissa));
  }
  Complex<S> sum;
  if (emax == std::numeric_limits<long>::min()) {
    info.exp2 = 0;
    return sum;
  }
  S dmax = 0;
  for (int a = 0; a < (fix_bottom ? 1 : t.extent[0]); ++a) {
    for (int b = 0; b < t.extent[1]; ++b) {
      for (int c = 0; c < t.extent[2]; ++c) {
        const Scaled<S>& d = t.at(a, b, c);
        const S m = scale2(d.mantissa, d.exp2 - emax);
        dmax = std::max(dmax, S(abs(m)));
        const Complex<S> ph = phase<S>(*f[0], a) * phase<S>(*f[1], b) * phase<S>(*f[2], c);
        sum = sum + ph * m;
      }
    }
  }
  sum = sum * (S(1) / S(mult));
  info.exp2 = emax;
  const S mag = sum.abs();
  info.lost_digits = mag == 0 ? std::numeric_limits<double>::infinity()
                              : to_double(log10(dmax)) - to_double(log10(mag));
  return sum;
}

template <class S>
Complex<S> cdiv(const Complex<S>& a, const Complex<S>& b) {
  const S den = b.norm2();
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

template <class S>
Complex<S> csqrt(const Complex<S>& z) {
  using std::sqrt;
  const S r = z.abs();
  S re = sqrt((r + z.re) / 2);
  S im = sqrt((r - z.re) / 2);
  if (z.im < 0) im = -im;
  return {re, im};
}

// C = Z123/Z220 · sqrt(Z202 Z000 / (Z101 Z303)), with exponents kept apart.
template <class S>
Complex<S> assemble(const std::array<std::pair<Complex<S>, long>, 6>& z) {
  const auto& [m123, e123] = z[0];
  const auto& [m220, e220] = z[1];
  const auto& [m202, e202] = z[2];
  const auto& [m000, e000] = z[3];
  const auto& [m101, e101] = z[4];
  const auto& [m303, e303] = z[5];
  Complex<S> rad = cdiv(m202 * m000, m101 * m303);
  long e = e202 + e000 - e101 - e303;
  if (e % 2 != 0) {
    rad = rad * S(2);
    e -= 1;
  }
  Complex<S> root = csqrt(rad);
  Complex<S> c = cdiv(m123, m220) * root;
  const long total = e123 - e220 + e / 2;
  return {scale2(c.re, total), scale2(c.im, total)};
}

template <class S>
std::array<ZLayout, 6> layouts(const CorrelatorSpec& spec) {
  const ModelParams p = spec.params();
  const FieldLabel id = FieldLabel::identity(p);
  const auto& [f1, f2, f3] = spec.fields;
  return {ZLayout::of(f1, f2, f3, p), ZLayout::of(f2, f2, id, p), ZLayout::of(f2, id, f2, p),
          ZLayout::of(id, id, id, p), ZLayout::of(f1, id, f1, p), ZLayout::of(f3, id, f3, p)};
}

template <class S>
void fill_result(RunResult& r, const std::array<std::pair<Complex<S>, long>, 6>& z) {
  ZValue* out[6] = {&r.z123, &r.z220, &r.z202, &r.z000, &r.z101, &r.z303};
  for (int i = 0; i < 6; ++i) *out[i] = to_zvalue(z[i].first, z[i].second);
  const Complex<S> c = assemble<S>(z);
  r.c123_re = to_double(c.re);
  r.c123_im = to_double(c.im);
  r.c123_abs = to_double(c.abs());
}

// Spin or enclosure run at precision S; returns false when cancellation ate
// more than half of the working digits in some statistical sum.
template <class S>
bool labelled_run(const CorrelatorSpec& spec, RunResult& r, int digits) {
  const ModelParams p = spec.params();
  const FieldLabel id = FieldLabel::identity(p);
  const auto& [f1, f2, f3] = spec.fields;
  const std::array<std::array<const FieldLabel*, 3>, 6> triples = {{{&f1, &f2, &f3},
                                                                     {&f2, &f2, &id},
                                                                     {&f2, &id, &f2},
                                                                     {&id, &id, &id},
                                                                     {&f1, &id, &f1},
                                                                     {&f3, &id, &f3}}};
  const auto lay = layouts<S>(spec);
  const EnclosurePlan* plan = spec.enclosure ? &*spec.enclosure : nullptr;
  std::array<std::pair<Complex<S>, long>, 6> z;
  bool clean = true;
  LowerCache<double> cache;
  for (int i = 0; i < 6; ++i) {
    const bool three_point = i == 0;
    const bool spinless = std::none_of(triples[i].begin(), triples[i].end(),
                                       [](const FieldLabel* f) { return f->has_spin(); });
    if (spinless && (!three_point || !plan)) {
      // Without phases the labelled sum equals the marker-only sum, which
      // needs neither labels nor extended precision.
      const Scaled<double> v = z_markers_impl<double>(spec, lay[i], &cache);
      z[i] = {Complex<S>{S(v.mantissa), S(0)}, v.exp2};
      continue;
    }
    const bool fix_bottom = !three_point;
    const EnclosurePlan* pl = three_point ? plan : nullptr;
    const AmplitudeTable<S> t = amplitudes<S>(spec, lay[i], fix_bottom, pl);
    const int mult = multiplicity(lay[i].bottom_legs, lay[i].middle_legs, lay[i].top_legs, fix_bottom, pl);
    PhaseSum info;
    z[i].first = phase_sum(t, triples[i], fix_bottom, mult, info);
    z[i].second = info.exp2;
    if (info.lost_digits > 0.5 * digits) clean = false;
  }
  fill_result<S>(r, z);
  r.digits_used = digits;
  r.cancellation_warning = !clean;
  return clean;
}

}  // namespace

Scaled<double> z_markers(const CorrelatorSpec& spec, const ZLayout& layout) {
  return z_markers_impl<double>(spec, layout);
}

Scaled<double> z123(const CorrelatorSpec& spec) {
  spec.validate();
  const ModelParams p = spec.params();
  return z_markers(spec, ZLayout::of(spec.fields[0], spec.fields[1], spec.fields[2], p));
}

template <class S>
Scaled<S> z123_amplitude(const CorrelatorSpec& spec, int s1, int s2, int s3) {
  spec.validate();
  const ModelParams p = spec.params();
  const ZLayout z = ZLayout::of(spec.fields[0], spec.fields[1], spec.fields[2], p);
  Engine<S> eng(spec);
  const EnclosurePlan* plan = spec.enclosure ? &*spec.enclosure : nullptr;
  const DefectRules rules = labelled_rules(plan);
  StateVector<S> v = lp::single<S>(
      lp::bottom_pattern(spec.L, z.bottom_legs, s1, spec.model, Bookkeeping::Labelled), Bookkeeping::Labelled);
  v = eng.rows(std::move(v), eng.n, false, DefectRules::none(), 0);
  if (z.middle_legs > 0) v = apply_middle_operator(v, MiddleOperator{z.middle_legs, s2, MiddleMode::Labelled, true}, rules);
  v = eng.rows(std::move(v), eng.n, false, rules, z.top_legs);
  const LinkPattern top = z.top_legs > 0 ? labelled_top(spec, z.bottom_legs, z.middle_legs, z.top_legs, s3, plan)
                                         : lp::vacuum_pattern(spec.L, spec.model);
  return eng.project(v, top, eng.n, rules);
}

template <class S>
std::pair<AmplitudeTable<S>, Complex<S>> spin_z123(const CorrelatorSpec& spec, long* exp2) {
  spec.validate();
  if (spec.enclosure) throw UnsupportedMode("spin amplitudes with enclosures are not implemented");
  const ModelParams p = spec.params();
  const ZLayout z = ZLayout::of(spec.fields[0], spec.fields[1], spec.fields[2], p);
  if (z.seam_bottom || z.seam_top) throw UnsupportedMode("spin amplitudes with diagonal fields are not implemented");
  AmplitudeTable<S> t = amplitudes<S>(spec, z, false, nullptr);
  PhaseSum info;
  const int mult = multiplicity(z.bottom_legs, z.middle_legs, z.top_legs, false, nullptr);
  Complex<S> sum = phase_sum(t, {&spec.fields[0], &spec.fields[1], &spec.fields[2]}, false, mult, info);
  if (exp2) *exp2 = info.exp2;
  return {std::move(t), sum};
}

template <class S>
Scaled<S> enclosure_z(const CorrelatorSpec& spec) {
  spec.validate();
  if (!spec.enclosure) throw PlanMismatch("enclosure_z needs an enclosure plan");
  const ModelParams p = spec.params();
  const ZLayout z = ZLayout::of(spec.fields[0], spec.fields[1], spec.fields[2], p);
  const AmplitudeTable<S> t = amplitudes<S>(spec, z, false, &*spec.enclosure);
  PhaseSum info;
  const int mult = multiplicity(z.bottom_legs, z.middle_legs, z.top_legs, false, &*spec.enclosure);
  Complex<S> sum = phase_sum(t, {&spec.fields[0], &spec.fields[1], &spec.fields[2]}, false, mult, info);
  return {sum.re, info.exp2};
}

RunResult c123(const CorrelatorSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  r.spec = spec;
  if (spec.has_spin() || spec.enclosure) {
    const int digits = std::max(50, spec.precision.significant_digits);
    bool clean = false;
    if (digits <= 50) clean = labelled_run<Real50>(spec, r, 50);
    if (!clean) labelled_run<Real100>(spec, r, 100);
  } else {
    const auto lay = layouts<double>(spec);
    std::array<std::pair<Complex<double>, long>, 6> z;
    LowerCache<double> cache;
    for (int i = 0; i < 6; ++i) {
      const int same = static_cast<int>(std::find(lay.begin(), lay.begin() + i, lay[i]) - lay.begin());
      if (same < i) {
        z[i] = z[same];
        continue;
      }
      const Scaled<double> v = z_markers_impl<double>(spec, lay[i], &cache);
      z[i] = {Complex<double>{v.mantissa, 0.0}, v.exp2};
    }
    fill_result<double>(r, z);
    r.digits_used = 15;
  }
  if (spec.scaling) r.scaled = apply_scaling(r.c123_abs, spec.scaling->alpha, spec.scaling->f, spec.L);
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double apply_scaling(double c, int alpha, double f, int L) {
  if (alpha < -1 || alpha > 1) throw DomainError("alpha must be -1, 0 or 1");
  return std::pow(M_PI / L, alpha) * f * c;
}

double apply_scaling(const RunResult& result, int alpha, double f) {
  return apply_scaling(result.c123_abs, alpha, f, result.spec.L);
}

#define LOOP3PT_INSTANTIATE(S)                                                                  \
  template Scaled<S> z123_amplitude<S>(const CorrelatorSpec&, int, int, int);                   \
  template std::pair<AmplitudeTable<S>, Complex<S>> spin_z123<S>(const CorrelatorSpec&, long*); \
  template Scaled<S> enclosure_z<S>(const CorrelatorSpec&);

LOOP3PT_INSTANTIATE(double)
LOOP3PT_INSTANTIATE(Real50)
LOOP3PT_INSTANTIATE(Real100)

}  // namespace loop3pt
