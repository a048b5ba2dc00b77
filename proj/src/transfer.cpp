#include "loop3pt/transfer/transfer.hpp"

#include "loop3pt/linkpattern/pattern.hpp"

#include <cmath>
#include <vector>

namespace loop3pt {

using lp::Code;

template <class S>
VertexWeightsT<S> weights_for(ModelKind model, double beta_sq) {
  VertexWeightsT<S> w;
  if (model == ModelKind::Psu) {
    if (!(beta_sq > 0.0 && beta_sq <= 1.0)) throw RangeError("PSU(n) needs beta^2 in (0, 1]");
    w.rho[7] = 1;
    w.rho[8] = 1;
    return w;
  }
  if (!(beta_sq >= 0.5 && beta_sq <= 1.5)) throw RangeError("O(n) needs beta^2 in [1/2, 3/2]");
  using std::cos;
  using std::sin;
  const S pi = pi_value<S>();
  const S b2 = S(beta_sq);
  w.rho[0] = 1 + sin(pi * b2 / 4) + sin(3 * pi * b2 / 4) - sin(5 * pi * b2 / 4);
  const S mid = 2 * sin(pi * b2 / 2) * sin(pi / 4 * (3 * b2 / 2 + 1));
  for (int i = 1; i <= 4; ++i) w.rho[i] = mid;
  w.rho[5] = w.rho[6] = 1 + sin(3 * pi * b2 / 4);
  w.rho[7] = w.rho[8] = sin(pi * b2 / 4) + cos(pi * b2 / 2);
  return w;
}

namespace {

enum class Join { Dead, Plain, Loop, OddLoop };

inline bool odd_arc(Code c, int n, int i) {
  const unsigned s = lp::slot(c, i);
  if (lp::is_open(s)) return s == lp::kOpenOdd;
  return lp::slot(c, lp::partner(c, n, i)) == lp::kOpenOdd;
}

// Connects the strands ending at adjacent slots i and i+1 and empties both.
inline Join join(Code& c, int n, int i, const lp::DefectRules& rules) {
  const int j = i + 1;
  const unsigned si = lp::slot(c, i), sj = lp::slot(c, j);
  if (lp::is_open(si) && sj == lp::kClose) {
    c = lp::with_slot(lp::with_slot(c, i, lp::kEmpty), j, lp::kEmpty);
    return si == lp::kOpenOdd ? Join::OddLoop : Join::Loop;
  }
  const bool di = lp::is_defect(si), dj = lp::is_defect(sj);
  if (di && dj) {
    if (!rules.can_contract(lp::tag_of(si), lp::tag_of(sj))) return Join::Dead;
    c = lp::with_slot(lp::with_slot(c, i, lp::kEmpty), j, lp::kEmpty);
    return Join::Plain;
  }
  if (di || dj) {
    const int arc = di ? j : i;
    const int p = lp::partner(c, n, arc);
    c = lp::with_slot(c, p, di ? si : sj);
    c = lp::with_slot(lp::with_slot(c, i, lp::kEmpty), j, lp::kEmpty);
    return Join::Plain;
  }
  const int pi = lp::partner(c, n, i), pj = lp::partner(c, n, j);
  const bool odd = odd_arc(c, n, i) != odd_arc(c, n, j);
  const int lo = std::min(pi, pj), hi = std::max(pi, pj);
  c = lp::with_slot(lp::with_slot(c, i, lp::kEmpty), j, lp::kEmpty);
  c = lp::with_slot(lp::with_slot(c, lo, odd ? lp::kOpenOdd : lp::kOpen), hi, lp::kClose);
  return Join::Plain;
}

template <class S>
struct Sweep {
  using Map = typename lp::StateVector<S>::Map;
  const RowContext<S>& ctx;
  int slots;

  void emit(Map& out, Code c, const S& coef) const {
    auto [it, inserted] = out.try_emplace(c, coef);
    if (!inserted) it->second += coef;
  }

  // Emits coef * rho * (loop factor) after joining slots i, i+1 of c.
  void emit_join(Map& out, Code c, int i, const S& coef, const S& rho, bool new_arc) const {
    const Join r = join(c, slots, i, *ctx.rules);
    if (r == Join::Dead) return;
    if (new_arc) c = lp::with_slot(lp::with_slot(c, i, lp::kOpen), i + 1, lp::kClose);
    if (r == Join::Plain) {
      emit(out, c, coef * rho);
    } else {
      const S& f = r == Join::Loop ? ctx.n : ctx.w;
      if (f != 0) emit(out, c, coef * rho * f);
    }
  }

  void vertex(const Map& in, Map& out, int k) const {
    const auto& rho = ctx.weights.rho;
    const int i = k - 1, j = k;
    for (const auto& [c, coef] : in) {
      const unsigned left = lp::slot(c, i), bottom = lp::slot(c, j);
      if (left == lp::kEmpty && bottom == lp::kEmpty) {
        if (rho[0] != 0) emit(out, c, coef * rho[0]);
        if (rho[4] != 0) {
          emit(out, lp::with_slot(lp::with_slot(c, i, lp::kOpen), j, lp::kClose), coef * rho[4]);
        }
      } else if (bottom == lp::kEmpty) {
        if (rho[1] != 0) emit(out, c, coef * rho[1]);
        if (rho[5] != 0) {
          emit(out, lp::with_slot(lp::with_slot(c, i, lp::kEmpty), j, left), coef * rho[5]);
        }
      } else if (left == lp::kEmpty) {
        if (rho[2] != 0) emit(out, c, coef * rho[2]);
        if (rho[6] != 0) {
          emit(out, lp::with_slot(lp::with_slot(c, j, lp::kEmpty), i, bottom), coef * rho[6]);
        }
      } else {
        if (rho[7] != 0) emit(out, c, coef * rho[7]);
        if (rho[3] != 0) emit_join(out, c, i, coef, rho[3], false);
        if (rho[8] != 0) emit_join(out, c, i, coef, rho[8], true);
      }
    }
  }
};

int count_defects(Code c, int n) {
  int d = 0;
  for (int i = 0; i < n; ++i) d += lp::is_defect(lp::slot(c, i)) ? 1 : 0;
  return d;
}

}  // namespace

template <class S>
lp::StateVector<S> apply_transfer_row(const lp::StateVector<S>& v, const RowContext<S>& ctx,
                                      bool seam, int prune_below) {
  const int L = v.sites();
  if (L + 2 > lp::kMaxSlots) throw CapacityError("row sweep needs L <= " + std::to_string(lp::kMaxSites));
  if (ctx.rules == nullptr) throw ModeMismatch("transfer row needs defect rules");
  Sweep<S> sweep{ctx, L + 2};
  using Map = typename lp::StateVector<S>::Map;
  Map a, b;
  a.reserve(2 * v.size());
  const bool packed = ctx.weights.fully_packed();
  const Code wrap_close = Code(lp::kClose) << (lp::kSlotBits * (L + 1));
  const unsigned wrap_open = seam ? lp::kOpenOdd : lp::kOpen;
  for (const auto& [c, coef] : v.entries()) {
    const Code shifted = c << lp::kSlotBits;
    if (!packed) sweep.emit(a, shifted, coef);
    sweep.emit(a, shifted | Code(wrap_open) | wrap_close, coef);
  }
  for (int k = 1; k <= L; ++k) {
    b.clear();
    b.reserve(a.size() * 2);
    sweep.vertex(a, b, k);
    std::swap(a, b);
  }
  lp::StateVector<S> out(L, v.mode());
  out.set_exp2(v.exp2());
  out.set_seam(v.seam());
  auto& entries = out.entries();
  entries.reserve(a.size());
  for (const auto& [c0, coef] : a) {
    Code c = c0;
    const bool hl = lp::slot(c, L) != lp::kEmpty, wl = lp::slot(c, L + 1) != lp::kEmpty;
    S value = coef;
    if (hl != wl) continue;
    if (hl) {
      const Join r = join(c, L + 2, L, *ctx.rules);
      if (r == Join::Dead) continue;
      if (r == Join::Loop) value *= ctx.n;
      if (r == Join::OddLoop) value *= ctx.w;
    }
    if (prune_below > 0 && count_defects(c, L) < prune_below) continue;
    if (value == 0) continue;
    auto [it, inserted] = entries.try_emplace(c, value);
    if (!inserted) it->second += value;
  }
  out.cleanup();
  if (ctx.normalize) out.normalize();
  return out;
}

lp::StateVector<double> apply_transfer_row(const lp::StateVector<double>& v, const VertexWeights& w,
                                           double n, const SeamConfig& seam, int prune_below,
                                           const lp::DefectRules& rules) {
  RowContext<double> ctx{w, n, seam.active ? seam.w : n, &rules, true};
  return apply_transfer_row(v, ctx, seam.active, prune_below);
}

lp::DefectTag MiddleOperator::tag_for(int q) const {
  if (mode == MiddleMode::Plain) return {lp::Marker::Middle, 0};
  const int label = ((q - shift) % legs + legs) % legs;
  return {lp::Marker::Middle, label};
}

namespace {

// One orientation choice of the middle insertion: downward half-edges on
// sites [0, down), upward half-edges on sites [0, up).
bool insert_legs(const lp::LinkPattern& in, const MiddleOperator& op, int down, int up,
                 const lp::DefectRules& rules, Code& result) {
  const int L = in.sites();
  std::vector<unsigned> sym(L);
  for (int x = 0; x < L; ++x) sym[x] = in.symbol(x);
  for (int x = down; x < up; ++x) {
    if (!in.empty_at(x)) return false;
  }
  for (int x = 0; x < down; ++x) {
    const lp::DefectTag dtag = op.tag_for(x);
    if (in.empty_at(x)) return false;
    if (in.defect_at(x)) {
      if (!rules.can_contract(lp::tag_of(in.symbol(x)), dtag.code())) return false;
      continue;
    }
    const int p = in.partner(x);
    if (p < down) {
      // Two downward legs joined by an arc from below.
      if (x < p && !rules.can_contract(dtag.code(), op.tag_for(p).code())) return false;
      continue;
    }
    sym[p] = lp::defect_symbol(dtag);
  }
  for (int x = 0; x < down; ++x) sym[x] = lp::kEmpty;
  for (int x = 0; x < up; ++x) sym[x] = lp::defect_symbol(op.tag_for(op.legs - 1 - x));
  result = 0;
  for (int x = 0; x < L; ++x) result |= Code(sym[x]) << (lp::kSlotBits * x);
  return true;
}

}  // namespace

template <class S>
lp::StateVector<S> apply_middle_operator(const lp::StateVector<S>& v, const MiddleOperator& op,
                                         const lp::DefectRules& rules) {
  if ((op.mode == MiddleMode::Labelled) != (v.mode() == lp::Bookkeeping::Labelled)) {
    throw ModeMismatch("middle operator and state use different defect bookkeeping");
  }
  const int L = v.sites();
  const int k = op.legs / 2;
  if (op.legs > L) throw CapacityError("more middle legs than sites");
  struct Variant {
    int down, up;
    double weight;
  };
  std::vector<Variant> variants;
  if (op.legs % 2 == 0) {
    variants.push_back({k, k, 1.0});
  } else if (op.odd_symmetrization) {
    variants.push_back({k + 1, k, 0.5});
    variants.push_back({k, k + 1, 0.5});
  } else {
    variants.push_back({k + 1, k, 1.0});
  }
  lp::StateVector<S> out(L, v.mode());
  out.set_exp2(v.exp2());
  out.set_seam(v.seam());
  for (const auto& [c, coef] : v.entries()) {
    const lp::LinkPattern p = lp::LinkPattern::decode({c}, L);
    for (const Variant& var : variants) {
      Code r = 0;
      if (insert_legs(p, op, var.down, var.up, rules, r)) out.add(r, coef * S(var.weight));
    }
  }
  out.cleanup();
  return out;
}

#define LOOP3PT_INSTANTIATE(S)                                                                 \
  template VertexWeightsT<S> weights_for<S>(ModelKind, double);                                \
  template lp::StateVector<S> apply_transfer_row<S>(const lp::StateVector<S>&,                 \
                                                    const RowContext<S>&, bool, int);          \
  template lp::StateVector<S> apply_middle_operator<S>(const lp::StateVector<S>&,              \
                                                       const MiddleOperator&, const lp::DefectRules&);

LOOP3PT_INSTANTIATE(double)
LOOP3PT_INSTANTIATE(Real50)
LOOP3PT_INSTANTIATE(Real100)

}  // namespace loop3pt
