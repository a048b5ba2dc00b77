#include "loop3pt/oracle/brute_force.hpp"

#include "loop3pt/errors.hpp"

#include <vector>

namespace loop3pt::oracle {

namespace {

// Edge sides of a vertex: 0 bottom, 1 right, 2 top, 3 left.
constexpr int kLinks[9][2][2] = {
    {{-1, -1}, {-1, -1}},  // ρ1
    {{3, 2}, {-1, -1}},    // ρ2
    {{0, 1}, {-1, -1}},    // ρ3
    {{0, 3}, {-1, -1}},    // ρ4
    {{2, 1}, {-1, -1}},    // ρ5
    {{3, 1}, {-1, -1}},    // ρ6
    {{0, 2}, {-1, -1}},    // ρ7
    {{3, 2}, {0, 1}},      // ρ8
    {{0, 3}, {2, 1}},      // ρ9
};

int occupancy(int config, int side) {
  for (const auto& link : kLinks[config]) {
    if (link[0] == side || link[1] == side) return 1;
  }
  return 0;
}

enum class End { None, Bottom, Middle, Top };

class Enumerator {
 public:
  Enumerator(const BruteForceSpec& s, int down, int up) : s_(s), down_(down), up_(up) {
    L_ = s.sites;
    rows_ = 2 * s.half_rows;
    vert_base_ = rows_ * L_;
    upper_base_ = vert_base_ + (rows_ + 1) * L_;
    nodes_ = upper_base_ + L_;
    config_.assign(rows_ * L_, 0);
    // Boundary occupancies.
    bottom_occ_.assign(L_, 0);
    top_occ_.assign(L_, 0);
    for (int x = 0; x < L_; ++x) {
      bottom_occ_[x] = (x < s.bottom_legs || s.model == ModelKind::Psu) ? 1 : 0;
      top_occ_[x] = (x < s.top_legs || s.model == ModelKind::Psu) ? 1 : 0;
    }
  }

  BruteForceResult run() {
    recurse(0, 1.0);
    return result_;
  }

 private:
  int hnode(int t, int x) const { return t * L_ + x; }
  // Vertical edge above vertex row t (t = −1 is the bottom boundary).
  int vnode(int t, int x) const { return vert_base_ + (t + 1) * L_ + x; }
  int upper_node(int x) const { return upper_base_ + x; }
  bool broken(int x) const { return x < std::max(down_, up_); }

  // Required occupancy of the bottom edge of vertex (t, x), −1 if free.
  int bottom_requirement(int t, int x) const {
    if (t == 0) return bottom_occ_[x];
    const int below = occupancy(config_[(t - 1) * L_ + x], 2);
    if (t == s_.half_rows && broken(x)) {
      // lower half must be occupied iff a downward leg sits there; the upper
      // half iff an upward leg does.
      if (below != (x < down_ ? 1 : 0)) return -2;
      return x < up_ ? 1 : 0;
    }
    return below;
  }

  void recurse(int idx, double weight) {
    if (idx == rows_ * L_) {
      finish(weight);
      return;
    }
    const int t = idx / L_, x = idx % L_;
    const int need_bottom = bottom_requirement(t, x);
    if (need_bottom == -2) return;
    for (int c = 0; c < 9; ++c) {
      const double r = s_.rho[c];
      if (r == 0.0) continue;
      if (occupancy(c, 0) != need_bottom) continue;
      if (x > 0 && occupancy(c, 3) != occupancy(config_[idx - 1], 1)) continue;
      if (x == L_ - 1 && occupancy(c, 1) != occupancy(config_[t * L_], 3)) continue;
      if (t == rows_ - 1 && occupancy(c, 2) != top_occ_[x]) continue;
      config_[idx] = c;
      recurse(idx + 1, weight * r);
    }
  }

  void link(int a, int b) {
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }

  void finish(double weight) {
    ++result_.configurations;
    adj_.assign(nodes_, {});
    end_.assign(nodes_, End::None);
    seam_.assign(nodes_, 0);
    for (int t = 0; t < rows_; ++t) {
      const bool seam = t < s_.half_rows ? s_.seam_bottom : s_.seam_top;
      if (seam) seam_[hnode(t, L_ - 1)] = 1;
      for (int x = 0; x < L_; ++x) {
        const int c = config_[t * L_ + x];
        auto side_node = [&](int side) {
          switch (side) {
            case 0:
              if (t == s_.half_rows && broken(x)) return upper_node(x);
              return vnode(t - 1, x);
            case 1:
              return hnode(t, x);
            case 2:
              return vnode(t, x);
            default:
              return hnode(t, (x + L_ - 1) % L_);
          }
        };
        for (const auto& l : kLinks[c]) {
          if (l[0] >= 0) link(side_node(l[0]), side_node(l[1]));
        }
      }
    }
    for (int x = 0; x < L_; ++x) {
      if (x < s_.bottom_legs) {
        end_[vnode(-1, x)] = End::Bottom;
      }
      if (x < s_.top_legs) end_[vnode(rows_ - 1, x)] = End::Top;
      if (x < down_) end_[vnode(s_.half_rows - 1, x)] = End::Middle;
      if (x < up_) end_[upper_node(x)] = End::Middle;
    }
    if (s_.model == ModelKind::Psu) {
      for (int x = s_.bottom_legs; x + 1 < L_; x += 2) link(vnode(-1, x), vnode(-1, x + 1));
      for (int x = s_.top_legs; x + 1 < L_; x += 2) link(vnode(rows_ - 1, x), vnode(rows_ - 1, x + 1));
    }
    std::vector<char> seen(nodes_, 0);
    double w = weight;
    for (int a = 0; a < nodes_; ++a) {
      if (end_[a] == End::None || seen[a]) continue;
      int prev = -1, cur = a;
      while (true) {
        seen[cur] = 1;
        int next = -1;
        for (int b : adj_[cur]) {
          if (b != prev) next = b;
        }
        if (next < 0 || (cur != a && end_[cur] != End::None)) break;
        prev = cur;
        cur = next;
      }
      if (cur == a || end_[cur] == End::None) return;  // dangling line
      const End e1 = end_[a], e2 = end_[cur];
      if (e1 == e2) return;  // same-kind contraction
    }
    for (int a = 0; a < nodes_; ++a) {
      if (seen[a] || adj_[a].empty()) continue;
      int prev = -1, cur = a, parity = 0;
      do {
        seen[cur] = 1;
        parity ^= seam_[cur];
        int next = adj_[cur][0] == prev ? adj_[cur][1] : adj_[cur][0];
        if (adj_[cur].size() == 2 && adj_[cur][0] == adj_[cur][1]) next = adj_[cur][0];
        prev = cur;
        cur = next;
      } while (cur != a);
      w *= parity ? s_.w : s_.n;
    }
    result_.z += w;
  }

  const BruteForceSpec& s_;
  int down_, up_;
  int L_ = 0, rows_ = 0, vert_base_ = 0, upper_base_ = 0, nodes_ = 0;
  std::vector<int> config_;
  std::vector<int> bottom_occ_, top_occ_;
  std::vector<std::vector<int>> adj_;
  std::vector<End> end_;
  std::vector<int> seam_;
  BruteForceResult result_;
};

}  // namespace

BruteForceResult brute_force_z(const BruteForceSpec& spec) {
  if (spec.sites < 1 || spec.half_rows < 1) throw DomainError("brute force needs L >= 1 and M >= 1");
  if (spec.model == ModelKind::Psu && spec.sites % 2 != 0) throw ParityError("PSU needs even L");
  const int k = spec.middle_legs / 2;
  if (spec.middle_legs % 2 == 0) return Enumerator(spec, k, k).run();
  BruteForceResult a = Enumerator(spec, k + 1, k).run();
  BruteForceResult b = Enumerator(spec, k, k + 1).run();
  return {0.5 * (a.z + b.z), a.configurations + b.configurations};
}

}  // namespace loop3pt::oracle
