#include <doctest.h>

#include "loop3pt/errors.hpp"
#include "loop3pt/linkpattern/bilinear.hpp"
#include "loop3pt/linkpattern/states.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <map>
#include <random>
#include <set>

using namespace loop3pt;
using namespace loop3pt::lp;

namespace {

// Counts placements of `defects` defects, arcs and (O(n) only) empty sites on
// L points of a circle such that chords do not cross and no chord has defects
// on both sides. Works on chord geometry, not on parenthesis strings.
long count_chord_diagrams(int L, int defects, bool allow_empty) {
  long total = 0;
  std::vector<int> role(L, -2);  // -2 unassigned, -1 empty, -3 defect, else partner
  auto separates = [&](int a, int b) {
    bool in = false, out = false;
    for (int x = 0; x < L; ++x) {
      if (role[x] != -3) continue;
      ((x > a && x < b) ? in : out) = true;
    }
    return in && out;
  };
  auto crosses = [](int a, int b, int c, int d) {
    auto inside = [&](int x) { return x > a && x < b; };
    return inside(c) != inside(d);
  };
  std::vector<std::pair<int, int>> chords;
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == L) {
      if (left != 0) return;
      for (auto [a, b] : chords) {
        if (separates(a, b)) return;
      }
      ++total;
      return;
    }
    if (role[i] != -2) return rec(i + 1, left);
    if (allow_empty) {
      role[i] = -1;
      rec(i + 1, left);
    }
    if (left > 0) {
      role[i] = -3;
      rec(i + 1, left - 1);
    }
    for (int j = i + 1; j < L; ++j) {
      if (role[j] != -2) continue;
      bool ok = true;
      for (auto [a, b] : chords) ok = ok && !crosses(a, b, i, j);
      if (!ok) continue;
      role[i] = j;
      role[j] = i;
      chords.emplace_back(i, j);
      rec(i + 1, left);
      chords.pop_back();
      role[j] = -2;
    }
    role[i] = -2;
  };
  rec(0, defects);
  return total;
}

long catalan(int k) {
  long c = 1;
  for (int i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

LinkPattern random_labelled(std::mt19937& rng, const std::vector<LinkPattern>& pool) {
  const LinkPattern& base = pool[rng() % pool.size()];
  const int L = base.sites();
  std::vector<std::pair<int, int>> arcs;
  std::vector<int> odd;
  std::vector<int> dsites = base.defect_sites();
  std::vector<int> labels(dsites.size());
  std::iota(labels.begin(), labels.end(), 0);
  std::shuffle(labels.begin(), labels.end(), rng);
  for (int i = 0; i < L; ++i) {
    if (base.arc_at(i) && base.partner(i) > i) {
      arcs.emplace_back(i, base.partner(i));
      if (rng() & 1) odd.push_back(i);
    }
  }
  std::vector<std::pair<int, DefectTag>> defects;
  for (std::size_t k = 0; k < dsites.size(); ++k) defects.push_back({dsites[k], {Marker::Bottom, labels[k]}});
  return LinkPattern::from_parts(L, arcs, defects, odd);
}

}  // namespace

TEST_CASE("vacuum states") {
  const LinkPattern psu = vacuum_pattern(4, ModelKind::Psu);
  CHECK(psu.render() == "( ) ( )");
  CHECK(vacuum_pattern(3, ModelKind::On).render() == ". . .");
  CHECK_THROWS_AS(vacuum_pattern(3, ModelKind::Psu), ParityError);
  const StateVector<double> v = vacuum_state<double>(4, ModelKind::Psu);
  CHECK(v.size() == 1);
  CHECK(v.coefficient(psu) == 1.0);
}

TEST_CASE("bottom boundary states") {
  CHECK(bottom_pattern(6, 2, 0, ModelKind::Psu, Bookkeeping::Labelled).render() == "b0 b1 ( ) ( )");
  CHECK(bottom_pattern(6, 2, 1, ModelKind::Psu, Bookkeeping::Labelled).render() == "b1 b0 ( ) ( )");
  CHECK(bottom_pattern(5, 3, 3, ModelKind::On, Bookkeeping::Labelled) ==
        bottom_pattern(5, 3, 0, ModelKind::On, Bookkeeping::Labelled));
  CHECK(bottom_pattern(5, 3, 1, ModelKind::On, Bookkeeping::Markers).render() == "b0 b0 b0 . .");
  CHECK_THROWS_AS(bottom_pattern(4, 5, 0, ModelKind::On, Bookkeeping::Markers), CapacityError);
  CHECK_THROWS_AS(bottom_pattern(5, 2, 0, ModelKind::Psu, Bookkeeping::Markers), ParityError);
}

TEST_CASE("top boundary states") {
  const LinkPattern t = top_pattern(6, 2, 2, 2, 0, ModelKind::Psu, Bookkeeping::Labelled);
  CHECK(t.render() == "m1 b1 ( ) ( )");
  CHECK(top_pattern(6, 2, 2, 2, 2, ModelKind::Psu, Bookkeeping::Labelled) == t);
  CHECK(top_pattern(6, 2, 3, 3, 0, ModelKind::On, Bookkeeping::Labelled).render() == "m2 m1 b1 . . .");
  CHECK(top_pattern(6, 2, 2, 2, 0, ModelKind::Psu, Bookkeeping::Markers).render() == "t0 t0 ( ) ( )");
  CHECK_THROWS_AS(top_pattern(6, 1, 1, 3, 0, ModelKind::On, Bookkeeping::Markers), TriangleError);
}

TEST_CASE("text rendering round-trips") {
  for (const char* s : {"( ) ( )", ". [ b0 ] m3", "( ( ) ) b2 b1", "t0 . [ ( ) ]"}) {
    CHECK(LinkPattern::parse(s).render() == s);
  }
  CHECK_THROWS_AS(LinkPattern::parse("( x )"), InvalidPattern);
  CHECK_THROWS_AS(LinkPattern::parse("( ( )"), InvalidPattern);
}

TEST_CASE("encode and decode round-trip on every small pattern") {
  for (ModelKind model : {ModelKind::On, ModelKind::Psu}) {
    for (int L = 1; L <= 8; ++L) {
      for (int d = 0; d <= L; ++d) {
        for (const LinkPattern& p : enumerate_patterns(L, d, model)) {
          CHECK(LinkPattern::decode(p.encode(), L) == p);
          CHECK(LinkPattern::decode(p.encode(), L, model, Bookkeeping::Markers) == p);
        }
      }
    }
  }
}

TEST_CASE("distinct basis patterns get distinct keys") {
  const auto w0 = enumerate_patterns(4, 0, ModelKind::Psu);
  REQUIRE(w0.size() == 2);
  CHECK(w0[0].encode() != w0[1].encode());
}

TEST_CASE("encode is injective on random labelled patterns") {
  std::mt19937 rng(12345);
  std::vector<LinkPattern> pool;
  for (int d = 0; d <= 12; ++d) {
    for (const auto& p : enumerate_patterns(12, d, ModelKind::On)) pool.push_back(p);
  }
  std::map<std::string, Code> seen;
  std::set<Code> keys;
  for (int k = 0; k < 100000; ++k) {
    const LinkPattern p = random_labelled(rng, pool);
    const Code c = p.encode().code;
    const auto [it, fresh] = seen.emplace(p.render(), c);
    if (fresh) {
      keys.insert(c);
    } else {
      CHECK(it->second == c);
    }
    if (k % 97 == 0) CHECK(LinkPattern::decode({c}, 12, ModelKind::On, Bookkeeping::Labelled) == p);
  }
  CHECK(keys.size() == seen.size());
}

TEST_CASE("decode rejects invalid content") {
  const LinkPattern p = LinkPattern::parse("b0 ( b1 )");
  CHECK_THROWS_AS(p.validate(ModelKind::On, Bookkeeping::Labelled), InvalidPattern);
  CHECK_THROWS_AS(LinkPattern::parse("b1 b1").validate(ModelKind::On, Bookkeeping::Labelled), InvalidPattern);
  CHECK_THROWS_AS(LinkPattern::parse("( ) .").validate(ModelKind::Psu, Bookkeeping::Markers), InvalidPattern);
  CHECK_THROWS_AS(LinkPattern::from_parts(4, {{0, 2}, {1, 3}}, {}), InvalidPattern);
}

TEST_CASE("pattern counts agree with chord enumeration") {
  for (int L = 2; L <= 12; L += 2) {
    const long brute = count_chord_diagrams(L, 0, false);
    CHECK(brute == catalan(L / 2));
    CHECK(static_cast<long>(enumerate_patterns(L, 0, ModelKind::Psu).size()) == brute);
  }
  CHECK(enumerate_patterns(6, 0, ModelKind::Psu).size() == 5);
  for (int L = 1; L <= 8; ++L) {
    for (int d = 0; d <= L; ++d) {
      CHECK(static_cast<long>(enumerate_patterns(L, d, ModelKind::On).size()) == count_chord_diagrams(L, d, true));
      if (L % 2 == 0 && d % 2 == 0) {
        CHECK(static_cast<long>(enumerate_patterns(L, d, ModelKind::Psu).size()) ==
              count_chord_diagrams(L, d, false));
      }
    }
  }
}

TEST_CASE("bilinear form on the worked examples") {
  const DefectRules rules = DefectRules::markers();
  const double n = 1.37;
  auto form = [&](const char* bra, const char* ket) {
    const auto o = pattern_pair(LinkPattern::parse(ket), LinkPattern::parse(bra), rules);
    return pair_weight(o, n, n);
  };
  CHECK(form(". ( ( ) )", ". ( . . )") == 0.0);
  CHECK(form(". ( ) ( )", ". ( ( ) )") == doctest::Approx(n));
  CHECK(form("( ) ( )", "( ) ( )") == doctest::Approx(n * n));
}

TEST_CASE("bilinear form with defects") {
  const DefectRules rules = DefectRules::markers();
  auto valid = [&](const char* ket, const char* bra) {
    return pattern_pair(LinkPattern::parse(ket), LinkPattern::parse(bra), rules).valid;
  };
  CHECK(valid("b0 b0", "t0 t0"));
  CHECK(valid("b0 m0", "( )"));
  CHECK_FALSE(valid("b0 b0", "( )"));
  CHECK_FALSE(valid("b0 b0 ( )", "t0 t0 t0 t0"));
  CHECK_FALSE(valid("( ) ( )", "t0 t0 ( )"));
}

TEST_CASE("bilinear form is symmetric and positive on single patterns") {
  std::mt19937 rng(7);
  const auto pool = enumerate_patterns(6, 0, ModelKind::On);
  const DefectRules rules = DefectRules::markers();
  const double n = 0.83;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    StateVector<double> v(6, Bookkeeping::Markers), w(6, Bookkeeping::Markers);
    for (int j = 0; j < 4; ++j) {
      v.add(pool[rng() % pool.size()], u(rng));
      w.add(pool[rng() % pool.size()], u(rng));
    }
    const auto vw = bilinear_pair(v, w, n, n, rules), wv = bilinear_pair(w, v, n, n, rules);
    CHECK(std::ldexp(vw.mantissa, vw.exp2) == doctest::Approx(std::ldexp(wv.mantissa, wv.exp2)).epsilon(1e-14));
  }
  for (const auto& p : enumerate_patterns(6, 0, ModelKind::Psu)) {
    const auto o = pattern_pair(p, p, rules);
    CHECK(o.valid);
    CHECK(o.loops == 3);
  }
  const auto o = pattern_pair(LinkPattern::parse(". ( ) . ( )"), LinkPattern::parse(". ( ) . ( )"), rules);
  CHECK(o.loops == 2);
  CHECK(pair_weight(o, n, n) > 0);
}

TEST_CASE("translation and parity") {
  std::mt19937 rng(99);
  std::vector<LinkPattern> pool;
  for (int d = 0; d <= 7; ++d) {
    for (const auto& p : enumerate_patterns(7, d, ModelKind::On)) pool.push_back(p);
  }
  for (int k = 0; k < 200; ++k) {
    const LinkPattern p = random_labelled(rng, pool);
    CHECK(reflect_parity(reflect_parity(p)) == p);
    LinkPattern q = p;
    for (int i = 0; i < 7; ++i) q = translate(q);
    CHECK(q == p);
    // P u = u⁻¹ P, and u⁻¹ = u^{L−1}.
    LinkPattern rhs = reflect_parity(p);
    for (int i = 0; i < 6; ++i) rhs = translate(rhs);
    CHECK(reflect_parity(translate(p)) == rhs);
  }
  CHECK(translate(LinkPattern::parse("( ) ( )")).render() == "( ( ) )");
  CHECK(reflect_parity(LinkPattern::parse("( b0 ) . b1")).render() == "b1 . ( b0 )");
}
