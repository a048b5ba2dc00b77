#include "loop3pt/correlator/exact.hpp"

#include "loop3pt/errors.hpp"
#include "loop3pt/linkpattern/bilinear.hpp"
#include "loop3pt/linkpattern/states.hpp"
#include "loop3pt/transfer/transfer.hpp"

#include <absl/container/flat_hash_map.h>

#include <cmath>

namespace loop3pt {

using lp::Code;
using lp::LinkPattern;

namespace {

constexpr int kMaxExactSites = 8;

LinkPattern as_top(const LinkPattern& p) {
  std::vector<std::pair<int, int>> arcs;
  std::vector<std::pair<int, lp::DefectTag>> defects;
  for (int i = 0; i < p.sites(); ++i) {
    if (p.defect_at(i)) {
      defects.emplace_back(i, lp::DefectTag{lp::Marker::Top, 0});
    } else if (p.arc_at(i) && i < p.partner(i)) {
      arcs.emplace_back(i, p.partner(i));
    }
  }
  return LinkPattern::from_parts(p.sites(), arcs, defects);
}

absl::flat_hash_map<Code, int> index_of(const std::vector<LinkPattern>& basis) {
  absl::flat_hash_map<Code, int> idx;
  for (int i = 0; i < static_cast<int>(basis.size()); ++i) idx[basis[i].encode().code] = i;
  return idx;
}

struct Leading {
  double lambda = 0.0;
  Eigen::VectorXd vec;
  bool degenerate = false;
};

// Leading eigenvector of T, normalised so that ⟨V|V⟩ = 1 with positive entries summing up.
Leading leading_vector(const SectorMatrices& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.transfer);
  const auto& ev = es.eigenvalues();
  int best = 0;
  for (int i = 1; i < ev.size(); ++i) {
    if (ev[i].real() > ev[best].real()) best = i;
  }
  Leading out;
  out.lambda = ev[best].real();
  for (int i = 0; i < ev.size(); ++i) {
    if (i != best && std::abs(std::abs(ev[i]) - std::abs(ev[best])) < 1e-9 * std::abs(ev[best])) {
      out.degenerate = true;
    }
  }
  out.vec = es.eigenvectors().col(best).real();
  if (out.vec.sum() < 0) out.vec = -out.vec;
  const double norm = out.vec.dot(m.gram * out.vec);
  if (!(norm > 0)) throw NegativeSqrt("leading eigenvector has non-positive bilinear norm");
  out.vec /= std::sqrt(norm);
  return out;
}

}  // namespace

SectorMatrices sector_matrices(const std::vector<LinkPattern>& basis, ModelKind model, double beta_sq) {
  if (basis.empty()) throw DomainError("empty basis");
  const int L = basis.front().sites();
  if (L > kMaxExactSites) throw CapacityError("dense matrices need L <= " + std::to_string(kMaxExactSites));
  const double n = loop_weight_of<double>(beta_sq);
  const lp::DefectRules none = lp::DefectRules::none();
  const lp::DefectRules markers = lp::DefectRules::markers();
  const RowContext<double> ctx{weights_for<double>(model, beta_sq), n, n, &none, false};
  const auto idx = index_of(basis);
  const int d = static_cast<int>(basis.size());
  SectorMatrices m{basis, Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
  for (int j = 0; j < d; ++j) {
    const auto out = apply_transfer_row(lp::single<double>(basis[j], lp::Bookkeeping::Markers), ctx, false, 0);
    for (const auto& [c, coef] : out.entries()) {
      const auto it = idx.find(c);
      if (it == idx.end()) throw InvalidPattern("transfer row leaves the basis: " + LinkPattern::decode({c}, L).render());
      m.transfer(it->second, j) += std::ldexp(coef, static_cast<int>(out.exp2()));
    }
    for (int i = 0; i < d; ++i) {
      m.gram(i, j) = lp::pair_weight(lp::pattern_pair(basis[j], as_top(basis[i]), markers), n, n);
    }
  }
  return m;
}

SectorMatrices sector_matrices(int sites, int legs, ModelKind model, double beta_sq) {
  return sector_matrices(lp::enumerate_patterns(sites, legs, model), model, beta_sq);
}

Eigen::MatrixXd middle_matrix(const std::vector<LinkPattern>& bras, const std::vector<LinkPattern>& kets,
                              int legs, double beta_sq) {
  const double n = loop_weight_of<double>(beta_sq);
  const lp::DefectRules markers = lp::DefectRules::markers();
  const MiddleOperator op{legs, 0, MiddleMode::Plain, true};
  std::vector<LinkPattern> tops;
  for (const auto& b : bras) tops.push_back(as_top(b));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bras.size()),
                                            static_cast<Eigen::Index>(kets.size()));
  for (int j = 0; j < static_cast<int>(kets.size()); ++j) {
    const int L = kets[j].sites();
    lp::StateVector<double> v = lp::single<double>(kets[j], lp::Bookkeeping::Markers);
    if (legs > 0) v = apply_middle_operator(v, op, markers);
    for (const auto& [c, coef] : v.entries()) {
      const LinkPattern p = LinkPattern::decode({c}, L);
      for (int i = 0; i < static_cast<int>(tops.size()); ++i) {
        m(i, j) += coef * lp::pair_weight(lp::pattern_pair(p, tops[i], markers), n, n);
      }
    }
  }
  return m;
}

ExactResult exact_small_size(const CorrelatorSpec& spec) {
  spec.validate();
  if (spec.has_spin()) throw UnsupportedMode("the dense oracle handles spinless fields only");
  std::array<int, 3> legs{};
  for (int i = 0; i < 3; ++i) {
    if (!spec.fields[i].is_leg()) throw UnsupportedMode("the dense oracle handles leg fields only");
    legs[i] = spec.fields[i].legs();
  }
  const int L = spec.L;
  const std::array<int, 4> sector_legs{legs[0], legs[1], legs[2], 0};
  std::array<SectorMatrices, 4> sec;
  std::array<Leading, 4> lead;
  ExactResult r;
  for (int i = 0; i < 4; ++i) {
    sec[i] = sector_matrices(L, sector_legs[i], spec.model, spec.beta_sq);
    lead[i] = leading_vector(sec[i]);
    r.leading[i] = lead[i].lambda;
    r.degenerate_ground_state = r.degenerate_ground_state || lead[i].degenerate;
  }
  const Eigen::MatrixXd m31 = middle_matrix(sec[2].basis, sec[0].basis, legs[1], spec.beta_sq);
  const Eigen::MatrixXd m02 = middle_matrix(sec[3].basis, sec[1].basis, legs[1], spec.beta_sq);
  const double num = lead[2].vec.dot(m31 * lead[0].vec);
  const double den = lead[3].vec.dot(m02 * lead[1].vec);
  r.c123 = num / den;
  return r;
}

}  // namespace loop3pt
