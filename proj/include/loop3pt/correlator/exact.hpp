#pragma once

#include "loop3pt/correlator/correlator.hpp"
#include "loop3pt/linkpattern/pattern.hpp"

#include <Eigen/Dense>

#include <vector>

namespace loop3pt {

// Dense transfer matrix and Gram matrix of the bilinear form on the module
// spanned by `basis` (all patterns with the same number of bottom defects).
// Column j of T holds the expansion of T·basis[j].
struct SectorMatrices {
  std::vector<lp::LinkPattern> basis;
  Eigen::MatrixXd transfer;
  Eigen::MatrixXd gram;
};

SectorMatrices sector_matrices(const std::vector<lp::LinkPattern>& basis, ModelKind model, double beta_sq);
SectorMatrices sector_matrices(int sites, int legs, ModelKind model, double beta_sq);

// Entry (i, j) is ⟨bra_i|O₂|ket_j⟩ for a middle insertion of `legs` legs.
// Bras are given as bottom-marked patterns and are read as top states.
Eigen::MatrixXd middle_matrix(const std::vector<lp::LinkPattern>& bras, const std::vector<lp::LinkPattern>& kets,
                              int legs, double beta_sq);

struct ExactResult {
  double c123 = 0.0;
  std::array<double, 4> leading{};  // Λ in the sectors of fields 1, 2, 3 and the identity
  bool degenerate_ground_state = false;
};

// C₁₂₃(L) = ⟨V₃|O₂|V₁⟩ / ⟨V₀|O₂|V₂⟩ from dense leading eigenvectors normalised
// by the bilinear form. Spinless leg fields only; L ≤ 8.
ExactResult exact_small_size(const CorrelatorSpec& spec);

}  // namespace loop3pt
