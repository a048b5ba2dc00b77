#pragma once

#include <string>

namespace loop3pt {

enum class ModelKind { On, Psu };

std::string to_string(ModelKind kind);
ModelKind model_from_string(const std::string& text);

struct ModelParams {
  double beta = 1.0;
  double beta_sq = 1.0;
  double central_charge = 1.0;
  double loop_weight = 2.0;
  double kappa = 4.0;

  static ModelParams from_beta_sq(double beta_sq);
};

enum class FieldKind { Diagonal, Leg };

// Kac-indexed field. Leg fields carry ℓ = 2r legs; diagonal fields have r = 0
// and change the weight of loops around them to w = 2cos(πs).
class FieldLabel {
 public:
  static FieldLabel leg(double r, double s);
  static FieldLabel diagonal(double s);
  static FieldLabel identity(const ModelParams& p);

  FieldKind kind() const { return kind_; }
  bool is_leg() const { return kind_ == FieldKind::Leg; }
  bool is_identity() const { return identity_; }
  int legs() const { return legs_; }
  double r() const { return 0.5 * legs_; }
  double s() const { return s_; }
  double diagonal_weight() const;
  bool has_spin() const { return is_leg() && s_ != 0.0; }
  std::string describe() const;

  bool operator==(const FieldLabel& o) const {
    return kind_ == o.kind_ && legs_ == o.legs_ && s_ == o.s_ && identity_ == o.identity_;
  }

 private:
  FieldKind kind_ = FieldKind::Diagonal;
  int legs_ = 0;
  double s_ = 0.0;
  bool identity_ = false;
};

struct PrecisionContext {
  int significant_digits = 30;
  double truncation_threshold = 0.0;

  void validate() const;
};

}  // namespace loop3pt
