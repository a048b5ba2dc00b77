#include "loop3pt/analytic/params.hpp"

#include "loop3pt/errors.hpp"

#include <cmath>
#include <sstream>

namespace loop3pt {

std::string to_string(ModelKind kind) { return kind == ModelKind::On ? "on" : "psu"; }

ModelKind model_from_string(const std::string& text) {
  if (text == "on" || text == "O(n)" || text == "o(n)") return ModelKind::On;
  if (text == "psu" || text == "PSU(n)" || text == "psu(n)") return ModelKind::Psu;
  throw ConfigError("unknown model '" + text + "' (expected on or psu)");
}

ModelParams ModelParams::from_beta_sq(double beta_sq) {
  if (!(beta_sq > 0.0)) throw DomainError("beta^2 must be positive");
  ModelParams p;
  p.beta_sq = beta_sq;
  p.beta = std::sqrt(beta_sq);
  p.central_charge = 13.0 - 6.0 * beta_sq - 6.0 / beta_sq;
  p.loop_weight = -2.0 * std::cos(M_PI * beta_sq);
  p.kappa = 4.0 / beta_sq;
  return p;
}

namespace {

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

}  // namespace

FieldLabel FieldLabel::leg(double r, double s) {
  const double legs = 2.0 * r;
  if (!(r > 0.0) || !near_integer(legs)) {
    throw DomainError("leg field needs r in N/2 with r > 0, got r=" + std::to_string(r));
  }
  // Reduce s into (−1, 1].
  double red = std::fmod(s, 2.0);
  if (red <= -1.0) red += 2.0;
  if (red > 1.0) red -= 2.0;
  if (std::abs(red) < 1e-15) red = 0.0;
  if (!near_integer(r * red)) {
    throw DomainError("leg field needs r*s integer, got r=" + std::to_string(r) +
                      " s=" + std::to_string(s));
  }
  FieldLabel f;
  f.kind_ = FieldKind::Leg;
  f.legs_ = static_cast<int>(std::lround(legs));
  f.s_ = red;
  return f;
}

FieldLabel FieldLabel::diagonal(double s) {
  FieldLabel f;
  f.kind_ = FieldKind::Diagonal;
  f.s_ = s;
  return f;
}

FieldLabel FieldLabel::identity(const ModelParams& p) {
  FieldLabel f = diagonal(1.0 - p.beta_sq);
  f.identity_ = true;
  return f;
}

double FieldLabel::diagonal_weight() const { return 2.0 * std::cos(M_PI * s_); }

std::string FieldLabel::describe() const {
  std::ostringstream out;
  if (identity_) {
    out << "(id)";
  } else if (kind_ == FieldKind::Leg) {
    out << "(" << r() << "," << s_ << ")";
  } else {
    out << "(0," << s_ << ")";
  }
  return out.str();
}

void PrecisionContext::validate() const {
  if (significant_digits < 15) throw DomainError("significant_digits must be >= 15");
  if (truncation_threshold < 0) throw DomainError("truncation_threshold must be >= 0");
}

}  // namespace loop3pt
