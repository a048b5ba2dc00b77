#include "loop3pt/analytic/structure_constants.hpp"

#include <cmath>

namespace loop3pt {

namespace {

// Runs fn with a Real type wide enough for the requested digit count.
template <class Fn>
double with_precision(const PrecisionContext& pc, Fn&& fn) {
  pc.validate();
  if (pc.significant_digits <= 45) return fn(Real50{}, pc.significant_digits);
  if (pc.significant_digits <= 95) return fn(Real100{}, pc.significant_digits);
  throw DomainError("analytic evaluation supports at most 95 significant digits");
}

template <class Real>
double exp_signed(const SignedLog<Real>& v) {
  using std::exp;
  return v.sign * to_double(exp(v.log_abs));
}

}  // namespace

double conformal_dimension(double r, double s, const ModelParams& p) {
  const double a = p.beta * r - s / p.beta;
  const double b = p.beta - 1.0 / p.beta;
  return 0.25 * a * a - 0.25 * b * b;
}

double loop_weight(const ModelParams& p) { return p.loop_weight; }

double double_gamma(double x, const ModelParams& p, const PrecisionContext& pc) {
  return with_precision(pc, [&](auto zero, int digits) {
    using Real = decltype(zero);
    DoubleGamma<Real> g(sqrt(Real(p.beta_sq)), digits);
    return to_double(g(Real(x)));
  });
}

double c_ref_3pt(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3,
                 const ModelParams& p, const PrecisionContext& pc) {
  return with_precision(pc, [&](auto zero, int digits) {
    using Real = decltype(zero);
    DoubleGamma<Real> g(sqrt(Real(p.beta_sq)), digits);
    return exp_signed(detail::log_c_ref_3pt(g, f1, f2, f3));
  });
}

double c_ref_2pt(const FieldLabel& f, const ModelParams& p, const PrecisionContext& pc) {
  return with_precision(pc, [&](auto zero, int digits) {
    using Real = decltype(zero);
    DoubleGamma<Real> g(sqrt(Real(p.beta_sq)), digits);
    return exp_signed(detail::log_c_ref_2pt(g, f));
  });
}

double omega(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3,
             const ModelParams& p, const PrecisionContext& pc) {
  return with_precision(pc, [&](auto zero, int digits) {
    using Real = decltype(zero);
    return to_double(detail::omega_value<Real>(p, digits, f1, f2, f3));
  });
}

double probability_m_loops(double r1, double r2, double r3, int m, const ModelParams& p,
                           const PrecisionContext& pc) {
  const double half_sum = 0.5 * (r1 + r2 + r3);
  if (m < 1 || m > half_sum + 1e-12) {
    throw DomainError("probability_m_loops: m must satisfy 1 <= m <= (r1+r2+r3)/2");
  }
  const double w = omega(FieldLabel::leg(r1, 0), FieldLabel::leg(r2, 0), FieldLabel::leg(r3, 0), p, pc);
  return std::pow(p.loop_weight, m - half_sum) * w;
}

}  // namespace loop3pt
