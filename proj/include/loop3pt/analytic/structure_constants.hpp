#pragma once

#include "loop3pt/analytic/double_gamma.hpp"
#include "loop3pt/analytic/params.hpp"

#include <array>

namespace loop3pt {

double conformal_dimension(double r, double s, const ModelParams& p);
double loop_weight(const ModelParams& p);

double c_ref_3pt(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3,
                 const ModelParams& p, const PrecisionContext& pc);
double c_ref_2pt(const FieldLabel& f, const ModelParams& p, const PrecisionContext& pc);
double omega(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3,
             const ModelParams& p, const PrecisionContext& pc);
double probability_m_loops(double r1, double r2, double r3, int m, const ModelParams& p,
                           const PrecisionContext& pc);

namespace detail {

template <class Real>
SignedLog<Real> log_c_ref_3pt(const DoubleGamma<Real>& g, const FieldLabel& f1,
                              const FieldLabel& f2, const FieldLabel& f3) {
  using std::abs;
  const Real beta = g.beta();
  const Real half_q = Real(0.5) * (beta + Real(1) / beta);
  const std::array<const FieldLabel*, 3> f{&f1, &f2, &f3};
  SignedLog<Real> out;
  for (int mask = 0; mask < 8; ++mask) {
    Real rs = 0, ss = 0;
    for (int i = 0; i < 3; ++i) {
      const int e = (mask >> i) & 1 ? -1 : 1;
      rs += e * Real(f[i]->r());
      ss += e * Real(f[i]->s());
    }
    const Real x = half_q + Real(0.5) * beta * abs(rs) + ss / (2 * beta);
    auto v = g.log_abs(x);
    out.log_abs -= v.log_abs;
    out.sign *= v.sign;
  }
  return out;
}

template <class Real>
SignedLog<Real> log_c_ref_2pt(const DoubleGamma<Real>& g, const FieldLabel& f) {
  const Real beta = g.beta();
  const Real inv = Real(1) / beta;
  SignedLog<Real> out;
  auto take = [&](const Real& x, int power) {
    auto v = g.log_abs(x);
    out.log_abs -= power * v.log_abs;
    if (power % 2 != 0) out.sign *= v.sign;
  };
  take(beta, 2);
  take(inv, 2);
  for (const Real& b : {beta, inv}) {
    for (int e : {1, -1}) take(b + Real(f.r()) * beta + e * Real(f.s()) * inv, 1);
  }
  return out;
}

template <class Real>
SignedLog<Real> log_omega(const DoubleGamma<Real>& g, const ModelParams& p, const FieldLabel& f1,
                          const FieldLabel& f2, const FieldLabel& f3) {
  const FieldLabel id = FieldLabel::identity(p);
  auto c123 = log_c_ref_3pt(g, f1, f2, f3);
  auto c000 = log_c_ref_3pt(g, id, id, id);
  auto c11 = log_c_ref_3pt(g, id, f1, f1);
  auto c22 = log_c_ref_3pt(g, id, f2, f2);
  auto c33 = log_c_ref_3pt(g, id, f3, f3);
  if (c000.sign * c11.sign * c22.sign * c33.sign < 0) {
    throw NegativeSqrt("omega: negative radicand for " + f1.describe() + f2.describe() +
                       f3.describe());
  }
  SignedLog<Real> out;
  out.log_abs = c123.log_abs + Real(0.5) * (c000.log_abs - c11.log_abs - c22.log_abs - c33.log_abs);
  out.sign = c123.sign;
  return out;
}

template <class Real>
Real omega_value(const ModelParams& p, int digits, const FieldLabel& f1, const FieldLabel& f2,
                 const FieldLabel& f3) {
  using std::exp;
  using std::sqrt;
  DoubleGamma<Real> g(sqrt(Real(p.beta_sq)), digits);
  auto v = log_omega(g, p, f1, f2, f3);
  return v.sign * exp(v.log_abs);
}

}  // namespace detail

}  // namespace loop3pt
