#pragma once

#include "loop3pt/analytic/params.hpp"
#include "loop3pt/errors.hpp"
#include "loop3pt/scalar.hpp"

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace loop3pt {

// log|Γ_β(x)| together with the sign of Γ_β(x).
template <class Real>
struct SignedLog {
  Real log_abs{0};
  int sign = 1;
};

// Barnes double Gamma function Γ_β(x) = Γ₂(x | β, 1/β), normalized so that
// Γ_β((β+1/β)/2) = 1.
//
// Evaluation: shift x upward with the two Gamma-type recursions until it
// exceeds a threshold X0, then use the large-argument expansion
//   log Γ₂(x) ≈ c0 x²(3/4 − ½ log x) + c1 (x log x − x) − c2 log x
//              + Σ_{k≥3} c_k (k−3)! x^{2−k},
// with c_k = (−1)^k Σ_{i+j=k} B_i B_j β^{i−j} / (i! j!) and B_1 = −½.
// The additive constant of the expansion is irrelevant after normalization.
template <class Real>
class DoubleGamma {
 public:
  DoubleGamma(const Real& beta, int digits) : beta_(beta), inv_beta_(Real(1) / beta) {
    using std::log;
    using std::max;
    const Real big = max(beta_, inv_beta_);
    const double target = (digits + 5) * std::log(10.0);
    threshold_ = Real(std::max(8.0, target * to_double(big) / (2.0 * M_PI) + 4.0));
    build_coefficients(target);
    int sign = 1;
    log_norm_ = unnormalized(Real(0.5) * (beta_ + inv_beta_), sign);
  }

  const Real& beta() const { return beta_; }

  SignedLog<Real> log_abs(const Real& x) const {
    check_pole(x);
    int sign = 1;
    Real v = unnormalized(x, sign);
    return {v - log_norm_, sign};
  }

  Real operator()(const Real& x) const {
    using std::exp;
    auto s = log_abs(x);
    return s.sign * exp(s.log_abs);
  }

 private:
  void check_pole(const Real& x) const {
    // Poles at x = −mβ − n/β with m, n ≥ 0.
    const double xd = to_double(x);
    if (xd > 1e-8) return;
    const double b = to_double(beta_);
    const double ib = 1.0 / b;
    const int mmax = static_cast<int>(std::ceil(-xd / b)) + 1;
    for (int m = 0; m <= mmax; ++m) {
      double rest = -xd - m * b;
      if (rest < -1e-8) break;
      double nn = std::round(rest / ib);
      if (nn >= 0 && std::abs(rest - nn * ib) < 1e-8) {
        std::ostringstream msg;
        msg << "double gamma pole at x=" << xd << " (m=" << m << ", n=" << nn << ")";
        throw PoleError(msg.str());
      }
    }
  }

  static Real factorial(int k) {
    Real f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  }

  static Real bernoulli(int i) {
    if (i == 0) return Real(1);
    if (i == 1) return Real(-0.5);
    if (i % 2 == 1) return Real(0);
    return boost::math::bernoulli_b2n<Real>(i / 2);
  }

  void build_coefficients(double target) {
    using std::abs;
    using std::log;
    using std::pow;
    const int kmax_cap = 600;
    std::vector<Real> b(kmax_cap + 1), bf(kmax_cap + 1);
    for (int i = 0; i <= kmax_cap; ++i) {
      b[i] = bernoulli(i);
      bf[i] = b[i] / factorial(i);
    }
    auto c = [&](int k) {
      Real sum = 0;
      for (int i = 0; i <= k; ++i) {
        if (bf[i] == 0 || bf[k - i] == 0) continue;
        sum += bf[i] * bf[k - i] * pow(beta_, i - (k - i));
      }
      return (k % 2 == 0) ? sum : Real(-sum);
    };
    c0_ = c(0);
    c1_ = c(1);
    c2_ = c(2);
    const Real log_x0 = log(threshold_);
    Real fact = 1;  // (k−3)!
    for (int k = 3; k <= kmax_cap; ++k) {
      if (k > 3) fact *= (k - 3);
      Real ck = c(k) * fact;
      tail_.push_back(ck);
      if (ck != 0 && k > 6) {
        double mag = to_double(log(abs(ck))) + (2 - k) * to_double(log_x0);
        if (mag < -target) return;
      }
    }
    throw DomainError("double gamma asymptotic expansion did not converge");
  }

  Real asymptotic(const Real& x) const {
    using std::log;
    const Real lx = log(x);
    Real v = c0_ * x * x * (Real(0.75) - Real(0.5) * lx) + c1_ * (x * lx - x) - c2_ * lx;
    const Real inv = Real(1) / x;
    Real p = inv;  // x^{2−k} at k = 3
    for (const Real& t : tail_) {
      v += t * p;
      p *= inv;
    }
    return v;
  }

  Real unnormalized(Real x, int& sign) const {
    using std::log;
    const Real half_log_2pi = Real(0.5) * log(2 * pi_value<Real>());
    const Real log_beta = log(beta_);
    const bool step_beta = beta_ >= inv_beta_;
    Real acc = 0;
    while (x < threshold_) {
      int gs = 1;
      if (step_beta) {
        // Γ_β(x) = Γ_β(x+β) Γ(βx) / (√(2π) β^{βx−½})
        Real bx = beta_ * x;
        acc += boost::math::lgamma(bx, &gs) - half_log_2pi - (bx - Real(0.5)) * log_beta;
        x += beta_;
      } else {
        // Γ_β(x) = Γ_β(x+1/β) Γ(x/β) / (√(2π) β^{½−x/β})
        Real xb = x * inv_beta_;
        acc += boost::math::lgamma(xb, &gs) - half_log_2pi - (Real(0.5) - xb) * log_beta;
        x += inv_beta_;
      }
      sign *= gs;
    }
    return acc + asymptotic(x);
  }

  Real beta_;
  Real inv_beta_;
  Real threshold_;
  Real c0_, c1_, c2_;
  std::vector<Real> tail_;
  Real log_norm_;
};

// Convenience evaluation at the precision requested by pc.
double double_gamma(double x, const ModelParams& p, const PrecisionContext& pc);

}  // namespace loop3pt
