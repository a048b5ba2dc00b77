#include <doctest.h>

#include "loop3pt/analytic/structure_constants.hpp"
#include "loop3pt/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <random>

using namespace loop3pt;

namespace {

const PrecisionContext kPc{30, 0.0};

// log Γ_b(x) from the integral representation
//   ∫₀^∞ dt/t [ (e^{−xt} − e^{−Qt/2}) / ((1−e^{−bt})(1−e^{−t/b})) − ½(Q/2−x)² e^{−t} − (Q/2−x)/t ],
// which vanishes at x = Q/2. Evaluated in 100-digit arithmetic because the
// bracket cancels from O(1/t) down to O(t) near t = 0.
double log_double_gamma_integral(double b_in, double x_in) {
  using R = Real100;
  const R b = b_in, x = x_in, q = b + 1 / b, d = q / 2 - x;
  auto f = [&](R t) -> R {
    const R den = -boost::multiprecision::expm1(-b * t) * -boost::multiprecision::expm1(-t / b);
    return ((exp(-x * t) - exp(-q * t / 2)) / den - d * d / 2 * exp(-t) - d / t) / t;
  };
  const R eps = R("1e-20");
  // Beyond t = T only −d/t² survives at this accuracy; its integral is −d/T.
  const R cut = 400;
  // Composite Gauss-Legendre in u = log t, four panels per unit of u.
  auto g = [&](R u) -> R { const R t = exp(u); return f(t) * t; };
  const R lo = log(eps), hi = log(cut);
  const int panels = static_cast<int>(std::ceil(4 * to_double(hi - lo)));
  R body = 0;
  for (int k = 0; k < panels; ++k) {
    const R a = lo + (hi - lo) * k / panels, z = lo + (hi - lo) * (k + 1) / panels;
    body += boost::math::quadrature::gauss<R, 30>::integrate(g, a, z);
  }
  return to_double(body - d / cut + eps * f(eps));
}

double omega_integral(std::array<std::pair<double, double>, 3> fields, double beta_sq) {
  const double b = std::sqrt(beta_sq), q = b + 1 / b;
  auto log_c3 = [&](std::array<std::pair<double, double>, 3> f) {
    double total = 0;
    for (int mask = 0; mask < 8; ++mask) {
      double rs = 0, ss = 0;
      for (int i = 0; i < 3; ++i) {
        const int e = (mask >> i) & 1 ? -1 : 1;
        rs += e * f[i].first;
        ss += e * f[i].second;
      }
      total -= log_double_gamma_integral(b, q / 2 + b / 2 * std::abs(rs) + ss / (2 * b));
    }
    return total;
  };
  const std::pair<double, double> id{0.0, 1.0 - beta_sq};
  double l = log_c3(fields) + 0.5 * log_c3({id, id, id});
  for (const auto& f : fields) l -= 0.5 * log_c3({id, f, f});
  return std::exp(l);
}

}  // namespace

TEST_CASE("model parameters follow the central charge and loop weight relations") {
  for (double b2 : {0.5, 0.7, 1.0, 1.3}) {
    const ModelParams p = ModelParams::from_beta_sq(b2);
    CHECK(p.central_charge == doctest::Approx(13 - 6 * b2 - 6 / b2).epsilon(1e-14));
    CHECK(p.loop_weight == doctest::Approx(-2 * std::cos(M_PI * b2)).epsilon(1e-14));
    CHECK(p.kappa == doctest::Approx(4 / b2));
  }
  CHECK_THROWS_AS(ModelParams::from_beta_sq(-0.5), DomainError);
}

TEST_CASE("conformal dimensions") {
  const ModelParams p = ModelParams::from_beta_sq(0.7);
  CHECK(std::abs(conformal_dimension(0, 1 - 0.7, p)) < 1e-15);
  CHECK(conformal_dimension(0, 0.3, p) == doctest::Approx(conformal_dimension(0, -0.3, p)));
  // ¼(β − 0)² − ¼(β − β⁻¹)² at β² = 2/3: ¼·(2/3) − ¼·(2/3 − 2 + 3/2) = 1/6 − 1/24.
  CHECK(conformal_dimension(1, 0, ModelParams::from_beta_sq(2.0 / 3)) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("loop weights at special couplings") {
  CHECK(std::abs(loop_weight(ModelParams::from_beta_sq(0.5))) < 1e-15);
  CHECK(loop_weight(ModelParams::from_beta_sq(2.0 / 3)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(loop_weight(ModelParams::from_beta_sq(1.0)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("double gamma normalization, shifts and poles") {
  const ModelParams p = ModelParams::from_beta_sq(0.64);
  const double b = 0.8;
  CHECK(double_gamma(0.5 * (b + 1 / b), p, kPc) == doctest::Approx(1.0).epsilon(1e-15));

  const double x = 1.1;
  const double g = double_gamma(x, p, kPc);
  const double up_b = double_gamma(x + b, p, kPc) / g;
  CHECK(up_b == doctest::Approx(std::sqrt(2 * M_PI) * std::pow(b, b * x - 0.5) / std::tgamma(b * x)).epsilon(1e-13));
  const double up_inv = double_gamma(x + 1 / b, p, kPc) / g;
  CHECK(up_inv == doctest::Approx(std::sqrt(2 * M_PI) * std::pow(1 / b, x / b - 0.5) / std::tgamma(x / b)).epsilon(1e-13));

  CHECK_THROWS_AS(double_gamma(0.0, p, kPc), PoleError);
  CHECK_THROWS_AS(double_gamma(-b - 2 / b, p, kPc), PoleError);
  CHECK_NOTHROW(double_gamma(-b - 2 / b + 1e-6, p, kPc));

  for (double y : {0.05, 0.3, 1.0, 2.5, 7.0}) CHECK(double_gamma(y, p, kPc) > 0);
}

TEST_CASE("double gamma agrees with its integral representation and is self-dual") {
  const double b = 0.9, x = 1.3;
  const double lib = double_gamma(x, ModelParams::from_beta_sq(b * b), kPc);
  const double dual = double_gamma(x, ModelParams::from_beta_sq(1 / (b * b)), kPc);
  CHECK(lib == doctest::Approx(dual).epsilon(1e-14));
  CHECK(std::log(lib) == doctest::Approx(log_double_gamma_integral(b, x)).epsilon(1e-14));
  CHECK(std::log(double_gamma(0.4, ModelParams::from_beta_sq(0.6), kPc)) ==
        doctest::Approx(log_double_gamma_integral(std::sqrt(0.6), 0.4)).epsilon(1e-14));
}

TEST_CASE("reference three-point constant symmetries") {
  const ModelParams p = ModelParams::from_beta_sq(0.8);
  const FieldLabel a = FieldLabel::leg(1, 0), b = FieldLabel::leg(0.5, 2), c = FieldLabel::leg(1.5, 2.0 / 3);
  const double ref = c_ref_3pt(a, b, c, p, kPc);
  CHECK(c_ref_3pt(b, a, c, p, kPc) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(c_ref_3pt(c, b, a, p, kPc) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(c_ref_3pt(b, c, a, p, kPc) == doctest::Approx(ref).epsilon(1e-13));
  const FieldLabel na = FieldLabel::leg(1, 0), nb = FieldLabel::leg(0.5, -2), nc = FieldLabel::leg(1.5, -2.0 / 3);
  CHECK(c_ref_3pt(na, nb, nc, p, kPc) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("reference three-point constant equals its eight-factor product") {
  const ModelParams p = ModelParams::from_beta_sq(0.8);
  const double b = std::sqrt(0.8), q = b + 1 / b;
  const FieldLabel f = FieldLabel::leg(1, 0);
  double product = 1;
  for (int mask = 0; mask < 8; ++mask) {
    const int sum = ((mask & 1) ? -1 : 1) + ((mask & 2) ? -1 : 1) + ((mask & 4) ? -1 : 1);
    product /= double_gamma(q / 2 + b / 2 * std::abs(sum), p, kPc);
  }
  CHECK(c_ref_3pt(f, f, f, p, kPc) == doctest::Approx(product).epsilon(1e-12));
}

TEST_CASE("reference two-point constant") {
  const ModelParams p = ModelParams::from_beta_sq(0.8);
  const FieldLabel id = FieldLabel::identity(p);
  const FieldLabel f = FieldLabel::leg(1, 0);
  CHECK(c_ref_2pt(f, p, kPc) == doctest::Approx(c_ref_3pt(id, f, f, p, kPc)).epsilon(1e-13));
  CHECK(c_ref_2pt(f, p, kPc) == doctest::Approx(0.037937538269050941).epsilon(1e-12));
  CHECK(c_ref_2pt(FieldLabel::diagonal(0.3), p, kPc) == doctest::Approx(c_ref_2pt(FieldLabel::diagonal(-0.3), p, kPc)).epsilon(1e-13));
  CHECK(c_ref_2pt(id, p, kPc) == doctest::Approx(c_ref_3pt(id, id, id, p, kPc)).epsilon(1e-13));
}

TEST_CASE("omega printed values") {
  const auto half = FieldLabel::leg(0.5, 0), one = FieldLabel::leg(1, 0), two = FieldLabel::leg(2, 0);
  const ModelParams dilute = ModelParams::from_beta_sq(1.5), dense = ModelParams::from_beta_sq(2.0 / 3);
  CHECK(std::abs(omega(half, half, one, dilute, kPc) - 0.799071001056270) < 1e-12);
  CHECK(std::abs(omega(one, one, one, dilute, kPc) - 1.20899262768922) < 1e-12);
  CHECK(std::abs(omega(two, two, two, dense, kPc) - 1.779967632825404) < 1e-12);
  // The printed 0.952359090621803 differs from this value in the ninth digit;
  // the integral representation confirms the computed one.
  CHECK(std::abs(omega(one, one, one, dense, kPc) - 0.95235909678410158) < 1e-12);
}

TEST_CASE("omega matches the integral representation") {
  const double b2 = 2.0 / 3;
  const double v = omega(FieldLabel::leg(1, 0), FieldLabel::leg(1, 0), FieldLabel::leg(1, 0), ModelParams::from_beta_sq(b2), kPc);
  CHECK(v == doctest::Approx(omega_integral({{{1, 0}, {1, 0}, {1, 0}}}, b2)).epsilon(1e-10));
}

TEST_CASE("omega is symmetric and positive") {
  const FieldLabel fs[3] = {FieldLabel::leg(0.5, 0), FieldLabel::leg(1, 0), FieldLabel::leg(1.5, 0)};
  for (double b2 : {0.55, 0.8, 1.2, 1.9}) {
    const ModelParams p = ModelParams::from_beta_sq(b2);
    const double ref = omega(fs[0], fs[1], fs[2], p, kPc);
    CHECK(ref > 0);
    int perm[3] = {0, 1, 2};
    while (std::next_permutation(perm, perm + 3)) {
      CHECK(omega(fs[perm[0]], fs[perm[1]], fs[perm[2]], p, kPc) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("omega precision dispatch") {
  const ModelParams p = ModelParams::from_beta_sq(0.8);
  const FieldLabel f = FieldLabel::leg(1, 0);
  const double a = omega(f, f, f, p, PrecisionContext{20, 0.0});
  const double b = omega(f, f, f, p, PrecisionContext{60, 0.0});
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  CHECK_THROWS_AS(omega(f, f, f, p, PrecisionContext{10, 0.0}), DomainError);
}

TEST_CASE("loop passage probabilities") {
  const ModelParams p = ModelParams::from_beta_sq(0.8);
  const FieldLabel one = FieldLabel::leg(1, 0);
  CHECK(probability_m_loops(1, 1, 1, 1, p, kPc) ==
        doctest::Approx(std::pow(p.loop_weight, -0.5) * omega(one, one, one, p, kPc)).epsilon(1e-14));
  CHECK_THROWS_AS(probability_m_loops(1, 1, 1, 2, p, kPc), DomainError);
  CHECK_THROWS_AS(probability_m_loops(1, 1, 1, 0, p, kPc), DomainError);

  // Dense polymer limit β² → 1/2.
  const ModelParams near = ModelParams::from_beta_sq(0.5001);
  for (double r : {1.0, 2.0}) {
    const double v = std::pow(near.loop_weight, -0.5) *
                     omega(FieldLabel::leg(r, 0), FieldLabel::leg(r, 0), FieldLabel::leg(1, 0), near, kPc);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-2));
  }
  const ModelParams closer = ModelParams::from_beta_sq(0.5 + 1e-8);
  const double v = std::pow(closer.loop_weight, -0.5) *
                   omega(FieldLabel::leg(2, 0), FieldLabel::leg(1, 0), FieldLabel::leg(1, 0), closer, kPc);
  CHECK(std::abs(v - 0.819035153) < 1e-6);
}
