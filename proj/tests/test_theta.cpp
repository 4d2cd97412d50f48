#include <doctest.h>

#include <random>

#include "modcrit/theta.hpp"
#include "test_helpers.hpp"

using namespace modcrit;
using test_helpers::naive_theta1;
using test_helpers::naive_theta2;

namespace {

const cplx I{0.0, 1.0};
const TruncationPolicy kAdaptive{};

SiegelPoint burnside() {
  const cplx d = -0.5 + I / std::sqrt(2.0);
  return SiegelPoint::make(2, {d, 0.5, d});
}

SiegelPoint shifted(const SiegelPoint& b, int j, int k, cplx h) {
  cplx e[3] = {b(0, 0), b(0, 1), b(1, 1)};
  e[j == k ? (j == 0 ? 0 : 2) : 1] += h;
  return SiegelPoint::make(2, {e[0], e[1], e[2]});
}

}  // namespace

TEST_CASE("genus-one theta constants") {
  const SiegelPoint tau50 = SiegelPoint::make(1, {50.0 * I});
  CHECK(std::abs(theta_const(Characteristic({0}, {0}), tau50, kAdaptive).value - 1.0) < 1e-15);

  const SiegelPoint tau = SiegelPoint::make(1, {cplx(0.2, 0.9)});
  CHECK(std::abs(theta_const(Characteristic({1}, {1}), tau, kAdaptive).value) < 1e-15);
  for (int p : {0, 1})
    for (int q : {0, 1}) {
      const cplx v = theta_const(Characteristic({p}, {q}), tau, kAdaptive).value;
      CHECK(std::abs(v - naive_theta1(p, q, tau(0, 0))) < 1e-13);
    }
}

TEST_CASE("diagonal matrices split into genus-one products") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.6, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const cplx t1(re(rng), im(rng)), t2(re(rng), im(rng));
    const SiegelPoint b = SiegelPoint::make(2, {t1, 0.0, t2});
    for (const auto& ch : enumerate_even_characteristics(2)) {
      const cplx lhs = theta_const(ch, b, kAdaptive).value;
      const cplx rhs = naive_theta1(ch.p_bit(0), ch.q_bit(0), t1) * naive_theta1(ch.p_bit(1), ch.q_bit(1), t2);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
  const SiegelPoint d = SiegelPoint::make(2, {I, 0.0, 2.0 * I});
  const cplx v = theta_const(Characteristic({0, 0}, {0, 0}), d, kAdaptive).value;
  CHECK(std::abs(v - naive_theta1(0, 0, I) * naive_theta1(0, 0, 2.0 * I)) < 1e-14);
}

TEST_CASE("theta_const matches the naive lattice sum") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const SiegelPoint b = test_helpers::random_point(rng);
    for (int bits = 0; bits < 16; ++bits) {
      const int p[2] = {bits >> 3 & 1, bits >> 2 & 1}, q[2] = {bits >> 1 & 1, bits & 1};
      const cplx v = theta_const(Characteristic(2, p, q), b, kAdaptive).value;
      CHECK(std::abs(v - naive_theta2(p, q, b)) < 1e-13);
    }
  }
}

TEST_CASE("enumerate_even_characteristics") {
  CHECK(enumerate_even_characteristics(1).size() == 3);
  const auto even = enumerate_even_characteristics(2);
  CHECK(even.size() == 10);
  for (const auto& ch : even) CHECK(ch.is_even());
  int odd = 0;
  for (int bits = 0; bits < 16; ++bits) {
    const int p[2] = {bits >> 3 & 1, bits >> 2 & 1}, q[2] = {bits >> 1 & 1, bits & 1};
    odd += !Characteristic(2, p, q).is_even();
  }
  CHECK(odd == 6);
}

TEST_CASE("theta_deriv matches central differences at B1") {
  const SiegelPoint b = burnside();
  const double h = 1e-6;
  for (const auto& ch : enumerate_even_characteristics(2))
    for (auto [j, k] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
      const cplx d = theta_deriv(ch, b, j, k, kAdaptive).value;
      const cplx fd = (theta_const(ch, shifted(b, j, k, h), kAdaptive).value -
                       theta_const(ch, shifted(b, j, k, -h), kAdaptive).value) /
                      (2.0 * h);
      // shifted() moves the stored entry B_jk, which is the independent coordinate theta_deriv uses.
      CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
    }
}

TEST_CASE("theta_deriv on diagonal matrices") {
  const SiegelPoint b = SiegelPoint::make(2, {I, 0.0, I});
  for (const auto& ch : enumerate_even_characteristics(2)) {
    if (ch.p_bit(0) == 0 && ch.p_bit(1) == 0) CHECK(std::abs(theta_deriv(ch, b, 0, 1, kAdaptive).value) < 1e-14);
  }
  // Odd characteristics vanish identically, so their derivative in B vanishes too.
  const Characteristic odd1({1, 0}, {1, 0});
  const SiegelPoint g = SiegelPoint::make(2, {cplx(0.1, 1.1), cplx(0.2, 0.3), cplx(-0.1, 1.4)});
  CHECK(std::abs(theta_const(odd1, g, kAdaptive).value) < 1e-14);
  CHECK(std::abs(theta_deriv(odd1, g, 0, 1, kAdaptive).value) < 1e-13);
}

TEST_CASE("conjugation symmetry") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const SiegelPoint b = test_helpers::random_point(rng);
    for (const auto& ch : enumerate_even_characteristics(2)) {
      const cplx v = theta_const(ch, b, kAdaptive).value;
      const cplx w = theta_const(ch, b.reflected(), kAdaptive).value;
      CHECK(std::abs(w - std::conj(v)) < 1e-13);
    }
  }
}

TEST_CASE("adaptive truncation and tail bounds") {
  const SiegelPoint b = burnside();
  for (const auto& ch : enumerate_even_characteristics(2)) {
    const ThetaValue a = theta_const(ch, b, TruncationPolicy::adaptive(1e-16));
    CHECK(a.terms_used >= kMinAdaptiveCutoff);
    CHECK(a.terms_used <= kMaxAdaptiveCutoff);
    CHECK(a.tail_bound < 1e-16);
    const ThetaValue f = theta_const(ch, b, TruncationPolicy::fixed(2 * a.terms_used));
    CHECK(std::abs(f.value - a.value) < 1e-15);
  }
  // Tail bound dominates the actually omitted shells.
  const int n = 3;
  const double lambda = b.min_imag_eigenvalue();
  const int zero[2] = {0, 0};
  const double omitted = std::abs(naive_theta2(zero, zero, b, 10) - theta_const(Characteristic({0, 0}, {0, 0}), b, TruncationPolicy::fixed(n)).value);
  CHECK(omitted <= theta_tail_bound(2, lambda, n));

  const SiegelPoint flat = SiegelPoint::make(2, {cplx(0.0, 0.01), 0.0, cplx(0.0, 0.01)});
  CHECK_THROWS_AS(theta_const(Characteristic({0, 0}, {0, 0}), flat, TruncationPolicy::adaptive(1e-16)), Error);
}

TEST_CASE("dedekind eta") {
  // |eta(i)| = Gamma(1/4) / (2 pi^{3/4}).
  CHECK(std::abs(dedekind_eta(I)) == doctest::Approx(std::tgamma(0.25) / (2.0 * std::pow(kPi, 0.75))).epsilon(1e-14));
  const cplx tau(0.13, 0.8);
  CHECK(std::abs(dedekind_eta(tau + 1.0)) == doctest::Approx(std::abs(dedekind_eta(tau))).epsilon(1e-14));
  const cplx t2 = 2.0 * I;
  CHECK(std::abs(dedekind_eta(-1.0 / t2)) == doctest::Approx(std::sqrt(std::abs(t2)) * std::abs(dedekind_eta(t2))).epsilon(1e-13));
  // Jacobi: theta_2 theta_3 theta_4 = 2 eta^3.
  const Genus1Thetas t = genus1_thetas(tau, kAdaptive);
  CHECK(std::abs(t.t2 * t.t3 * t.t4 - 2.0 * std::pow(dedekind_eta(tau), 3)) < 1e-13);
  // Log-derivative against a central difference.
  const double h = 1e-6;
  const cplx fd = (std::log(dedekind_eta(tau + h)) - std::log(dedekind_eta(tau - h))) / (2.0 * h);
  CHECK(std::abs(dedekind_eta_log_derivative(tau) - fd) < 1e-7);
}

TEST_CASE("even theta bundle agrees with theta_const") {
  const SiegelPoint b = burnside();
  const EvenThetaBundle bundle = even_theta_bundle(b, kAdaptive, true);
  const auto even = enumerate_even_characteristics(2);
  for (std::size_t k = 0; k < even.size(); ++k) {
    CHECK(std::abs(bundle.theta[k] - theta_const(even[k], b, kAdaptive).value) < 1e-14);
    CHECK(std::abs(bundle.dtheta[k][1] - theta_deriv(even[k], b, 0, 1, kAdaptive).value) < 1e-13);
  }
}
