#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "modcrit/core.hpp"
#include "modcrit/modular.hpp"

namespace test_helpers {

using modcrit::cplx;
using modcrit::kPi;

/// Plain lattice sum of a genus-two theta constant over |m_i| <= n, independent of the library series.
inline cplx naive_theta2(const int p_bits[2], const int q_bits[2], const modcrit::SiegelPoint& b, int n = 8) {
  const cplx i{0.0, 1.0};
  cplx sum = 0.0;
  for (int m1 = -n; m1 <= n; ++m1)
    for (int m2 = -n; m2 <= n; ++m2) {
      const double v1 = m1 + 0.5 * p_bits[0], v2 = m2 + 0.5 * p_bits[1];
      const cplx quad = b(0, 0) * v1 * v1 + 2.0 * b(0, 1) * v1 * v2 + b(1, 1) * v2 * v2;
      sum += std::exp(i * kPi * quad + 2.0 * kPi * i * (v1 * 0.5 * q_bits[0] + v2 * 0.5 * q_bits[1]));
    }
  return sum;
}

/// Genus-one lattice sum with half-integer characteristic bits.
inline cplx naive_theta1(int p_bit, int q_bit, cplx tau, int n = 30) {
  const cplx i{0.0, 1.0};
  cplx sum = 0.0;
  for (int m = -n; m <= n; ++m) {
    const double v = m + 0.5 * p_bit;
    sum += std::exp(i * kPi * tau * v * v + 2.0 * kPi * i * v * 0.5 * double(q_bit));
  }
  return sum;
}

/// F from the naive sums: (det Im B)^{5/2} times the product over the ten even characteristics.
inline double naive_big_f(const modcrit::SiegelPoint& b) {
  double prod = 1.0;
  for (int bits = 0; bits < 16; ++bits) {
    const int p[2] = {bits >> 3 & 1, bits >> 2 & 1}, q[2] = {bits >> 1 & 1, bits & 1};
    if ((p[0] * q[0] + p[1] * q[1]) % 2 != 0) continue;
    prod *= std::abs(naive_theta2(p, q, b));
  }
  return std::pow(b.det_imag(), 2.5) * prod;
}

/// Random word of `length` generators (or their inverses) of Sp(4, Z).
inline modcrit::SymplecticTransform random_word(std::mt19937& rng, int length) {
  const auto& gens = modcrit::sp4_generators();
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  std::bernoulli_distribution flip(0.5);
  auto t = modcrit::SymplecticTransform::identity(2);
  for (int k = 0; k < length; ++k) {
    const auto& g = gens[pick(rng)];
    t = modcrit::symplectic_compose(flip(rng) ? g : g.inverse(), t);
  }
  return t;
}

/// Random point with Im B close to a reduced positive form and small real parts.
inline modcrit::SiegelPoint random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> re(-0.5, 0.5), y(0.9, 1.8), off(0.0, 0.4);
  const double y1 = y(rng), y3 = y1 + 0.3 * off(rng), y2 = off(rng) * y1 * 0.5;
  return modcrit::SiegelPoint::make(2, {cplx(re(rng), y1), cplx(re(rng), y2), cplx(re(rng), y3)});
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace test_helpers
