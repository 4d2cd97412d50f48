#include "modcrit/theta.hpp"

#include <cmath>

namespace modcrit {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_upper(cplx tau) {
  if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
    throw Error(ErrorKind::InvalidArgument, "modulus must lie in the upper half-plane");
}

// Calls f(m1, m2) for every lattice point with max(|m1|,|m2|) <= n, shell by shell from the
// origin outwards, so that raising n only appends terms.
template <class F>
void for_each_shell_point(int genus, int n, F&& f) {
  f(0, 0);
  for (int s = 1; s <= n; ++s) {
    if (genus == 1) {
      f(-s, 0);
      f(s, 0);
      continue;
    }
    for (int m2 = -s; m2 <= s; ++m2) {
      f(-s, m2);
      f(s, m2);
    }
    for (int m1 = -s + 1; m1 <= s - 1; ++m1) {
      f(m1, -s);
      f(m1, s);
    }
  }
}

int even_index(int p0, int p1, int q0, int q1) {
  // Position among the ten even characteristics in lexicographic bit order.
  static const auto table = [] {
    std::array<int, 16> t{};
    t.fill(-1);
    int k = 0;
    for (int bits = 0; bits < 16; ++bits) {
      const int a0 = (bits >> 3) & 1, a1 = (bits >> 2) & 1, b0 = (bits >> 1) & 1, b1 = bits & 1;
      if ((a0 * b0 + a1 * b1) % 2 == 0) t[bits] = k++;
    }
    return t;
  }();
  return table[(p0 << 3) | (p1 << 2) | (q0 << 1) | q1];
}

}  // namespace

double theta_tail_bound(int genus, double lambda, int n, bool derivative) {
  if (!(lambda > 0.0)) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int s = n + 1; s < n + 2000; ++s) {
    const double count = std::pow(2.0 * s + 1.0, genus) - std::pow(2.0 * s - 1.0, genus);
    const double r = s - 0.5;
    double w = count * std::exp(-kPi * lambda * r * r);
    if (derivative) w *= 2.0 * kPi * (s + 0.5) * (s + 0.5);
    total += w;
    if (w < 1e-40 || w < total * 1e-20) break;
  }
  return total;
}

int resolve_cutoff(int genus, double lambda, const TruncationPolicy& policy, bool derivative, double* tail) {
  policy.validate();
  if (policy.mode == TruncationPolicy::Mode::Fixed) {
    if (tail) *tail = theta_tail_bound(genus, lambda, policy.n, derivative);
    return policy.n;
  }
  for (int n = std::max(kMinAdaptiveCutoff, policy.n); n <= kMaxAdaptiveCutoff; ++n) {
    const double b = theta_tail_bound(genus, lambda, n, derivative);
    if (b < policy.tail_tol) {
      if (tail) *tail = b;
      return n;
    }
  }
  throw Error(ErrorKind::TruncationFailure,
              "tail bound above " + std::to_string(policy.tail_tol) + " at N = " +
                  std::to_string(kMaxAdaptiveCutoff) + " (min Im eigenvalue " + std::to_string(lambda) + ")");
}

namespace {

// Shared series evaluator. `jk` < 0 gives the theta value, otherwise the derivative in entry jk
// (0 = B11, 1 = B12, 2 = B22).
ThetaValue theta_series(const Characteristic& ch, const SiegelPoint& b, int jk, const TruncationPolicy& policy) {
  const int g = b.genus();
  if (ch.genus() != g) throw Error(ErrorKind::DimensionMismatch, "characteristic and period matrix genus differ");
  if (g > 2) throw Error(ErrorKind::InvalidArgument, "theta series implemented for genus 1 and 2");
  ThetaValue out;
  out.terms_used = resolve_cutoff(g, b.min_imag_eigenvalue(), policy, jk >= 0, &out.tail_bound);
  const double p0 = ch.p(0), q0 = ch.q(0);
  const double p1 = g == 2 ? ch.p(1) : 0.0, q1 = g == 2 ? ch.q(1) : 0.0;
  const cplx b11 = b(0, 0), b12 = g == 2 ? b(0, 1) : 0.0, b22 = g == 2 ? b(1, 1) : 0.0;
  cplx sum = 0.0;
  for_each_shell_point(g, out.terms_used, [&](int m1, int m2) {
    const double v1 = m1 + p0, v2 = m2 + p1;
    const cplx arg = kI * kPi * (b11 * (v1 * v1) + 2.0 * b12 * (v1 * v2) + b22 * (v2 * v2)) +
                     kI * (2.0 * kPi * (v1 * q0 + v2 * q1));
    cplx t = std::exp(arg);
    if (jk == 0) t *= kI * kPi * (v1 * v1);
    else if (jk == 1) t *= kI * (2.0 * kPi) * (v1 * v2);
    else if (jk == 2) t *= kI * kPi * (v2 * v2);
    sum += t;
  });
  out.value = sum;
  return out;
}

}  // namespace

ThetaValue theta_const(const Characteristic& ch, const SiegelPoint& b, const TruncationPolicy& policy) {
  return theta_series(ch, b, -1, policy);
}

ThetaValue theta_deriv(const Characteristic& ch, const SiegelPoint& b, int j, int k, const TruncationPolicy& policy) {
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "theta_deriv requires genus 2");
  if (j < 0 || j > 1 || k < 0 || k > 1) throw Error(ErrorKind::InvalidArgument, "derivative index out of range");
  return theta_series(ch, b, j == k ? 2 * j : 1, policy);
}

std::vector<Characteristic> enumerate_even_characteristics(int genus) {
  if (genus != 1 && genus != 2) throw Error(ErrorKind::InvalidArgument, "genus must be 1 or 2");
  std::vector<Characteristic> out;
  for (int bits = 0; bits < (1 << (2 * genus)); ++bits) {
    std::array<int, 2> p{}, q{};
    for (int i = 0; i < genus; ++i) {
      p[i] = (bits >> (2 * genus - 1 - i)) & 1;
      q[i] = (bits >> (genus - 1 - i)) & 1;
    }
    Characteristic c(genus, std::span<const int>(p.data(), genus), std::span<const int>(q.data(), genus));
    if (c.is_even()) out.push_back(c);
  }
  return out;
}

cplx theta1_series(double a, double b, cplx tau, int n) {
  cplx sum = 0.0;
  for_each_shell_point(1, n, [&](int m, int) {
    const double v = m + a;
    sum += std::exp(kI * (kPi * v * v) * tau + kI * (2.0 * kPi * v * b));
  });
  return sum;
}

cplx theta1_series_dtau(double a, double b, cplx tau, int n) {
  cplx sum = 0.0;
  for_each_shell_point(1, n, [&](int m, int) {
    const double v = m + a;
    sum += kI * (kPi * v * v) * std::exp(kI * (kPi * v * v) * tau + kI * (2.0 * kPi * v * b));
  });
  return sum;
}

ThetaValue theta1(double a, double b, cplx tau, const TruncationPolicy& policy) {
  require_upper(tau);
  ThetaValue out;
  // Characteristics outside [0,1) shift the lattice; widen the cutoff by the integer part.
  const int shift = static_cast<int>(std::ceil(std::abs(a)));
  out.terms_used = resolve_cutoff(1, tau.imag(), policy, false, &out.tail_bound) + shift;
  out.value = theta1_series(a, b, tau, out.terms_used);
  return out;
}

Genus1Thetas genus1_thetas(cplx tau, const TruncationPolicy& policy) {
  require_upper(tau);
  const int n = resolve_cutoff(1, tau.imag(), policy, true);
  return {theta1_series(0.5, 0.0, tau, n),      theta1_series(0.0, 0.0, tau, n),
          theta1_series(0.0, 0.5, tau, n),      theta1_series_dtau(0.5, 0.0, tau, n),
          theta1_series_dtau(0.0, 0.0, tau, n), theta1_series_dtau(0.0, 0.5, tau, n)};
}

cplx dedekind_eta(cplx tau) {
  require_upper(tau);
  const cplx q = std::exp(kI * (2.0 * kPi) * tau);
  cplx prod = 1.0, qn = q;
  for (long k = 1; k < 100000000L && std::abs(qn) > 1e-18; ++k) {
    prod *= 1.0 - qn;
    qn *= q;
  }
  return std::exp(kI * (kPi / 12.0) * tau) * prod;
}

cplx dedekind_eta_log_derivative(cplx tau) {
  require_upper(tau);
  const cplx q = std::exp(kI * (2.0 * kPi) * tau);
  cplx sum = 0.0, qn = q;
  for (long k = 1; k < 100000000L && static_cast<double>(k) * std::abs(qn) > 1e-18; ++k) {
    sum += static_cast<double>(k) * qn / (1.0 - qn);
    qn *= q;
  }
  return kI * (kPi / 12.0) - kI * (2.0 * kPi) * sum;
}

EvenThetaBundle even_theta_bundle(const SiegelPoint& b, const TruncationPolicy& policy, bool with_derivatives) {
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "even_theta_bundle requires genus 2");
  EvenThetaBundle out;
  out.cutoff = resolve_cutoff(2, b.min_imag_eigenvalue(), policy, with_derivatives, &out.tail_bound);
  const cplx b11 = b(0, 0), b12 = b(0, 1), b22 = b(1, 1);
  const cplx pi_i = kI * kPi;
  for (int p0 = 0; p0 < 2; ++p0) {
    for (int p1 = 0; p1 < 2; ++p1) {
      // Even q for this p, with their slots in the output.
      int slots[4], qs[4][2], nq = 0;
      for (int q0 = 0; q0 < 2; ++q0)
        for (int q1 = 0; q1 < 2; ++q1)
          if ((p0 * q0 + p1 * q1) % 2 == 0) {
            slots[nq] = even_index(p0, p1, q0, q1);
            qs[nq][0] = q0;
            qs[nq][1] = q1;
            ++nq;
          }
      const cplx e0 = p0 ? kI : cplx(1.0), e1 = p1 ? kI : cplx(1.0);  // exp(i pi p_i)
      for_each_shell_point(2, out.cutoff, [&](int m1, int m2) {
        const double v1 = m1 + 0.5 * p0, v2 = m2 + 0.5 * p1;
        const cplx base = std::exp(pi_i * (b11 * (v1 * v1) + 2.0 * b12 * (v1 * v2) + b22 * (v2 * v2)));
        // exp(i pi v_i) = (-1)^{m_i} exp(i pi p_i)
        const cplx ph0 = (m1 & 1) ? -e0 : e0, ph1 = (m2 & 1) ? -e1 : e1;
        for (int s = 0; s < nq; ++s) {
          cplx t = base;
          if (qs[s][0]) t *= ph0;
          if (qs[s][1]) t *= ph1;
          out.theta[slots[s]] += t;
          if (with_derivatives) {
            out.dtheta[slots[s]][0] += t * (pi_i * (v1 * v1));
            out.dtheta[slots[s]][1] += t * (2.0 * pi_i * (v1 * v2));
            out.dtheta[slots[s]][2] += t * (pi_i * (v2 * v2));
          }
        }
      });
    }
  }
  return out;
}

}  // namespace modcrit
