#pragma once

#include <array>
#include <vector>

#include "modcrit/core.hpp"

namespace modcrit {

struct ThetaValue {
  cplx value;
  int terms_used = 0;   // lattice cutoff N actually used
  double tail_bound = 0.0;
};

/// Theta constant with half-integer characteristic, genus 1 or 2.
ThetaValue theta_const(const Characteristic& ch, const SiegelPoint& b, const TruncationPolicy& policy);

/// dTheta/dB_jk (0-based j, k) of a genus-two theta constant. The term-wise prefactor is
/// 2 pi i v_j v_k / (1 + delta_jk), i.e. the derivative in the independent entry B_jk.
ThetaValue theta_deriv(const Characteristic& ch, const SiegelPoint& b, int j, int k,
                       const TruncationPolicy& policy);

/// Even characteristics in lexicographic order of the bit pattern (p_1..p_g, q_1..q_g).
std::vector<Characteristic> enumerate_even_characteristics(int genus);

/// Bound on the omitted shells ||m||_inf > n of a genus-g theta series whose smallest
/// Im-eigenvalue is lambda. With `derivative` the terms carry the extra factor 2 pi |v|_inf^2.
double theta_tail_bound(int genus, double lambda, int n, bool derivative = false);

/// The cutoff used by `policy` for Im-eigenvalue lambda; throws TruncationFailure if adaptive
/// growth cannot reach tail_tol. Writes the resulting tail bound to *tail if non-null.
int resolve_cutoff(int genus, double lambda, const TruncationPolicy& policy, bool derivative = false,
                   double* tail = nullptr);

/// Genus-one theta with arbitrary real characteristic, sum over |m| <= n.
cplx theta1_series(double a, double b, cplx tau, int n);
/// d/dtau of theta1_series.
cplx theta1_series_dtau(double a, double b, cplx tau, int n);

/// Genus-one theta with arbitrary real characteristic under a truncation policy.
ThetaValue theta1(double a, double b, cplx tau, const TruncationPolicy& policy);

/// theta_2 = theta[1/2;0], theta_3 = theta[0;0], theta_4 = theta[0;1/2] and their tau-derivatives.
struct Genus1Thetas {
  cplx t2, t3, t4;
  cplx d2, d3, d4;
};
Genus1Thetas genus1_thetas(cplx tau, const TruncationPolicy& policy);

/// Dedekind eta by the q-product.
cplx dedekind_eta(cplx tau);
/// eta'(tau) / eta(tau).
cplx dedekind_eta_log_derivative(cplx tau);

/// All ten even genus-two theta constants (in enumerate_even_characteristics order), optionally with
/// their derivatives in (B11, B12, B22).
struct EvenThetaBundle {
  std::array<cplx, 10> theta{};
  std::array<std::array<cplx, 3>, 10> dtheta{};
  int cutoff = 0;
  double tail_bound = 0.0;
};
EvenThetaBundle even_theta_bundle(const SiegelPoint& b, const TruncationPolicy& policy, bool with_derivatives);

}  // namespace modcrit
