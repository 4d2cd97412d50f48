#pragma once

#include <array>

#include "modcrit/core.hpp"
#include "modcrit/theta.hpp"

namespace modcrit {

enum class StrataFamily { Z2, D2, D3 };

const char* to_string(StrataFamily f) noexcept;
StrataFamily parse_strata_family(const std::string& name);

/// Coordinates on a stratum: (x, y) for Z2; x for D2 (y = x - 1 implied); sigma for D3.
struct StrataCoordinates {
  StrataFamily family;
  cplx x;
  cplx y;  // used by Z2 only

  static StrataCoordinates z2(cplx x, cplx y);
  static StrataCoordinates d2(cplx x);
  static StrataCoordinates d3(cplx sigma);
};

/// (det Im B)^{5/2} times the product of |Theta| over the ten even characteristics.
double big_f(const SiegelPoint& b, const TruncationPolicy& policy = {});

/// F and its gradient in (x1, x2, x3, y1, y2, y3).
struct ValueGradient {
  double value;
  std::array<double, 6> grad;
};
ValueGradient big_f_with_gradient(const SiegelPoint& b, const TruncationPolicy& policy = {});
std::array<double, 6> grad_big_f(const SiegelPoint& b, const TruncationPolicy& policy = {});

/// (Im sigma)^{1/2} |eta(sigma)|^2.
double small_f(cplx sigma);
cplx j_invariant(cplx sigma, const TruncationPolicy& policy = {});

/// Closed forms of F on the strata. Each equals big_f on the corresponding embedded period matrix;
/// this fixes the overall constant to 16 times the bare genus-one expression.
double f_z2(cplx x, cplx y, const TruncationPolicy& policy = {});
double f_d2(cplx x, const TruncationPolicy& policy = {});
double f_d3(cplx sigma, const TruncationPolicy& policy = {});
double f_strata(const StrataCoordinates& c, const TruncationPolicy& policy = {});

inline constexpr double kStrataNormalization = 16.0;

/// Per-modulus ingredients of the Z2 closed form. With g(x) = f^3(x) Im x,
/// f_z2 = 4 g(x) g(y) |a(x) b(y) - b(x) a(y)| where a = theta_3^4, b = theta_4^4.
struct Z2Factor {
  double g = 0.0;
  double g_re = 0.0, g_im = 0.0;  // real partials of g
  cplx a, b;                     // theta_3^4, theta_4^4
  cplx da, db;                   // tau-derivatives
};
Z2Factor z2_factor(cplx tau, const TruncationPolicy& policy = {});

/// f_z2 and its gradient in (Re x, Im x, Re y, Im y).
struct Z2ValueGradient {
  double value;
  std::array<double, 4> grad;
};
Z2ValueGradient f_z2_combine(const Z2Factor& fx, const Z2Factor& fy);
Z2ValueGradient f_z2_with_gradient(cplx x, cplx y, const TruncationPolicy& policy = {});

/// Value and gradient in (Re, Im) of the one-parameter families.
struct Strata1ValueGradient {
  double value;
  std::array<double, 2> grad;
};
Strata1ValueGradient f_d2_with_gradient(cplx x, const TruncationPolicy& policy = {});
Strata1ValueGradient f_d3_with_gradient(cplx sigma, const TruncationPolicy& policy = {});

/// Genus-two theta constant with characteristic [a, b; c, d] at the Z2 period matrix of (x, y),
/// expressed through genus-one thetas of moduli 2x and 2y.
cplx theta_prym_split(double a, double b, double c, double d, cplx x, cplx y, const TruncationPolicy& policy = {});

/// |theta[a;b](2x) theta[c;b](2x) - (1/2) sum_d exp(-i pi (2a)(2d)) theta[a+c;b+d](x) theta[a-c;d](x)|.
double inverse_binary_addition_check(double a, double c, double b, cplx x, const TruncationPolicy& policy = {});

}  // namespace modcrit
