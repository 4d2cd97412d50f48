#include "modcrit/functional.hpp"

#include <cmath>

namespace modcrit {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kDegenerate = 1e-300;

void require_upper(cplx tau, const char* what) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must have Im > 0");
}

cplx pow4(cplx z) {
  const cplx z2 = z * z;
  return z2 * z2;
}

// Real partials (d/dRe, d/dIm) of |h| for holomorphic h with derivative dh.
std::array<double, 2> abs_partials(cplx h, cplx dh) {
  const double m = std::abs(h);
  const cplx w = std::conj(h) * dh;
  return {w.real() / m, -w.imag() / m};
}

}  // namespace

const char* to_string(StrataFamily f) noexcept {
  switch (f) {
    case StrataFamily::Z2: return "z2";
    case StrataFamily::D2: return "d2";
    case StrataFamily::D3: return "d3";
  }
  return "?";
}

StrataFamily parse_strata_family(const std::string& name) {
  if (name == "z2" || name == "Z2") return StrataFamily::Z2;
  if (name == "d2" || name == "D2") return StrataFamily::D2;
  if (name == "d3" || name == "D3") return StrataFamily::D3;
  throw Error(ErrorKind::InvalidArgument, "unknown strata family '" + name + "'");
}

StrataCoordinates StrataCoordinates::z2(cplx x, cplx y) {
  require_upper(x, "x");
  require_upper(y, "y");
  return {StrataFamily::Z2, x, y};
}

StrataCoordinates StrataCoordinates::d2(cplx x) {
  require_upper(x, "x");
  return {StrataFamily::D2, x, x - 1.0};
}

StrataCoordinates StrataCoordinates::d3(cplx sigma) {
  require_upper(sigma, "sigma");
  return {StrataFamily::D3, sigma, 0.0};
}

double big_f(const SiegelPoint& b, const TruncationPolicy& policy) {
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "big_f requires genus 2");
  const auto bundle = even_theta_bundle(b, policy, false);
  double prod = 1.0;
  for (const auto& t : bundle.theta) prod *= std::abs(t);
  return std::pow(b.det_imag(), 2.5) * prod;
}

ValueGradient big_f_with_gradient(const SiegelPoint& b, const TruncationPolicy& policy) {
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "grad_big_f requires genus 2");
  const auto bundle = even_theta_bundle(b, policy, true);
  double prod = 1.0;
  std::array<cplx, 3> dlog{};
  for (int s = 0; s < 10; ++s) {
    prod *= std::abs(bundle.theta[s]);
    for (int e = 0; e < 3; ++e) dlog[e] += bundle.dtheta[s][e] / bundle.theta[s];
  }
  const Coords6 c = b.coords();
  const double det = b.det_imag();
  const double value = std::pow(det, 2.5) * prod;
  if (!(value >= kDegenerate))
    throw Error(ErrorKind::DegenerateValue, "F vanishes; logarithmic gradient undefined");
  const std::array<double, 3> dlogdet = {c[5] / det, -2.0 * c[4] / det, c[3] / det};
  ValueGradient out{value, {}};
  for (int e = 0; e < 3; ++e) {
    out.grad[e] = value * dlog[e].real();
    out.grad[3 + e] = value * (-dlog[e].imag() + 2.5 * dlogdet[e]);
  }
  return out;
}

std::array<double, 6> grad_big_f(const SiegelPoint& b, const TruncationPolicy& policy) {
  return big_f_with_gradient(b, policy).grad;
}

double small_f(cplx sigma) {
  require_upper(sigma, "sigma");
  return std::sqrt(sigma.imag()) * std::norm(dedekind_eta(sigma));
}

cplx j_invariant(cplx sigma, const TruncationPolicy& policy) {
  const auto t = genus1_thetas(sigma, policy);
  const cplx a = std::pow(t.t2, 8), b = std::pow(t.t3, 8), c = std::pow(t.t4, 8);
  const cplx den = 54.0 * a * b * c;
  if (std::abs(den) == 0.0) throw Error(ErrorKind::SingularDenominator, "theta product vanishes");
  return std::pow(a + b + c, 3) / den;
}

Z2Factor z2_factor(cplx tau, const TruncationPolicy& policy) {
  require_upper(tau, "modulus");
  const auto t = genus1_thetas(tau, policy);
  Z2Factor z;
  const double im = tau.imag();
  const double f = small_f(tau);
  z.g = f * f * f * im;
  const cplx dl = dedekind_eta_log_derivative(tau);
  // log g = (5/2) log Im tau + 6 log|eta|
  z.g_re = z.g * 6.0 * dl.real();
  z.g_im = z.g * (2.5 / im - 6.0 * dl.imag());
  z.a = pow4(t.t3);
  z.b = pow4(t.t4);
  z.da = 4.0 * t.t3 * t.t3 * t.t3 * t.d3;
  z.db = 4.0 * t.t4 * t.t4 * t.t4 * t.d4;
  return z;
}

Z2ValueGradient f_z2_combine(const Z2Factor& fx, const Z2Factor& fy) {
  const cplx p = fx.a * fy.b - fx.b * fy.a;
  const double ap = std::abs(p);
  const double k = 0.25 * kStrataNormalization;
  Z2ValueGradient out{k * fx.g * fy.g * ap, {}};
  if (!(ap > 0.0)) {
    out.grad = {0.0, 0.0, 0.0, 0.0};
    return out;
  }
  const auto px = abs_partials(p, fx.da * fy.b - fx.db * fy.a);
  const auto py = abs_partials(p, fx.a * fy.db - fx.b * fy.da);
  out.grad[0] = k * (fx.g_re * fy.g * ap + fx.g * fy.g * px[0]);
  out.grad[1] = k * (fx.g_im * fy.g * ap + fx.g * fy.g * px[1]);
  out.grad[2] = k * (fx.g * fy.g_re * ap + fx.g * fy.g * py[0]);
  out.grad[3] = k * (fx.g * fy.g_im * ap + fx.g * fy.g * py[1]);
  return out;
}

Z2ValueGradient f_z2_with_gradient(cplx x, cplx y, const TruncationPolicy& policy) {
  return f_z2_combine(z2_factor(x, policy), z2_factor(y, policy));
}

double f_z2(cplx x, cplx y, const TruncationPolicy& policy) {
  require_upper(x, "x");
  require_upper(y, "y");
  const auto tx = genus1_thetas(x, policy), ty = genus1_thetas(y, policy);
  const double fx = small_f(x), fy = small_f(y);
  const double pre = 0.25 * kStrataNormalization * std::pow(fx * fy, 3) * x.imag() * y.imag();
  return pre * std::abs(pow4(tx.t3) * pow4(ty.t4) - pow4(tx.t4) * pow4(ty.t3));
}

double f_d2(cplx x, const TruncationPolicy& policy) {
  require_upper(x, "x");
  const auto t = genus1_thetas(x, policy);
  const double f = small_f(x);
  const double im = x.imag();
  return 0.25 * kStrataNormalization * std::pow(f, 6) * im * im * std::abs(std::pow(t.t4, 8) - std::pow(t.t3, 8));
}

double f_d3(cplx sigma, const TruncationPolicy& policy) {
  require_upper(sigma, "sigma");
  const auto t1 = genus1_thetas(sigma, policy), t3 = genus1_thetas(3.0 * sigma, policy);
  const double f1 = small_f(sigma), f3 = small_f(3.0 * sigma);
  const double im = sigma.imag();
  return 0.75 * kStrataNormalization * std::pow(f1 * f3, 3) * im * im *
         std::abs(pow4(t1.t4) * pow4(t3.t3) - pow4(t1.t3) * pow4(t3.t4));
}

double f_strata(const StrataCoordinates& c, const TruncationPolicy& policy) {
  switch (c.family) {
    case StrataFamily::Z2: return f_z2(c.x, c.y, policy);
    case StrataFamily::D2: return f_d2(c.x, policy);
    case StrataFamily::D3: return f_d3(c.x, policy);
  }
  throw Error(ErrorKind::InvalidArgument, "bad strata family");
}

Strata1ValueGradient f_d2_with_gradient(cplx x, const TruncationPolicy& policy) {
  const auto z = f_z2_with_gradient(x, x - 1.0, policy);
  return {z.value, {z.grad[0] + z.grad[2], z.grad[1] + z.grad[3]}};
}

Strata1ValueGradient f_d3_with_gradient(cplx sigma, const TruncationPolicy& policy) {
  const auto z = f_z2_with_gradient(3.0 * sigma, sigma, policy);
  return {z.value, {3.0 * z.grad[0] + z.grad[2], 3.0 * z.grad[1] + z.grad[3]}};
}

cplx theta_prym_split(double a, double b, double c, double d, cplx x, cplx y, const TruncationPolicy& policy) {
  require_upper(x, "x");
  require_upper(y, "y");
  cplx sum = 0.0;
  for (double e : {0.0, 0.5}) {
    sum += theta1((a + b) / 2 + e, c + d, 2.0 * x, policy).value *
           theta1((a - b) / 2 + e, c - d, 2.0 * y, policy).value;
  }
  return sum;
}

double inverse_binary_addition_check(double a, double c, double b, cplx x, const TruncationPolicy& policy) {
  require_upper(x, "x");
  const cplx lhs = theta1(a, b, 2.0 * x, policy).value * theta1(c, b, 2.0 * x, policy).value;
  cplx rhs = 0.0;
  for (double d : {0.0, 0.5}) {
    rhs += std::exp(-kI * kPi * (2.0 * a) * (2.0 * d)) * theta1(a + c, b + d, x, policy).value *
           theta1(a - c, d, x, policy).value;
  }
  return std::abs(lhs - 0.5 * rhs);
}

}  // namespace modcrit
