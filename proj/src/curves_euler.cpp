#include "modcrit/curves_euler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "modcrit/strata.hpp"
#include "modcrit/theta.hpp"

namespace modcrit {

namespace {

// Projective coordinates (z1 : z2) of a sphere point.
std::array<cplx, 2> proj(const SpherePoint& p) {
  if (p.at_infinity) return {1.0, 0.0};
  return {p.value, 1.0};
}

SpherePoint from_proj(cplx z1, cplx z2) {
  if (std::abs(z2) <= 1e-300 || std::abs(z1) > 1e15 * std::abs(z2)) return SpherePoint::infinity();
  return {z1 / z2, false};
}

using Mat2 = std::array<cplx, 4>;  // row-major

// The Moebius map sending a -> 0, b -> 1, c -> inf.
Mat2 to_zero_one_inf(const SpherePoint& a, const SpherePoint& b, const SpherePoint& c) {
  const auto pa = proj(a), pb = proj(b), pc = proj(c);
  const cplx k1 = pb[0] * pc[1] - pc[0] * pb[1];
  const cplx k2 = pb[0] * pa[1] - pa[0] * pb[1];
  return {k1 * pa[1], -k1 * pa[0], k2 * pc[1], -k2 * pc[0]};
}

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

Mat2 inv(const Mat2& m) { return {m[3], -m[1], -m[2], m[0]}; }

SpherePoint apply(const Mat2& m, const SpherePoint& p) {
  const auto z = proj(p);
  return from_proj(m[0] * z[0] + m[1] * z[1], m[2] * z[0] + m[3] * z[1]);
}

// Smallest over assignments of the max chordal mismatch between two 3-element lists.
double match_three(const std::array<SpherePoint, 3>& u, const std::array<SpherePoint, 3>& v) {
  std::array<int, 3> perm{0, 1, 2};
  double best = 1e300;
  do {
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, chordal_distance(u[k], v[perm[k]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

template <typename Fn>
void for_each_ordered_triple(Fn&& fn) {
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k)
        if (i != j && j != k && i != k) fn(i, j, k);
}

std::array<SpherePoint, 3> rest_images(const BranchPointSet& s, int i, int j, int k, const Mat2& m) {
  std::array<SpherePoint, 3> out;
  int n = 0;
  for (int t = 0; t < 6; ++t)
    if (t != i && t != j && t != k) out[n++] = apply(m, s.points[t]);
  return out;
}

bool g_validated = false;
std::once_flag g_validation_once;

std::array<cplx, 4> raw_lambdas(const SiegelPoint& b, const TruncationPolicy& policy) {
  auto t = [&](int i) {
    const int q[2] = {i & 1, (i >> 1) & 1};
    const int p[2] = {(i >> 2) & 1, (i >> 3) & 1};
    return theta_const(Characteristic(2, p, q), b, policy).value;
  };
  const cplx t0 = t(0), t1 = t(1), t2 = t(2), t3 = t(3), t12 = t(12), t15 = t(15);
  const cplx l1 = t0 * t2 / (t3 * t1), l2 = t2 * t12 / (t1 * t15), l3 = t0 * t12 / (t3 * t15);
  return {l1 * l1, l2 * l2, l3 * l3, 0.0};
}

BranchPointSet assemble(const std::array<cplx, 4>& l) {
  BranchPointSet s;
  s.points = {SpherePoint{0.0}, SpherePoint{1.0}, SpherePoint::infinity(), SpherePoint{l[0]}, SpherePoint{l[1]},
              SpherePoint{l[2]}};
  return s;
}

}  // namespace

std::string SpherePoint::to_string() const {
  if (at_infinity) return "inf";
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.15g%+.15gi", value.real(), value.imag());
  return buf;
}

double chordal_distance(const SpherePoint& a, const SpherePoint& b) {
  if (a.at_infinity && b.at_infinity) return 0.0;
  if (a.at_infinity) return 1.0 / std::sqrt(1.0 + std::norm(b.value));
  if (b.at_infinity) return 1.0 / std::sqrt(1.0 + std::norm(a.value));
  return std::abs(a.value - b.value) / (std::sqrt(1.0 + std::norm(a.value)) * std::sqrt(1.0 + std::norm(b.value)));
}

void BranchPointSet::validate() const {
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (chordal_distance(points[i], points[j]) < 1e-8)
        throw Error(ErrorKind::DegenerateValue, "branch points " + points[i].to_string() + " and " +
                                                    points[j].to_string() + " coincide");
}

BranchPointSet BranchPointSet::from_finite(const std::array<cplx, 6>& z) {
  BranchPointSet s;
  for (int i = 0; i < 6; ++i) s.points[i] = {z[i], false};
  return s;
}

MoebiusComparison moebius_equivalent(const BranchPointSet& a, const BranchPointSet& b, double tol) {
  const Mat2 mb = to_zero_one_inf(b.points[0], b.points[1], b.points[2]);
  const auto target = rest_images(b, 0, 1, 2, mb);
  MoebiusComparison out;
  out.residual = 1e300;
  for_each_ordered_triple([&](int i, int j, int k) {
    const Mat2 m = to_zero_one_inf(a.points[i], a.points[j], a.points[k]);
    out.residual = std::min(out.residual, match_three(rest_images(a, i, j, k, m), target));
  });
  out.equivalent = out.residual <= tol;
  return out;
}

bool rosenhain_convention_validated() {
  std::call_once(g_validation_once, [] {
    const BranchPointSet s = assemble(raw_lambdas(reference_curve(CurveName::Burnside).period_matrix, {}));
    const cplx i{0.0, 1.0};
    BranchPointSet bolza;
    bolza.points = {SpherePoint{0.0}, SpherePoint::infinity(), SpherePoint{1.0}, SpherePoint{i}, SpherePoint{-1.0},
                    SpherePoint{-i}};
    g_validated = moebius_equivalent(s, bolza, 1e-8).equivalent;
  });
  return g_validated;
}

BranchPointSet rosenhain_branch_points(const SiegelPoint& b, const TruncationPolicy& policy) {
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "Rosenhain branch points need genus 2");
  if (!rosenhain_convention_validated())
    throw Error(ErrorKind::ConventionUnvalidated, "theta-quotient convention failed the Burnside self-test");
  const auto l = raw_lambdas(b, policy);
  for (int k = 0; k < 3; ++k)
    if (!std::isfinite(l[k].real()) || !std::isfinite(l[k].imag()))
      throw Error(ErrorKind::DegenerateValue, "a theta constant in the Rosenhain quotients vanishes");
  BranchPointSet s = assemble(l);
  s.validate();
  return s;
}

D3Match match_d3_normal_form(const BranchPointSet& points) {
  const cplx e3 = RootOfUnity(3).value();
  const Mat2 m_ref = to_zero_one_inf(SpherePoint{1.0}, SpherePoint{e3}, SpherePoint{e3 * e3});
  const Mat2 back = inv(m_ref);
  double best = 1e300;
  cplx best_cube{};
  for_each_ordered_triple([&](int i, int j, int k) {
    const Mat2 m = mul(back, to_zero_one_inf(points.points[i], points.points[j], points.points[k]));
    const auto w = rest_images(points, i, j, k, m);
    if (w[0].at_infinity || w[1].at_infinity || w[2].at_infinity) return;
    const cplx c0 = std::pow(w[0].value, 3), c1 = std::pow(w[1].value, 3), c2 = std::pow(w[2].value, 3);
    const cplx mean = (c0 + c1 + c2) / 3.0;
    const double scale = std::max(1.0, std::abs(mean));
    const double res = (std::max({std::abs(c0 - mean), std::abs(c1 - mean), std::abs(c2 - mean)}) +
                        std::abs(w[0].value + w[1].value + w[2].value)) /
                       scale;
    if (res < best) {
      best = res;
      best_cube = mean;
    }
  });
  if (!(best <= kD3MatchTolerance))
    throw Error(ErrorKind::NoD3Structure, "best D3 normal-form residual " + std::to_string(best));
  const cplx cube = std::abs(best_cube) > 1.0 ? 1.0 / best_cube : best_cube;
  // Among the three cube roots pick the one closest to the positive real axis.
  const cplx root = std::pow(cube, 1.0 / 3.0);
  const cplx e3c = RootOfUnity(3).value();
  cplx r = root;
  for (int k = 1; k < 3; ++k) {
    const cplx c = root * std::pow(e3c, k);
    if (std::abs(std::arg(c)) < std::abs(std::arg(r))) r = c;
  }
  return {r, 1.0 / r, best, std::abs(r.imag())};
}

RationalValue mass_formula(const std::vector<MassTerm>& terms, bool hyperelliptic_double) {
  RationalValue sum(0);
  for (const auto& t : terms) {
    if (t.stabilizer_order < 1) throw Error(ErrorKind::InvalidArgument, "stabilizer order must be >= 1");
    sum += RationalValue(t.index % 2 == 0 ? 1 : -1, t.stabilizer_order);
  }
  return hyperelliptic_double ? sum * RationalValue(2) : sum;
}

int automorphism_order(CriticalLabel label) {
  switch (label) {
    case CriticalLabel::Burnside: return bolza_family(FamilyName::S4).aut_order;
    case CriticalLabel::D6: return bolza_family(FamilyName::D6).aut_order;
    case CriticalLabel::Z5: return bolza_family(FamilyName::Z5).aut_order;
    case CriticalLabel::D3extremal: return bolza_family(FamilyName::D3).aut_order;
    case CriticalLabel::Unknown: break;
  }
  throw Error(ErrorKind::InvalidArgument, "no automorphism order for an unknown critical point");
}

std::vector<MassTerm> full_space_mass_terms() {
  return {{6, automorphism_order(CriticalLabel::Burnside), "Burnside"},
          {3, automorphism_order(CriticalLabel::D6), "D6"},
          {4, automorphism_order(CriticalLabel::Z5), "Z5"},
          {5, automorphism_order(CriticalLabel::D3extremal), "D3extremal"}};
}

std::vector<MassTerm> genus1_mass_terms() { return {{1, 4, "sigma=i"}, {2, 6, "sigma=exp(i pi/3)"}}; }

std::vector<MassTerm> strata_mass_terms(StrataFamily family) {
  switch (family) {
    case StrataFamily::D2: return {{2, 2, "Burnside"}, {1, 1, "D6"}};
    case StrataFamily::D3: return {{2, 1, "Burnside"}, {1, 2, "D6"}, {1, 1, "D3extremal"}};
    case StrataFamily::Z2: return {{4, 4, "Burnside"}, {2, 2, "D6"}, {3, 1, "D3extremal"}};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown family");
}

RationalValue strata_euler(StrataFamily family) { return mass_formula(strata_mass_terms(family), false); }

bool fourth_point_forced() {
  const RationalValue target(-1, 240);
  const RationalValue terms[3] = {RationalValue(1, 48), RationalValue(1, 24), RationalValue(1, 10)};
  for (int mask = 0; mask < 8; ++mask) {
    RationalValue s(0);
    for (int k = 0; k < 3; ++k) s += (mask >> k & 1) ? -terms[k] : terms[k];
    if (s == target) return false;
  }
  return true;
}

}  // namespace modcrit
