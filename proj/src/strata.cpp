#include "modcrit/strata.hpp"

#include <cmath>

#include "modcrit/modular.hpp"

namespace modcrit {

namespace {

constexpr cplx kI{0.0, 1.0};

// Refined by Newton iteration on d f_d3 / d Im(sigma) along Re(sigma) = 1/2.
constexpr double kD3ExtremalImag = 0.525861355976802984508;

SymplecticTransform rows(std::initializer_list<std::int64_t> r) { return SymplecticTransform::from_rows(2, r); }

const SymplecticTransform& tmu_z2() {
  static const SymplecticTransform t = rows({0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
  return t;
}

std::vector<SymplecticTransform> stab_b1() {
  return {rows({0, -1, 1, -1, 0, 1, 0, 1, -1, 1, -1, 1, -1, -1, 0, 0}),
          rows({-1, 0, 0, 0, 1, 1, 0, 0, 0, 1, -1, 1, -1, 0, 0, 1}), tmu_z2()};
}

std::vector<SymplecticTransform> stab_b2() {
  return {rows({0, 0, -1, 0, 0, 0, -1, -1, 1, -1, 0, 0, 0, 1, 0, 0}), tmu_z2()};
}

std::vector<SymplecticTransform> stab_b3() { return {rows({-1, 1, 0, 0, -1, 0, 1, 1, 0, 0, 0, 1, -1, 0, 0, 0})}; }

SymplecticTransform klein_sigma() {
  IntMatrix m(6, 6);
  m << 1, 1, 1, 1, 0, 0,   //
      0, -1, -1, -1, 1, 0,  //
      0, 1, 0, 1, -1, 0,    //
      -1, -1, 0, 0, 0, 0,   //
      -1, -1, 0, 0, 0, -1,  //
      -1, 0, 0, 0, 0, -1;
  return SymplecticTransform(m);
}

SiegelPoint klein_matrix() {
  const double s7 = std::sqrt(7.0);
  // The (3,3) imaginary part is 3 sqrt(7)/8; a tabulated sqrt(3)/8 leaves Sigma without a fixed point.
  return SiegelPoint::make(3, {cplx(-1.0 / 8, 3 * s7 / 8), cplx(-0.25, -s7 / 4), cplx(-3.0 / 8, s7 / 8),
                               cplx(0.5, s7 / 2), cplx(-0.25, -s7 / 4), cplx(7.0 / 8, 3 * s7 / 8)});
}

cplx eps5() { return RootOfUnity(5).value(); }

}  // namespace

const char* to_string(FamilyName f) noexcept {
  switch (f) {
    case FamilyName::Z2: return "Z2";
    case FamilyName::D2: return "D2";
    case FamilyName::D3: return "D3";
    case FamilyName::S4: return "S4";
    case FamilyName::D6: return "D6";
    case FamilyName::Z5: return "Z5";
  }
  return "?";
}

const std::vector<BolzaFamily>& bolza_families() {
  static const std::vector<BolzaFamily> families = [] {
    std::vector<BolzaFamily> v;
    v.push_back({FamilyName::Z2, "y^2 = (z^2-1)(z^2-r1^2)(z^2-r2^2)", 4, "Z2", {tmu_z2()}});
    v.push_back({FamilyName::D2, "y^2 = z(z^2-1)(z^2-r^2)", 8, "D2",
                 {rows({0, 1, -1, 0, -1, 0, 0, 1, 0, 0, 0, 1, 0, 0, -1, 0}), tmu_z2()}});
    v.push_back({FamilyName::D3, "y^2 = (z^3-1)(z^3-r^3)", 12, "D3",
                 {rows({-1, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, -1}),
                  rows({1, -1, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0, 0, -1, -1})}});
    v.push_back({FamilyName::S4, "y^2 = z(z^4-1)", 48, "S4", stab_b1()});
    v.push_back({FamilyName::D6, "y^2 = z^6-1", 24, "D6", stab_b2()});
    v.push_back({FamilyName::Z5, "y^2 = z^5-1", 10, "Z5", stab_b3()});
    return v;
  }();
  return families;
}

const BolzaFamily& bolza_family(FamilyName name) {
  for (const auto& f : bolza_families())
    if (f.name == name) return f;
  throw Error(ErrorKind::InvalidArgument, "unknown family");
}

const char* to_string(CurveName c) noexcept {
  switch (c) {
    case CurveName::Burnside: return "Burnside";
    case CurveName::D6: return "D6";
    case CurveName::Z5: return "Z5";
    case CurveName::Klein: return "Klein";
  }
  return "?";
}

CurveName parse_curve_name(const std::string& name) {
  if (name == "burnside" || name == "Burnside") return CurveName::Burnside;
  if (name == "d6" || name == "D6") return CurveName::D6;
  if (name == "z5" || name == "Z5") return CurveName::Z5;
  if (name == "klein" || name == "Klein") return CurveName::Klein;
  throw Error(ErrorKind::InvalidArgument, "unknown curve '" + name + "'");
}

ReferenceCurve reference_curve(CurveName name) {
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  switch (name) {
    case CurveName::Burnside: {
      const cplx d = -0.5 + kI / s2;
      auto st = stab_b1();
      return {name, SiegelPoint::make(2, {d, 0.5, d}), st[0], st};
    }
    case CurveName::D6: {
      auto st = stab_b2();
      return {name, SiegelPoint::make(2, {2.0 * kI / s3, kI / s3, 2.0 * kI / s3}), st[0], st};
    }
    case CurveName::Z5: {
      const cplx e = eps5();
      auto st = stab_b3();
      return {name, SiegelPoint::make(2, {e, e / (1.0 + e), 1.0 - std::pow(e, 4)}), st[0], st};
    }
    case CurveName::Klein: {
      const auto s = klein_sigma();
      return {name, klein_matrix(), s, {s}};
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown curve");
}

cplx d3_extremal_sigma() { return {0.5, kD3ExtremalImag}; }

SiegelPoint d3_extremal_matrix(bool plus) {
  const cplx s = d3_extremal_sigma();
  return SiegelPoint::make(2, {2.0 * s - 1.0, plus ? s : s - 1.0, 2.0 * s - 1.0});
}

std::vector<NamedPoint> critical_representatives() {
  const cplx eta = (1.0 + 2.0 * std::sqrt(2.0) * kI) / 3.0;
  const cplx e = eps5();
  const cplx off = e + std::pow(e, 3);
  std::vector<NamedPoint> v;
  v.push_back({"burnextr", "Burnside", SiegelPoint::make(2, {eta, (eta - 1.0) / 2.0, eta}), 0.0});
  v.push_back({"B2", "D6", reference_curve(CurveName::D6).period_matrix, 0.0});
  v.push_back({"Z5extr-a", "Z5", SiegelPoint::make(2, {e, off, -std::pow(e, 4)}), 0.0});
  v.push_back({"Z5extr-b", "Z5", SiegelPoint::make(2, {-std::pow(e, 4), off, e}), 0.0});
  v.push_back({"D3extr-plus", "D3extremal", d3_extremal_matrix(true), 0.0});
  v.push_back({"D3extr-minus", "D3extremal", d3_extremal_matrix(false), 0.0});
  return v;
}

std::vector<InclusionCheck> verify_family_inclusions() {
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  const SiegelPoint b1 = reference_curve(CurveName::Burnside).period_matrix;
  const SiegelPoint b2 = reference_curve(CurveName::D6).period_matrix;
  std::vector<InclusionCheck> out;
  auto exact = [&](const std::string& id, const SiegelPoint& p, const SiegelPoint& q) {
    const double gap = p.max_abs_diff(q);
    out.push_back({id, gap < 1e-14, gap, "exact"});
  };
  auto equiv = [&](const std::string& id, const SiegelPoint& p, const SiegelPoint& q) {
    const EquivalenceResult r = siegel_equivalent(p, q);
    out.push_back({id, r.equivalent, r.coordinate_gap, r.method});
  };
  exact("embed_d2(i/sqrt2) = B1", embed_d2(kI / s2), b1);
  exact("embed_d3(i/sqrt3) = B2", embed_d3(kI / s3), b2);
  equiv("embed_d2(1/2+i sqrt3/2) ~ B2", embed_d2(0.5 + kI * s3 / 2.0), b2);
  equiv("embed_d3(1/3+i sqrt2/3) ~ B1", embed_d3(1.0 / 3.0 + kI * s2 / 3.0), b1);
  for (const auto& c : out)
    if (!c.holds) throw Error(ErrorKind::InclusionFailure, c.identity);
  return out;
}

std::vector<Z2CriticalEntry> z2_known_critical_points() {
  const double s2 = std::sqrt(2.0), h = std::sqrt(3.0) / 2.0, s3 = std::sqrt(3.0);
  std::vector<Z2CriticalEntry> v;
  auto ok = [&](cplx x, cplx y, int np, int nm, const char* label, double prec, bool dup) {
    v.push_back({x, y, np, nm, label, prec, dup, true, x, y, ""});
  };
  // The tabulated Im y = sqrt2 gives F = 0.0869 with nonzero gradient; Im y = sqrt2/3 is the image of
  // B1 under (s, s) and is critical.
  v.push_back({s2 * kI, 2.0 / 3.0 + s2 * kI, 0, 4, "Burnside", 0.0, false, false, s2 * kI,
               2.0 / 3.0 + s2 / 3.0 * kI, "tabulated Im y = sqrt2 is not critical; resolved to sqrt2/3"});
  // B2 = embed_z2(x, y) with x = B11 + B12, y = B11 - B12.
  ok(kI * s3, kI / s3, 2, 2, "D6", 0.0, false);
  ok(cplx(0.5, h), cplx(-0.5, h), 2, 2, "D6", 0.0, false);
  ok(cplx(-0.5, h), cplx(0.5, h), 2, 2, "D6", 0.0, false);
  const char* degenerate = "x - y = +-2 lies in the Gamma(2) orbit of the diagonal locus, F = 0";
  for (int rep = 0; rep < 2; ++rep) {
    v.push_back({cplx(1.5, h), cplx(-0.5, h), 2, 2, "D6", 0.0, rep == 1, false, cplx(1.5, h), cplx(-0.5, h), degenerate});
    v.push_back({cplx(-1.5, h), cplx(0.5, h), 2, 2, "D6", 0.0, rep == 1, false, cplx(-1.5, h), cplx(0.5, h), degenerate});
  }
  const cplx d3[3][2] = {{cplx(0.3835, 0.7874), cplx(-0.4339, 0.2114)},
                         {cplx(0.0, 1.0517), cplx(-0.5, 0.5259)},
                         {cplx(0.5, 1.0517), cplx(0.0, 0.5259)}};
  for (int k = 0; k < 2; ++k) ok(d3[k][0] + d3[k][1], d3[k][0] - d3[k][1], 1, 3, "D3extremal", 5e-5, false);
  const cplx x3 = d3[2][0] + d3[2][1], y3 = d3[2][0] - d3[2][1];
  v.push_back({x3, y3, 1, 3, "D3extremal", 5e-5, false, false, x3, y3,
               "tabulated matrix gives F = 0.2974 with nonzero gradient; not a D3-extremal representative"});
  return v;
}

}  // namespace modcrit
