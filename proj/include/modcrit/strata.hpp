#pragma once

#include <string>
#include <vector>

#include "modcrit/core.hpp"
#include "modcrit/functional.hpp"

namespace modcrit {

enum class FamilyName { Z2, D2, D3, S4, D6, Z5 };
const char* to_string(FamilyName f) noexcept;

/// A stratum of genus-two curves by reduced automorphism group, with the symplectic action of the
/// generators on the canonical basis (b1, b2, a1, a2).
struct BolzaFamily {
  FamilyName name;
  std::string defining_equation;
  int aut_order;  // full group, hyperelliptic involution included; 4 for the generic Z2 member
  std::string reduced_group;
  std::vector<SymplecticTransform> stabilizer_transforms;
};

const std::vector<BolzaFamily>& bolza_families();
const BolzaFamily& bolza_family(FamilyName name);

enum class CurveName { Burnside, D6, Z5, Klein };
const char* to_string(CurveName c) noexcept;
CurveName parse_curve_name(const std::string& name);

struct ReferenceCurve {
  CurveName name;
  SiegelPoint period_matrix;
  SymplecticTransform stabilizer;                 // the generator used for the stationarity test
  std::vector<SymplecticTransform> stabilizers;   // every tabulated generator
};

/// Exact period matrix and stabilizer. Klein is genus three.
ReferenceCurve reference_curve(CurveName name);

/// sigma of the extremal D3 curve, Re = 1/2, refined to double precision.
cplx d3_extremal_sigma();
/// embed_d3(sigma*) shifted by -1 on the diagonal; `plus` selects the off-diagonal +1/2 + ... or -1/2 + ....
SiegelPoint d3_extremal_matrix(bool plus = true);

/// Known Sp(4, Z)-equivalent representatives of the critical classes found in the full search.
struct NamedPoint {
  std::string name;
  std::string label;  // Burnside, D6, Z5, D3extremal
  SiegelPoint point;
  double tabulated_precision;  // 0 for exact closed forms
};
std::vector<NamedPoint> critical_representatives();

struct InclusionCheck {
  std::string identity;
  bool holds = false;
  double gap = 0.0;      // max entry difference for exact identities, coordinate gap otherwise
  std::string method;    // "exact" or the equivalence method
};
/// D2 and D3 members that are Burnside or D6 curves. Throws InclusionFailure naming the first
/// identity that does not hold.
std::vector<InclusionCheck> verify_family_inclusions();

struct Z2CriticalEntry {
  cplx x, y;
  int n_plus, n_minus;
  std::string label;
  double tabulated_precision;
  bool duplicate;  // repeats an earlier tabulated entry
  bool consistent;  // the tabulated point is a critical point of the labeled class
  cplx resolved_x, resolved_y;  // equal to (x, y) when consistent; the nearby critical point otherwise
  std::string note;
};
/// Z2-stratum critical points as tabulated: the Burnside point, B2 and four further D6 pairs
/// (one pair tabulated twice, flagged), the three D3-extremal matrices converted to (x, y).
/// Entries whose tabulated coordinates fail the check carry a note and, where one is known, a
/// resolved critical point.
std::vector<Z2CriticalEntry> z2_known_critical_points();

}  // namespace modcrit
