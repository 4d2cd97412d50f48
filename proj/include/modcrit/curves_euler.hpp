#pragma once

#include <array>
#include <string>
#include <vector>

#include "modcrit/core.hpp"
#include "modcrit/functional.hpp"
#include "modcrit/search.hpp"

namespace modcrit {

/// A point of the Riemann sphere.
struct SpherePoint {
  cplx value{};
  bool at_infinity = false;

  static SpherePoint infinity() { return {{}, true}; }
  std::string to_string() const;
};

/// Chordal distance on the sphere (0 .. 1).
double chordal_distance(const SpherePoint& a, const SpherePoint& b);

struct BranchPointSet {
  std::array<SpherePoint, 6> points;

  /// Throws DegenerateValue unless the points are pairwise distinct within 1e-8 (chordal).
  void validate() const;
  static BranchPointSet from_finite(const std::array<cplx, 6>& z);
};

/// {0, 1, inf, l1, l2, l3} with
///   l1 = (t0 t2 / (t3 t1))^2, l2 = (t2 t12 / (t1 t15))^2, l3 = (t0 t12 / (t3 t15))^2,
/// where t_i is the theta constant with characteristic bits i = q1 + 2 q2 + 4 p1 + 8 p2.
/// The first call runs the Burnside self-test; throws ConventionUnvalidated if it fails.
BranchPointSet rosenhain_branch_points(const SiegelPoint& b, const TruncationPolicy& policy = {});

/// Runs (once per process) the check that the branch points of B1 are Moebius-equivalent to
/// {0, inf, 1, i, -1, -i}.
bool rosenhain_convention_validated();

struct MoebiusComparison {
  bool equivalent = false;
  double residual = 0.0;  // best max distance between matched normalized images
};
/// Compares the images of the remaining points after sending every ordered triple of `a` to
/// (0, 1, inf) against the same normalization of a fixed triple of `b`.
MoebiusComparison moebius_equivalent(const BranchPointSet& a, const BranchPointSet& b, double tol = 1e-8);

struct D3Match {
  cplx r;              // representative with |r| <= 1, chosen among the cube-root rotations closest to the positive axis
  cplx r_inverse;      // the 1/r representative of the same curve
  double residual;     // best matching residual
  double imag_residual;  // |Im r|
};
inline constexpr double kD3MatchTolerance = 1e-6;
/// Moebius map sending the six points to {1, e3, e3^2, r, r e3, r e3^2}. Throws NoD3Structure if
/// the best residual exceeds kD3MatchTolerance.
D3Match match_d3_normal_form(const BranchPointSet& points);

struct MassTerm {
  int index;             // Morse index (number of negative Hessian eigenvalues)
  int stabilizer_order;  // #Aut or #H
  std::string label;
};

/// Sum of (-1)^index / stabilizer_order, doubled when `hyperelliptic_double`.
RationalValue mass_formula(const std::vector<MassTerm>& terms, bool hyperelliptic_double);

/// Terms of the four genus-two critical classes (index, #Aut).
std::vector<MassTerm> full_space_mass_terms();
/// Terms of the two critical points of the genus-one functional on Omega.
std::vector<MassTerm> genus1_mass_terms();
/// Terms on a stratum with the normalizer orders #H.
std::vector<MassTerm> strata_mass_terms(StrataFamily family);
RationalValue strata_euler(StrataFamily family);

/// Full automorphism group order of the curve carrying a critical label.
int automorphism_order(CriticalLabel label);

/// No signed combination of 1/48, 1/24, 1/10 equals -1/240, so a fourth critical point is required.
bool fourth_point_forced();

}  // namespace modcrit
