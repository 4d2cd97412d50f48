#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modcrit/core.hpp"
#include "modcrit/functional.hpp"

namespace modcrit {

struct Constraint {
  int id = 0;  // 1..25 for the Gottschling inequalities, 0 for named-only constraints
  std::string name;
};

struct DomainVerdict {
  bool inside = true;
  std::vector<Constraint> violated;
};

inline constexpr double kBoundaryTolerance = 1e-9;

/// (A B + B)(C B + D)^{-1}, symmetrized.
SiegelPoint apply_symplectic(const SymplecticTransform& t, const SiegelPoint& b);

/// The 25 numbered Gottschling inequalities, plus y1, y3 >= sqrt(3)/2 (implied by the others,
/// reported under id 0).
DomainVerdict gottschling_membership(const SiegelPoint& b, double tol = kBoundaryTolerance);

/// One of the 19 inequalities |det(C B + D)| >= 1 (ids 7..25) with the transform whose
/// denominator it is.
struct GottschlingCondition {
  int id;
  std::string name;
  SymplecticTransform transform;
};
const std::vector<GottschlingCondition>& gottschling_conditions();
/// |det(C B + D)| for the transform of condition `c`.
double gottschling_lhs(const GottschlingCondition& c, const SiegelPoint& b);

struct Reduction {
  SiegelPoint point;
  SymplecticTransform transform;  // point = apply_symplectic(transform, input)
  int iterations = 0;
};
inline constexpr int kReductionIterationCap = 10000;
Reduction reduce_to_gottschling(const SiegelPoint& b);

/// Generators used for scrambling and equivalence search: translations, congruences, the
/// inversions attached to the Gottschling conditions.
const std::vector<SymplecticTransform>& sp4_generators();

struct EquivalenceResult {
  bool equivalent = false;
  std::string method;  // "reduced-coordinates", "boundary-search", "invariants", or "none"
  std::optional<SymplecticTransform> witness;  // maps the first point to the second
  double coordinate_gap = 0.0;
};
EquivalenceResult siegel_equivalent(const SiegelPoint& a, const SiegelPoint& b, double tol = 1e-6);

enum class Genus1Group { Gamma, Gamma2, Gamma02Plus, Gamma03Plus };
const char* to_string(Genus1Group g) noexcept;
Genus1Group parse_genus1_group(const std::string& name);

DomainVerdict genus1_membership(cplx sigma, Genus1Group group, double tol = 1e-12);
/// sigma' = g(sigma) in the group's fundamental domain.
std::pair<cplx, MoebiusElement> genus1_reduce(cplx sigma, Genus1Group group);

/// Generators: Gamma: t, s; Gamma2: t^2, [[1,0],[2,1]]; Gamma0(N)+: t and [[N,-1],[N,0]].
std::vector<MoebiusElement> genus1_generators(Genus1Group group);

SiegelPoint embed_z2(cplx x, cplx y);
SiegelPoint embed_d2(cplx x);
SiegelPoint embed_d3(cplx sigma);
SiegelPoint embed_strata(const StrataCoordinates& c);

/// Image of gamma in Sp(4, Z) for the D2 (Gamma0(2)+) or D3 (Gamma0(3)+) family.
SymplecticTransform strata_homomorphism(StrataFamily family, const MoebiusElement& gamma);
/// Word in the generators (indices 1, 2; negative for inverses) equal to gamma projectively.
std::vector<int> strata_word(StrataFamily family, const MoebiusElement& gamma);

/// Sp(4, Z) element acting as (gamma1, gamma2) on the Z2 coordinates (x, y).
SymplecticTransform z2_pair_transform(const MoebiusElement& gamma1, const MoebiusElement& gamma2);

}  // namespace modcrit
