#include <doctest.h>

#include <random>

#include "modcrit/functional.hpp"
#include "modcrit/modular.hpp"
#include "modcrit/strata.hpp"
#include "test_helpers.hpp"

using namespace modcrit;
using test_helpers::rel_diff;

namespace {

const cplx I{0.0, 1.0};

SiegelPoint b1() { return reference_curve(CurveName::Burnside).period_matrix; }
SiegelPoint b2() { return reference_curve(CurveName::D6).period_matrix; }

bool violates(const DomainVerdict& v, int id) {
  for (const auto& c : v.violated)
    if (c.id == id) return true;
  return false;
}

// Brute-force check of all 25 inequalities from their definitions.
bool brute_inside(const SiegelPoint& b, double tol) {
  const Coords6 c = b.coords();
  if (std::abs(c[0]) > 0.5 + tol || std::abs(c[1]) > 0.5 + tol || std::abs(c[2]) > 0.5 + tol) return false;
  if (c[4] < -tol || c[3] < 2 * c[4] - tol || c[5] < c[3] - tol) return false;
  for (const auto& cond : gottschling_conditions()) {
    const auto& t = cond.transform;
    Eigen::MatrixXcd m = t.c().cast<double>().cast<cplx>() * b.matrix() + t.d().cast<double>().cast<cplx>();
    if (std::abs(m.determinant()) < 1.0 - tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("apply_symplectic") {
  CHECK(apply_symplectic(SymplecticTransform::identity(2), b1()).max_abs_diff(b1()) < 1e-15);
  const auto tmu3 = SymplecticTransform::from_rows(2, {0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
  CHECK(apply_symplectic(tmu3, b1()).max_abs_diff(b1()) < 1e-15);
  const auto t = SymplecticTransform::from_rows(2, {0, 1, 0, 0, 0, 1, -1, 0, -1, 0, 0, 1, 1, 0, 0, 0});
  const SiegelPoint d = apply_symplectic(t, embed_d2(cplx(0.5, 0.5)));
  CHECK(d.max_abs_diff(SiegelPoint::make(2, {I, 0.0, I})) < 1e-14);
}

TEST_CASE("gottschling_membership") {
  const cplx eta = (1.0 + 2.0 * std::sqrt(2.0) * I) / 3.0;
  CHECK(gottschling_membership(SiegelPoint::make(2, {eta, (eta - 1.0) / 2.0, eta})).inside);
  const SiegelPoint neg = SiegelPoint::make(2, {2.0 * I, cplx(0.0, -0.1), 2.5 * I});
  const auto v = gottschling_membership(neg);
  CHECK(!v.inside);
  CHECK(violates(v, 4));
  const SiegelPoint in = SiegelPoint::make(2, {2.0 * I, 0.1 * I, 2.5 * I});
  CHECK(gottschling_membership(in).inside);
  CHECK(brute_inside(in, kBoundaryTolerance));
  CHECK(gottschling_conditions().size() == 19);

  std::mt19937 rng(61);
  std::uniform_real_distribution<double> re(-0.55, 0.55), y(0.8, 2.2), y2(-0.05, 0.6);
  for (int trial = 0; trial < 300; ++trial) {
    const double y1 = y(rng);
    const SiegelPoint b = SiegelPoint::make(2, {cplx(re(rng), y1), cplx(re(rng), y2(rng)), cplx(re(rng), y1 + 0.3 * y(rng) - 0.2)});
    const auto verdict = gottschling_membership(b);
    CHECK(verdict.inside == verdict.violated.empty());
    CHECK(verdict.inside == brute_inside(b, kBoundaryTolerance));
  }
}

TEST_CASE("reduce_to_gottschling") {
  const SiegelPoint in = SiegelPoint::make(2, {2.0 * I, 0.1 * I, 2.5 * I});
  const Reduction r0 = reduce_to_gottschling(in);
  CHECK(r0.point.max_abs_diff(in) < 1e-12);
  CHECK(r0.transform.is_identity());

  std::mt19937 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = test_helpers::random_word(rng, 10);
    const SiegelPoint scrambled = apply_symplectic(t, b2());
    const Reduction r = reduce_to_gottschling(scrambled);
    CHECK(gottschling_membership(r.point).inside);
    CHECK(rel_diff(big_f(r.point), big_f(b2())) < 1e-10);
    CHECK(apply_symplectic(r.transform, scrambled).max_abs_diff(r.point) < 1e-9);
    // Idempotence.
    const Reduction again = reduce_to_gottschling(r.point);
    CHECK(again.point.max_abs_diff(r.point) < 1e-12);
    CHECK(again.transform.is_identity());
  }

  // The extremal D3 matrix scrambled and reduced lands on a reduced representative equivalent to it.
  const SiegelPoint d3 = embed_d3(cplx(0.5, 0.5259));
  const auto t = test_helpers::random_word(rng, 8);
  const Reduction r = reduce_to_gottschling(apply_symplectic(t, d3));
  CHECK(siegel_equivalent(r.point, d3_extremal_matrix(true), 1e-3).equivalent);
}

TEST_CASE("modular invariance and reflection symmetry of F") {
  std::mt19937 rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    const SiegelPoint b = reduce_to_gottschling(test_helpers::random_point(rng)).point;
    const auto t = test_helpers::random_word(rng, 6);
    const double f = big_f(b);
    // Scrambled points can have tiny Im eigenvalues, beyond the adaptive cutoff cap.
    CHECK(rel_diff(big_f(apply_symplectic(t, b), TruncationPolicy::fixed(60)), f) < 1e-10);
    CHECK(std::abs(big_f(b.reflected()) - f) < 1e-12);
  }
}

TEST_CASE("siegel_equivalent") {
  const SiegelPoint b3 = reference_curve(CurveName::Z5).period_matrix;
  std::mt19937 rng(91);
  const auto t = test_helpers::random_word(rng, 7);
  const auto r = siegel_equivalent(apply_symplectic(t, b3), b3);
  CHECK(r.equivalent);
  if (r.witness) CHECK(apply_symplectic(*r.witness, apply_symplectic(t, b3)).max_abs_diff(b3) < 1e-6);
  CHECK(!siegel_equivalent(b1(), b2()).equivalent);
  // The two tabulated Z5 representatives on the boundary are identified.
  const auto reps = critical_representatives();
  CHECK(siegel_equivalent(reps[2].point, reps[3].point).equivalent);
}

TEST_CASE("genus-one reduction") {
  const auto [s, g] = genus1_reduce(cplx(5.3, 0.8), Genus1Group::Gamma);
  CHECK(std::abs(s.real()) <= 0.5 + 1e-12);
  CHECK(std::abs(s) >= 1.0 - 1e-12);
  CHECK(std::abs(g.apply(cplx(5.3, 0.8)) - s) < 1e-12);

  const cplx x = I / std::sqrt(2.0);
  CHECK(std::abs(genus1_reduce(x, Genus1Group::Gamma02Plus).first - x) < 1e-15);

  std::mt19937 rng(101);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.05, 2.0);
  for (auto group : {Genus1Group::Gamma, Genus1Group::Gamma2, Genus1Group::Gamma02Plus, Genus1Group::Gamma03Plus}) {
    const auto gens = genus1_generators(group);
    for (int trial = 0; trial < 50; ++trial) {
      const cplx z(re(rng), im(rng));
      const cplx red = genus1_reduce(z, group).first;
      CHECK(genus1_membership(red, group, 1e-12).inside);
      // Random points are interior almost surely, so moving by a generator and re-reducing is the identity.
      const cplx moved = genus1_reduce(gens.back().apply(red), group).first;
      CHECK(std::abs(moved - red) < 1e-9);
    }
  }
}

TEST_CASE("embeddings") {
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  const SiegelPoint z = embed_z2(s2 * I, 2.0 / 3.0 + s2 * I);
  CHECK(std::abs(z(0, 0) - (1.0 / 3.0 + s2 * I)) < 1e-15);
  const cplx tau(0.1, 1.3);
  CHECK(embed_z2(tau, tau).max_abs_diff(SiegelPoint::make(2, {tau, 0.0, tau})) < 1e-15);
  CHECK(embed_z2(3.0 * tau, tau).max_abs_diff(embed_d3(tau)) < 1e-15);

  CHECK(embed_d2(I / s2).max_abs_diff(b1()) < 1e-15);
  CHECK(std::abs(embed_d2(cplx(0.5, 0.5))(0, 0) - 0.5 * I) < 1e-15);
  CHECK(embed_d2(tau).max_abs_diff(embed_z2(tau, tau - 1.0)) < 1e-15);
  CHECK(embed_d3(I / s3).max_abs_diff(b2()) < 1e-15);
  CHECK(embed_d3(cplx(0.2, 0.01)).min_imag_eigenvalue() > 0.0);
}

TEST_CASE("strata homomorphisms are equivariant") {
  const cplx x(0.3, 0.9);
  CHECK(strata_homomorphism(StrataFamily::D2, MoebiusElement::identity()).is_identity());
  for (auto family : {StrataFamily::D2, StrataFamily::D3}) {
    const Genus1Group group = family == StrataFamily::D2 ? Genus1Group::Gamma02Plus : Genus1Group::Gamma03Plus;
    for (const auto& gamma : genus1_generators(group)) {
      const SymplecticTransform t = strata_homomorphism(family, gamma);
      const SiegelPoint lhs = apply_symplectic(t, embed_strata({family, x, {}}));
      const SiegelPoint rhs = embed_strata({family, gamma.apply(x), {}});
      CHECK(lhs.max_abs_diff(rhs) < 1e-12);
      CHECK(is_symplectic(t.matrix()));
    }
  }
  CHECK_THROWS_AS(strata_homomorphism(StrataFamily::D2, MoebiusElement(1, 0, 1, 1)), Error);
}

TEST_CASE("z2_pair_transform") {
  CHECK(z2_pair_transform(MoebiusElement::identity(), MoebiusElement::identity()).is_identity());
  const MoebiusElement s(0, -1, 1, 0);
  const auto ts = z2_pair_transform(s, s);
  CHECK(ts.a().isZero());
  CHECK(ts.d().isZero());
  const MoebiusElement g1(1, 2, 0, 1), g2(1, 0, 2, 1);
  const cplx x(0.2, 1.1), y(-0.3, 0.7);
  for (const auto& [a, b] : {std::pair{g1, g2}, std::pair{s, s}, std::pair{MoebiusElement(1, 1, 0, 1), MoebiusElement(1, -1, 0, 1)}}) {
    const auto t = z2_pair_transform(a, b);
    CHECK(is_symplectic(t.matrix()));
    CHECK(apply_symplectic(t, embed_z2(x, y)).max_abs_diff(embed_z2(a.apply(x), b.apply(y))) < 1e-12);
  }
  try {
    z2_pair_transform(MoebiusElement(1, 1, 0, 1), MoebiusElement::identity());
    FAIL("expected ParityViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParityViolation);
  }
}
