#include <doctest.h>

#include <algorithm>
#include <random>

#include "modcrit/modular.hpp"
#include "modcrit/stationarity.hpp"
#include "modcrit/strata.hpp"

using namespace modcrit;

namespace {

const cplx I{0.0, 1.0};

// Every expected eigenvalue is matched by a distinct computed one within tol.
bool same_multiset(std::vector<cplx> got, const std::vector<cplx>& want, double tol) {
  if (got.size() != want.size()) return false;
  for (const cplx& w : want) {
    auto it = std::min_element(got.begin(), got.end(), [&](cplx a, cplx b) { return std::abs(a - w) < std::abs(b - w); });
    if (std::abs(*it - w) > tol) return false;
    got.erase(it);
  }
  return true;
}

cplx root(int n, int k) { return std::polar(1.0, 2.0 * kPi * k / n); }

}  // namespace

TEST_CASE("reference spectra") {
  const auto b1 = reference_curve(CurveName::Burnside);
  const auto r1 = verify_stationary(b1.period_matrix, b1.stabilizer);
  CHECK(same_multiset(r1.spectrum, {-1.0, I, -I}, 1e-8));
  CHECK(!r1.contains_one);

  const auto b2 = reference_curve(CurveName::D6);
  const auto r2 = verify_stationary(b2.period_matrix, b2.stabilizer);
  CHECK(same_multiset(r2.spectrum, {-1.0, root(3, 1), root(3, 2)}, 1e-8));
  CHECK(!r2.contains_one);

  const auto b3 = reference_curve(CurveName::Z5);
  const auto r3 = verify_stationary(b3.period_matrix, b3.stabilizer);
  CHECK(same_multiset(r3.spectrum, {root(5, 1), root(5, 2), root(5, 4)}, 1e-8));
  CHECK(r3.distance_to_one > 0.5);

  for (const auto* r : {&r1, &r2, &r3}) {
    CHECK(r->unitary_defect < 1e-10);
    CHECK(r->off_diagonal_defect < 1e-10);
    CHECK(r->transpose_defect < 1e-10);
    CHECK(std::abs(std::abs(r->u.determinant()) - 1.0) < 1e-10);
  }
}

TEST_CASE("identity has spectrum {1,1,1}") {
  const auto b1 = reference_curve(CurveName::Burnside);
  const auto r = verify_stationary(b1.period_matrix, SymplecticTransform::identity(2));
  CHECK(same_multiset(r.spectrum, {1.0, 1.0, 1.0}, 1e-12));
  CHECK(r.contains_one);
  CHECK(r.distance_to_one < 1e-12);
}

TEST_CASE("Klein quartic excludes 1 with margin") {
  const auto k = reference_curve(CurveName::Klein);
  CHECK(k.period_matrix.genus() == 3);
  const auto r = verify_stationary(k.period_matrix, k.stabilizer);
  CHECK(r.spectrum.size() == 6);
  CHECK(r.linearized.rows() == 6);
  CHECK(!r.contains_one);
  CHECK(r.distance_to_one > 0.5);
  CHECK(r.unitary_defect < 1e-8);
}

TEST_CASE("cayley_to_ball") {
  const SiegelPoint ii = SiegelPoint::make(2, {I, 0.0, I});
  const auto c0 = cayley_to_ball(ii);
  CHECK(c0.s.norm() < 1e-15);
  CHECK(c0.constraint_defect < 1e-14);

  const SiegelPoint b1 = reference_curve(CurveName::Burnside).period_matrix;
  const auto c = cayley_to_ball(b1);
  CHECK(c.sqrt_residual < 1e-12);
  CHECK(c.constraint_defect < 1e-12);
  CHECK(c.apply(b1.matrix()).norm() < 1e-12);
  // S lies inside the ball: I - S* S is positive definite.
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2) - c.s.adjoint() * c.s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  const SiegelPoint g1 = SiegelPoint::make(1, {I});
  CHECK_THROWS_AS(cayley_to_ball(g1), Error);
}

TEST_CASE("hermitian_sqrt") {
  Eigen::MatrixXcd m(2, 2);
  m << 4.0, cplx(1.0, 1.0), cplx(1.0, -1.0), 3.0;
  const Eigen::MatrixXcd r = hermitian_sqrt(m);
  CHECK((r * r - m).norm() < 1e-13);
  CHECK((r - r.adjoint()).norm() < 1e-14);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(hermitian_sqrt(bad), Error);
}

TEST_CASE("linearization matches U w U^t") {
  std::mt19937 rng(111);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd u(2, 2);
  u << cplx(n(rng), n(rng)), cplx(n(rng), n(rng)), cplx(n(rng), n(rng)), cplx(n(rng), n(rng));
  const Eigen::MatrixXcd a = linearize_symmetric_action(u);
  for (int trial = 0; trial < 20; ++trial) {
    const cplx w11(n(rng), n(rng)), w12(n(rng), n(rng)), w22(n(rng), n(rng));
    Eigen::MatrixXcd w(2, 2);
    w << w11, w12, w12, w22;
    const Eigen::MatrixXcd img = u * w * u.transpose();
    Eigen::VectorXcd v(3);
    v << w11, w22, w12;
    const Eigen::VectorXcd av = a * v;
    CHECK(std::abs(av(0) - img(0, 0)) < 1e-12);
    CHECK(std::abs(av(1) - img(1, 1)) < 1e-12);
    CHECK(std::abs(av(2) - img(0, 1)) < 1e-12);
  }
  CHECK_THROWS_AS(linearize_symmetric_action(Eigen::MatrixXcd::Identity(4, 4)), Error);
}

TEST_CASE("non-stabilizers are rejected") {
  const SiegelPoint b1 = reference_curve(CurveName::Burnside).period_matrix;
  const auto t = reference_curve(CurveName::Z5).stabilizer;
  try {
    verify_stationary(b1, t);
    FAIL("expected NotAStabilizer");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAStabilizer);
  }
  CHECK_THROWS_AS(verify_stationary(b1, SymplecticTransform::identity(3)), Error);
}

TEST_CASE("every tabulated stabilizer transports to a unitary action") {
  for (auto name : {CurveName::Burnside, CurveName::D6, CurveName::Z5}) {
    const auto c = reference_curve(name);
    for (const auto& t : c.stabilizers) {
      const auto r = verify_stationary(c.period_matrix, t);
      CHECK(r.unitary_defect < 1e-10);
    }
  }
}
