#pragma once

#include <vector>

#include "modcrit/core.hpp"

namespace modcrit {

/// w -> (A w + B)(C w + D)^{-1} on the generalized unit ball, together with the composite
/// map K = (A B; C D)(I -iI; I iI) from the Siegel half-space.
struct BallAutomorphism {
  int genus = 0;
  Eigen::MatrixXcd a, b, c, d;  // ball automorphism blocks
  Eigen::MatrixXcd k;           // 2g x 2g composite
  Eigen::MatrixXcd s;           // image of z0 under the plain Cayley map
  double sqrt_residual = 0.0;   // ||R^2 - (I - conj(S) S)||
  double constraint_defect = 0.0;

  /// K(z) = (A1 z + B1)(C1 z + D1)^{-1}.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& z) const;
};

BallAutomorphism cayley_to_ball(const SiegelPoint& z0);

struct StationarityReport {
  std::vector<cplx> spectrum;
  bool contains_one = false;
  double unitary_defect = 0.0;
  double off_diagonal_defect = 0.0;  // max |entry| of the off-diagonal blocks of K T K^{-1}
  double transpose_defect = 0.0;     // ||D^{-1} - U^t||
  double distance_to_one = 0.0;      // min |lambda - 1|
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd linearized;
};

inline constexpr double kContainsOneTolerance = 1e-8;

/// U with K T K^{-1} w = U w U^t, plus the report fields derived from U alone.
StationarityReport transport_stabilizer(const SymplecticTransform& t, const SiegelPoint& z0);

/// Matrix of w -> U w U^t on the coordinates (w11, w22, w12) for genus 2 or
/// (w11, w22, w33, w12, w13, w23) for genus 3.
Eigen::MatrixXcd linearize_symmetric_action(const Eigen::MatrixXcd& u);

StationarityReport verify_stationary(const SiegelPoint& b, const SymplecticTransform& t);

/// Principal square root of a Hermitian positive-definite matrix.
Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m);

}  // namespace modcrit
