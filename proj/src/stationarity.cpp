#include "modcrit/stationarity.hpp"

#include <algorithm>

#include "modcrit/modular.hpp"

namespace modcrit {

namespace {

constexpr cplx kI{0.0, 1.0};

std::vector<std::pair<int, int>> symmetric_basis(int g) {
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < g; ++i) idx.emplace_back(i, i);
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) idx.emplace_back(i, j);
  return idx;
}

}  // namespace

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  const Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) throw Error(ErrorKind::SqrtFailure, "matrix under the root is not positive definite");
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd BallAutomorphism::apply(const Eigen::MatrixXcd& z) const {
  const int g = genus;
  const Eigen::MatrixXcd num = k.topLeftCorner(g, g) * z + k.topRightCorner(g, g);
  const Eigen::MatrixXcd den = k.bottomLeftCorner(g, g) * z + k.bottomRightCorner(g, g);
  return den.transpose().partialPivLu().solve(num.transpose()).transpose();
}

BallAutomorphism cayley_to_ball(const SiegelPoint& z0) {
  const int g = z0.genus();
  if (g != 2 && g != 3) throw Error(ErrorKind::InvalidArgument, "Cayley transport requires genus 2 or 3");
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(g, g);
  const Eigen::MatrixXcd z = z0.matrix();
  BallAutomorphism out;
  out.genus = g;
  // S = (z0 - iI)(z0 + iI)^{-1}
  out.s = (z + kI * id).transpose().partialPivLu().solve((z - kI * id).transpose()).transpose();
  // conj(S) S is the order that makes the blocks satisfy the ball constraints for symmetric S.
  const Eigen::MatrixXcd m = id - out.s.conjugate() * out.s;
  const Eigen::MatrixXcd r = hermitian_sqrt(0.5 * (m + m.adjoint()));
  out.sqrt_residual = (r * r - m).norm();
  if (out.sqrt_residual > 1e-10) throw Error(ErrorKind::SqrtFailure, "square-root residual too large");
  out.a = r.inverse().conjugate();
  out.b = -out.a * out.s;
  out.c = out.b.conjugate();
  out.d = out.a.conjugate();
  out.constraint_defect = std::max((out.a.conjugate() * out.a.transpose() - out.b.conjugate() * out.b.transpose() - id).norm(),
                                   (out.a * out.b.transpose() - out.b * out.a.transpose()).norm());
  Eigen::MatrixXcd blk(2 * g, 2 * g), cay(2 * g, 2 * g);
  blk << out.a, out.b, out.c, out.d;
  cay << id, -kI * id, id, kI * id;
  out.k = blk * cay;
  return out;
}

Eigen::MatrixXcd linearize_symmetric_action(const Eigen::MatrixXcd& u) {
  const int g = static_cast<int>(u.rows());
  if (u.cols() != g || (g != 2 && g != 3)) throw Error(ErrorKind::DimensionMismatch, "U must be 2x2 or 3x3");
  const auto idx = symmetric_basis(g);
  const int n = static_cast<int>(idx.size());
  Eigen::MatrixXcd a(n, n);
  for (int col = 0; col < n; ++col) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(g, g);
    e(idx[col].first, idx[col].second) = 1.0;
    e(idx[col].second, idx[col].first) = 1.0;
    const Eigen::MatrixXcd img = u * e * u.transpose();
    for (int row = 0; row < n; ++row) a(row, col) = img(idx[row].first, idx[row].second);
  }
  return a;
}

StationarityReport transport_stabilizer(const SymplecticTransform& t, const SiegelPoint& z0) {
  const int g = z0.genus();
  if (t.genus() != g) throw Error(ErrorKind::DimensionMismatch, "transform and point genus differ");
  const double moved = apply_symplectic(t, z0).max_abs_diff(z0);
  if (moved > 1e-9) throw Error(ErrorKind::NotAStabilizer, "transform moves the point by " + std::to_string(moved));
  const BallAutomorphism ball = cayley_to_ball(z0);
  const Eigen::MatrixXcd w = ball.k * t.matrix().cast<double>().cast<cplx>() * ball.k.inverse();
  StationarityReport rep;
  rep.off_diagonal_defect =
      std::max(w.topRightCorner(g, g).cwiseAbs().maxCoeff(), w.bottomLeftCorner(g, g).cwiseAbs().maxCoeff());
  rep.u = w.topLeftCorner(g, g);
  const Eigen::MatrixXcd dinv = w.bottomRightCorner(g, g).inverse();
  rep.transpose_defect = (dinv - rep.u.transpose()).norm();
  rep.unitary_defect = (rep.u * rep.u.adjoint() - Eigen::MatrixXcd::Identity(g, g)).norm();
  if (rep.off_diagonal_defect > 1e-8 || rep.unitary_defect > 1e-8 || rep.transpose_defect > 1e-8)
    throw Error(ErrorKind::NotUnitary, "transported stabilizer is not a unitary rotation (defect " +
                                           std::to_string(std::max({rep.off_diagonal_defect, rep.unitary_defect,
                                                                    rep.transpose_defect})) +
                                           ")");
  return rep;
}

StationarityReport verify_stationary(const SiegelPoint& b, const SymplecticTransform& t) {
  StationarityReport rep = transport_stabilizer(t, b);
  rep.linearized = linearize_symmetric_action(rep.u);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(rep.linearized, false);
  rep.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(rep.spectrum.begin(), rep.spectrum.end(),
            [](cplx x, cplx y) { return std::arg(x) < std::arg(y); });
  rep.distance_to_one = 1e300;
  for (const cplx& l : rep.spectrum) rep.distance_to_one = std::min(rep.distance_to_one, std::abs(l - 1.0));
  rep.contains_one = rep.distance_to_one <= kContainsOneTolerance;
  return rep;
}

}  // namespace modcrit
