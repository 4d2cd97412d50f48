#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modcrit/core.hpp"
#include "modcrit/functional.hpp"
#include "modcrit/modular.hpp"

namespace modcrit {

/// Cartesian grid over the Gottschling domain with x3 >= 0. Ranges follow the coordinate order
/// (x1, x2, x3, y1, y2, y3); a box overrides them (and is intersected with the domain filter).
struct GridSpec {
  int points_per_axis = 40;
  double y_max = 2.0;
  std::optional<std::array<std::pair<double, double>, 6>> box;

  void validate() const;
  std::array<std::pair<double, double>, 6> ranges() const;
  /// Points per axis for coordinate k (x3 spans half the x range, so it gets ceil(n/2) points).
  int points(int k) const;
  /// Cube of half-width `half` around `center`, `n` points per axis.
  static GridSpec box_around(const SiegelPoint& center, double half, int n, double y_max = 2.0);
};

struct ScanOptions {
  int workers = 0;                 // 0: hardware concurrency
  double slice_window = 0.01;      // keep nodes within this of the per-y1-slice minimum of |grad F|
  double dedupe_radius = 1e-2;     // max-norm radius in coordinate space
  std::size_t max_candidates = 0;  // 0: unlimited; otherwise the smallest |grad F| / F are kept
};

struct ScanCandidate {
  SiegelPoint point;
  double f_value;
  double grad_norm;
};

struct ScanStats {
  long long nodes = 0;      // grid nodes visited
  long long inside = 0;     // nodes passing gottschling_membership
  long long evaluated = 0;  // nodes where the gradient was computed without truncation failure
};

/// Nodes inside the domain within `slice_window` of their y1-slice minimum of |grad F|, ordered by
/// |grad F| / F and deduplicated greedily in that order.
std::vector<ScanCandidate> grid_scan(const GridSpec& spec, const TruncationPolicy& policy,
                                     const ScanOptions& options = {}, ScanStats* stats = nullptr);

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 1e-3;
  long long max_evaluations = 100000;
  double xtol = 1e-12;   // simplex diameter (max-norm)
  double ftol = -std::numeric_limits<double>::infinity();  // stop once the best value is at or below this
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  long long evaluations = 0;
  double diameter = 0.0;
  bool converged = false;  // xtol or ftol reached before the evaluation cap
};

/// Minimizes `f` from `x0`. Non-finite values are treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const NelderMeadOptions& options = {});

enum class CriticalLabel { Burnside, D6, Z5, D3extremal, Unknown };
const char* to_string(CriticalLabel l) noexcept;

struct CriticalPointRecord {
  SiegelPoint b;
  double f_value = 0.0;
  double grad_norm = 0.0;
  std::array<double, 6> hessian_eigenvalues{};
  int n_plus = 0, n_minus = 0;
  bool degenerate_hessian = false;
  CriticalLabel label = CriticalLabel::Unknown;
  std::optional<SymplecticTransform> witness;  // maps b to the reference point of its label
  long long evaluations = 0;
  bool mirrored = false;  // produced by the x3 -> -x3 reflection of a refined record
};

inline constexpr double kConvergedGradient = 1e-10;

/// Nelder-Mead on |grad F|^2 followed by a Newton polish with a finite-difference Jacobian of the
/// analytic gradient. Throws NoConvergence, EscapedDomain, DegenerateValue.
CriticalPointRecord refine_critical(const SiegelPoint& start, const TruncationPolicy& policy,
                                    const NelderMeadOptions& options = {});

struct HessianResult {
  std::vector<double> eigenvalues;  // ascending
  int n_plus = 0, n_minus = 0;
  double symmetry_defect = 0.0;     // max |H - H^t| before symmetrization
  double richardson_gap = 0.0;      // max eigenvalue change when the step is halved
  Eigen::MatrixXd matrix;
};

inline constexpr double kHessianStep = 1e-4;
inline constexpr double kDegeneracyRatio = 1e-6;

/// Central differences of a gradient `grad` at `x`, symmetrized, with signature counts.
/// Throws DegenerateHessian when some |lambda| < kDegeneracyRatio * max |lambda|.
HessianResult hessian_from_gradient(const std::function<std::vector<double>(const std::vector<double>&)>& grad,
                                    const std::vector<double>& x, double h = kHessianStep);

/// Hessian of F in (x1..y3) at a critical point.
HessianResult hessian_signature(const SiegelPoint& b, const TruncationPolicy& policy, double h = kHessianStep);

/// Reference representative for a label (B1, B2, B3, the extremal D3 matrix).
SiegelPoint label_reference(CriticalLabel l);
CriticalLabel classify(const CriticalPointRecord& record);

struct CriticalClass {
  CriticalLabel label;
  std::vector<std::size_t> members;  // indices into FullScanResult::records
  double f_value;
  int n_plus, n_minus;
};

struct FullScanResult {
  std::vector<ScanCandidate> candidates;
  std::vector<CriticalPointRecord> records;
  std::vector<CriticalClass> classes;
  std::vector<std::string> failures;  // candidates whose refinement threw
  ScanStats stats;
};

/// Grid scan over `grids` (the domain grid and optional seeded boxes), refinement of each candidate,
/// Hessian signature, mirroring in x3, and merging into modular-equivalence classes.
FullScanResult full_scan(const std::vector<GridSpec>& grids, const TruncationPolicy& policy,
                         const ScanOptions& options = {});

/// A critical point on a stratum in its own coordinates: (Re x, Im x) for D2/D3, (Re x, Im x, Re y, Im y) for Z2.
struct StrataCriticalRecord {
  StrataFamily family;
  std::vector<double> coords;
  double f_value = 0.0;
  double grad_norm = 0.0;
  std::vector<double> hessian_eigenvalues;
  int n_plus = 0, n_minus = 0;
  bool degenerate_hessian = false;
  CriticalLabel label = CriticalLabel::Unknown;

  cplx x() const { return {coords[0], coords[1]}; }
  cplx y() const { return coords.size() > 2 ? cplx{coords[2], coords[3]} : cplx{}; }
  SiegelPoint embedded() const;
};

struct StrataSearchOptions {
  double y_max = 2.0;
  int workers = 0;
  double dedupe_tol = 1e-6;
};

/// Grid over the strata fundamental domain (Omega x Omega(2), Omega_0(2)+, Omega_0(3)+), discrete
/// local minima of |grad log f| as candidates, refinement, Hessian in the strata coordinates.
std::vector<StrataCriticalRecord> strata_search(StrataFamily family, int resolution, const TruncationPolicy& policy,
                                                const StrataSearchOptions& options = {});

/// Value and gradient in (Re, Im) of small_f.
Strata1ValueGradient small_f_with_gradient(cplx sigma);

struct Genus1CriticalPoint {
  cplx sigma;
  double f_value;
  double grad_norm;
  int n_plus, n_minus;
};
/// Critical points of small_f on Omega, boundary copies identified.
std::vector<Genus1CriticalPoint> genus1_critical_points(int resolution = 60, double y_max = 3.0);

}  // namespace modcrit
