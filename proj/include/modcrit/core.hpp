#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modcrit/error.hpp"

namespace modcrit {

using cplx = std::complex<double>;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxGenus = 3;

/// Real coordinates (x1, x2, x3, y1, y2, y3) of a genus-two period matrix,
/// B11 = x1 + i y1, B12 = x2 + i y2, B22 = x3 + i y3.
using Coords6 = std::array<double, 6>;

/// A point of the Siegel upper half-space: symmetric complex matrix with
/// positive-definite imaginary part. Only the upper triangle is stored.
class SiegelPoint {
 public:
  /// Entries are the upper triangle in row-major order: (1,1), (1,2), ..., (g,g).
  static SiegelPoint make(int genus, std::span<const cplx> upper);
  static SiegelPoint make(int genus, std::initializer_list<cplx> upper);
  /// Takes the upper triangle of `m`; the lower triangle is ignored.
  static SiegelPoint from_matrix(const Eigen::MatrixXcd& m);
  static SiegelPoint from_coords(const Coords6& c);

  int genus() const noexcept { return genus_; }
  cplx operator()(int i, int j) const noexcept;

  Eigen::MatrixXcd matrix() const;
  Eigen::MatrixXd real_part() const;
  Eigen::MatrixXd imag_part() const;
  /// Genus two only.
  Coords6 coords() const;

  double det_imag() const;
  double min_imag_eigenvalue() const;
  /// The point -conj(B).
  SiegelPoint reflected() const;

  double max_abs_diff(const SiegelPoint& other) const;

 private:
  SiegelPoint(int genus, const std::array<cplx, 6>& upper) : genus_(genus), upper_(upper) {}
  static int index(int genus, int i, int j) noexcept;

  int genus_ = 0;
  std::array<cplx, 6> upper_{};
};

/// Half-integer characteristic [p; q] with p_i, q_i in {0, 1/2}; stored as bits (2p, 2q).
class Characteristic {
 public:
  Characteristic(int genus, std::span<const int> p_bits, std::span<const int> q_bits);
  Characteristic(std::initializer_list<int> p_bits, std::initializer_list<int> q_bits);

  int genus() const noexcept { return genus_; }
  double p(int i) const noexcept { return 0.5 * p_bits_[i]; }
  double q(int i) const noexcept { return 0.5 * q_bits_[i]; }
  int p_bit(int i) const noexcept { return p_bits_[i]; }
  int q_bit(int i) const noexcept { return q_bits_[i]; }
  /// 4<p,q> mod 2.
  int parity() const noexcept;
  bool is_even() const noexcept { return parity() == 0; }
  std::string to_string() const;

  friend bool operator==(const Characteristic&, const Characteristic&) = default;

 private:
  int genus_;
  std::array<int, kMaxGenus> p_bits_{};
  std::array<int, kMaxGenus> q_bits_{};
};

/// Integer symplectic matrix M = (A B; C D) acting by B -> (A B + B)(C B + D)^{-1}.
class SymplecticTransform {
 public:
  /// Throws InvalidArgument unless M J M^t = J exactly.
  explicit SymplecticTransform(IntMatrix m);
  static SymplecticTransform from_rows(int genus, std::initializer_list<std::int64_t> row_major);
  static SymplecticTransform from_blocks(const IntMatrix& a, const IntMatrix& b, const IntMatrix& c,
                                         const IntMatrix& d);
  static SymplecticTransform identity(int genus);
  /// B -> U B U^t for U in GL(g, Z).
  static SymplecticTransform congruence(const IntMatrix& u);
  /// B -> B + S for integer symmetric S.
  static SymplecticTransform translation(const IntMatrix& s);
  static IntMatrix standard_form(int genus);

  int genus() const noexcept { return static_cast<int>(m_.rows() / 2); }
  const IntMatrix& matrix() const noexcept { return m_; }
  IntMatrix a() const { return m_.topLeftCorner(genus(), genus()); }
  IntMatrix b() const { return m_.topRightCorner(genus(), genus()); }
  IntMatrix c() const { return m_.bottomLeftCorner(genus(), genus()); }
  IntMatrix d() const { return m_.bottomRightCorner(genus(), genus()); }

  SymplecticTransform inverse() const;
  bool is_identity() const;
  std::vector<std::int64_t> row_major() const;

  friend bool operator==(const SymplecticTransform& x, const SymplecticTransform& y) {
    return x.m_ == y.m_;
  }

 private:
  IntMatrix m_;
};

/// Block-matrix product lhs * rhs (apply rhs first).
SymplecticTransform symplectic_compose(const SymplecticTransform& lhs, const SymplecticTransform& rhs);
bool is_symplectic(const IntMatrix& m);
std::int64_t integer_determinant(const IntMatrix& m);

/// Exact fraction in lowest terms with positive denominator.
class RationalValue {
 public:
  RationalValue() = default;
  RationalValue(std::int64_t numerator, std::int64_t denominator = 1);

  std::int64_t numerator() const noexcept { return num_; }
  std::int64_t denominator() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;
  /// Parses "p/q" or "p".
  static RationalValue parse(const std::string& text);

  RationalValue operator-() const { return {-num_, den_}; }
  friend RationalValue operator+(const RationalValue& a, const RationalValue& b);
  friend RationalValue operator-(const RationalValue& a, const RationalValue& b);
  friend RationalValue operator*(const RationalValue& a, const RationalValue& b);
  friend RationalValue operator/(const RationalValue& a, const RationalValue& b);
  RationalValue& operator+=(const RationalValue& o) { return *this = *this + o; }
  friend bool operator==(const RationalValue&, const RationalValue&) = default;
  friend bool operator<(const RationalValue& a, const RationalValue& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Element of GL(2, Q)^+ acting as a Moebius transformation of the upper half-plane.
class MoebiusElement {
 public:
  MoebiusElement(RationalValue a, RationalValue b, RationalValue c, RationalValue d);
  static MoebiusElement identity() { return {1, 0, 0, 1}; }

  const RationalValue& a() const noexcept { return a_; }
  const RationalValue& b() const noexcept { return b_; }
  const RationalValue& c() const noexcept { return c_; }
  const RationalValue& d() const noexcept { return d_; }
  RationalValue det() const { return a_ * d_ - b_ * c_; }

  cplx apply(cplx tau) const;
  MoebiusElement inverse() const;
  /// Rescales by a rational factor so that det lies in {1, level} when possible, and fixes the
  /// overall sign (first nonzero of c, d positive). Projectively the same map.
  MoebiusElement normalized(int level) const;
  /// Projective equality (equal up to a nonzero rational scale).
  bool same_action(const MoebiusElement& other) const;
  bool is_integral() const;
  std::string to_string() const;

 private:
  RationalValue a_, b_, c_, d_;
};

MoebiusElement operator*(const MoebiusElement& lhs, const MoebiusElement& rhs);

/// Lattice cutoff for theta series: fixed |m_i| <= N, or adaptive growth of N until the tail
/// bound drops below tail_tol (N clamped to [3, 12]).
struct TruncationPolicy {
  enum class Mode { Fixed, Adaptive };

  Mode mode = Mode::Adaptive;
  int n = 3;
  double tail_tol = 1e-16;

  static TruncationPolicy fixed(int n);
  static TruncationPolicy adaptive(double tail_tol = 1e-16);
  void validate() const;
};

inline constexpr int kMinAdaptiveCutoff = 3;
inline constexpr int kMaxAdaptiveCutoff = 12;

/// epsilon_k = exp(2 pi i / k).
struct RootOfUnity {
  int k;
  explicit RootOfUnity(int order);
  cplx value() const;
  cplx pow(int e) const;
};

}  // namespace modcrit
