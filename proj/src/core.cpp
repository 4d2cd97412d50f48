#include "modcrit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace modcrit {

namespace {

constexpr double kMinorThreshold = 1e-14;

void check_genus(int genus) {
  if (genus < 1 || genus > kMaxGenus)
    throw Error(ErrorKind::InvalidArgument, "genus must be in [1, 3], got " + std::to_string(genus));
}

int triangle_size(int genus) { return genus * (genus + 1) / 2; }

}  // namespace

// ---------------------------------------------------------------- SiegelPoint

int SiegelPoint::index(int genus, int i, int j) noexcept {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle.
  return i * genus - i * (i - 1) / 2 + (j - i);
}

SiegelPoint SiegelPoint::make(int genus, std::span<const cplx> upper) {
  check_genus(genus);
  if (static_cast<int>(upper.size()) != triangle_size(genus))
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(triangle_size(genus)) + " upper-triangle entries, got " +
                    std::to_string(upper.size()));
  std::array<cplx, 6> data{};
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (!std::isfinite(upper[i].real()) || !std::isfinite(upper[i].imag()))
      throw Error(ErrorKind::InvalidArgument, "non-finite period-matrix entry");
    data[i] = upper[i];
  }
  SiegelPoint p(genus, data);
  const Eigen::MatrixXd y = p.imag_part();
  for (int k = 1; k <= genus; ++k) {
    const double minor = y.topLeftCorner(k, k).determinant();
    if (!(minor > kMinorThreshold))
      throw Error(ErrorKind::NotPositiveDefinite,
                  "leading minor " + std::to_string(k) + " of Im B is " + std::to_string(minor));
  }
  return p;
}

SiegelPoint SiegelPoint::make(int genus, std::initializer_list<cplx> upper) {
  return make(genus, std::span<const cplx>(upper.begin(), upper.size()));
}

SiegelPoint SiegelPoint::from_matrix(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "period matrix must be square");
  const int g = static_cast<int>(m.rows());
  check_genus(g);
  std::vector<cplx> upper;
  for (int i = 0; i < g; ++i)
    for (int j = i; j < g; ++j) upper.push_back(m(i, j));
  return make(g, upper);
}

SiegelPoint SiegelPoint::from_coords(const Coords6& c) {
  return make(2, {cplx(c[0], c[3]), cplx(c[1], c[4]), cplx(c[2], c[5])});
}

cplx SiegelPoint::operator()(int i, int j) const noexcept { return upper_[index(genus_, i, j)]; }

Eigen::MatrixXcd SiegelPoint::matrix() const {
  Eigen::MatrixXcd m(genus_, genus_);
  for (int i = 0; i < genus_; ++i)
    for (int j = 0; j < genus_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

Eigen::MatrixXd SiegelPoint::real_part() const { return matrix().real(); }
Eigen::MatrixXd SiegelPoint::imag_part() const { return matrix().imag(); }

Coords6 SiegelPoint::coords() const {
  if (genus_ != 2) throw Error(ErrorKind::DimensionMismatch, "coords() requires genus 2");
  return {upper_[0].real(), upper_[1].real(), upper_[2].real(),
          upper_[0].imag(), upper_[1].imag(), upper_[2].imag()};
}

double SiegelPoint::det_imag() const { return imag_part().determinant(); }

double SiegelPoint::min_imag_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(imag_part(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SiegelPoint SiegelPoint::reflected() const {
  std::array<cplx, 6> data{};
  for (int i = 0; i < triangle_size(genus_); ++i) data[i] = -std::conj(upper_[i]);
  return SiegelPoint(genus_, data);
}

double SiegelPoint::max_abs_diff(const SiegelPoint& other) const {
  if (genus_ != other.genus_) throw Error(ErrorKind::DimensionMismatch, "genus mismatch");
  double d = 0.0;
  for (int i = 0; i < triangle_size(genus_); ++i) d = std::max(d, std::abs(upper_[i] - other.upper_[i]));
  return d;
}

// ------------------------------------------------------------- Characteristic

Characteristic::Characteristic(int genus, std::span<const int> p_bits, std::span<const int> q_bits)
    : genus_(genus) {
  check_genus(genus);
  if (static_cast<int>(p_bits.size()) != genus || static_cast<int>(q_bits.size()) != genus)
    throw Error(ErrorKind::DimensionMismatch, "characteristic length must equal genus");
  for (int i = 0; i < genus; ++i) {
    if ((p_bits[i] != 0 && p_bits[i] != 1) || (q_bits[i] != 0 && q_bits[i] != 1))
      throw Error(ErrorKind::InvalidArgument, "characteristic bits must be 0 or 1");
    p_bits_[i] = p_bits[i];
    q_bits_[i] = q_bits[i];
  }
}

Characteristic::Characteristic(std::initializer_list<int> p_bits, std::initializer_list<int> q_bits)
    : Characteristic(static_cast<int>(p_bits.size()), std::span<const int>(p_bits.begin(), p_bits.size()),
                     std::span<const int>(q_bits.begin(), q_bits.size())) {}

int Characteristic::parity() const noexcept {
  int s = 0;
  for (int i = 0; i < genus_; ++i) s += p_bits_[i] * q_bits_[i];
  return s % 2;
}

std::string Characteristic::to_string() const {
  auto half = [](int b) { return b ? std::string("1/2") : std::string("0"); };
  std::string s = "[";
  for (int i = 0; i < genus_; ++i) s += (i ? "," : "") + half(p_bits_[i]);
  s += ";";
  for (int i = 0; i < genus_; ++i) s += (i ? "," : "") + half(q_bits_[i]);
  return s + "]";
}

// -------------------------------------------------------- SymplecticTransform

IntMatrix SymplecticTransform::standard_form(int genus) {
  IntMatrix j = IntMatrix::Zero(2 * genus, 2 * genus);
  for (int i = 0; i < genus; ++i) {
    j(i, genus + i) = 1;
    j(genus + i, i) = -1;
  }
  return j;
}

bool is_symplectic(const IntMatrix& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0) return false;
  const IntMatrix j = SymplecticTransform::standard_form(static_cast<int>(m.rows() / 2));
  return m * j * m.transpose() == j;
}

std::int64_t integer_determinant(const IntMatrix& m) {
  // Bareiss fraction-free elimination.
  const auto n = m.rows();
  if (n != m.cols()) throw Error(ErrorKind::DimensionMismatch, "determinant of non-square matrix");
  if (n == 0) return 1;
  IntMatrix a = m;
  std::int64_t sign = 1, prev = 1;
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (a(k, k) == 0) {
      Eigen::Index r = k + 1;
      while (r < n && a(r, k) == 0) ++r;
      if (r == n) return 0;
      a.row(k).swap(a.row(r));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

SymplecticTransform::SymplecticTransform(IntMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0 || m_.rows() > 2 * kMaxGenus)
    throw Error(ErrorKind::DimensionMismatch, "symplectic matrix must be 2g x 2g with g in [1, 3]");
  if (!is_symplectic(m_)) throw Error(ErrorKind::InvalidArgument, "matrix is not symplectic (M J M^t != J)");
}

SymplecticTransform SymplecticTransform::from_rows(int genus, std::initializer_list<std::int64_t> row_major) {
  check_genus(genus);
  const int n = 2 * genus;
  if (static_cast<int>(row_major.size()) != n * n)
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(n * n) + " entries");
  IntMatrix m(n, n);
  auto it = row_major.begin();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = *it++;
  return SymplecticTransform(std::move(m));
}

SymplecticTransform SymplecticTransform::from_blocks(const IntMatrix& a, const IntMatrix& b, const IntMatrix& c,
                                                     const IntMatrix& d) {
  const auto g = a.rows();
  for (const IntMatrix* blk : {&a, &b, &c, &d})
    if (blk->rows() != g || blk->cols() != g) throw Error(ErrorKind::DimensionMismatch, "block shape mismatch");
  IntMatrix m(2 * g, 2 * g);
  m << a, b, c, d;
  return SymplecticTransform(std::move(m));
}

SymplecticTransform SymplecticTransform::identity(int genus) {
  check_genus(genus);
  return SymplecticTransform(IntMatrix::Identity(2 * genus, 2 * genus));
}

SymplecticTransform SymplecticTransform::congruence(const IntMatrix& u) {
  const auto g = u.rows();
  const std::int64_t det = integer_determinant(u);
  if (det != 1 && det != -1) throw Error(ErrorKind::InvalidArgument, "congruence matrix must be unimodular");
  // U^{-t} is integral because det = +-1: use the adjugate via exact integer solve.
  Eigen::MatrixXd inv = u.cast<double>().inverse().transpose();
  IntMatrix uit = inv.array().round().cast<std::int64_t>().matrix();
  return from_blocks(u, IntMatrix::Zero(g, g), IntMatrix::Zero(g, g), uit);
}

SymplecticTransform SymplecticTransform::translation(const IntMatrix& s) {
  const auto g = s.rows();
  if (s != s.transpose()) throw Error(ErrorKind::InvalidArgument, "translation matrix must be symmetric");
  return from_blocks(IntMatrix::Identity(g, g), s, IntMatrix::Zero(g, g), IntMatrix::Identity(g, g));
}

SymplecticTransform SymplecticTransform::inverse() const {
  const IntMatrix j = standard_form(genus());
  return SymplecticTransform(-(j * m_.transpose() * j));
}

bool SymplecticTransform::is_identity() const { return m_ == IntMatrix::Identity(m_.rows(), m_.cols()); }

std::vector<std::int64_t> SymplecticTransform::row_major() const {
  std::vector<std::int64_t> out;
  for (Eigen::Index i = 0; i < m_.rows(); ++i)
    for (Eigen::Index j = 0; j < m_.cols(); ++j) out.push_back(m_(i, j));
  return out;
}

SymplecticTransform symplectic_compose(const SymplecticTransform& lhs, const SymplecticTransform& rhs) {
  if (lhs.genus() != rhs.genus()) throw Error(ErrorKind::DimensionMismatch, "genus mismatch in compose");
  return SymplecticTransform(lhs.matrix() * rhs.matrix());
}

// -------------------------------------------------------------- RationalValue

RationalValue::RationalValue(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const std::int64_t g = std::gcd(numerator, denominator);
  num_ = numerator / (g ? g : 1);
  den_ = denominator / (g ? g : 1);
}

std::string RationalValue::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

RationalValue RationalValue::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const auto n = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {n, 1};
    }
    const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
    const auto n = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const auto d = std::stoll(b, &used);
    if (used != b.size()) throw std::invalid_argument(text);
    return {n, d};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, "cannot parse rational '" + text + "'");
  }
}

RationalValue operator+(const RationalValue& a, const RationalValue& b) {
  const std::int64_t l = std::lcm(a.den_, b.den_);
  return {a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l};
}

RationalValue operator-(const RationalValue& a, const RationalValue& b) { return a + (-b); }

RationalValue operator*(const RationalValue& a, const RationalValue& b) {
  // Cross-cancel first to keep intermediates small.
  const std::int64_t g1 = std::gcd(a.num_, b.den_), g2 = std::gcd(b.num_, a.den_);
  const std::int64_t s1 = g1 ? g1 : 1, s2 = g2 ? g2 : 1;
  return {(a.num_ / s1) * (b.num_ / s2), (a.den_ / s2) * (b.den_ / s1)};
}

RationalValue operator/(const RationalValue& a, const RationalValue& b) {
  if (b.num_ == 0) throw Error(ErrorKind::InvalidArgument, "division by zero rational");
  return a * RationalValue(b.den_, b.num_);
}

bool operator<(const RationalValue& a, const RationalValue& b) { return (a - b).num_ < 0; }

// ------------------------------------------------------------- MoebiusElement

MoebiusElement::MoebiusElement(RationalValue a, RationalValue b, RationalValue c, RationalValue d)
    : a_(a), b_(b), c_(c), d_(d) {
  if (!(RationalValue(0) < det()))
    throw Error(ErrorKind::InvalidArgument, "Moebius element needs ad - bc > 0, got " + det().to_string());
}

cplx MoebiusElement::apply(cplx tau) const {
  const cplx den = c_.to_double() * tau + d_.to_double();
  if (std::abs(den) == 0.0) throw Error(ErrorKind::SingularDenominator, "c tau + d = 0");
  return (a_.to_double() * tau + b_.to_double()) / den;
}

MoebiusElement MoebiusElement::inverse() const { return {d_, -b_, -c_, a_}; }

MoebiusElement operator*(const MoebiusElement& l, const MoebiusElement& r) {
  return {l.a() * r.a() + l.b() * r.c(), l.a() * r.b() + l.b() * r.d(), l.c() * r.a() + l.d() * r.c(),
          l.c() * r.b() + l.d() * r.d()};
}

MoebiusElement MoebiusElement::normalized(int level) const {
  // Clear denominators, then divide out the content of the integer matrix.
  const std::int64_t l = std::lcm(std::lcm(a_.denominator(), b_.denominator()),
                                  std::lcm(c_.denominator(), d_.denominator()));
  std::int64_t e[4] = {a_.numerator() * (l / a_.denominator()), b_.numerator() * (l / b_.denominator()),
                       c_.numerator() * (l / c_.denominator()), d_.numerator() * (l / d_.denominator())};
  std::int64_t g = 0;
  for (auto x : e) g = std::gcd(g, x);
  for (auto& x : e) x /= g;
  const std::int64_t det = e[0] * e[3] - e[1] * e[2];
  // Primitive integer matrix with det = k^2 * target for target in {1, level}: divide by k.
  RationalValue scale(1);
  for (std::int64_t target : {std::int64_t{1}, std::int64_t{level}}) {
    if (target <= 0 || det % target != 0) continue;
    const auto k2 = det / target;
    const auto k = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(k2))));
    if (k > 0 && k * k == k2) {
      scale = RationalValue(1, k);
      break;
    }
  }
  const int first = e[2] != 0 ? 2 : 3;
  if (e[first] < 0) scale = -scale;
  return {RationalValue(e[0]) * scale, RationalValue(e[1]) * scale, RationalValue(e[2]) * scale,
          RationalValue(e[3]) * scale};
}

bool MoebiusElement::same_action(const MoebiusElement& o) const {
  // Proportional iff all 2x2 minors of the 2x4 stack vanish.
  const RationalValue u[4] = {a_, b_, c_, d_}, v[4] = {o.a_, o.b_, o.c_, o.d_};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (!(u[i] * v[j] - u[j] * v[i] == RationalValue(0))) return false;
  return true;
}

bool MoebiusElement::is_integral() const {
  return a_.denominator() == 1 && b_.denominator() == 1 && c_.denominator() == 1 && d_.denominator() == 1;
}

std::string MoebiusElement::to_string() const {
  return "[[" + a_.to_string() + "," + b_.to_string() + "],[" + c_.to_string() + "," + d_.to_string() + "]]";
}

// ----------------------------------------------------------- TruncationPolicy

TruncationPolicy TruncationPolicy::fixed(int n) {
  TruncationPolicy p;
  p.mode = Mode::Fixed;
  p.n = n;
  p.validate();
  return p;
}

TruncationPolicy TruncationPolicy::adaptive(double tail_tol) {
  TruncationPolicy p;
  p.mode = Mode::Adaptive;
  p.n = kMinAdaptiveCutoff;
  p.tail_tol = tail_tol;
  p.validate();
  return p;
}

void TruncationPolicy::validate() const {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "truncation N must be >= 1");
  if (!(tail_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tail_tol must be positive");
}

// ---------------------------------------------------------------- RootOfUnity

RootOfUnity::RootOfUnity(int order) : k(order) {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "root of unity order must be positive");
}

cplx RootOfUnity::value() const { return pow(1); }

cplx RootOfUnity::pow(int e) const {
  const int r = ((e % k) + k) % k;
  return std::polar(1.0, 2.0 * kPi * r / k);
}

}  // namespace modcrit
