#include "modcrit/modular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace modcrit {

namespace {

IntMatrix int2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  IntMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

SymplecticTransform inversion_with_shift(const IntMatrix& s) {
  // B -> -(B + S)^{-1}
  const IntMatrix i2 = IntMatrix::Identity(2, 2);
  return SymplecticTransform::from_blocks(IntMatrix::Zero(2, 2), -i2, i2, s);
}

SymplecticTransform partial_inversion(int slot) {
  // Inverts the diagonal entry `slot`; denominator det(C B + D) = B_slot,slot.
  const IntMatrix a = slot == 0 ? int2(0, 0, 0, 1) : int2(1, 0, 0, 0);
  const IntMatrix b = slot == 0 ? int2(-1, 0, 0, 0) : int2(0, 0, 0, -1);
  const IntMatrix c = slot == 0 ? int2(1, 0, 0, 0) : int2(0, 0, 0, 1);
  return SymplecticTransform::from_blocks(a, b, c, a);
}

std::string matrix_label(const IntMatrix& s) {
  return "[[" + std::to_string(s(0, 0)) + "," + std::to_string(s(0, 1)) + "],[" + std::to_string(s(1, 0)) + "," +
         std::to_string(s(1, 1)) + "]]";
}

}  // namespace

SiegelPoint apply_symplectic(const SymplecticTransform& t, const SiegelPoint& b) {
  const int g = b.genus();
  if (t.genus() != g) throw Error(ErrorKind::DimensionMismatch, "transform and point genus differ");
  const Eigen::MatrixXcd z = b.matrix();
  const Eigen::MatrixXcd num = t.a().cast<double>().cast<cplx>() * z + t.b().cast<double>().cast<cplx>();
  const Eigen::MatrixXcd den = t.c().cast<double>().cast<cplx>() * z + t.d().cast<double>().cast<cplx>();
  const cplx det = den.determinant();
  if (std::abs(det) < 1e-12) throw Error(ErrorKind::SingularDenominator, "det(C B + D) vanishes");
  // X = num * den^{-1}  <=>  den^t X^t = num^t
  Eigen::MatrixXcd x = den.transpose().partialPivLu().solve(num.transpose()).transpose();
  x = 0.5 * (x + x.transpose()).eval();
  return SiegelPoint::from_matrix(x);
}

const std::vector<GottschlingCondition>& gottschling_conditions() {
  static const std::vector<GottschlingCondition> conds = [] {
    std::vector<GottschlingCondition> out;
    int id = 7;
    out.push_back({id++, "|B11|>=1", partial_inversion(0)});
    out.push_back({id++, "|B22|>=1", partial_inversion(1)});
    const auto shear = SymplecticTransform::congruence(int2(1, -1, 0, 1));
    for (int e : {1, -1}) {
      const auto shift = SymplecticTransform::translation(int2(e, 0, 0, 0));
      out.push_back({id++, std::string("|B11+B22-2B12") + (e > 0 ? "+1" : "-1") + "|>=1",
                     symplectic_compose(partial_inversion(0), symplectic_compose(shift, shear))});
    }
    out.push_back({id++, "|det(B+S)|>=1 S=[[0,0],[0,0]]", inversion_with_shift(IntMatrix::Zero(2, 2))});
    const std::array<std::array<int, 4>, 7> shapes = {{{1, 0, 0, 0},
                                                       {0, 0, 0, 1},
                                                       {1, 0, 0, 1},
                                                       {1, 0, 0, -1},
                                                       {0, 1, 1, 0},
                                                       {1, 1, 1, 0},
                                                       {0, 1, 1, 1}}};
    for (const auto& sh : shapes) {
      for (int e : {1, -1}) {
        const IntMatrix s = int2(e * sh[0], e * sh[1], e * sh[2], e * sh[3]);
        out.push_back({id++, "|det(B+S)|>=1 S=" + matrix_label(s), inversion_with_shift(s)});
      }
    }
    if (out.size() != 19) throw Error(ErrorKind::InvalidArgument, "Gottschling list must have 19 conditions");
    return out;
  }();
  return conds;
}

double gottschling_lhs(const GottschlingCondition& c, const SiegelPoint& b) {
  const Eigen::MatrixXcd den =
      c.transform.c().cast<double>().cast<cplx>() * b.matrix() + c.transform.d().cast<double>().cast<cplx>();
  return std::abs(den.determinant());
}

DomainVerdict gottschling_membership(const SiegelPoint& b, double tol) {
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "Gottschling domain is genus 2");
  const Coords6 c = b.coords();
  DomainVerdict v;
  auto check = [&](bool ok, int id, const std::string& name) {
    if (!ok) v.violated.push_back({id, name});
  };
  check(std::abs(c[0]) <= 0.5 + tol, 1, "|x1|<=1/2");
  check(std::abs(c[1]) <= 0.5 + tol, 2, "|x2|<=1/2");
  check(std::abs(c[2]) <= 0.5 + tol, 3, "|x3|<=1/2");
  check(c[4] >= -tol, 4, "y2>=0");
  check(c[3] >= 2.0 * c[4] - tol, 5, "y1>=2y2");
  check(c[5] >= c[3] - tol, 6, "y3>=y1");
  for (const auto& cond : gottschling_conditions()) check(gottschling_lhs(cond, b) >= 1.0 - tol, cond.id, cond.name);
  const double h = std::sqrt(3.0) / 2.0;
  check(c[3] >= h - tol, 0, "y1>=sqrt(3)/2");
  check(c[5] >= h - tol, 0, "y3>=sqrt(3)/2");
  v.inside = v.violated.empty();
  return v;
}

Reduction reduce_to_gottschling(const SiegelPoint& b) {
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "reduction is genus 2");
  SiegelPoint cur = b;
  SymplecticTransform total = SymplecticTransform::identity(2);
  constexpr double eps = 1e-13;
  auto step = [&](const SymplecticTransform& t) {
    cur = apply_symplectic(t, cur);
    total = symplectic_compose(t, total);
  };
  for (int it = 0; it < kReductionIterationCap; ++it) {
    // Minkowski (Gauss) reduction of Im B.
    for (int inner = 0; inner < 1000; ++inner) {
      const Eigen::MatrixXd y = cur.imag_part();
      const double q = y(0, 1) / y(0, 0);
      if (std::abs(q) > 0.5 + eps) {
        step(SymplecticTransform::congruence(int2(1, 0, -static_cast<std::int64_t>(std::llround(q)), 1)));
      } else if (y(0, 0) > y(1, 1) * (1.0 + eps)) {
        step(SymplecticTransform::congruence(int2(0, 1, 1, 0)));
      } else {
        break;
      }
    }
    if (cur.imag_part()(0, 1) < 0.0) step(SymplecticTransform::congruence(int2(1, 0, 0, -1)));
    // Real parts into [-1/2, 1/2].
    const Eigen::MatrixXd x = cur.real_part();
    IntMatrix s = IntMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j)
        if (std::abs(x(i, j)) > 0.5 + eps) s(i, j) = s(j, i) = -static_cast<std::int64_t>(std::llround(x(i, j)));
    if (s != IntMatrix::Zero(2, 2)) step(SymplecticTransform::translation(s));
    // First violated inversion condition.
    const GottschlingCondition* bad = nullptr;
    for (const auto& cond : gottschling_conditions()) {
      if (gottschling_lhs(cond, cur) < 1.0 - 1e-12) {
        bad = &cond;
        break;
      }
    }
    if (!bad) {
      const Coords6 c = cur.coords();
      const bool mink_ok = c[4] >= 0.0 && c[3] >= 2.0 * c[4] * (1.0 - eps) && c[5] >= c[3] * (1.0 - eps);
      const bool x_ok = std::abs(c[0]) <= 0.5 + eps && std::abs(c[1]) <= 0.5 + eps && std::abs(c[2]) <= 0.5 + eps;
      if (mink_ok && x_ok) return {cur, total, it};
      continue;
    }
    step(bad->transform);
  }
  throw Error(ErrorKind::ReductionStalled, "Gottschling reduction hit the iteration cap");
}

const std::vector<SymplecticTransform>& sp4_generators() {
  static const std::vector<SymplecticTransform> gens = [] {
    std::vector<SymplecticTransform> out;
    for (const IntMatrix& s : {int2(1, 0, 0, 0), int2(0, 1, 1, 0), int2(0, 0, 0, 1)})
      out.push_back(SymplecticTransform::translation(s));
    for (const IntMatrix& u : {int2(0, 1, 1, 0), int2(1, 0, 0, -1), int2(1, 1, 0, 1), int2(1, 0, 1, 1)})
      out.push_back(SymplecticTransform::congruence(u));
    for (const auto& c : gottschling_conditions()) out.push_back(c.transform);
    return out;
  }();
  return gens;
}

EquivalenceResult siegel_equivalent(const SiegelPoint& a, const SiegelPoint& b, double tol) {
  const Reduction ra = reduce_to_gottschling(a), rb = reduce_to_gottschling(b);
  EquivalenceResult out;
  out.coordinate_gap = ra.point.max_abs_diff(rb.point);
  auto witness_via = [&](const SymplecticTransform& mid) {
    // a -> ra -> (mid) -> rb -> b
    return symplectic_compose(rb.transform.inverse(), symplectic_compose(mid, ra.transform));
  };
  if (out.coordinate_gap <= tol) {
    out.equivalent = true;
    out.method = "reduced-coordinates";
    out.witness = witness_via(SymplecticTransform::identity(2));
    return out;
  }
  // Boundary identifications: words of length <= 2 in the generators and their inverses.
  std::vector<SymplecticTransform> gens = {SymplecticTransform::identity(2)};
  for (const auto& g : sp4_generators()) {
    gens.push_back(g);
    gens.push_back(g.inverse());
  }
  for (const auto& g1 : gens) {
    for (const auto& g2 : gens) {
      const auto w = symplectic_compose(g2, g1);
      try {
        if (apply_symplectic(w, ra.point).max_abs_diff(rb.point) <= tol) {
          out.equivalent = true;
          out.method = "boundary-search";
          out.witness = witness_via(w);
          return out;
        }
      } catch (const Error&) {
      }
    }
  }
  try {
    const double fa = big_f(ra.point), fb = big_f(rb.point);
    const double da = ra.point.det_imag(), db = rb.point.det_imag();
    const double sf = std::max({fa, fb, 1e-300});
    if (std::abs(fa - fb) <= 1e-8 * sf && std::abs(da - db) <= 1e-6 * std::max(da, db)) {
      out.equivalent = true;
      out.method = "invariants";
      return out;
    }
  } catch (const Error&) {
  }
  out.method = "none";
  return out;
}

// ------------------------------------------------------------------ genus one

const char* to_string(Genus1Group g) noexcept {
  switch (g) {
    case Genus1Group::Gamma: return "gamma";
    case Genus1Group::Gamma2: return "gamma2";
    case Genus1Group::Gamma02Plus: return "gamma0_2plus";
    case Genus1Group::Gamma03Plus: return "gamma0_3plus";
  }
  return "?";
}

Genus1Group parse_genus1_group(const std::string& name) {
  if (name == "gamma") return Genus1Group::Gamma;
  if (name == "gamma2") return Genus1Group::Gamma2;
  if (name == "gamma0_2plus") return Genus1Group::Gamma02Plus;
  if (name == "gamma0_3plus") return Genus1Group::Gamma03Plus;
  throw Error(ErrorKind::InvalidArgument, "unknown genus-one group '" + name + "'");
}

namespace {

int fricke_level(Genus1Group g) { return g == Genus1Group::Gamma02Plus ? 2 : 3; }

// Reduction with each move reported as a word in the two generators (1, 2; negative = inverse),
// written left to right as a matrix product.
struct Genus1Move {
  MoebiusElement g;
  std::vector<int> word;
};

std::pair<cplx, std::vector<Genus1Move>> genus1_reduce_moves(cplx sigma, Genus1Group group) {
  if (!(sigma.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must have Im > 0");
  std::vector<Genus1Move> moves;
  constexpr double eps = 1e-13;
  auto translate = [&](std::int64_t n, int gen_letter) {
    if (n == 0) return;
    const std::int64_t step = group == Genus1Group::Gamma2 ? 2 : 1;
    moves.push_back({MoebiusElement(1, n * step, 0, 1), std::vector<int>(std::abs(n), n > 0 ? gen_letter : -gen_letter)});
    sigma += static_cast<double>(n * step);
  };
  for (int it = 0; it < 100000; ++it) {
    switch (group) {
      case Genus1Group::Gamma: {
        translate(-std::llround(sigma.real()), 1);
        if (std::norm(sigma) < 1.0 - eps) {
          moves.push_back({MoebiusElement(0, -1, 1, 0), {2}});
          sigma = -1.0 / sigma;
          continue;
        }
        return {sigma, moves};
      }
      case Genus1Group::Gamma2: {
        translate(-std::llround(sigma.real() / 2.0), 1);
        if (std::abs(sigma + 0.5) < 0.5 - eps) {
          moves.push_back({MoebiusElement(1, 0, 2, 1), {2}});
          sigma = sigma / (2.0 * sigma + 1.0);
          continue;
        }
        if (std::abs(sigma - 0.5) < 0.5 - eps) {
          moves.push_back({MoebiusElement(1, 0, -2, 1), {-2}});
          sigma = sigma / (1.0 - 2.0 * sigma);
          continue;
        }
        return {sigma, moves};
      }
      case Genus1Group::Gamma02Plus:
      case Genus1Group::Gamma03Plus: {
        const int n = fricke_level(group);
        const double r2 = 1.0 / n;
        if (sigma.real() < -eps || sigma.real() > 1.0 + eps) translate(-static_cast<std::int64_t>(std::floor(sigma.real())), 1);
        if (std::norm(sigma) < r2 * (1.0 - eps)) {
          // Fricke involution [[0,-1],[N,0]] = g1^{-1} g2
          moves.push_back({MoebiusElement(0, -1, n, 0), {-1, 2}});
          sigma = -1.0 / (static_cast<double>(n) * sigma);
          continue;
        }
        if (std::norm(sigma - 1.0) < r2 * (1.0 - eps)) {
          // t W t^{-1} = g2 g1^{-1}
          moves.push_back({MoebiusElement(n, -n - 1, n, -n), {2, -1}});
          sigma = 1.0 - 1.0 / (static_cast<double>(n) * (sigma - 1.0));
          continue;
        }
        return {sigma, moves};
      }
    }
  }
  throw Error(ErrorKind::ReductionStalled, "genus-one reduction hit the iteration cap");
}

}  // namespace

std::vector<MoebiusElement> genus1_generators(Genus1Group group) {
  switch (group) {
    case Genus1Group::Gamma: return {MoebiusElement(1, 1, 0, 1), MoebiusElement(0, -1, 1, 0)};
    case Genus1Group::Gamma2: return {MoebiusElement(1, 2, 0, 1), MoebiusElement(1, 0, 2, 1)};
    case Genus1Group::Gamma02Plus: return {MoebiusElement(1, 1, 0, 1), MoebiusElement(2, -1, 2, 0)};
    case Genus1Group::Gamma03Plus: return {MoebiusElement(1, 1, 0, 1), MoebiusElement(3, -1, 3, 0)};
  }
  throw Error(ErrorKind::InvalidArgument, "bad group");
}

DomainVerdict genus1_membership(cplx s, Genus1Group group, double tol) {
  DomainVerdict v;
  auto check = [&](bool ok, const char* name) {
    if (!ok) v.violated.push_back({0, name});
  };
  check(s.imag() > 0.0, "Im>0");
  switch (group) {
    case Genus1Group::Gamma:
      check(std::abs(s.real()) <= 0.5 + tol, "|Re|<=1/2");
      check(std::abs(s) >= 1.0 - tol, "|sigma|>=1");
      break;
    case Genus1Group::Gamma2:
      check(std::abs(s.real()) <= 1.0 + tol, "|Re|<=1");
      check(std::abs(s + 0.5) >= 0.5 - tol, "|sigma+1/2|>=1/2");
      check(std::abs(s - 0.5) >= 0.5 - tol, "|sigma-1/2|>=1/2");
      break;
    case Genus1Group::Gamma02Plus:
    case Genus1Group::Gamma03Plus: {
      const double r = 1.0 / std::sqrt(static_cast<double>(fricke_level(group)));
      check(s.real() >= -tol && s.real() <= 1.0 + tol, "0<=Re<=1");
      check(std::abs(s) >= r - tol, "|sigma|>=1/sqrt(N)");
      check(std::abs(s - 1.0) >= r - tol, "|sigma-1|>=1/sqrt(N)");
      break;
    }
  }
  v.inside = v.violated.empty();
  return v;
}

std::pair<cplx, MoebiusElement> genus1_reduce(cplx sigma, Genus1Group group) {
  auto [s, moves] = genus1_reduce_moves(sigma, group);
  MoebiusElement total = MoebiusElement::identity();
  const int level = group == Genus1Group::Gamma02Plus ? 2 : group == Genus1Group::Gamma03Plus ? 3 : 1;
  for (const auto& m : moves) total = (m.g * total).normalized(level);
  return {s, total};
}

// ------------------------------------------------------------------ embeddings

SiegelPoint embed_z2(cplx x, cplx y) { return SiegelPoint::make(2, {0.5 * (x + y), 0.5 * (x - y), 0.5 * (x + y)}); }

SiegelPoint embed_d2(cplx x) {
  if (!(x.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, "x must have Im > 0");
  return SiegelPoint::make(2, {x - 0.5, 0.5, x - 0.5});
}

SiegelPoint embed_d3(cplx s) {
  if (!(s.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must have Im > 0");
  return SiegelPoint::make(2, {2.0 * s, s, 2.0 * s});
}

SiegelPoint embed_strata(const StrataCoordinates& c) {
  switch (c.family) {
    case StrataFamily::Z2: return embed_z2(c.x, c.y);
    case StrataFamily::D2: return embed_d2(c.x);
    case StrataFamily::D3: return embed_d3(c.x);
  }
  throw Error(ErrorKind::InvalidArgument, "bad family");
}

// ------------------------------------------------------------- homomorphisms

namespace {

std::pair<SymplecticTransform, SymplecticTransform> strata_generator_images(StrataFamily family) {
  if (family == StrataFamily::D2)
    return {SymplecticTransform::from_rows(2, {1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1}),
            SymplecticTransform::from_rows(2, {0, -1, 1, 0, 0, -1, 0, 0, -1, -1, 0, 0, 1, -1, 1, -1})};
  if (family == StrataFamily::D3)
    return {SymplecticTransform::from_rows(2, {1, 0, 2, 1, 0, 1, 1, 2, 0, 0, 1, 0, 0, 0, 0, 1}),
            SymplecticTransform::from_rows(2, {-2, 1, 1, 0, -1, 2, 0, -1, -1, 0, 0, 0, 0, 1, 0, 0})};
  throw Error(ErrorKind::InvalidArgument, "strata homomorphism defined for D2 and D3 only");
}

Genus1Group strata_group(StrataFamily family) {
  return family == StrataFamily::D2 ? Genus1Group::Gamma02Plus : Genus1Group::Gamma03Plus;
}

constexpr std::size_t kWordCap = 10000;

}  // namespace

std::vector<int> strata_word(StrataFamily family, const MoebiusElement& gamma) {
  const Genus1Group group = strata_group(family);
  const int level = family == StrataFamily::D2 ? 2 : 3;
  // Generic base point with trivial stabilizer, interior to the domain.
  const cplx tau0(0.31830988618, 1.23456789012);
  const cplx start = gamma.apply(tau0);
  auto [s, moves] = genus1_reduce_moves(start, group);
  if (std::abs(s - tau0) > 1e-8) throw Error(ErrorKind::NotInGroup, "element does not lie in the group");
  // moves applied in order give w with w * gamma = tau0-stabilizer = identity; gamma = w^{-1}.
  std::vector<int> w;
  for (const auto& m : moves) w.insert(w.begin(), m.word.begin(), m.word.end());
  if (w.size() > kWordCap) throw Error(ErrorKind::NotInGroup, "word length cap exceeded");
  std::vector<int> inv(w.rbegin(), w.rend());
  for (auto& l : inv) l = -l;
  // Confirm exactly.
  const auto gens = genus1_generators(group);
  MoebiusElement prod = MoebiusElement::identity();
  for (int l : inv) prod = (prod * (l > 0 ? gens[l - 1] : gens[-l - 1].inverse())).normalized(level);
  if (!prod.same_action(gamma)) throw Error(ErrorKind::NotInGroup, "element is not a word in the generators");
  return inv;
}

SymplecticTransform strata_homomorphism(StrataFamily family, const MoebiusElement& gamma) {
  const auto [t1, t2] = strata_generator_images(family);
  SymplecticTransform out = SymplecticTransform::identity(2);
  for (int l : strata_word(family, gamma)) {
    const SymplecticTransform& g = std::abs(l) == 1 ? t1 : t2;
    out = symplectic_compose(out, l > 0 ? g : g.inverse());
  }
  return out;
}

SymplecticTransform z2_pair_transform(const MoebiusElement& g1, const MoebiusElement& g2) {
  if (!g1.is_integral() || !g2.is_integral() || !(g1.det() == RationalValue(1)) || !(g2.det() == RationalValue(1)))
    throw Error(ErrorKind::NotInGroup, "Z2 pair transform needs elements of SL(2, Z)");
  const std::int64_t k1 = g1.a().numerator(), l1 = g1.b().numerator(), m1 = g1.c().numerator(),
                     n1 = g1.d().numerator();
  const std::int64_t k2 = g2.a().numerator(), l2 = g2.b().numerator(), m2 = g2.c().numerator(),
                     n2 = g2.d().numerator();
  for (std::int64_t d : {k1 - k2, l1 - l2, m1 - m2, n1 - n2})
    if (d % 2 != 0) throw Error(ErrorKind::ParityViolation, "gamma1 - gamma2 has an odd entry");
  IntMatrix t(4, 4);
  t << (k1 + k2) / 2, (k1 - k2) / 2, (l1 + l2) / 2, (l1 - l2) / 2,  //
      (k1 - k2) / 2, (k1 + k2) / 2, (l1 - l2) / 2, (l1 + l2) / 2,   //
      (m1 + m2) / 2, (m1 - m2) / 2, (n1 + n2) / 2, (n1 - n2) / 2,   //
      (m1 - m2) / 2, (m1 + m2) / 2, (n1 - n2) / 2, (n1 + n2) / 2;
  return SymplecticTransform(t);
}

}  // namespace modcrit
