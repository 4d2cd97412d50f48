#include "modcrit/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "modcrit/strata.hpp"
#include "modcrit/theta.hpp"

namespace modcrit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt3Half = std::sqrt(3.0) / 2.0;

int resolve_workers(int w) {
  if (w > 0) return w;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::min(resolve_workers(workers), std::max(n, 1));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double max_norm_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> to_vec(const Coords6& c) { return {c.begin(), c.end()}; }

Coords6 to_coords(const std::vector<double>& v) {
  Coords6 c{};
  std::copy(v.begin(), v.end(), c.begin());
  return c;
}

double coords_gap(const SiegelPoint& a, const SiegelPoint& b) { return max_norm_gap(to_vec(a.coords()), to_vec(b.coords())); }

using GradFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Newton iteration on grad = 0 with a central-difference Jacobian, backtracking on |grad|.
std::vector<double> newton_polish(const GradFn& grad, std::vector<double> x, int max_iter = 12) {
  const int n = static_cast<int>(x.size());
  constexpr double h = 1e-6;
  std::vector<double> g = grad(x);
  for (int it = 0; it < max_iter; ++it) {
    const double gn = norm(g);
    if (gn < 1e-14) break;
    Eigen::MatrixXd jac(n, n);
    for (int j = 0; j < n; ++j) {
      std::vector<double> xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const auto gp = grad(xp), gm = grad(xm);
      for (int i = 0; i < n; ++i) jac(i, j) = (gp[i] - gm[i]) / (2 * h);
    }
    jac = 0.5 * (jac + jac.transpose()).eval();
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = -g[i];
    const Eigen::VectorXd dx = jac.colPivHouseholderQr().solve(rhs);
    bool improved = false;
    for (double t = 1.0; t > 1e-3; t *= 0.5) {
      std::vector<double> xn = x;
      for (int i = 0; i < n; ++i) xn[i] += t * dx(i);
      std::vector<double> gnew;
      try {
        gnew = grad(xn);
      } catch (const Error&) {
        continue;
      }
      if (norm(gnew) < gn) {
        x = xn;
        g = gnew;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return x;
}

std::vector<double> big_f_grad_vec(const std::vector<double>& v, const TruncationPolicy& policy) {
  const auto g = grad_big_f(SiegelPoint::from_coords(to_coords(v)), policy);
  return {g.begin(), g.end()};
}

// Nelder-Mead with restarts from the best vertex until a restart stops improving.
NelderMeadResult minimize_with_restarts(const std::function<double(const std::vector<double>&)>& obj,
                                        std::vector<double> x, const NelderMeadOptions& options) {
  NelderMeadResult best;
  best.value = kInf;
  long long used = 0;
  for (int r = 0; r < 4; ++r) {
    NelderMeadOptions o = options;
    o.max_evaluations = options.max_evaluations - used;
    if (o.max_evaluations <= 0) break;
    NelderMeadResult res = nelder_mead(obj, x, o);
    used += res.evaluations;
    const bool better = res.value < best.value * (1.0 - 1e-3) || !std::isfinite(best.value);
    if (res.value <= best.value) {
      best = res;
      x = res.x;
    }
    best.evaluations = used;
    if (!better || res.value <= options.ftol) break;
  }
  return best;
}

}  // namespace

// ------------------------------------------------------------------ grid

void GridSpec::validate() const {
  if (points_per_axis < 2) throw Error(ErrorKind::InvalidArgument, "points_per_axis must be >= 2");
  if (!(y_max > kSqrt3Half)) throw Error(ErrorKind::InvalidArgument, "y_max must exceed sqrt(3)/2");
  if (box)
    for (const auto& [lo, hi] : *box)
      if (!(lo <= hi)) throw Error(ErrorKind::InvalidArgument, "box range with lo > hi");
}

std::array<std::pair<double, double>, 6> GridSpec::ranges() const {
  if (box) return *box;
  return {{{-0.5, 0.5}, {-0.5, 0.5}, {0.0, 0.5}, {kSqrt3Half, y_max}, {0.0, y_max / 2}, {kSqrt3Half, y_max}}};
}

int GridSpec::points(int k) const {
  if (k == 2 && !box) return (points_per_axis + 1) / 2;
  return points_per_axis;
}

GridSpec GridSpec::box_around(const SiegelPoint& center, double half, int n, double y_max) {
  GridSpec g;
  g.points_per_axis = n;
  g.y_max = y_max;
  const Coords6 c = center.coords();
  std::array<std::pair<double, double>, 6> b;
  for (int k = 0; k < 6; ++k) b[k] = {c[k] - half, c[k] + half};
  b[2].first = std::max(b[2].first, 0.0);
  b[2].second = std::max(b[2].second, b[2].first);
  g.box = b;
  return g;
}

std::vector<ScanCandidate> grid_scan(const GridSpec& spec, const TruncationPolicy& policy, const ScanOptions& options,
                                     ScanStats* stats) {
  spec.validate();
  policy.validate();
  const auto r = spec.ranges();
  std::array<std::vector<double>, 6> axis;
  for (int k = 0; k < 6; ++k) {
    const int n = spec.points(k);
    for (int i = 0; i < n; ++i)
      axis[k].push_back(n == 1 ? r[k].first : r[k].first + (r[k].second - r[k].first) * i / (n - 1));
  }
  const int slices = static_cast<int>(axis[3].size());
  std::vector<std::vector<ScanCandidate>> per_slice(slices);
  std::vector<ScanStats> slice_stats(slices);
  constexpr double tol = kBoundaryTolerance;

  parallel_for(slices, options.workers, [&](int s) {
    const double y1 = axis[3][s];
    ScanStats st;
    double slice_min = kInf;
    std::vector<ScanCandidate> kept;
    for (double y2 : axis[4]) {
      if (y2 < -tol || y1 < 2 * y2 - tol) {
        st.nodes += static_cast<long long>(axis[5].size() * axis[0].size() * axis[1].size() * axis[2].size());
        continue;
      }
      for (double y3 : axis[5]) {
        if (y3 < y1 - tol || y1 < kSqrt3Half - tol) {
          st.nodes += static_cast<long long>(axis[0].size() * axis[1].size() * axis[2].size());
          continue;
        }
        for (double x1 : axis[0])
          for (double x2 : axis[1])
            for (double x3 : axis[2]) {
              ++st.nodes;
              SiegelPoint p = SiegelPoint::from_coords({x1, x2, x3, y1, y2, y3});
              if (!gottschling_membership(p, tol).inside) continue;
              ++st.inside;
              ValueGradient vg;
              try {
                vg = big_f_with_gradient(p, policy);
              } catch (const Error&) {
                continue;
              }
              ++st.evaluated;
              double gn = 0.0;
              for (double g : vg.grad) gn += g * g;
              gn = std::sqrt(gn);
              if (gn > slice_min + options.slice_window) continue;
              slice_min = std::min(slice_min, gn);
              kept.push_back({p, vg.value, gn});
            }
      }
    }
    std::erase_if(kept, [&](const ScanCandidate& c) { return c.grad_norm > slice_min + options.slice_window; });
    per_slice[s] = std::move(kept);
    slice_stats[s] = st;
  });

  std::vector<ScanCandidate> all;
  for (int s = 0; s < slices; ++s) {
    all.insert(all.end(), per_slice[s].begin(), per_slice[s].end());
    if (stats) {
      stats->nodes += slice_stats[s].nodes;
      stats->inside += slice_stats[s].inside;
      stats->evaluated += slice_stats[s].evaluated;
    }
  }
  // Ranked by |grad F| / F: near the cusp both F and its gradient decay, so the absolute norm would
  // put those nodes first.
  std::stable_sort(all.begin(), all.end(), [](const ScanCandidate& a, const ScanCandidate& b) {
    const double ra = a.grad_norm / a.f_value, rb = b.grad_norm / b.f_value;
    if (ra != rb) return ra < rb;
    return a.point.coords() < b.point.coords();
  });
  std::vector<ScanCandidate> out;
  for (const auto& c : all) {
    bool dup = false;
    for (const auto& o : out)
      if (coords_gap(c.point, o.point) < options.dedupe_radius) {
        dup = true;
        break;
      }
    if (dup) continue;
    out.push_back(c);
    if (options.max_candidates > 0 && out.size() >= options.max_candidates) break;
  }
  return out;
}

// ------------------------------------------------------------------ Nelder-Mead

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const NelderMeadOptions& o) {
  const std::size_t n = x0.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty start vector");
  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += o.initial_step;
  for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i) d = std::max(d, max_norm_gap(pts[i], pts[0]));
    return d;
  };
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    {
      std::vector<std::vector<double>> p2;
      std::vector<double> v2;
      for (auto i : order) {
        p2.push_back(pts[i]);
        v2.push_back(val[i]);
      }
      pts.swap(p2);
      val.swap(v2);
    }
    res.diameter = diameter();
    if (res.diameter < o.xtol || val[0] <= o.ftol) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= o.max_evaluations) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + t * (pts[n][k] - centroid[k]);
      return x;
    };
    const auto xr = along(-o.reflection);
    const double fr = eval(xr);
    if (fr < val[0]) {
      const auto xe = along(-o.reflection * o.expansion);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[n] = xe;
        val[n] = fe;
      } else {
        pts[n] = xr;
        val[n] = fr;
      }
      continue;
    }
    if (fr < val[n - 1]) {
      pts[n] = xr;
      val[n] = fr;
      continue;
    }
    const bool outside = fr < val[n];
    const auto xc = outside ? along(-o.reflection * o.contraction) : along(o.contraction);
    const double fc = eval(xc);
    if (fc < (outside ? fr : val[n])) {
      pts[n] = xc;
      val[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + o.shrink * (pts[i][k] - pts[0][k]);
      val[i] = eval(pts[i]);
    }
  }
  res.x = pts[0];
  res.value = val[0];
  return res;
}

// ------------------------------------------------------------------ refinement

const char* to_string(CriticalLabel l) noexcept {
  switch (l) {
    case CriticalLabel::Burnside: return "Burnside";
    case CriticalLabel::D6: return "D6";
    case CriticalLabel::Z5: return "Z5";
    case CriticalLabel::D3extremal: return "D3extremal";
    case CriticalLabel::Unknown: return "unknown";
  }
  return "?";
}

HessianResult hessian_from_gradient(const GradFn& grad, const std::vector<double>& x, double h) {
  const int n = static_cast<int>(x.size());
  auto build = [&](double step, double* defect) {
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
      std::vector<double> xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      const auto gp = grad(xp), gm = grad(xm);
      for (int i = 0; i < n; ++i) m(i, j) = (gp[i] - gm[i]) / (2 * step);
    }
    if (defect) *defect = (m - m.transpose()).cwiseAbs().maxCoeff();
    return Eigen::MatrixXd(0.5 * (m + m.transpose()));
  };
  HessianResult out;
  out.matrix = build(h, &out.symmetry_defect);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(build(h / 2, nullptr), Eigen::EigenvaluesOnly);
  out.richardson_gap = (es2.eigenvalues() - ev).cwiseAbs().maxCoeff();
  const double scale = ev.cwiseAbs().maxCoeff();
  bool degenerate = scale == 0.0;
  for (double l : out.eigenvalues) {
    if (std::abs(l) < kDegeneracyRatio * scale) degenerate = true;
    if (l > 0) ++out.n_plus;
    if (l < 0) ++out.n_minus;
  }
  if (degenerate) throw Error(ErrorKind::DegenerateHessian, "Hessian has an eigenvalue below the degeneracy threshold");
  return out;
}

HessianResult hessian_signature(const SiegelPoint& b, const TruncationPolicy& policy, double h) {
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "hessian_signature requires genus 2");
  return hessian_from_gradient([&](const std::vector<double>& v) { return big_f_grad_vec(v, policy); },
                               to_vec(b.coords()), h);
}

CriticalPointRecord refine_critical(const SiegelPoint& start, const TruncationPolicy& policy,
                                    const NelderMeadOptions& options) {
  if (!(big_f(start, policy) > 0.0)) throw Error(ErrorKind::DegenerateValue, "F vanishes at the start point");
  auto objective = [&](const std::vector<double>& v) {
    try {
      const auto g = grad_big_f(SiegelPoint::from_coords(to_coords(v)), policy);
      double s = 0.0;
      for (double e : g) s += e * e;
      return s;
    } catch (const Error&) {
      return kInf;
    }
  };
  NelderMeadOptions o = options;
  if (!std::isfinite(o.ftol)) o.ftol = 1e-26;
  const NelderMeadResult nm = minimize_with_restarts(objective, to_vec(start.coords()), o);
  if (!std::isfinite(nm.value)) throw Error(ErrorKind::EscapedDomain, "every simplex vertex left Im B > 0");

  std::vector<double> x = nm.x;
  try {
    x = newton_polish([&](const std::vector<double>& v) { return big_f_grad_vec(v, policy); }, x);
  } catch (const Error&) {
  }
  const SiegelPoint p = [&] {
    try {
      return SiegelPoint::from_coords(to_coords(x));
    } catch (const Error&) {
      throw Error(ErrorKind::EscapedDomain, "refined point left Im B > 0");
    }
  }();
  CriticalPointRecord rec{.b = p};
  const ValueGradient vg = big_f_with_gradient(p, policy);
  rec.f_value = vg.value;
  rec.grad_norm = norm({vg.grad.begin(), vg.grad.end()});
  rec.evaluations = nm.evaluations;
  if (rec.f_value < 1e-6) throw Error(ErrorKind::DegenerateValue, "refinement ran into the degenerate locus");
  if (!(rec.grad_norm < kConvergedGradient))
    throw Error(ErrorKind::NoConvergence, "gradient norm " + std::to_string(rec.grad_norm) + " after " +
                                              std::to_string(nm.evaluations) + " evaluations");
  try {
    const HessianResult h = hessian_signature(p, policy);
    std::copy(h.eigenvalues.begin(), h.eigenvalues.end(), rec.hessian_eigenvalues.begin());
    rec.n_plus = h.n_plus;
    rec.n_minus = h.n_minus;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateHessian) throw;
    rec.degenerate_hessian = true;
  }
  rec.label = classify(rec);
  if (rec.label != CriticalLabel::Unknown) rec.witness = siegel_equivalent(rec.b, label_reference(rec.label)).witness;
  return rec;
}

SiegelPoint label_reference(CriticalLabel l) {
  switch (l) {
    case CriticalLabel::Burnside: return reference_curve(CurveName::Burnside).period_matrix;
    case CriticalLabel::D6: return reference_curve(CurveName::D6).period_matrix;
    case CriticalLabel::Z5: return reference_curve(CurveName::Z5).period_matrix;
    case CriticalLabel::D3extremal: return embed_d3(d3_extremal_sigma());
    case CriticalLabel::Unknown: break;
  }
  throw Error(ErrorKind::InvalidArgument, "no reference point for label unknown");
}

CriticalLabel classify(const CriticalPointRecord& record) {
  if (!(record.grad_norm < 1e-8)) return CriticalLabel::Unknown;
  for (auto l : {CriticalLabel::Burnside, CriticalLabel::D6, CriticalLabel::Z5, CriticalLabel::D3extremal}) {
    const SiegelPoint ref = label_reference(l);
    const double fr = big_f(ref);
    if (std::abs(record.f_value - fr) > 1e-6 * fr) continue;
    if (siegel_equivalent(record.b, ref).equivalent) return l;
  }
  return CriticalLabel::Unknown;
}

FullScanResult full_scan(const std::vector<GridSpec>& grids, const TruncationPolicy& policy,
                         const ScanOptions& options) {
  FullScanResult out;
  for (const auto& g : grids) {
    auto c = grid_scan(g, policy, options, &out.stats);
    out.candidates.insert(out.candidates.end(), c.begin(), c.end());
  }
  std::vector<std::optional<CriticalPointRecord>> refined(out.candidates.size());
  std::vector<std::string> errors(out.candidates.size());
  parallel_for(static_cast<int>(out.candidates.size()), options.workers, [&](int i) {
    try {
      refined[i] = refine_critical(out.candidates[i].point, policy);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  auto add_unique = [&](CriticalPointRecord rec) {
    for (const auto& r : out.records)
      if (coords_gap(r.b, rec.b) < 1e-6) return;
    out.records.push_back(std::move(rec));
  };
  for (std::size_t i = 0; i < refined.size(); ++i) {
    if (!refined[i]) {
      out.failures.push_back(errors[i]);
      continue;
    }
    add_unique(*refined[i]);
  }
  const std::size_t direct = out.records.size();
  for (std::size_t i = 0; i < direct; ++i) {
    if (std::abs(out.records[i].b.coords()[2]) < 1e-9) continue;
    CriticalPointRecord m = out.records[i];
    m.b = m.b.reflected();
    m.mirrored = true;
    if (m.label != CriticalLabel::Unknown) m.witness = siegel_equivalent(m.b, label_reference(m.label)).witness;
    add_unique(std::move(m));
  }
  std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
    if (a.f_value != b.f_value) return a.f_value > b.f_value;
    return a.b.coords() < b.b.coords();
  });
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    const auto& r = out.records[i];
    bool placed = false;
    for (auto& c : out.classes) {
      const auto& rep = out.records[c.members.front()];
      const bool same = r.label != CriticalLabel::Unknown ? r.label == c.label
                                                          : c.label == CriticalLabel::Unknown &&
                                                                siegel_equivalent(r.b, rep.b).equivalent;
      if (same) {
        c.members.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) out.classes.push_back({r.label, {i}, r.f_value, r.n_plus, r.n_minus});
  }
  return out;
}

// ------------------------------------------------------------------ strata

SiegelPoint StrataCriticalRecord::embedded() const {
  switch (family) {
    case StrataFamily::Z2: return embed_z2(x(), y());
    case StrataFamily::D2: return embed_d2(x());
    case StrataFamily::D3: return embed_d3(x());
  }
  throw Error(ErrorKind::InvalidArgument, "unknown family");
}

namespace {

struct StrataEval {
  double value;
  std::vector<double> grad;
};

StrataEval strata_eval(StrataFamily family, const std::vector<double>& v, const TruncationPolicy& policy) {
  switch (family) {
    case StrataFamily::Z2: {
      const auto r = f_z2_with_gradient({v[0], v[1]}, {v[2], v[3]}, policy);
      return {r.value, {r.grad.begin(), r.grad.end()}};
    }
    case StrataFamily::D2: {
      const auto r = f_d2_with_gradient({v[0], v[1]}, policy);
      return {r.value, {r.grad.begin(), r.grad.end()}};
    }
    case StrataFamily::D3: {
      const auto r = f_d3_with_gradient({v[0], v[1]}, policy);
      return {r.value, {r.grad.begin(), r.grad.end()}};
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown family");
}

Genus1Group strata_group(StrataFamily f) { return f == StrataFamily::D2 ? Genus1Group::Gamma02Plus : Genus1Group::Gamma03Plus; }

// Distance by which sigma violates a genus-one domain (0 inside).
bool outside_by(cplx s, Genus1Group g, double tol) { return !genus1_membership(s, g, tol).inside; }

std::vector<double> canonicalize_strata(StrataFamily family, std::vector<double> v) {
  constexpr double tol = 1e-8;
  if (family == StrataFamily::Z2) {
    cplx x{v[0], v[1]}, y{v[2], v[3]};
    if (!outside_by(x, Genus1Group::Gamma, tol) && !outside_by(y, Genus1Group::Gamma2, tol)) return v;
    auto [x1, g1] = genus1_reduce(x, Genus1Group::Gamma);
    const cplx y1 = g1.apply(y);
    const cplx y2 = genus1_reduce(y1, Genus1Group::Gamma2).first;
    return {x1.real(), x1.imag(), y2.real(), y2.imag()};
  }
  const cplx s{v[0], v[1]};
  const Genus1Group g = strata_group(family);
  if (!outside_by(s, g, tol)) return v;
  const cplx r = genus1_reduce(s, g).first;
  return {r.real(), r.imag()};
}

CriticalLabel label_strata_point(const SiegelPoint& b, double f_value) {
  CriticalPointRecord rec{.b = b};
  rec.f_value = f_value;
  rec.grad_norm = 0.0;
  return classify(rec);
}

StrataCriticalRecord refine_strata(StrataFamily family, const std::vector<double>& start, const TruncationPolicy& policy) {
  auto grad = [&](const std::vector<double>& v) { return strata_eval(family, v, policy).grad; };
  auto objective = [&](const std::vector<double>& v) {
    try {
      const auto g = grad(v);
      double s = 0.0;
      for (double e : g) s += e * e;
      return s;
    } catch (const Error&) {
      return kInf;
    }
  };
  NelderMeadOptions o;
  o.ftol = 1e-26;
  const NelderMeadResult nm = minimize_with_restarts(objective, start, o);
  if (!std::isfinite(nm.value)) throw Error(ErrorKind::EscapedDomain, "simplex left the upper half-plane");
  std::vector<double> x = nm.x;
  try {
    x = newton_polish(grad, x);
  } catch (const Error&) {
  }
  StrataCriticalRecord rec{.family = family, .coords = x};
  const StrataEval ev = strata_eval(family, x, policy);
  rec.f_value = ev.value;
  rec.grad_norm = norm(ev.grad);
  if (rec.f_value < 1e-6) throw Error(ErrorKind::DegenerateValue, "refinement ran into the degenerate locus");
  if (!(rec.grad_norm < kConvergedGradient))
    throw Error(ErrorKind::NoConvergence, "strata gradient norm " + std::to_string(rec.grad_norm));
  rec.coords = canonicalize_strata(family, x);
  try {
    const HessianResult h = hessian_from_gradient(grad, rec.coords);
    rec.hessian_eigenvalues = h.eigenvalues;
    rec.n_plus = h.n_plus;
    rec.n_minus = h.n_minus;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateHessian) throw;
    rec.degenerate_hessian = true;
  }
  rec.label = label_strata_point(rec.embedded(), rec.f_value);
  return rec;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Indices of nodes that are strict-or-equal local minima of `val` over the existing axis neighbors.
template <std::size_t D>
std::vector<std::array<int, D>> grid_local_minima(const std::array<int, D>& dims,
                                                  const std::function<float(const std::array<int, D>&)>& val) {
  std::vector<std::array<int, D>> out;
  std::array<int, D> idx{};
  long long total = 1;
  for (int d : dims) total *= d;
  for (long long flat = 0; flat < total; ++flat) {
    long long rem = flat;
    for (int k = static_cast<int>(D) - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % dims[k]);
      rem /= dims[k];
    }
    const float v = val(idx);
    if (!std::isfinite(v)) continue;
    bool is_min = true;
    for (std::size_t k = 0; k < D && is_min; ++k)
      for (int s : {-1, 1}) {
        auto nb = idx;
        nb[k] += s;
        if (nb[k] < 0 || nb[k] >= dims[k]) continue;
        const float w = val(nb);
        if (std::isfinite(w) && w < v) {
          is_min = false;
          break;
        }
      }
    if (is_min) out.push_back(idx);
  }
  return out;
}

}  // namespace

std::vector<StrataCriticalRecord> strata_search(StrataFamily family, int resolution, const TruncationPolicy& policy,
                                                const StrataSearchOptions& options) {
  if (resolution < 2) throw Error(ErrorKind::InvalidArgument, "resolution must be >= 2");
  policy.validate();
  const int n = resolution;
  const double ymax = options.y_max;
  std::vector<std::vector<double>> starts;

  if (family == StrataFamily::Z2) {
    const auto xr = linspace(-0.5, 0.5, n), xi = linspace(kSqrt3Half, ymax, n);
    const auto yr = linspace(-1.0, 1.0, n), yi = linspace(ymax / n, ymax, n);
    std::vector<std::optional<Z2Factor>> fx(n * n), fy(n * n);
    parallel_for(n, options.workers, [&](int a) {
      for (int b = 0; b < n; ++b) {
        const cplx x{xr[a], xi[b]}, y{yr[a], yi[b]};
        try {
          if (genus1_membership(x, Genus1Group::Gamma, 1e-12).inside) fx[a * n + b] = z2_factor(x, policy);
        } catch (const Error&) {
        }
        try {
          if (genus1_membership(y, Genus1Group::Gamma2, 1e-12).inside) fy[a * n + b] = z2_factor(y, policy);
        } catch (const Error&) {
        }
      }
    });
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::vector<float> grid(static_cast<std::size_t>(n) * n * n * n, nan);
    auto flat = [n](const std::array<int, 4>& i) {
      return ((static_cast<std::size_t>(i[0]) * n + i[1]) * n + i[2]) * n + i[3];
    };
    parallel_for(n, options.workers, [&](int a) {
      for (int b = 0; b < n; ++b) {
        if (!fx[a * n + b]) continue;
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            if (!fy[c * n + d]) continue;
            const auto r = f_z2_combine(*fx[a * n + b], *fy[c * n + d]);
            if (!(r.value > 1e-300)) continue;
            double g = 0.0;
            for (double e : r.grad) g += e * e;
            grid[flat({a, b, c, d})] = static_cast<float>(std::sqrt(g) / r.value);
          }
      }
    });
    const auto minima =
        grid_local_minima<4>({n, n, n, n}, [&](const std::array<int, 4>& i) { return grid[flat(i)]; });
    for (const auto& m : minima) starts.push_back({xr[m[0]], xi[m[1]], yr[m[2]], yi[m[3]]});
  } else {
    const Genus1Group g = strata_group(family);
    const double lo = family == StrataFamily::D2 ? 0.5 : 0.5 / std::sqrt(3.0);
    const auto re = linspace(0.0, 1.0, n), im = linspace(lo, ymax, n);
    std::vector<float> grid(static_cast<std::size_t>(n) * n, std::numeric_limits<float>::quiet_NaN());
    parallel_for(n, options.workers, [&](int a) {
      for (int b = 0; b < n; ++b) {
        const cplx s{re[a], im[b]};
        if (!genus1_membership(s, g, 1e-12).inside) continue;
        try {
          const StrataEval ev = strata_eval(family, {s.real(), s.imag()}, policy);
          if (ev.value > 1e-300) grid[a * n + b] = static_cast<float>(norm(ev.grad) / ev.value);
        } catch (const Error&) {
        }
      }
    });
    const auto minima = grid_local_minima<2>({n, n}, [&](const std::array<int, 2>& i) { return grid[i[0] * n + i[1]]; });
    for (const auto& m : minima) starts.push_back({re[m[0]], im[m[1]]});
  }

  std::vector<std::optional<StrataCriticalRecord>> refined(starts.size());
  parallel_for(static_cast<int>(starts.size()), options.workers, [&](int i) {
    try {
      refined[i] = refine_strata(family, starts[i], policy);
    } catch (const Error&) {
    }
  });
  std::vector<StrataCriticalRecord> out;
  for (auto& r : refined) {
    if (!r) continue;
    bool dup = false;
    for (const auto& o : out)
      if (max_norm_gap(o.coords, r->coords) < options.dedupe_tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(*r));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.f_value - b.f_value) > 1e-12) return a.f_value > b.f_value;
    return a.coords < b.coords;
  });
  return out;
}

// ------------------------------------------------------------------ genus one

Strata1ValueGradient small_f_with_gradient(cplx sigma) {
  if (!(sigma.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must have Im > 0");
  const double f = small_f(sigma);
  const cplx l = dedekind_eta_log_derivative(sigma);
  // log f = log(Im)/2 + 2 Re log eta
  return {f, {f * 2.0 * l.real(), f * (0.5 / sigma.imag() - 2.0 * l.imag())}};
}

std::vector<Genus1CriticalPoint> genus1_critical_points(int resolution, double y_max) {
  if (resolution < 2) throw Error(ErrorKind::InvalidArgument, "resolution must be >= 2");
  const int n = resolution;
  const auto re = linspace(-0.5, 0.5, n), im = linspace(kSqrt3Half, y_max, n);
  std::vector<float> grid(static_cast<std::size_t>(n) * n, std::numeric_limits<float>::quiet_NaN());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const cplx s{re[a], im[b]};
      if (!genus1_membership(s, Genus1Group::Gamma, 1e-12).inside) continue;
      const auto vg = small_f_with_gradient(s);
      grid[a * n + b] = static_cast<float>(std::hypot(vg.grad[0], vg.grad[1]) / vg.value);
    }
  const auto minima = grid_local_minima<2>({n, n}, [&](const std::array<int, 2>& i) { return grid[i[0] * n + i[1]]; });
  auto grad = [](const std::vector<double>& v) {
    const auto vg = small_f_with_gradient({v[0], v[1]});
    return std::vector<double>{vg.grad[0], vg.grad[1]};
  };
  std::vector<Genus1CriticalPoint> out;
  for (const auto& m : minima) {
    std::vector<double> x;
    try {
      x = newton_polish(grad, {re[m[0]], im[m[1]]}, 40);
    } catch (const Error&) {
      continue;
    }
    const auto g = grad(x);
    if (!(norm(g) < 1e-12)) continue;
    cplx s{x[0], x[1]};
    if (!genus1_membership(s, Genus1Group::Gamma, 1e-8).inside) s = genus1_reduce(s, Genus1Group::Gamma).first;
    // Fold the boundary identifications onto Re >= 0.
    if (s.real() < -1e-12) {
      if (std::abs(s.real() + 0.5) < 1e-8)
        s += 1.0;
      else if (std::abs(std::abs(s) - 1.0) < 1e-8)
        s = -1.0 / s;
    }
    bool dup = false;
    for (const auto& o : out)
      if (std::abs(o.sigma - s) < 1e-6) dup = true;
    if (dup) continue;
    Genus1CriticalPoint p{s, small_f(s), norm(grad({s.real(), s.imag()})), 0, 0};
    try {
      const auto h = hessian_from_gradient(grad, {s.real(), s.imag()});
      p.n_plus = h.n_plus;
      p.n_minus = h.n_minus;
    } catch (const Error&) {
    }
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.f_value > b.f_value; });
  return out;
}

}  // namespace modcrit
