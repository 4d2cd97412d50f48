#include "cli_commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "modcrit/curves_euler.hpp"
#include "modcrit/functional.hpp"
#include "modcrit/modular.hpp"
#include "modcrit/search.hpp"
#include "modcrit/stationarity.hpp"
#include "modcrit/strata.hpp"

namespace modcrit::cli {

namespace {

double parse_real(const std::string& s, const std::string& whole) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw UsageError("cannot parse complex number '" + whole + "'");
  return v;
}

json num(double v) { return format_double(v); }
json num(cplx z) { return format_complex(z); }

template <typename Range>
json num_array(const Range& r) {
  json a = json::array();
  for (const auto& v : r) a.push_back(num(v));
  return a;
}

json matrix_json(const SiegelPoint& b) {
  json a = json::array();
  for (int i = 0; i < b.genus(); ++i)
    for (int j = i; j < b.genus(); ++j) a.push_back(num(b(i, j)));
  return a;
}

json transform_json(const SymplecticTransform& t) {
  json rows = json::array();
  const auto& m = t.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json verdict_json(const DomainVerdict& v) {
  json ids = json::array();
  for (const auto& c : v.violated) ids.push_back(c.id == 0 ? json(c.name) : json(c.id));
  return {{"inside", v.inside}, {"violated", ids}};
}

double norm_of(const auto& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

std::vector<cplx> parse_matrix_entries(const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  return out;
}

SiegelPoint make_point(const std::vector<cplx>& entries) {
  if (entries.size() == 3) return SiegelPoint::make(2, entries);
  if (entries.size() == 6) return SiegelPoint::make(3, entries);
  throw UsageError("a matrix needs 3 (genus 2) or 6 (genus 3) upper-triangle entries");
}

SiegelPoint read_report_point(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open '" + path + "'");
  json report;
  try {
    report = json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError("cannot parse report '" + path + "': " + e.what());
  }
  if (!report.contains("results") || !report["results"].is_array())
    throw UsageError("report '" + path + "' has no results array");
  for (const auto& r : report["results"]) {
    if (!r.is_object() || !r.contains("matrix")) continue;
    std::vector<cplx> entries;
    for (const auto& e : r["matrix"]) entries.push_back(parse_complex(e.get<std::string>()));
    return make_point(entries);
  }
  throw UsageError("report '" + path + "' has no result with a matrix");
}

SiegelPoint curve_point(const std::string& name) {
  if (name == "d3x") return d3_extremal_matrix(true);
  try {
    return reference_curve(parse_curve_name(name)).period_matrix;
  } catch (const Error&) {
    throw UsageError("unknown curve '" + name + "' (burnside, d6, z5, d3x, klein)");
  }
}

SiegelPoint input_point(const RunConfig& c) {
  const int given = int(c.b1) + int(!c.curve.empty()) + int(!c.point.empty()) + int(!c.matrix.empty()) +
                    int(!c.in.empty());
  if (given > 1) throw UsageError("give only one of --b1, --curve, --point, --matrix, --in");
  if (c.b1) return reference_curve(CurveName::Burnside).period_matrix;
  if (!c.curve.empty()) return curve_point(c.curve);
  if (!c.point.empty()) {
    for (const auto& p : critical_representatives())
      if (p.name == c.point) return p.point;
    throw UsageError("unknown point '" + c.point + "'");
  }
  if (!c.matrix.empty()) return make_point(parse_matrix_entries(c.matrix));
  if (!c.in.empty()) return read_report_point(c.in);
  if (c.d2) return embed_d2(parse_complex(c.sigma));
  if (c.d3) return embed_d3(parse_complex(c.sigma));
  if (c.z2) return embed_z2(parse_complex(c.x), parse_complex(c.y));
  throw UsageError("no period matrix given (use --b1, --curve, --point, --matrix or --in)");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

Genus1Group group_of(const RunConfig& c) {
  try {
    return parse_genus1_group(c.group);
  } catch (const Error&) {
    throw UsageError("unknown group '" + c.group + "'");
  }
}

json record_json(const CriticalPointRecord& r) {
  json o;
  o["kind"] = "critical_point";
  o["matrix"] = matrix_json(r.b);
  o["coords"] = num_array(r.b.coords());
  o["f_value"] = num(r.f_value);
  o["grad_norm"] = num(r.grad_norm);
  o["eigenvalues"] = num_array(r.hessian_eigenvalues);
  o["signature"] = json::array({r.n_plus, r.n_minus});
  o["degenerate_hessian"] = r.degenerate_hessian;
  o["label"] = to_string(r.label);
  o["witness"] = r.witness ? transform_json(*r.witness) : json(nullptr);
  o["mirrored"] = r.mirrored;
  return o;
}

json cmd_eval(const RunConfig& c, const TruncationPolicy& policy) {
  json o;
  if (c.genus1) {
    require(!c.sigma.empty(), "eval --genus1 needs --sigma");
    const cplx s = parse_complex(c.sigma);
    if (s.imag() <= 0) throw Error(ErrorKind::NotPositiveDefinite, "Im sigma must be positive");
    const auto vg = small_f_with_gradient(s);
    o["kind"] = "genus1";
    o["sigma"] = num(s);
    o["f"] = num(vg.value);
    o["grad_norm"] = num(norm_of(vg.grad));
    o["j"] = num(j_invariant(s, policy));
    o["domain"] = verdict_json(genus1_membership(s, group_of(c)));
    return json::array({o});
  }
  if (c.d2 || c.d3) {
    require(!c.sigma.empty(), "eval --d2/--d3 needs --sigma");
    require(!(c.d2 && c.d3), "give only one of --d2, --d3");
    const cplx s = parse_complex(c.sigma);
    const auto vg = c.d2 ? f_d2_with_gradient(s, policy) : f_d3_with_gradient(s, policy);
    o["kind"] = c.d2 ? "d2" : "d3";
    o["sigma"] = num(s);
    o["f"] = num(vg.value);
    o["grad_norm"] = num(norm_of(vg.grad));
    o["domain"] = verdict_json(genus1_membership(s, c.d2 ? Genus1Group::Gamma02Plus : Genus1Group::Gamma03Plus));
    o["matrix"] = matrix_json(c.d2 ? embed_d2(s) : embed_d3(s));
    return json::array({o});
  }
  if (c.z2) {
    require(!c.x.empty() && !c.y.empty(), "eval --z2 needs --x and --y");
    const cplx x = parse_complex(c.x), y = parse_complex(c.y);
    const auto vg = f_z2_with_gradient(x, y, policy);
    const auto vx = genus1_membership(x, Genus1Group::Gamma), vy = genus1_membership(y, Genus1Group::Gamma2);
    o["kind"] = "z2";
    o["x"] = num(x);
    o["y"] = num(y);
    o["f"] = num(vg.value);
    o["grad_norm"] = num(norm_of(vg.grad));
    o["domain"] = {{"inside", vx.inside && vy.inside}, {"x", verdict_json(vx)}, {"y", verdict_json(vy)}};
    o["matrix"] = matrix_json(embed_z2(x, y));
    return json::array({o});
  }
  const SiegelPoint b = input_point(c);
  if (b.genus() != 2) throw Error(ErrorKind::InvalidArgument, "eval of F needs a genus-two matrix");
  const auto vg = big_f_with_gradient(b, policy);
  o["kind"] = "genus2";
  o["matrix"] = matrix_json(b);
  o["f"] = num(vg.value);
  o["gradient"] = num_array(vg.grad);
  o["grad_norm"] = num(norm_of(vg.grad));
  o["domain"] = verdict_json(gottschling_membership(b));
  return json::array({o});
}

std::vector<GridSpec> seed_boxes(const RunConfig& c) {
  std::vector<GridSpec> grids;
  for (const char* name : {"burnextr", "B2", "Z5extr-b", "D3extr-plus"})
    for (const auto& p : critical_representatives())
      if (p.name == name) grids.push_back(GridSpec::box_around(p.point, c.box_half, c.box_points, c.ymax));
  return grids;
}

json cmd_scan(const RunConfig& c, const TruncationPolicy& policy) {
  std::vector<GridSpec> grids;
  GridSpec full;
  full.points_per_axis = c.resolution > 0 ? c.resolution : 40;
  full.y_max = c.ymax;
  grids.push_back(full);
  if (c.seed_boxes)
    for (auto& g : seed_boxes(c)) grids.push_back(g);
  ScanOptions opts;
  opts.workers = c.workers;
  opts.max_candidates = static_cast<std::size_t>(c.max_candidates);
  const FullScanResult r = full_scan(grids, policy, opts);
  json results = json::array();
  for (const auto& cls : r.classes) {
    json o;
    o["kind"] = "class";
    o["label"] = to_string(cls.label);
    o["f_value"] = num(cls.f_value);
    o["signature"] = json::array({cls.n_plus, cls.n_minus});
    o["member_count"] = cls.members.size();
    json members = json::array();
    for (std::size_t i : cls.members) members.push_back(record_json(r.records[i]));
    o["members"] = members;
    results.push_back(o);
  }
  json summary;
  summary["kind"] = "summary";
  summary["classes"] = r.classes.size();
  summary["candidates"] = r.candidates.size();
  summary["records"] = r.records.size();
  summary["nodes"] = r.stats.nodes;
  summary["inside"] = r.stats.inside;
  summary["evaluated"] = r.stats.evaluated;
  summary["failures"] = r.failures;
  results.push_back(summary);
  return results;
}

json cmd_minimize(const RunConfig& c, const TruncationPolicy& policy) {
  NelderMeadOptions opts;
  if (c.tol > 0) opts.xtol = c.tol;
  return json::array({record_json(refine_critical(input_point(c), policy, opts))});
}

json cmd_hessian(const RunConfig& c, const TruncationPolicy& policy) {
  const SiegelPoint b = input_point(c);
  json results = json::array();
  for (double h : c.steps) {
    require(h > 0, "--step must be positive");
    json o;
    o["kind"] = "hessian";
    o["matrix"] = matrix_json(b);
    o["step"] = num(h);
    try {
      const HessianResult r = hessian_signature(b, policy, h);
      o["eigenvalues"] = num_array(r.eigenvalues);
      o["signature"] = json::array({r.n_plus, r.n_minus});
      o["symmetry_defect"] = num(r.symmetry_defect);
      o["richardson_gap"] = num(r.richardson_gap);
      o["degenerate"] = false;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateHessian) throw;
      o["degenerate"] = true;
      o["message"] = e.what();
    }
    results.push_back(o);
  }
  return results;
}

json stationarity_json(const std::string& name, const SymplecticTransform& t, const StationarityReport& r, double tol) {
  json o;
  o["kind"] = "stabilizer";
  o["curve"] = name;
  o["transform"] = transform_json(t);
  o["spectrum"] = num_array(r.spectrum);
  o["distance_to_one"] = num(r.distance_to_one);
  o["contains_one"] = r.distance_to_one <= tol;
  o["unitary_defect"] = num(r.unitary_defect);
  o["off_diagonal_defect"] = num(r.off_diagonal_defect);
  o["transpose_defect"] = num(r.transpose_defect);
  return o;
}

json cmd_verify_stationary(const RunConfig& c) {
  require(!c.curve.empty(), "verify-stationary needs --curve");
  const double tol = c.tol > 0 ? c.tol : kContainsOneTolerance;
  SiegelPoint b = curve_point(c.curve);
  std::vector<SymplecticTransform> stabilizers;
  if (c.curve == "d3x")
    stabilizers = bolza_family(FamilyName::D3).stabilizer_transforms;
  else
    stabilizers = reference_curve(parse_curve_name(c.curve)).stabilizers;
  json results = json::array();
  bool forced = false;
  for (const auto& t : stabilizers) {
    json o = stationarity_json(c.curve, t, verify_stationary(b, t), tol);
    forced = forced || !o["contains_one"].get<bool>();
    results.push_back(o);
  }
  results.push_back({{"kind", "summary"}, {"curve", c.curve}, {"matrix", matrix_json(b)}, {"stationary_forced", forced}});
  return results;
}

json cmd_klein_check(const RunConfig& c) {
  const ReferenceCurve k = reference_curve(CurveName::Klein);
  const StationarityReport r = verify_stationary(k.period_matrix, k.stabilizer);
  json o = stationarity_json("klein", k.stabilizer, r, c.tol > 0 ? c.tol : kContainsOneTolerance);
  o["margin_above_half"] = r.distance_to_one > 0.5;
  o["fixes_matrix_gap"] = num(apply_symplectic(k.stabilizer, k.period_matrix).max_abs_diff(k.period_matrix));
  return json::array({o});
}

json cmd_reduce(const RunConfig& c, const TruncationPolicy& policy) {
  json o;
  if (c.genus1) {
    require(!c.sigma.empty(), "reduce --genus1 needs --sigma");
    const cplx s = parse_complex(c.sigma);
    const Genus1Group g = group_of(c);
    const auto [reduced, gamma] = genus1_reduce(s, g);
    o["kind"] = "genus1";
    o["group"] = to_string(g);
    o["sigma"] = num(s);
    o["reduced"] = num(reduced);
    o["transform"] = gamma.to_string();
    return json::array({o});
  }
  const SiegelPoint b = input_point(c);
  const Reduction r = reduce_to_gottschling(b);
  o["kind"] = "genus2";
  o["input"] = matrix_json(b);
  o["matrix"] = matrix_json(r.point);
  o["transform"] = transform_json(r.transform);
  o["iterations"] = r.iterations;
  o["f_input"] = num(big_f(b, policy));
  o["f_reduced"] = num(big_f(r.point, policy));
  o["domain"] = verdict_json(gottschling_membership(r.point));
  return json::array({o});
}

json cmd_strata_scan(const RunConfig& c, const TruncationPolicy& policy) {
  json results = json::array();
  if (c.genus1) {
    for (const auto& p : genus1_critical_points(c.resolution > 0 ? c.resolution : 60, c.ymax > 2 ? c.ymax : 3.0)) {
      results.push_back({{"kind", "genus1"},
                         {"sigma", num(p.sigma)},
                         {"f_value", num(p.f_value)},
                         {"grad_norm", num(p.grad_norm)},
                         {"signature", json::array({p.n_plus, p.n_minus})},
                         {"j", num(j_invariant(p.sigma, policy))}});
    }
    return results;
  }
  require(!c.family.empty(), "strata-scan needs --family or --genus1");
  StrataFamily family;
  try {
    family = parse_strata_family(c.family);
  } catch (const Error&) {
    throw UsageError("unknown family '" + c.family + "' (z2, d2, d3)");
  }
  StrataSearchOptions opts;
  opts.y_max = c.ymax;
  opts.workers = c.workers;
  if (c.tol > 0) opts.dedupe_tol = c.tol;
  const int res = c.resolution > 0 ? c.resolution : (family == StrataFamily::Z2 ? 40 : 200);
  for (const auto& r : strata_search(family, res, policy, opts)) {
    json o;
    o["kind"] = "strata_critical_point";
    o["family"] = to_string(r.family);
    o["x"] = num(r.x());
    if (family == StrataFamily::Z2) o["y"] = num(r.y());
    o["matrix"] = matrix_json(r.embedded());
    o["f_value"] = num(r.f_value);
    o["grad_norm"] = num(r.grad_norm);
    o["eigenvalues"] = num_array(r.hessian_eigenvalues);
    o["signature"] = json::array({r.n_plus, r.n_minus});
    o["degenerate_hessian"] = r.degenerate_hessian;
    o["label"] = to_string(r.label);
    results.push_back(o);
  }
  return results;
}

json mass_entry(const std::string& space, const std::vector<MassTerm>& terms, bool doubled) {
  json t = json::array();
  for (const auto& m : terms) t.push_back({{"label", m.label}, {"index", m.index}, {"order", m.stabilizer_order}});
  return {{"kind", "mass"}, {"space", space}, {"value", mass_formula(terms, doubled).to_string()}, {"doubled", doubled},
          {"terms", t}};
}

json cmd_mass(const RunConfig& c) {
  const std::string space = c.family.empty() ? c.space : c.family;
  json results = json::array();
  auto add = [&](const std::string& s) {
    if (s == "full") {
      json o = mass_entry("full", full_space_mass_terms(), true);
      o["fourth_point_forced"] = fourth_point_forced();
      results.push_back(o);
    } else if (s == "genus1") {
      results.push_back(mass_entry("genus1", genus1_mass_terms(), true));
    } else if (s == "z2" || s == "d2" || s == "d3") {
      results.push_back(mass_entry(s, strata_mass_terms(parse_strata_family(s)), false));
    } else {
      throw UsageError("unknown space '" + s + "' (full, genus1, z2, d2, d3, all)");
    }
  };
  if (space == "all")
    for (const char* s : {"full", "genus1", "z2", "d2", "d3"}) add(s);
  else
    add(space);
  return results;
}

json cmd_rosenhain(const RunConfig& c, const TruncationPolicy& policy) {
  const SiegelPoint b = input_point(c);
  const BranchPointSet s = rosenhain_branch_points(b, policy);
  json o;
  o["kind"] = "branch_points";
  o["matrix"] = matrix_json(b);
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back(p.to_string());
  o["branch_points"] = pts;
  try {
    const D3Match m = match_d3_normal_form(s);
    o["d3_match"] = {{"r", num(m.r)},
                     {"r_inverse", num(m.r_inverse)},
                     {"residual", num(m.residual)},
                     {"imag_residual", num(m.imag_residual)}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoD3Structure) throw;
    o["d3_match"] = nullptr;
  }
  return json::array({o});
}

json cmd_plot_data(const RunConfig& c, const TruncationPolicy& policy) {
  const int n = c.resolution > 0 ? c.resolution : 100;
  const std::string& fig = c.figure;
  double re_lo, re_hi, im_lo;
  Genus1Group group;
  if (fig == "omega" || fig == "j") {
    re_lo = -0.5, re_hi = 0.5, im_lo = std::sqrt(3.0) / 2.0, group = Genus1Group::Gamma;
  } else if (fig == "d2") {
    re_lo = 0.0, re_hi = 1.0, im_lo = 0.5, group = Genus1Group::Gamma02Plus;
  } else if (fig == "d3") {
    re_lo = 0.0, re_hi = 1.0, im_lo = 0.5 / std::sqrt(3.0), group = Genus1Group::Gamma03Plus;
  } else {
    throw UsageError("unknown figure '" + fig + "' (omega, j, d2, d3)");
  }
  json rows = json::array();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const cplx s(re_lo + (re_hi - re_lo) * i / (n - 1), im_lo + (c.ymax - im_lo) * k / (n - 1));
      if (!genus1_membership(s, group, 1e-12).inside) continue;
      json o;
      o["re"] = num(s.real());
      o["im"] = num(s.imag());
      Strata1ValueGradient vg{};
      if (fig == "omega" || fig == "j")
        vg = small_f_with_gradient(s);
      else
        vg = fig == "d2" ? f_d2_with_gradient(s, policy) : f_d3_with_gradient(s, policy);
      if (fig == "j") {
        const cplx j = j_invariant(s, policy);
        o["j_re"] = num(j.real());
        o["j_im"] = num(j.imag());
      }
      o["f"] = num(vg.value);
      o["grad_norm"] = num(norm_of(vg.grad));
      rows.push_back(o);
    }
  }
  return rows;
}

void flatten(const std::string& prefix, const json& v, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value(), out);
    return;
  }
  std::string cell;
  if (v.is_string())
    cell = v.get<std::string>();
  else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) cell += ';';
      cell += v[i].is_string() ? v[i].get<std::string>() : v[i].dump();
    }
  } else {
    cell = v.dump();
  }
  out.emplace_back(prefix, cell);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

}  // namespace

TruncationPolicy RunConfig::policy() const {
  if (trunc == "adaptive") return TruncationPolicy::adaptive(tail_tol);
  int n = 0;
  auto [ptr, ec] = std::from_chars(trunc.data(), trunc.data() + trunc.size(), n);
  if (ec != std::errc() || ptr != trunc.data() + trunc.size() || n < 1)
    throw UsageError("--trunc takes a positive integer or 'adaptive'");
  return TruncationPolicy::fixed(n);
}

void RunConfig::validate() const {
  if (format != "json" && format != "csv") throw UsageError("--format must be json or csv");
  if (resolution < 0 || resolution == 1) throw UsageError("--resolution must be at least 2");
  if (!(ymax > 0)) throw UsageError("--ymax must be positive");
  if (!(tail_tol > 0)) throw UsageError("--tail-tol must be positive");
  if (tol < 0) throw UsageError("--tol must be positive");
  if (workers < 0) throw UsageError("--workers must be positive");
  if (box_points < 2 || !(box_half > 0)) throw UsageError("box parameters must be positive");
  if (max_candidates < 0) throw UsageError("--max-candidates must be positive");
  policy();
}

json RunConfig::to_json() const {
  json o;
  auto put_str = [&](const char* k, const std::string& v) {
    if (!v.empty()) o[k] = v;
  };
  if (b1) o["b1"] = true;
  put_str("curve", curve);
  put_str("point", point);
  put_str("matrix", matrix);
  put_str("in", in);
  if (genus1) o["genus1"] = true;
  if (z2) o["z2"] = true;
  if (d2) o["d2"] = true;
  if (d3) o["d3"] = true;
  put_str("sigma", sigma);
  put_str("x", x);
  put_str("y", y);
  o["group"] = group;
  o["resolution"] = resolution;
  o["ymax"] = num(ymax);
  o["trunc"] = trunc;
  o["tail_tol"] = num(tail_tol);
  o["tol"] = num(tol);
  o["workers"] = workers;
  o["format"] = format;
  put_str("family", family);
  o["space"] = space;
  o["figure"] = figure;
  o["steps"] = num_array(steps);
  o["seed_boxes"] = seed_boxes;
  o["box_points"] = box_points;
  o["box_half"] = num(box_half);
  o["max_candidates"] = max_candidates;
  return o;
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw UsageError("empty complex number");
  if (s.back() != 'i') return {parse_real(s, text), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  const std::string re = split == std::string::npos ? "" : body.substr(0, split);
  const std::string im = split == std::string::npos ? body : body.substr(split);
  double imag;
  if (im.empty() || im == "+")
    imag = 1.0;
  else if (im == "-")
    imag = -1.0;
  else
    imag = parse_real(im, text);
  return {re.empty() ? 0.0 : parse_real(re, text), imag};
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string format_complex(cplx z) {
  std::string re = format_double(z.real()), im = format_double(z.imag());
  if (im[0] != '-') im = "+" + im;
  return re + im + "i";
}

json run_command(const RunConfig& c) {
  c.validate();
  const TruncationPolicy policy = c.policy();
  const std::string& cmd = c.command;
  if (cmd == "eval") return cmd_eval(c, policy);
  if (cmd == "scan") return cmd_scan(c, policy);
  if (cmd == "minimize") return cmd_minimize(c, policy);
  if (cmd == "hessian") return cmd_hessian(c, policy);
  if (cmd == "verify-stationary") return cmd_verify_stationary(c);
  if (cmd == "reduce") return cmd_reduce(c, policy);
  if (cmd == "strata-scan") return cmd_strata_scan(c, policy);
  if (cmd == "mass") return cmd_mass(c);
  if (cmd == "rosenhain") return cmd_rosenhain(c, policy);
  if (cmd == "klein-check") return cmd_klein_check(c);
  if (cmd == "plot-data") return cmd_plot_data(c, policy);
  throw UsageError("unknown command '" + cmd + "'");
}

json make_report(const RunConfig& config, const json& results) {
  json r;
  r["command"] = config.command;
  r["config"] = config.to_json();
  r["results"] = results;
  r["version"] = kVersion;
  return r;
}

std::string to_csv(const RunConfig& config, const json& results) {
  std::vector<std::string> columns;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  for (const auto& r : results) {
    rows.emplace_back();
    flatten("", r, rows.back());
    for (const auto& [k, v] : rows.back())
      if (index.emplace(k, columns.size()).second) columns.push_back(k);
  }
  std::string out = "# modcrit " + config.command + " " + kVersion + " config=" + config.to_json().dump() + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_escape(columns[i]);
  out += "\n";
  for (const auto& row : rows) {
    std::vector<std::string> cells(columns.size());
    for (const auto& [k, v] : row) cells[index[k]] = v;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_escape(cells[i]);
    out += "\n";
  }
  return out;
}

int exit_code_for(ErrorKind kind) { return is_numerical_failure(kind) ? 4 : 3; }

}  // namespace modcrit::cli
