#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cli_commands.hpp"

using modcrit::cli::json;
using modcrit::cli::RunConfig;

namespace {

void add_common(CLI::App* s, RunConfig& c) {
  s->add_option("--resolution", c.resolution, "grid points per axis (0: command default)");
  s->add_option("--ymax", c.ymax, "upper bound on imaginary parts");
  s->add_option("--trunc", c.trunc, "lattice cutoff N or 'adaptive'");
  s->add_option("--tail-tol", c.tail_tol, "adaptive truncation tail tolerance");
  s->add_option("--tol", c.tol, "tolerance override (0: module default)");
  s->add_option("--workers", c.workers, "worker threads (0: available parallelism)");
  s->add_option("--format", c.format, "json or csv");
  s->add_option("--out", c.out, "output path (default stdout)");
}

void add_point(CLI::App* s, RunConfig& c) {
  s->add_flag("--b1", c.b1, "the Burnside matrix");
  s->add_option("--curve", c.curve, "burnside, d6, z5, d3x, klein");
  s->add_option("--point", c.point, "named critical representative (burnextr, B2, Z5extr-a, Z5extr-b, D3extr-plus, D3extr-minus)");
  s->add_option("--matrix", c.matrix, "upper triangle, comma separated: \"a+bi, c+di, e+fi\"");
  s->add_option("--in", c.in, "report whose first matrix is used");
}

void add_strata(CLI::App* s, RunConfig& c) {
  s->add_flag("--genus1", c.genus1, "genus-one modulus sigma");
  s->add_flag("--d2", c.d2, "D2 stratum coordinate sigma");
  s->add_flag("--d3", c.d3, "D3 stratum coordinate sigma");
  s->add_flag("--z2", c.z2, "Z2 stratum coordinates x, y");
  s->add_option("--sigma", c.sigma, "complex coordinate a+bi");
  s->add_option("--x", c.x, "Z2 coordinate x");
  s->add_option("--y", c.y, "Z2 coordinate y");
  s->add_option("--group", c.group, "gamma, gamma2, gamma0_2plus, gamma0_3plus");
}

void write_error(const std::string& kind, const std::string& message, int code) {
  json e;
  e["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  std::cout << e.dump(2) << "\n";
  std::cerr << "modcrit: " << message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Critical points of modular-invariant theta functionals in genus two"};
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "F (or the genus-one / strata functionals) with gradient norm and domain verdict");
  add_common(eval, c), add_point(eval, c), add_strata(eval, c);

  auto* scan = app.add_subcommand("scan", "grid scan, refinement and classification of critical points");
  add_common(scan, c);
  scan->add_flag("--seed-boxes", c.seed_boxes, "add boxes around the four known critical classes");
  scan->add_option("--box-points", c.box_points, "points per axis in each seeded box");
  scan->add_option("--box-half", c.box_half, "half-width of each seeded box");
  scan->add_option("--max-candidates", c.max_candidates, "cap on candidates per grid (0: none)");

  auto* minimize = app.add_subcommand("minimize", "refine a start point to a critical point");
  add_common(minimize, c), add_point(minimize, c);

  auto* hessian = app.add_subcommand("hessian", "finite-difference Hessian signature");
  add_common(hessian, c), add_point(hessian, c);
  hessian->add_option("--step", c.steps, "finite-difference steps")->expected(1, -1);

  auto* stationary = app.add_subcommand("verify-stationary", "stabilizer spectrum test");
  add_common(stationary, c);
  stationary->add_option("--curve", c.curve, "burnside, d6, z5, d3x, klein")->required();

  auto* reduce = app.add_subcommand("reduce", "reduce into the Gottschling domain (or a genus-one domain)");
  add_common(reduce, c), add_point(reduce, c), add_strata(reduce, c);

  auto* strata = app.add_subcommand("strata-scan", "critical points on a stratum or in genus one");
  add_common(strata, c);
  strata->add_option("--family", c.family, "z2, d2, d3");
  strata->add_flag("--genus1", c.genus1, "critical points of f on Omega");

  auto* mass = app.add_subcommand("mass", "orbifold Euler characteristics from the mass formula");
  add_common(mass, c);
  mass->add_option("--space", c.space, "full, genus1, z2, d2, d3, all");
  mass->add_option("--family", c.family, "z2, d2, d3");

  auto* rosenhain = app.add_subcommand("rosenhain", "branch points and the D3 normal-form parameter");
  add_common(rosenhain, c), add_point(rosenhain, c), add_strata(rosenhain, c);

  auto* klein = app.add_subcommand("klein-check", "stabilizer spectrum of the Klein quartic");
  add_common(klein, c);

  auto* plot = app.add_subcommand("plot-data", "CSV/JSON grids for plots: omega, j, d2, d3");
  add_common(plot, c);
  plot->add_option("--figure", c.figure, "omega, j, d2, d3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    write_error("UsageError", e.what(), 2);
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();

  std::string text;
  try {
    const json results = modcrit::cli::run_command(c);
    text = c.format == "csv" ? modcrit::cli::to_csv(c, results) : modcrit::cli::make_report(c, results).dump(2) + "\n";
  } catch (const modcrit::cli::UsageError& e) {
    write_error("UsageError", e.what(), 2);
    return 2;
  } catch (const modcrit::Error& e) {
    const int code = modcrit::cli::exit_code_for(e.kind());
    write_error(modcrit::to_string(e.kind()), e.what(), code);
    return code;
  }

  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out);
    if (!f) {
      write_error("UsageError", "cannot write '" + c.out + "'", 2);
      return 2;
    }
    f << text;
  }
  return 0;
}
