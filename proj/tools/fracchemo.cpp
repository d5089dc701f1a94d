// fracchemo command-line front end.
//   simulate <config.json>
//   sweep <sweep.json>
//   kernel --alpha A --dim D --t T --out profile.csv
//   oracle --suite {lap, kernel, newtonian}
//   plot <csv> --kind <kind> [--out file.svg]

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "fracchemo/fracchemo.hpp"

using namespace fracchemo;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

int cmd_simulate(const std::string& path) {
  const RunConfig cfg = load_run_config(path);
  const SimulationResult res = simulate(cfg);
  const auto& b = res.report;
  std::printf("%s: %s", cfg.name.c_str(), to_string(b.status).c_str());
  if (b.status != RunStatus::completed) std::printf(" at t = %.6g", b.status_time);
  std::printf("\nfinal mass %.10g, min mass %.10g, max L^inf %.6g\n", b.final_mass, b.min_mass, b.max_linf);
  for (const auto& nv : b.verdicts) std::printf("  %-24s %s\n", nv.name.c_str(), to_string(nv.verdict.state).c_str());
  return code(res.code);
}

int cmd_sweep(const std::string& path) {
  const SweepConfig cfg = load_sweep_config(path);
  const SweepResult res = sweep(cfg);
  std::printf("%s: axis %s, %zu cells, tau = %.6g\n", cfg.name.c_str(), res.axis.c_str(), res.cells.size(), res.tau);
  for (const auto& c : res.cells)
    std::printf("  %s = %-10.6g m(tau) = %-14.8g reacted = %-14.8g decay slope linf %-9.4g exit %d (%s)\n",
                res.axis.c_str(), c.value, c.m_tau, c.reacted, c.slope_linf, code(c.code), c.status.c_str());
  std::printf("slope log m(tau) vs log %s: %.6g\n", res.axis.c_str(), res.m_tau_fit.slope);
  std::printf("slope log(m0 - m_final) vs log %s: %.6g\n", res.axis.c_str(), res.reacted_fit.slope);
  std::printf("m(tau) decreasing: %s\n", to_string(res.m_tau_decreasing.state).c_str());
  return code(res.code);
}

int cmd_kernel(double alpha, int dim, double t, const std::string& out, double rmax, int points) {
  if (rmax <= 0.0) rmax = 10.0 * std::pow(t, 1.0 / alpha);
  require(points >= 2, "points must be >= 2");
  std::vector<double> radii;
  for (int i = 0; i < points; ++i) radii.push_back(rmax * i / (points - 1));
  const KernelEval prof = radial_profile(alpha, dim, t, radii);
  std::string text = "# alpha=" + format_double(alpha) + " d=" + std::to_string(dim) + " t=" + format_double(t) +
                     " method=" + to_string(prof.method) + "\nradius,value\n";
  for (const auto& [r, v] : prof.samples) text += format_double(r) + "," + format_double(v) + "\n";
  if (out.empty() || out == "-") std::fputs(text.c_str(), stdout);
  else write_text(out, text);
  return 0;
}

int cmd_oracle(const std::string& suite) {
  std::vector<SuiteCheck> checks;
  if (suite == "lap") checks = laplacian_suite();
  else if (suite == "kernel") checks = kernel_suite();
  else checks = newtonian_suite();
  std::printf("%-44s %-12s %-10s %s\n", "check", "measured", "tolerance", "result");
  for (const auto& c : checks)
    std::printf("%-44s %-12.3e %-10.1e %s\n", c.name.c_str(), c.measured, c.tolerance, c.pass ? "PASS" : "FAIL");
  return all_pass(checks) ? 0 : code(ExitCode::internal);
}

int cmd_plot(const std::string& csv, const std::string& kind, const std::string& out) {
  const Table table = load_table(csv, false);
  const PlotResult res = render_plot(table, kind);
  if (out.empty() || out == "-") std::fputs(res.svg.c_str(), stdout);
  else write_text(out, res.svg);
  if (res.has_fit) std::fprintf(stderr, "fitted slope %.6g\n", res.fit.slope);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracchemo: fractional Keller-Segel with absorbing reaction"};
  app.require_subcommand(1);

  std::string sim_path, sweep_path;
  auto* sim = app.add_subcommand("simulate", "run one configuration");
  sim->add_option("config", sim_path, "run configuration (JSON)")->required();
  auto* swp = app.add_subcommand("sweep", "run a parameter sweep");
  swp->add_option("config", sweep_path, "sweep configuration (JSON)")->required();

  double alpha = 1.5, t = 1.0, rmax = 0.0;
  int dim = 2, points = 201;
  std::string kout;
  auto* ker = app.add_subcommand("kernel", "tabulate the fractional heat kernel");
  ker->add_option("--alpha", alpha, "order in (0,2]")->required();
  ker->add_option("--dim", dim, "dimension 1, 2 or 3")->required();
  ker->add_option("--t", t, "time > 0")->required();
  ker->add_option("--out", kout, "output CSV (default stdout)");
  ker->add_option("--rmax", rmax, "largest radius (default 10 t^{1/alpha})");
  ker->add_option("--points", points, "number of radii");

  std::string suite;
  auto* ora = app.add_subcommand("oracle", "compare against brute-force references");
  ora->add_option("--suite", suite, "lap, kernel or newtonian")->required()->check(CLI::IsMember({"lap", "kernel", "newtonian"}));

  std::string csv, kind, pout;
  auto* plt = app.add_subcommand("plot", "render a CSV column as SVG");
  plt->add_option("csv", csv, "diagnostics or sweep CSV")->required();
  plt->add_option("--kind", kind, "<col>, loglog:<col> or sweep:<col>")->required();
  plt->add_option("--out", pout, "output SVG (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::usage);
  }

  try {
    if (*sim) return cmd_simulate(sim_path);
    if (*swp) return cmd_sweep(sweep_path);
    if (*ker) return cmd_kernel(alpha, dim, t, kout, rmax, points);
    if (*ora) return cmd_oracle(suite);
    if (*plt) return cmd_plot(csv, kind, pout);
  } catch (const FormatError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return code(ExitCode::usage);
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return code(ExitCode::validation);
  } catch (const ContractionFailure& e) {
    std::fprintf(stderr, "contraction failure: %s\n", e.what());
    return code(ExitCode::contraction_failure);
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error at t = %g: %s\n", e.time(), e.what());
    return code(ExitCode::nan);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return code(ExitCode::internal);
  }
  return code(ExitCode::internal);
}
