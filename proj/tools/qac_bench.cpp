// qac-bench: configuration-driven benchmark runner for quantum annealing
// correction on Chimera graphs, with analytic table/curve emitters.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qac/config.hpp"
#include "qac/errors.hpp"
#include "qac/report.hpp"

namespace {

int exit_code_for(qac::ErrorKind kind) {
  switch (kind) {
    case qac::ErrorKind::Validation:
    case qac::ErrorKind::InvalidInput:
    case qac::ErrorKind::Encoding:
    case qac::ErrorKind::Scheme:
    case qac::ErrorKind::Statistics:
    case qac::ErrorKind::Placement:
      return 2;
    case qac::ErrorKind::Io:
      return 3;
    case qac::ErrorKind::Unsupported:
    case qac::ErrorKind::SizeLimit:
    case qac::ErrorKind::Reporting:
      return 4;
  }
  return 1;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) qac::fail(qac::ErrorKind::Io, "cannot write '" + path + "'");
  return out;
}

// Streams to a file when --out is given, stdout otherwise.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
  } else {
    auto out = open_out(path);
    fn(out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum annealing correction benchmark toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override, bundle, figure, out_path;
  std::optional<uint64_t> seed_override;
  double alpha = 0.3, beta = 1.0, gamma_max = 1.0, step = 0.05;
  int points = 50;

  auto add_config_opts = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", out_override, "override the config's output directory");
    cmd->add_option("--seed", seed_override, "override the config's master seed");
  };

  auto* run = app.add_subcommand("run", "run the configured experiment into a result bundle");
  add_config_opts(run);
  auto* sweep = app.add_subcommand("sweep", "sweep the gamma grid and report optima");
  add_config_opts(sweep);

  auto* report = app.add_subcommand("report", "emit per-figure CSV from a result bundle");
  report->add_option("--bundle", bundle, "result bundle directory");
  report->add_option("--figure", figure, "figure id (fig6-analog, fig7-analog, fig9-analog, "
                                         "fig12a-analog, fig12b-analog, fig13-analog, "
                                         "fig16-analog)")
      ->required();
  report->add_option("--out", out_path, "output CSV path (stdout if omitted)");

  auto* thermo = app.add_subcommand("thermo", "thermodynamic single-qubit error-rate curves");
  thermo->add_option("--beta", beta, "inverse temperature");
  thermo->add_option("--points", points, "grid points over beta*h in [0.01, 10]");
  thermo->add_option("--out", out_path, "output CSV path (stdout if omitted)");

  auto* spectrum = app.add_subcommand("spectrum", "two-encoded-qubit excitation spectrum");
  spectrum->add_option("--alpha", alpha, "problem scale");
  spectrum->add_option("--gamma-max", gamma_max, "largest penalty strength");
  spectrum->add_option("--step", step, "gamma step");
  spectrum->add_option("--out", out_path, "output CSV path (stdout if omitted)");

  auto* tables = app.add_subcommand("tables", "single-encoded-qubit code state tables");
  tables->add_option("--out", out_path, "output CSV path (pretty-printed to stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || sweep->parsed()) {
      auto cfg = qac::load_config(config_path);
      if (!out_override.empty()) cfg.output_dir = out_override;
      if (seed_override) cfg.seed = *seed_override;
      if (run->parsed())
        qac::run_experiment(cfg);
      else
        qac::run_sweep(cfg);
      std::cout << "wrote " << cfg.output_dir << "\n";
    } else if (report->parsed()) {
      with_output(out_path,
                  [&](std::ostream& o) { qac::emit_figure_data(bundle, figure, o); });
    } else if (thermo->parsed()) {
      with_output(out_path, [&](std::ostream& o) { qac::emit_thermo_csv(beta, points, o); });
    } else if (spectrum->parsed()) {
      with_output(out_path,
                  [&](std::ostream& o) { qac::emit_spectrum_csv(alpha, gamma_max, step, o); });
    } else if (tables->parsed()) {
      if (out_path.empty()) {
        qac::print_code_tables(std::cout);
      } else {
        auto out = open_out(out_path);
        qac::emit_code_tables_csv(out);
      }
    }
  } catch (const qac::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
