#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qac/config.hpp"

namespace qac {

// Executes all (strategy, alpha, gamma, length) combinations of the config
// and writes a deterministic result bundle:
//   manifest.json  resolved config + code version + kernel name
//   results.csv    chain_length, alpha, gamma, strategy, mean, sem
//   hamming.csv    (QAC runs, emit_hamming) energy/Hamming histogram
//   ties.csv       (Square414 QAC runs, emit_ties) tie rates
//   samples/       (persist_samples) JSON-lines sample sets
// Reruns with the same config produce byte-identical file bodies.
void run_experiment(const ExperimentConfig& cfg);

// Gamma sweep over the config's gamma grid; writes sweep.csv (full surface)
// and gamma_opt.csv next to the manifest.
void run_sweep(const ExperimentConfig& cfg);

// Post-processes a result bundle (or computes analytically, for the thermo
// and spectrum figures) into one tidy CSV per figure analog. Known ids:
// fig6-analog, fig7-analog, fig9-analog, fig12a-analog, fig12b-analog,
// fig13-analog, fig16-analog. Unknown ids / missing inputs throw
// Error(Reporting).
void emit_figure_data(const std::filesystem::path& bundle, const std::string& figure_id,
                      std::ostream& out);

// Analytic emitters used by both the report and the dedicated subcommands.
void emit_thermo_csv(double beta, int points, std::ostream& out);
void emit_spectrum_csv(double alpha, double gamma_max, double step, std::ostream& out);
void emit_code_tables_csv(std::ostream& out);
void print_code_tables(std::ostream& out);

std::string version_string();

}  // namespace qac
