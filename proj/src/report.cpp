#include "qac/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "qac/analysis.hpp"
#include "qac/errors.hpp"
#include "qac/kernels.hpp"

namespace qac {

namespace fs = std::filesystem;

std::string version_string() { return "qac-bench 0.1.0"; }

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct ResultRow {
  std::string code;
  int chain_length = 0;
  double alpha = 0;
  std::optional<double> gamma;
  std::string strategy;
  double mean = 0, sem = 0;
};

void write_results_csv(const fs::path& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "code,chain_length,alpha,gamma,strategy,mean,sem\n";
  for (const auto& r : rows) {
    out << r.code << ',' << r.chain_length << ',' << fmt(r.alpha) << ','
        << (r.gamma ? fmt(*r.gamma) : std::string()) << ',' << r.strategy << ',' << fmt(r.mean)
        << ',' << fmt(r.sem) << '\n';
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<ResultRow> read_results_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Reporting, "bundle has no results.csv at " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 7) fail(ErrorKind::Reporting, "malformed results.csv row: " + line);
    ResultRow r;
    r.code = f[0];
    r.chain_length = std::stoi(f[1]);
    r.alpha = std::stod(f[2]);
    if (!f[3].empty()) r.gamma = std::stod(f[3]);
    r.strategy = f[4];
    r.mean = std::stod(f[5]);
    r.sem = std::stod(f[6]);
    rows.push_back(r);
  }
  return rows;
}

uint64_t chain_seed(uint64_t master, std::initializer_list<uint64_t> path) {
  uint64_t s = master;
  for (uint64_t p : path) s = derive_seed(s, p);
  return s;
}

// seed stream tags
enum : uint64_t { kPlaceTag = 11, kRunTag = 12, kAnalysisTag = 13 };

struct RunContext {
  explicit RunContext(const ExperimentConfig& c) : cfg(c) {}
  const ExperimentConfig& cfg;
  HardwareGraph hw;
  std::optional<EncodedGraph> enc_graph;
  std::optional<EncodingMap> enc_map;
  GraphView hw_view;
  GraphView enc_view;
};

RunContext make_context(const ExperimentConfig& cfg, CodeKind code) {
  RunContext ctx{cfg};
  ctx.hw = build_chimera(cfg.rows, cfg.cols, cfg.cell_size, cfg.faults);
  ctx.hw_view = view_of(ctx.hw);
  auto [eg, map] = build_encoded_graph(code, ctx.hw);
  ctx.enc_graph = std::move(eg);
  ctx.enc_map = std::move(map);
  ctx.enc_view = view_of(*ctx.enc_graph);
  return ctx;
}

// Placements are keyed by graph kind so every strategy at a given length sees
// the same instance set.
struct Placements {
  std::map<int, std::vector<InstanceSet>> hw_single, hw_quad, enc_single;
};

const std::vector<InstanceSet>& placements_for(Placements& pl, Strategy s, const RunContext& ctx,
                                               int length, int length_idx) {
  uint64_t seed = chain_seed(ctx.cfg.seed, {kPlaceTag, uint64_t(length_idx),
                                            uint64_t(s == Strategy::C ? 1 : is_encoded(s) ? 2 : 0)});
  auto place = [&](std::map<int, std::vector<InstanceSet>>& cache,
                   const GraphView& view) -> const std::vector<InstanceSet>& {
    auto it = cache.find(length);
    if (it == cache.end())
      it = cache.emplace(length, place_instances(s, view, length, ctx.cfg.instances, seed)).first;
    return it->second;
  };
  if (s == Strategy::C) return place(pl.hw_quad, ctx.hw_view);
  if (is_encoded(s)) return place(pl.enc_single, ctx.enc_view);
  return place(pl.hw_single, ctx.hw_view);
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& dir) {
  nlohmann::json m;
  m["version"] = version_string();
  m["kernel"] = std::string(kernels::active_kernels().name);
  m["config"] = config_to_json(cfg);
  m["thermo_gamma_search"] = {{"max", kThermoGammaMax}, {"tolerance", 1e-6}};
  std::ofstream out(dir / "manifest.json");
  if (!out) fail(ErrorKind::Io, "cannot write manifest.json");
  out << m.dump(2) << '\n';
}

DecodeScheme default_scheme(CodeKind code) {
  return code == CodeKind::Square414 ? DecodeScheme::EnergyMin : DecodeScheme::MajorityVote;
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  std::vector<ResultRow> rows;
  std::vector<std::tuple<double, double, int, double>> tie_rows;  // alpha, gamma, length, rate

  auto run_code = [&](CodeKind code, const std::vector<Strategy>& strategies,
                      const std::vector<double>& alphas) {
    RunContext ctx = make_context(cfg, code);
    Placements pl;
    for (size_t li = 0; li < cfg.chain_lengths.size(); ++li) {
      int length = cfg.chain_lengths[li];
      for (size_t ai = 0; ai < alphas.size(); ++ai) {
        double alpha = alphas[ai];
        for (size_t si = 0; si < strategies.size(); ++si) {
          Strategy strat = strategies[si];
          const auto& inst = placements_for(pl, strat, ctx, length, int(li));
          std::vector<double> gammas =
              is_encoded(strat) ? cfg.gammas : std::vector<double>{0.0};
          for (size_t gi = 0; gi < gammas.size(); ++gi) {
            uint64_t run_seed =
                chain_seed(cfg.seed, {kRunTag, uint64_t(li), uint64_t(ai), uint64_t(si), gi});
            auto out = run_strategy(strat, ctx.enc_map ? &*ctx.enc_map : nullptr, inst, alpha,
                                    is_encoded(strat) ? std::optional(gammas[gi]) : std::nullopt,
                                    cfg.sampler, run_seed, cfg.threads);
            ResultRow r;
            r.code = code_name(code);
            r.chain_length = length;
            r.alpha = alpha;
            r.gamma = out.gamma;
            r.strategy = strategy_name(strat);
            r.mean = out.stats.mean;
            r.sem = out.stats.sem;
            rows.push_back(r);

            bool want_ties = cfg.emit_ties && code == CodeKind::Square414 && is_encoded(strat) &&
                             strat != Strategy::EP && si == 0;
            bool want_samples = cfg.persist_samples && is_encoded(strat);
            if ((want_ties || want_samples) &&
                cfg.sampler.backend == SamplerSettings::Backend::Metropolis) {
              // instance 0, re-sampled with the identical seed the run used
              auto chain =
                  compile_chain(*ctx.enc_map, inst[0][0].vertices, alpha, gammas[gi]);
              auto samples = metropolis_anneal(chain.phys.problem, cfg.sampler.schedule,
                                               cfg.sampler.reads, derive_seed(run_seed, 0),
                                               cfg.threads);
              if (want_ties)
                tie_rows.emplace_back(alpha, gammas[gi], length,
                                      count_ties(samples, chain).rate);
              if (want_samples) {
                fs::create_directories(dir / "samples");
                std::ostringstream name;
                name << strategy_name(strat) << "_L" << length << "_a" << fmt(alpha) << "_g"
                     << fmt(gammas[gi]) << ".jsonl";
                std::ofstream sout(dir / "samples" / name.str());
                write_jsonl(samples, sout);
              }
            }
          }
        }
      }
    }

    if (cfg.emit_hamming && !cfg.gammas.empty() &&
        cfg.sampler.backend == SamplerSettings::Backend::Metropolis) {
      bool any_enc = std::any_of(strategies.begin(), strategies.end(),
                                 [](Strategy s) { return is_encoded(s); });
      if (any_enc) {
        int length = *std::max_element(cfg.chain_lengths.begin(), cfg.chain_lengths.end());
        double alpha = alphas.front(), gamma = cfg.gammas.front();
        uint64_t seed = chain_seed(cfg.seed, {kAnalysisTag, 0});
        auto inst = place_random_chain(ctx.enc_view, length, seed);
        auto chain = compile_chain(*ctx.enc_map, inst.vertices, alpha, gamma);
        auto samples = metropolis_anneal(chain.phys.problem, cfg.sampler.schedule,
                                         cfg.sampler.reads, derive_seed(seed, 1), cfg.threads);
        auto bins = classify_hamming_energy(samples, chain, default_scheme(code));
        std::ofstream out(dir / "hamming.csv");
        out << "code,alpha,gamma,chain_length,hamming,energy_gap,count,decodable_fraction\n";
        for (const auto& b : bins)
          out << code_name(code) << ',' << fmt(alpha) << ',' << fmt(gamma) << ',' << length << ','
              << b.hamming << ',' << fmt(b.energy_gap) << ',' << b.count << ','
              << fmt(b.decodable_fraction()) << '\n';
      }
    }
  };

  if (cfg.mode == "equalized") {
    for (double alpha : cfg.alphas) {
      auto eq = equalized_alphas(alpha);
      run_code(CodeKind::Pudenz313, {Strategy::EP, Strategy::QacMV}, {eq.pudenz_alpha});
      run_code(CodeKind::Square414, {Strategy::EP, Strategy::QacEM}, {eq.square_alpha});
    }
  } else {
    run_code(cfg.code, cfg.strategies, cfg.alphas);
  }

  write_results_csv(dir / "results.csv", rows);
  if (!tie_rows.empty()) {
    std::ofstream out(dir / "ties.csv");
    out << "alpha,gamma,chain_length,ties_per_qubit\n";
    for (auto [a, g, l, r] : tie_rows)
      out << fmt(a) << ',' << fmt(g) << ',' << l << ',' << fmt(r) << '\n';
  }
  write_manifest(cfg, dir);
}

void run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.gammas.empty()) fail(ErrorKind::Validation, "config.gammas: sweep needs a gamma grid");
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  RunContext ctx = make_context(cfg, cfg.code);
  Placements pl;
  std::ofstream surface(dir / "sweep.csv");
  surface << "code,chain_length,alpha,gamma,strategy,mean,sem\n";
  std::ofstream opt(dir / "gamma_opt.csv");
  opt << "code,chain_length,alpha,strategy,gamma_opt\n";

  for (size_t li = 0; li < cfg.chain_lengths.size(); ++li) {
    int length = cfg.chain_lengths[li];
    for (size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
      double alpha = cfg.alphas[ai];
      for (size_t si = 0; si < cfg.strategies.size(); ++si) {
        Strategy strat = cfg.strategies[si];
        if (!is_encoded(strat)) continue;
        const auto& inst = placements_for(pl, strat, ctx, length, int(li));
        uint64_t seed = chain_seed(cfg.seed, {kRunTag, uint64_t(li), uint64_t(ai), uint64_t(si)});
        auto sweep = sweep_gamma(strat, *ctx.enc_map, inst, alpha, cfg.gammas, cfg.sampler, seed,
                                 cfg.threads);
        for (size_t gi = 0; gi < cfg.gammas.size(); ++gi) {
          const auto& o = sweep.surface[gi];
          surface << code_name(cfg.code) << ',' << length << ',' << fmt(alpha) << ','
                  << fmt(cfg.gammas[gi]) << ',' << strategy_name(strat) << ',' << fmt(o.stats.mean)
                  << ',' << fmt(o.stats.sem) << '\n';
        }
        opt << code_name(cfg.code) << ',' << length << ',' << fmt(alpha) << ','
            << strategy_name(strat) << ',' << fmt(sweep.gamma_opt) << '\n';
      }
    }
  }
  write_manifest(cfg, dir);
}

void emit_thermo_csv(double beta, int points, std::ostream& out) {
  out << "# gamma optimized over [0," << fmt(kThermoGammaMax) << "], tolerance 1e-6\n";
  out << "beta_h,p_err_313,p_err_414,p_err_313_scaled,gamma_opt_313,gamma_opt_414\n";
  for (int i = 0; i < points; ++i) {
    double lo = std::log10(0.01), hi = std::log10(10.0);
    double bh = std::pow(10.0, lo + (hi - lo) * double(i) / double(points - 1));
    double h = bh / beta;
    auto p3 = optimize_thermo_gamma(CodeKind::Pudenz313, beta, h);
    auto p4 = optimize_thermo_gamma(CodeKind::Square414, beta, h);
    auto p3s = optimize_thermo_gamma(CodeKind::Pudenz313, beta, 2.0 * h / 3.0);
    out << fmt(bh) << ',' << fmt(p3.p_err) << ',' << fmt(p4.p_err) << ',' << fmt(p3s.p_err) << ','
        << fmt(p3.gamma_opt) << ',' << fmt(p4.gamma_opt) << '\n';
  }
}

void emit_spectrum_csv(double alpha, double gamma_max, double step, std::ostream& out) {
  out << "alpha,gamma,label,multiplicity,gap,decodable\n";
  for (double g = 0.0; g <= gamma_max + 1e-12; g += step) {
    for (const auto& lv : two_qubit_spectrum(alpha, g))
      out << fmt(alpha) << ',' << fmt(g) << ',' << lv.label << ',' << lv.multiplicity << ','
          << fmt(lv.gap) << ',' << (lv.decodable ? 1 : 0) << '\n';
  }
}

void emit_code_tables_csv(std::ostream& out) {
  out << "code,bit1,bit2,bit3,bit4,penalty_2v,m,multiplicity,decodable\n";
  for (CodeKind code : {CodeKind::Pudenz313, CodeKind::Square414}) {
    for (const auto& r : enumerate_code_states(code)) {
      out << code_name(code);
      for (int k = 0; k < 4; ++k) out << ',' << int(r.bits[k]);
      out << ',' << r.penalty_2v << ',' << r.magnetization << ',' << r.multiplicity << ','
          << r.decodability << '\n';
    }
  }
}

void print_code_tables(std::ostream& out) {
  for (CodeKind code : {CodeKind::Pudenz313, CodeKind::Square414}) {
    out << code_name(code) << " single-qubit states";
    out << (code == CodeKind::Pudenz313 ? " (columns: data 1-3, penalty)" : " (columns: data 1-4)")
        << "\n";
    out << "  bits  2v   m  mult dec\n";
    for (const auto& r : enumerate_code_states(code)) {
      out << "  ";
      for (int k = 0; k < 4; ++k) out << int(r.bits[k]);
      char buf[40];
      std::snprintf(buf, sizeof buf, "  %2d  %+2d  %2d   %c", r.penalty_2v, r.magnetization,
                    r.multiplicity, r.decodability);
      out << buf << "\n";
    }
    out << "\n";
  }
}

void emit_figure_data(const fs::path& bundle, const std::string& figure_id, std::ostream& out) {
  if (figure_id == "fig12a-analog" || figure_id == "fig12b-analog") {
    bool scaled = figure_id == "fig12b-analog";
    out << "beta_h,p_err_313,p_err_414\n";
    for (int i = 0; i < 50; ++i) {
      double lo = std::log10(0.01), hi = std::log10(10.0);
      double bh = std::pow(10.0, lo + (hi - lo) * double(i) / 49.0);
      auto p3 = optimize_thermo_gamma(CodeKind::Pudenz313, 1.0, scaled ? 2.0 * bh / 3.0 : bh);
      auto p4 = optimize_thermo_gamma(CodeKind::Square414, 1.0, bh);
      out << fmt(bh) << ',' << fmt(p3.p_err) << ',' << fmt(p4.p_err) << '\n';
    }
    return;
  }
  if (figure_id == "fig13-analog") {
    emit_spectrum_csv(0.3, 1.0, 0.05, out);
    return;
  }
  if (figure_id == "fig7-analog") {
    auto rows = read_results_csv(bundle / "results.csv");
    out << "chain_length,alpha,gamma,strategy,mean,sem\n";
    for (const auto& r : rows)
      out << r.chain_length << ',' << fmt(r.alpha) << ','
          << (r.gamma ? fmt(*r.gamma) : std::string()) << ',' << r.strategy << ',' << fmt(r.mean)
          << ',' << fmt(r.sem) << '\n';
    return;
  }
  if (figure_id == "fig6-analog") {
    auto rows = read_results_csv(bundle / "results.csv");
    std::map<std::pair<int, double>, std::pair<std::optional<ResultRow>, std::optional<ResultRow>>>
        by_key;
    for (const auto& r : rows) {
      if (r.strategy == "U") by_key[{r.chain_length, r.alpha}].first = r;
      if (r.strategy == "C") by_key[{r.chain_length, r.alpha}].second = r;
    }
    bool any = false;
    out << "chain_length,alpha,u_mean,u_sem,c_mean,c_sem,c_pred\n";
    for (const auto& [key, uc] : by_key) {
      if (!uc.first || !uc.second) continue;
      any = true;
      double p = uc.first->mean;
      double pred = 1.0 - std::pow(1.0 - p, 4.0);
      out << key.first << ',' << fmt(key.second) << ',' << fmt(uc.first->mean) << ','
          << fmt(uc.first->sem) << ',' << fmt(uc.second->mean) << ',' << fmt(uc.second->sem) << ','
          << fmt(pred) << '\n';
    }
    if (!any) fail(ErrorKind::Reporting, "bundle has no matching U and C results");
    return;
  }
  if (figure_id == "fig9-analog") {
    std::ifstream in(bundle / "hamming.csv");
    if (!in) fail(ErrorKind::Reporting, "bundle has no hamming.csv (run with emit_hamming)");
    std::string line;
    std::getline(in, line);
    out << "hamming,energy_gap,decodable_fraction,count\n";
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = split_csv_line(line);
      out << f[4] << ',' << f[5] << ',' << f[7] << ',' << f[6] << '\n';
    }
    return;
  }
  if (figure_id == "fig16-analog") {
    std::ifstream in(bundle / "ties.csv");
    if (!in) fail(ErrorKind::Reporting, "bundle has no ties.csv (run with emit_ties)");
    std::string line;
    std::getline(in, line);
    // report the per-(alpha, length) rate minimized over gamma
    std::map<std::pair<double, int>, double> best;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = split_csv_line(line);
      auto key = std::make_pair(std::stod(f[0]), std::stoi(f[2]));
      double rate = std::stod(f[3]);
      auto it = best.find(key);
      if (it == best.end() || rate < it->second) best[key] = rate;
    }
    out << "alpha,chain_length,ties_per_qubit\n";
    for (const auto& [key, rate] : best)
      out << fmt(key.first) << ',' << key.second << ',' << fmt(rate) << '\n';
    return;
  }
  fail(ErrorKind::Reporting, "unknown figure id '" + figure_id + "'");
}

}  // namespace qac
