// Command-line front end for the reduced-rank filtering experiments:
// figure reproductions, the complexity table, the convergence analyzer and a
// batch fixed-point demo.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jiofilt/convergence.hpp"
#include "jiofilt/harness.hpp"
#include "jiofilt/mmse.hpp"
#include "jiofilt/rng.hpp"

namespace {

using namespace jio;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<long> symbols;
  std::optional<int> rank;
  int threads = 0;
  bool tune = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key = value configuration file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "master seed (overrides config)");
  cmd->add_option("--runs", args.runs, "number of independent runs");
  cmd->add_option("--symbols", args.symbols, "symbols per run");
  cmd->add_option("--rank", args.rank, "rank D for fixed-rank experiments");
  cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
  cmd->add_flag("--tune", args.tune, "grid-search step sizes on a held-out seed first");
}

ExperimentSpec load_spec(const CommonArgs& args) {
  KeyValueConfig kv = args.config_path.empty() ? KeyValueConfig()
                                               : KeyValueConfig::from_file(args.config_path);
  ExperimentSpec spec = ExperimentSpec::from_config(kv);
  if (args.seed) spec.scenario.seed = *args.seed;
  if (args.runs) spec.n_runs = *args.runs;
  if (args.symbols) spec.n_symbols = *args.symbols;
  if (args.rank) spec.rank = *args.rank;
  spec.threads = args.threads;
  spec.validate();
  return spec;
}

void maybe_tune(ExperimentSpec& spec) {
  const std::uint64_t holdout = derive_seed(spec.scenario.seed, 0x7E57);
  for (AlgorithmConfig& algo : spec.algorithms) {
    const TuneResult best = tune_algorithm(spec, algo, holdout);
    std::cout << "tuned " << algo.name << ": mu0=" << best.config.mu0
              << " eta0=" << best.config.eta0 << " lambda=" << best.config.lambda
              << " (holdout SINR " << best.score << " dB)\n";
    algo = best.config;
  }
}

int run_figure(const CommonArgs& args, const std::string& which) {
  ExperimentSpec spec = load_spec(args);
  if (args.tune) maybe_tune(spec);
  ExperimentResult result;
  std::string basename;
  if (which == "fig2") {
    result = run_sinr_vs_rank(spec);
    basename = "sinr_vs_rank";
  } else if (which == "fig3") {
    result = run_sinr_vs_symbols(spec);
    basename = "sinr_vs_symbols";
  } else {
    if (spec.scenario.fading != FadingModel::clarke) {
      std::cerr << "note: fig4 is defined for clarke fading; enabling fd_T = 0.001\n";
      spec.scenario.fading = FadingModel::clarke;
      if (spec.scenario.doppler <= 0.0) spec.scenario.doppler = 0.001;
    }
    result = run_ber_vs_symbols(spec);
    basename = "ber_vs_symbols";
  }
  const EmitFiles files = emit(result, {args.out_dir, basename});
  std::cout << "wrote " << files.csv << "\n";
  if (!files.plot.empty()) std::cout << "wrote " << files.plot << "\n";
  std::cout << "wrote " << files.manifest << "\n";
  return 0;
}

int run_table(const CommonArgs& args, int m, int d) {
  const auto rows = complexity_table(m, d);
  const auto literal = complexity_table(m, d, MwfComplexityForm::printed_product);
  std::cout << "operation counts per symbol at M=" << m << " D=" << d << "\n";
  std::cout << std::left << std::setw(16) << "algorithm" << std::right << std::setw(14)
            << "additions" << std::setw(18) << "multiplications" << "\n";
  for (const auto& row : rows) {
    std::cout << std::left << std::setw(16) << row.algorithm << std::right << std::setw(14)
              << row.additions << std::setw(18) << row.multiplications << "\n";
  }
  std::cout << "mwf rows use the per-stage sum over Mbar = M - d; the printed single-Mbar "
               "products give:\n";
  for (const auto& row : literal) {
    if (row.algorithm.rfind("mwf", 0) == 0) {
      std::cout << std::left << std::setw(16) << row.algorithm << std::right << std::setw(14)
                << row.additions << std::setw(18) << row.multiplications << "\n";
    }
  }
  for (const std::string algo : {"fullrank_nlms", "jio_nlms", "fullrank_rls", "mwf_nlms"}) {
    const CountVerification v = count_verify(algo, m, d);
    std::cout << "instrumented " << algo << ": adds " << v.measured.adds << " (table "
              << v.table_adds << "), mults " << v.measured.mults << " (table "
              << v.table_mults << ")\n";
  }

  std::filesystem::create_directories(args.out_dir);
  const std::string csv = args.out_dir + "/complexity_table.csv";
  std::ofstream os(csv);
  if (!os) throw IoError("table1: cannot open " + csv);
  os << "algorithm,m,d,additions,multiplications\n";
  for (const auto& row : rows) {
    os << row.algorithm << ',' << m << ',' << d << ',' << row.additions << ','
       << row.multiplications << '\n';
  }
  std::cout << "wrote " << csv << "\n";
  return 0;
}

int run_convergence(const CommonArgs& args) {
  ExperimentSpec spec = load_spec(args);
  const ScenarioRealization real = generate(spec.scenario);
  const ExactStats exact = exact_stats(
      real, spec.scenario.fading == FadingModel::clarke ? 0 : -1);
  const Index d = spec.rank;

  const OptimalPair opt = solve_optimal_pair(exact.stats, d);
  JioConfig jio_cfg;
  jio_cfg.d = d;
  for (const AlgorithmConfig& a : spec.algorithms) {
    if (a.name == "jio_nlms") {
      jio_cfg.mu0 = a.mu0;
      jio_cfg.eta0 = a.eta0;
      jio_cfg.step_mode = a.step_mode;
    }
  }
  const PilotEstimates pilot =
      estimate_step_expectations(exact.stats, jio_cfg, 1000, spec.scenario.seed);
  const ConvergenceModel model =
      build_model(exact.stats, opt, identity_projection(exact.stats.dim(), d),
                  pilot.mu_mean, pilot.nu_mean, pilot.sigma_w2);
  const StabilityReport report = stability_check(model);

  std::cout << "pilot estimates: E[mu]=" << pilot.mu_mean << " E[nu]=" << pilot.nu_mean
            << " sigma_w^2=" << pilot.sigma_w2 << "\n";
  std::cout << "spectral radius rho(A) = " << report.rho << "\n";
  std::cout << "mean-error stable:      " << (report.stable_mean ? "yes" : "no") << "\n";
  std::cout << "max eig(A^H A) = " << report.max_gain_sq << " -> msd stable: "
            << (report.stable_msd ? "yes" : "no") << "\n";

  const int runs = spec.n_runs;
  const ErrorTrace trace = empirical_error_trace(exact.stats, opt, jio_cfg,
                                                 std::min<long>(spec.n_symbols, 2000), runs,
                                                 spec.scenario.seed);
  std::filesystem::create_directories(args.out_dir);
  const std::string csv = args.out_dir + "/convergence_trace.csv";
  std::ofstream os(csv);
  if (!os) throw IoError("convergence: cannot open " + csv);
  os << "symbol,w_error,s_error\n" << std::setprecision(12);
  for (std::size_t i = 0; i < trace.w_err.size(); ++i) {
    os << i + 1 << ',' << trace.w_err[i] << ',' << trace.s_err[i] << '\n';
  }
  std::cout << "diverged runs: " << trace.diverged_runs << "/" << trace.total_runs << "\n";
  std::cout << "wrote " << csv << "\n";
  return 0;
}

int run_oracle(const CommonArgs& args, int m_flag, int d_flag) {
  // Fixed-point demo on scenario-derived statistics (or a random instance
  // when M is given explicitly).
  std::uint64_t seed = args.seed.value_or(1);
  SecondOrderStats stats = [&]() {
    if (m_flag > 0) {
      Rng rng(seed);
      CMatrix g(m_flag, 2 * m_flag);
      for (Index i = 0; i < g.rows(); ++i) {
        for (Index j = 0; j < g.cols(); ++j) g(i, j) = rng.cgaussian();
      }
      CMatrix r = g * g.adjoint() / static_cast<double>(2 * m_flag) +
                  0.05 * CMatrix::Identity(m_flag, m_flag);
      CVector p = rng.cgaussian_vector(m_flag);
      p *= 0.5 / p.norm();
      return SecondOrderStats(HermitianMatrix::symmetrized(r), p, 1.0);
    }
    CommonArgs local = args;
    ExperimentSpec spec = load_spec(local);
    const ScenarioRealization real = generate(spec.scenario);
    return exact_stats(real, spec.scenario.fading == FadingModel::clarke ? 0 : -1).stats;
  }();

  const Index d = d_flag > 0 ? d_flag : 4;
  const FullRankDesign full = full_rank_wiener(stats);
  const FixedPointResult fp =
      alternate_fixed_point(stats, d, identity_projection(stats.dim(), d));
  std::cout << "full-rank MMSE: " << full.mmse << "\n";
  std::cout << "fixed point converged: " << (fp.converged ? "yes" : "no") << " in "
            << fp.iterations << " iterations\n";
  std::cout << std::setprecision(12);
  for (std::size_t i = 0; i < fp.mmse_trace.size(); ++i) {
    std::cout << "  iter " << std::setw(3) << i + 1 << "  mmse " << fp.mmse_trace[i] << "\n";
  }
  const RangeCondition rc = range_condition(stats, fp.design.S);
  std::cout << "range condition holds: " << (rc.holds ? "yes" : "no")
            << ", mmse gap " << rc.mmse_gap << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reduced-rank adaptive filtering experiment harness"};
  app.require_subcommand(1);

  CommonArgs fig2_args, fig3_args, fig4_args, conv_args, oracle_args, table_args;
  int table_m = 32;
  int table_d = 4;
  int oracle_m = 0;
  int oracle_d = 0;

  add_common(app.add_subcommand("fig2", "final SINR versus rank sweep"), fig2_args);
  add_common(app.add_subcommand("fig3", "SINR versus received symbols"), fig3_args);
  add_common(app.add_subcommand("fig4", "decision-directed BER under fading"), fig4_args);
  auto* table_cmd = app.add_subcommand("table1", "closed-form and instrumented op counts");
  add_common(table_cmd, table_args);
  table_cmd->add_option("--m", table_m, "filter length M");
  table_cmd->add_option("--d", table_d, "rank D");
  add_common(app.add_subcommand("convergence", "stability analysis of the joint recursion"),
             conv_args);
  auto* oracle_cmd = app.add_subcommand("oracle", "batch fixed-point demo");
  add_common(oracle_cmd, oracle_args);
  oracle_cmd->add_option("--m", oracle_m, "use a random M-dim instance instead of a scenario");
  oracle_cmd->add_option("--d", oracle_d, "rank D (default 4)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("fig2")) return run_figure(fig2_args, "fig2");
    if (app.got_subcommand("fig3")) return run_figure(fig3_args, "fig3");
    if (app.got_subcommand("fig4")) return run_figure(fig4_args, "fig4");
    if (app.got_subcommand("table1")) return run_table(table_args, table_m, table_d);
    if (app.got_subcommand("convergence")) return run_convergence(conv_args);
    if (app.got_subcommand("oracle")) return run_oracle(oracle_args, oracle_m, oracle_d);
  } catch (const jio::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const jio::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
