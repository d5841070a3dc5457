#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jiofilt/convergence.hpp"
#include "jiofilt/harness.hpp"

using namespace jio;

namespace {

long long row_value(const std::vector<ComplexityRow>& rows, const std::string& name,
                    bool adds) {
  for (const auto& row : rows) {
    if (row.algorithm == name) return adds ? row.additions : row.multiplications;
  }
  FAIL("missing row ", name);
  return 0;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.scenario.users = 3;
  spec.scenario.chips = 8;
  spec.scenario.snr_db = 12.0;
  spec.scenario.seed = 5;
  spec.n_symbols = 300;
  spec.n_runs = 12;
  spec.ranks = {2};
  spec.rank = 2;
  spec.keep_run_traces = true;
  spec.algorithms = {{.name = "jio_nlms", .d = 2, .mu0 = 0.5, .eta0 = 0.5},
                     {.name = "fullrank_nlms", .d = 2, .mu0 = 0.3}};
  return spec;
}

}  // namespace

TEST_CASE("published closed-form complexity values") {
  {
    const auto rows = complexity_table(10, 1);
    CHECK(row_value(rows, "fullrank-nlms", true) == 29);
    CHECK(row_value(rows, "fullrank-nlms", false) == 32);
  }
  {
    const auto rows = complexity_table(32, 4);
    CHECK(row_value(rows, "jio-nlms", true) == 302);
    CHECK(row_value(rows, "jio-nlms", false) == 434);
  }
}

TEST_CASE("complexity table sanity across the grid") {
  for (int m = 8; m <= 64; ++m) {
    std::vector<long long> prev_adds;
    for (int d = 1; d <= 8; ++d) {
      const auto rows = complexity_table(m, d);
      for (const auto& row : rows) {
        CHECK(row.additions > 0);
        CHECK(row.multiplications > 0);
      }
      CHECK(row_value(rows, "jio-nlms", true) < row_value(rows, "fullrank-rls", true));
    }
  }
  // Monotone non-decreasing in M for every row at fixed D.
  for (int d : {1, 4, 8}) {
    auto prev = complexity_table(8, d);
    for (int m = 9; m <= 64; ++m) {
      const auto cur = complexity_table(m, d);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        CHECK(cur[i].additions >= prev[i].additions);
        CHECK(cur[i].multiplications >= prev[i].multiplications);
      }
      prev = cur;
    }
  }
}

TEST_CASE("the printed-product MWF variant differs only in the Mbar convention") {
  const auto sums = complexity_table(24, 4);
  const auto literal = complexity_table(24, 4, MwfComplexityForm::printed_product);
  CHECK(row_value(sums, "mwf-nlms", true) != row_value(literal, "mwf-nlms", true));
  CHECK(row_value(sums, "fullrank-nlms", true) == row_value(literal, "fullrank-nlms", true));
  // At D = 1 both conventions collapse to Mbar = M - 1.
  const auto s1 = complexity_table(24, 1);
  const auto l1 = complexity_table(24, 1, MwfComplexityForm::printed_product);
  CHECK(row_value(s1, "mwf-nlms", true) == row_value(l1, "mwf-nlms", true));
  CHECK(row_value(s1, "mwf-rls", false) == row_value(l1, "mwf-rls", false));
}

TEST_CASE("instrumented full-rank NLMS counts equal the table row exactly") {
  for (int m : {8, 10, 24, 64}) {
    const CountVerification v = count_verify("fullrank_nlms", m, 1);
    CHECK(v.measured.adds == static_cast<unsigned long long>(v.table_adds));
    CHECK(v.measured.mults == static_cast<unsigned long long>(v.table_mults));
    const OpCount expected = expected_measured_counts("fullrank_nlms", m, 1);
    CHECK(v.measured.adds == expected.adds);
    CHECK(v.measured.mults == expected.mults);
  }
}

TEST_CASE("instrumented joint-update counts follow the documented convention") {
  for (int m : {16, 24, 32}) {
    for (int d : {1, 2, 4, 8}) {
      const CountVerification v = count_verify("jio_nlms", m, d);
      const OpCount expected = expected_measured_counts("jio_nlms", m, d);
      CHECK(v.measured.adds == expected.adds);
      CHECK(v.measured.mults == expected.mults);
      // The published row bundles slightly different bookkeeping; it stays
      // within the comparison band of the measured counts.
      const double add_ratio =
          static_cast<double>(v.measured.adds) / static_cast<double>(v.table_adds);
      const double mult_ratio =
          static_cast<double>(v.measured.mults) / static_cast<double>(v.table_mults);
      CHECK(add_ratio >= 0.5);
      CHECK(add_ratio <= 2.0);
      CHECK(mult_ratio >= 0.5);
      CHECK(mult_ratio <= 2.0);
    }
  }
}

TEST_CASE("instrumented joint-update counts scale linearly in the rank") {
  const int m = 32;
  const CountVerification c2 = count_verify("jio_nlms", m, 2);
  const CountVerification c4 = count_verify("jio_nlms", m, 4);
  const CountVerification c8 = count_verify("jio_nlms", m, 8);
  const double slope_lo =
      static_cast<double>(c4.measured.mults - c2.measured.mults) / 2.0;
  const double slope_hi =
      static_cast<double>(c8.measured.mults - c4.measured.mults) / 4.0;
  CHECK(std::abs(slope_hi - slope_lo) <= 0.1 * slope_lo);
  const double add_slope_lo =
      static_cast<double>(c4.measured.adds - c2.measured.adds) / 2.0;
  const double add_slope_hi =
      static_cast<double>(c8.measured.adds - c4.measured.adds) / 4.0;
  CHECK(std::abs(add_slope_hi - add_slope_lo) <= 0.1 * add_slope_lo);
}

TEST_CASE("rank-1 joint update costs one extra addition over full-rank NLMS") {
  // The reduced filter collapses to a scalar gain at D = 1, so the extra
  // additions are O(1). The bank update still adapts an M-length filter, so
  // multiplications keep an extra M-term; assert the documented ratio.
  const int m = 32;
  const CountVerification jio = count_verify("jio_nlms", m, 1);
  const CountVerification nlms = count_verify("fullrank_nlms", m, 1);
  CHECK(jio.measured.adds - nlms.measured.adds <= 2);
  const double mult_ratio =
      static_cast<double>(jio.measured.mults) / static_cast<double>(nlms.measured.mults);
  CHECK(mult_ratio < 1.5);
}

TEST_CASE("instrumented RLS and Krylov-surrogate counts stay within the table band") {
  for (const std::string algo : {"fullrank_rls", "mwf_nlms"}) {
    const CountVerification v = count_verify(algo, 24, 4);
    const double add_ratio =
        static_cast<double>(v.measured.adds) / static_cast<double>(v.table_adds);
    const double mult_ratio =
        static_cast<double>(v.measured.mults) / static_cast<double>(v.table_mults);
    CHECK(add_ratio >= 0.5);
    CHECK(add_ratio <= 2.0);
    CHECK(mult_ratio >= 0.5);
    CHECK(mult_ratio <= 2.0);
  }
  CHECK_THROWS_AS(count_verify("avf", 24, 4), std::invalid_argument);
}

TEST_CASE("counted and plain updates produce identical states") {
  Rng rng(31);
  JioState counted_state = JioState::initial(8, 3, 0.4, 0.6);
  JioState plain_state = counted_state;
  for (int i = 0; i < 10; ++i) {
    SymbolSample s{rng.cgaussian_vector(8), cplx(rng.sign(), 0.0)};
    jio_update_counted(counted_state, s);
    plain_state.update(s);
    CHECK((counted_state.S - plain_state.S).norm() == 0.0);
    CHECK((counted_state.w_bar - plain_state.w_bar).norm() == 0.0);
  }
}

TEST_CASE("receiver factory covers the supported set") {
  for (const std::string name : {"jio_nlms", "fullrank_nlms", "fullrank_rls", "mwf_nlms"}) {
    CHECK(is_supported_algorithm(name));
    AlgorithmConfig cfg;
    cfg.name = name;
    cfg.d = 2;
    auto receiver = make_receiver(cfg, 8, 1.0);
    Rng rng(7);
    const SymbolSample s{rng.cgaussian_vector(8), cplx(1.0, 0.0)};
    CHECK_NOTHROW(receiver->update(s));
    CHECK(receiver->effective_filter().size() == 8);
  }
  CHECK_FALSE(is_supported_algorithm("avf"));
  AlgorithmConfig bad;
  bad.name = "avf";
  CHECK_THROWS_AS(make_receiver(bad, 8, 1.0), ConfigError);
}

TEST_CASE("experiment spec parses from the flat config format") {
  const std::string text =
      "scenario.users = 4\n"
      "scenario.chips = 8\n"
      "experiment.n_symbols = 200\n"
      "experiment.n_runs = 3\n"
      "experiment.rank = 2\n"
      "experiment.algorithms = jio_nlms, fullrank_nlms\n"
      "algo.jio_nlms.mu0 = 0.25\n"
      "algo.jio_nlms.step_mode = projected_energy\n";
  const ExperimentSpec spec = ExperimentSpec::from_config(KeyValueConfig::from_string(text));
  CHECK(spec.scenario.users == 4);
  CHECK(spec.n_symbols == 200);
  CHECK(spec.n_runs == 3);
  CHECK(spec.rank == 2);
  REQUIRE(spec.algorithms.size() == 2);
  CHECK(spec.algorithms[0].mu0 == doctest::Approx(0.25));
  CHECK(spec.algorithms[0].step_mode == StepMode::projected_energy);

  CHECK_THROWS_AS(ExperimentSpec::from_config(
                      KeyValueConfig::from_string("experiment.algorithms = avf\n")),
                  ConfigError);
}

TEST_CASE("sinr learning curves rise, respect the bound, and average correctly") {
  ExperimentSpec spec = small_spec();
  const ExperimentResult result = run_sinr_vs_symbols(spec);
  REQUIRE(result.series.size() == 3);  // two algorithms + bound
  CHECK(result.series.back().algorithm == "mmse_bound");
  const double bound = result.series.back().value.back();

  for (std::size_t ai = 0; ai < 2; ++ai) {
    const Series& s = result.series[ai];
    CHECK(mann_kendall_z(s.value) > 1.6449);  // supervised curves trend upward (5%)
    // Monte Carlo 3-sigma allowance from the per-run spread at the end.
    const RunTraces& traces = result.run_traces[ai];
    const Eigen::VectorXd last = traces.values.col(traces.values.cols() - 1);
    const double mean = last.mean();
    const double sd = std::sqrt((last.array() - mean).square().sum() /
                                std::max<long>(1, last.size() - 1));
    CHECK(s.value.back() <= bound + 3.0 * sd / std::sqrt(double(spec.n_runs)) + 1e-9);
    // Averaging correctness against the retained per-run traces.
    for (Eigen::Index j = 0; j < traces.values.cols(); ++j) {
      CHECK(std::abs(traces.values.col(j).mean() - s.value[j]) < 1e-12);
    }
  }
}

TEST_CASE("rank sweep replicates full-rank values across ranks") {
  ExperimentSpec spec = small_spec();
  spec.ranks = {1, 2, 4};
  spec.n_runs = 6;
  const ExperimentResult result = run_sinr_vs_rank(spec);
  const Series* fullrank = nullptr;
  for (const Series& s : result.series) {
    if (s.algorithm == "fullrank_nlms") fullrank = &s;
  }
  REQUIRE(fullrank != nullptr);
  CHECK(fullrank->value[0] == doctest::Approx(fullrank->value[1]).epsilon(1e-12));
  CHECK(fullrank->value[1] == doctest::Approx(fullrank->value[2]).epsilon(1e-12));
}

TEST_CASE("windowed BER trajectories fall during adaptation on an easy scenario") {
  ExperimentSpec spec = small_spec();
  spec.scenario.snr_db = 14.0;
  spec.n_symbols = 600;
  spec.n_train = 250;
  spec.ber_window = 100;
  spec.algorithms[0].mu0 = 0.3;
  spec.algorithms[0].eta0 = 0.3;
  const ExperimentResult result = run_ber_vs_symbols(spec);
  for (const Series& s : result.series) {
    const double early = s.value[60];
    const double late = s.value.back();
    CHECK(late <= early + 0.02);
  }
}

TEST_CASE("full-dimension Krylov surrogate matches the full-rank filter") {
  ExperimentSpec spec;
  spec.scenario.users = 3;
  spec.scenario.chips = 8;  // M = 16
  spec.scenario.seed = 2;
  spec.n_symbols = 2000;
  spec.n_runs = 32;
  spec.rank = 16;
  spec.sinr_stride = 4;
  spec.algorithms = {{.name = "mwf_nlms", .d = 16, .mu0 = 0.05},
                     {.name = "fullrank_nlms", .d = 16, .mu0 = 0.05}};
  const ExperimentResult r = run_sinr_vs_symbols(spec);
  CHECK(std::abs(r.series[0].value.back() - r.series[1].value.back()) <= 0.2);
}

TEST_CASE("Krylov surrogate lands within a dB of the joint scheme at rank 4") {
  ExperimentSpec spec;
  spec.scenario.seed = 1;
  spec.n_symbols = 1200;
  spec.n_runs = 32;
  spec.rank = 4;
  spec.sinr_stride = 3;
  spec.algorithms = {{.name = "jio_nlms", .d = 4, .mu0 = 0.05, .eta0 = 0.2,
                      .step_mode = StepMode::projected_energy},
                     {.name = "mwf_nlms", .d = 4, .mu0 = 0.05}};
  const ExperimentResult r = run_sinr_vs_symbols(spec);
  CHECK(std::abs(r.series[0].value.back() - r.series[1].value.back()) <= 1.0);
}

TEST_CASE("rank sweep flattens: best rank within half a dB of two ranks up") {
  ExperimentSpec spec;
  spec.scenario.seed = 1;
  spec.n_symbols = 800;
  spec.n_runs = 12;
  spec.ranks = {2, 3, 4, 5, 6};
  spec.sinr_stride = 4;
  spec.algorithms = {{.name = "jio_nlms", .d = 4, .mu0 = 0.05, .eta0 = 0.2,
                      .step_mode = StepMode::projected_energy}};
  const ExperimentResult r = run_sinr_vs_rank(spec);
  const Series& s = r.series[0];
  std::size_t best = 0;
  for (std::size_t i = 0; i < s.value.size(); ++i) {
    if (s.value[i] > s.value[best]) best = i;
  }
  const std::size_t two_up = std::min(best + 2, s.value.size() - 1);
  CHECK(std::abs(s.value[best] - s.value[two_up]) <= 0.5);
}

TEST_CASE("zero-Doppler fading reduces to the static-channel error rates") {
  // The static path normalizes each realized channel while the fading path
  // is normalized in expectation, so the comparison carries a small band on
  // top of binomial noise.
  auto run_variant = [&](bool clarke) {
    ExperimentSpec spec;
    spec.scenario.seed = 3;
    spec.scenario.snr_db = 14;
    if (clarke) {
      spec.scenario.fading = FadingModel::clarke;
      spec.scenario.doppler = 0.0;
    }
    spec.n_symbols = 800;
    spec.n_runs = 32;
    spec.n_train = 250;
    spec.rank = 4;
    spec.algorithms = {{.name = "jio_nlms", .d = 4, .mu0 = 0.05, .eta0 = 0.2,
                        .step_mode = StepMode::projected_energy}};
    return run_ber_vs_symbols(spec).series[0].value.back();
  };
  const double ber_static = run_variant(false);
  const double ber_frozen = run_variant(true);
  CHECK(ber_static <= 0.01);
  CHECK(ber_frozen <= 0.01);
  CHECK(std::abs(ber_static - ber_frozen) <= 0.01);
}

TEST_CASE("identical spec and seed reproduce the emitted CSV byte for byte") {
  ExperimentSpec spec = small_spec();
  spec.n_runs = 4;
  spec.n_symbols = 120;
  const std::string dir = "/tmp/jiofilt_repro_test";
  std::filesystem::remove_all(dir);
  const EmitFiles a = emit(run_sinr_vs_symbols(spec), {dir, "first"});
  const EmitFiles b = emit(run_sinr_vs_symbols(spec), {dir, "second"});
  CHECK(slurp(a.csv) == slurp(b.csv));
  std::filesystem::remove_all(dir);
}

TEST_CASE("emit writes deterministic CSV plus plot and manifest") {
  ExperimentResult result;
  result.experiment = "sinr_vs_symbols";
  result.metric = "sinr_db";
  result.n_runs = 2;
  result.seed = 9;
  result.series = {{"jio_nlms", {1, 2, 3}, {0.5, 1.25, 2.0}},
                   {"mmse_bound", {1, 2, 3}, {3.0, 3.0, 3.0}}};
  result.config_echo = {{"scenario.users", "3"}};

  const std::string dir = "/tmp/jiofilt_emit_test";
  std::filesystem::remove_all(dir);
  const EmitFiles first = emit(result, {dir, "demo"});
  CHECK(std::filesystem::exists(first.csv));
  CHECK(std::filesystem::exists(first.plot));
  CHECK(std::filesystem::exists(first.manifest));
  const std::string csv1 = slurp(first.csv);
  CHECK(csv1.find("experiment,algorithm,x,metric,value,n_runs,seed") == 0);
  CHECK(csv1.find("sinr_vs_symbols,jio_nlms,1,sinr_db,0.5,2,9") != std::string::npos);

  const EmitFiles second = emit(result, {dir, "demo"});
  CHECK(slurp(second.csv) == csv1);

  ExperimentResult empty;
  empty.experiment = "sinr_vs_symbols";
  empty.metric = "sinr_db";
  const EmitFiles files = emit(empty, {dir, "empty"});
  CHECK(slurp(files.csv) == "experiment,algorithm,x,metric,value,n_runs,seed\n");
  CHECK(files.plot.empty());
  std::filesystem::remove_all(dir);
}
