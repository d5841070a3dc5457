#include "jiofilt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "jiofilt/mmse.hpp"
#include "jiofilt/plot.hpp"
#include "jiofilt/rng.hpp"

namespace jio {

namespace {

void parallel_runs(int n_runs, int threads, const std::function<void(int)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, n_runs);
  if (workers <= 1) {
    for (int r = 0; r < n_runs; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int r; (r = next.fetch_add(1)) < n_runs;) {
        try {
          body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double safe_sinr(const CVector& w, const ExactStats& stats) {
  if (!w.allFinite() || w.norm() < 1e-15) return std::numeric_limits<double>::quiet_NaN();
  return sinr_db(w, stats);
}

// A zero-initialized filter has no defined SINR; report the value at the
// first nonzero filter for the leading samples.
void fill_leading_nans(std::vector<double>& v) {
  double first = std::numeric_limits<double>::quiet_NaN();
  for (double x : v) {
    if (std::isfinite(x)) {
      first = x;
      break;
    }
  }
  if (!std::isfinite(first)) return;
  for (double& x : v) {
    if (std::isfinite(x)) break;
    x = first;
  }
}

std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentSpec& spec) {
  std::vector<std::pair<std::string, std::string>> echo;
  auto put = [&](const std::string& k, const std::string& v) { echo.emplace_back(k, v); };
  const ScenarioConfig& sc = spec.scenario;
  put("scenario.users", std::to_string(sc.users));
  put("scenario.chips", std::to_string(sc.chips));
  put("scenario.channel_span", std::to_string(sc.channel_span));
  put("scenario.paths", std::to_string(sc.paths));
  {
    std::ostringstream os;
    for (std::size_t i = 0; i < sc.path_powers_db.size(); ++i) {
      os << (i ? "," : "") << sc.path_powers_db[i];
    }
    put("scenario.path_powers_db", os.str());
  }
  put("scenario.spacing_min", std::to_string(sc.spacing_min));
  put("scenario.spacing_max", std::to_string(sc.spacing_max));
  put("scenario.isi_span", std::to_string(sc.isi_span));
  put("scenario.snr_db", std::to_string(sc.snr_db));
  put("scenario.power_std_db", std::to_string(sc.power_std_db));
  put("scenario.fading", sc.fading == FadingModel::clarke ? "clarke" : "static");
  put("scenario.doppler", std::to_string(sc.doppler));
  put("scenario.seed", std::to_string(sc.seed));
  put("experiment.n_symbols", std::to_string(spec.n_symbols));
  put("experiment.n_runs", std::to_string(spec.n_runs));
  put("experiment.n_train", std::to_string(spec.n_train));
  {
    std::ostringstream os;
    for (std::size_t i = 0; i < spec.ranks.size(); ++i) os << (i ? "," : "") << spec.ranks[i];
    put("experiment.ranks", os.str());
  }
  for (const AlgorithmConfig& a : spec.algorithms) {
    const std::string prefix = "algo." + a.name + ".";
    put(prefix + "d", std::to_string(a.d));
    put(prefix + "mu0", std::to_string(a.mu0));
    if (a.name == "jio_nlms") {
      put(prefix + "eta0", std::to_string(a.eta0));
      put(prefix + "step_mode",
          a.step_mode == StepMode::full_energy ? "full_energy" : "projected_energy");
    }
    if (a.name == "fullrank_rls") put(prefix + "lambda", std::to_string(a.lambda));
    if (a.name == "mwf_nlms") {
      put(prefix + "forget", std::to_string(a.forget));
      put(prefix + "rebuild_every", std::to_string(a.rebuild_every));
    }
  }
  return echo;
}

bool is_reduced_rank(const std::string& name) {
  return name == "jio_nlms" || name == "mwf_nlms";
}

struct RunData {
  ScenarioRealization real;
  ExactStats exact;
  double bound_sinr = 0.0;
  double mean_power = 1.0;
  std::vector<SymbolSample> samples;
};

RunData prepare_run(const ExperimentSpec& spec, int run) {
  ScenarioConfig cfg = spec.scenario;
  cfg.seed = derive_seed(spec.scenario.seed, static_cast<std::uint64_t>(run));
  ScenarioRealization real = generate(cfg);
  const long snapshot = (cfg.fading == FadingModel::clarke) ? 0 : -1;
  ExactStats exact = exact_stats(real, snapshot);
  const double bound = sinr_db(full_rank_wiener(exact.stats).w, exact);
  const double mean_power =
      exact.stats.R.trace_real() / static_cast<double>(exact.stats.dim());
  std::vector<SymbolSample> samples;
  samples.reserve(spec.n_symbols);
  for (long i = 0; i < spec.n_symbols; ++i) samples.push_back(received_vector(real, i));
  return RunData{std::move(real), std::move(exact), bound, mean_power, std::move(samples)};
}

}  // namespace

void ExperimentSpec::validate() const {
  scenario.validate();
  if (algorithms.empty()) throw ConfigError("experiment: no algorithms configured");
  for (const AlgorithmConfig& a : algorithms) {
    if (!is_supported_algorithm(a.name)) {
      throw ConfigError("experiment: unsupported algorithm '" + a.name + "'");
    }
    if (a.d < 1 || a.d > scenario.observation_dim()) {
      throw ConfigError("experiment: rank out of range for algorithm " + a.name);
    }
  }
  if (n_symbols < 1) throw ConfigError("experiment: n_symbols must be >= 1");
  if (n_runs < 1) throw ConfigError("experiment: n_runs must be >= 1");
  if (n_train < 0) throw ConfigError("experiment: n_train must be >= 0");
  if (ranks.empty()) throw ConfigError("experiment: ranks list is empty");
  for (int d : ranks) {
    if (d < 1 || d > scenario.observation_dim()) {
      throw ConfigError("experiment: rank " + std::to_string(d) + " out of range");
    }
  }
  if (rank < 1 || rank > scenario.observation_dim()) {
    throw ConfigError("experiment: operating rank out of range");
  }
  if (sinr_stride < 1) throw ConfigError("experiment: sinr_stride must be >= 1");
  if (ber_window < 1) throw ConfigError("experiment: ber_window must be >= 1");
}

ExperimentSpec ExperimentSpec::from_config(const KeyValueConfig& kv) {
  ExperimentSpec spec;
  spec.scenario = scenario_from_config(kv);
  spec.n_symbols = kv.get_int("experiment.n_symbols", spec.n_symbols);
  spec.n_runs = static_cast<int>(kv.get_int("experiment.n_runs", spec.n_runs));
  spec.n_train = kv.get_int("experiment.n_train", spec.n_train);
  spec.sinr_stride = static_cast<int>(kv.get_int("experiment.sinr_stride", spec.sinr_stride));
  spec.ber_window = static_cast<int>(kv.get_int("experiment.ber_window", spec.ber_window));
  spec.threads = static_cast<int>(kv.get_int("experiment.threads", spec.threads));
  if (kv.has("experiment.ranks")) {
    spec.ranks.clear();
    for (double v : kv.get_double_list("experiment.ranks", {})) {
      spec.ranks.push_back(static_cast<int>(v));
    }
  }
  spec.rank = static_cast<int>(kv.get_int("experiment.rank", spec.rank));

  std::vector<std::string> names;
  {
    std::istringstream is(kv.get_string(
        "experiment.algorithms", "jio_nlms,fullrank_nlms,fullrank_rls,mwf_nlms"));
    std::string item;
    while (std::getline(is, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b != std::string::npos) names.push_back(item.substr(b, e - b + 1));
    }
  }
  const int default_rank = spec.rank;
  for (const std::string& name : names) {
    AlgorithmConfig a;
    a.name = name;
    a.d = kv.get_int("algo." + name + ".d", default_rank);
    a.mu0 = kv.get_double("algo." + name + ".mu0", name == "fullrank_nlms" ? 0.3 : 0.5);
    a.eta0 = kv.get_double("algo." + name + ".eta0", 0.5);
    a.lambda = kv.get_double("algo." + name + ".lambda", 0.998);
    a.forget = kv.get_double("algo." + name + ".forget", 0.998);
    a.rebuild_every =
        static_cast<int>(kv.get_int("algo." + name + ".rebuild_every", 25));
    const std::string mode = kv.get_string("algo." + name + ".step_mode", "full_energy");
    if (mode == "full_energy") {
      a.step_mode = StepMode::full_energy;
    } else if (mode == "projected_energy") {
      a.step_mode = StepMode::projected_energy;
    } else {
      throw ConfigError("experiment: bad step_mode '" + mode + "'");
    }
    spec.algorithms.push_back(std::move(a));
  }
  spec.validate();
  return spec;
}

ExperimentResult run_sinr_vs_rank(const ExperimentSpec& spec) {
  spec.validate();
  const int n_runs = spec.n_runs;
  const std::size_t n_ranks = spec.ranks.size();
  const long window_start = spec.n_symbols - std::max<long>(spec.n_symbols / 10, 1);

  // values[alg][rank][run]
  std::vector<std::vector<std::vector<double>>> values(
      spec.algorithms.size(),
      std::vector<std::vector<double>>(n_ranks, std::vector<double>(n_runs, 0.0)));
  std::vector<double> bounds(n_runs, 0.0);

  parallel_runs(n_runs, spec.threads, [&](int run) {
    const RunData data = prepare_run(spec, run);
    bounds[run] = data.bound_sinr;
    for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
      const AlgorithmConfig& algo = spec.algorithms[ai];
      // Full-rank algorithms do not depend on D; adapt once and replicate.
      const std::size_t sweeps = is_reduced_rank(algo.name) ? n_ranks : 1;
      for (std::size_t di = 0; di < sweeps; ++di) {
        AlgorithmConfig cfg = algo;
        cfg.d = spec.ranks[di];
        auto receiver = make_receiver(cfg, data.exact.stats.dim(), data.mean_power);
        double acc = 0.0;
        long count = 0;
        for (long i = 0; i < spec.n_symbols; ++i) {
          receiver->update(data.samples[i]);
          if (i >= window_start && (i - window_start) % spec.sinr_stride == 0) {
            const double s = safe_sinr(receiver->effective_filter(), data.exact);
            if (std::isfinite(s)) {
              acc += s;
              ++count;
            }
          }
        }
        const double mean = count > 0 ? acc / count : std::numeric_limits<double>::quiet_NaN();
        if (sweeps == 1) {
          for (std::size_t all = 0; all < n_ranks; ++all) values[ai][all][run] = mean;
        } else {
          values[ai][di][run] = mean;
        }
      }
    }
  });

  ExperimentResult result;
  result.experiment = "sinr_vs_rank";
  result.metric = "sinr_db";
  result.n_runs = n_runs;
  result.seed = spec.scenario.seed;
  result.config_echo = echo_config(spec);
  for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
    Series s;
    s.algorithm = spec.algorithms[ai].name;
    for (std::size_t di = 0; di < n_ranks; ++di) {
      double acc = 0.0;
      for (int run = 0; run < n_runs; ++run) acc += values[ai][di][run];
      s.x.push_back(spec.ranks[di]);
      s.value.push_back(acc / n_runs);
    }
    result.series.push_back(std::move(s));
  }
  {
    Series bound;
    bound.algorithm = "mmse_bound";
    double acc = 0.0;
    for (int run = 0; run < n_runs; ++run) acc += bounds[run];
    const double mean_bound = acc / n_runs;
    for (std::size_t di = 0; di < n_ranks; ++di) {
      bound.x.push_back(spec.ranks[di]);
      bound.value.push_back(mean_bound);
    }
    result.series.push_back(std::move(bound));
  }
  return result;
}

ExperimentResult run_sinr_vs_symbols(const ExperimentSpec& spec) {
  spec.validate();
  const int n_runs = spec.n_runs;
  const long n_points = (spec.n_symbols + spec.sinr_stride - 1) / spec.sinr_stride;

  std::vector<Eigen::MatrixXd> traces(
      spec.algorithms.size(), Eigen::MatrixXd::Zero(n_runs, n_points));
  std::vector<double> bounds(n_runs, 0.0);

  parallel_runs(n_runs, spec.threads, [&](int run) {
    const RunData data = prepare_run(spec, run);
    bounds[run] = data.bound_sinr;
    for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
      AlgorithmConfig cfg = spec.algorithms[ai];
      cfg.d = spec.rank;
      auto receiver = make_receiver(cfg, data.exact.stats.dim(), data.mean_power);
      std::vector<double> series(n_points, std::numeric_limits<double>::quiet_NaN());
      long point = 0;
      for (long i = 0; i < spec.n_symbols; ++i) {
        receiver->update(data.samples[i]);
        if (i % spec.sinr_stride == 0) {
          series[point++] = safe_sinr(receiver->effective_filter(), data.exact);
        }
      }
      fill_leading_nans(series);
      for (long j = 0; j < n_points; ++j) traces[ai](run, j) = series[j];
    }
  });

  ExperimentResult result;
  result.experiment = "sinr_vs_symbols";
  result.metric = "sinr_db";
  result.n_runs = n_runs;
  result.seed = spec.scenario.seed;
  result.config_echo = echo_config(spec);
  for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
    Series s;
    s.algorithm = spec.algorithms[ai].name;
    for (long j = 0; j < n_points; ++j) {
      s.x.push_back(static_cast<double>(j * spec.sinr_stride + 1));
      s.value.push_back(traces[ai].col(j).mean());
    }
    result.series.push_back(std::move(s));
    if (spec.keep_run_traces) {
      result.run_traces.push_back({spec.algorithms[ai].name, traces[ai]});
    }
  }
  {
    Series bound;
    bound.algorithm = "mmse_bound";
    double acc = 0.0;
    for (int run = 0; run < n_runs; ++run) acc += bounds[run];
    const double mean_bound = acc / n_runs;
    for (long j = 0; j < n_points; ++j) {
      bound.x.push_back(static_cast<double>(j * spec.sinr_stride + 1));
      bound.value.push_back(mean_bound);
    }
    result.series.push_back(std::move(bound));
  }
  return result;
}

ExperimentResult run_ber_vs_symbols(const ExperimentSpec& spec) {
  spec.validate();
  const int n_runs = spec.n_runs;
  const long n = spec.n_symbols;

  // Windowed per-run BER, windowing applied within each run before
  // averaging (linear, so order does not matter for the mean).
  std::vector<Eigen::MatrixXd> traces(
      spec.algorithms.size(), Eigen::MatrixXd::Zero(n_runs, n));

  parallel_runs(n_runs, spec.threads, [&](int run) {
    const RunData data = prepare_run(spec, run);
    for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
      AlgorithmConfig cfg = spec.algorithms[ai];
      cfg.d = spec.rank;
      auto receiver = make_receiver(cfg, data.exact.stats.dim(), data.mean_power);
      std::vector<cplx> estimates(n);
      std::vector<cplx> truth(n);
      for (long i = 0; i < n; ++i) {
        const SymbolSample& s = data.samples[i];
        const cplx x = receiver->output(s.r);
        const cplx target = (i < spec.n_train) ? s.d : bpsk_slice(x);
        receiver->update(SymbolSample{s.r, target});
        estimates[i] = x;
        truth[i] = s.d;
      }
      const std::vector<double> windowed = ber_windowed(estimates, truth, spec.ber_window);
      for (long i = 0; i < n; ++i) traces[ai](run, i) = windowed[i];
    }
  });

  ExperimentResult result;
  result.experiment = "ber_vs_symbols";
  result.metric = "ber";
  result.n_runs = n_runs;
  result.seed = spec.scenario.seed;
  result.config_echo = echo_config(spec);
  for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
    Series s;
    s.algorithm = spec.algorithms[ai].name;
    for (long i = 0; i < n; ++i) {
      s.x.push_back(static_cast<double>(i + 1));
      s.value.push_back(traces[ai].col(i).mean());
    }
    result.series.push_back(std::move(s));
    if (spec.keep_run_traces) {
      result.run_traces.push_back({spec.algorithms[ai].name, traces[ai]});
    }
  }
  return result;
}

EmitFiles emit(const ExperimentResult& result, const EmitPaths& paths) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(paths.directory, ec);
  if (ec) throw IoError("emit: cannot create directory " + paths.directory);
  const fs::path dir(paths.directory);
  EmitFiles files;
  files.csv = (dir / (paths.basename + ".csv")).string();
  files.manifest = (dir / (paths.basename + "_manifest.json")).string();

  {
    std::ofstream os(files.csv);
    if (!os) throw IoError("emit: cannot open " + files.csv);
    os << "experiment,algorithm,x,metric,value,n_runs,seed\n";
    os << std::setprecision(12);
    for (const Series& s : result.series) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        os << result.experiment << ',' << s.algorithm << ',' << s.x[i] << ','
           << result.metric << ',' << s.value[i] << ',' << result.n_runs << ','
           << result.seed << '\n';
      }
    }
    if (!os.good()) throw IoError("emit: write failed for " + files.csv);
  }

  if (result.series.empty()) {
    std::cerr << "emit: warning: empty result, wrote header-only CSV and no plot\n";
  } else {
    files.plot = (dir / (paths.basename + ".svg")).string();
    std::vector<PlotSeries> plot_series;
    for (const Series& s : result.series) {
      plot_series.push_back({s.algorithm, s.x, s.value});
    }
    const bool log_y = result.metric == "ber";
    const std::string x_label =
        result.experiment == "sinr_vs_rank" ? "rank D" : "received symbols";
    write_line_plot_svg(files.plot, result.experiment, x_label, result.metric, plot_series,
                        log_y);
  }

  {
    nlohmann::json manifest;
    manifest["experiment"] = result.experiment;
    manifest["metric"] = result.metric;
    manifest["n_runs"] = result.n_runs;
    manifest["seed"] = result.seed;
    manifest["version"] = kVersion;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : result.config_echo) cfg[k] = v;
    manifest["config"] = cfg;
    nlohmann::json series = nlohmann::json::array();
    for (const Series& s : result.series) series.push_back(s.algorithm);
    manifest["series"] = series;
    manifest["files"] = {{"csv", files.csv}, {"plot", files.plot}};
    std::ofstream os(files.manifest);
    if (!os) throw IoError("emit: cannot open " + files.manifest);
    os << manifest.dump(2) << "\n";
    if (!os.good()) throw IoError("emit: write failed for " + files.manifest);
  }
  return files;
}

TuneResult tune_algorithm(const ExperimentSpec& base, const AlgorithmConfig& algo,
                          std::uint64_t holdout_seed, int tune_runs) {
  static const double kSteps[] = {0.05, 0.1, 0.2, 0.4, 0.8};
  static const double kLambdas[] = {0.995, 0.998};

  ExperimentSpec probe = base;
  probe.algorithms = {algo};
  probe.n_runs = tune_runs;
  probe.scenario.seed = holdout_seed;
  probe.keep_run_traces = false;
  probe.ranks = {static_cast<int>(algo.d)};
  probe.rank = static_cast<int>(algo.d);

  std::vector<AlgorithmConfig> candidates;
  if (algo.name == "jio_nlms") {
    for (double mu : kSteps) {
      for (double eta : kSteps) {
        AlgorithmConfig c = algo;
        c.mu0 = mu;
        c.eta0 = eta;
        candidates.push_back(c);
      }
    }
  } else if (algo.name == "fullrank_rls") {
    for (double lambda : kLambdas) {
      AlgorithmConfig c = algo;
      c.lambda = lambda;
      candidates.push_back(c);
    }
  } else {
    for (double mu : kSteps) {
      AlgorithmConfig c = algo;
      c.mu0 = mu;
      candidates.push_back(c);
    }
  }

  TuneResult best;
  best.score = -std::numeric_limits<double>::infinity();
  for (const AlgorithmConfig& c : candidates) {
    probe.algorithms = {c};
    double score = -std::numeric_limits<double>::infinity();
    try {
      ExperimentResult r = run_sinr_vs_rank(probe);
      score = r.series.front().value.front();
    } catch (const DivergenceError&) {
      // Unstable grid point; scored as unusable.
    }
    if (std::isfinite(score) && score > best.score) {
      best.score = score;
      best.config = c;
    }
  }
  if (!std::isfinite(best.score)) {
    throw DivergenceError("tune_algorithm: every grid point diverged for " + algo.name, 0);
  }
  return best;
}

}  // namespace jio
