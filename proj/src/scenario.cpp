#include "jiofilt/scenario.hpp"

#include <cmath>
#include <fstream>

#include "jiofilt/config.hpp"

namespace jio {

namespace {

// Substream tags for the per-realization random streams.
enum : std::uint64_t {
  kSetupStream = 0x51,
  kSymbolStream = 0x52,
  kNoiseStream = 0x53,
};

// Offset so ISI edge symbols at negative indices stay addressable.
constexpr long kSymbolIndexOffset = 64;

}  // namespace

void ScenarioConfig::validate() const {
  if (users < 1) throw std::invalid_argument("scenario: users must be >= 1");
  if (chips < 2) throw std::invalid_argument("scenario: chips must be >= 2");
  if (channel_span < 1) throw std::invalid_argument("scenario: channel_span must be >= 1");
  if (paths < 1 || paths > channel_span) {
    throw std::invalid_argument("scenario: need 1 <= paths <= channel_span");
  }
  if (static_cast<int>(path_powers_db.size()) != paths) {
    throw std::invalid_argument("scenario: path_powers_db must list one power per path");
  }
  if (spacing_min < 1 || spacing_max < spacing_min) {
    throw std::invalid_argument("scenario: invalid path spacing range");
  }
  if ((paths - 1) * spacing_max > channel_span - 1) {
    throw std::invalid_argument("scenario: paths cannot fit into channel_span");
  }
  if (isi_span < 1) throw std::invalid_argument("scenario: isi_span must be >= 1");
  if ((isi_span - 1) * chips < channel_span - 1) {
    throw std::invalid_argument(
        "scenario: isi_span too small; multipath tail leaves the modeled symbol window");
  }
  if (snr_db < -100.0 || snr_db > 300.0) {
    throw std::invalid_argument("scenario: snr_db out of range");
  }
  if (power_std_db < 0.0) throw std::invalid_argument("scenario: power_std_db must be >= 0");
  if (fading == FadingModel::clarke && doppler < 0.0) {
    throw std::invalid_argument("scenario: doppler must be >= 0");
  }
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  const KeyValueConfig kv = KeyValueConfig::from_file(path);
  return scenario_from_config(kv);
}

ClarkePathGen::ClarkePathGen(double fd_t, Rng& rng) : fd_t_(fd_t) {
  cos_alpha_.resize(kOscillators);
  phase_.resize(kOscillators);
  for (int n = 0; n < kOscillators; ++n) {
    cos_alpha_[n] = std::cos(2.0 * M_PI * rng.uniform());
    phase_[n] = 2.0 * M_PI * rng.uniform();
  }
}

cplx ClarkePathGen::at(long symbol) const {
  cplx sum{};
  for (int n = 0; n < kOscillators; ++n) {
    const double arg = 2.0 * M_PI * fd_t_ * static_cast<double>(symbol) * cos_alpha_[n] +
                       phase_[n];
    sum += cplx(std::cos(arg), std::sin(arg));
  }
  return sum / std::sqrt(static_cast<double>(kOscillators));
}

double ScenarioRealization::symbol(int user, long i) const {
  const long shifted = i + kSymbolIndexOffset;
  if (shifted < 0) {
    throw std::out_of_range("scenario: symbol index " + std::to_string(i) +
                            " before the stream start");
  }
  std::uint64_t s = derive_seed(config.seed ^ kSymbolStream,
                                (static_cast<std::uint64_t>(user) << 40) ^
                                    static_cast<std::uint64_t>(shifted));
  return (splitmix64(s) & 1u) ? 1.0 : -1.0;
}

CVector ScenarioRealization::channel_at(int user, long i) const {
  if (config.fading == FadingModel::static_channel) {
    return static_channels[user];
  }
  CVector h = CVector::Zero(config.channel_span);
  for (int j = 0; j < config.paths; ++j) {
    h[path_delays[user][j]] = path_scales[j] * clarke_paths[user][j].at(i);
  }
  return h;
}

CMatrix ScenarioRealization::code_matrix(int user) const {
  const int n = config.chips;
  const int w = config.symbol_window();
  CMatrix c = CMatrix::Zero(static_cast<Index>(w) * n, w);
  for (int j = 0; j < w; ++j) {
    for (int q = 0; q < n; ++q) {
      c(static_cast<Index>(j) * n + q, j) = signatures(q, user);
    }
  }
  return c;
}

CMatrix ScenarioRealization::conv_matrix(int user, long i) const {
  const int m = observation_dim();
  const int w = config.symbol_window();
  const int n = config.chips;
  const int total_chips = w * n;
  const int window_start = (config.isi_span - 1) * n;
  const CVector h = channel_at(user, i);
  CMatrix out = CMatrix::Zero(m, total_chips);
  for (int col = 0; col < total_chips; ++col) {
    for (int tap = 0; tap < config.channel_span; ++tap) {
      const int row = col + tap - window_start;
      if (row >= 0 && row < m) out(row, col) = h[tap];
    }
  }
  return out;
}

CVector ScenarioRealization::user_contribution(int user, long i) const {
  const int m = observation_dim();
  const int n = config.chips;
  const int w = config.symbol_window();
  const int window_start = (config.isi_span - 1) * n;
  const CVector h = channel_at(user, i);
  const double amp = amplitudes[user];

  // Direct convolution of the windowed chip stream with the channel; chips
  // outside the modeled 2Ls-1 symbol block are zero by the model.
  CVector r = CVector::Zero(m);
  for (int mm = 0; mm < m; ++mm) {
    cplx acc{};
    for (int tap = 0; tap < config.channel_span; ++tap) {
      const int chip = window_start + mm - tap;
      if (chip < 0 || chip >= w * n) continue;
      const int block = chip / n;                       // 0..w-1
      const long sym_index = i + block - (config.isi_span - 1);
      const double chip_value = signatures(chip % n, user) * symbol(user, sym_index);
      acc += h[tap] * chip_value;
    }
    r[mm] = amp * acc;
  }
  return r;
}

CVector ScenarioRealization::noise(long i) const {
  const int m = observation_dim();
  CVector n_vec = CVector::Zero(m);
  if (noise_var <= 0.0) return n_vec;
  Rng rng(derive_seed(config.seed ^ kNoiseStream, static_cast<std::uint64_t>(i)));
  const double scale = std::sqrt(noise_var);
  for (int q = 0; q < m; ++q) n_vec[q] = scale * rng.cgaussian();
  return n_vec;
}

ScenarioRealization generate(const ScenarioConfig& config) {
  config.validate();
  ScenarioRealization real;
  real.config = config;
  Rng rng(derive_seed(config.seed, kSetupStream));

  const int k = config.users;
  const int n = config.chips;
  const double chip_scale = 1.0 / std::sqrt(static_cast<double>(n));
  real.signatures.resize(n, k);
  for (int u = 0; u < k; ++u) {
    for (int q = 0; q < n; ++q) real.signatures(q, u) = rng.sign() * chip_scale;
  }

  double total = 0.0;
  std::vector<double> powers(config.paths);
  for (int j = 0; j < config.paths; ++j) {
    powers[j] = std::pow(10.0, config.path_powers_db[j] / 10.0);
    total += powers[j];
  }
  real.path_scales.resize(config.paths);
  for (int j = 0; j < config.paths; ++j) {
    real.path_scales[j] = std::sqrt(powers[j] / total);
  }

  real.path_delays.resize(k);
  for (int u = 0; u < k; ++u) {
    real.path_delays[u].resize(config.paths);
    int delay = 0;
    for (int j = 0; j < config.paths; ++j) {
      real.path_delays[u][j] = delay;
      if (j + 1 < config.paths) {
        delay += rng.uniform_int(config.spacing_min, config.spacing_max);
      }
    }
  }

  if (config.fading == FadingModel::static_channel) {
    real.static_channels.resize(k);
    for (int u = 0; u < k; ++u) {
      CVector h = CVector::Zero(config.channel_span);
      for (int j = 0; j < config.paths; ++j) {
        h[real.path_delays[u][j]] = real.path_scales[j] * rng.cgaussian();
      }
      const double norm = h.norm();
      if (norm <= 0.0) {
        h[real.path_delays[u][0]] = 1.0;
      } else {
        h /= norm;
      }
      real.static_channels[u] = std::move(h);
    }
  } else {
    real.clarke_paths.resize(k);
    for (int u = 0; u < k; ++u) {
      real.clarke_paths[u].reserve(config.paths);
      for (int j = 0; j < config.paths; ++j) {
        real.clarke_paths[u].emplace_back(config.doppler, rng);
      }
    }
  }

  real.amplitudes.resize(k);
  for (int u = 0; u < k; ++u) {
    const double gain_db = config.power_std_db * rng.gaussian();
    real.amplitudes[u] = std::pow(10.0, gain_db / 20.0);
  }

  real.noise_var = std::pow(10.0, -config.snr_db / 10.0);
  return real;
}

SymbolSample received_vector(const ScenarioRealization& real, long i) {
  if (i < 0) throw std::out_of_range("received_vector: symbol index must be >= 0");
  CVector r = real.noise(i);
  for (int u = 0; u < real.config.users; ++u) {
    r += real.user_contribution(u, i);
  }
  return {std::move(r), cplx(real.symbol(0, i), 0.0)};
}

ExactStats exact_stats(const ScenarioRealization& real, long at_symbol) {
  if (real.config.fading == FadingModel::clarke && at_symbol < 0) {
    throw std::invalid_argument(
        "exact_stats: time-varying channel requires a snapshot symbol index");
  }
  const long snap = std::max<long>(at_symbol, 0);
  const int m = real.observation_dim();
  CMatrix r_full = real.noise_var * CMatrix::Identity(m, m);
  CVector steering;
  CMatrix g1;
  for (int u = 0; u < real.config.users; ++u) {
    const CMatrix g = real.conv_matrix(u, snap) * real.code_matrix(u);
    const double a2 = real.amplitudes[u] * real.amplitudes[u];
    r_full += a2 * (g * g.adjoint());
    if (u == 0) g1 = g;
  }
  steering = real.amplitudes[0] * g1.col(real.config.isi_span - 1);
  CMatrix r_sig = steering * steering.adjoint();
  ExactStats out{
      SecondOrderStats(HermitianMatrix::symmetrized(r_full), steering, 1.0),
      std::move(r_sig),
      CMatrix{},
      steering,
  };
  out.R_interference = out.stats.R.mat() - out.R_signal;
  return out;
}

double sinr_db(const CVector& w, const ExactStats& stats) {
  if (w.size() != stats.stats.dim()) {
    throw std::invalid_argument("sinr_db: filter length mismatch");
  }
  const double num = (w.adjoint() * stats.R_signal * w)(0).real();
  const double den = (w.adjoint() * stats.R_interference * w)(0).real();
  if (!(den > 0.0)) {
    throw std::invalid_argument("sinr_db: zero interference-plus-noise power");
  }
  return 10.0 * std::log10(num / den);
}

CMatrix clarke_fading(double fd_t, int n_paths, long n_symbols, std::uint64_t seed) {
  if (fd_t < 0.0) throw std::invalid_argument("clarke_fading: fd_t must be >= 0");
  if (n_paths < 1 || n_symbols < 1) {
    throw std::invalid_argument("clarke_fading: need n_paths >= 1 and n_symbols >= 1");
  }
  Rng rng(derive_seed(seed, 0xC1A));
  CMatrix series(n_paths, n_symbols);
  for (int j = 0; j < n_paths; ++j) {
    ClarkePathGen gen(fd_t, rng);
    for (long i = 0; i < n_symbols; ++i) series(j, i) = gen.at(i);
  }
  return series;
}

double ber_estimate(const std::vector<cplx>& decisions, const std::vector<cplx>& truth) {
  if (decisions.size() != truth.size()) {
    throw std::invalid_argument("ber_estimate: sequence lengths differ");
  }
  if (decisions.empty()) throw std::invalid_argument("ber_estimate: empty window");
  long errors = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if ((decisions[i].real() >= 0.0) != (truth[i].real() >= 0.0)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(decisions.size());
}

std::vector<double> ber_windowed(const std::vector<cplx>& decisions,
                                 const std::vector<cplx>& truth, int window) {
  if (decisions.size() != truth.size()) {
    throw std::invalid_argument("ber_windowed: sequence lengths differ");
  }
  if (window < 1) throw std::invalid_argument("ber_windowed: window must be >= 1");
  if (decisions.empty()) throw std::invalid_argument("ber_windowed: empty window");
  std::vector<int> err(decisions.size());
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    err[i] = ((decisions[i].real() >= 0.0) != (truth[i].real() >= 0.0)) ? 1 : 0;
  }
  std::vector<double> out(decisions.size());
  long running = 0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    running += err[i];
    if (i >= static_cast<std::size_t>(window)) running -= err[i - window];
    const double denom = static_cast<double>(std::min<std::size_t>(i + 1, window));
    out[i] = static_cast<double>(running) / denom;
  }
  return out;
}

void dump_realization(const ScenarioRealization& real, const std::string& path,
                      long n_symbols) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("dump_realization: cannot open " + path);
  os << "# section,key,values\n";
  os << "config,users," << real.config.users << "\n";
  os << "config,chips," << real.config.chips << "\n";
  os << "config,channel_span," << real.config.channel_span << "\n";
  os << "config,noise_var," << real.noise_var << "\n";
  os << "config,seed," << real.config.seed << "\n";
  for (int u = 0; u < real.config.users; ++u) {
    os << "signature," << u;
    for (int q = 0; q < real.config.chips; ++q) os << "," << real.signatures(q, u);
    os << "\n";
  }
  for (int u = 0; u < real.config.users; ++u) {
    const CVector h = real.channel_at(u, 0);
    os << "channel," << u;
    for (Index t = 0; t < h.size(); ++t) {
      os << "," << h[t].real() << (h[t].imag() >= 0 ? "+" : "") << h[t].imag() << "i";
    }
    os << "\n";
  }
  os << "amplitudes,all";
  for (int u = 0; u < real.config.users; ++u) os << "," << real.amplitudes[u];
  os << "\n";
  for (int u = 0; u < real.config.users; ++u) {
    os << "symbols," << u;
    for (long i = 0; i < n_symbols; ++i) os << "," << real.symbol(u, i);
    os << "\n";
  }
}

}  // namespace jio
