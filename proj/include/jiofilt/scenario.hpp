#ifndef JIOFILT_SCENARIO_HPP
#define JIOFILT_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jiofilt/adaptive.hpp"
#include "jiofilt/mmse.hpp"
#include "jiofilt/rng.hpp"
#include "jiofilt/types.hpp"

namespace jio {

enum class FadingModel { static_channel, clarke };

/// Synchronous BPSK DS-CDMA uplink parameters. The observation window spans
/// M = chips + channel_span - 1 samples and covers the center symbol of the
/// desired user (user 0) plus its multipath tail.
struct ScenarioConfig {
  int users = 6;                                    // K
  int chips = 16;                                   // N, processing gain
  int channel_span = 9;                             // L, tap upper bound
  int paths = 3;                                    // active propagation paths
  std::vector<double> path_powers_db = {0.0, -3.0, -6.0};
  int spacing_min = 1;                              // path spacing draw, chips
  int spacing_max = 2;
  int isi_span = 2;                                 // L_s symbols each side
  double snr_db = 15.0;                             // nominal desired-user SNR
  double power_std_db = 1.5;                        // log-normal power spread
  FadingModel fading = FadingModel::static_channel;
  double doppler = 0.0;                             // fd*T for clarke fading
  std::uint64_t seed = 1;

  int observation_dim() const { return chips + channel_span - 1; }  // M
  int symbol_window() const { return 2 * isi_span - 1; }

  void validate() const;

  /// Reads `scenario.*` keys from a flat key = value file.
  static ScenarioConfig from_file(const std::string& path);
};

/// Sum-of-sinusoids Rayleigh path generator (isotropic scattering); each
/// path has unit variance and autocorrelation approaching J0(2 pi fd_T lag).
class ClarkePathGen {
 public:
  static constexpr int kOscillators = 32;

  ClarkePathGen() = default;
  ClarkePathGen(double fd_t, Rng& rng);

  cplx at(long symbol) const;

 private:
  double fd_t_ = 0.0;
  std::vector<double> cos_alpha_;
  std::vector<double> phase_;
};

/// One sampled system realization: codes, channels and amplitudes are drawn
/// at generation; symbols and noise are produced deterministically on demand
/// from the seed, so any horizon can be replayed without storing streams.
struct ScenarioRealization {
  ScenarioConfig config;
  Eigen::MatrixXd signatures;                         // chips x users, +-1/sqrt(N)
  std::vector<std::vector<int>> path_delays;          // per user
  std::vector<double> path_scales;                    // sqrt of normalized powers
  std::vector<CVector> static_channels;               // per user, length L, ||h|| = 1
  std::vector<std::vector<ClarkePathGen>> clarke_paths;  // per user x path
  Eigen::VectorXd amplitudes;                         // per user
  double noise_var = 0.0;                             // sigma^2 per chip

  int observation_dim() const { return config.observation_dim(); }

  /// b_k(i), +-1, defined for any i >= -isi_span (ISI edges included).
  double symbol(int user, long i) const;

  /// Channel vector h_k(i), length channel_span.
  CVector channel_at(int user, long i) const;

  /// Block-diagonal code matrix C_k, (W*N) x W with W = 2*Ls - 1.
  CMatrix code_matrix(int user) const;

  /// Convolution matrix H_k(i), M x (W*N).
  CMatrix conv_matrix(int user, long i) const;

  /// A_k H_k(i) C_k b_k(i) for one user, noise-free.
  CVector user_contribution(int user, long i) const;

  CVector noise(long i) const;
};

ScenarioRealization generate(const ScenarioConfig& config);

/// r(i) plus the desired symbol d(i) = b_0(i).
SymbolSample received_vector(const ScenarioRealization& real, long i);

/// Closed-form second-order statistics with the signal/interference split
/// needed for SINR evaluation.
struct ExactStats {
  SecondOrderStats stats;
  CMatrix R_signal;      // rank-1 desired-symbol term
  CMatrix R_interference;  // everything else incl. noise
  CVector steering;      // A_1 H_1 C_1 e_center
};

/// Exact statistics of the realization. For Clarke fading a snapshot symbol
/// index must be given; the static channel accepts the default.
ExactStats exact_stats(const ScenarioRealization& real, long at_symbol = -1);

/// Output SINR in dB of an effective full-length filter.
double sinr_db(const CVector& w, const ExactStats& stats);

/// Standalone Clarke series: n_paths x n_symbols complex gains.
CMatrix clarke_fading(double fd_t, int n_paths, long n_symbols, std::uint64_t seed);

/// Exact symbol error fraction between sliced decisions and the truth.
double ber_estimate(const std::vector<cplx>& decisions, const std::vector<cplx>& truth);

/// Trailing-window error rate per symbol index (window clipped at the start).
std::vector<double> ber_windowed(const std::vector<cplx>& decisions,
                                 const std::vector<cplx>& truth, int window = 200);

/// Debug dump of a realization (codes, channels, amplitudes and the first
/// n_symbols of the desired stream) in CSV sections.
void dump_realization(const ScenarioRealization& real, const std::string& path,
                      long n_symbols = 16);

}  // namespace jio

#endif  // JIOFILT_SCENARIO_HPP
