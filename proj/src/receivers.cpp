#include "jiofilt/harness.hpp"

namespace jio {

namespace {

class JioReceiver final : public Receiver {
 public:
  JioReceiver(const AlgorithmConfig& c, Index m)
      : name_(c.name),
        state_(JioState::initial(m, c.d, c.mu0, c.eta0, c.step_mode)) {}

  cplx output(const CVector& r) const override { return state_.output(r); }
  cplx update(const SymbolSample& s) override { return state_.update(s); }
  CVector effective_filter() const override { return state_.effective_filter(); }
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  JioState state_;
};

class NlmsReceiver final : public Receiver {
 public:
  NlmsReceiver(const AlgorithmConfig& c, Index m)
      : name_(c.name), state_(FullRankNlmsState::initial(m, c.mu0)) {}

  cplx output(const CVector& r) const override { return state_.output(r); }
  cplx update(const SymbolSample& s) override { return state_.update(s); }
  CVector effective_filter() const override { return state_.w; }
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  FullRankNlmsState state_;
};

class RlsReceiver final : public Receiver {
 public:
  RlsReceiver(const AlgorithmConfig& c, Index m, double mean_input_power)
      : name_(c.name),
        state_(FullRankRlsState::initial(
            m, c.lambda, c.rls_delta_scale * std::max(mean_input_power, 1e-12))) {}

  cplx output(const CVector& r) const override { return state_.output(r); }
  cplx update(const SymbolSample& s) override { return state_.update(s); }
  CVector effective_filter() const override { return state_.w; }
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  FullRankRlsState state_;
};

class MwfReceiver final : public Receiver {
 public:
  MwfReceiver(const AlgorithmConfig& c, Index m)
      : name_(c.name),
        state_(MwfNlmsState::initial(m, c.d, c.mu0, c.forget, c.rebuild_every)) {}

  cplx output(const CVector& r) const override { return state_.output(r); }
  cplx update(const SymbolSample& s) override { return state_.update(s); }
  CVector effective_filter() const override { return state_.effective_filter(); }
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  MwfNlmsState state_;
};

}  // namespace

bool is_supported_algorithm(const std::string& name) {
  return name == "jio_nlms" || name == "fullrank_nlms" || name == "fullrank_rls" ||
         name == "mwf_nlms";
}

std::unique_ptr<Receiver> make_receiver(const AlgorithmConfig& config, Index m,
                                        double mean_input_power) {
  if (config.name == "jio_nlms") return std::make_unique<JioReceiver>(config, m);
  if (config.name == "fullrank_nlms") return std::make_unique<NlmsReceiver>(config, m);
  if (config.name == "fullrank_rls") {
    return std::make_unique<RlsReceiver>(config, m, mean_input_power);
  }
  if (config.name == "mwf_nlms") return std::make_unique<MwfReceiver>(config, m);
  throw ConfigError("make_receiver: unknown algorithm '" + config.name + "'");
}

}  // namespace jio
