// Python bindings for the core operations: dense complex linear algebra
// helpers, batch MMSE designs, streaming adaptive filters, the DS-CDMA
// scenario generator and the complexity accounting.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jiofilt/convergence.hpp"
#include "jiofilt/harness.hpp"
#include "jiofilt/mmse.hpp"
#include "jiofilt/scenario.hpp"

namespace py = pybind11;
using namespace jio;

namespace {

SecondOrderStats make_stats(const CMatrix& r, const CVector& p, double sigma_d2) {
  return SecondOrderStats(HermitianMatrix::symmetrized(r), p, sigma_d2);
}

template <typename State>
py::tuple adapt_sequence(State& state, const CMatrix& received, const CVector& desired,
                         long n_train) {
  if (received.cols() != desired.size()) {
    throw std::invalid_argument("adapt: received needs one column per symbol");
  }
  const long n = desired.size();
  CVector estimates(n);
  CVector errors(n);
  for (long i = 0; i < n; ++i) {
    const CVector r = received.col(i);
    const cplx x = state.output(r);
    const cplx target = (n_train < 0 || i < n_train) ? desired[i] : bpsk_slice(x);
    estimates[i] = x;
    errors[i] = state.update(SymbolSample{r, target});
  }
  return py::make_tuple(estimates, errors);
}

template <typename State, typename Class>
void bind_adaptive_common(Class& cls) {
  cls.def("output", [](const State& st, const CVector& r) { return st.output(r); },
          py::arg("r"))
      .def(
          "update",
          [](State& st, const CVector& r, cplx d) {
            return st.update(SymbolSample{r, d});
          },
          py::arg("r"), py::arg("d"))
      .def("adapt", &adapt_sequence<State>, py::arg("received"), py::arg("desired"),
           py::arg("n_train") = -1,
           "Run the filter over columns of `received`; after n_train symbols the "
           "update target switches to the BPSK decision (n_train < 0 keeps it "
           "supervised). Returns (estimates, errors).");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reduced-rank adaptive filtering toolkit (C++ core)";
  m.attr("__version__") = kVersion;

  py::register_exception<DivergenceError>(m, "DivergenceError");

  // ---- linear algebra -----------------------------------------------------
  m.def(
      "hermitian_solve",
      [](const CMatrix& a, const CVector& b) {
        return hermitian_solve(HermitianMatrix(a), b);
      },
      py::arg("a"), py::arg("b"),
      "Solve A x = b for Hermitian A with an automatic near-singular ridge.");
  m.def("spectral_radius", &spectral_radius, py::arg("a"));
  m.def("pinv", &pinv_rank_limited, py::arg("a"), py::arg("tol") = 1e-12,
        "Moore-Penrose pseudo-inverse with singular values below tol*sigma_max dropped.");
  m.def(
      "orthonormalize",
      [](const CMatrix& a, double tol) {
        Orthonormalized o = orthonormalize_columns(a, tol);
        return py::make_tuple(o.q, o.dropped);
      },
      py::arg("a"), py::arg("tol") = 1e-10,
      "Gram-Schmidt with reorthogonalization; returns (Q, dropped_columns).");

  // ---- batch MMSE designs -------------------------------------------------
  py::class_<SecondOrderStats>(m, "SecondOrderStats")
      .def(py::init(&make_stats), py::arg("R"), py::arg("p"), py::arg("sigma_d2") = 1.0)
      .def_property_readonly("R",
                             [](const SecondOrderStats& s) { return s.R.mat(); })
      .def_readonly("p", &SecondOrderStats::p)
      .def_readonly("sigma_d2", &SecondOrderStats::sigma_d2)
      .def_property_readonly("dim", &SecondOrderStats::dim);

  m.def(
      "full_rank_wiener",
      [](const SecondOrderStats& stats) {
        const FullRankDesign d = full_rank_wiener(stats);
        return py::make_tuple(d.w, d.mmse);
      },
      py::arg("stats"), "Returns (w, mmse) of the full-rank Wiener design.");
  m.def(
      "reduced_wiener",
      [](const SecondOrderStats& stats, const CMatrix& s) {
        const ReducedDesign d = reduced_wiener(stats, ProjectionMatrix{s});
        return py::make_tuple(d.w_bar, d.mmse);
      },
      py::arg("stats"), py::arg("S"), "Returns (w_bar, mmse) for a fixed projection.");
  m.def(
      "reduced_mmse",
      [](const SecondOrderStats& stats, const CMatrix& s) {
        return reduced_mmse(stats, ProjectionMatrix{s});
      },
      py::arg("stats"), py::arg("S"));
  m.def(
      "optimal_projection",
      [](const SecondOrderStats& stats, const CVector& w_bar, bool min_norm) {
        return optimal_projection(stats, w_bar,
                                  min_norm ? ProjectionForm::min_norm
                                           : ProjectionForm::scaled)
            .S;
      },
      py::arg("stats"), py::arg("w_bar"), py::arg("min_norm") = true);
  m.def(
      "alternate_fixed_point",
      [](const SecondOrderStats& stats, Index d, int max_iters, double tol) {
        const FixedPointResult fp = alternate_fixed_point(
            stats, d, identity_projection(stats.dim(), d), max_iters, tol);
        py::dict out;
        out["S"] = fp.design.S.S;
        out["w_bar"] = fp.design.w_bar;
        out["mmse"] = fp.design.mmse;
        out["trace"] = fp.mmse_trace;
        out["iterations"] = fp.iterations;
        out["converged"] = fp.converged;
        return out;
      },
      py::arg("stats"), py::arg("d"), py::arg("max_iters") = 200, py::arg("tol") = 1e-10,
      "Joint batch iteration of the reduced filter and the projection from the "
      "standard [I 0]^T initialization.");
  m.def(
      "krylov_projection",
      [](const SecondOrderStats& stats, Index d) {
        std::vector<Index> dropped;
        const ProjectionMatrix s = krylov_projection(stats, d, &dropped);
        return py::make_tuple(s.S, dropped);
      },
      py::arg("stats"), py::arg("d"),
      "Orthonormal basis of the order-d Krylov subspace span{p, Rp, ...}; returns "
      "(S, dropped_columns).");
  m.def(
      "range_condition",
      [](const SecondOrderStats& stats, const CMatrix& s) {
        const RangeCondition rc = range_condition(stats, ProjectionMatrix{s});
        return py::make_tuple(rc.holds, rc.mmse_gap);
      },
      py::arg("stats"), py::arg("S"), "Returns (holds, mmse_gap).");
  m.def(
      "identity_projection",
      [](Index m_dim, Index d) { return identity_projection(m_dim, d).S; },
      py::arg("m"), py::arg("d"));

  // ---- adaptive algorithms ------------------------------------------------
  py::enum_<StepMode>(m, "StepMode")
      .value("full_energy", StepMode::full_energy)
      .value("projected_energy", StepMode::projected_energy);

  auto jio_cls =
      py::class_<JioState>(m, "JioFilter")
          .def(py::init([](Index m_dim, Index d, double mu0, double eta0, StepMode mode) {
                 return JioState::initial(m_dim, d, mu0, eta0, mode);
               }),
               py::arg("m"), py::arg("d"), py::arg("mu0") = 0.5, py::arg("eta0") = 0.5,
               py::arg("step_mode") = StepMode::full_energy)
          .def_readwrite("S", &JioState::S)
          .def_readwrite("w_bar", &JioState::w_bar)
          .def_readwrite("mu0", &JioState::mu0)
          .def_readwrite("eta0", &JioState::eta0)
          .def_property_readonly("iteration",
                                 [](const JioState& st) { return st.iteration; })
          .def("effective_filter", &JioState::effective_filter);
  bind_adaptive_common<JioState>(jio_cls);

  auto nlms_cls = py::class_<FullRankNlmsState>(m, "NlmsFilter")
                      .def(py::init([](Index m_dim, double mu0) {
                             return FullRankNlmsState::initial(m_dim, mu0);
                           }),
                           py::arg("m"), py::arg("mu0") = 0.3)
                      .def_readwrite("w", &FullRankNlmsState::w)
                      .def_readwrite("mu0", &FullRankNlmsState::mu0);
  bind_adaptive_common<FullRankNlmsState>(nlms_cls);

  auto rls_cls = py::class_<FullRankRlsState>(m, "RlsFilter")
                     .def(py::init([](Index m_dim, double lambda, double delta) {
                            return FullRankRlsState::initial(m_dim, lambda, delta);
                          }),
                          py::arg("m"), py::arg("lambda_") = 0.998,
                          py::arg("delta") = 1e-2)
                     .def_readwrite("w", &FullRankRlsState::w);
  bind_adaptive_common<FullRankRlsState>(rls_cls);

  auto mwf_cls =
      py::class_<MwfNlmsState>(m, "MwfFilter")
          .def(py::init([](Index m_dim, Index d, double mu0, double forget, int rebuild) {
                 return MwfNlmsState::initial(m_dim, d, mu0, forget, rebuild);
               }),
               py::arg("m"), py::arg("d"), py::arg("mu0") = 0.5,
               py::arg("forget") = 0.998, py::arg("rebuild_every") = 25)
          .def_readwrite("S", &MwfNlmsState::S)
          .def_readwrite("w_bar", &MwfNlmsState::w_bar)
          .def("effective_filter", &MwfNlmsState::effective_filter);
  bind_adaptive_common<MwfNlmsState>(mwf_cls);

  // ---- scenario -----------------------------------------------------------
  py::enum_<FadingModel>(m, "FadingModel")
      .value("static_channel", FadingModel::static_channel)
      .value("clarke", FadingModel::clarke);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("users", &ScenarioConfig::users)
      .def_readwrite("chips", &ScenarioConfig::chips)
      .def_readwrite("channel_span", &ScenarioConfig::channel_span)
      .def_readwrite("paths", &ScenarioConfig::paths)
      .def_readwrite("path_powers_db", &ScenarioConfig::path_powers_db)
      .def_readwrite("spacing_min", &ScenarioConfig::spacing_min)
      .def_readwrite("spacing_max", &ScenarioConfig::spacing_max)
      .def_readwrite("isi_span", &ScenarioConfig::isi_span)
      .def_readwrite("snr_db", &ScenarioConfig::snr_db)
      .def_readwrite("power_std_db", &ScenarioConfig::power_std_db)
      .def_readwrite("fading", &ScenarioConfig::fading)
      .def_readwrite("doppler", &ScenarioConfig::doppler)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_property_readonly("observation_dim", &ScenarioConfig::observation_dim);

  py::class_<ExactStats>(m, "ExactStats")
      .def_property_readonly("R", [](const ExactStats& e) { return e.stats.R.mat(); })
      .def_property_readonly("p", [](const ExactStats& e) { return e.stats.p; })
      .def_readonly("R_signal", &ExactStats::R_signal)
      .def_readonly("R_interference", &ExactStats::R_interference)
      .def_readonly("steering", &ExactStats::steering)
      .def_property_readonly("stats", [](const ExactStats& e) { return e.stats; });

  py::class_<ScenarioRealization>(m, "ScenarioRealization")
      .def_property_readonly("observation_dim", &ScenarioRealization::observation_dim)
      .def_readonly("signatures", &ScenarioRealization::signatures)
      .def_readonly("amplitudes", &ScenarioRealization::amplitudes)
      .def_readonly("noise_var", &ScenarioRealization::noise_var)
      .def("symbol", &ScenarioRealization::symbol, py::arg("user"), py::arg("i"))
      .def("channel_at", &ScenarioRealization::channel_at, py::arg("user"), py::arg("i"))
      .def(
          "received",
          [](const ScenarioRealization& real, long i) {
            const SymbolSample s = received_vector(real, i);
            return py::make_tuple(s.r, s.d);
          },
          py::arg("i"), "Returns (r, d) for symbol index i.")
      .def(
          "received_block",
          [](const ScenarioRealization& real, long start, long count) {
            CMatrix r(real.observation_dim(), count);
            CVector d(count);
            for (long i = 0; i < count; ++i) {
              SymbolSample s = received_vector(real, start + i);
              r.col(i) = s.r;
              d[i] = s.d;
            }
            return py::make_tuple(r, d);
          },
          py::arg("start"), py::arg("count"),
          "Columns of received vectors plus desired symbols for a symbol range.")
      .def("exact_stats", &exact_stats, py::arg("at_symbol") = -1);

  m.def("generate", &generate, py::arg("config"));
  m.def("sinr_db", &sinr_db, py::arg("w"), py::arg("exact"));
  m.def("clarke_fading", &clarke_fading, py::arg("fd_t"), py::arg("n_paths"),
        py::arg("n_symbols"), py::arg("seed"));
  m.def("ber_estimate", &ber_estimate, py::arg("decisions"), py::arg("truth"));
  m.def("ber_windowed", &ber_windowed, py::arg("decisions"), py::arg("truth"),
        py::arg("window") = 200);

  // ---- complexity accounting ----------------------------------------------
  m.def(
      "complexity_table",
      [](int m_len, int d, bool printed_product) {
        py::list rows;
        for (const ComplexityRow& row : complexity_table(
                 m_len, d,
                 printed_product ? MwfComplexityForm::printed_product
                                 : MwfComplexityForm::per_stage_sum)) {
          py::dict item;
          item["algorithm"] = row.algorithm;
          item["additions"] = row.additions;
          item["multiplications"] = row.multiplications;
          rows.append(item);
        }
        return rows;
      },
      py::arg("m"), py::arg("d"), py::arg("printed_product") = false,
      "Closed-form per-symbol operation counts for all supported algorithms.");
  m.def(
      "count_verify",
      [](const std::string& algorithm, int m_len, int d) {
        const CountVerification v = count_verify(algorithm, m_len, d);
        py::dict out;
        out["measured_adds"] = v.measured.adds;
        out["measured_mults"] = v.measured.mults;
        out["table_adds"] = v.table_adds;
        out["table_mults"] = v.table_mults;
        return out;
      },
      py::arg("algorithm"), py::arg("m"), py::arg("d"));

  // ---- convergence analysis -------------------------------------------------
  m.def(
      "stability_report",
      [](const SecondOrderStats& stats, Index d, double mu_mean, double nu_mean,
         double sigma_w2) {
        const OptimalPair opt = solve_optimal_pair(stats, d);
        const ConvergenceModel model = build_model(
            stats, opt, identity_projection(stats.dim(), d), mu_mean, nu_mean, sigma_w2);
        const StabilityReport rep = stability_check(model);
        py::dict out;
        out["rho"] = rep.rho;
        out["stable_mean"] = rep.stable_mean;
        out["max_gain_sq"] = rep.max_gain_sq;
        out["stable_msd"] = rep.stable_msd;
        return out;
      },
      py::arg("stats"), py::arg("d"), py::arg("mu_mean"), py::arg("nu_mean"),
      py::arg("sigma_w2"),
      "Spectral-radius stability report of the joint mean-error recursion.");
}
