#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "fxpnlc/channel.hpp"
#include "fxpnlc/cordic.hpp"
#include "fxpnlc/fft.hpp"
#include "fxpnlc/fxp.hpp"
#include "fxpnlc/nlc.hpp"
#include "fxpnlc/optim.hpp"
#include "fxpnlc/rxchain.hpp"
#include "fxpnlc/signal.hpp"

namespace py = pybind11;
using namespace fxpnlc;
using cd = std::complex<double>;

namespace {

dsp::Block<dsp::FxpBackend> block_from(const std::vector<cd>& v, int bits)
{
    dsp::FxpBackend be(bits);
    dsp::Block<dsp::FxpBackend> b;
    b.v.reserve(v.size());
    for (const auto& z : v)
        b.v.push_back(be.from_double(z));
    return b;
}

std::vector<cd> block_to(const dsp::Block<dsp::FxpBackend>& b, int bits)
{
    dsp::FxpBackend be(bits);
    std::vector<cd> out;
    out.reserve(b.v.size());
    for (const auto& z : b.v)
        out.push_back(be.to_double(z));
    return out;
}

} // namespace

PYBIND11_MODULE(_fxpnlc, m)
{
    m.doc() = "fixed-point nonlinearity-compensation testbed";

    // fixed-point core
    py::class_<fxp::FxpWord>(m, "FxpWord")
        .def_readonly("raw", &fxp::FxpWord::raw)
        .def_readonly("bits", &fxp::FxpWord::bits)
        .def("value", &fxp::FxpWord::value)
        .def("__repr__", [](const fxp::FxpWord& w) {
            return "FxpWord(raw=" + std::to_string(w.raw) + ", bits=" + std::to_string(w.bits) +
                   ")";
        });
    m.def("quantize", &fxp::quantize, py::arg("x"), py::arg("bits"));
    m.def("quantize_array", [](const std::vector<double>& xs, int bits) {
        std::vector<double> out;
        out.reserve(xs.size());
        for (double x : xs)
            out.push_back(fxp::quantize(x, bits).value());
        return out;
    });
    m.def("fxp_add", &fxp::fxp_add);
    m.def("fxp_mul", &fxp::fxp_mul);
    m.def("theoretical_sqnr_db", &fxp::theoretical_sqnr_db, py::arg("bits"));
    m.def("measure_sqnr_db",
          [](const std::vector<double>& sig, int bits) {
              return fxp::measure_sqnr_db(sig, bits);
          },
          py::arg("signal"), py::arg("bits"));
    m.def("fft_noise_bound", &dsp::fft_noise_bound, py::arg("n"), py::arg("bits"));

    // DSP kernels
    m.def("fxp_fft",
          [](const std::vector<cd>& x, int bits, bool inverse) {
              auto block = block_from(x, bits);
              dsp::FxpBackend be(bits);
              dsp::FftPlan<dsp::FxpBackend> plan(x.size(), be);
              plan.run(block, inverse);
              return py::make_tuple(block_to(block, bits), block.scale_exp);
          },
          py::arg("x"), py::arg("bits"), py::arg("inverse") = false,
          "radix-2 FFT with conditional block scaling; returns (samples, scale_exp)");
    m.def("fft",
          [](std::vector<cd> x, bool inverse) {
              dsp::FftPlan<dsp::Float64Backend> plan(x.size(), {});
              dsp::fft_f64(plan, std::span(x), inverse);
              return x;
          },
          py::arg("x"), py::arg("inverse") = false);
    m.def("cordic_rotate",
          [](double angle, int iterations, int bits) {
              const auto z =
                  dsp::cordic_rotate(angle, dsp::CordicConfig::for_iterations(iterations), bits);
              return cd(z.re.value(), z.im.value());
          },
          py::arg("angle"), py::arg("iterations"), py::arg("bits"));

    // domain types
    py::class_<LinkSpec>(m, "LinkSpec")
        .def(py::init<>())
        .def_readwrite("alpha_db_per_km", &LinkSpec::alpha_db_per_km)
        .def_readwrite("dispersion_ps_nm_km", &LinkSpec::dispersion_ps_nm_km)
        .def_readwrite("gamma_w_km", &LinkSpec::gamma_w_km)
        .def_readwrite("span_length_m", &LinkSpec::span_length_m)
        .def_readwrite("span_count", &LinkSpec::span_count)
        .def_readwrite("sim_step_m", &LinkSpec::sim_step_m)
        .def_readwrite("edfa_nf_db", &LinkSpec::edfa_nf_db)
        .def("beta2_s2_per_m", &LinkSpec::beta2_s2_per_m)
        .def("total_length_m", &LinkSpec::total_length_m)
        .def("effective_length_m", &LinkSpec::effective_length_m);

    py::enum_<ModFormat>(m, "ModFormat")
        .value("QPSK", ModFormat::kQpsk)
        .value("QAM16", ModFormat::k16Qam);

    py::class_<TxConfig>(m, "TxConfig")
        .def(py::init<>())
        .def_readwrite("format", &TxConfig::format)
        .def_readwrite("n_symbols", &TxConfig::n_symbols)
        .def_readwrite("symbol_rate", &TxConfig::symbol_rate)
        .def_readwrite("rrc_rolloff", &TxConfig::rrc_rolloff)
        .def_readwrite("sps", &TxConfig::sps)
        .def_readwrite("seed", &TxConfig::seed);

    py::class_<DualPolSignal>(m, "DualPolSignal")
        .def(py::init<>())
        .def_readwrite("x", &DualPolSignal::x)
        .def_readwrite("y", &DualPolSignal::y)
        .def_readwrite("sample_rate", &DualPolSignal::sample_rate)
        .def_readwrite("samples_per_symbol", &DualPolSignal::samples_per_symbol)
        .def_readwrite("mean_power_dbm", &DualPolSignal::mean_power_dbm)
        .def("__len__", &DualPolSignal::size);

    py::enum_<nlc::Algo>(m, "Algo")
        .value("CDC", nlc::Algo::kCdc)
        .value("DBP", nlc::Algo::kDbp)
        .value("ESSFM", nlc::Algo::kEssfm);

    py::class_<nlc::NlcPlan>(m, "NlcPlan")
        .def_static("cdc", &nlc::NlcPlan::cdc, py::arg("fft_exp"),
                    py::arg("bits") = std::optional<int>{})
        .def_static("dbp", &nlc::NlcPlan::dbp, py::arg("steps_per_link"), py::arg("fft_exp"),
                    py::arg("bits"), py::arg("launch_dbm"), py::arg("split") = 0.85)
        .def_static("essfm", &nlc::NlcPlan::essfm, py::arg("coeffs"), py::arg("fft_exp"),
                    py::arg("bits"), py::arg("launch_dbm"), py::arg("split") = 0.4)
        .def_readwrite("headroom_shift", &nlc::NlcPlan::headroom_shift)
        .def_readwrite("nonlinear_enabled", &nlc::NlcPlan::nonlinear_enabled)
        .def_readwrite("cordic_iterations", &nlc::NlcPlan::cordic_iterations);

    // channel
    m.def("generate_symbols", &channel::generate_symbols);
    m.def("rrc_shape", &channel::rrc_shape);
    m.def("propagate_link", &channel::propagate_link, py::arg("signal"), py::arg("link"),
          py::arg("launch_power_dbm"), py::arg("seed"), py::arg("noiseless") = false);

    // receiver
    m.def("frontend", &rx::frontend);
    m.def("equalize", &nlc::equalize, py::arg("signal"), py::arg("link"), py::arg("plan"));
    m.def("dispersion_response",
          [](double z_m, const LinkSpec& link, std::size_t n, double fs) {
              return nlc::dispersion_response(z_m, link, n, fs).taps;
          });
    m.def("matched_filter_and_decimate", &rx::matched_filter_and_decimate);
    m.def("estimate_snr",
          [](const DualPolSignal& rxs, const DualPolSignal& txs) {
              const auto est = rx::estimate_snr(rxs, txs);
              py::dict d;
              d["snr_db"] = est.snr_db;
              d["n_symbols_used"] = est.n_symbols_used;
              d["per_pol_db"] = py::make_tuple(est.per_pol_db[0], est.per_pol_db[1]);
              return d;
          });
    m.def("essfm_filter_response_db",
          [](const std::vector<double>& c, std::size_t pts) {
              return nlc::essfm_filter_response_db(c, pts);
          },
          py::arg("coeffs"), py::arg("n_points") = 513);
    m.def("multiplication_count", [](const nlc::NlcPlan& plan, const LinkSpec& link) {
        const auto c = nlc::multiplication_count(plan, link);
        py::dict d;
        d["nonlinear_per_symbol"] = c.nonlinear_per_symbol;
        d["n_nonlinear_blocks"] = c.n_nonlinear_blocks;
        d["n_linear_blocks"] = c.n_linear_blocks;
        d["fft_complex_mults_per_block"] = c.fft_complex_mults_per_block;
        return d;
    });

    // end-to-end convenience: returns SNR in dB for one point
    m.def("simulate_point",
          [](const LinkSpec& link, const TxConfig& tx, double power_dbm,
             const nlc::NlcPlan& plan, bool noiseless) {
              const auto syms = channel::generate_symbols(tx);
              const auto shaped = channel::rrc_shape(syms, tx);
              const auto rx4 =
                  channel::propagate_link(shaped, link, power_dbm, tx.seed + 17, noiseless);
              return rx::run_receiver(rx4, link, plan, syms, tx.symbol_rate, tx.rrc_rolloff)
                  .snr_db;
          },
          py::arg("link"), py::arg("tx"), py::arg("power_dbm"), py::arg("plan"),
          py::arg("noiseless") = false);
}
