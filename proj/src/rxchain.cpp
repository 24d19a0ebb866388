#include "fxpnlc/rxchain.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fxpnlc/channel.hpp"
#include "fxpnlc/fft.hpp"

namespace fxpnlc::rx {

using cd = std::complex<double>;

DualPolSignal frontend(const DualPolSignal& rx4)
{
    if (rx4.samples_per_symbol % 2 != 0)
        throw std::invalid_argument("frontend needs an even samples/symbol input");
    const int factor = rx4.samples_per_symbol / 2;
    DualPolSignal out;
    out.sample_rate = rx4.sample_rate / factor;
    out.samples_per_symbol = 2;
    out.x.reserve(rx4.size() / factor);
    out.y.reserve(rx4.size() / factor);
    for (std::size_t i = 0; i < rx4.size(); i += factor) {
        out.x.push_back(rx4.x[i]);
        out.y.push_back(rx4.y[i]);
    }
    const double p = mean_dualpol_power(out);
    if (p <= 0.0)
        throw std::invalid_argument("cannot normalize an all-zero signal");
    scale_signal(out, 1.0 / std::sqrt(p));
    out.mean_power_dbm = rx4.mean_power_dbm;
    return out;
}

DualPolSignal matched_filter_and_decimate(const DualPolSignal& s2, double symbol_rate,
                                          double rolloff)
{
    const std::size_t n = s2.size();
    if (!dsp::is_power_of_two(n))
        throw std::invalid_argument("matched filter needs a power-of-two signal length");
    const int sps = s2.samples_per_symbol;
    DualPolSignal work = s2;

    const dsp::FftPlan<dsp::Float64Backend> plan(n, {});
    const auto w = dsp::angular_freq_grid(n, s2.sample_rate);
    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k)
        h[k] = channel::rrc_amplitude(w[k] / (2.0 * std::numbers::pi), symbol_rate, rolloff);

    for (auto* pol : {&work.x, &work.y}) {
        dsp::fft_f64(plan, std::span(*pol), false);
        for (std::size_t k = 0; k < n; ++k)
            (*pol)[k] *= h[k];
        dsp::fft_f64(plan, std::span(*pol), true);
    }

    DualPolSignal out;
    out.sample_rate = symbol_rate;
    out.samples_per_symbol = 1;
    out.x.reserve(n / sps);
    out.y.reserve(n / sps);
    for (std::size_t i = 0; i < n; i += sps) {
        out.x.push_back(work.x[i]);
        out.y.push_back(work.y[i]);
    }
    const double e = mean_dualpol_power(out) / 2.0; // per-pol mean symbol energy
    if (e > 0.0)
        scale_signal(out, 1.0 / std::sqrt(e));
    return out;
}

SnrEstimate estimate_snr(const DualPolSignal& rx_symbols, const DualPolSignal& tx_symbols,
                         std::size_t window, std::size_t edge_guard)
{
    const std::size_t n = rx_symbols.size();
    if (n != tx_symbols.size())
        throw std::invalid_argument("rx/tx symbol sequences differ in length");
    if (n == 0)
        throw std::invalid_argument("empty symbol sequences");

    std::size_t used = std::min(window, n);
    if (used == n && n > 2 * edge_guard + 16) {
        // no natural guard left around the central window; keep the
        // overlap-save edge transients out of the estimate
        used = n - 2 * edge_guard;
    }
    const std::size_t start = (n - used) / 2;

    SnrEstimate est;
    est.n_symbols_used = used;
    double lin_sum = 0.0;
    int finite = 0;
    for (int pol = 0; pol < 2; ++pol) {
        const auto& rxv = pol == 0 ? rx_symbols.x : rx_symbols.y;
        const auto& txv = pol == 0 ? tx_symbols.x : tx_symbols.y;
        cd cross{0.0, 0.0};
        double tx_pow = 0.0;
        for (std::size_t i = start; i < start + used; ++i) {
            cross += rxv[i] * std::conj(txv[i]);
            tx_pow += std::norm(txv[i]);
        }
        if (tx_pow == 0.0)
            throw std::invalid_argument("all-zero reference symbols");
        const cd a = cross / tx_pow;
        double err_pow = 0.0;
        for (std::size_t i = start; i < start + used; ++i)
            err_pow += std::norm(rxv[i] - a * txv[i]);
        if (err_pow == 0.0) {
            est.per_pol_db[pol] = std::numeric_limits<double>::infinity();
        } else {
            const double snr = std::norm(a) * tx_pow / err_pow;
            est.per_pol_db[pol] = 10.0 * std::log10(snr);
            lin_sum += snr;
            ++finite;
        }
    }
    if (finite < 2)
        est.snr_db = std::numeric_limits<double>::infinity();
    else
        est.snr_db = 10.0 * std::log10(lin_sum / 2.0);
    return est;
}

SnrEstimate run_receiver(const DualPolSignal& rx4, const LinkSpec& link,
                         const nlc::NlcPlan& plan, const DualPolSignal& tx_symbols,
                         double symbol_rate, double rolloff)
{
    const DualPolSignal s2 = frontend(rx4);
    const DualPolSignal eq = nlc::equalize(s2, link, plan);
    const DualPolSignal syms = matched_filter_and_decimate(eq, symbol_rate, rolloff);
    return estimate_snr(syms, tx_symbols);
}

} // namespace fxpnlc::rx
