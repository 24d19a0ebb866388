#include "fxpnlc/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fxpnlc/fft.hpp"

namespace fxpnlc::channel {

using cd = std::complex<double>;

DualPolSignal generate_symbols(const TxConfig& cfg)
{
    if (cfg.n_symbols < 1)
        throw std::invalid_argument("n_symbols must be >= 1");
    DualPolSignal s;
    s.sample_rate = cfg.symbol_rate;
    s.samples_per_symbol = 1;
    s.x.resize(cfg.n_symbols);
    s.y.resize(cfg.n_symbols);

    auto fill = [&](std::vector<cd>& pol, std::uint64_t stream) {
        std::mt19937_64 rng(derive_seed(cfg.seed, stream));
        if (cfg.format == ModFormat::kQpsk) {
            const double a = 1.0 / std::sqrt(2.0);
            std::uniform_int_distribution<int> bit(0, 1);
            for (auto& z : pol)
                z = cd(bit(rng) ? a : -a, bit(rng) ? a : -a);
        } else {
            const double a = 1.0 / std::sqrt(10.0);
            std::uniform_int_distribution<int> lvl(0, 3);
            auto amp = [&](int l) { return (2 * l - 3) * a; }; // {-3,-1,1,3}/sqrt(10)
            for (auto& z : pol)
                z = cd(amp(lvl(rng)), amp(lvl(rng)));
        }
    };
    fill(s.x, 0);
    fill(s.y, 1);
    return s;
}

double rrc_amplitude(double f_hz, double symbol_rate, double rolloff)
{
    const double t = std::abs(f_hz) / symbol_rate; // |f| in units of the symbol rate
    const double lo = 0.5 * (1.0 - rolloff);
    const double hi = 0.5 * (1.0 + rolloff);
    if (t <= lo)
        return 1.0;
    if (t >= hi)
        return 0.0;
    // sqrt of the raised cosine: sqrt(0.5*(1+cos(pi/beta*(t-lo)))) = cos(pi/(2*beta)*(t-lo))
    return std::cos(std::numbers::pi / (2.0 * rolloff) * (t - lo));
}

DualPolSignal rrc_shape(const DualPolSignal& symbols, const TxConfig& cfg)
{
    if (cfg.sps < 2)
        throw std::invalid_argument("sps must be >= 2");
    const std::size_t n_sym = symbols.size();
    const std::size_t n = n_sym * static_cast<std::size_t>(cfg.sps);
    if (!dsp::is_power_of_two(n))
        throw std::invalid_argument("shaped length must be a power of two");

    DualPolSignal out;
    out.sample_rate = cfg.symbol_rate * cfg.sps;
    out.samples_per_symbol = cfg.sps;
    out.x.assign(n, cd{});
    out.y.assign(n, cd{});

    const dsp::FftPlan<dsp::Float64Backend> plan(n, {});
    const auto freqs = dsp::angular_freq_grid(n, out.sample_rate);
    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k)
        h[k] = rrc_amplitude(freqs[k] / (2.0 * std::numbers::pi), cfg.symbol_rate, cfg.rrc_rolloff);

    auto shape = [&](const std::vector<cd>& sym, std::vector<cd>& pol) {
        for (std::size_t m = 0; m < n_sym; ++m)
            pol[m * cfg.sps] = sym[m];
        dsp::fft_f64(plan, std::span(pol), false);
        for (std::size_t k = 0; k < n; ++k)
            pol[k] *= h[k];
        dsp::fft_f64(plan, std::span(pol), true);
    };
    shape(symbols.x, out.x);
    shape(symbols.y, out.y);
    out.mean_power_dbm = watts_to_dbm(mean_dualpol_power(out));
    return out;
}

void edfa(DualPolSignal& s, double gain_db, double nf_db, double carrier_freq_hz,
          std::uint64_t seed, bool noiseless)
{
    const double gain = db_to_linear(gain_db);
    if (gain <= 1.0)
        throw std::invalid_argument("EDFA gain must exceed 1");
    scale_signal(s, std::sqrt(gain));
    if (noiseless)
        return;
    const double f_lin = db_to_linear(nf_db);
    const double var = (gain - 1.0) * f_lin * kPlanck * carrier_freq_hz * s.sample_rate / 2.0;
    const double sigma = std::sqrt(var / 2.0); // per quadrature
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (auto& z : s.x)
        z += cd(gauss(rng), gauss(rng));
    for (auto& z : s.y)
        z += cd(gauss(rng), gauss(rng));
}

static void apply_rotator(std::vector<cd>& spec_x, std::vector<cd>& spec_y,
                          const std::vector<cd>& rot)
{
    for (std::size_t k = 0; k < spec_x.size(); ++k) {
        spec_x[k] *= rot[k];
        spec_y[k] *= rot[k];
    }
}

void propagate_fiber(DualPolSignal& s, const LinkSpec& link, double length_m)
{
    if (length_m <= 0.0)
        return;
    const std::size_t n = s.size();
    if (!dsp::is_power_of_two(n))
        throw std::invalid_argument("propagation requires power-of-two signal length");
    const double h = link.sim_step_m;
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(length_m / h));
    if (std::abs(n_steps * h - length_m) > 1e-6 * length_m + 1e-9)
        throw std::invalid_argument("fiber length must be a multiple of the simulation step");

    const double beta2 = link.beta2_s2_per_m();
    const double alpha = link.alpha_per_m();
    const double gamma = link.gamma_per_w_m();

    const dsp::FftPlan<dsp::Float64Backend> plan(n, {});
    const auto w = dsp::angular_freq_grid(n, s.sample_rate);
    auto rotator = [&](double dz) {
        std::vector<cd> rot(n);
        for (std::size_t k = 0; k < n; ++k)
            rot[k] = std::polar(1.0, 0.5 * beta2 * w[k] * w[k] * dz);
        return rot;
    };

    if (gamma == 0.0) {
        // dispersion and loss commute; one whole-length application
        const auto rot = rotator(static_cast<double>(n_steps) * h);
        dsp::fft_f64(plan, std::span(s.x), false);
        dsp::fft_f64(plan, std::span(s.y), false);
        apply_rotator(s.x, s.y, rot);
        dsp::fft_f64(plan, std::span(s.x), true);
        dsp::fft_f64(plan, std::span(s.y), true);
        const double amp = std::exp(-alpha * static_cast<double>(n_steps) * h / 2.0);
        scale_signal(s, amp);
        return;
    }

    const double l_eff = alpha > 0.0 ? (1.0 - std::exp(-alpha * h)) / alpha : h;
    const double loss_amp = std::exp(-alpha * h / 2.0);
    const double nl_coef = (8.0 / 9.0) * gamma * l_eff;
    const auto rot_half = rotator(h / 2.0);
    const auto rot_full = rotator(h);

    // symmetric split: D(h/2) [N D(h)]^(n_steps-1) N D(h/2), loss inside each N
    dsp::fft_f64(plan, std::span(s.x), false);
    dsp::fft_f64(plan, std::span(s.y), false);
    apply_rotator(s.x, s.y, rot_half);
    for (std::size_t step = 0; step < n_steps; ++step) {
        dsp::fft_f64(plan, std::span(s.x), true);
        dsp::fft_f64(plan, std::span(s.y), true);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::norm(s.x[i]) + std::norm(s.y[i]);
            const cd rot = std::polar(loss_amp, nl_coef * p);
            s.x[i] *= rot;
            s.y[i] *= rot;
        }
        dsp::fft_f64(plan, std::span(s.x), false);
        dsp::fft_f64(plan, std::span(s.y), false);
        apply_rotator(s.x, s.y, step + 1 == n_steps ? rot_half : rot_full);
    }
    dsp::fft_f64(plan, std::span(s.x), true);
    dsp::fft_f64(plan, std::span(s.y), true);
}

DualPolSignal propagate_link(const DualPolSignal& s, const LinkSpec& link,
                             double launch_power_dbm, std::uint64_t seed, bool noiseless)
{
    link.validate();
    DualPolSignal out = s;
    const double p_now = mean_dualpol_power(out);
    if (p_now <= 0.0)
        throw std::invalid_argument("cannot scale an empty or all-zero signal");
    const double target = dbm_to_watts(launch_power_dbm);
    scale_signal(out, std::sqrt(target / p_now));
    if (!std::isfinite(mean_dualpol_power(out)))
        throw std::runtime_error("launch power scaling produced non-finite samples");
    out.mean_power_dbm = launch_power_dbm;

    for (int span = 0; span < link.span_count; ++span) {
        propagate_fiber(out, link, link.span_length_m);
        edfa(out, link.span_loss_db(), link.edfa_nf_db, link.carrier_freq_hz(),
             derive_seed(seed, 0x0edfa000ULL + static_cast<std::uint64_t>(span)), noiseless);
    }
    out.mean_power_dbm = watts_to_dbm(mean_dualpol_power(out));
    return out;
}

} // namespace fxpnlc::channel
