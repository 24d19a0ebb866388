#include "fxpnlc/nlc.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "fxpnlc/backend.hpp"
#include "fxpnlc/cordic.hpp"
#include "fxpnlc/fft.hpp"
#include "fxpnlc/optim.hpp"
#include "fxpnlc/overlap_save.hpp"

namespace fxpnlc::nlc {

using cd = std::complex<double>;

std::string to_string(Algo a)
{
    switch (a) {
    case Algo::kCdc: return "cdc";
    case Algo::kDbp: return "dbp";
    case Algo::kEssfm: return "essfm";
    }
    return "?";
}

Algo algo_from_string(const std::string& s)
{
    if (s == "cdc")
        return Algo::kCdc;
    if (s == "dbp")
        return Algo::kDbp;
    if (s == "essfm")
        return Algo::kEssfm;
    throw std::invalid_argument("unknown algorithm: " + s);
}

NlcPlan NlcPlan::cdc(int fft_exp, std::optional<int> bits)
{
    NlcPlan p;
    p.algo = Algo::kCdc;
    p.fft_size_exp = fft_exp;
    p.bit_depth = bits;
    p.nonlinear_enabled = false;
    return p;
}

NlcPlan NlcPlan::dbp(int steps_per_link, int fft_exp, std::optional<int> bits,
                     double launch_dbm, double split)
{
    NlcPlan p;
    p.algo = Algo::kDbp;
    p.steps_per_link = steps_per_link;
    p.fft_size_exp = fft_exp;
    p.bit_depth = bits;
    p.launch_power_dbm = launch_dbm;
    p.wh_split = split;
    return p;
}

NlcPlan NlcPlan::essfm(std::vector<double> coeffs, int fft_exp, std::optional<int> bits,
                       double launch_dbm, double split)
{
    NlcPlan p;
    p.algo = Algo::kEssfm;
    p.coeffs = std::move(coeffs);
    p.fft_size_exp = fft_exp;
    p.bit_depth = bits;
    p.launch_power_dbm = launch_dbm;
    p.wh_split = split;
    return p;
}

void NlcPlan::validate(const LinkSpec& link) const
{
    link.validate();
    if (fft_size_exp < dsp::kMinFftExp || fft_size_exp > dsp::kMaxFftExp)
        throw std::invalid_argument("fft_size_exp outside [5, 15]");
    if (bit_depth) {
        fxp::check_bits(*bit_depth);
        if (*bit_depth < fxp::kMinPlanBits)
            throw std::invalid_argument("plan bit depth below " +
                                        std::to_string(fxp::kMinPlanBits));
    }
    if (wh_split < 0.0 || wh_split > 1.0)
        throw std::invalid_argument("WH split must lie in [0, 1]");
    if (headroom_shift < 0 || headroom_shift > 8)
        throw std::invalid_argument("headroom_shift outside [0, 8]");
    if (algo == Algo::kDbp) {
        if (steps_per_link < 1)
            throw std::invalid_argument("DBP needs steps_per_link >= 1");
        if (link.total_length_m() / steps_per_link <= 0.0)
            throw std::invalid_argument("zero-length DBP step");
    }
    if (algo == Algo::kEssfm) {
        if (coeffs.empty() || !dsp::is_power_of_two(coeffs.size()))
            throw std::invalid_argument("ESSFM coefficient count must be a power of two");
    }
}

namespace {

// Backend-effective nonlinear filter coefficients.
struct EffectiveNl {
    bool active = false;
    std::vector<double> c;             // float64 path
    std::vector<std::int64_t> c_raw;   // FXP path
    int c_scale = 0;                   // FXP: c_i = raw * 2^(1-B) * 2^c_scale
};

EffectiveNl effective_coeffs(const NlcPlan& plan, const LinkSpec& link)
{
    EffectiveNl eff;
    if (plan.algo == Algo::kCdc || !plan.nonlinear_enabled || link.gamma_w_km <= 0.0)
        return eff;
    const std::vector<double> base =
        plan.algo == Algo::kDbp ? std::vector<double>{0.5} : plan.coeffs;
    if (plan.is_float64()) {
        bool any = false;
        for (double c : base)
            any = any || c != 0.0;
        if (!any)
            return eff;
        eff.active = true;
        eff.c = base;
        return eff;
    }
    const auto q = optim::quantize_coefficients(base, *plan.bit_depth);
    if (q.all_zero())
        return eff;
    eff.active = true;
    eff.c_scale = q.scale_exp;
    eff.c_raw.reserve(q.words.size());
    for (const auto& w : q.words)
        eff.c_raw.push_back(w.raw);
    return eff;
}

} // namespace

std::vector<VirtualStep> virtual_steps(const NlcPlan& plan, const LinkSpec& link)
{
    plan.validate(link);
    const double total = link.total_length_m();
    std::vector<VirtualStep> steps;
    if (plan.algo == Algo::kCdc)
        return steps;
    const int k = plan.algo == Algo::kEssfm ? 1 : plan.steps_per_link;
    const double h = total / k;
    steps.reserve(k);
    for (int j = 0; j < k; ++j) {
        // step j (receiver order) covers the forward interval
        // [total-(j+1)h, total-jh]
        VirtualStep s;
        s.h_m = h;
        s.leading_disp_m = plan.wh_split * h;
        s.trailing_disp_m = (1.0 - plan.wh_split) * h;
        s.l_eff_m = link.effective_length_m(total - (j + 1) * h, total - j * h);
        steps.push_back(s);
    }
    return steps;
}

std::vector<EqOp> compile_plan(const NlcPlan& plan, const LinkSpec& link)
{
    const double total = link.total_length_m();
    const auto steps = virtual_steps(plan, link);
    const EffectiveNl eff = effective_coeffs(plan, link);

    std::vector<EqOp> ops;
    auto push_linear = [&](double z) {
        if (z <= 0.0)
            return;
        if (!ops.empty() && ops.back().linear)
            ops.back().distance_m += z;
        else
            ops.push_back(EqOp{true, z, 0.0});
    };
    for (const auto& s : steps) {
        push_linear(s.leading_disp_m);
        if (eff.active)
            ops.push_back(EqOp{false, 0.0, s.l_eff_m});
        push_linear(s.trailing_disp_m);
    }
    if (ops.empty())
        push_linear(total);
    return ops;
}

FreqResponse dispersion_response(double z_m, const LinkSpec& link, std::size_t fft_size,
                                 double sample_rate)
{
    FreqResponse r;
    r.grid_rad_s = dsp::angular_freq_grid(fft_size, sample_rate);
    r.taps.resize(fft_size);
    const double beta2 = link.beta2_s2_per_m();
    for (std::size_t k = 0; k < fft_size; ++k) {
        const double w = r.grid_rad_s[k];
        r.taps[k] = std::polar(1.0, -0.5 * beta2 * w * w * z_m);
    }
    return r;
}

namespace detail {

// Joint-power nonlinear phase block. P = |x|^2 + |y|^2 is computed on the
// backend, filtered by the symmetric coefficient window (inner pair-sum
// first, matching the operator definition), and applied as a unit-magnitude
// rotation of both polarizations.
static void nonlinear_block_f64(std::span<cd> x, std::span<cd> y, std::span<const double> c,
                                double phase_const)
{
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(c.size());
    std::vector<double> p(n);
    for (std::ptrdiff_t i = 0; i < n; ++i)
        p[i] = std::norm(x[i]) + std::norm(y[i]);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::ptrdiff_t j = 0; j < nc; ++j) {
            const double pm = (i - j >= 0) ? p[i - j] : 0.0;
            const double pp = (i + j < n) ? p[i + j] : 0.0;
            s += c[j] * (pm + pp);
        }
        const cd rot = std::polar(1.0, phase_const * s);
        x[i] *= rot;
        y[i] *= rot;
    }
}

static void nonlinear_block_fxp(const dsp::FxpBackend& be, const dsp::CordicRotator& rot,
                                std::span<cd> x, std::span<cd> y,
                                std::span<const std::int64_t> c_raw, double phase_mul)
{
    const int bits = be.bits;
    const int sh = bits - 1;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(c_raw.size());

    std::vector<std::int64_t> p(n);
    std::vector<dsp::FxpBackend::Complex> xs(n), ys(n);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        xs[i] = be.from_double(x[i]);
        ys[i] = be.from_double(y[i]);
        // instantaneous dual-pol power: rounded squares, saturating adds
        std::int64_t acc = fxp::raw_round_shift(static_cast<__int128>(xs[i].re) * xs[i].re, sh);
        acc = fxp::raw_saturate(
            acc + fxp::raw_round_shift(static_cast<__int128>(xs[i].im) * xs[i].im, sh), bits);
        acc = fxp::raw_saturate(
            acc + fxp::raw_round_shift(static_cast<__int128>(ys[i].re) * ys[i].re, sh), bits);
        acc = fxp::raw_saturate(
            acc + fxp::raw_round_shift(static_cast<__int128>(ys[i].im) * ys[i].im, sh), bits);
        p[i] = acc;
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::int64_t acc = 0;
        for (std::ptrdiff_t j = 0; j < nc; ++j) {
            const std::int64_t pm = (i - j >= 0) ? p[i - j] : 0;
            const std::int64_t pp = (i + j < n) ? p[i + j] : 0;
            const std::int64_t pair = fxp::raw_saturate(pm + pp, bits);
            const std::int64_t term =
                fxp::raw_round_shift(static_cast<__int128>(c_raw[j]) * pair, sh);
            acc = fxp::raw_saturate(acc + term, bits);
        }
        std::int64_t cr = 0;
        std::int64_t sr = 0;
        rot.rotate(phase_mul * static_cast<double>(acc), cr, sr);
        const auto r = dsp::FxpBackend::Complex{cr, sr};
        const auto xo = be.mul(xs[i], r);
        const auto yo = be.mul(ys[i], r);
        x[i] = be.to_double(xo);
        y[i] = be.to_double(yo);
    }
}

void nonlinear_phase_rotate_f64(std::span<cd> x, std::span<cd> y, std::span<const double> coeffs,
                                double phase_const)
{
    nonlinear_block_f64(x, y, coeffs, phase_const);
}

void nonlinear_phase_rotate_fxp(int bits, int cordic_iterations, std::span<cd> x,
                                std::span<cd> y, std::span<const std::int64_t> coeff_raws,
                                double phase_mul)
{
    const dsp::FxpBackend be(bits);
    const dsp::CordicRotator rot(dsp::CordicConfig::for_iterations(cordic_iterations), bits);
    nonlinear_block_fxp(be, rot, x, y, coeff_raws, phase_mul);
}

} // namespace detail

namespace {

template <class BE>
void linear_block(const BE& be, const dsp::FftPlan<BE>& plan, const FreqResponse& resp,
                  DualPolSignal& sig, std::vector<cd>& scratch)
{
    scratch.resize(sig.size());
    dsp::overlap_save_filter(be, plan, resp.taps, sig.x, std::span(scratch));
    sig.x.swap(scratch);
    dsp::overlap_save_filter(be, plan, resp.taps, sig.y, std::span(scratch));
    sig.y.swap(scratch);
}

} // namespace

DualPolSignal equalize(const DualPolSignal& in, const LinkSpec& link, const NlcPlan& plan)
{
    const auto ops = compile_plan(plan, link);
    const std::size_t n_fft = std::size_t{1} << plan.fft_size_exp;
    if (in.size() < n_fft)
        throw std::invalid_argument("signal shorter than one FFT batch");

    const EffectiveNl eff = effective_coeffs(plan, link);
    const double p_launch_w = dbm_to_watts(plan.launch_power_dbm);
    const double gamma = link.gamma_per_w_m();

    DualPolSignal sig = in;
    std::vector<cd> scratch;
    std::map<double, FreqResponse> responses;
    auto response_for = [&](double z) -> const FreqResponse& {
        auto it = responses.find(z);
        if (it == responses.end())
            it = responses.emplace(z, dispersion_response(z, link, n_fft, sig.sample_rate)).first;
        return it->second;
    };

    if (plan.is_float64()) {
        const dsp::Float64Backend be;
        const dsp::FftPlan<dsp::Float64Backend> fft(n_fft, be);
        for (const auto& op : ops) {
            if (op.linear) {
                linear_block(be, fft, response_for(op.distance_m), sig, scratch);
            } else {
                const double phase_const = -(8.0 / 9.0) * gamma * op.l_eff_m * p_launch_w;
                detail::nonlinear_phase_rotate_f64(std::span(sig.x), std::span(sig.y), eff.c,
                                                   phase_const);
            }
        }
        return sig;
    }

    const int bits = *plan.bit_depth;
    const dsp::FxpBackend be(bits);
    const dsp::FftPlan<dsp::FxpBackend> fft(n_fft, be);
    const int iters = plan.cordic_iterations > 0 ? plan.cordic_iterations : bits + 2;
    const dsp::CordicRotator rot(dsp::CordicConfig::for_iterations(iters), bits);

    const double head = std::exp2(-plan.headroom_shift);
    scale_signal(sig, head);
    for (const auto& op : ops) {
        if (op.linear) {
            linear_block(be, fft, response_for(op.distance_m), sig, scratch);
        } else {
            // stored power = normalized power * 2^(-2h); coefficients carry
            // 2^c_scale; both folded into the double-precision phase factor
            const double phase_const = -(8.0 / 9.0) * gamma * op.l_eff_m * p_launch_w *
                                       std::exp2(2.0 * plan.headroom_shift + eff.c_scale);
            const double phase_mul = phase_const * std::exp2(1 - bits);
            detail::nonlinear_block_fxp(be, rot, std::span(sig.x), std::span(sig.y), eff.c_raw,
                                        phase_mul);
        }
    }
    scale_signal(sig, 1.0 / head);
    return sig;
}

std::vector<double> essfm_filter_response_db(std::span<const double> coeffs,
                                             std::size_t n_points)
{
    if (coeffs.empty())
        throw std::invalid_argument("empty coefficient vector");
    if (n_points < 2)
        throw std::invalid_argument("need at least two response points");
    // symmetric FIR [c_Nc..c_1, 2c_0, c_1..c_Nc]: H(w) = 2c_0 + 2 sum c_i cos(iw)
    std::vector<double> mag(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        const double w = std::numbers::pi * static_cast<double>(j) /
                         static_cast<double>(n_points - 1);
        double h = 2.0 * coeffs[0];
        for (std::size_t i = 1; i < coeffs.size(); ++i)
            h += 2.0 * coeffs[i] * std::cos(w * static_cast<double>(i));
        mag[j] = 20.0 * std::log10(std::max(std::abs(h), 1e-300));
    }
    return mag;
}

MultCount multiplication_count(const NlcPlan& plan, const LinkSpec& link)
{
    MultCount m;
    const double n = std::exp2(plan.fft_size_exp);
    m.fft_complex_mults_per_block = 4.0 * (n / 2.0) * plan.fft_size_exp;
    switch (plan.algo) {
    case Algo::kCdc:
        m.n_linear_blocks = 1;
        break;
    case Algo::kDbp:
        m.n_nonlinear_blocks = plan.steps_per_link;
        m.n_linear_blocks = plan.steps_per_link + 1;
        m.nonlinear_per_symbol = plan.steps_per_link;
        break;
    case Algo::kEssfm: {
        m.n_nonlinear_blocks = 1;
        m.n_linear_blocks = 2;
        const double nc = static_cast<double>(plan.coeffs.size()) - 1.0;
        m.nonlinear_per_symbol = link.span_count * (2.0 * nc + 1.0);
        break;
    }
    }
    return m;
}

} // namespace fxpnlc::nlc
