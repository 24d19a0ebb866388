#include "fxpnlc/overlap_save.hpp"

namespace fxpnlc::dsp {

DualPolSignal overlap_save(const DualPolSignal& stream, const FreqResponse& response,
                           std::size_t fft_size, std::optional<int> bits)
{
    if (!is_power_of_two(fft_size) || log2_exact(fft_size) < kMinFftExp ||
        log2_exact(fft_size) > kMaxFftExp)
        throw std::invalid_argument("overlap-save FFT size must be 2^n with n in [5, 15]");
    if (stream.size() < fft_size)
        throw std::invalid_argument("stream shorter than one FFT batch");

    DualPolSignal out = stream;
    if (bits) {
        const FxpBackend be(*bits);
        const FftPlan<FxpBackend> plan(fft_size, be);
        overlap_save_filter(be, plan, response.taps, stream.x, std::span(out.x));
        overlap_save_filter(be, plan, response.taps, stream.y, std::span(out.y));
    } else {
        const Float64Backend be;
        const FftPlan<Float64Backend> plan(fft_size, be);
        overlap_save_filter(be, plan, response.taps, stream.x, std::span(out.x));
        overlap_save_filter(be, plan, response.taps, stream.y, std::span(out.y));
    }
    return out;
}

} // namespace fxpnlc::dsp
