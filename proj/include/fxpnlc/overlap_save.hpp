#ifndef FXPNLC_OVERLAP_SAVE_HPP
#define FXPNLC_OVERLAP_SAVE_HPP

#include <optional>
#include <span>

#include "fxpnlc/fft.hpp"
#include "fxpnlc/signal.hpp"

namespace fxpnlc::dsp {

// Buffered stream filtering: each N-sample batch is transformed, multiplied
// by the quantized response taps, transformed back, and the N/4 overlap
// region discarded. Dispersion responses are two-sided in time, so the
// overlap is split N/8 ahead and N/8 behind the retained region; edge
// batches are zero-filled. Output sample k lines up with input sample k
// (the response itself carries any intended delay).
template <class BE>
void overlap_save_filter(const BE& be, const FftPlan<BE>& plan,
                         std::span<const std::complex<double>> response,
                         std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out)
{
    const std::size_t n = plan.size();
    if (response.size() != n)
        throw std::invalid_argument("response length must equal the FFT size");
    if (out.size() != in.size())
        throw std::invalid_argument("output length must equal input length");
    const std::size_t guard = n / 8;
    const std::size_t hop = n - 2 * guard;

    std::vector<typename BE::Complex> taps(n);
    for (std::size_t k = 0; k < n; ++k)
        taps[k] = be.from_double(response[k]);

    Block<BE> block;
    block.v.resize(n);
    const std::size_t len = in.size();
    for (std::size_t start = 0; start < len; start += hop) {
        block.scale_exp = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::ptrdiff_t src =
                static_cast<std::ptrdiff_t>(start + j) - static_cast<std::ptrdiff_t>(guard);
            const std::complex<double> v = (src >= 0 && src < static_cast<std::ptrdiff_t>(len))
                                               ? in[static_cast<std::size_t>(src)]
                                               : std::complex<double>{0.0, 0.0};
            block.v[j] = be.from_double(v);
        }
        plan.run(block, false);
        for (std::size_t j = 0; j < n; ++j)
            block.v[j] = be.mul(block.v[j], taps[j]);
        plan.run(block, true);
        resolve_scale(be, block, 0);
        const std::size_t take = std::min(hop, len - start);
        for (std::size_t j = 0; j < take; ++j)
            out[start + j] = be.to_double(block.v[guard + j]);
    }
}

// Whole-signal spec-level wrapper: filters both polarizations with the same
// response. bits empty selects the float64 backend.
DualPolSignal overlap_save(const DualPolSignal& stream, const FreqResponse& response,
                           std::size_t fft_size, std::optional<int> bits);

} // namespace fxpnlc::dsp

#endif
