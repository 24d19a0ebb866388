#ifndef FXPNLC_FFT_HPP
#define FXPNLC_FFT_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "fxpnlc/backend.hpp"

namespace fxpnlc::dsp {

// Valid radix-2 sizes for the NLC filtering path.
inline constexpr int kMinFftExp = 5;
inline constexpr int kMaxFftExp = 15;

bool is_power_of_two(std::size_t n);
int log2_exact(std::size_t n);

// Quantization noise budget of an N-point FFT: 4(N-1) * 2^(-2B)/12.
double fft_noise_bound(std::size_t n, int bits);

// Radix-2 decimation-in-time Cooley-Tukey transform, generic over backend.
// Twiddles are computed in double precision at plan construction and
// quantized through the backend. On the fixed-point backend each butterfly
// output is rounded once (intermediate products are exact), and a stage is
// block-scaled by 1/2 (folded into that same rounding) whenever any stage
// input component is >= 0.5; the block's scale_exp tracks the fold count.
// The inverse direction applies 1/N through scale_exp only.
template <class BE>
class FftPlan {
  public:
    FftPlan(std::size_t n, BE be) : be_(be), n_(n)
    {
        if (!is_power_of_two(n) || n < 2)
            throw std::invalid_argument("FFT size must be a power of two >= 2");
        log2n_ = log2_exact(n);
        bitrev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            std::size_t x = i;
            for (int b = 0; b < log2n_; ++b) {
                r = (r << 1) | (x & 1);
                x >>= 1;
            }
            bitrev_[i] = r;
        }
        tw_fwd_.resize(n / 2);
        tw_inv_.resize(n / 2);
        for (std::size_t j = 0; j < n / 2; ++j) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
            tw_fwd_[j] = be_.from_double({std::cos(ang), std::sin(ang)});
            tw_inv_[j] = be_.from_double({std::cos(ang), -std::sin(ang)});
        }
    }

    std::size_t size() const { return n_; }
    const BE& backend() const { return be_; }

    // In-place transform; returns the change in scale_exp.
    int run(std::span<typename BE::Complex> x, bool inverse) const
    {
        if (x.size() != n_)
            throw std::invalid_argument("buffer length does not match plan size");
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t r = bitrev_[i];
            if (i < r)
                std::swap(x[i], x[r]);
        }
        const auto& tw = inverse ? tw_inv_ : tw_fwd_;
        int scale = 0;
        for (int s = 1; s <= log2n_; ++s) {
            const std::size_t m = std::size_t{1} << s;
            const std::size_t half = m >> 1;
            const std::size_t stride = n_ >> s;
            bool fold = false;
            if constexpr (BE::kQuantized) {
                const std::int64_t limit = std::int64_t{1} << (be_.bits - 2);
                for (const auto& z : x) {
                    if (z.re >= limit || z.re <= -limit || z.im >= limit || z.im <= -limit) {
                        fold = true;
                        break;
                    }
                }
                if (fold)
                    ++scale;
            }
            for (std::size_t k = 0; k < n_; k += m) {
                for (std::size_t j = 0; j < half; ++j) {
                    butterfly(x[k + j], x[k + j + half], tw[j * stride], fold);
                }
            }
        }
        if (inverse)
            scale -= log2n_;
        return scale;
    }

    int run(Block<BE>& block, bool inverse) const
    {
        const int d = run(std::span<typename BE::Complex>(block.v), inverse);
        block.scale_exp += d;
        return d;
    }

  private:
    void butterfly(typename BE::Complex& a, typename BE::Complex& b, typename BE::Complex w, bool fold) const
    {
        if constexpr (BE::kQuantized) {
            const int sh = (be_.bits - 1) + (fold ? 1 : 0);
            const __int128 pr = static_cast<__int128>(b.re) * w.re - static_cast<__int128>(b.im) * w.im;
            const __int128 pi = static_cast<__int128>(b.re) * w.im + static_cast<__int128>(b.im) * w.re;
            const __int128 ur = static_cast<__int128>(a.re) << (be_.bits - 1);
            const __int128 ui = static_cast<__int128>(a.im) << (be_.bits - 1);
            a = {fxp::raw_saturate(fxp::raw_round_shift(ur + pr, sh), be_.bits),
                 fxp::raw_saturate(fxp::raw_round_shift(ui + pi, sh), be_.bits)};
            b = {fxp::raw_saturate(fxp::raw_round_shift(ur - pr, sh), be_.bits),
                 fxp::raw_saturate(fxp::raw_round_shift(ui - pi, sh), be_.bits)};
        } else {
            (void)fold;
            const auto t = w * b;
            b = a - t;
            a = a + t;
        }
    }

    BE be_;
    std::size_t n_;
    int log2n_;
    std::vector<std::size_t> bitrev_;
    std::vector<typename BE::Complex> tw_fwd_;
    std::vector<typename BE::Complex> tw_inv_;
};

// Rescale a block's stored samples so scale_exp becomes `target`.
// Downscaling rounds once per component; upscaling saturates.
template <class BE>
void resolve_scale(const BE& be, Block<BE>& block, int target)
{
    int d = block.scale_exp - target;
    if constexpr (BE::kQuantized) {
        if (d == 0)
            return;
        if (d < 0) {
            for (auto& z : block.v) {
                z.re = fxp::raw_round_shift(z.re, -d);
                z.im = fxp::raw_round_shift(z.im, -d);
            }
        } else {
            for (auto& z : block.v) {
                __int128 re = static_cast<__int128>(z.re) << d;
                __int128 im = static_cast<__int128>(z.im) << d;
                const std::int64_t hi = fxp::raw_max(be.bits);
                const std::int64_t lo = fxp::raw_min(be.bits);
                z.re = re > hi ? hi : (re < lo ? lo : static_cast<std::int64_t>(re));
                z.im = im > hi ? hi : (im < lo ? lo : static_cast<std::int64_t>(im));
            }
        }
    } else {
        (void)be;
        const double f = std::exp2(static_cast<double>(d));
        for (auto& z : block.v)
            z *= f;
    }
    block.scale_exp = target;
}

// Convenience float64 whole-signal transform used by the channel and the
// ideal receiver stages. Forward is unnormalized; inverse applies 1/N.
void fft_f64(const FftPlan<Float64Backend>& plan, std::span<std::complex<double>> x, bool inverse);

// Signed FFT frequency grid in rad/s for a given size and sample rate
// (bins 0..N/2-1 nonnegative, N/2..N-1 negative).
std::vector<double> angular_freq_grid(std::size_t n, double sample_rate);

} // namespace fxpnlc::dsp

#endif
