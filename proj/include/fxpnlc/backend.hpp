#ifndef FXPNLC_BACKEND_HPP
#define FXPNLC_BACKEND_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "fxpnlc/fxp.hpp"

namespace fxpnlc::dsp {

// Arithmetic backends for the DSP kernels. Float64Backend is the ideal
// reference; FxpBackend emulates B-bit fractional two's complement with one
// rounding per atomic result and saturation instead of wrap-around.

struct Float64Backend {
    static constexpr bool kQuantized = false;
    using Complex = std::complex<double>;

    Complex from_double(std::complex<double> z) const { return z; }
    std::complex<double> to_double(Complex z) const { return z; }
    Complex mul(Complex a, Complex b) const { return a * b; }
    Complex add(Complex a, Complex b) const { return a + b; }
    Complex sub(Complex a, Complex b) const { return a - b; }
};

struct FxpBackend {
    static constexpr bool kQuantized = true;

    struct Complex {
        std::int64_t re = 0;
        std::int64_t im = 0;
    };

    int bits = 16;

    explicit FxpBackend(int bits_) : bits(bits_) { fxp::check_bits(bits_); }

    Complex from_double(std::complex<double> z) const
    {
        return Complex{fxp::raw_quantize(z.real(), bits), fxp::raw_quantize(z.imag(), bits)};
    }

    std::complex<double> to_double(Complex z) const
    {
        const double s = static_cast<double>(std::int64_t{1} << (bits - 1));
        return {static_cast<double>(z.re) / s, static_cast<double>(z.im) / s};
    }

    // Atomic complex multiply: four rounded real products, exact adds.
    Complex mul(Complex a, Complex b) const
    {
        const int sh = bits - 1;
        const std::int64_t rr = fxp::raw_round_shift(static_cast<__int128>(a.re) * b.re, sh);
        const std::int64_t ii = fxp::raw_round_shift(static_cast<__int128>(a.im) * b.im, sh);
        const std::int64_t ri = fxp::raw_round_shift(static_cast<__int128>(a.re) * b.im, sh);
        const std::int64_t ir = fxp::raw_round_shift(static_cast<__int128>(a.im) * b.re, sh);
        return Complex{fxp::raw_saturate(rr - ii, bits), fxp::raw_saturate(ri + ir, bits)};
    }

    Complex add(Complex a, Complex b) const
    {
        return Complex{fxp::raw_saturate(a.re + b.re, bits), fxp::raw_saturate(a.im + b.im, bits)};
    }

    Complex sub(Complex a, Complex b) const
    {
        return Complex{fxp::raw_saturate(a.re - b.re, bits), fxp::raw_saturate(a.im - b.im, bits)};
    }
};

// A block of backend samples plus a shared block-scaling exponent:
// represented value of sample i = stored value * 2^scale_exp.
template <class BE>
struct Block {
    std::vector<typename BE::Complex> v;
    int scale_exp = 0;
};

using ComplexFxpBuffer = Block<FxpBackend>;

} // namespace fxpnlc::dsp

#endif
