#include "fxpnlc/fxp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fxpnlc::fxp {

void check_bits(int bits)
{
    if (bits < kMinBits || bits > kMaxBits)
        throw std::invalid_argument("bit depth " + std::to_string(bits) + " outside [" +
                                    std::to_string(kMinBits) + ", " + std::to_string(kMaxBits) + "]");
}

static void check_same_bits(const FxpWord& a, const FxpWord& b)
{
    if (a.bits != b.bits)
        throw std::invalid_argument("mismatched bit depths: " + std::to_string(a.bits) + " vs " +
                                    std::to_string(b.bits));
}

std::int64_t raw_max(int bits) { return (std::int64_t{1} << (bits - 1)) - 1; }
std::int64_t raw_min(int bits) { return -(std::int64_t{1} << (bits - 1)); }

std::int64_t raw_saturate(std::int64_t r, int bits)
{
    const std::int64_t hi = raw_max(bits);
    const std::int64_t lo = raw_min(bits);
    return r > hi ? hi : (r < lo ? lo : r);
}

std::int64_t raw_round_shift(__int128 r, int shift)
{
    if (shift <= 0)
        return static_cast<std::int64_t>(r);
    const __int128 half = __int128{1} << (shift - 1);
    if (r >= 0)
        return static_cast<std::int64_t>((r + half) >> shift);
    return -static_cast<std::int64_t>(((-r) + half) >> shift);
}

std::int64_t raw_quantize(double x, int bits)
{
    const double scaled = x * static_cast<double>(std::int64_t{1} << (bits - 1));
    // round half away from zero, keeping the error distribution zero-centered
    const double rounded = std::round(scaled);
    if (rounded >= static_cast<double>(raw_max(bits)))
        return raw_max(bits);
    if (rounded <= static_cast<double>(raw_min(bits)))
        return raw_min(bits);
    return static_cast<std::int64_t>(rounded);
}

FxpWord quantize(double x, int bits)
{
    check_bits(bits);
    if (!std::isfinite(x))
        throw std::invalid_argument("non-finite sample");
    return FxpWord{raw_quantize(x, bits), bits};
}

FxpWord fxp_add(FxpWord a, FxpWord b)
{
    check_same_bits(a, b);
    return FxpWord{raw_saturate(a.raw + b.raw, a.bits), a.bits};
}

FxpWord fxp_sub(FxpWord a, FxpWord b)
{
    check_same_bits(a, b);
    return FxpWord{raw_saturate(a.raw - b.raw, a.bits), a.bits};
}

FxpWord fxp_mul(FxpWord a, FxpWord b)
{
    check_same_bits(a, b);
    // exact 2B-1 bit product, one rounding back to B bits
    const __int128 p = static_cast<__int128>(a.raw) * static_cast<__int128>(b.raw);
    return FxpWord{raw_saturate(raw_round_shift(p, a.bits - 1), a.bits), a.bits};
}

FxpWord fxp_neg(FxpWord a)
{
    return FxpWord{raw_saturate(-a.raw, a.bits), a.bits};
}

ComplexFxp complex_mul(ComplexFxp a, ComplexFxp b)
{
    ComplexFxp out;
    out.re = fxp_sub(fxp_mul(a.re, b.re), fxp_mul(a.im, b.im));
    out.im = fxp_add(fxp_mul(a.re, b.im), fxp_mul(a.im, b.re));
    return out;
}

QuantNoiseModel QuantNoiseModel::for_bits(int bits)
{
    check_bits(bits);
    const double sigma_sq = std::exp2(-2.0 * bits) / 12.0;
    return QuantNoiseModel{bits, sigma_sq, 10.0 * std::log10(1.0 / sigma_sq)};
}

double theoretical_sqnr_db(int bits)
{
    return 10.0 * std::log10(12.0 * std::exp2(2.0 * bits));
}

double measure_sqnr_db(std::span<const double> signal, int bits)
{
    check_bits(bits);
    double sig = 0.0;
    double err = 0.0;
    for (double x : signal) {
        const FxpWord q = quantize(x, bits);
        const double e = x - q.value();
        sig += x * x;
        err += e * e;
    }
    if (err == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sig / err);
}

} // namespace fxpnlc::fxp
