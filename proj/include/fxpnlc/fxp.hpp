#ifndef FXPNLC_FXP_HPP
#define FXPNLC_FXP_HPP

#include <cstdint>
#include <span>

namespace fxpnlc::fxp {

// The receiver sweeps run at 4..32 bits (enforced at the plan level); the
// primitive layer admits tiny depths too so coarse-grid cases stay testable.
inline constexpr int kMinBits = 2;
inline constexpr int kMaxBits = 32;
inline constexpr int kMinPlanBits = 4;

// One sample in fractional two's complement with B total bits.
// value = raw / 2^(B-1), raw in [-2^(B-1), 2^(B-1)-1], so -1 <= value < 1.
// The raw field lives in an int64 so products can be formed exactly before
// they are rounded back to B bits.
struct FxpWord {
    std::int64_t raw = 0;
    int bits = 16;

    double value() const { return static_cast<double>(raw) / static_cast<double>(std::int64_t{1} << (bits - 1)); }
    friend bool operator==(const FxpWord&, const FxpWord&) = default;
};

struct ComplexFxp {
    FxpWord re;
    FxpWord im;
    friend bool operator==(const ComplexFxp&, const ComplexFxp&) = default;
};

// Quantization-noise model at B bits: sigma^2 = 2^(-2B)/12, SQNR = 1/sigma^2.
struct QuantNoiseModel {
    int bits;
    double sigma_sq;
    double sqnr_db;
    static QuantNoiseModel for_bits(int bits);
};

void check_bits(int bits);

// Raw-domain helpers shared by the DSP kernels.
std::int64_t raw_max(int bits);
std::int64_t raw_min(int bits);
std::int64_t raw_saturate(std::int64_t r, int bits);
// Round r/2^shift to nearest, ties away from zero. Exact for shift == 0.
std::int64_t raw_round_shift(__int128 r, int shift);
std::int64_t raw_quantize(double x, int bits);

// Round x to the nearest representable value, saturating at the range ends.
// Ties round away from zero. Throws on non-finite input or invalid B.
FxpWord quantize(double x, int bits);

FxpWord fxp_add(FxpWord a, FxpWord b);
FxpWord fxp_sub(FxpWord a, FxpWord b);
FxpWord fxp_mul(FxpWord a, FxpWord b);
FxpWord fxp_neg(FxpWord a);

// (a.re*b.re - a.im*b.im, a.re*b.im + a.im*b.re) with every primitive
// product rounded to B bits independently; no bit-depth expansion across
// the operation boundary.
ComplexFxp complex_mul(ComplexFxp a, ComplexFxp b);

// 10*log10(12 * 2^(2B)), the SQNR model evaluated at B.
double theoretical_sqnr_db(int bits);

// 10*log10(sum|x|^2 / sum|x - quantize(x)|^2); +infinity when the error
// is identically zero. Inputs must lie in [-1, 1).
double measure_sqnr_db(std::span<const double> signal, int bits);

} // namespace fxpnlc::fxp

#endif
