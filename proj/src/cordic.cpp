#include "fxpnlc/cordic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fxpnlc::dsp {

CordicConfig CordicConfig::for_iterations(int iterations)
{
    if (iterations < 1)
        throw std::invalid_argument("CORDIC iterations must be >= 1");
    double k_inv = 1.0;
    for (int i = 0; i < iterations; ++i)
        k_inv /= std::sqrt(1.0 + std::exp2(-2.0 * i));
    return CordicConfig{iterations, k_inv};
}

CordicRotator::CordicRotator(CordicConfig cfg, int bits) : cfg_(cfg), bits_(bits)
{
    fxp::check_bits(bits);
    if (cfg_.iterations < 1)
        throw std::invalid_argument("CORDIC iterations must be >= 1");
    if (cfg_.gain_compensation <= 0.0)
        cfg_ = CordicConfig::for_iterations(cfg_.iterations);
    guard_ = 8;
    x0_ = std::llround(cfg_.gain_compensation * std::exp2(bits_ + guard_ - 1));
    atan_table_.resize(cfg_.iterations);
    for (int i = 0; i < cfg_.iterations; ++i)
        atan_table_[i] = std::atan(std::exp2(-i));
}

static inline std::int64_t rounded_shift(std::int64_t v, int s)
{
    if (s == 0)
        return v;
    const std::int64_t half = std::int64_t{1} << (s - 1);
    return v >= 0 ? (v + half) >> s : -(((-v) + half) >> s);
}

void CordicRotator::rotate(double angle_rad, std::int64_t& cos_raw, std::int64_t& sin_raw) const
{
    constexpr double pi = std::numbers::pi;
    double z = std::remainder(angle_rad, 2.0 * pi); // (-pi, pi]
    std::int64_t x = x0_;
    std::int64_t y = 0;
    // quadrant pre-rotation (exact in the raw domain)
    if (z > pi / 2) {
        const std::int64_t t = x;
        x = -y;
        y = t;
        z -= pi / 2;
    } else if (z < -pi / 2) {
        const std::int64_t t = x;
        x = y;
        y = -t;
        z += pi / 2;
    }
    for (int i = 0; i < cfg_.iterations; ++i) {
        const std::int64_t xs = rounded_shift(x, i);
        const std::int64_t ys = rounded_shift(y, i);
        if (z >= 0) {
            x -= ys;
            y += xs;
            z -= atan_table_[i];
        } else {
            x += ys;
            y -= xs;
            z += atan_table_[i];
        }
    }
    cos_raw = fxp::raw_saturate(rounded_shift(x, guard_), bits_);
    sin_raw = fxp::raw_saturate(rounded_shift(y, guard_), bits_);
}

fxp::ComplexFxp cordic_rotate(double angle_rad, const CordicConfig& cfg, int bits)
{
    const CordicRotator rot(cfg, bits);
    std::int64_t c = 0;
    std::int64_t s = 0;
    rot.rotate(angle_rad, c, s);
    return fxp::ComplexFxp{fxp::FxpWord{c, bits}, fxp::FxpWord{s, bits}};
}

} // namespace fxpnlc::dsp
