#ifndef FXPNLC_CORDIC_HPP
#define FXPNLC_CORDIC_HPP

#include <cstdint>
#include <vector>

#include "fxpnlc/fxp.hpp"

namespace fxpnlc::dsp {

struct CordicConfig {
    int iterations = 20;
    double gain_compensation = 0.0; // 1/K with K = prod sqrt(1 + 2^-2i)

    static CordicConfig for_iterations(int iterations);
};

// Shift-add rotation tables shared across calls at one (iterations, bits)
// point. The x/y datapath runs at bits + guard internal bits (intermediate
// expansion inside the block) and rounds to B bits once at the end; the
// angle accumulator stays in double precision.
class CordicRotator {
  public:
    CordicRotator(CordicConfig cfg, int bits);

    // cos/sin of the angle as B-bit raws. The angle may be any finite value;
    // it is reduced to (-pi, pi] internally.
    void rotate(double angle_rad, std::int64_t& cos_raw, std::int64_t& sin_raw) const;

    int bits() const { return bits_; }
    const CordicConfig& config() const { return cfg_; }

  private:
    CordicConfig cfg_;
    int bits_;
    int guard_;
    std::int64_t x0_; // 1/K at bits + guard
    std::vector<double> atan_table_;
};

// (cos angle, sin angle) at B bits; error bounded by
// max(2^-(iterations-1), 2^-(B-1)).
fxp::ComplexFxp cordic_rotate(double angle_rad, const CordicConfig& cfg, int bits);

} // namespace fxpnlc::dsp

#endif
