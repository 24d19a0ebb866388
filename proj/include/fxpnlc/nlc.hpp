#ifndef FXPNLC_NLC_HPP
#define FXPNLC_NLC_HPP

#include <optional>
#include <span>
#include <vector>

#include "fxpnlc/signal.hpp"

namespace fxpnlc::nlc {

enum class Algo { kCdc, kDbp, kEssfm };

std::string to_string(Algo a);
Algo algo_from_string(const std::string& s);

// Receiver equalizer plan. bit_depth empty selects the float64 backend.
// headroom_shift scales the unit-power input by 2^-h before the first
// quantization so signal peaks stay clear of the [-1, 1) bounds; the shift
// is compensated exactly (power of two) in the phase constant and on egress.
struct NlcPlan {
    Algo algo = Algo::kCdc;
    int steps_per_link = 1;          // DBP
    std::vector<double> coeffs;      // ESSFM c_0..c_Nc (double precision)
    double wh_split = 0.85;          // fraction of each step's dispersion leading the N block
    int fft_size_exp = 11;
    std::optional<int> bit_depth;
    double launch_power_dbm = -2.0;
    int headroom_shift = 2;
    bool nonlinear_enabled = true;
    int cordic_iterations = 0;       // 0 -> bit_depth + 2

    static NlcPlan cdc(int fft_exp, std::optional<int> bits);
    static NlcPlan dbp(int steps_per_link, int fft_exp, std::optional<int> bits,
                       double launch_dbm, double split = 0.85);
    static NlcPlan essfm(std::vector<double> coeffs, int fft_exp, std::optional<int> bits,
                         double launch_dbm, double split = 0.4);

    void validate(const LinkSpec& link) const;
    bool is_float64() const { return !bit_depth.has_value(); }
};

// One step of the virtual reversed link before merging: the WH split puts
// leading_disp_m of dispersion ahead of the nonlinear element and the rest
// behind it; l_eff_m is the effective length of the covered interval.
struct VirtualStep {
    double h_m = 0.0;
    double leading_disp_m = 0.0;
    double trailing_disp_m = 0.0;
    double l_eff_m = 0.0;
};

std::vector<VirtualStep> virtual_steps(const NlcPlan& plan, const LinkSpec& link);

// One Wiener-Hammerstein element after merging. Adjacent linear blocks are
// combined, and nonlinear blocks that can only apply a zero phase (gamma 0,
// nonlinearity disabled, or all-zero coefficients) are elided, so degenerate
// plans collapse to the identical CDC operator chain.
struct EqOp {
    bool linear = true;
    double distance_m = 0.0; // linear: dispersion distance
    double l_eff_m = 0.0;    // nonlinear: effective length of the step
};

std::vector<EqOp> compile_plan(const NlcPlan& plan, const LinkSpec& link);

// Back-propagation dispersion taps H_k = exp(-i*(beta2/2)*w_k^2*z) on the
// FFT grid; unit magnitude before quantization.
FreqResponse dispersion_response(double z_m, const LinkSpec& link, std::size_t fft_size,
                                 double sample_rate);

// Run the compiled chain over a 2 samples/symbol, unit-average-power stream.
DualPolSignal equalize(const DualPolSignal& in, const LinkSpec& link, const NlcPlan& plan);

// Magnitude (dB) of the symmetric FIR [c_Nc..c_1, 2c_0, c_1..c_Nc] acting on
// the power sequence, evaluated at n_points frequencies over [0, pi].
std::vector<double> essfm_filter_response_db(std::span<const double> coeffs,
                                             std::size_t n_points);

struct MultCount {
    double nonlinear_per_symbol = 0.0;       // N_s*(2*Nc+1) for ESSFM, k for DBP
    int n_nonlinear_blocks = 0;
    int n_linear_blocks = 0;
    double fft_complex_mults_per_block = 0.0; // 4*(N/2)*log2(N)
};

MultCount multiplication_count(const NlcPlan& plan, const LinkSpec& link);

namespace detail {

// Joint-power nonlinear phase blocks (exposed for direct property tests).
// phi_k = phase_const * sum_j c_j (P_{k-j} + P_{k+j}); out-of-range indices
// read zero. The fixed-point variant takes raw coefficients and
// phase_mul = phase_const_with_scales * 2^(1-B).
void nonlinear_phase_rotate_f64(std::span<std::complex<double>> x,
                                std::span<std::complex<double>> y,
                                std::span<const double> coeffs, double phase_const);

void nonlinear_phase_rotate_fxp(int bits, int cordic_iterations,
                                std::span<std::complex<double>> x,
                                std::span<std::complex<double>> y,
                                std::span<const std::int64_t> coeff_raws, double phase_mul);

} // namespace detail

} // namespace fxpnlc::nlc

#endif
