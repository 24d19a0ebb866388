#ifndef FXPNLC_OPTIM_HPP
#define FXPNLC_OPTIM_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fxpnlc/fxp.hpp"
#include "fxpnlc/signal.hpp"

namespace fxpnlc::optim {

// Coefficients scaled by a power of two so that max|c_i * 2^-scale_exp| < 1,
// then quantized; c_i is reconstructed as words[i].value() * 2^scale_exp and
// the scale is compensated exactly in the phase constant.
struct QuantizedCoeffs {
    std::vector<fxp::FxpWord> words;
    int scale_exp = 0;

    double value(std::size_t i) const;
    bool all_zero() const;
};

QuantizedCoeffs quantize_coefficients(std::span<const double> coeffs, int bits);

enum class OptimStatus { kConverged, kMaxIters, kLineSearchFailed };

struct BfgsOptions {
    double rel_tol = 1e-3;
    int max_iters = 60;
    double fd_step_rel = 1e-4;
    int threads = 1; // parallel finite-difference evaluations
};

struct BfgsReport {
    OptimStatus status = OptimStatus::kConverged;
    int iterations = 0;
    double initial_value = 0.0;
    double final_value = 0.0;
    double grad_norm = 0.0;
    int evaluations = 0;
    std::vector<double> objective_history;
};

using Objective = std::function<double(std::span<const double>)>;

// Quasi-Newton (BFGS) minimization with a cubic-interpolation line search;
// gradients by central finite differences. Terminates when the relative
// objective decrease drops below rel_tol or max_iters is reached. A failed
// line search falls back to one steepest-descent step before giving up.
BfgsReport minimize(const Objective& f, std::vector<double>& x, const BfgsOptions& opts);

// Offline ESSFM coefficient fit: minimize the negated chain SNR over
// c_0..c_Nc on the float64 backend, one fixed noisy channel realization.
struct OptimProblem {
    LinkSpec link;
    TxConfig tx;
    double launch_power_dbm = -2.5;
    int n_coeffs = 16; // Nc+1, power of two
    std::vector<double> init;
    double rel_tol = 1e-3;
    int max_iters = 60;
    int fft_size_exp = 11;
    double wh_split = 0.4;
    int threads = 1;
};

struct OptimResult {
    std::vector<double> coeffs;
    BfgsReport report;
    double cdc_snr_db = 0.0;
    double essfm_snr_db = 0.0;
};

// Negated chain SNR as a function of the coefficient vector, over one fixed
// noisy channel realization (common random numbers across evaluations).
// Construction propagates the channel once; evaluations run the receiver.
class EssfmObjective {
  public:
    explicit EssfmObjective(const OptimProblem& problem);
    double operator()(std::span<const double> coeffs) const;
    double cdc_snr_db() const;

  private:
    OptimProblem problem_;
    DualPolSignal tx_symbols_;
    DualPolSignal rx_2sps_;
};

OptimResult optimize_essfm(const OptimProblem& problem);

} // namespace fxpnlc::optim

#endif
