#ifndef FXPNLC_RXCHAIN_HPP
#define FXPNLC_RXCHAIN_HPP

#include <cstddef>

#include "fxpnlc/nlc.hpp"
#include "fxpnlc/signal.hpp"

namespace fxpnlc::rx {

inline constexpr std::size_t kSnrWindowSymbols = std::size_t{1} << 14;
// Symbols excluded at each end when the sequence is too short to leave a
// natural guard around the central window (overlap-save edge transients).
inline constexpr std::size_t kEdgeGuardSymbols = 512;

struct SnrEstimate {
    double snr_db = 0.0;
    std::size_t n_symbols_used = 0;
    double per_pol_db[2] = {0.0, 0.0};
};

// Resample 4 -> 2 samples/symbol (the signal band is below the 2 sps
// Nyquist, so plain decimation suffices) and normalize to unit average
// dual-polarization sample power.
DualPolSignal frontend(const DualPolSignal& rx4);

// Float64 RRC matched filter, symbol-instant sampling, unit mean symbol
// energy. Timing is simulation-aligned; no clock recovery.
DualPolSignal matched_filter_and_decimate(const DualPolSignal& s2, double symbol_rate,
                                          double rolloff);

// Data-aided estimate over the central window: a = <rx,tx>/<tx,tx>,
// e = rx - a*tx, SNR = |a|^2 E|tx|^2 / E|e|^2 per polarization, averaged in
// the linear domain. Returns +infinity when the error vanishes.
SnrEstimate estimate_snr(const DualPolSignal& rx_symbols, const DualPolSignal& tx_symbols,
                         std::size_t window = kSnrWindowSymbols,
                         std::size_t edge_guard = kEdgeGuardSymbols);

// Full receiver: frontend -> NLC -> matched filter -> SNR against the
// transmitted symbols.
SnrEstimate run_receiver(const DualPolSignal& rx4, const LinkSpec& link,
                         const nlc::NlcPlan& plan, const DualPolSignal& tx_symbols,
                         double symbol_rate, double rolloff);

} // namespace fxpnlc::rx

#endif
