#ifndef FXPNLC_CHANNEL_HPP
#define FXPNLC_CHANNEL_HPP

#include "fxpnlc/signal.hpp"

namespace fxpnlc::channel {

// Unit-average-energy constellation symbols, independent per polarization,
// deterministic in the seed. Returned at 1 sample/symbol.
DualPolSignal generate_symbols(const TxConfig& cfg);

// Root-raised-cosine amplitude response evaluated at frequency f (Hz) for a
// given symbol rate and rolloff; H(0) = 1.
double rrc_amplitude(double f_hz, double symbol_rate, double rolloff);

// Upsample the symbol train to cfg.sps samples/symbol and shape it with a
// zero-phase frequency-domain RRC filter. Symbol m sits at sample m*sps.
DualPolSignal rrc_shape(const DualPolSignal& symbols, const TxConfig& cfg);

// EDFA: field gain sqrt(G) plus circular complex Gaussian ASE per
// polarization with per-sample variance (G-1) * F * h * nu * f_sample / 2.
void edfa(DualPolSignal& s, double gain_db, double nf_db, double carrier_freq_hz,
          std::uint64_t seed, bool noiseless = false);

// Symmetric split-step Manakov propagation over length_m of fiber at
// link.sim_step_m resolution (no amplification). Loss is folded into each
// step's effective length; nonlinear phase uses the 8/9 Manakov factor.
void propagate_fiber(DualPolSignal& s, const LinkSpec& link, double length_m);

// Full link: scale to launch power, then per span run the fiber SSFM and an
// EDFA that exactly compensates the span loss. ASE streams derive from
// (seed, span). noiseless disables ASE injection.
DualPolSignal propagate_link(const DualPolSignal& s, const LinkSpec& link,
                             double launch_power_dbm, std::uint64_t seed,
                             bool noiseless = false);

} // namespace fxpnlc::channel

#endif
