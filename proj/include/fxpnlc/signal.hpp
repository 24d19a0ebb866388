#ifndef FXPNLC_SIGNAL_HPP
#define FXPNLC_SIGNAL_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace fxpnlc {

inline constexpr double kSpeedOfLight = 299792458.0;      // m/s
inline constexpr double kPlanck = 6.62607015e-34;         // J s
inline constexpr double kCarrierWavelength = 1550e-9;     // m, C-band convention

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

// Fiber/amplifier/link parameters. Defaults follow the 1000 km reference
// system: 25 x 40 km SSMF spans with lumped EDFAs.
struct LinkSpec {
    double alpha_db_per_km = 0.2;
    double dispersion_ps_nm_km = 17.0;
    double gamma_w_km = 1.2;          // 1/(W km)
    double span_length_m = 40e3;
    int span_count = 25;
    double sim_step_m = 100.0;
    double edfa_nf_db = 5.0;
    double carrier_wavelength_m = kCarrierWavelength;

    double total_length_m() const { return span_length_m * span_count; }
    double alpha_per_m() const;          // power attenuation, 1/m
    double beta2_s2_per_m() const;       // group velocity dispersion
    double gamma_per_w_m() const { return gamma_w_km * 1e-3; }
    double span_loss_db() const { return alpha_db_per_km * span_length_m * 1e-3; }
    double carrier_freq_hz() const { return kSpeedOfLight / carrier_wavelength_m; }

    // Effective nonlinear length of the forward interval [z0, z1] (meters
    // from the transmitter), accounting for the per-span power reset.
    double effective_length_m(double z0, double z1) const;

    void validate() const;
};

enum class ModFormat { kQpsk, k16Qam };

std::string to_string(ModFormat f);
ModFormat mod_format_from_string(const std::string& s);

struct TxConfig {
    ModFormat format = ModFormat::kQpsk;
    int n_symbols = 1 << 14;
    double symbol_rate = 32e9;
    double rrc_rolloff = 0.01;
    int sps = 4;
    std::uint64_t seed = 1;
};

// Time series of complex field samples for both polarizations.
struct DualPolSignal {
    std::vector<std::complex<double>> x;
    std::vector<std::complex<double>> y;
    double sample_rate = 0.0;
    int samples_per_symbol = 0;
    double mean_power_dbm = 0.0;

    std::size_t size() const { return x.size(); }
};

// Mean per-sample dual-polarization power, sum(|x|^2 + |y|^2)/N.
double mean_dualpol_power(const DualPolSignal& s);
void scale_signal(DualPolSignal& s, double amplitude_factor);

// Frequency response on an FFT grid; taps are kept in double precision and
// quantized by the consuming backend at application time.
struct FreqResponse {
    std::vector<std::complex<double>> taps;
    std::vector<double> grid_rad_s;
};

// Deterministic per-stream seeding (splitmix64 over a master seed).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace fxpnlc

#endif
