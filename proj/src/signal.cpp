#include "fxpnlc/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fxpnlc {

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double LinkSpec::alpha_per_m() const
{
    // 0.2 dB/km -> 4.605e-5 1/m (power)
    return alpha_db_per_km / (10.0 * std::log10(std::numbers::e)) * 1e-3;
}

double LinkSpec::beta2_s2_per_m() const
{
    const double d_si = dispersion_ps_nm_km * 1e-6; // s/m^2
    return -d_si * carrier_wavelength_m * carrier_wavelength_m /
           (2.0 * std::numbers::pi * kSpeedOfLight);
}

double LinkSpec::effective_length_m(double z0, double z1) const
{
    if (z1 < z0)
        std::swap(z0, z1);
    const double a = alpha_per_m();
    const double ls = span_length_m;
    double total = 0.0;
    double z = z0;
    while (z < z1 - 1e-9) {
        const double span_start = std::floor(z / ls + 1e-12) * ls;
        const double seg_end = std::min(z1, span_start + ls);
        const double u0 = z - span_start;
        const double u1 = seg_end - span_start;
        if (a > 0.0)
            total += (std::exp(-a * u0) - std::exp(-a * u1)) / a;
        else
            total += u1 - u0;
        z = seg_end;
    }
    return total;
}

void LinkSpec::validate() const
{
    if (alpha_db_per_km < 0 || dispersion_ps_nm_km <= 0 || gamma_w_km < 0 || span_length_m <= 0 ||
        sim_step_m <= 0 || span_count < 1)
        throw std::invalid_argument("invalid link parameters");
    const double steps = span_length_m / sim_step_m;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw std::invalid_argument("sim_step must divide span_length");
}

std::string to_string(ModFormat f) { return f == ModFormat::kQpsk ? "qpsk" : "16qam"; }

ModFormat mod_format_from_string(const std::string& s)
{
    if (s == "qpsk" || s == "QPSK")
        return ModFormat::kQpsk;
    if (s == "16qam" || s == "16QAM")
        return ModFormat::k16Qam;
    throw std::invalid_argument("unsupported modulation format: " + s);
}

double mean_dualpol_power(const DualPolSignal& s)
{
    if (s.size() == 0)
        return 0.0;
    double p = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        p += std::norm(s.x[i]) + std::norm(s.y[i]);
    return p / static_cast<double>(s.size());
}

void scale_signal(DualPolSignal& s, double amplitude_factor)
{
    for (auto& z : s.x)
        z *= amplitude_factor;
    for (auto& z : s.y)
        z *= amplitude_factor;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace fxpnlc
