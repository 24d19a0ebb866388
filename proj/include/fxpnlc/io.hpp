#ifndef FXPNLC_IO_HPP
#define FXPNLC_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "fxpnlc/signal.hpp"

namespace fxpnlc::io {

// Binary waveform dump: a small self-describing header followed by
// little-endian float64 samples interleaved (x_re, x_im, y_re, y_im).
// Used to cache propagated waveforms between sweep points.
void write_signal(const std::string& path, const DualPolSignal& s);
DualPolSignal read_signal(const std::string& path);

// ESSFM coefficient file: one header line "n_coeffs launch_power_dbm format
// link_km", then one coefficient per line in double precision decimal.
struct CoeffFile {
    std::vector<double> coeffs;
    double launch_power_dbm = 0.0;
    ModFormat format = ModFormat::kQpsk;
    double link_km = 0.0;
};

void write_coeff_file(const std::string& path, const CoeffFile& f);
CoeffFile read_coeff_file(const std::string& path);

// Line-oriented "key = value" configuration with [section] headers and
// comma-separated lists. Returns section -> key -> raw value.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

std::vector<double> parse_double_list(const std::string& value);
std::vector<int> parse_int_list(const std::string& value);

} // namespace fxpnlc::io

#endif
