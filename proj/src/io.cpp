#include "fxpnlc/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fxpnlc::io {

namespace {

constexpr std::uint32_t kMagic = 0x46585053; // "FXPS"
constexpr std::uint32_t kVersion = 1;

struct SignalHeader {
    std::uint32_t magic;
    std::uint32_t version;
    std::uint64_t n_samples;
    double sample_rate;
    std::int32_t samples_per_symbol;
    std::int32_t pad;
    double mean_power_dbm;
};
static_assert(sizeof(SignalHeader) == 40);

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

void write_signal(const std::string& path, const DualPolSignal& s)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open for writing: " + path);
    SignalHeader h{kMagic, kVersion, s.size(), s.sample_rate, s.samples_per_symbol, 0,
                   s.mean_power_dbm};
    f.write(reinterpret_cast<const char*>(&h), sizeof(h));
    std::vector<double> row(4);
    for (std::size_t i = 0; i < s.size(); ++i) {
        row[0] = s.x[i].real();
        row[1] = s.x[i].imag();
        row[2] = s.y[i].real();
        row[3] = s.y[i].imag();
        f.write(reinterpret_cast<const char*>(row.data()), sizeof(double) * 4);
    }
    if (!f)
        throw std::runtime_error("short write: " + path);
}

DualPolSignal read_signal(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open: " + path);
    SignalHeader h{};
    f.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!f || h.magic != kMagic)
        throw std::runtime_error("not a signal dump: " + path);
    if (h.version != kVersion)
        throw std::runtime_error("unsupported signal dump version in " + path);
    DualPolSignal s;
    s.sample_rate = h.sample_rate;
    s.samples_per_symbol = h.samples_per_symbol;
    s.mean_power_dbm = h.mean_power_dbm;
    s.x.resize(h.n_samples);
    s.y.resize(h.n_samples);
    std::vector<double> row(4);
    for (std::uint64_t i = 0; i < h.n_samples; ++i) {
        f.read(reinterpret_cast<char*>(row.data()), sizeof(double) * 4);
        if (!f)
            throw std::runtime_error("truncated signal dump: " + path);
        s.x[i] = {row[0], row[1]};
        s.y[i] = {row[2], row[3]};
    }
    return s;
}

void write_coeff_file(const std::string& path, const CoeffFile& f)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << f.coeffs.size() << ' ';
    out.precision(17);
    out << f.launch_power_dbm << ' ' << to_string(f.format) << ' ' << f.link_km << '\n';
    for (double c : f.coeffs)
        out << c << '\n';
    if (!out)
        throw std::runtime_error("short write: " + path);
}

CoeffFile read_coeff_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    CoeffFile f;
    std::size_t n = 0;
    std::string fmt;
    if (!(in >> n >> f.launch_power_dbm >> fmt >> f.link_km))
        throw std::runtime_error("bad coefficient file header: " + path);
    f.format = mod_format_from_string(fmt);
    f.coeffs.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(in >> f.coeffs[i]))
            throw std::runtime_error("truncated coefficient file: " + path);
    return f;
}

ConfigMap parse_config_text(const std::string& text)
{
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            cfg[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        cfg[section][key] = value;
    }
    return cfg;
}

ConfigMap parse_config_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::vector<double> parse_double_list(const std::string& value)
{
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty())
            continue;
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size())
            throw std::runtime_error("bad numeric list element: " + t);
        out.push_back(v);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& value)
{
    std::vector<int> out;
    for (double v : parse_double_list(value)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw std::runtime_error("expected integer list");
        out.push_back(i);
    }
    return out;
}

} // namespace fxpnlc::io
