#include "fxpnlc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fxpnlc/channel.hpp"
#include "fxpnlc/optim.hpp"
#include "fxpnlc/rxchain.hpp"

namespace fxpnlc::sweep {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v)
{
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

std::string sanitize(std::string s)
{
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '\r')
            c = ';';
    return s;
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> split_csv(const std::string& row)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : row) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

LinkSpec SweepConfig::link() const
{
    LinkSpec l;
    l.span_count = spans;
    return l;
}

TxConfig SweepConfig::tx(ModFormat f) const
{
    TxConfig t;
    t.format = f;
    t.n_symbols = n_symbols;
    t.symbol_rate = symbol_rate;
    t.rrc_rolloff = rolloff;
    t.seed = seed;
    return t;
}

void SweepConfig::validate() const
{
    bool known = false;
    for (const char* s : kScenarios)
        known = known || scenario == s;
    if (!known)
        throw std::invalid_argument("unknown scenario: " + scenario);
    if (formats.empty() || bit_depths.empty() || steps_per_link.empty() || n_coeffs.empty() ||
        powers_dbm.empty() || fft_exps.empty())
        throw std::invalid_argument("sweep axes must be non-empty");
    for (int b : bit_depths) {
        fxp::check_bits(b);
        if (b < fxp::kMinPlanBits)
            throw std::invalid_argument("bit depth below " + std::to_string(fxp::kMinPlanBits));
    }
    for (int e : fft_exps)
        if (e < 5 || e > 15)
            throw std::invalid_argument("fft exponent outside [5, 15]");
    for (int k : steps_per_link)
        if (k < 1)
            throw std::invalid_argument("steps_per_link must be >= 1");
    for (int n : n_coeffs)
        if (n < 1 || (n & (n - 1)) != 0)
            throw std::invalid_argument("n_coeffs values must be powers of two");
    if (spans < 1 || n_symbols < 1024 || (n_symbols & (n_symbols - 1)) != 0)
        throw std::invalid_argument("need >= 1 span and a power-of-two symbol count >= 1024");
    if (jobs < 1)
        throw std::invalid_argument("jobs must be >= 1");
    link().validate();
}

SweepConfig config_from_map(const io::ConfigMap& map)
{
    SweepConfig cfg;
    const std::set<std::string> sweep_keys{"scenario",       "formats",  "bit_depths",
                                           "steps_per_link", "n_coeffs", "powers_dbm",
                                           "fft_exps",       "seed",     "jobs",
                                           "output",         "coeff_dir"};
    const std::set<std::string> system_keys{"spans", "n_symbols", "symbol_rate_gbd", "rolloff",
                                            "full_scale"};
    for (const auto& [section, kv] : map) {
        if (section == "sweep") {
            for (const auto& [k, v] : kv) {
                if (!sweep_keys.count(k))
                    throw std::runtime_error("unknown [sweep] key: " + k);
                if (k == "scenario")
                    cfg.scenario = v;
                else if (k == "formats") {
                    cfg.formats.clear();
                    std::stringstream ss(v);
                    std::string item;
                    while (std::getline(ss, item, ',')) {
                        const auto b = item.find_first_not_of(" \t");
                        const auto e = item.find_last_not_of(" \t");
                        if (b != std::string::npos)
                            cfg.formats.push_back(
                                mod_format_from_string(item.substr(b, e - b + 1)));
                    }
                } else if (k == "bit_depths")
                    cfg.bit_depths = io::parse_int_list(v);
                else if (k == "steps_per_link")
                    cfg.steps_per_link = io::parse_int_list(v);
                else if (k == "n_coeffs")
                    cfg.n_coeffs = io::parse_int_list(v);
                else if (k == "powers_dbm")
                    cfg.powers_dbm = io::parse_double_list(v);
                else if (k == "fft_exps")
                    cfg.fft_exps = io::parse_int_list(v);
                else if (k == "seed")
                    cfg.seed = static_cast<std::uint64_t>(std::stoull(v));
                else if (k == "jobs")
                    cfg.jobs = std::stoi(v);
                else if (k == "output")
                    cfg.output_dir = v;
                else if (k == "coeff_dir")
                    cfg.coeff_dir = v;
            }
        } else if (section == "system") {
            for (const auto& [k, v] : kv) {
                if (!system_keys.count(k))
                    throw std::runtime_error("unknown [system] key: " + k);
                if (k == "spans")
                    cfg.spans = std::stoi(v);
                else if (k == "n_symbols")
                    cfg.n_symbols = std::stoi(v);
                else if (k == "symbol_rate_gbd")
                    cfg.symbol_rate = std::stod(v) * 1e9;
                else if (k == "rolloff")
                    cfg.rolloff = std::stod(v);
                else if (k == "full_scale")
                    cfg.full_scale = (v == "true" || v == "1" || v == "yes");
            }
        } else if (!section.empty()) {
            throw std::runtime_error("unknown config section: " + section);
        }
    }
    if (cfg.full_scale)
        apply_full_scale(cfg);
    return cfg;
}

SweepConfig load_config(const std::string& path)
{
    return config_from_map(io::parse_config_file(path));
}

void apply_full_scale(SweepConfig& cfg)
{
    cfg.full_scale = true;
    cfg.spans = 25;
    cfg.n_symbols = 1 << 16;
    cfg.bit_depths = {7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    cfg.steps_per_link = {1, 10, 25, 50};
    cfg.n_coeffs = {16, 32, 64, 128, 256};
    cfg.powers_dbm.clear();
    for (double p = -4.0; p <= 0.01; p += 0.5)
        cfg.powers_dbm.push_back(p);
    cfg.fft_exps = {8, 9, 10, 11, 12, 13};
    std::cerr << "note: full-scale sweep selected (1000 km, 2^16 symbols); "
                 "expect hours of compute\n";
}

std::string PointSpec::key_string() const
{
    std::ostringstream ss;
    ss << scenario << '|' << nlc::to_string(algo) << '|' << to_string(format) << '|'
       << (bit_depth ? *bit_depth : 0) << '|' << steps_per_link << '|' << n_coeffs << '|'
       << fmt_double(wh_split) << '|' << fmt_double(power_dbm) << '|' << (fft_exp ? *fft_exp : 0)
       << '|' << spans << '|' << n_symbols << '|' << seed;
    return ss.str();
}

std::uint64_t PointSpec::key() const { return fnv1a(key_string()); }

std::string ExperimentRecord::csv_header()
{
    return "key,scenario,algo,format,bit_depth,steps_per_link,n_coeffs,wh_split,power_dbm,"
           "fft_exp_req,fft_exp_used,cdc_fft_exp,spans,n_symbols,seed,snr_db,cdc_snr_db,"
           "delta_snr_db,optimum,wall_ms,status,version";
}

std::string ExperimentRecord::to_csv_row() const
{
    std::ostringstream ss;
    ss << spec.key() << ',' << spec.scenario << ',' << nlc::to_string(spec.algo) << ','
       << to_string(spec.format) << ',' << (spec.bit_depth ? *spec.bit_depth : 0) << ','
       << spec.steps_per_link << ',' << spec.n_coeffs << ',' << fmt_double(spec.wh_split) << ','
       << fmt_double(spec.power_dbm) << ',' << (spec.fft_exp ? *spec.fft_exp : 0) << ','
       << fft_exp_used << ',' << cdc_fft_exp << ',' << spec.spans << ',' << spec.n_symbols << ','
       << spec.seed << ',' << fmt_double(snr_db) << ',' << fmt_double(cdc_snr_db) << ','
       << fmt_double(delta_snr_db) << ',' << (optimum ? 1 : 0) << ',' << fmt_double(wall_ms)
       << ',' << sanitize(status) << ',' << sanitize(version);
    return ss.str();
}

ExperimentRecord ExperimentRecord::from_csv_row(const std::string& row)
{
    const auto f = split_csv(row);
    if (f.size() != 22)
        throw std::runtime_error("record row has " + std::to_string(f.size()) +
                                 " fields, expected 22");
    ExperimentRecord r;
    r.spec.scenario = f[1];
    r.spec.algo = nlc::algo_from_string(f[2]);
    r.spec.format = mod_format_from_string(f[3]);
    const int bits = std::stoi(f[4]);
    r.spec.bit_depth = bits == 0 ? std::optional<int>{} : std::optional<int>{bits};
    r.spec.steps_per_link = std::stoi(f[5]);
    r.spec.n_coeffs = std::stoi(f[6]);
    r.spec.wh_split = std::stod(f[7]);
    r.spec.power_dbm = std::stod(f[8]);
    const int freq = std::stoi(f[9]);
    r.spec.fft_exp = freq == 0 ? std::optional<int>{} : std::optional<int>{freq};
    r.fft_exp_used = std::stoi(f[10]);
    r.cdc_fft_exp = std::stoi(f[11]);
    r.spec.spans = std::stoi(f[12]);
    r.spec.n_symbols = std::stoi(f[13]);
    r.spec.seed = std::stoull(f[14]);
    r.snr_db = std::stod(f[15]);
    r.cdc_snr_db = std::stod(f[16]);
    r.delta_snr_db = std::stod(f[17]);
    r.optimum = f[18] == "1";
    r.wall_ms = std::stod(f[19]);
    r.status = f[20];
    r.version = f[21];
    if (std::to_string(r.spec.key()) != f[0])
        throw std::runtime_error("record key mismatch (corrupt row?)");
    return r;
}

std::string coeff_file_name(ModFormat format, int n_coeffs, double power_dbm, int spans)
{
    char buf[160];
    std::snprintf(buf, sizeof(buf), "essfm_%s_nc%d_p%+.2fdbm_s%d.txt", to_string(format).c_str(),
                  n_coeffs, power_dbm, spans);
    return buf;
}

Runner::Runner(SweepConfig cfg) : cfg_(std::move(cfg)) {}

std::shared_ptr<const Runner::Channel> Runner::channel_for(const PointSpec& spec)
{
    std::ostringstream key;
    key << to_string(spec.format) << '|' << fmt_double(spec.power_dbm) << '|' << spec.spans
        << '|' << spec.n_symbols << '|' << spec.seed;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = channels_.find(key.str());
        if (it != channels_.end())
            return it->second;
    }
    auto chan = std::make_shared<Channel>();
    TxConfig tx = cfg_.tx(spec.format);
    tx.n_symbols = spec.n_symbols;
    tx.seed = derive_seed(spec.seed, fnv1a(key.str()));
    LinkSpec link = cfg_.link();
    link.span_count = spec.spans;
    chan->tx_symbols = channel::generate_symbols(tx);
    const auto shaped = channel::rrc_shape(chan->tx_symbols, tx);
    const auto rx4 =
        channel::propagate_link(shaped, link, spec.power_dbm, derive_seed(tx.seed, 0xc4a2ULL));
    chan->rx_2sps = rx::frontend(rx4);
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = channels_.emplace(key.str(), std::move(chan));
    return it->second;
}

nlc::NlcPlan Runner::plan_for(const PointSpec& spec, int fft_exp) const
{
    switch (spec.algo) {
    case nlc::Algo::kCdc:
        return nlc::NlcPlan::cdc(fft_exp, spec.bit_depth);
    case nlc::Algo::kDbp:
        return nlc::NlcPlan::dbp(spec.steps_per_link, fft_exp, spec.bit_depth, spec.power_dbm,
                                 spec.wh_split);
    case nlc::Algo::kEssfm: {
        const std::string name =
            coeff_file_name(spec.format, spec.n_coeffs, spec.power_dbm, spec.spans);
        std::vector<double> coeffs;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = coeff_cache_.find(name);
            if (it != coeff_cache_.end())
                coeffs = it->second;
        }
        if (coeffs.empty()) {
            const fs::path path = fs::path(cfg_.coeff_dir) / name;
            if (!fs::exists(path))
                throw std::runtime_error("missing coefficient file " + path.string() +
                                         "; run `fxpnlc optimize` for this grid first");
            coeffs = io::read_coeff_file(path.string()).coeffs;
            std::lock_guard<std::mutex> lock(mu_);
            coeff_cache_[name] = coeffs;
        }
        return nlc::NlcPlan::essfm(coeffs, fft_exp, spec.bit_depth, spec.power_dbm,
                                   spec.wh_split);
    }
    }
    throw std::logic_error("unreachable");
}

double Runner::chain_snr(const PointSpec& spec, const nlc::NlcPlan& plan,
                         const Channel& chan) const
{
    LinkSpec link = cfg_.link();
    link.span_count = spec.spans;
    const auto eq = nlc::equalize(chan.rx_2sps, link, plan);
    const auto syms = rx::matched_filter_and_decimate(eq, cfg_.symbol_rate, cfg_.rolloff);
    return rx::estimate_snr(syms, chan.tx_symbols).snr_db;
}

int Runner::optimize_fft_size(const PointSpec& spec)
{
    const auto chan = channel_for(spec);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> scores;
    for (int e : cfg_.fft_exps) {
        if ((std::size_t{1} << e) > chan->rx_2sps.size())
            continue;
        const double snr = chain_snr(spec, plan_for(spec, e), *chan);
        scores.emplace_back(e, snr);
        best = std::max(best, snr);
    }
    if (scores.empty())
        throw std::runtime_error("no admissible FFT size for this signal length");
    std::sort(scores.begin(), scores.end());
    for (const auto& [e, snr] : scores)
        if (snr >= best - 0.01)
            return e; // smallest exponent within 0.01 dB of the maximum
    return scores.back().first;
}

std::pair<int, double> Runner::cdc_baseline(const PointSpec& spec)
{
    std::ostringstream key;
    key << to_string(spec.format) << '|' << (spec.bit_depth ? *spec.bit_depth : 0) << '|'
        << fmt_double(spec.power_dbm) << '|' << spec.spans << '|' << spec.n_symbols << '|'
        << spec.seed;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = baselines_.find(key.str());
        if (it != baselines_.end())
            return it->second;
    }
    PointSpec cdc = spec;
    cdc.algo = nlc::Algo::kCdc;
    cdc.fft_exp.reset();
    const int e = optimize_fft_size(cdc);
    const auto chan = channel_for(spec);
    const double snr = chain_snr(cdc, plan_for(cdc, e), *chan);
    std::lock_guard<std::mutex> lock(mu_);
    baselines_[key.str()] = {e, snr};
    return {e, snr};
}

ExperimentRecord Runner::run_point(const PointSpec& spec)
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord rec;
    rec.spec = spec;
    rec.snr_db = std::numeric_limits<double>::quiet_NaN();
    rec.cdc_snr_db = std::numeric_limits<double>::quiet_NaN();
    rec.delta_snr_db = std::numeric_limits<double>::quiet_NaN();
    try {
        const auto chan = channel_for(spec);
        const int fft = spec.fft_exp ? *spec.fft_exp : optimize_fft_size(spec);
        rec.fft_exp_used = fft;
        rec.snr_db = chain_snr(spec, plan_for(spec, fft), *chan);
        if (spec.algo == nlc::Algo::kCdc) {
            rec.cdc_fft_exp = fft;
            rec.cdc_snr_db = rec.snr_db;
        } else {
            const auto [ce, cs] = cdc_baseline(spec);
            rec.cdc_fft_exp = ce;
            rec.cdc_snr_db = cs;
        }
        rec.delta_snr_db = rec.snr_db - rec.cdc_snr_db;
    } catch (const std::exception& e) {
        rec.status = std::string("error:") + sanitize(e.what());
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<PointSpec> enumerate_points(const SweepConfig& cfg)
{
    std::vector<PointSpec> points;
    auto base = [&](ModFormat f, double p) {
        PointSpec s;
        s.scenario = cfg.scenario;
        s.format = f;
        s.power_dbm = p;
        s.spans = cfg.spans;
        s.n_symbols = cfg.n_symbols;
        s.seed = cfg.seed;
        return s;
    };
    if (cfg.scenario == "dbp_over_cdc" || cfg.scenario == "spl_sweep") {
        for (ModFormat f : cfg.formats)
            for (double p : cfg.powers_dbm)
                for (int b : cfg.bit_depths)
                    for (int k : cfg.steps_per_link) {
                        PointSpec s = base(f, p);
                        s.algo = nlc::Algo::kDbp;
                        s.bit_depth = b;
                        s.steps_per_link = k;
                        s.wh_split = 0.85;
                        points.push_back(s);
                    }
    } else if (cfg.scenario == "essfm_power" || cfg.scenario == "essfm_taps") {
        for (ModFormat f : cfg.formats)
            for (double p : cfg.powers_dbm)
                for (int n : cfg.n_coeffs) {
                    PointSpec s = base(f, p);
                    s.algo = nlc::Algo::kEssfm;
                    s.n_coeffs = n;
                    s.wh_split = 0.4;
                    points.push_back(s);
                }
    } else if (cfg.scenario == "essfm_bits") {
        for (ModFormat f : cfg.formats)
            for (double p : cfg.powers_dbm)
                for (int b : cfg.bit_depths) {
                    PointSpec s = base(f, p);
                    s.algo = nlc::Algo::kEssfm;
                    s.bit_depth = b;
                    s.n_coeffs = cfg.n_coeffs.front();
                    s.wh_split = 0.4;
                    points.push_back(s);
                }
    } else if (cfg.scenario == "essfm_filter") {
        // report-only scenario: the response comes from the coefficient file
    }
    return points;
}

std::vector<ExperimentRecord> load_records(const std::string& path)
{
    std::vector<ExperimentRecord> out;
    std::ifstream in(path);
    if (!in)
        return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("key,", 0) == 0)
            continue;
        out.push_back(ExperimentRecord::from_csv_row(line));
    }
    return out;
}

void save_records(const std::string& path, std::vector<ExperimentRecord> records)
{
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return a.spec.key_string() < b.spec.key_string();
    });
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "# experiment records, " << kVersion << "\n";
    out << ExperimentRecord::csv_header() << "\n";
    for (const auto& r : records)
        out << r.to_csv_row() << "\n";
}

namespace {

// group key for the optimum-launch-power flag: everything but the power
std::string power_group(const ExperimentRecord& r)
{
    PointSpec s = r.spec;
    s.power_dbm = 0.0;
    return s.key_string();
}

void mark_optima(std::vector<ExperimentRecord>& records)
{
    std::map<std::string, std::vector<ExperimentRecord*>> groups;
    for (auto& r : records) {
        r.optimum = false;
        groups[power_group(r)].push_back(&r);
    }
    for (auto& [k, g] : groups) {
        ExperimentRecord* best = nullptr;
        for (auto* r : g)
            if (r->ok() && (!best || r->snr_db > best->snr_db))
                best = r;
        if (best)
            best->optimum = true;
    }
}

void write_csv_comment(std::ofstream& out, const SweepConfig& cfg)
{
    out << "# generated by " << kVersion << "\n";
    out << "# scenario=" << cfg.scenario << " spans=" << cfg.spans
        << " n_symbols=" << cfg.n_symbols << " seed=" << cfg.seed
        << " wh_split_dbp=0.85 wh_split_essfm=0.4 headroom_shift=2\n";
}

} // namespace

void write_reports(const SweepConfig& cfg, const std::vector<ExperimentRecord>& records)
{
    fs::create_directories(cfg.output_dir);
    auto path = [&](const std::string& name) {
        return (fs::path(cfg.output_dir) / name).string();
    };

    auto find_opt = [&](auto pred) -> const ExperimentRecord* {
        const ExperimentRecord* best = nullptr;
        for (const auto& r : records)
            if (r.ok() && pred(r) && (!best || r.snr_db > best->snr_db))
                best = &r;
        return best;
    };

    if (cfg.scenario == "dbp_over_cdc") {
        std::ofstream out(path("dbp_over_cdc.csv"));
        write_csv_comment(out, cfg);
        out << "bit_depth";
        for (int k : cfg.steps_per_link)
            out << ",dsnr_" << k << "spl";
        out << "\n";
        for (int b : cfg.bit_depths) {
            out << b;
            for (int k : cfg.steps_per_link) {
                const auto* r = find_opt([&](const ExperimentRecord& x) {
                    return x.spec.algo == nlc::Algo::kDbp && x.spec.bit_depth == b &&
                           x.spec.steps_per_link == k;
                });
                out << ',';
                if (r)
                    out << fmt_double(r->delta_snr_db);
            }
            out << "\n";
        }
    } else if (cfg.scenario == "spl_sweep") {
        std::ofstream out(path("spl_sweep.csv"));
        write_csv_comment(out, cfg);
        out << "spl";
        for (int b : cfg.bit_depths)
            out << ",snr_" << b << "bits";
        out << "\n";
        for (int k : cfg.steps_per_link) {
            out << k;
            for (int b : cfg.bit_depths) {
                const auto* r = find_opt([&](const ExperimentRecord& x) {
                    return x.spec.algo == nlc::Algo::kDbp && x.spec.bit_depth == b &&
                           x.spec.steps_per_link == k;
                });
                out << ',';
                if (r)
                    out << fmt_double(r->snr_db);
            }
            out << "\n";
        }
    } else if (cfg.scenario == "essfm_power") {
        std::ofstream out(path("essfm_snr_vs_power.csv"));
        write_csv_comment(out, cfg);
        out << "power_dbm";
        for (ModFormat f : cfg.formats) {
            out << ",snr_cdc_" << to_string(f);
            for (int n : cfg.n_coeffs)
                out << ",snr_essfm_nc" << n << "_" << to_string(f);
        }
        out << "\n";
        for (double p : cfg.powers_dbm) {
            out << fmt_double(p);
            for (ModFormat f : cfg.formats) {
                const ExperimentRecord* any = nullptr;
                for (const auto& r : records)
                    if (r.ok() && r.spec.format == f && r.spec.power_dbm == p)
                        any = &r;
                out << ',';
                if (any)
                    out << fmt_double(any->cdc_snr_db);
                for (int n : cfg.n_coeffs) {
                    const ExperimentRecord* rec = nullptr;
                    for (const auto& r : records)
                        if (r.ok() && r.spec.format == f && r.spec.power_dbm == p &&
                            r.spec.n_coeffs == n)
                            rec = &r;
                    out << ',';
                    if (rec)
                        out << fmt_double(rec->snr_db);
                }
            }
            out << "\n";
        }
    } else if (cfg.scenario == "essfm_taps") {
        std::ofstream out(path("essfm_dsnr_vs_taps.csv"));
        write_csv_comment(out, cfg);
        out << "n_taps";
        for (ModFormat f : cfg.formats)
            out << ",dsnr_" << to_string(f);
        out << "\n";
        for (int n : cfg.n_coeffs) {
            out << n;
            for (ModFormat f : cfg.formats) {
                const auto* r = find_opt([&](const ExperimentRecord& x) {
                    return x.spec.format == f && x.spec.n_coeffs == n;
                });
                out << ',';
                if (r)
                    out << fmt_double(r->delta_snr_db);
            }
            out << "\n";
        }
    } else if (cfg.scenario == "essfm_bits") {
        std::ofstream out(path("essfm_dsnr_vs_bits.csv"));
        write_csv_comment(out, cfg);
        out << "bit_depth";
        for (ModFormat f : cfg.formats)
            out << ",dsnr_" << to_string(f);
        out << "\n";
        for (int b : cfg.bit_depths) {
            out << b;
            for (ModFormat f : cfg.formats) {
                const auto* r = find_opt([&](const ExperimentRecord& x) {
                    return x.spec.format == f && x.spec.bit_depth == b;
                });
                out << ',';
                if (r)
                    out << fmt_double(r->delta_snr_db);
            }
            out << "\n";
        }
    } else if (cfg.scenario == "essfm_filter") {
        const int n = cfg.n_coeffs.front();
        const ModFormat f = cfg.formats.front();
        std::string found;
        for (double p : cfg.powers_dbm) {
            const fs::path cpath = fs::path(cfg.coeff_dir) / coeff_file_name(f, n, p, cfg.spans);
            if (fs::exists(cpath)) {
                found = cpath.string();
                break;
            }
        }
        if (found.empty())
            throw std::runtime_error(
                "essfm_filter: no coefficient file found; run `fxpnlc optimize` first");
        const auto coeffs = io::read_coeff_file(found).coeffs;
        const std::size_t pts = 513;
        const auto mag = nlc::essfm_filter_response_db(coeffs, pts);
        std::ofstream out(path("essfm_filter_response.csv"));
        write_csv_comment(out, cfg);
        out << "# coefficients=" << found << "\n";
        out << "norm_freq_pi,magnitude_db\n";
        for (std::size_t j = 0; j < pts; ++j)
            out << fmt_double(static_cast<double>(j) / static_cast<double>(pts - 1)) << ','
                << fmt_double(mag[j]) << "\n";
    }
}

SweepStats run_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    const std::string rec_path = (fs::path(cfg.output_dir) / "records.csv").string();

    std::map<std::string, ExperimentRecord> merged;
    for (auto& r : load_records(rec_path))
        merged.emplace(r.spec.key_string(), std::move(r));

    const auto points = enumerate_points(cfg);
    std::vector<PointSpec> todo;
    SweepStats stats;
    for (const auto& p : points) {
        const auto it = merged.find(p.key_string());
        if (it != merged.end() && it->second.ok())
            ++stats.reused;
        else
            todo.push_back(p);
    }

    Runner runner(cfg);
    std::mutex merge_mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < todo.size(); i = next.fetch_add(1)) {
            ExperimentRecord rec = runner.run_point(todo[i]);
            std::lock_guard<std::mutex> lock(merge_mu);
            if (rec.ok())
                ++stats.computed;
            else
                ++stats.failed;
            merged[rec.spec.key_string()] = std::move(rec);
        }
    };
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(todo.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    std::vector<ExperimentRecord> records;
    records.reserve(merged.size());
    for (auto& [k, r] : merged)
        records.push_back(std::move(r));
    mark_optima(records);
    save_records(rec_path, records);
    write_reports(cfg, records);
    return stats;
}

int run_optimize(const SweepConfig& cfg)
{
    cfg.validate();
    fs::create_directories(cfg.coeff_dir);
    int written = 0;
    for (ModFormat f : cfg.formats) {
        for (double p : cfg.powers_dbm) {
            for (int n : cfg.n_coeffs) {
                const fs::path path = fs::path(cfg.coeff_dir) / coeff_file_name(f, n, p, cfg.spans);
                if (fs::exists(path))
                    continue;
                optim::OptimProblem prob;
                prob.link = cfg.link();
                prob.tx = cfg.tx(f);
                prob.launch_power_dbm = p;
                prob.n_coeffs = n;
                prob.fft_size_exp = cfg.fft_exps.back();
                prob.threads = cfg.jobs;
                const auto res = optim::optimize_essfm(prob);
                io::CoeffFile out;
                out.coeffs = res.coeffs;
                out.launch_power_dbm = p;
                out.format = f;
                out.link_km = cfg.link().total_length_m() / 1e3;
                io::write_coeff_file(path.string(), out);
                std::cerr << "optimize: " << path.string() << " snr=" << res.essfm_snr_db
                          << " cdc=" << res.cdc_snr_db << " iters=" << res.report.iterations
                          << "\n";
                ++written;
            }
        }
    }
    return written;
}

} // namespace fxpnlc::sweep
