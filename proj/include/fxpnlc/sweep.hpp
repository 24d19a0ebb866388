#ifndef FXPNLC_SWEEP_HPP
#define FXPNLC_SWEEP_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fxpnlc/io.hpp"
#include "fxpnlc/nlc.hpp"
#include "fxpnlc/signal.hpp"

namespace fxpnlc::sweep {

inline constexpr const char* kVersion = "fxpnlc 0.1.0";

// Scenario names map to the emitted figure-style CSVs.
inline constexpr const char* kScenarios[] = {
    "dbp_over_cdc",   // delta SNR vs bit depth per steps-per-link
    "spl_sweep",      // SNR vs steps-per-link per bit depth
    "essfm_power",    // float64 ESSFM SNR vs launch power per filter size
    "essfm_taps",     // delta SNR vs filter size at optimum power
    "essfm_bits",     // FXP ESSFM delta SNR vs bit depth
    "essfm_filter",   // frequency response of the optimized filter
};

struct SweepConfig {
    std::string scenario = "dbp_over_cdc";
    std::vector<ModFormat> formats{ModFormat::kQpsk};
    std::vector<int> bit_depths{8, 10, 12, 14, 16};
    std::vector<int> steps_per_link{1, 5, 10};
    std::vector<int> n_coeffs{8};
    std::vector<double> powers_dbm{-1.0};
    std::vector<int> fft_exps{9, 10, 11};
    int spans = 5;                     // desk-scale default; 25 at full scale
    int n_symbols = 1 << 14;
    double symbol_rate = 32e9;
    double rolloff = 0.01;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string output_dir = "out";
    std::string coeff_dir = "coeffs";
    bool full_scale = false;

    LinkSpec link() const;
    TxConfig tx(ModFormat f) const;
    void validate() const;
};

// Reads [sweep] and [system] sections; unknown keys are rejected.
SweepConfig config_from_map(const io::ConfigMap& map);
SweepConfig load_config(const std::string& path);

// The 1000 km reference system with the paper-scale grid. Hours of compute.
void apply_full_scale(SweepConfig& cfg);

struct PointSpec {
    std::string scenario;
    nlc::Algo algo = nlc::Algo::kCdc;
    ModFormat format = ModFormat::kQpsk;
    std::optional<int> bit_depth;   // empty: float64
    int steps_per_link = 1;
    int n_coeffs = 0;               // ESSFM filter size (Nc+1)
    double wh_split = 0.85;
    double power_dbm = -1.0;
    std::optional<int> fft_exp;     // empty: optimized over the config axis
    int spans = 5;
    int n_symbols = 1 << 14;
    std::uint64_t seed = 1;

    std::string key_string() const;
    std::uint64_t key() const; // FNV-1a of key_string
};

struct ExperimentRecord {
    PointSpec spec;
    int fft_exp_used = 0;
    int cdc_fft_exp = 0;
    double snr_db = 0.0;
    double cdc_snr_db = 0.0;
    double delta_snr_db = 0.0;
    bool optimum = false;
    double wall_ms = 0.0;
    std::string status = "ok";
    std::string version = kVersion;

    static std::string csv_header();
    std::string to_csv_row() const;
    static ExperimentRecord from_csv_row(const std::string& row);
    bool ok() const { return status == "ok"; }
};

std::string coeff_file_name(ModFormat format, int n_coeffs, double power_dbm, int spans);

// Executes points with shared channel/baseline caches. Thread safe.
class Runner {
  public:
    explicit Runner(SweepConfig cfg);

    ExperimentRecord run_point(const PointSpec& spec);
    // argmax SNR over the config FFT axis; ties toward smaller exponents
    int optimize_fft_size(const PointSpec& spec);

    const SweepConfig& config() const { return cfg_; }

  private:
    struct Channel {
        DualPolSignal tx_symbols;
        DualPolSignal rx_2sps;
    };

    std::shared_ptr<const Channel> channel_for(const PointSpec& spec);
    double chain_snr(const PointSpec& spec, const nlc::NlcPlan& plan,
                     const Channel& chan) const;
    nlc::NlcPlan plan_for(const PointSpec& spec, int fft_exp) const;
    std::pair<int, double> cdc_baseline(const PointSpec& spec);

    SweepConfig cfg_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const Channel>> channels_;
    std::map<std::string, std::pair<int, double>> baselines_;
    mutable std::map<std::string, std::vector<double>> coeff_cache_;
};

std::vector<PointSpec> enumerate_points(const SweepConfig& cfg);

struct SweepStats {
    int computed = 0;
    int reused = 0;
    int failed = 0;
};

// Runs missing points (resumable via records.csv in the output directory),
// rewrites records.csv and the scenario's figure CSV.
SweepStats run_sweep(const SweepConfig& cfg);

std::vector<ExperimentRecord> load_records(const std::string& path);
void save_records(const std::string& path, std::vector<ExperimentRecord> records);

// Regenerate the figure CSVs for a scenario from cached records only.
void write_reports(const SweepConfig& cfg, const std::vector<ExperimentRecord>& records);

// Offline coefficient fitting for every (format, power, n_coeffs) in the
// config; skips existing files. Returns the number of files written.
int run_optimize(const SweepConfig& cfg);

} // namespace fxpnlc::sweep

#endif
