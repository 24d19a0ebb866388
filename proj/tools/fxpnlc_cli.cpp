#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "fxpnlc/io.hpp"
#include "fxpnlc/nlc.hpp"
#include "fxpnlc/sweep.hpp"

using namespace fxpnlc;

namespace {

struct CommonArgs {
    std::string config;
    std::string scenario;
    int jobs = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool full_scale = false;
};

sweep::SweepConfig resolve_config(const CommonArgs& a)
{
    sweep::SweepConfig cfg;
    if (!a.config.empty())
        cfg = sweep::load_config(a.config);
    if (a.full_scale && !cfg.full_scale)
        sweep::apply_full_scale(cfg);
    if (!a.scenario.empty())
        cfg.scenario = a.scenario;
    if (a.jobs > 0)
        cfg.jobs = a.jobs;
    if (a.seed_set)
        cfg.seed = a.seed;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& a)
{
    cmd->add_option("--config", a.config, "configuration file (key = value with [sections])");
    cmd->add_option("--scenario", a.scenario, "scenario name");
    cmd->add_option("--jobs", a.jobs, "parallel worker count");
    cmd->add_option("--seed", a.seed, "master seed")->each([&](const std::string&) {
        a.seed_set = true;
    });
    cmd->add_flag("--full-scale", a.full_scale, "1000 km / 2^16 symbol reproduction grid");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fixed-point nonlinearity-compensation testbed"};
    app.require_subcommand(1);

    CommonArgs opt_args;
    auto* cmd_opt = app.add_subcommand("optimize", "fit ESSFM coefficient files");
    add_common(cmd_opt, opt_args);

    CommonArgs sweep_args;
    auto* cmd_sweep = app.add_subcommand("sweep", "run a scenario sweep and emit CSVs");
    add_common(cmd_sweep, sweep_args);

    CommonArgs report_args;
    auto* cmd_report = app.add_subcommand("report", "regenerate CSVs from cached records");
    add_common(cmd_report, report_args);

    CommonArgs point_args;
    auto* cmd_point = app.add_subcommand("point", "run a single experiment point");
    add_common(cmd_point, point_args);
    std::string algo = "cdc";
    int bits = 0;
    int spl = 1;
    int n_coeffs = 8;
    double power = -1.0;
    int fft_exp = 0;
    cmd_point->add_option("--algo", algo, "cdc | dbp | essfm");
    cmd_point->add_option("--bits", bits, "bit depth (0 = float64)");
    cmd_point->add_option("--spl", spl, "DBP steps per link");
    cmd_point->add_option("--taps", n_coeffs, "ESSFM filter size Nc+1");
    cmd_point->add_option("--power", power, "launch power, dBm");
    cmd_point->add_option("--fft", fft_exp, "FFT size exponent (0 = optimize)");

    try {
        app.parse(argc, argv);

        if (cmd_opt->parsed()) {
            const auto cfg = resolve_config(opt_args);
            const int n = sweep::run_optimize(cfg);
            std::cout << "wrote " << n << " coefficient file(s) into " << cfg.coeff_dir << "\n";
            return 0;
        }
        if (cmd_sweep->parsed()) {
            const auto cfg = resolve_config(sweep_args);
            const auto stats = sweep::run_sweep(cfg);
            std::cout << "sweep " << cfg.scenario << ": computed=" << stats.computed
                      << " reused=" << stats.reused << " failed=" << stats.failed
                      << " output=" << cfg.output_dir << "\n";
            return stats.failed == 0 ? 0 : 2;
        }
        if (cmd_report->parsed()) {
            const auto cfg = resolve_config(report_args);
            const auto records = sweep::load_records(
                (std::filesystem::path(cfg.output_dir) / "records.csv").string());
            sweep::write_reports(cfg, records);
            std::cout << "regenerated " << cfg.scenario << " CSVs from " << records.size()
                      << " record(s)\n";
            return 0;
        }
        if (cmd_point->parsed()) {
            const auto cfg = resolve_config(point_args);
            sweep::PointSpec spec;
            spec.scenario = cfg.scenario;
            spec.algo = nlc::algo_from_string(algo);
            spec.format = cfg.formats.front();
            spec.bit_depth = bits == 0 ? std::optional<int>{} : std::optional<int>{bits};
            spec.steps_per_link = spl;
            spec.n_coeffs = spec.algo == nlc::Algo::kEssfm ? n_coeffs : 0;
            spec.wh_split = spec.algo == nlc::Algo::kEssfm ? 0.4 : 0.85;
            spec.power_dbm = power;
            spec.fft_exp = fft_exp == 0 ? std::optional<int>{} : std::optional<int>{fft_exp};
            spec.spans = cfg.spans;
            spec.n_symbols = cfg.n_symbols;
            spec.seed = cfg.seed;
            sweep::Runner runner(cfg);
            const auto rec = runner.run_point(spec);
            std::cout << sweep::ExperimentRecord::csv_header() << "\n" << rec.to_csv_row() << "\n";
            if (!rec.ok()) {
                std::cerr << "error: " << rec.status << "\n";
                return 2;
            }
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
