#include "fxpnlc/optim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "fxpnlc/channel.hpp"
#include "fxpnlc/nlc.hpp"
#include "fxpnlc/rxchain.hpp"

namespace fxpnlc::optim {

double QuantizedCoeffs::value(std::size_t i) const
{
    return words[i].value() * std::exp2(scale_exp);
}

bool QuantizedCoeffs::all_zero() const
{
    for (const auto& w : words)
        if (w.raw != 0)
            return false;
    return true;
}

QuantizedCoeffs quantize_coefficients(std::span<const double> coeffs, int bits)
{
    fxp::check_bits(bits);
    double mx = 0.0;
    for (double c : coeffs) {
        if (!std::isfinite(c))
            throw std::invalid_argument("non-finite coefficient");
        mx = std::max(mx, std::abs(c));
    }
    QuantizedCoeffs q;
    q.scale_exp = mx >= 1.0 ? static_cast<int>(std::floor(std::log2(mx))) + 1 : 0;
    const double s = std::exp2(-q.scale_exp);
    q.words.reserve(coeffs.size());
    for (double c : coeffs)
        q.words.push_back(fxp::quantize(c * s, bits));
    return q;
}

namespace {

std::vector<double> gradient(const Objective& f, const std::vector<double>& x,
                             const BfgsOptions& opts, int& evals)
{
    const std::size_t n = x.size();
    std::vector<double> g(n);
    std::vector<double> steps(n);
    for (std::size_t i = 0; i < n; ++i)
        steps[i] = opts.fd_step_rel * std::max(std::abs(x[i]), 0.01);

    auto eval_pair = [&](std::size_t i) {
        std::vector<double> xp = x;
        std::vector<double> xm = x;
        xp[i] += steps[i];
        xm[i] -= steps[i];
        g[i] = (f(xp) - f(xm)) / (2.0 * steps[i]);
    };

    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(n)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            eval_pair(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    eval_pair(i);
            });
        for (auto& t : pool)
            t.join();
    }
    evals += static_cast<int>(2 * n);
    return g;
}

// Backtracking line search with cubic interpolation against the Armijo
// condition. Returns the accepted step or 0 on failure.
double line_search(const Objective& f, const std::vector<double>& x,
                   const std::vector<double>& dir, double f0, double slope0, int& evals,
                   double* f_out)
{
    constexpr double c1 = 1e-4;
    constexpr int max_trials = 12;
    double alpha = 1.0;
    double alpha_prev = 0.0;
    double f_prev = f0;

    std::vector<double> xt(x.size());
    for (int trial = 0; trial < max_trials; ++trial) {
        for (std::size_t i = 0; i < x.size(); ++i)
            xt[i] = x[i] + alpha * dir[i];
        const double ft = f(xt);
        ++evals;
        if (std::isfinite(ft) && ft <= f0 + c1 * alpha * slope0) {
            *f_out = ft;
            return alpha;
        }
        double alpha_next;
        if (trial == 0) {
            // quadratic model through phi(0), phi'(0), phi(alpha)
            alpha_next = -slope0 * alpha * alpha / (2.0 * (ft - f0 - slope0 * alpha));
        } else {
            // cubic model through phi(0), phi'(0), phi(alpha_prev), phi(alpha)
            const double d1 = ft - f0 - slope0 * alpha;
            const double d2 = f_prev - f0 - slope0 * alpha_prev;
            const double denom = alpha * alpha * alpha_prev * alpha_prev * (alpha - alpha_prev);
            const double a = (alpha_prev * alpha_prev * d1 - alpha * alpha * d2) / denom;
            const double b =
                (-alpha_prev * alpha_prev * alpha_prev * d1 + alpha * alpha * alpha * d2) / denom;
            const double disc = b * b - 3.0 * a * slope0;
            alpha_next = (a != 0.0 && disc >= 0.0) ? (-b + std::sqrt(disc)) / (3.0 * a)
                                                   : alpha / 2.0;
        }
        if (!std::isfinite(alpha_next))
            alpha_next = alpha / 2.0;
        alpha_next = std::clamp(alpha_next, 0.1 * alpha, 0.5 * alpha);
        alpha_prev = alpha;
        f_prev = ft;
        alpha = alpha_next;
    }
    return 0.0;
}

} // namespace

BfgsReport minimize(const Objective& f, std::vector<double>& x, const BfgsOptions& opts)
{
    const std::size_t n = x.size();
    if (n == 0)
        throw std::invalid_argument("empty parameter vector");

    BfgsReport rep;
    double fx = f(x);
    rep.evaluations = 1;
    rep.initial_value = fx;
    rep.objective_history.push_back(fx);

    // inverse Hessian approximation, dense row-major
    std::vector<double> hinv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        hinv[i * n + i] = 1.0;

    std::vector<double> g = gradient(f, x, opts, rep.evaluations);
    rep.status = OptimStatus::kMaxIters;

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        std::vector<double> dir(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dir[i] -= hinv[i * n + j] * g[j];
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            slope += dir[i] * g[i];
        if (slope >= 0.0) {
            // reset to steepest descent if the model lost positive-definiteness
            for (std::size_t i = 0; i < n; ++i)
                dir[i] = -g[i];
            slope = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                slope -= g[i] * g[i];
        }
        if (-slope < 1e-15 * std::max(1.0, std::abs(fx))) {
            rep.status = OptimStatus::kConverged;
            break;
        }

        double f_new = fx;
        double alpha = line_search(f, x, dir, fx, slope, rep.evaluations, &f_new);
        if (alpha == 0.0) {
            // one steepest-descent rescue, then give up
            std::vector<double> sd(n);
            for (std::size_t i = 0; i < n; ++i)
                sd[i] = -g[i];
            double sd_slope = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                sd_slope -= g[i] * g[i];
            alpha = line_search(f, x, sd, fx, sd_slope, rep.evaluations, &f_new);
            if (alpha == 0.0) {
                rep.status = OptimStatus::kLineSearchFailed;
                break;
            }
            dir = sd;
        }

        std::vector<double> x_new(n);
        for (std::size_t i = 0; i < n; ++i)
            x_new[i] = x[i] + alpha * dir[i];
        std::vector<double> g_new = gradient(f, x_new, opts, rep.evaluations);

        // BFGS update of the inverse Hessian
        std::vector<double> s(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            yv[i] = g_new[i] - g[i];
        }
        double ys = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            ys += yv[i] * s[i];
        if (ys > 1e-14) {
            const double rho = 1.0 / ys;
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    hy[i] += hinv[i * n + j] * yv[j];
            double yhy = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                yhy += yv[i] * hy[i];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    hinv[i * n + j] += (1.0 + rho * yhy) * rho * s[i] * s[j] -
                                       rho * (s[i] * hy[j] + hy[i] * s[j]);
        }

        const double decrease = fx - f_new;
        x = x_new;
        g = std::move(g_new);
        fx = f_new;
        rep.objective_history.push_back(fx);
        rep.iterations = iter + 1;
        if (decrease >= 0.0 && decrease < opts.rel_tol * std::max(1.0, std::abs(fx))) {
            rep.status = OptimStatus::kConverged;
            break;
        }
    }

    rep.final_value = fx;
    rep.grad_norm = 0.0;
    for (double v : g)
        rep.grad_norm += v * v;
    rep.grad_norm = std::sqrt(rep.grad_norm);
    return rep;
}

EssfmObjective::EssfmObjective(const OptimProblem& problem) : problem_(problem)
{
    if (problem.n_coeffs < 1 || !((problem.n_coeffs & (problem.n_coeffs - 1)) == 0))
        throw std::invalid_argument("n_coeffs must be a power of two");
    tx_symbols_ = channel::generate_symbols(problem.tx);
    const auto shaped = channel::rrc_shape(tx_symbols_, problem.tx);
    const auto rx4 = channel::propagate_link(shaped, problem.link, problem.launch_power_dbm,
                                             derive_seed(problem.tx.seed, 0xa5eULL));
    rx_2sps_ = rx::frontend(rx4);
}

static double chain_snr_db(const OptimProblem& problem, const DualPolSignal& rx_2sps,
                           const DualPolSignal& tx_symbols, const nlc::NlcPlan& plan)
{
    const auto eq = nlc::equalize(rx_2sps, problem.link, plan);
    const auto syms =
        rx::matched_filter_and_decimate(eq, problem.tx.symbol_rate, problem.tx.rrc_rolloff);
    return rx::estimate_snr(syms, tx_symbols).snr_db;
}

double EssfmObjective::operator()(std::span<const double> coeffs) const
{
    nlc::NlcPlan plan = nlc::NlcPlan::essfm(std::vector<double>(coeffs.begin(), coeffs.end()),
                                            problem_.fft_size_exp, std::nullopt,
                                            problem_.launch_power_dbm, problem_.wh_split);
    const double snr = chain_snr_db(problem_, rx_2sps_, tx_symbols_, plan);
    if (!std::isfinite(snr)) {
        if (snr > 0.0)
            return -500.0; // zero-error sentinel: effectively perfect
        std::cerr << "objective: non-finite SNR, penalizing\n";
        return 1e3;
    }
    return -snr;
}

double EssfmObjective::cdc_snr_db() const
{
    return chain_snr_db(problem_, rx_2sps_, tx_symbols_,
                        nlc::NlcPlan::cdc(problem_.fft_size_exp, std::nullopt));
}

OptimResult optimize_essfm(const OptimProblem& problem)
{
    if (!problem.init.empty() && static_cast<int>(problem.init.size()) != problem.n_coeffs)
        throw std::invalid_argument("init vector length must equal n_coeffs");

    const EssfmObjective objective(problem);

    OptimResult result;
    result.coeffs = problem.init;
    if (result.coeffs.empty()) {
        result.coeffs.assign(problem.n_coeffs, 0.0);
        result.coeffs[0] = 0.5; // plain single-step DBP starting point
    }

    BfgsOptions opts;
    opts.rel_tol = problem.rel_tol;
    opts.max_iters = problem.max_iters;
    opts.threads = problem.threads;
    result.report = minimize([&](std::span<const double> c) { return objective(c); },
                             result.coeffs, opts);
    result.essfm_snr_db = -result.report.final_value;
    result.cdc_snr_db = objective.cdc_snr_db();
    return result;
}

} // namespace fxpnlc::optim
