#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fxpnlc/optim.hpp"
#include "test_util.hpp"

using namespace fxpnlc;
using optim::BfgsOptions;
using optim::minimize;

namespace {

// convex quadratic with cross coupling: f = sum (x_i - t_i)^2 + 0.5*(x_i - x_j)^2
double quadratic(std::span<const double> x)
{
    const double t[3] = {1.5, -0.75, 0.25};
    double f = 0.0;
    for (int i = 0; i < 3; ++i)
        f += (x[i] - t[i]) * (x[i] - t[i]);
    f += 0.5 * (x[0] - x[1]) * (x[0] - x[1]);
    f += 0.25 * (x[1] - x[2]) * (x[1] - x[2]);
    return f;
}

} // namespace

TEST_CASE("BFGS converges on a convex quadratic")
{
    std::vector<double> x{0.0, 0.0, 0.0};
    BfgsOptions opts;
    opts.rel_tol = 1e-12;
    opts.max_iters = 200;
    const auto rep = minimize(quadratic, x, opts);
    // brute-force reference minimum via fine coordinate descent
    std::vector<double> ref{0.0, 0.0, 0.0};
    for (int pass = 0; pass < 4000; ++pass) {
        for (int i = 0; i < 3; ++i) {
            const double step = 1e-3;
            std::vector<double> p = ref;
            std::vector<double> m = ref;
            p[i] += step;
            m[i] -= step;
            const double grad = (quadratic(p) - quadratic(m)) / (2.0 * step);
            ref[i] -= 0.2 * grad;
        }
    }
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(x[i] - ref[i]) < 1e-5);
    CHECK(rep.final_value <= quadratic(ref) + 1e-6);
    CHECK(rep.status != optim::OptimStatus::kLineSearchFailed);
}

TEST_CASE("objective history is non-increasing and deterministic")
{
    std::vector<double> x{3.0, -2.0, 0.5};
    BfgsOptions opts;
    const auto rep = minimize(quadratic, x, opts);
    for (std::size_t i = 1; i < rep.objective_history.size(); ++i)
        CHECK(rep.objective_history[i] <= rep.objective_history[i - 1] + 1e-15);

    std::vector<double> y{3.0, -2.0, 0.5};
    const auto rep2 = minimize(quadratic, y, opts);
    CHECK(x == y);
    CHECK(rep.final_value == rep2.final_value);
}

TEST_CASE("restart from the converged point terminates immediately")
{
    std::vector<double> x{1.0, 1.0, 1.0};
    BfgsOptions opts;
    opts.rel_tol = 1e-10;
    opts.max_iters = 200;
    minimize(quadratic, x, opts);
    std::vector<double> y = x;
    const auto rep = minimize(quadratic, y, opts);
    CHECK(rep.iterations <= 2);
}

TEST_CASE("max_iters caps the loop")
{
    std::vector<double> x{30.0, -20.0, 5.0};
    BfgsOptions opts;
    opts.rel_tol = 1e-16;
    opts.max_iters = 1;
    const auto rep = minimize(quadratic, x, opts);
    CHECK(rep.iterations <= 1);
}

TEST_CASE("chain objective at zero coefficients equals the negated CDC SNR")
{
    testutil::MiniSystem s = testutil::mini_system(1, 1024);
    optim::OptimProblem prob;
    prob.link = s.link;
    prob.tx = s.tx;
    prob.launch_power_dbm = 0.0;
    prob.n_coeffs = 2;
    prob.fft_size_exp = 9;
    const optim::EssfmObjective obj(prob);
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(obj(zeros) == doctest::Approx(-obj.cdc_snr_db()).epsilon(1e-12));
}

TEST_CASE("ESSFM optimization improves on CDC for a nonlinear mini link")
{
    testutil::MiniSystem s = testutil::mini_system(2, 2048);
    optim::OptimProblem prob;
    prob.link = s.link;
    prob.tx = s.tx;
    prob.launch_power_dbm = 4.0; // strongly nonlinear so the gain is visible
    prob.n_coeffs = 4;
    prob.fft_size_exp = 9;
    prob.max_iters = 12;
    const auto res = optim::optimize_essfm(prob);

    CHECK(res.essfm_snr_db > res.cdc_snr_db);
    double dc = res.coeffs[0] * 2.0;
    for (std::size_t i = 1; i < res.coeffs.size(); ++i) {
        CHECK(std::isfinite(res.coeffs[i]));
        dc += 2.0 * res.coeffs[i];
    }
    CHECK(dc > 0.0);

    // first-order stationarity around the returned point
    const optim::EssfmObjective obj(prob);
    const double f0 = obj(res.coeffs);
    auto pert = res.coeffs;
    pert[0] += 1e-3;
    CHECK(std::abs(obj(pert) - f0) < 0.05);
    CHECK(-f0 == doctest::Approx(res.essfm_snr_db).epsilon(1e-9));
}
