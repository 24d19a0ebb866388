#include "fxpnlc/fft.hpp"

namespace fxpnlc::dsp {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n)
{
    int e = 0;
    while ((std::size_t{1} << e) < n)
        ++e;
    return e;
}

double fft_noise_bound(std::size_t n, int bits)
{
    if (n < 1)
        throw std::invalid_argument("FFT size must be >= 1");
    fxp::check_bits(bits);
    return 4.0 * static_cast<double>(n - 1) * std::exp2(-2.0 * bits) / 12.0;
}

void fft_f64(const FftPlan<Float64Backend>& plan, std::span<std::complex<double>> x, bool inverse)
{
    plan.run(x, inverse);
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(plan.size());
        for (auto& z : x)
            z *= inv_n;
    }
}

std::vector<double> angular_freq_grid(std::size_t n, double sample_rate)
{
    std::vector<double> w(n);
    const double df = sample_rate / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (k < n / 2) ? static_cast<double>(k) * df
                                     : (static_cast<double>(k) - static_cast<double>(n)) * df;
        w[k] = 2.0 * std::numbers::pi * f;
    }
    return w;
}

} // namespace fxpnlc::dsp
