#include "oulab/stats.hpp"

#include "oulab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oulab {

double kolmogorov_survival(double x) noexcept
{
    if (x <= 0.0) {
        return 1.0;
    }
    if (x < 1.18) {
        // Jacobi-theta form converges fast for small x:
        // P(K <= x) = sqrt(2 pi) / x sum_{k odd} e^{-k^2 pi^2 / (8 x^2)}
        double const w = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
        double sum = 0.0;
        for (int k = 1; k <= 15; k += 2) {
            sum += std::exp(-static_cast<double>(k * k) * w);
        }
        return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * sum;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        double const term = std::exp(-2.0 * k * k * x * x);
        sum += sign * term;
        if (term < 1e-18) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double corrected_p(double statistic, double effective_n)
{
    double const root = std::sqrt(effective_n);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic);
}

}  // namespace

KsResult ks_one_sample(std::span<double const> samples, std::function<double(double)> const& cdf)
{
    if (samples.empty()) {
        throw DomainError("ks_one_sample: no samples");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    auto const n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double const f = cdf(sorted[i]);
        double const lo = static_cast<double>(i) / n;
        double const hi = static_cast<double>(i + 1) / n;
        d = std::max({d, hi - f, f - lo});
    }
    return {d, corrected_p(d, n)};
}

KsResult ks_two_sample(std::span<double const> a, std::span<double const> b)
{
    if (a.empty() || b.empty()) {
        throw DomainError("ks_two_sample: empty sample");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    auto const nx = static_cast<double>(x.size());
    auto const ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        double const v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) {
            ++i;
        }
        while (j < y.size() && y[j] <= v) {
            ++j;
        }
        d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return {d, corrected_p(d, nx * ny / (nx + ny))};
}

}  // namespace oulab
