#include "oulab/mc.hpp"

#include "oulab/constants.hpp"
#include "oulab/rng.hpp"

#include <cmath>

namespace oulab {

double McEstimate::upper(double confidence) const
{
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw DomainError("confidence level must lie in (0, 1)");
    }
    return mean + normal_quantile(confidence) * std_error;
}

double pairwise_sum(std::span<double const> values) noexcept
{
    constexpr std::size_t kLeaf = 64;
    if (values.size() <= kLeaf) {
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        return sum;
    }
    std::size_t const half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

McEstimate estimate_mean(std::span<double const> values)
{
    if (values.size() < 2) {
        throw DomainError("a Monte Carlo estimate needs at least two samples");
    }
    auto const n = static_cast<double>(values.size());
    double const mean = pairwise_sum(values) / n;
    std::vector<double> deviations(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double const d = values[i] - mean;
        deviations[i] = d * d;
    }
    double const variance = pairwise_sum(deviations) / (n - 1.0);
    return McEstimate{mean, std::sqrt(variance / n), values.size()};
}

std::size_t resolve_workers(std::size_t requested) noexcept
{
    if (requested > 0) {
        return requested;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace oulab
