#pragma once

#include <functional>
#include <span>

namespace oulab {

struct KsResult {
    double statistic = 0.0;  ///< sup |F_n - F|
    double p_value = 1.0;    ///< asymptotic, with Stephens' finite-n correction
};

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_survival(double x) noexcept;

/// One-sample test of `samples` against a continuous CDF. Sorts a copy.
KsResult ks_one_sample(std::span<double const> samples, std::function<double(double)> const& cdf);

/// Two-sample test. Sorts copies.
KsResult ks_two_sample(std::span<double const> a, std::span<double const> b);

}  // namespace oulab
