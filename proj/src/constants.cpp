#include "oulab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace oulab {

namespace {

void require_lambda(double lambda)
{
    if (!std::isfinite(lambda) || !(lambda > 0.0)) {
        throw DomainError("lambda must be finite and positive, got " + std::to_string(lambda));
    }
}

/// sqrt(e^{2 lambda} - 1), infinite once e^{2 lambda} overflows.
double clock_root(double lambda)
{
    if (lambda < kSmallLambda) {
        return std::sqrt(2.0 * lambda * (1.0 + lambda));
    }
    return std::sqrt(std::expm1(2.0 * lambda));
}

/// log(e^{2 lambda} + 1)
double log_clock_plus_one(double lambda)
{
    return 2.0 * lambda + std::log1p(std::exp(-2.0 * lambda));
}

double neumaier_sum(std::span<double const> terms)
{
    double sum = 0.0;
    double carry = 0.0;
    for (double term : terms) {
        double const t = sum + term;
        if (std::fabs(sum) >= std::fabs(term)) {
            carry += (sum - t) + term;
        } else {
            carry += (term - t) + sum;
        }
        sum = t;
    }
    return sum + carry;
}

double reciprocal_sum(std::span<double const> eigenvalues)
{
    // Sorted so the result does not depend on the listing order.
    std::vector<double> reciprocals;
    reciprocals.reserve(eigenvalues.size());
    for (double lambda : eigenvalues) {
        reciprocals.push_back(1.0 / lambda);
    }
    std::sort(reciprocals.begin(), reciprocals.end());
    return neumaier_sum(reciprocals);
}

}  // namespace

DriftSpectrum::DriftSpectrum(std::vector<double> eigenvalues, TailMode mode)
    : eigenvalues_(std::move(eigenvalues)), tail_mode_(mode)
{
    for (double lambda : eigenvalues_) {
        if (!std::isfinite(lambda) || !(lambda > 0.0)) {
            throw DomainError("eigenvalues must be finite and positive");
        }
    }
    capital_lambda_ = reciprocal_sum(eigenvalues_);
}

DriftSpectrum DriftSpectrum::power_family(double exponent, std::size_t count)
{
    if (!(exponent > 0.0) || count == 0) {
        throw DomainError("power family needs a positive exponent and count");
    }
    std::vector<double> values(count);
    for (std::size_t n = 0; n < count; ++n) {
        values[n] = std::pow(static_cast<double>(n + 1), exponent);
    }
    DriftSpectrum result(std::move(values), TailMode::unbounded_declared);
    result.family_exponent_ = exponent;
    return result;
}

double DriftSpectrum::inverse_tail_bound(std::size_t keep) const
{
    keep = std::min(keep, eigenvalues_.size());
    double listed = reciprocal_sum(std::span<double const>(eigenvalues_).subspan(keep));
    if (family_exponent_) {
        double const p = *family_exponent_;
        if (p <= 1.0) {
            return std::numeric_limits<double>::infinity();
        }
        // sum_{n > L} (c n^p)^{-1} <= c^{-1} int_L^inf x^{-p} dx
        auto const listed_count = static_cast<double>(eigenvalues_.size());
        listed += std::pow(listed_count, 1.0 - p) / ((p - 1.0) * family_scale_);
    }
    return listed;
}

DriftSpectrum DriftSpectrum::truncated(std::size_t keep) const
{
    if (keep == 0 || keep > eigenvalues_.size()) {
        throw DomainError("truncation must lie in 1.." + std::to_string(eigenvalues_.size()));
    }
    DriftSpectrum result(
        std::vector<double>(eigenvalues_.begin(), eigenvalues_.begin() + static_cast<std::ptrdiff_t>(keep)),
        keep < eigenvalues_.size() ? TailMode::unbounded_declared : tail_mode_);
    result.family_exponent_ = family_exponent_;
    result.family_scale_ = family_scale_;
    return result;
}

DriftSpectrum DriftSpectrum::scaled(double factor) const
{
    if (!std::isfinite(factor) || !(factor > 0.0)) {
        throw DomainError("spectrum scale factor must be positive");
    }
    std::vector<double> values(eigenvalues_);
    for (double& v : values) {
        v *= factor;
    }
    DriftSpectrum result(std::move(values), tail_mode_);
    result.family_exponent_ = family_exponent_;
    result.family_scale_ = family_scale_ * factor;
    return result;
}

double d_lambda(double lambda)
{
    require_lambda(lambda);
    return std::atan(clock_root(lambda)) / lambda;
}

AlphaBreakdown alpha_components(double lambda)
{
    require_lambda(lambda);
    AlphaBreakdown out;
    out.lambda = lambda;
    out.d_lambda = d_lambda(lambda);
    out.alpha1 = 1.0 / 64.0;
    out.alpha3 = std::min(1.0 / lambda, 0.25) / 64.0;

    double log_alpha2;
    if (2.0 * lambda <= 700.0) {
        double const clock = std::exp(2.0 * lambda);
        out.alpha2 = 1.0 / (4.0 * lambda * (clock + 1.0) * out.d_lambda * out.d_lambda);
        log_alpha2 = std::log(out.alpha2);
    } else {
        double const angle = std::atan(clock_root(lambda));
        log_alpha2 = std::log(lambda) - std::log(4.0) - log_clock_plus_one(lambda) - 2.0 * std::log(angle);
        out.alpha2 = std::exp(log_alpha2);
    }

    out.alpha = std::min({out.alpha1, out.alpha2, out.alpha3}) / 9.0;
    out.log_alpha =
        std::min({std::log(out.alpha1), log_alpha2, std::log(out.alpha3)}) - std::log(9.0);
    return out;
}

double spectral_weight(double lambda)
{
    auto const a = alpha_components(lambda);
    if (2.0 * lambda <= 700.0 && a.alpha >= std::numeric_limits<double>::min()) {
        return a.alpha * std::exp(2.0 * lambda) / lambda;
    }
    return std::exp(a.log_alpha + 2.0 * lambda - std::log(lambda));
}

double alpha2_weight(double lambda)
{
    require_lambda(lambda);
    double const angle = std::atan(clock_root(lambda));
    return 1.0 / (4.0 * (1.0 + std::exp(-2.0 * lambda)) * angle * angle);
}

double log_g(double lambda)
{
    require_lambda(lambda);
    double const x = 4.0 * lambda;
    double const log_numerator = x <= 700.0 ? std::log(std::expm1(x)) : x + std::log1p(-std::exp(-x));
    return log_numerator - std::log(lambda);
}

double capital_lambda(DriftSpectrum const& spectrum)
{
    if (spectrum.size() == 0) {
        throw DomainError("capital_lambda: empty spectrum");
    }
    return spectrum.capital_lambda();
}

double beta(DriftSpectrum const& spectrum)
{
    double const total = capital_lambda(spectrum);
    double infimum = std::numeric_limits<double>::infinity();
    for (double lambda : spectrum.eigenvalues()) {
        infimum = std::min(infimum, spectral_weight(lambda));
    }
    if (spectrum.tail_mode() == DriftSpectrum::TailMode::unbounded_declared) {
        infimum = std::min(infimum, 1.0 / (9.0 * std::numbers::pi * std::numbers::pi));
    }
    return 0.25 * infimum / (total * total);
}

double weight_floor() noexcept { return std::numbers::e / 1152.0; }

double beta_floor(DriftSpectrum const& spectrum)
{
    double const total = capital_lambda(spectrum);
    return 0.25 * weight_floor() / (total * total);
}

double prop_c_exact() noexcept { return (6.0 + std::numbers::sqrt2) / 3.0; }

bool PropertyReport::all_passed() const noexcept
{
    return std::all_of(claims.begin(), claims.end(), [](ClaimResult const& c) { return c.passed; });
}

ClaimResult const* PropertyReport::find(std::string const& name) const noexcept
{
    auto it = std::find_if(claims.begin(), claims.end(), [&](ClaimResult const& c) { return c.name == name; });
    return it == claims.end() ? nullptr : &*it;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw DomainError("log_grid needs 0 < lo < hi and at least two points");
    }
    std::vector<double> grid(points);
    double const step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo * std::exp(step * static_cast<double>(i));
    }
    grid.back() = hi;
    return grid;
}

namespace {

/// Tracks the smallest margin of a claim; passes iff every margin >= threshold.
class ClaimTracker {
  public:
    ClaimTracker(std::string name, double threshold = 0.0) : threshold_(threshold)
    {
        result_.name = std::move(name);
        result_.worst_margin = std::numeric_limits<double>::infinity();
        result_.passed = true;
    }

    void observe(double margin, double at)
    {
        ++result_.points;
        if (std::isnan(margin)) {
            result_.passed = false;
            result_.worst_margin = margin;
            result_.worst_at = at;
            return;
        }
        if (margin < result_.worst_margin) {
            result_.worst_margin = margin;
            result_.worst_at = at;
        }
        if (!(margin >= threshold_)) {
            result_.passed = false;
        }
    }

    ClaimResult finish() const { return result_; }

  private:
    double threshold_;
    ClaimResult result_;
};

}  // namespace

PropertyReport analytic_property_suite(PropertyGridConfig const& config)
{
    PropertyReport report;
    double const tol = config.rounding_tolerance;
    double const inv_pi_sq = 1.0 / (std::numbers::pi * std::numbers::pi);

    std::vector<double> lambdas;
    std::vector<double> xs;
    try {
        lambdas = log_grid(config.lambda_min, config.lambda_max, config.points);
        xs = log_grid(config.x_min, config.x_max, config.points);
    } catch (DomainError const& err) {
        ClaimResult bad;
        bad.name = std::string("grid_configuration: ") + err.what();
        report.claims.push_back(bad);
        return report;
    }

    // strict inequality: margin must stay positive
    ClaimTracker arctan_claim("x2_plus_2_gt_2x_arctan_x", std::numeric_limits<double>::denorm_min());
    for (double x : xs) {
        arctan_claim.observe(x * x + 2.0 - 2.0 * x * std::atan(x), x);
    }

    ClaimTracker g_monotone("g_non_decreasing", -tol);
    ClaimTracker f_floor("f_ge_inverse_pi_squared", -tol);
    ClaimTracker f_monotone("f_non_increasing", -tol);
    ClaimTracker alpha_monotone("alpha_non_increasing", -tol);
    ClaimTracker simplification("alpha_equals_ninth_min_1_256_alpha2", 0.0);
    ClaimTracker alpha3_dominated("inverse_64_lambda_never_strict_minimizer", -tol);
    ClaimTracker constant_on_unit("alpha_constant_on_unit_interval", 0.0);
    ClaimTracker alpha2_unit("alpha2_ge_1_256_on_unit_interval", 0.0);
    ClaimTracker floor_claim("weight_ge_e_over_1152", -tol);

    double prev_log_g = 0.0;
    double prev_f = 0.0;
    double prev_log_alpha = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        double const lambda = lambdas[i];
        double lg;
        double f;
        AlphaBreakdown a;
        double weight;
        try {
            lg = log_g(lambda);
            f = alpha2_weight(lambda);
            a = alpha_components(lambda);
            weight = spectral_weight(lambda);
        } catch (DomainError const&) {
            lg = f = weight = std::numeric_limits<double>::quiet_NaN();
            a.log_alpha = a.alpha = a.alpha2 = a.alpha3 = a.alpha1 = lg;
        }

        if (i > 0) {
            g_monotone.observe((lg - prev_log_g) / std::max(1.0, std::fabs(prev_log_g)), lambda);
            f_monotone.observe((prev_f - f) / prev_f, lambda);
            alpha_monotone.observe(prev_log_alpha - a.log_alpha, lambda);
        }
        f_floor.observe((f - inv_pi_sq) / inv_pi_sq, lambda);

        double const simplified = std::min(1.0 / 256.0, a.alpha2) / 9.0;
        simplification.observe(1e-14 - std::fabs(a.alpha - simplified) / simplified, lambda);
        // alpha3 = min(1/256, 1/(64 lambda)); its 1/(64 lambda) branch never undercuts
        double const inverse_branch = 1.0 / (64.0 * lambda);
        alpha3_dominated.observe((inverse_branch - std::min(1.0 / 256.0, a.alpha2)) / inverse_branch, lambda);
        if (lambda <= 1.0) {
            constant_on_unit.observe(tol - std::fabs(a.alpha * 2304.0 - 1.0), lambda);
            alpha2_unit.observe(a.alpha2 - 1.0 / 256.0, lambda);
        }
        floor_claim.observe(weight / weight_floor() - 1.0, lambda);

        prev_log_g = lg;
        prev_f = f;
        prev_log_alpha = a.log_alpha;
    }

    ClaimTracker g_at_one("g_at_1_le_64", 0.0);
    g_at_one.observe(64.0 - std::exp(log_g(1.0)), 1.0);

    for (auto const* tracker : {&arctan_claim, &g_monotone, &g_at_one, &f_floor, &f_monotone, &alpha_monotone,
                                &simplification, &alpha3_dominated, &constant_on_unit, &alpha2_unit, &floor_claim}) {
        report.claims.push_back(tracker->finish());
    }
    return report;
}

}  // namespace oulab
