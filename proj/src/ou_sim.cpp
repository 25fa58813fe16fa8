#include "oulab/ou_sim.hpp"

#include <cmath>
#include <string>

namespace oulab {

namespace {

void require_finite_positive(double v, char const* what)
{
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw DomainError(std::string(what) + " must be finite and positive");
    }
}

void require_steps(std::size_t steps)
{
    if (steps < 2) {
        throw DomainError("grid needs at least two steps");
    }
}

}  // namespace

double transition_variance(double lambda, double dt)
{
    return -std::expm1(-2.0 * lambda * dt) / (2.0 * lambda);
}

double transition_sample(double lambda, double z_current, double dt, Substream& stream)
{
    require_finite_positive(lambda, "lambda");
    require_finite_positive(dt, "dt");
    if (!std::isfinite(z_current)) {
        throw DomainError("current state must be finite");
    }
    double const mean = std::exp(-lambda * dt) * z_current;
    return mean + std::sqrt(transition_variance(lambda, dt)) * stream.normal();
}

void sample_segment(double lambda, double start, double horizon, std::size_t steps, Substream& stream,
                    std::span<double> out)
{
    require_finite_positive(lambda, "lambda");
    require_finite_positive(horizon, "horizon");
    require_steps(steps);
    if (out.size() != steps + 1) {
        throw DomainError("segment buffer must hold steps + 1 values");
    }
    double const dt = horizon / static_cast<double>(steps);
    double const decay = std::exp(-lambda * dt);
    double const sd = std::sqrt(transition_variance(lambda, dt));
    double z = start;
    out[0] = z;
    for (std::size_t k = 1; k <= steps; ++k) {
        z = decay * z + sd * stream.normal();
        out[k] = z;
    }
}

PathGrid sample_path_1d(double lambda, std::size_t steps, Substream& stream)
{
    PathGrid path;
    path.lambda = lambda;
    path.steps = steps;
    path.stream = stream.id();
    require_steps(steps);
    path.values.resize(steps + 1);
    sample_segment(lambda, 0.0, 1.0, steps, stream, path.values);
    return path;
}

double deformed_clock(double lambda, double t) { return std::expm1(2.0 * lambda * t); }

PathGrid sample_path_timechange(double lambda, std::size_t steps, Substream& stream)
{
    require_finite_positive(lambda, "lambda");
    require_steps(steps);
    if (!std::isfinite(std::exp(2.0 * lambda)) || 2.0 * lambda > 700.0) {
        throw DomainError("time-change clock e^{2 lambda} overflows; use a log-space clock");
    }
    PathGrid path;
    path.lambda = lambda;
    path.steps = steps;
    path.stream = stream.id();
    path.values.resize(steps + 1);

    double const scale = 1.0 / std::sqrt(2.0 * lambda);
    double brownian = 0.0;
    double clock = 0.0;
    path.values[0] = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        double const t = path.time(k);
        double const next_clock = deformed_clock(lambda, t);
        brownian += std::sqrt(next_clock - clock) * stream.normal();
        clock = next_clock;
        path.values[k] = scale * std::exp(-lambda * t) * brownian;
    }
    return path;
}

double marginal_variance(double lambda, double t) { return transition_variance(lambda, t); }

double marginal_density(double lambda, double t, double x)
{
    require_finite_positive(lambda, "lambda");
    if (!(t > 0.0)) {
        throw DomainError("marginal density needs t > 0");
    }
    double const spread = -std::expm1(-2.0 * lambda * t);
    return std::sqrt(lambda / (M_PI * spread)) * std::exp(-lambda * x * x / spread);
}

HilbertPath::HilbertPath(DriftSpectrum spectrum, std::vector<PathGrid> components, double omitted_mass_bound)
    : spectrum_(std::move(spectrum)), components_(std::move(components)), omitted_mass_bound_(omitted_mass_bound)
{
    if (components_.empty()) {
        throw DomainError("HilbertPath needs at least one component");
    }
    for (auto const& c : components_) {
        if (c.steps != components_.front().steps || c.values.size() != c.steps + 1) {
            throw DomainError("HilbertPath components must share one grid");
        }
    }
}

void HilbertPath::state(std::size_t k, std::span<double> out) const
{
    for (std::size_t n = 0; n < components_.size(); ++n) {
        out[n] = components_[n].values[k];
    }
}

std::vector<double> HilbertPath::state(std::size_t k) const
{
    std::vector<double> out(components_.size());
    state(k, out);
    return out;
}

std::span<double const> HilbertPath::norms() const
{
    if (!norm_cache_) {
        std::vector<double> norms(steps() + 1, 0.0);
        for (auto const& c : components_) {
            for (std::size_t k = 0; k < norms.size(); ++k) {
                norms[k] += c.values[k] * c.values[k];
            }
        }
        for (double& v : norms) {
            v = std::sqrt(v);
        }
        norm_cache_ = std::move(norms);
    }
    return *norm_cache_;
}

HilbertPath sample_hilbert(DriftSpectrum const& spectrum, std::size_t truncation, std::size_t steps,
                           std::uint64_t seed, std::uint64_t path)
{
    if (truncation == 0) {
        throw DomainError("truncation must be at least 1");
    }
    if (truncation > spectrum.size()) {
        throw DomainError("truncation exceeds the listed spectrum");
    }
    std::vector<PathGrid> components;
    components.reserve(truncation);
    for (std::size_t n = 0; n < truncation; ++n) {
        Substream stream(StreamId{seed, path, static_cast<std::uint32_t>(n)});
        components.push_back(sample_path_1d(spectrum[n], steps, stream));
    }
    double const omitted = 0.5 * spectrum.inverse_tail_bound(truncation);
    return HilbertPath(spectrum.truncated(truncation), std::move(components), omitted);
}

std::size_t default_truncation(DriftSpectrum const& spectrum, double relative)
{
    if (spectrum.size() == 0) {
        throw DomainError("default_truncation: empty spectrum");
    }
    double const beyond_list = spectrum.inverse_tail_bound(spectrum.size());
    if (!std::isfinite(beyond_list)) {
        return spectrum.size();
    }
    // suffix[n] = sum_{m >= n} 1/lambda_m + analytic remainder
    auto const values = spectrum.eigenvalues();
    std::vector<double> suffix(values.size() + 1, beyond_list);
    for (std::size_t n = values.size(); n-- > 0;) {
        suffix[n] = suffix[n + 1] + 1.0 / values[n];
    }
    for (std::size_t n = 1; n <= values.size(); ++n) {
        if (suffix[n] < relative * suffix[0]) {
            return n;
        }
    }
    return spectrum.size();
}

HilbertPath shifted_process(HilbertPath const& path, std::span<double const> x)
{
    if (x.size() != path.truncation()) {
        throw DomainError("shift dimension " + std::to_string(x.size()) + " does not match truncation "
                          + std::to_string(path.truncation()));
    }
    std::vector<PathGrid> components = path.components();
    for (std::size_t n = 0; n < components.size(); ++n) {
        auto& c = components[n];
        if (x[n] == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k <= c.steps; ++k) {
            c.values[k] += std::exp(-c.lambda * c.time(k)) * x[n];
        }
    }
    return HilbertPath(path.spectrum(), std::move(components), path.omitted_mass_bound());
}

}  // namespace oulab
