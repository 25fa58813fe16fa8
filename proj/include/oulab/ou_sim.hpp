#pragma once

#include "oulab/constants.hpp"
#include "oulab/rng.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace oulab {

/// One sampled OU trajectory on the uniform grid t_k = k / M of [0, 1].
struct PathGrid {
    double lambda = 0.0;
    std::size_t steps = 0;  ///< M
    std::vector<double> values;  ///< M + 1 entries, values[0] = start
    StreamId stream{};

    double time(std::size_t k) const noexcept { return static_cast<double>(k) / static_cast<double>(steps); }
    double dt() const noexcept { return 1.0 / static_cast<double>(steps); }
};

/// Draw from the exact OU transition: Normal(e^{-lambda dt} z, (1 - e^{-2 lambda dt}) / (2 lambda)).
double transition_sample(double lambda, double z_current, double dt, Substream& stream);

/// Variance of the transition over a step dt.
double transition_variance(double lambda, double dt);

/// Recursive exact sampler, Z_0 = 0; consumes one normal per step.
PathGrid sample_path_1d(double lambda, std::size_t steps, Substream& stream);

/// Deformed clock e^{2 lambda t} - 1 used by the time-change sampler.
double deformed_clock(double lambda, double t);

/// Sampler via Z_t = (2 lambda)^{-1/2} e^{-lambda t} B_{e^{2 lambda t} - 1}.
/// Throws when e^{2 lambda} is not representable.
PathGrid sample_path_timechange(double lambda, std::size_t steps, Substream& stream);

/// Density of Z_t started at 0.
double marginal_density(double lambda, double t, double x);

/// Variance (1 - e^{-2 lambda t}) / (2 lambda) of Z_t started at 0.
double marginal_variance(double lambda, double t);

/// Exact OU segment of duration `horizon` from `start`, written into
/// out[0..steps]; used for windows [r, u] with a frozen start value.
void sample_segment(double lambda, double start, double horizon, std::size_t steps, Substream& stream,
                    std::span<double> out);

/// Truncated H-valued path: independent 1D paths, component n with rate lambda_n.
class HilbertPath {
  public:
    HilbertPath(DriftSpectrum spectrum, std::vector<PathGrid> components, double omitted_mass_bound);

    DriftSpectrum const& spectrum() const noexcept { return spectrum_; }
    std::size_t truncation() const noexcept { return components_.size(); }
    std::size_t steps() const noexcept { return components_.front().steps; }
    double time(std::size_t k) const noexcept { return components_.front().time(k); }

    PathGrid const& component(std::size_t n) const { return components_.at(n); }
    std::vector<PathGrid>& components() noexcept { return components_; }
    std::vector<PathGrid> const& components() const noexcept { return components_; }

    /// State vector at grid index k.
    std::vector<double> state(std::size_t k) const;
    void state(std::size_t k, std::span<double> out) const;

    /// Per-time l2 norms, computed once and cached.
    std::span<double const> norms() const;
    bool has_norm_cache() const noexcept { return norm_cache_.has_value(); }

    /// Analytic bound sum_{n > N} 1 / (2 lambda_n) on the mean-square mass dropped by truncation.
    double omitted_mass_bound() const noexcept { return omitted_mass_bound_; }

  private:
    DriftSpectrum spectrum_;
    std::vector<PathGrid> components_;
    double omitted_mass_bound_ = 0.0;
    mutable std::optional<std::vector<double>> norm_cache_;
};

/// Sample the first `truncation` components of the OU process with drift A
/// for path `path` of experiment `seed`; component n reads stream (seed, path, n).
HilbertPath sample_hilbert(DriftSpectrum const& spectrum, std::size_t truncation, std::size_t steps,
                           std::uint64_t seed, std::uint64_t path);

/// Smallest N whose dropped mass sum_{n>N} 1/(2 lambda_n) is below
/// `relative` times the total; the listed size when the tail is not summable.
std::size_t default_truncation(DriftSpectrum const& spectrum, double relative = 1e-6);

/// Z(t, x) = Z_t + e^{-tA} x.
HilbertPath shifted_process(HilbertPath const& path, std::span<double const> x);

}  // namespace oulab
