#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oulab {

/// Raised whenever an argument lies outside an operation's domain.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Eigenvalues of the diagonal drift operator A.
///
/// `finite` means the list is the whole spectrum; `unbounded_declared` means
/// the list truncates an unbounded spectrum. A power family lambda_n = n^p
/// additionally carries an analytic tail bound for sum_{n>N} 1/lambda_n.
class DriftSpectrum {
  public:
    enum class TailMode { finite, unbounded_declared };

    DriftSpectrum(std::vector<double> eigenvalues, TailMode mode = TailMode::finite);

    /// lambda_n = n^exponent for n = 1..count, declared unbounded.
    static DriftSpectrum power_family(double exponent, std::size_t count);

    std::span<double const> eigenvalues() const noexcept { return eigenvalues_; }
    std::size_t size() const noexcept { return eigenvalues_.size(); }
    double operator[](std::size_t n) const { return eigenvalues_.at(n); }
    TailMode tail_mode() const noexcept { return tail_mode_; }
    std::optional<double> family_exponent() const noexcept { return family_exponent_; }

    /// Cached sum of 1/lambda_n over the listed eigenvalues.
    double capital_lambda() const noexcept { return capital_lambda_; }

    /// Upper bound on sum_{n > keep} 1/lambda_n: listed eigenvalues beyond
    /// `keep` plus, for power families, the integral tail beyond the list.
    double inverse_tail_bound(std::size_t keep) const;

    /// First `keep` eigenvalues, same tail mode and family.
    DriftSpectrum truncated(std::size_t keep) const;

    /// Every eigenvalue multiplied by `factor` (the spectrum of factor * A).
    DriftSpectrum scaled(double factor) const;

  private:
    std::vector<double> eigenvalues_;
    TailMode tail_mode_;
    std::optional<double> family_exponent_;
    double family_scale_ = 1.0;  ///< lambda_n = family_scale_ * n^p for a scaled family
    double capital_lambda_ = 0.0;
};

struct AlphaBreakdown {
    double lambda = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double alpha = 0.0;
    double d_lambda = 0.0;
    double log_alpha = 0.0;  ///< exact even where alpha itself underflows
};

/// Cutoff below which D_lambda switches to the series argument.
inline constexpr double kSmallLambda = 1e-8;

/// D_lambda = int_0^1 dt / sqrt(e^{2 lambda (1-t)} - 1) = arctan(sqrt(e^{2 lambda} - 1)) / lambda.
double d_lambda(double lambda);

AlphaBreakdown alpha_components(double lambda);

inline double alpha(double lambda) { return alpha_components(lambda).alpha; }

/// h(lambda) = alpha_lambda e^{2 lambda} / lambda, evaluated in log space.
double spectral_weight(double lambda);

/// f(lambda) = alpha2 e^{2 lambda} / lambda; decreases to 1/pi^2.
double alpha2_weight(double lambda);

/// g(lambda) = (e^{2 lambda} + 1)(e^{2 lambda} - 1) / lambda, as a logarithm.
double log_g(double lambda);

/// Sum of 1/lambda_n with Neumaier-compensated summation.
double capital_lambda(DriftSpectrum const& spectrum);

/// beta_A = (1/4) Lambda^{-2} inf_n h(lambda_n); for unbounded_declared
/// spectra the infimum also covers the limit 1/(9 pi^2).
double beta(DriftSpectrum const& spectrum);

/// The guaranteed floor (1/4) Lambda^{-2} e / 1152.
double beta_floor(DriftSpectrum const& spectrum);

/// The floor constant e / 1152 for alpha_lambda e^{2 lambda} / lambda.
double weight_floor() noexcept;

/// Constant produced by summing the three sub-estimates: (6 + sqrt 2) / 3.
double prop_c_exact() noexcept;
/// The constant asserted for the exponential estimate.
inline constexpr double prop_c_stated = 3.0;

struct ClaimResult {
    std::string name;
    bool passed = false;
    double worst_margin = 0.0;  ///< smallest slack seen (negative means violated)
    double worst_at = 0.0;      ///< grid abscissa of the worst margin
    std::size_t points = 0;
};

struct PropertyReport {
    std::vector<ClaimResult> claims;
    bool all_passed() const noexcept;
    ClaimResult const* find(std::string const& name) const noexcept;
};

struct PropertyGridConfig {
    std::size_t points = 10000;
    double lambda_min = 1e-4;
    double lambda_max = 1e2;
    double x_min = 1e-4;
    double x_max = 1e3;
    /// Relative slack for comparisons that become ties in double precision.
    double rounding_tolerance = 8 * 2.220446049250313e-16;
};

/// Logarithmically spaced grid including both endpoints.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

/// Evaluate every analytic claim about alpha, f, g and arctan on grids.
/// Never throws; failures appear as claims with passed == false.
PropertyReport analytic_property_suite(PropertyGridConfig const& config = {});

}  // namespace oulab
