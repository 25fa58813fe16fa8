#pragma once

#include "oulab/fnlib.hpp"
#include "oulab/mc.hpp"
#include "oulab/ou_sim.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace oulab {

/// Distance from t = 1 inside which the reversed drift is refused.
inline constexpr double kPinEpsilon = 1e-9;

/// Coefficient lambda - 2 lambda / (1 - e^{2 lambda (t - 1)}) of the drift of
/// the time-reversed process Zbar_t = Z_{1-t}; equals -lambda (1 + q) / (1 - q)
/// with q = e^{2 lambda (t - 1)}.
double reversed_drift_coefficient(double lambda, double t);

/// Reversed drift at (t, x); linear in x.
double reversed_drift(double lambda, double t, double x);

/// Zbar_s = Z_{1-s} on the same grid.
PathGrid time_reversal(PathGrid const& path);

/// Left-endpoint sum  sum_k b(t_k, Z_k) (Z_{k+1} - Z_k).
std::vector<double> forward_integral(FunctionDescriptor const& b, PathGrid const& path);

/// Right-endpoint sum  sum_k b(t_{k+1}, Z_{k+1}) (Z_{k+1} - Z_k).
std::vector<double> backward_integral(FunctionDescriptor const& b, PathGrid const& path);

/// The backward integral computed on the reversed path:
/// -sum_j b(1 - s_j, Zbar_j) (Zbar_{j+1} - Zbar_j).
std::vector<double> backward_integral_reversed(FunctionDescriptor const& b, PathGrid const& path);

/// sum_k [b(t_{k+1}, Z_{k+1}) - b(t_k, Z_k)] (Z_{k+1} - Z_k).
std::vector<double> discrete_covariation(FunctionDescriptor const& b, PathGrid const& path);

/// Trapezoidal int_0^1 b'(s, Z_s) ds; central differences (step 1e-5) when b has no analytic derivative.
std::vector<double> derivative_integral(FunctionDescriptor const& b, PathGrid const& path);

/// sum_k (Z_{k+1} - Z_k)^2.
double quadratic_variation(PathGrid const& path);

struct DecompositionReport {
    std::size_t steps = 0;
    std::vector<double> lhs;          ///< int_0^1 b'(s, Z_s) ds
    std::vector<double> covariation;  ///< backward - forward
    std::vector<double> i1;           ///< reversed martingale part
    std::vector<double> i2;           ///< reversed drift part
    std::vector<double> i3;           ///< forward integral
    double residual = 0.0;            ///< |lhs + (i1 + i2 + i3)|_H
};

/// Splits -int b' ds = I1 + I2 + I3 along one path.
DecompositionReport decompose(FunctionDescriptor const& b, PathGrid const& path);

struct CovariationRow {
    std::size_t steps = 0;
    McEstimate residual;  ///< mean of |backward - forward - int b' ds|_H over paths
};

/// Samples paths on the finest grid and coarsens them to every grid in
/// `step_counts` (each must divide the largest), so all grids see one Brownian path.
std::vector<CovariationRow> covariation_check(FunctionDescriptor const& b, double lambda,
                                              std::span<std::size_t const> step_counts, std::size_t n_paths,
                                              std::uint64_t seed, std::size_t workers = 0);

/// True if mean residuals decrease along the rows with at most `allowed` exceptions.
bool decreasing_trend(std::span<CovariationRow const> rows, std::size_t allowed = 1) noexcept;

/// Every sampled point is a grid value of a coarser path.
PathGrid coarsen(PathGrid const& path, std::size_t steps);

}  // namespace oulab
