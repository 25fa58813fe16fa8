#include "oulab/reversal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oulab {

namespace {

constexpr double kFiniteDifferenceStep = 1e-5;

void require_scalar_input(FunctionDescriptor const& b)
{
    if (b.input_dim() != 1) {
        throw DomainError("path integrals need b: [0,1] x R -> H (input dimension 1)");
    }
}

void require_path(PathGrid const& path)
{
    if (path.steps < 1 || path.values.size() != path.steps + 1) {
        throw DomainError("malformed path grid");
    }
}

/// b(t_k, Z_k) for every grid index, row-major (M + 1) x out_dim.
std::vector<double> tabulate(FunctionDescriptor const& b, PathGrid const& path)
{
    std::size_t const dim = b.output_dim();
    std::vector<double> table((path.steps + 1) * dim);
    for (std::size_t k = 0; k <= path.steps; ++k) {
        double const z = path.values[k];
        b.evaluate(path.time(k), std::span<double const>(&z, 1), std::span<double>(table).subspan(k * dim, dim));
    }
    return table;
}

double h_norm(std::span<double const> v) { return FunctionDescriptor::h_norm(v); }

}  // namespace

double reversed_drift_coefficient(double lambda, double t)
{
    if (!std::isfinite(lambda) || !(lambda > 0.0)) {
        throw DomainError("lambda must be finite and positive");
    }
    if (!(t >= 0.0)) {
        throw DomainError("reversed drift is defined for t in [0, 1)");
    }
    if (t >= 1.0 - kPinEpsilon) {
        throw DomainError("reversed drift is singular at t = 1 where the reversed process is pinned to Z_0 = 0");
    }
    // 1 - e^{2 lambda (t - 1)} = -expm1(2 lambda (t - 1))
    return lambda - 2.0 * lambda / -std::expm1(2.0 * lambda * (t - 1.0));
}

double reversed_drift(double lambda, double t, double x) { return reversed_drift_coefficient(lambda, t) * x; }

PathGrid time_reversal(PathGrid const& path)
{
    PathGrid out = path;
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

PathGrid coarsen(PathGrid const& path, std::size_t steps)
{
    require_path(path);
    if (steps == 0 || path.steps % steps != 0) {
        throw DomainError("coarse grid must divide the fine grid");
    }
    std::size_t const stride = path.steps / steps;
    PathGrid out;
    out.lambda = path.lambda;
    out.steps = steps;
    out.stream = path.stream;
    out.values.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        out.values[k] = path.values[k * stride];
    }
    return out;
}

std::vector<double> forward_integral(FunctionDescriptor const& b, PathGrid const& path)
{
    require_scalar_input(b);
    require_path(path);
    auto const table = tabulate(b, path);
    std::size_t const dim = b.output_dim();
    std::vector<double> sum(dim, 0.0);
    for (std::size_t k = 0; k < path.steps; ++k) {
        double const dz = path.values[k + 1] - path.values[k];
        for (std::size_t n = 0; n < dim; ++n) {
            sum[n] += table[k * dim + n] * dz;
        }
    }
    return sum;
}

std::vector<double> backward_integral(FunctionDescriptor const& b, PathGrid const& path)
{
    require_scalar_input(b);
    require_path(path);
    auto const table = tabulate(b, path);
    std::size_t const dim = b.output_dim();
    std::vector<double> sum(dim, 0.0);
    for (std::size_t k = 0; k < path.steps; ++k) {
        double const dz = path.values[k + 1] - path.values[k];
        for (std::size_t n = 0; n < dim; ++n) {
            sum[n] += table[(k + 1) * dim + n] * dz;
        }
    }
    return sum;
}

std::vector<double> backward_integral_reversed(FunctionDescriptor const& b, PathGrid const& path)
{
    require_scalar_input(b);
    require_path(path);
    PathGrid const reversed = time_reversal(path);
    std::size_t const dim = b.output_dim();
    std::vector<double> sum(dim, 0.0);
    std::vector<double> value(dim);
    for (std::size_t j = 0; j < reversed.steps; ++j) {
        double const z = reversed.values[j];
        b.evaluate(1.0 - reversed.time(j), std::span<double const>(&z, 1), value);
        double const dz = reversed.values[j + 1] - reversed.values[j];
        for (std::size_t n = 0; n < dim; ++n) {
            sum[n] -= value[n] * dz;
        }
    }
    return sum;
}

std::vector<double> discrete_covariation(FunctionDescriptor const& b, PathGrid const& path)
{
    require_scalar_input(b);
    require_path(path);
    auto const table = tabulate(b, path);
    std::size_t const dim = b.output_dim();
    std::vector<double> sum(dim, 0.0);
    for (std::size_t k = 0; k < path.steps; ++k) {
        double const dz = path.values[k + 1] - path.values[k];
        for (std::size_t n = 0; n < dim; ++n) {
            sum[n] += (table[(k + 1) * dim + n] - table[k * dim + n]) * dz;
        }
    }
    return sum;
}

std::vector<double> derivative_integral(FunctionDescriptor const& b, PathGrid const& path)
{
    require_scalar_input(b);
    require_path(path);
    if (b.kind() == FunctionKind::discontinuous) {
        throw DomainError("int b' ds needs a differentiable b; '" + b.formula() + "' is discontinuous");
    }
    std::size_t const dim = b.output_dim();
    std::vector<double> sum(dim, 0.0);
    std::vector<double> value(dim);
    std::vector<double> ahead(dim);
    std::vector<double> behind(dim);
    double const one = 1.0;
    double const dt = path.dt();
    for (std::size_t k = 0; k <= path.steps; ++k) {
        double const t = path.time(k);
        double const z = path.values[k];
        if (b.has_derivative()) {
            b.apply_derivative(t, std::span<double const>(&z, 1), std::span<double const>(&one, 1), value);
        } else {
            double const up = z + kFiniteDifferenceStep;
            double const down = z - kFiniteDifferenceStep;
            b.evaluate(t, std::span<double const>(&up, 1), ahead);
            b.evaluate(t, std::span<double const>(&down, 1), behind);
            for (std::size_t n = 0; n < dim; ++n) {
                value[n] = (ahead[n] - behind[n]) / (2.0 * kFiniteDifferenceStep);
            }
        }
        double const weight = (k == 0 || k == path.steps) ? 0.5 * dt : dt;
        for (std::size_t n = 0; n < dim; ++n) {
            sum[n] += weight * value[n];
        }
    }
    return sum;
}

double quadratic_variation(PathGrid const& path)
{
    require_path(path);
    double sum = 0.0;
    for (std::size_t k = 0; k < path.steps; ++k) {
        double const dz = path.values[k + 1] - path.values[k];
        sum += dz * dz;
    }
    return sum;
}

DecompositionReport decompose(FunctionDescriptor const& b, PathGrid const& path)
{
    require_scalar_input(b);
    require_path(path);
    std::size_t const dim = b.output_dim();
    auto const table = tabulate(b, path);

    DecompositionReport report;
    report.steps = path.steps;
    report.lhs = derivative_integral(b, path);
    report.i3 = forward_integral(b, path);
    auto const backward = backward_integral(b, path);

    // Reversed grid: Zbar_j = Z_{M-j}, s_j = j / M, left endpoints j < M stay clear of the pin.
    report.i2.assign(dim, 0.0);
    double const ds = path.dt();
    for (std::size_t j = 0; j < path.steps; ++j) {
        std::size_t const k = path.steps - j;
        double const drift = reversed_drift(path.lambda, path.time(j), path.values[k]);
        for (std::size_t n = 0; n < dim; ++n) {
            report.i2[n] += table[k * dim + n] * drift * ds;
        }
    }

    report.covariation.resize(dim);
    report.i1.resize(dim);
    std::vector<double> total(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        report.covariation[n] = backward[n] - report.i3[n];
        // I1 + I2 = int b(1 - s, Zbar) dZbar = -backward
        report.i1[n] = -backward[n] - report.i2[n];
        total[n] = report.lhs[n] + report.i1[n] + report.i2[n] + report.i3[n];
    }
    report.residual = h_norm(total);
    return report;
}

std::vector<CovariationRow> covariation_check(FunctionDescriptor const& b, double lambda,
                                              std::span<std::size_t const> step_counts, std::size_t n_paths,
                                              std::uint64_t seed, std::size_t workers)
{
    if (step_counts.empty()) {
        throw DomainError("covariation_check needs at least one grid");
    }
    for (std::size_t i = 1; i < step_counts.size(); ++i) {
        if (step_counts[i] <= step_counts[i - 1]) {
            throw DomainError("grid sizes must be increasing");
        }
    }
    std::size_t const finest = step_counts.back();
    for (std::size_t m : step_counts) {
        if (m < 2 || finest % m != 0) {
            throw DomainError("every grid size must divide the finest grid");
        }
    }

    std::size_t const grids = step_counts.size();
    std::vector<double> residuals(grids * n_paths);
    parallel_for(n_paths, workers, [&](std::size_t p) {
        Substream stream(StreamId{seed, p, 0});
        PathGrid const fine = sample_path_1d(lambda, finest, stream);
        for (std::size_t g = 0; g < grids; ++g) {
            PathGrid const path = coarsen(fine, step_counts[g]);
            auto const lhs = derivative_integral(b, path);
            auto const cov = discrete_covariation(b, path);
            double sq = 0.0;
            for (std::size_t n = 0; n < lhs.size(); ++n) {
                sq += (cov[n] - lhs[n]) * (cov[n] - lhs[n]);
            }
            residuals[g * n_paths + p] = std::sqrt(sq);
        }
    });

    std::vector<CovariationRow> rows;
    for (std::size_t g = 0; g < grids; ++g) {
        rows.push_back({step_counts[g],
                        estimate_mean(std::span<double const>(residuals).subspan(g * n_paths, n_paths))});
    }
    return rows;
}

bool decreasing_trend(std::span<CovariationRow const> rows, std::size_t allowed) noexcept
{
    if (rows.size() < 2) {
        return true;
    }
    std::size_t violations = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].residual.mean < rows[i - 1].residual.mean)) {
            ++violations;
        }
    }
    // the coarsest-to-finest comparison must hold regardless of the allowance
    return violations <= allowed && rows.back().residual.mean < rows.front().residual.mean;
}

}  // namespace oulab
