#pragma once

#include "oulab/constants.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oulab {

enum class FunctionKind { smooth, lipschitz, discontinuous };

std::string_view to_string(FunctionKind kind) noexcept;

/// Scalar profile phi(t, s) with |phi| <= sup_abs <= 1.
struct ScalarProfile {
    std::string name;
    FunctionKind kind = FunctionKind::smooth;
    double sup_abs = 1.0;
    double (*value)(double t, double s) = nullptr;
    double (*ds)(double t, double s) = nullptr;  ///< present iff kind == smooth

    /// Built-in profiles: zero, one, sin, tanh, cos_2pi_t, clip, sign, step.
    static ScalarProfile named(std::string_view name);
};

/// Drift integrand b(t, x) = w * phi(t0 + tau t, sigma <d, x>) with certified norms.
///
/// Immutable after construction. Every built-in b is of this form, so
/// evaluation costs one projection and one profile call.
class FunctionDescriptor {
  public:
    FunctionKind kind() const noexcept { return profile_.kind; }
    std::size_t input_dim() const noexcept { return direction_.size(); }
    std::size_t output_dim() const noexcept { return weights_.size(); }

    /// Certified sup |b(t, x)|_H.
    double norm_inf() const noexcept { return norm_inf_; }
    /// Certified sup (sum_n lambda_n e^{2 lambda_n} b_n^2)^{1/2}.
    double norm_inf_a() const noexcept { return norm_inf_a_; }
    std::string const& formula() const noexcept { return formula_; }

    std::span<double const> weights() const noexcept { return weights_; }
    std::span<double const> direction() const noexcept { return direction_; }
    ScalarProfile const& profile() const noexcept { return profile_; }

    bool has_derivative() const noexcept { return profile_.ds != nullptr; }

    /// Projected coordinate sigma <d, x>.
    double project(std::span<double const> x) const;
    /// phi at (t, x); b(t, x) = weights() * profile_value(t, x).
    double profile_value(double t, std::span<double const> x) const;
    double profile_value_projected(double t, double projected) const;
    /// d/ds phi at the projected coordinate.
    double profile_slope_projected(double t, double projected) const;

    void evaluate(double t, std::span<double const> x, std::span<double> out) const;
    std::vector<double> evaluate(double t, std::span<double const> x) const;

    /// Derivative action b'(t, x) v; throws unless has_derivative().
    void apply_derivative(double t, std::span<double const> x, std::span<double const> v,
                          std::span<double> out) const;

    /// b~(t, x) = b(scale t + shift, scale^{1/2} x); norms are unchanged.
    FunctionDescriptor rescaled(double scale, double shift) const;

    /// sup norm audit helpers for arbitrary value vectors.
    static double h_norm(std::span<double const> value);
    static double a_norm(std::span<double const> eigenvalues, std::span<double const> value);

  private:
    friend FunctionDescriptor make_b_weighted(DriftSpectrum const&, ScalarProfile,
                                              std::span<double const>, std::span<double const>);
    friend FunctionDescriptor make_b_named(std::string_view, DriftSpectrum const&);

    std::vector<double> weights_;
    std::vector<double> direction_;
    ScalarProfile profile_;
    double time_scale_ = 1.0;
    double time_shift_ = 0.0;
    double space_scale_ = 1.0;
    double norm_inf_ = 0.0;
    double norm_inf_a_ = 0.0;
    std::string formula_;
};

/// b_n = s lambda_n^{-1/2} e^{-lambda_n} c_n phi(t, <d, x>) with sum c_n^2 <= 1.
///
/// The A-weighted norm is s ||c|| sup|phi| <= 1 by construction. The sup norm is
/// s (sum c_n^2 e^{-2 lambda_n} / lambda_n)^{1/2} sup|phi|; when the unscaled
/// value exceeds 1 (small eigenvalues) s shrinks it to exactly 1, else s = 1.
/// An empty direction means e_1.
FunctionDescriptor make_b_weighted(DriftSpectrum const& spectrum, ScalarProfile profile,
                                   std::span<double const> coefficients,
                                   std::span<double const> direction = {});

/// Named constructors: "weighted:<profile>" (c = e_1, d uniform),
/// "const", "zero", "time:cos".
FunctionDescriptor make_b_named(std::string_view name, DriftSpectrum const& spectrum);

/// Shift h: [0, 1] -> H with finitely many nonzero components.
class ShiftDescriptor {
  public:
    struct Term {
        std::size_t component = 0;
        double amplitude = 1.0;
        std::string profile;  ///< const, sin_pi_t, cos_pi_t, t
    };

    /// Identically zero shift of the given dimension (never admitted to the theorem checks).
    static ShiftDescriptor zero(std::size_t dim);

    std::size_t dim() const noexcept { return eigenvalues_.size(); }
    std::span<Term const> terms() const noexcept { return terms_; }

    void evaluate(double t, std::span<double> out) const;
    std::vector<double> evaluate(double t) const;

    /// sup over t in [0, 1] on the certification grid.
    double norm_inf() const noexcept { return norm_inf_; }
    /// sum_n h_n(t)^2 lambda_n^2.
    double a_norm_sq(double t) const;
    bool is_zero() const noexcept { return norm_inf_ == 0.0; }
    std::string const& formula() const noexcept { return formula_; }

    /// Sup is taken on a uniform grid of this many intervals.
    static constexpr std::size_t kGridIntervals = 4096;
    static constexpr char const* kGridDisclaimer = "sup over t approximated on a 4097-point uniform grid";

  private:
    friend ShiftDescriptor make_h(DriftSpectrum const&, std::vector<Term>);
    std::vector<double> eigenvalues_;
    std::vector<Term> terms_;
    double norm_inf_ = 0.0;
    std::string formula_;
};

/// Builds h from per-component profiles; rejects an identically zero h.
ShiftDescriptor make_h(DriftSpectrum const& spectrum, std::vector<ShiftDescriptor::Term> terms);

/// Parses "e<n>:<profile>[*<amplitude>]" terms joined by '+', e.g. "e1:sin_pi_t".
ShiftDescriptor make_h_named(std::string_view name, DriftSpectrum const& spectrum);

/// Grid sup over [lo, hi] of |h1(t) - h2(t)|_H.
double sup_distance(ShiftDescriptor const& h1, ShiftDescriptor const& h2, double lo = 0.0, double hi = 1.0,
                    std::size_t intervals = ShiftDescriptor::kGridIntervals);

}  // namespace oulab
