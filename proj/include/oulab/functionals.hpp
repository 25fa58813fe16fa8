#pragma once

#include "oulab/constants.hpp"
#include "oulab/fnlib.hpp"
#include "oulab/mc.hpp"
#include "oulab/ou_sim.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace oulab {

/// One-sided confidence level used for every PASS/FAIL decision.
inline constexpr double kConfidence = 0.999;

/// int_0^1 b(t, Z_t + h(t)) - b(t, Z_t) dt by the trapezoidal rule on the path grid.
std::vector<double> shift_functional(FunctionDescriptor const& b, ShiftDescriptor const& h,
                                     HilbertPath const& path);

struct ExpMoment {
    McEstimate estimate;
    double max_summand = 0.0;
};

/// MC estimate of E exp(alpha |S|^2) from the norms |S_i|.
ExpMoment exp_moment(std::span<double const> norms, double alpha);

/// Outcome of an exponential-moment check.
struct CheckResult {
    std::string check;
    std::string reference;     ///< the inequality being checked, as text
    McEstimate estimate;
    double upper999 = 0.0;
    double bound = 3.0;
    double bound_exact = 0.0;  ///< constant the argument actually produces, when known
    double exponent = 0.0;     ///< alpha_lambda or beta_A / ||h||^2
    double max_summand = 0.0;
    double summand_cap = 0.0;  ///< e^{exponent (2 ||b||_inf)^2}
    double max_functional = 0.0;
    bool hard_bound_ok = true;  ///< every |functional| <= 2 ||b||_inf (u - r)
    bool pass = false;
    double h_a_norm_sq_max = 0.0;  ///< recorded certificate for h, when a shift is involved
};

/// E exp(alpha_lambda |int_0^1 b'(t, Z_t) dt|^2) <= 3 for a 1D OU path with rate lambda.
CheckResult check_derivative_moment(double lambda, FunctionDescriptor const& b, std::size_t steps, std::size_t n_paths,
                         std::uint64_t seed, std::size_t workers = 0);

struct ExperimentSpec {
    DriftSpectrum spectrum{std::vector<double>{1.0}};
    std::size_t truncation = 1;
    std::size_t steps = 4096;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    double ell = 1.0;  ///< the process has drift ell * A, ell in (0, 1]
};

/// E exp(beta_A / ||h||^2 |int_0^1 b(t, Z^{ell A}_t + h(t)) - b(t, Z^{ell A}_t) dt|^2) <= 3.
CheckResult check_shift_moment(ExperimentSpec const& spec, FunctionDescriptor const& b, ShiftDescriptor const& h);

/// A window [r, u] of the process conditioned on Z_r = start.
struct WindowSpec {
    ExperimentSpec experiment;
    double r = 0.0;
    double u = 1.0;
    std::vector<double> start;  ///< Z_r; empty means 0
};

/// How window functionals are sampled.
enum class WindowRoute {
    direct,    ///< exact transitions with step (u - r) / M from Z_r
    rescaled,  ///< OU with drift ell A on [0, 1], mapped back by Z_{r + ell s} = e^{-ell s A} Z_r + ell^{1/2} Z~_s
};

/// |int_r^u b(s, Z_s + h1(s)) - b(s, Z_s + h2(s)) ds|_H per path.
std::vector<double> window_functional_norms(WindowSpec const& spec, FunctionDescriptor const& b,
                                            ShiftDescriptor const& h1, ShiftDescriptor const& h2,
                                            WindowRoute route = WindowRoute::direct);

struct TailRow {
    double eta = 0.0;
    double threshold = 0.0;  ///< eta ell^{1/2} ||h1 - h2||_inf
    McEstimate empirical;    ///< exceedance frequency
    double upper999 = 0.0;
    double bound = 0.0;      ///< 3 e^{-beta_A eta^2}
    bool pass = false;
};

struct TailReport {
    std::string reference;
    std::vector<TailRow> rows;
    double beta = 0.0;
    double ell = 0.0;
    double shift_distance = 0.0;
    std::string note;
    bool pass = false;
};

/// P[|int_r^u b(s, Z_s + h1) - b(s, Z_s + h2) ds| > eta ell^{1/2} ||h1 - h2|| | Z_r = start] <= 3 e^{-beta_A eta^2}.
TailReport concentration_tail(WindowSpec const& spec, FunctionDescriptor const& b, ShiftDescriptor const& h1,
                              ShiftDescriptor const& h2, std::span<double const> etas);

struct MomentRow {
    int p = 0;
    McEstimate moment;  ///< E |J|^p
    double upper999 = 0.0;
    double bound_stated = 0.0;   ///< 3 beta^{p/2} p^{p/2} ell^{p/2} |x - y|^p
    double bound_derived = 0.0;  ///< 3 beta^{-p/2} p^{p/2} ell^{p/2} |x - y|^p
    bool pass = false;           ///< against the derived bound
    bool pass_stated = false;
};

struct MomentReport {
    std::string reference;
    std::vector<MomentRow> rows;
    double beta = 0.0;
    double ell = 0.0;
    double distance = 0.0;
    std::string note;
    bool pass = false;
};

/// E[|int_r^u b(s, Z_s + x) - b(s, Z_s + y) ds|^p | Z_r = start] for constant shifts x, y.
MomentReport moment_bound(WindowSpec const& spec, FunctionDescriptor const& b, std::span<double const> x,
                          std::span<double const> y, std::span<int const> powers);

struct GammaStepRow {
    int p = 0;
    double lhs = 0.0;  ///< (3p/2) Gamma(p/2) = 3 int_0^inf p eta^{p-1} e^{-eta^2} d eta
    double rhs = 0.0;  ///< 3 p^{p/2}
    bool holds = false;
};

std::vector<GammaStepRow> gamma_step_table(int p_max = 20);

}  // namespace oulab
