// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oulab/config.hpp"
#include "oulab/constants.hpp"
#include "oulab/fnlib.hpp"
#include "oulab/functionals.hpp"
#include "oulab/ou_sim.hpp"
#include "oulab/reversal.hpp"
#include "oulab/runner.hpp"
#include "oulab/stats.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace oulab;

namespace {

constexpr std::size_t kPaths = 100000;
constexpr std::size_t kFineGrid = 4096;
constexpr double kRejectBelow = 0.001;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(char const* id, char const* title, std::function<Outcome()> const& body)
{
    auto const begin = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = body();
    } catch (std::exception const& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    std::printf("%s %s %s | %s (%.1fs)\n", id, outcome.pass ? "PASS" : "FAIL", title, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) {
        ++failures;
    }
}

std::string fmt(char const* format, auto... args)
{
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

ExperimentSpec experiment(DriftSpectrum const& spectrum, std::uint64_t seed)
{
    ExperimentSpec spec;
    spec.spectrum = spectrum;
    spec.truncation = spectrum.size();
    spec.steps = kFineGrid;
    spec.n_paths = kPaths;
    spec.seed = seed;
    spec.workers = 0;
    return spec;
}

Outcome ac1()
{
    bool ok = true;
    std::string detail;
    for (double lambda : {0.01, 0.1, 0.5, 1.0}) {
        double const rel = std::fabs(alpha(lambda) * 2304.0 - 1.0);
        ok = ok && rel <= 1e-14;
        detail += fmt("lambda=%g rel=%.1e; ", lambda, rel);
    }
    return {ok, detail + "tolerance 1e-14"};
}

Outcome ac2()
{
    auto const grid = log_grid(1e-4, 1e2, 10000);
    double minimum = INFINITY;
    double at = 0.0;
    for (double lambda : grid) {
        double const h = spectral_weight(lambda);
        if (h < minimum) {
            minimum = h;
            at = lambda;
        }
    }
    double const floor = weight_floor();
    bool const above = minimum >= floor * (1.0 - 8 * 2.220446049250313e-16);
    bool const tight = std::fabs(minimum - floor) <= 1e-9 && std::fabs(at - 0.5) < 0.01;
    return {above && tight, fmt("grid min %.15g at lambda=%.6f, e/1152=%.15g, gap=%.2e (<= 1e-9)", minimum, at, floor,
                                minimum - floor)};
}

Outcome ac3()
{
    auto const report = analytic_property_suite();
    bool ok = true;
    std::string detail;
    for (char const* name : {"x2_plus_2_gt_2x_arctan_x", "f_non_increasing", "f_ge_inverse_pi_squared",
                             "alpha_non_increasing", "g_at_1_le_64"}) {
        auto const* claim = report.find(name);
        bool const passed = claim != nullptr && claim->passed;
        ok = ok && passed;
        detail += fmt("%s=%s ", name, passed ? "ok" : "FAILED");
    }
    ok = ok && report.all_passed();
    detail += fmt("(all %zu claims %s)", report.claims.size(), report.all_passed() ? "pass" : "do not all pass");
    return {ok, detail};
}

std::vector<double> terminal(double lambda, std::uint64_t seed, bool time_change)
{
    constexpr std::size_t steps = 16;
    std::vector<double> out(kPaths);
    parallel_for(kPaths, 0, [&](std::size_t p) {
        Substream s(StreamId{seed, p, 0});
        auto const path = time_change ? sample_path_timechange(lambda, steps, s) : sample_path_1d(lambda, steps, s);
        out[p] = path.values.back();
    });
    return out;
}

Outcome ac4()
{
    bool ok = true;
    std::string detail;
    for (double lambda : {0.25, 1.0, 4.0}) {
        double const sd = std::sqrt(-std::expm1(-2.0 * lambda) / (2.0 * lambda));
        auto const cdf = [sd](double x) { return normal_cdf(x / sd); };
        auto const recursive = terminal(lambda, 401, false);
        auto const clock = terminal(lambda, 402, true);
        double const p_rec = ks_one_sample(recursive, cdf).p_value;
        double const p_clock = ks_one_sample(clock, cdf).p_value;
        double const p_cross = ks_two_sample(recursive, clock).p_value;
        ok = ok && p_rec >= kRejectBelow && p_clock >= kRejectBelow && p_cross >= kRejectBelow;
        detail += fmt("lambda=%g p(rec)=%.3f p(clock)=%.3f p(cross)=%.3f; ", lambda, p_rec, p_clock, p_cross);
    }
    return {ok, detail + "n=1e5, M=16, reject below 0.001"};
}

Outcome ac5()
{
    std::vector<double> g(kPaths);
    Substream s(StreamId{505, 0, 0});
    for (double& v : g) {
        v = s.normal();
    }
    auto const m = exp_moment(g, 0.25);
    double const dev = std::fabs(m.estimate.mean - std::numbers::sqrt2);
    return {dev <= 4.0 * m.estimate.std_error,
            fmt("mean=%.6f sqrt2=%.6f |dev|=%.2e <= 4 se=%.2e", m.estimate.mean, std::numbers::sqrt2, dev,
                4.0 * m.estimate.std_error)};
}

Outcome ac6()
{
    bool ok = true;
    std::string detail;
    for (double lambda : {0.25, 1.0, 4.0}) {
        DriftSpectrum const s({lambda});
        auto const b = make_b_named("weighted:sin", s);
        auto const r = check_derivative_moment(lambda, b, kFineGrid, kPaths, 606, 0);
        ok = ok && r.pass && r.upper999 <= 3.0;
        detail += fmt("lambda=%g upper999=%.6f; ", lambda, r.upper999);
    }
    return {ok, detail + "bound 3"};
}

Outcome ac7()
{
    bool ok = true;
    std::string detail;
    std::vector<std::size_t> const grids{256, 1024, 4096};
    for (char const* name : {"weighted:sin", "weighted:tanh"}) {
        DriftSpectrum const s({1.0});
        auto const b = make_b_named(name, s);
        auto const rows = covariation_check(b, 1.0, grids, 20000, 707, 0);
        bool const trend = decreasing_trend(rows);
        ok = ok && trend;
        detail += fmt("%s: %.3e > %.3e > %.3e %s; ", name, rows[0].residual.mean, rows[1].residual.mean,
                      rows[2].residual.mean, trend ? "decreasing" : "NOT decreasing");
    }
    return {ok, detail + "n=2e4"};
}

Outcome ac8()
{
    auto const s = DriftSpectrum::power_family(2.0, 16);
    auto const h = make_h_named("e1:sin_pi_t", s);
    bool ok = true;
    std::string detail;
    for (char const* name : {"weighted:sin", "weighted:sign"}) {
        auto const b = make_b_named(name, s);
        auto const r = check_shift_moment(experiment(s, 808), b, h);
        ok = ok && r.pass && r.upper999 <= 3.0;
        detail += fmt("%s (%s) upper999=%.6f; ", name, std::string(to_string(b.kind())).c_str(), r.upper999);
    }
    return {ok, detail + "N=16, bound 3"};
}

Outcome ac9()
{
    DriftSpectrum const s({1.0, 4.0});
    auto const h1 = make_h_named("e1:sin_pi_t", s);
    auto const h2 = ShiftDescriptor::zero(2);
    std::vector<double> const etas{0.5, 1.0, 2.0, 4.0};
    bool ok = true;
    std::string detail;
    for (char const* name : {"weighted:sin", "weighted:sign"}) {
        auto const b = make_b_named(name, s);
        WindowSpec window;
        window.experiment = experiment(s, 909);
        window.r = 0.25;
        window.u = 0.75;
        window.start = {0.5, -0.5};
        auto const report = concentration_tail(window, b, h1, h2, etas);
        ok = ok && report.pass;
        detail += std::string(name) + ":";
        for (auto const& row : report.rows) {
            detail += fmt(" eta=%g %.4f<=%.4f", row.eta, row.upper999, row.bound);
        }
        detail += "; ";
    }
    return {ok, detail + "window [0.25, 0.75]"};
}

Outcome ac10()
{
    DriftSpectrum const s({1.0, 4.0});
    auto const b = make_b_named("weighted:sin", s);
    WindowSpec window;
    window.experiment = experiment(s, 1010);
    window.r = 0.25;
    window.u = 0.75;
    std::vector<double> const x{1.0, 0.0};
    std::vector<double> const y{0.0, 0.0};
    std::vector<int> const powers{1, 2, 4};
    auto const report = moment_bound(window, b, x, y, powers);
    bool ok = report.pass;
    std::string detail;
    for (auto const& row : report.rows) {
        detail += fmt("p=%d %.3e<=%.3e (stated-exponent bound %.3e %s); ", row.p, row.upper999, row.bound_derived,
                      row.bound_stated, row.pass_stated ? "holds" : "violated");
    }
    bool gamma = true;
    for (auto const& row : gamma_step_table(20)) {
        gamma = gamma && row.holds;
    }
    ok = ok && gamma;
    return {ok, detail + fmt("Gamma step p=1..20 %s", gamma ? "holds" : "fails")};
}

Outcome ac11()
{
    bool ok = true;
    std::string detail;
    for (char const* command : {"verify-prop21", "verify-thm23", "concentration", "moments", "decomposition"}) {
        std::string const base = std::string("command = ") + command
                                 + "\nseed = 1111\nn = 4000\nM = 256\nspectrum = n^2,N=8\nh2 = zero\ngrids = 64,256\n";
        auto const one = run(parse_config(base + "workers = 1\n"));
        auto const four = run(parse_config(base + "workers = 4\n"));
        bool const same = one.exit_code != kExitInvalid && one.payload == four.payload;
        ok = ok && same;
        detail += fmt("%s %s; ", command, same ? "identical" : "DIFFERS");
    }
    return {ok, detail + "workers 1 vs 4"};
}

}  // namespace

int main()
{
    criterion("AC1", "alpha = 1/2304 on (0, 1]", ac1);
    criterion("AC2", "alpha e^{2 lambda} / lambda >= e/1152, tight at 1/2", ac2);
    criterion("AC3", "analytic suite", ac3);
    criterion("AC4", "exact samplers: KS marginal and cross-validation", ac4);
    criterion("AC5", "E exp(G^2/4) = sqrt 2", ac5);
    criterion("AC6", "E exp(alpha |int b' dt|^2) <= 3", ac6);
    criterion("AC7", "backward - forward -> int b' dt", ac7);
    criterion("AC8", "E exp(beta/||h||^2 |J(b,h)|^2) <= 3, n^2 with N = 16", ac8);
    criterion("AC9", "tails <= 3 exp(-beta eta^2)", ac9);
    criterion("AC10", "moments <= 3 p^{p/2} beta^{-p/2} l^{p/2} |x-y|^p", ac10);
    criterion("AC11", "bitwise determinism across worker counts", ac11);
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
