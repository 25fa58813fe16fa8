#include "oulab/functionals.hpp"

#include "oulab/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace oulab;

namespace {

ExperimentSpec small_spec(DriftSpectrum const& spectrum, std::size_t n, std::size_t steps, std::uint64_t seed)
{
    ExperimentSpec spec;
    spec.spectrum = spectrum;
    spec.truncation = spectrum.size();
    spec.steps = steps;
    spec.n_paths = n;
    spec.seed = seed;
    spec.workers = 2;
    return spec;
}

}  // namespace

TEST_SUITE("functionals")
{
    TEST_CASE("shift functional by hand for a constant b")
    {
        // b = w * 1 does not depend on x, so J = 0 for every shift
        DriftSpectrum const s({1.0, 4.0});
        auto const b = make_b_named("const", s);
        auto const h = make_h_named("e1:const", s);
        auto const path = sample_hilbert(s, 2, 32, 1, 0);
        auto const j = shift_functional(b, h, path);
        CHECK(j[0] == 0.0);
        CHECK(j[1] == 0.0);
        auto const wrong = make_h_named("e1:const", DriftSpectrum({1.0}));
        CHECK_THROWS_AS(shift_functional(b, wrong, path), DomainError);
    }

    TEST_CASE("the projected fast path agrees with the generic shift functional")
    {
        auto const s = DriftSpectrum::power_family(2.0, 4);
        for (auto name : {"weighted:sin", "weighted:sign"}) {
            auto const b = make_b_named(name, s);
            auto const h = make_h_named("e1:sin_pi_t+e3:t*0.5", s);
            WindowSpec window;
            window.experiment = small_spec(s, 20, 64, 3);
            auto const zero = ShiftDescriptor::zero(4);
            auto const fast = window_functional_norms(window, b, h, zero);
            for (std::size_t p = 0; p < 20; ++p) {
                auto const path = sample_hilbert(s, 4, 64, 3, p);
                auto const j = shift_functional(b, h, path);
                CHECK(fast[p] == doctest::Approx(FunctionDescriptor::h_norm(j)).epsilon(1e-10).scale(1e-12));
            }
        }
    }

    TEST_CASE("rescaled route reproduces the direct route pathwise and in law")
    {
        DriftSpectrum const s({1.0, 4.0});
        auto const b = make_b_named("weighted:tanh", s);
        auto const h1 = make_h_named("e1:sin_pi_t", s);
        auto const h2 = make_h_named("e2:t*0.5", s);
        WindowSpec window;
        window.experiment = small_spec(s, 3000, 64, 4);
        window.r = 0.2;
        window.u = 0.7;
        window.start = {0.4, -0.3};
        auto const direct = window_functional_norms(window, b, h1, h2, WindowRoute::direct);
        auto const rescaled = window_functional_norms(window, b, h1, h2, WindowRoute::rescaled);
        for (std::size_t p = 0; p < direct.size(); ++p) {
            CHECK(rescaled[p] == doctest::Approx(direct[p]).epsilon(1e-9).scale(1e-12));
        }
        window.experiment.seed = 5;
        auto const independent = window_functional_norms(window, b, h1, h2, WindowRoute::rescaled);
        CHECK(ks_two_sample(direct, independent).p_value > 0.001);
    }

    TEST_CASE("functionals obey the hard bound 2 ||b|| (u - r)")
    {
        auto const s = DriftSpectrum::power_family(2.0, 3);
        auto const b = make_b_named("weighted:step", s);
        auto const h1 = make_h_named("e1:const*5", s);
        WindowSpec window;
        window.experiment = small_spec(s, 500, 32, 6);
        window.r = 0.5;
        window.u = 0.75;
        auto const norms = window_functional_norms(window, b, h1, ShiftDescriptor::zero(3));
        for (double v : norms) {
            CHECK(v <= 2.0 * b.norm_inf() * 0.25 * (1.0 + 1e-12));
        }
    }

    TEST_CASE("exp_moment: Gaussian identity E exp(G^2 / 4) = sqrt 2")
    {
        std::vector<double> g(200000);
        Substream s(StreamId{2024, 0, 0});
        for (double& v : g) {
            v = std::fabs(s.normal());
        }
        auto const m = exp_moment(g, 0.25);
        CHECK(std::fabs(m.estimate.mean - std::numbers::sqrt2) <= 4.0 * m.estimate.std_error);
        CHECK_THROWS_AS(exp_moment(g, 0.0), DomainError);
        std::vector<double> const bad{1.0, NAN};
        CHECK_THROWS_AS(exp_moment(bad, 1.0), DomainError);
    }

    TEST_CASE("derivative moment check on a small run")
    {
        DriftSpectrum const s({1.0});
        auto const b = make_b_named("weighted:sin", s);
        auto const r = check_derivative_moment(1.0, b, 256, 2000, 1, 2);
        CHECK(r.pass);
        CHECK(r.upper999 <= 3.0);
        CHECK(r.estimate.mean >= 1.0);
        CHECK(r.bound_exact == doctest::Approx(prop_c_exact()));
        CHECK(r.exponent == doctest::Approx(1.0 / 2304.0));
        CHECK(r.reference.find("<= 3") != std::string::npos);
        auto const sign = make_b_named("weighted:sign", s);
        CHECK_THROWS_AS(check_derivative_moment(1.0, sign, 16, 10, 1), DomainError);
    }

    TEST_CASE("shift moment check on a small run, smooth and discontinuous")
    {
        auto const s = DriftSpectrum::power_family(2.0, 16);
        auto const h = make_h_named("e1:sin_pi_t", s);
        for (auto name : {"weighted:sin", "weighted:sign"}) {
            auto const b = make_b_named(name, s);
            auto const r = check_shift_moment(small_spec(s, 1000, 128, 8), b, h);
            CHECK(r.pass);
            CHECK(r.hard_bound_ok);
            CHECK(r.max_summand <= r.summand_cap);
            CHECK(r.h_a_norm_sq_max == doctest::Approx(1.0));
            CHECK(r.exponent == doctest::Approx(beta(s) / (h.norm_inf() * h.norm_inf())));
        }
        auto const b = make_b_named("weighted:sin", s);
        CHECK_THROWS_AS(check_shift_moment(small_spec(s, 10, 8, 1), b, ShiftDescriptor::zero(16)), DomainError);
        auto spec = small_spec(s, 10, 8, 1);
        spec.ell = 1.5;
        CHECK_THROWS_AS(check_shift_moment(spec, b, h), DomainError);
    }

    TEST_CASE("smaller ell shrinks the functional")
    {
        auto const s = DriftSpectrum::power_family(2.0, 4);
        auto const b = make_b_named("weighted:sin", s);
        auto const h = make_h_named("e1:const", s);
        auto spec = small_spec(s, 2000, 64, 9);
        auto const full = check_shift_moment(spec, b, h);
        spec.ell = 0.25;
        auto const quarter = check_shift_moment(spec, b, h);
        // with drift ell A the process is slower and still centred; both stay far below 3
        CHECK(full.pass);
        CHECK(quarter.pass);
    }

    TEST_CASE("concentration tail on a small run and the degenerate case")
    {
        DriftSpectrum const s({1.0, 4.0});
        auto const b = make_b_named("weighted:sin", s);
        auto const h1 = make_h_named("e1:const", s);
        WindowSpec window;
        window.experiment = small_spec(s, 2000, 64, 10);
        window.r = 0.25;
        window.u = 0.75;
        std::vector<double> const etas{0.0, 0.5, 1.0, 2.0, 4.0};
        auto const report = concentration_tail(window, b, h1, ShiftDescriptor::zero(2), etas);
        CHECK(report.pass);
        CHECK(report.rows.size() == etas.size());
        CHECK(report.ell == doctest::Approx(0.5));
        CHECK(report.shift_distance == doctest::Approx(1.0));
        CHECK(report.rows[0].bound == doctest::Approx(3.0));
        for (std::size_t i = 1; i < report.rows.size(); ++i) {
            CHECK(report.rows[i].empirical.mean <= report.rows[i - 1].empirical.mean);
        }
        auto const same = concentration_tail(window, b, h1, h1, etas);
        CHECK(same.pass);
        CHECK_FALSE(same.note.empty());
        CHECK(same.rows[2].empirical.mean == 0.0);
        window.r = 0.8;
        window.u = 0.5;
        CHECK_THROWS_AS(concentration_tail(window, b, h1, ShiftDescriptor::zero(2), etas), DomainError);
    }

    TEST_CASE("moment bound: derived exponent holds, stated exponent reported")
    {
        DriftSpectrum const s({1.0, 4.0});
        auto const b = make_b_named("weighted:sin", s);
        WindowSpec window;
        window.experiment = small_spec(s, 2000, 64, 11);
        window.r = 0.25;
        window.u = 0.75;
        std::vector<double> const x{1.0, 0.0};
        std::vector<double> const y{0.0, 0.0};
        std::vector<int> const powers{1, 2, 4};
        auto const report = moment_bound(window, b, x, y, powers);
        CHECK(report.pass);
        CHECK(report.distance == doctest::Approx(1.0));
        for (auto const& row : report.rows) {
            double const common = 3.0 * std::pow(row.p, 0.5 * row.p) * std::pow(0.5, 0.5 * row.p);
            CHECK(row.bound_derived == doctest::Approx(common * std::pow(report.beta, -0.5 * row.p)));
            CHECK(row.bound_stated == doctest::Approx(common * std::pow(report.beta, 0.5 * row.p)));
        }
        auto const zero = moment_bound(window, b, x, x, powers);
        CHECK(zero.pass);
        CHECK(zero.rows[0].moment.mean == 0.0);
        std::vector<int> const bad{0};
        CHECK_THROWS_AS(moment_bound(window, b, x, y, bad), DomainError);
    }

    TEST_CASE("Gamma step (3p/2) Gamma(p/2) <= 3 p^{p/2}")
    {
        auto const rows = gamma_step_table(20);
        REQUIRE(rows.size() == 20);
        for (auto const& row : rows) {
            CHECK(row.holds);
        }
        CHECK(rows[1].lhs == doctest::Approx(3.0));  // p = 2: 3 * Gamma(1)
        CHECK(rows[1].rhs == doctest::Approx(6.0));
        CHECK(rows[0].lhs == doctest::Approx(1.5 * std::sqrt(std::numbers::pi)));
    }

    TEST_CASE("results do not depend on the worker count")
    {
        DriftSpectrum const s({1.0, 4.0});
        auto const b = make_b_named("weighted:sin", s);
        auto const h = make_h_named("e1:sin_pi_t", s);
        auto spec = small_spec(s, 999, 32, 12);
        spec.workers = 1;
        auto const one = check_shift_moment(spec, b, h);
        spec.workers = 5;
        auto const five = check_shift_moment(spec, b, h);
        CHECK(one.estimate.mean == five.estimate.mean);
        CHECK(one.estimate.std_error == five.estimate.std_error);
        CHECK(one.max_functional == five.max_functional);
    }
}
