#include "oulab/runner.hpp"

#include "oulab/fnlib.hpp"
#include "oulab/functionals.hpp"
#include "oulab/ou_sim.hpp"
#include "oulab/reversal.hpp"

#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace oulab {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kSchema = 1;
constexpr std::size_t kDumpPaths = 16;

constexpr char const* kConstantsReference =
    "alpha_lambda = min(alpha1, alpha2_lambda, alpha3_lambda)/9, h = alpha_lambda e^{2 lambda}/lambda >= e/1152";
constexpr char const* kDecompositionReference = "int_0^1 b(s,Z_s) d*Z_s - int_0^1 b(s,Z_s) dZ_s = int_0^1 b'(s,Z_s) ds";
constexpr char const* kGammaReference = "(3p/2) Gamma(p/2) <= 3 p^{p/2}";

std::string num(double v)
{
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

std::string hex64(std::uint64_t v)
{
    char buffer[24];
    std::snprintf(buffer, sizeof buffer, "%016" PRIx64, v);
    return buffer;
}

/// Either a JSON document or a CSV table, built side by side.
struct Output {
    Json json;
    std::ostringstream csv;
    std::vector<std::string> verdicts;
    bool pass = true;
};

void verdict(Output& out, bool pass, std::string const& check, std::string const& reference, std::string const& detail)
{
    out.verdicts.push_back(std::string(pass ? "PASS " : "FAIL ") + check + " [" + reference + "] " + detail);
    out.pass = out.pass && pass;
}

DriftSpectrum experiment_spectrum(RunConfig const& config)
{
    auto const full = parse_spectrum(config.spectrum);
    std::size_t const keep = config.truncation == 0 ? full.size() : config.truncation;
    return full.truncated(keep);
}

ShiftDescriptor named_shift(std::string const& name, DriftSpectrum const& spectrum)
{
    if (name == "zero") {
        return ShiftDescriptor::zero(spectrum.size());
    }
    return make_h_named(name, spectrum);
}

std::vector<double> padded(std::vector<double> v, std::size_t dim, char const* what)
{
    if (v.size() > dim) {
        throw ConfigError(std::string(what) + " has more components than the truncation");
    }
    v.resize(dim, 0.0);
    return v;
}

Json estimate_json(McEstimate const& e)
{
    return Json{{"mean", e.mean}, {"stderr", e.std_error}, {"n", e.n}};
}

void run_constants(RunConfig const& config, Output& out)
{
    auto const grid = parse_lambda_grid(config.lambda_grid);
    out.csv << "lambda,d_lambda,alpha1,alpha2,alpha3,alpha,h,reference\n";
    Json rows = Json::array();
    for (double lambda : grid) {
        auto const a = alpha_components(lambda);
        double const weight = spectral_weight(lambda);
        out.csv << num(lambda) << ',' << num(a.d_lambda) << ',' << num(a.alpha1) << ',' << num(a.alpha2) << ','
                << num(a.alpha3) << ',' << num(a.alpha) << ',' << num(weight) << ",\"" << kConstantsReference << "\"\n";
        rows.push_back(Json{{"lambda", lambda},
                            {"d_lambda", a.d_lambda},
                            {"alpha1", a.alpha1},
                            {"alpha2", a.alpha2},
                            {"alpha3", a.alpha3},
                            {"alpha", a.alpha},
                            {"h", weight},
                            {"reference", kConstantsReference}});
    }
    auto const suite = analytic_property_suite();
    Json claims = Json::array();
    for (auto const& claim : suite.claims) {
        claims.push_back(Json{{"name", claim.name},
                              {"passed", claim.passed},
                              {"worst_margin", claim.worst_margin},
                              {"worst_at", claim.worst_at},
                              {"points", claim.points}});
        verdict(out, claim.passed, "constants:" + claim.name, "analytic claim on the constants",
                "worst_margin=" + num(claim.worst_margin));
    }
    out.json["rows"] = rows;
    out.json["claims"] = claims;
}

Json check_json(CheckResult const& r, RunConfig const& config)
{
    return Json{{"check", r.check},
                {"reference", r.reference},
                {"seed", *config.seed},
                {"n", r.estimate.n},
                {"M", config.steps},
                {"mean", r.estimate.mean},
                {"stderr", r.estimate.std_error},
                {"upper999", r.upper999},
                {"bound", r.bound},
                {"bound_exact", std::isfinite(r.bound_exact) ? Json(r.bound_exact) : Json(nullptr)},
                {"exponent", r.exponent},
                {"max_summand", r.max_summand},
                {"summand_cap", std::isfinite(r.summand_cap) ? Json(r.summand_cap) : Json(nullptr)},
                {"max_functional", r.max_functional},
                {"hard_bound_ok", r.hard_bound_ok},
                {"h_a_norm_sq_max", r.h_a_norm_sq_max},
                {"pass", r.pass}};
}

void check_csv(Output& out, CheckResult const& r, RunConfig const& config)
{
    out.csv << "check,seed,n,M,mean,stderr,upper999,bound,pass,reference\n";
    out.csv << r.check << ',' << *config.seed << ',' << r.estimate.n << ',' << config.steps << ','
            << num(r.estimate.mean) << ',' << num(r.estimate.std_error) << ',' << num(r.upper999) << ','
            << num(r.bound) << ',' << (r.pass ? "true" : "false") << ",\"" << r.reference << "\"\n";
}

void run_derivative_moment(RunConfig const& config, Output& out)
{
    DriftSpectrum const spectrum({config.lambda});
    auto const b = make_b_named(config.b, spectrum);
    auto const r = check_derivative_moment(config.lambda, b, config.steps, config.n_paths, *config.seed, config.workers);
    Json result = check_json(r, config);
    result["lambda"] = config.lambda;
    result["b"] = b.formula();
    result["pass_exact_constant"] = r.upper999 <= r.bound_exact;
    out.json["result"] = result;
    check_csv(out, r, config);
    verdict(out, r.pass, r.check, r.reference,
            "upper999=" + num(r.upper999) + " bound=3 (proof constant " + num(r.bound_exact) + ")");
}

ExperimentSpec experiment(RunConfig const& config, DriftSpectrum const& spectrum)
{
    ExperimentSpec spec;
    spec.spectrum = spectrum;
    spec.truncation = spectrum.size();
    spec.steps = config.steps;
    spec.n_paths = config.n_paths;
    spec.seed = *config.seed;
    spec.workers = config.workers;
    spec.ell = config.ell;
    return spec;
}

void run_shift_moment(RunConfig const& config, Output& out)
{
    auto const spectrum = experiment_spectrum(config);
    auto const b = make_b_named(config.b, spectrum);
    auto const h = named_shift(config.h, spectrum);
    auto const r = check_shift_moment(experiment(config, spectrum), b, h);
    Json result = check_json(r, config);
    result["spectrum"] = config.spectrum;
    result["truncation"] = spectrum.size();
    result["ell"] = config.ell;
    result["b"] = b.formula();
    result["b_kind"] = std::string(to_string(b.kind()));
    result["h"] = h.formula();
    result["h_norm_inf"] = h.norm_inf();
    result["h_norm_note"] = ShiftDescriptor::kGridDisclaimer;
    out.json["result"] = result;
    check_csv(out, r, config);
    verdict(out, r.pass, r.check, r.reference, "upper999=" + num(r.upper999) + " bound=3");
}

WindowSpec window(RunConfig const& config, DriftSpectrum const& spectrum)
{
    WindowSpec spec;
    spec.experiment = experiment(config, spectrum);
    spec.r = config.r;
    spec.u = config.u;
    if (!config.start.empty()) {
        spec.start = padded(config.start, spectrum.size(), "start");
    }
    return spec;
}

void run_concentration(RunConfig const& config, Output& out)
{
    auto const spectrum = experiment_spectrum(config);
    auto const b = make_b_named(config.b, spectrum);
    auto const h1 = named_shift(config.h, spectrum);
    auto const h2 = named_shift(config.h2, spectrum);
    auto const report = concentration_tail(window(config, spectrum), b, h1, h2, config.etas);

    out.csv << "eta,threshold,empirical,stderr,upper999,bound,pass,reference\n";
    Json rows = Json::array();
    for (auto const& row : report.rows) {
        out.csv << num(row.eta) << ',' << num(row.threshold) << ',' << num(row.empirical.mean) << ','
                << num(row.empirical.std_error) << ',' << num(row.upper999) << ',' << num(row.bound) << ','
                << (row.pass ? "true" : "false") << ",\"" << report.reference << "\"\n";
        rows.push_back(Json{{"eta", row.eta},
                            {"threshold", row.threshold},
                            {"empirical", estimate_json(row.empirical)},
                            {"upper999", row.upper999},
                            {"bound", row.bound},
                            {"pass", row.pass},
                            {"reference", report.reference}});
        verdict(out, row.pass, "concentration eta=" + num(row.eta), report.reference,
                "upper999=" + num(row.upper999) + " bound=" + num(row.bound));
    }
    out.pass = out.pass && report.pass;
    out.json["result"] = Json{{"check", "concentration"},
                              {"reference", report.reference},
                              {"seed", *config.seed},
                              {"n", config.n_paths},
                              {"M", config.steps},
                              {"r", config.r},
                              {"u", config.u},
                              {"ell", report.ell},
                              {"beta", report.beta},
                              {"shift_distance", report.shift_distance},
                              {"note", report.note},
                              {"rows", rows},
                              {"pass", report.pass}};
}

void run_moments(RunConfig const& config, Output& out)
{
    auto const spectrum = experiment_spectrum(config);
    auto const b = make_b_named(config.b, spectrum);
    auto const x = padded(config.x, spectrum.size(), "x");
    auto const y = padded(config.y, spectrum.size(), "y");
    auto const report = moment_bound(window(config, spectrum), b, x, y, config.powers);

    out.csv << "p,moment,stderr,upper999,bound_derived,bound_stated,pass,pass_stated,reference\n";
    Json rows = Json::array();
    for (auto const& row : report.rows) {
        out.csv << row.p << ',' << num(row.moment.mean) << ',' << num(row.moment.std_error) << ','
                << num(row.upper999) << ',' << num(row.bound_derived) << ',' << num(row.bound_stated) << ','
                << (row.pass ? "true" : "false") << ',' << (row.pass_stated ? "true" : "false") << ",\""
                << report.reference << "\"\n";
        rows.push_back(Json{{"p", row.p},
                            {"moment", estimate_json(row.moment)},
                            {"upper999", row.upper999},
                            {"bound_derived", row.bound_derived},
                            {"bound_stated", row.bound_stated},
                            {"pass", row.pass},
                            {"pass_stated", row.pass_stated},
                            {"reference", report.reference}});
        verdict(out, row.pass, "moments p=" + std::to_string(row.p), report.reference,
                "upper999=" + num(row.upper999) + " bound=" + num(row.bound_derived)
                    + (row.pass_stated ? " (stated exponent also holds)" : " (stated exponent violated)"));
    }
    Json gamma = Json::array();
    bool gamma_ok = true;
    for (auto const& row : gamma_step_table()) {
        gamma.push_back(Json{{"p", row.p}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"holds", row.holds}});
        gamma_ok = gamma_ok && row.holds;
    }
    verdict(out, gamma_ok, "moments gamma step p=1..20", kGammaReference, gamma_ok ? "holds" : "violated");
    out.pass = out.pass && report.pass;
    out.json["result"] = Json{{"check", "moments"},
                              {"reference", report.reference},
                              {"seed", *config.seed},
                              {"n", config.n_paths},
                              {"M", config.steps},
                              {"r", config.r},
                              {"u", config.u},
                              {"ell", report.ell},
                              {"beta", report.beta},
                              {"distance", report.distance},
                              {"note", report.note},
                              {"rows", rows},
                              {"gamma_step", gamma},
                              {"gamma_reference", kGammaReference},
                              {"pass", report.pass && gamma_ok}};
}

void run_decomposition(RunConfig const& config, Output& out)
{
    DriftSpectrum const spectrum({config.lambda});
    auto const b = make_b_named(config.b, spectrum);
    auto const rows = covariation_check(b, config.lambda, config.grids, config.n_paths, *config.seed, config.workers);
    bool const trend = decreasing_trend(rows);

    // one path on the finest grid, split into I1 + I2 + I3
    Substream stream(StreamId{*config.seed, 0, 0});
    auto const path = sample_path_1d(config.lambda, config.grids.back(), stream);
    auto const split = decompose(b, path);

    out.csv << "M,mean_residual,stderr,reference\n";
    Json table = Json::array();
    for (auto const& row : rows) {
        out.csv << row.steps << ',' << num(row.residual.mean) << ',' << num(row.residual.std_error) << ",\""
                << kDecompositionReference << "\"\n";
        table.push_back(Json{{"M", row.steps},
                             {"residual", estimate_json(row.residual)},
                             {"reference", kDecompositionReference}});
    }
    out.json["result"] = Json{{"check", "decomposition"},
                              {"reference", kDecompositionReference},
                              {"seed", *config.seed},
                              {"n", config.n_paths},
                              {"lambda", config.lambda},
                              {"b", b.formula()},
                              {"rows", table},
                              {"decreasing", trend},
                              {"single_path",
                               Json{{"M", split.steps},
                                    {"lhs", split.lhs},
                                    {"i1", split.i1},
                                    {"i2", split.i2},
                                    {"i3", split.i3},
                                    {"residual", split.residual}}},
                              {"pass", trend}};
    verdict(out, trend, "decomposition", kDecompositionReference,
            "mean residual " + num(rows.front().residual.mean) + " -> " + num(rows.back().residual.mean));
}

void dump_paths(RunConfig const& config, std::ostream& os)
{
    os << "path_id,component,t,value\n";
    std::size_t const count = std::min(config.n_paths, kDumpPaths);
    auto const write = [&](std::size_t path, std::size_t component, double t, double value) {
        os << path << ',' << component << ',' << num(t) << ',' << num(value) << '\n';
    };
    switch (config.command) {
    case Command::constants:
        return;
    case Command::verify_prop21:
    case Command::decomposition: {
        std::size_t const steps = config.command == Command::decomposition ? config.grids.back() : config.steps;
        for (std::size_t p = 0; p < count; ++p) {
            Substream stream(StreamId{*config.seed, p, 0});
            auto const path = sample_path_1d(config.lambda, steps, stream);
            for (std::size_t k = 0; k <= steps; ++k) {
                write(p, 0, path.time(k), path.values[k]);
            }
        }
        return;
    }
    case Command::verify_thm23: {
        auto const spectrum = experiment_spectrum(config).scaled(config.ell);
        for (std::size_t p = 0; p < count; ++p) {
            auto const path = sample_hilbert(spectrum, spectrum.size(), config.steps, *config.seed, p);
            for (std::size_t n = 0; n < path.truncation(); ++n) {
                for (std::size_t k = 0; k <= config.steps; ++k) {
                    write(p, n, path.time(k), path.component(n).values[k]);
                }
            }
        }
        return;
    }
    case Command::concentration:
    case Command::moments: {
        auto const spectrum = experiment_spectrum(config);
        auto const start = padded(config.start, spectrum.size(), "start");
        double const ell = config.u - config.r;
        std::vector<double> buffer(config.steps + 1);
        for (std::size_t p = 0; p < count; ++p) {
            for (std::size_t n = 0; n < spectrum.size(); ++n) {
                Substream stream(StreamId{*config.seed, p, static_cast<std::uint32_t>(n)});
                sample_segment(spectrum[n], start[n], ell, config.steps, stream, buffer);
                for (std::size_t k = 0; k <= config.steps; ++k) {
                    write(p, n, config.r + ell * static_cast<double>(k) / static_cast<double>(config.steps),
                          buffer[k]);
                }
            }
        }
        return;
    }
    }
}

}  // namespace

RunResult run(RunConfig const& config)
{
    RunResult result;
    auto const begin = std::chrono::steady_clock::now();
    Output out;
    try {
        validate(config);
        out.json["schema"] = kSchema;
        out.json["command"] = std::string(to_string(config.command));
        out.json["spec_hash"] = hex64(spec_hash(config));
        out.json["seed"] = *config.seed;
        switch (config.command) {
        case Command::constants:
            run_constants(config, out);
            break;
        case Command::verify_prop21:
            run_derivative_moment(config, out);
            break;
        case Command::verify_thm23:
            run_shift_moment(config, out);
            break;
        case Command::concentration:
            run_concentration(config, out);
            break;
        case Command::moments:
            run_moments(config, out);
            break;
        case Command::decomposition:
            run_decomposition(config, out);
            break;
        }
    } catch (ConfigError const& e) {
        result.diagnostics = std::string("invalid config: ") + e.what();
        return result;
    } catch (DomainError const& e) {
        result.diagnostics = std::string("invalid config: ") + e.what();
        return result;
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    result.exit_code = out.pass ? kExitPass : kExitFail;
    result.verdicts = std::move(out.verdicts);
    out.json["pass"] = out.pass;

    if (config.format == OutputFormat::json) {
        result.payload = out.json.dump(2);
        Json document = out.json;
        double const paths = config.command == Command::constants ? 0.0 : static_cast<double>(config.n_paths);
        document["timing"] = Json{{"seconds", result.seconds},
                                  {"paths_per_sec", result.seconds > 0.0 ? paths / result.seconds : 0.0},
                                  {"workers", resolve_workers(config.workers)}};
        result.document = document.dump(2) + "\n";
    } else {
        result.payload = out.csv.str();
        result.document = result.payload;
    }
    return result;
}

void write_artifacts(RunConfig const& config, RunResult const& result)
{
    if (config.output.empty()) {
        std::cout << result.document;
    } else {
        std::ofstream file(config.output);
        if (!file) {
            throw ConfigError("cannot open output file '" + config.output + "'");
        }
        file << result.document;
    }
    if (!config.dump.empty()) {
        std::ofstream file(config.dump);
        if (!file) {
            throw ConfigError("cannot open dump file '" + config.dump + "'");
        }
        dump_paths(config, file);
    }
}

}  // namespace oulab
