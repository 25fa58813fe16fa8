#include "oulab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace oulab {

namespace {

std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string canonical_key(std::string_view key)
{
    std::string out(trim(key));
    std::replace(out.begin(), out.end(), '_', '-');
    return out;
}

double to_double(std::string_view text, std::string_view what)
{
    text = trim(text);
    double value = 0.0;
    auto const [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
        throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not a finite number");
    }
    return value;
}

std::uint64_t to_u64(std::string_view text, std::string_view what)
{
    text = trim(text);
    std::uint64_t value = 0;
    auto const [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not a non-negative integer");
    }
    return value;
}

std::size_t to_positive(std::string_view text, std::string_view what)
{
    auto const value = to_u64(text, what);
    if (value == 0) {
        throw ConfigError(std::string(what) + " must be positive");
    }
    return static_cast<std::size_t>(value);
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    text = trim(text);
    if (text.empty()) {
        return parts;
    }
    std::size_t start = 0;
    while (true) {
        auto const end = text.find(sep, start);
        parts.push_back(trim(text.substr(start, end == std::string_view::npos ? end : end - start)));
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return parts;
}

std::vector<double> to_doubles(std::string_view text, std::string_view what)
{
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        out.push_back(to_double(part, what));
    }
    return out;
}

std::string format_double(double v)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    // prefer the shortest text that reads back identically
    for (int precision = 1; precision < 17; ++precision) {
        char shorter[32];
        std::snprintf(shorter, sizeof shorter, "%.*g", precision, v);
        if (std::strtod(shorter, nullptr) == v) {
            return shorter;
        }
    }
    return buffer;
}

template <class T, class F>
std::string join(std::vector<T> const& values, F&& format)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += format(values[i]);
    }
    return out;
}

std::string strip_spaces(std::string_view text)
{
    std::string out;
    for (char c : text) {
        if (c != ' ' && c != '\t') {
            out += c;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Command command) noexcept
{
    switch (command) {
    case Command::constants:
        return "constants";
    case Command::verify_prop21:
        return "verify-prop21";
    case Command::verify_thm23:
        return "verify-thm23";
    case Command::concentration:
        return "concentration";
    case Command::moments:
        return "moments";
    case Command::decomposition:
        return "decomposition";
    }
    return "unknown";
}

Command parse_command(std::string_view text)
{
    text = trim(text);
    for (auto c : {Command::constants, Command::verify_prop21, Command::verify_thm23, Command::concentration,
                   Command::moments, Command::decomposition}) {
        if (text == to_string(c)) {
            return c;
        }
    }
    throw ConfigError("unknown command '" + std::string(text) + "'");
}

void apply_setting(RunConfig& config, std::string_view raw_key, std::string_view raw_value)
{
    std::string const key = canonical_key(raw_key);
    std::string_view const value = trim(raw_value);
    if (key == "command") {
        config.command = parse_command(value);
    } else if (key == "seed") {
        config.seed = to_u64(value, "seed");
    } else if (key == "n" || key == "n-paths") {
        config.n_paths = to_positive(value, "n");
    } else if (key == "M" || key == "steps") {
        config.steps = to_positive(value, "M");
    } else if (key == "workers") {
        config.workers = to_positive(value, "workers");
    } else if (key == "spectrum") {
        config.spectrum = strip_spaces(value);
        parse_spectrum(config.spectrum);
    } else if (key == "truncation" || key == "N") {
        config.truncation = static_cast<std::size_t>(to_u64(value, "truncation"));
    } else if (key == "b") {
        config.b = std::string(value);
    } else if (key == "h" || key == "h1") {
        config.h = std::string(value);
    } else if (key == "h2") {
        config.h2 = std::string(value);
    } else if (key == "lambda") {
        config.lambda = to_double(value, "lambda");
    } else if (key == "lambda-grid") {
        config.lambda_grid = strip_spaces(value);
        parse_lambda_grid(config.lambda_grid);
    } else if (key == "ell") {
        config.ell = to_double(value, "ell");
    } else if (key == "r") {
        config.r = to_double(value, "r");
    } else if (key == "u") {
        config.u = to_double(value, "u");
    } else if (key == "start") {
        config.start = to_doubles(value, "start");
    } else if (key == "eta") {
        config.etas = to_doubles(value, "eta");
    } else if (key == "p") {
        config.powers.clear();
        for (auto part : split(value, ',')) {
            config.powers.push_back(static_cast<int>(to_positive(part, "p")));
        }
    } else if (key == "x") {
        config.x = to_doubles(value, "x");
    } else if (key == "y") {
        config.y = to_doubles(value, "y");
    } else if (key == "grids") {
        config.grids.clear();
        for (auto part : split(value, ',')) {
            config.grids.push_back(to_positive(part, "grids"));
        }
    } else if (key == "format") {
        if (value == "csv") {
            config.format = OutputFormat::csv;
        } else if (value == "json") {
            config.format = OutputFormat::json;
        } else {
            throw ConfigError("format must be csv or json");
        }
    } else if (key == "output") {
        config.output = std::string(value);
    } else if (key == "dump") {
        config.dump = std::string(value);
    } else {
        throw ConfigError("unknown key '" + std::string(raw_key) + "'");
    }
}

RunConfig parse_config(std::string_view text, RunConfig base)
{
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (auto const hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        try {
            apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
        } catch (DomainError const& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (ConfigError const& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

void validate(RunConfig const& config)
{
    if (!config.seed) {
        throw ConfigError("seed is mandatory");
    }
    if (config.n_paths < 2) {
        throw ConfigError("n must be at least 2");
    }
    if (config.steps < 2) {
        throw ConfigError("M must be at least 2");
    }
    if (!(config.lambda > 0.0)) {
        throw ConfigError("lambda must be positive");
    }
    if (!(config.ell > 0.0 && config.ell <= 1.0)) {
        throw ConfigError("ell must lie in (0, 1]");
    }
    if (!(config.r >= 0.0 && config.r < config.u && config.u <= 1.0)) {
        throw ConfigError("window must satisfy 0 <= r < u <= 1");
    }
    for (double eta : config.etas) {
        if (!(eta >= 0.0)) {
            throw ConfigError("eta values must be non-negative");
        }
    }
    try {
        auto const spectrum = parse_spectrum(config.spectrum);
        if (config.truncation > spectrum.size()) {
            throw ConfigError("truncation exceeds the listed spectrum");
        }
    } catch (DomainError const& e) {
        throw ConfigError(e.what());
    }
}

std::string RunConfig::serialize(bool include_workers) const
{
    std::ostringstream out;
    auto const doubles = [](std::vector<double> const& v) { return join(v, format_double); };
    out << "command = " << to_string(command) << "\n";
    if (seed) {
        out << "seed = " << *seed << "\n";
    }
    out << "n = " << n_paths << "\n";
    out << "M = " << steps << "\n";
    if (include_workers) {
        out << "workers = " << workers << "\n";
    }
    out << "spectrum = " << spectrum << "\n";
    out << "truncation = " << truncation << "\n";
    out << "b = " << b << "\n";
    out << "h = " << h << "\n";
    out << "h2 = " << h2 << "\n";
    out << "lambda = " << format_double(lambda) << "\n";
    out << "lambda-grid = " << lambda_grid << "\n";
    out << "ell = " << format_double(ell) << "\n";
    out << "r = " << format_double(r) << "\n";
    out << "u = " << format_double(u) << "\n";
    out << "start = " << doubles(start) << "\n";
    out << "eta = " << doubles(etas) << "\n";
    out << "p = " << join(powers, [](int p) { return std::to_string(p); }) << "\n";
    out << "x = " << doubles(x) << "\n";
    out << "y = " << doubles(y) << "\n";
    out << "grids = " << join(grids, [](std::size_t g) { return std::to_string(g); }) << "\n";
    out << "format = " << (format == OutputFormat::csv ? "csv" : "json") << "\n";
    if (include_workers) {
        out << "output = " << output << "\n";
        out << "dump = " << dump << "\n";
    }
    return out.str();
}

std::string normalize(std::string_view text) { return parse_config(text).serialize(); }

DriftSpectrum parse_spectrum(std::string_view raw)
{
    std::string const text = strip_spaces(raw);
    std::string_view view(text);
    if (view.starts_with("list:")) {
        auto values = to_doubles(view.substr(5), "spectrum");
        if (values.empty()) {
            throw ConfigError("spectrum list is empty");
        }
        try {
            return DriftSpectrum(std::move(values));
        } catch (DomainError const& e) {
            throw ConfigError(std::string("spectrum: ") + e.what());
        }
    }
    if (view.starts_with("n^")) {
        auto const comma = view.find(',');
        if (comma == std::string_view::npos || !view.substr(comma + 1).starts_with("N=")) {
            throw ConfigError("power spectrum must read n^p,N=k");
        }
        double const exponent = to_double(view.substr(2, comma - 2), "spectrum exponent");
        std::size_t const count = to_positive(view.substr(comma + 3), "spectrum N");
        if (!(exponent > 1.0)) {
            throw ConfigError("power spectrum n^p needs p > 1 for a finite trace");
        }
        return DriftSpectrum::power_family(exponent, count);
    }
    throw ConfigError("spectrum must be 'list:a,b,...' or 'n^p,N=k'");
}

std::vector<double> parse_lambda_grid(std::string_view raw)
{
    std::string const text = strip_spaces(raw);
    std::string_view view(text);
    if (view.starts_with("list:")) {
        auto values = to_doubles(view.substr(5), "lambda-grid");
        if (values.empty()) {
            throw ConfigError("lambda-grid list is empty");
        }
        for (double v : values) {
            if (!(v > 0.0)) {
                throw ConfigError("lambda-grid values must be positive");
            }
        }
        return values;
    }
    bool const log = view.starts_with("log:");
    if (!log && !view.starts_with("lin:")) {
        throw ConfigError("lambda-grid must be log:a:b:n, lin:a:b:n or list:...");
    }
    auto const parts = split(view.substr(4), ':');
    if (parts.size() != 3) {
        throw ConfigError("lambda-grid needs three fields a:b:n");
    }
    double const lo = to_double(parts[0], "lambda-grid");
    double const hi = to_double(parts[1], "lambda-grid");
    std::size_t const n = to_positive(parts[2], "lambda-grid");
    if (!(lo > 0.0 && hi >= lo)) {
        throw ConfigError("lambda-grid needs 0 < a <= b");
    }
    if (n == 1) {
        return {lo};
    }
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        double const frac = static_cast<double>(i) / static_cast<double>(n - 1);
        grid[i] = log ? std::exp(std::log(lo) + frac * (std::log(hi) - std::log(lo))) : lo + frac * (hi - lo);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::uint64_t spec_hash(RunConfig const& config)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.serialize(false)) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace oulab
