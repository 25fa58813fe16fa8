#pragma once

#include "oulab/constants.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oulab {

/// Raised for malformed or incomplete run configurations (exit status 2).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { constants, verify_prop21, verify_thm23, concentration, moments, decomposition };

std::string_view to_string(Command command) noexcept;
Command parse_command(std::string_view text);

enum class OutputFormat { csv, json };

/// Everything a run depends on. Text form is one `key = value` per line, '#' starts a comment.
struct RunConfig {
    Command command = Command::constants;
    std::optional<std::uint64_t> seed;  ///< mandatory for every command
    std::size_t n_paths = 100000;
    std::size_t steps = 4096;
    std::size_t workers = 1;  ///< not part of the result; excluded from the spec hash
    std::string spectrum = "list:1";
    std::size_t truncation = 0;  ///< 0 keeps the whole listed spectrum
    std::string b = "weighted:sin";
    std::string h = "e1:sin_pi_t";
    std::string h2 = "zero";
    double lambda = 1.0;
    std::string lambda_grid = "log:1e-3:1e2:200";
    double ell = 1.0;
    double r = 0.25;
    double u = 0.75;
    std::vector<double> start;  ///< Z_r for window commands; empty means 0
    std::vector<double> etas{0.5, 1.0, 2.0, 4.0};
    std::vector<int> powers{1, 2, 4};
    std::vector<double> x{1.0};
    std::vector<double> y{0.0};
    std::vector<std::size_t> grids{256, 1024, 4096};
    OutputFormat format = OutputFormat::json;
    std::string output;  ///< empty writes to stdout
    std::string dump;    ///< optional CSV of sampled paths

    /// Canonical text: every key in fixed order, numbers printed to round-trip.
    std::string serialize(bool include_workers = true) const;

    bool operator==(RunConfig const&) const = default;
};

/// Applies `key = value` pairs from `text` on top of `base`.
RunConfig parse_config(std::string_view text, RunConfig base = {});

/// Applies one key. Keys accept '-' or '_' interchangeably.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Checks cross-field constraints (mandatory seed, positive counts, window bounds).
void validate(RunConfig const& config);

/// serialize(parse(text)).
std::string normalize(std::string_view text);

/// Parses "n^p,N=k" (power family) or "list:a,b,..." (finite list), optionally truncated.
DriftSpectrum parse_spectrum(std::string_view text);

/// Parses "log:a:b:n", "lin:a:b:n" or "list:v1,v2,...".
std::vector<double> parse_lambda_grid(std::string_view text);

/// FNV-1a 64 of the canonical text without workers and output locations.
std::uint64_t spec_hash(RunConfig const& config);

}  // namespace oulab
