#pragma once

#include "mulsemi/error.hpp"
#include "mulsemi/report.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mulsemi::app {

/// Malformed or semantically invalid configuration. Line and column are 0
/// when the error is not tied to a text position.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error("cli", "config", what), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
};

/// Parsed configuration: the normalized document (every default filled in)
/// from which all runs are built.
class Config {
public:
    static Config parse(const std::string& text, const Overrides& overrides = {});
    static Config load(const std::string& path, const Overrides& overrides = {});

    const Json& normalized() const noexcept { return doc_; }
    /// FNV-1a of the normalized document without its output section.
    std::string hash() const;
    std::optional<std::string> json_path() const;
    std::optional<std::string> csv_path() const;

private:
    Json doc_;
};

/// Runs every classifier the config asks for and returns the JSON report.
std::string run_analyze(const Config& config);

/// CSV rows (param, decay_eps, bound_M, max_cluster_measure). An empty
/// `parameter` takes sweep.parameter from the config.
std::string run_sweep(const Config& config, const std::string& parameter = {});

/// CSV rows (t, ess_sup_norm, probe_0, ...).
std::string run_trajectory(const Config& config);

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

}  // namespace mulsemi::app
