#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tailbound/scenario.hpp"

namespace tailbound {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Parses and validates a scenario config file (JSON, schema 1). Parse and
// validation failures throw ConfigError with a location-anchored message.
ScenarioConfig load_scenario(const std::filesystem::path& config_path);

// Serialization is deterministic: fixed key order, floats with 17
// significant digits, atomic write-temp-then-rename.
void write_report_json(const BoundReport& report, const std::filesystem::path& path);
BoundReport read_report_json(const std::filesystem::path& path);

// Curve CSV: u, bound_name, bound, empirical, stderr.
void write_curve_csv(const BoundReport& report, const std::filesystem::path& path);

struct RunOverrides {
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    bool allow_small_u = false;
    std::filesystem::path out_dir = ".";
};

struct RunResult {
    std::filesystem::path report_path;
    std::filesystem::path curve_path;
    BoundReport report;
};

// Full pipeline behind `tailbound run`: load, validate, sample, bound,
// verdicts, write report + curve.
RunResult run_scenario(const std::filesystem::path& config_path, const RunOverrides& overrides = {});

// Bound-only curve behind `tailbound curve`: no Monte Carlo columns.
// `bounds` overrides the config's bound subset when nonempty.
std::filesystem::path emit_curve(const std::filesystem::path& config_path,
                                 const std::vector<BoundKind>& bounds,
                                 const std::filesystem::path& out_dir = ".");

}  // namespace tailbound
