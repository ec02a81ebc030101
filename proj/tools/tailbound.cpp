#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailbound/report_io.hpp"

namespace {

// Exit codes: 0 all hold, 2 config error, 3 bound violated,
// 4 hypothesis violated only.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitViolated = 3;
constexpr int kExitHypothesis = 4;

int run_command(const std::string& config, const std::string& out_dir, long long samples,
                long long seed, bool has_seed, bool allow_small_u) {
    tailbound::RunOverrides overrides;
    overrides.out_dir = out_dir;
    overrides.allow_small_u = allow_small_u;
    if (samples > 0) overrides.samples = std::size_t(samples);
    if (has_seed) overrides.seed = std::uint64_t(seed);

    const tailbound::RunResult result = tailbound::run_scenario(config, overrides);
    std::printf("report: %s\n", result.report_path.string().c_str());
    std::printf("curve:  %s\n", result.curve_path.string().c_str());
    for (const auto& rec : result.report.records) {
        std::printf("  u=%-6g %-20s bound=%.6e empirical=%.6e verdict=%s\n", rec.u,
                    tailbound::to_string(rec.bound), rec.value, rec.empirical,
                    tailbound::to_string(rec.verdict));
    }
    if (result.report.any_violated()) return kExitViolated;
    if (result.report.any_hypothesis_violated()) return kExitHypothesis;
    return kExitOk;
}

int curve_command(const std::string& config, const std::string& out_dir,
                  const std::vector<std::string>& bound_names) {
    std::vector<tailbound::BoundKind> bounds;
    for (const auto& name : bound_names) {
        const auto kind = tailbound::bound_kind_from_string(name);
        if (!kind) throw tailbound::ConfigError("curve: unknown bound '" + name + "'");
        bounds.push_back(*kind);
    }
    const auto path = tailbound::emit_curve(config, bounds, out_dir);
    std::printf("curve: %s\n", path.string().c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exponential tail bounds for the maximum and minimum of a random vector"};
    app.require_subcommand(1);

    std::string config, out_dir = ".";
    long long samples = 0, seed = 0;
    bool allow_small_u = false;
    std::vector<std::string> bound_names;

    CLI::App* run = app.add_subcommand("run", "Run a validation scenario and write a report");
    run->add_option("config", config, "Scenario config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--samples", samples, "Override the Monte Carlo sample count");
    CLI::Option* seed_opt = run->add_option("--seed", seed, "Override the base seed");
    run->add_flag("--allow-small-u", allow_small_u, "Evaluate u < 1 with a scope warning");

    CLI::App* curve = app.add_subcommand("curve", "Emit a bounds-only CSV curve");
    curve->add_option("config", config, "Scenario config (JSON)")->required();
    curve->add_option("--out", out_dir, "Output directory");
    curve->add_option("--bounds", bound_names, "Bound subset to evaluate")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            return run_command(config, out_dir, samples, seed, seed_opt->count() > 0,
                               allow_small_u);
        }
        return curve_command(config, out_dir, bound_names);
    } catch (const tailbound::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}
