#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailbound/phi.hpp"
#include "tailbound/sampler.hpp"

namespace tailbound {

enum class BoundKind {
    max_upper_full,
    max_upper_two_term,
    max_lower,
    min_upper,
    zeta,
    combined,
};

const char* to_string(BoundKind kind);
std::optional<BoundKind> bound_kind_from_string(const std::string& name);

enum class Verdict { holds, violated, hypothesis_violated, not_applicable };
const char* to_string(Verdict v);

// A named validation scenario: what to sample, which generator to use,
// which bounds to evaluate and where.
struct ScenarioConfig {
    std::string name;
    DistributionSpec distribution;
    PhiDescriptor phi;
    std::vector<double> u_grid;               // strictly ascending, min >= 1 unless overridden
    std::optional<std::vector<double>> betas;  // explicit norm overrides
    std::optional<std::vector<double>> deltas;
    std::vector<BoundKind> bounds;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 0;
    bool allow_small_u = false;
    bool ordered_pairs = false;

    void validate() const;  // throws ConfigError
};

struct BoundRecord {
    double u = 0.0;
    BoundKind bound = BoundKind::max_upper_full;
    double value = 0.0;                   // always in [0, 1]
    double empirical = 0.0;
    double stderr_ = 0.0;
    Verdict verdict = Verdict::holds;
    double gap_ratio = 0.0;               // value / empirical; may be infinite
};

struct BoundReport {
    std::string name;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::string pair_sum_convention = "unordered";
    bool log_mgf_amendment = true;        // conjugate taken of ln g, not g
    bool orthant_restricted = true;
    bool scope_warning = false;           // u < 1 was evaluated under override
    double verdict_slack = 3.0;           // stderr multiples
    std::string library_version;
    int schema = 1;
    std::vector<double> betas;
    std::optional<std::vector<double>> deltas;
    std::vector<BoundRecord> records;

    bool any_violated() const;
    bool any_hypothesis_violated() const;
};

// Configuration / validation failure; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tailbound
