#include "tailbound/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace tailbound {

const char* to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::max_upper_full: return "max_upper_full";
        case BoundKind::max_upper_two_term: return "max_upper_two_term";
        case BoundKind::max_lower: return "max_lower";
        case BoundKind::min_upper: return "min_upper";
        case BoundKind::zeta: return "zeta";
        case BoundKind::combined: return "combined";
    }
    return "unknown";
}

std::optional<BoundKind> bound_kind_from_string(const std::string& name) {
    if (name == "max_upper_full") return BoundKind::max_upper_full;
    if (name == "max_upper_two_term") return BoundKind::max_upper_two_term;
    if (name == "max_lower") return BoundKind::max_lower;
    if (name == "min_upper") return BoundKind::min_upper;
    if (name == "zeta") return BoundKind::zeta;
    if (name == "combined") return BoundKind::combined;
    return std::nullopt;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::violated: return "violated";
        case Verdict::hypothesis_violated: return "hypothesis_violated";
        case Verdict::not_applicable: return "not_applicable";
    }
    return "unknown";
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ConfigError("scenario: name must be nonempty");
    distribution.validate();
    if (u_grid.empty()) throw ConfigError("scenario: u_grid must be nonempty");
    for (std::size_t i = 0; i + 1 < u_grid.size(); ++i) {
        if (!(u_grid[i] < u_grid[i + 1])) {
            throw ConfigError("scenario: u_grid must be strictly ascending");
        }
    }
    if (!allow_small_u && u_grid.front() < 1.0) {
        throw ConfigError("scenario: bounds are scoped to u >= 1; "
                          "set allow_small_u (or pass --allow-small-u) to override");
    }
    if (bounds.empty()) throw ConfigError("scenario: bounds must be nonempty");
    const bool wants_zeta = std::any_of(bounds.begin(), bounds.end(), [](BoundKind b) {
        return b == BoundKind::zeta || b == BoundKind::combined;
    });
    if (wants_zeta && distribution.d != 2) {
        throw ConfigError("scenario: zeta/combined bounds require d=2");
    }
    const bool wants_lower = std::any_of(bounds.begin(), bounds.end(), [](BoundKind b) {
        return b == BoundKind::max_lower;
    });
    if (wants_lower && !deltas.has_value()) {
        throw ConfigError("scenario: max_lower requires deltas");
    }
    if (betas.has_value()) {
        if (int(betas->size()) != distribution.d) {
            throw ConfigError("scenario: betas must have length d");
        }
        for (double b : *betas) {
            if (!(b > 0.0) || !std::isfinite(b)) {
                throw ConfigError("scenario: betas must be positive and finite");
            }
        }
    }
    if (deltas.has_value()) {
        if (int(deltas->size()) != distribution.d) {
            throw ConfigError("scenario: deltas must have length d");
        }
        for (double v : *deltas) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw ConfigError("scenario: deltas must be positive and finite");
            }
        }
    }
    if (samples < 1) throw ConfigError("scenario: samples must be >= 1");
}

bool BoundReport::any_violated() const {
    return std::any_of(records.begin(), records.end(),
                       [](const BoundRecord& r) { return r.verdict == Verdict::violated; });
}

bool BoundReport::any_hypothesis_violated() const {
    return std::any_of(records.begin(), records.end(), [](const BoundRecord& r) {
        return r.verdict == Verdict::hypothesis_violated;
    });
}

}  // namespace tailbound
