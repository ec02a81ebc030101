#include "tailbound/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tailbound/bphi_norm.hpp"
#include "tailbound/max_tail.hpp"
#include "tailbound/min_tail.hpp"
#include "tailbound/oracle.hpp"

namespace tailbound {

namespace {

using nlohmann::json;

// All floats are serialized with 17 significant digits so that re-parsing
// reproduces the exact double.
std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double require_positive_number(const json& j, const char* field) {
    if (!j.is_number()) throw ConfigError(std::string("config: ") + field + " must be a number");
    return j.get<double>();
}

DistributionSpec parse_distribution(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("config: distribution needs a kind");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
        const auto& rows = j.at("cov");
        if (!rows.is_array() || rows.empty()) {
            throw ConfigError("config: distribution.cov must be a nonempty matrix");
        }
        const int d = int(rows.size());
        Eigen::MatrixXd cov(d, d);
        for (int r = 0; r < d; ++r) {
            const auto& row = rows.at(std::size_t(r));
            if (!row.is_array() || int(row.size()) != d) {
                throw ConfigError("config: distribution.cov must be square");
            }
            for (int c = 0; c < d; ++c) cov(r, c) = row.at(std::size_t(c)).get<double>();
        }
        return DistributionSpec::gaussian(std::move(cov));
    }
    if (kind == "iid-rademacher") {
        return DistributionSpec::iid_rademacher(j.at("d").get<int>());
    }
    if (kind == "iid-scaled") {
        const std::string base = j.at("base").get<std::string>();
        if (base != "gaussian" && base != "rademacher") {
            throw ConfigError("config: distribution.base must be gaussian or rademacher");
        }
        return DistributionSpec::iid_scaled(base == "gaussian"
                                                ? DistributionSpec::Base::gaussian
                                                : DistributionSpec::Base::rademacher,
                                            j.at("scales").get<std::vector<double>>());
    }
    if (kind == "mixture") {
        std::vector<DistributionSpec> components;
        for (const auto& c : j.at("components")) components.push_back(parse_distribution(c));
        return DistributionSpec::mixture(std::move(components),
                                         j.at("weights").get<std::vector<double>>());
    }
    throw ConfigError("config: unknown distribution kind '" + kind + "'");
}

MgfModel parse_mgf_model(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("config: mgf model needs a kind");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
        return MgfModel::gaussian(require_positive_number(j.at("sigma"), "model.sigma"));
    }
    if (kind == "rademacher") return MgfModel::rademacher();
    throw ConfigError("config: unknown mgf model kind '" + kind + "'");
}

PhiDescriptor parse_phi(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("config: phi needs a kind");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "quadratic") {
        PhiDescriptor d = PhiDescriptor::quadratic();
        if (j.contains("lambda0")) d.lambda0 = j.at("lambda0").get<double>();
        return d;
    }
    if (kind == "power") {
        PhiDescriptor d = PhiDescriptor::power(j.at("m").get<double>());
        if (j.contains("eta")) d.eta = j.at("eta").get<double>();
        if (j.contains("lambda0")) d.lambda0 = j.at("lambda0").get<double>();
        return d;
    }
    if (kind == "tabulated") {
        return PhiDescriptor::tabulated(j.at("lambda").get<std::vector<double>>(),
                                        j.at("phi").get<std::vector<double>>());
    }
    if (kind == "natural") {
        return PhiDescriptor::natural(parse_mgf_model(j.at("model")));
    }
    throw ConfigError("config: unknown phi kind '" + kind + "'");
}

std::vector<double> parse_u_grid(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_object()) {
        const double from = j.at("from").get<double>();
        const double to = j.at("to").get<double>();
        const double step = j.at("step").get<double>();
        if (!(step > 0.0) || !(to >= from)) {
            throw ConfigError("config: u_grid range must have positive step and to >= from");
        }
        const int count = int(std::floor((to - from) / step + 1e-9)) + 1;
        std::vector<double> grid;
        grid.reserve(std::size_t(count));
        for (int k = 0; k < count; ++k) grid.push_back(from + step * double(k));
        return grid;
    }
    throw ConfigError("config: u_grid must be an array or a {from,to,step} range");
}

}  // namespace

ScenarioConfig load_scenario(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("config: cannot open " + config_path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(config_path.string() + ": " + e.what());
    }
    try {
        if (!j.contains("schema") || j.at("schema").get<int>() != 1) {
            throw ConfigError("config: schema field must be present and equal to 1");
        }
        ScenarioConfig cfg;
        cfg.name = j.at("name").get<std::string>();
        if (cfg.name.find('/') != std::string::npos || cfg.name.find('\\') != std::string::npos) {
            throw ConfigError("config: name must not contain path separators");
        }
        cfg.distribution = parse_distribution(j.at("distribution"));
        cfg.phi = parse_phi(j.at("phi"));
        cfg.u_grid = parse_u_grid(j.at("u_grid"));
        if (j.contains("betas")) cfg.betas = j.at("betas").get<std::vector<double>>();
        if (j.contains("deltas")) cfg.deltas = j.at("deltas").get<std::vector<double>>();
        for (const auto& b : j.at("bounds")) {
            const std::string name = b.get<std::string>();
            const auto kind = bound_kind_from_string(name);
            if (!kind) throw ConfigError("config: unknown bound '" + name + "'");
            cfg.bounds.push_back(*kind);
        }
        cfg.samples = j.value("samples", std::size_t{1'000'000});
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.allow_small_u = j.value("allow_small_u", false);
        cfg.ordered_pairs = j.value("ordered_pairs", false);
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(config_path.string() + ": " + e.what());
    }
}

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void append_quoted(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

}  // namespace

void write_report_json(const BoundReport& report, const std::filesystem::path& path) {
    std::string out;
    out.reserve(4096 + report.records.size() * 220);
    out += "{\n";
    out += "  \"schema\": " + std::to_string(report.schema) + ",\n";
    out += "  \"name\": ";
    append_quoted(out, report.name);
    out += ",\n  \"metadata\": {\n";
    out += "    \"library_version\": ";
    append_quoted(out, report.library_version);
    out += ",\n    \"seed\": " + std::to_string(report.seed);
    out += ",\n    \"samples\": " + std::to_string(report.samples);
    out += ",\n    \"pair_sum_convention\": ";
    append_quoted(out, report.pair_sum_convention);
    out += ",\n    \"log_mgf_amendment\": ";
    out += report.log_mgf_amendment ? "true" : "false";
    out += ",\n    \"orthant_restricted\": ";
    out += report.orthant_restricted ? "true" : "false";
    out += ",\n    \"scope_warning\": ";
    out += report.scope_warning ? "true" : "false";
    out += ",\n    \"verdict_slack\": " + fmt_double(report.verdict_slack);
    out += ",\n    \"betas\": [";
    for (std::size_t i = 0; i < report.betas.size(); ++i) {
        if (i) out += ", ";
        out += fmt_double(report.betas[i]);
    }
    out += "]";
    out += ",\n    \"deltas\": ";
    if (report.deltas.has_value()) {
        out += "[";
        for (std::size_t i = 0; i < report.deltas->size(); ++i) {
            if (i) out += ", ";
            out += fmt_double((*report.deltas)[i]);
        }
        out += "]";
    } else {
        out += "null";
    }
    out += "\n  },\n  \"records\": [\n";
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const BoundRecord& r = report.records[i];
        out += "    {\"u\": " + fmt_double(r.u);
        out += ", \"bound\": ";
        append_quoted(out, to_string(r.bound));
        out += ", \"value\": " + fmt_double(r.value);
        out += ", \"empirical\": " + fmt_double(r.empirical);
        out += ", \"stderr\": " + fmt_double(r.stderr_);
        out += ", \"verdict\": ";
        append_quoted(out, to_string(r.verdict));
        out += ", \"gap_ratio\": ";
        out += std::isfinite(r.gap_ratio) ? fmt_double(r.gap_ratio) : std::string("null");
        out += "}";
        if (i + 1 < report.records.size()) out += ",";
        out += "\n";
    }
    out += "  ]\n}\n";
    atomic_write(path, out);
}

BoundReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j = json::parse(in);
    BoundReport report;
    report.schema = j.at("schema").get<int>();
    report.name = j.at("name").get<std::string>();
    const json& meta = j.at("metadata");
    report.library_version = meta.at("library_version").get<std::string>();
    report.seed = meta.at("seed").get<std::uint64_t>();
    report.samples = meta.at("samples").get<std::size_t>();
    report.pair_sum_convention = meta.at("pair_sum_convention").get<std::string>();
    report.log_mgf_amendment = meta.at("log_mgf_amendment").get<bool>();
    report.orthant_restricted = meta.at("orthant_restricted").get<bool>();
    report.scope_warning = meta.at("scope_warning").get<bool>();
    report.verdict_slack = meta.at("verdict_slack").get<double>();
    report.betas = meta.at("betas").get<std::vector<double>>();
    if (!meta.at("deltas").is_null()) {
        report.deltas = meta.at("deltas").get<std::vector<double>>();
    }
    for (const auto& rj : j.at("records")) {
        BoundRecord r;
        r.u = rj.at("u").get<double>();
        const auto kind = bound_kind_from_string(rj.at("bound").get<std::string>());
        if (!kind) throw std::runtime_error("report: unknown bound kind");
        r.bound = *kind;
        r.value = rj.at("value").get<double>();
        r.empirical = rj.at("empirical").get<double>();
        r.stderr_ = rj.at("stderr").get<double>();
        const std::string verdict = rj.at("verdict").get<std::string>();
        if (verdict == "holds") {
            r.verdict = Verdict::holds;
        } else if (verdict == "violated") {
            r.verdict = Verdict::violated;
        } else if (verdict == "hypothesis_violated") {
            r.verdict = Verdict::hypothesis_violated;
        } else {
            r.verdict = Verdict::not_applicable;
        }
        r.gap_ratio = rj.at("gap_ratio").is_null()
                          ? std::numeric_limits<double>::infinity()
                          : rj.at("gap_ratio").get<double>();
        report.records.push_back(r);
    }
    return report;
}

void write_curve_csv(const BoundReport& report, const std::filesystem::path& path) {
    std::string out = "u,bound_name,bound,empirical,stderr\n";
    for (const BoundRecord& r : report.records) {
        out += fmt_double(r.u);
        out += ',';
        out += to_string(r.bound);
        out += ',';
        out += fmt_double(r.value);
        out += ',';
        out += fmt_double(r.empirical);
        out += ',';
        out += fmt_double(r.stderr_);
        out += '\n';
    }
    atomic_write(path, out);
}

RunResult run_scenario(const std::filesystem::path& config_path, const RunOverrides& overrides) {
    ScenarioConfig cfg = load_scenario(config_path);
    if (overrides.samples.has_value()) cfg.samples = *overrides.samples;
    if (overrides.seed.has_value()) cfg.seed = *overrides.seed;
    cfg.allow_small_u = cfg.allow_small_u || overrides.allow_small_u;
    cfg.validate();

    BoundReport report = validate_bounds(cfg);

    std::filesystem::create_directories(overrides.out_dir);
    RunResult result;
    result.report_path = overrides.out_dir / (cfg.name + "_report.json");
    result.curve_path = overrides.out_dir / (cfg.name + "_curve.csv");
    write_report_json(report, result.report_path);
    write_curve_csv(report, result.curve_path);
    result.report = std::move(report);
    return result;
}

std::filesystem::path emit_curve(const std::filesystem::path& config_path,
                                 const std::vector<BoundKind>& bounds,
                                 const std::filesystem::path& out_dir) {
    ScenarioConfig cfg = load_scenario(config_path);
    if (!bounds.empty()) cfg.bounds = bounds;
    if (cfg.bounds.empty()) throw ConfigError("curve: bound subset must be nonempty");
    cfg.validate();

    const PhiFunction phi = build_phi(cfg.phi);
    const DistributionSpec& spec = cfg.distribution;

    std::vector<double> betas;
    if (cfg.betas.has_value()) {
        betas = *cfg.betas;
    } else {
        for (int i = 0; i < spec.d; ++i) {
            const BphiNormResult r = bphi_norm(spec.marginal_model(i), phi);
            if (!std::isfinite(r.tau)) {
                throw ConfigError("curve: coordinate " + std::to_string(i) +
                                  " has no finite B(phi) norm under the configured phi");
            }
            betas.push_back(r.tau);
        }
    }

    const bool needs_max = std::any_of(cfg.bounds.begin(), cfg.bounds.end(), [](BoundKind b) {
        return b == BoundKind::max_upper_full || b == BoundKind::max_upper_two_term ||
               b == BoundKind::max_lower;
    });
    const bool needs_min = std::any_of(cfg.bounds.begin(), cfg.bounds.end(), [](BoundKind b) {
        return b == BoundKind::min_upper || b == BoundKind::combined;
    });
    const bool needs_zeta = std::any_of(cfg.bounds.begin(), cfg.bounds.end(), [](BoundKind b) {
        return b == BoundKind::zeta || b == BoundKind::combined;
    });

    std::optional<MaxTailInputs> max_inputs;
    if (needs_max) max_inputs.emplace(phi, betas, cfg.deltas);
    std::optional<MultivariateMgf> joint;
    if (needs_min) joint.emplace(spec.joint_model());

    std::optional<BivariateSubgaussianParams> zeta_params;
    if (needs_zeta) {
        if (spec.kind == DistributionSpec::Kind::gaussian) {
            const double s1 = std::sqrt(spec.cov(0, 0)), s2 = std::sqrt(spec.cov(1, 1));
            const double rho = spec.cov(0, 1) / (s1 * s2);
            if (!(std::fabs(rho) < 1.0)) {
                throw ConfigError("curve: zeta requires |rho| < 1");
            }
            zeta_params.emplace(s1, s2, rho);
        } else {
            const PhiFunction phi2 = build_phi(PhiDescriptor::quadratic());
            const double s1 = bphi_norm(spec.marginal_model(0), phi2).tau;
            const double s2 = bphi_norm(spec.marginal_model(1), phi2).tau;
            if (!std::isfinite(s1) || !std::isfinite(s2)) {
                throw ConfigError("curve: marginals have no finite Sub norm");
            }
            zeta_params.emplace(s1, s2, 0.0);
        }
    }

    BoundOptions bound_opts;
    bound_opts.allow_small_u = cfg.allow_small_u;
    bound_opts.ordered_pairs = cfg.ordered_pairs;

    std::string out = "u,bound_name,bound\n";
    for (double u : cfg.u_grid) {
        for (BoundKind kind : cfg.bounds) {
            double value = 0.0;
            switch (kind) {
                case BoundKind::max_upper_full:
                    value = max_tail_upper_full(*max_inputs, u, bound_opts);
                    break;
                case BoundKind::max_upper_two_term:
                    value = max_tail_upper_two_term(*max_inputs, u, bound_opts);
                    break;
                case BoundKind::max_lower:
                    value = max_tail_lower(*max_inputs, u, bound_opts);
                    break;
                case BoundKind::min_upper:
                    value = min_tail_upper(*joint, u, cfg.allow_small_u);
                    break;
                case BoundKind::zeta:
                    value = zeta_bivariate(*zeta_params, u, cfg.allow_small_u);
                    break;
                case BoundKind::combined:
                    value = min_tail_combined_bivariate(*zeta_params, *joint, u, cfg.allow_small_u);
                    break;
            }
            out += fmt_double(u);
            out += ',';
            out += to_string(kind);
            out += ',';
            out += fmt_double(value);
            out += '\n';
        }
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path path = out_dir / (cfg.name + "_bounds.csv");
    atomic_write(path, out);
    return path;
}

}  // namespace tailbound
