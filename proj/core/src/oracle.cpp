#include "tailbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tailbound/bphi_norm.hpp"
#include "tailbound/max_tail.hpp"
#include "tailbound/min_tail.hpp"
#include "tailbound/report_io.hpp"

namespace tailbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

EmpiricalTailEstimate make_estimate(std::size_t hits, std::size_t n) {
    EmpiricalTailEstimate e;
    e.n = n;
    e.estimate = double(hits) / double(n);
    e.stderr_ = std::sqrt(e.estimate * (1.0 - e.estimate) / double(n));
    return e;
}

}  // namespace

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865476);
}

EmpiricalTailEstimate empirical_tail(const Eigen::MatrixXd& samples, TailMode mode, double u,
                                     const Eigen::VectorXd* joint_x) {
    const std::size_t n = std::size_t(samples.rows());
    if (n == 0) throw std::invalid_argument("empirical_tail: empty sample matrix");
    std::size_t hits = 0;
    switch (mode) {
        case TailMode::max:
            for (Eigen::Index k = 0; k < samples.rows(); ++k) {
                if (samples.row(k).maxCoeff() > u) ++hits;
            }
            break;
        case TailMode::min:
            for (Eigen::Index k = 0; k < samples.rows(); ++k) {
                if (samples.row(k).minCoeff() > u) ++hits;
            }
            break;
        case TailMode::joint: {
            if (joint_x == nullptr || joint_x->size() != samples.cols()) {
                throw std::invalid_argument("empirical_tail: joint mode needs a level vector");
            }
            for (Eigen::Index k = 0; k < samples.rows(); ++k) {
                if ((samples.row(k).transpose().array() >= joint_x->array()).all()) ++hits;
            }
            break;
        }
    }
    return make_estimate(hits, n);
}

double empirical_mgf(const Eigen::VectorXd& samples, double lambda) {
    if (samples.size() == 0) throw std::invalid_argument("empirical_mgf: empty sample");
    const double max_abs = samples.cwiseAbs().maxCoeff();
    if (std::fabs(lambda) * max_abs > 690.0) return kInf;
    return (samples.array() * lambda).exp().mean();
}

double brute_force_conjugate(const MultivariateMgf& model, const Eigen::VectorXd& x,
                             const ConjugateGrid& grid) {
    const int d = model.dim();
    if (d > 3) throw std::invalid_argument("brute_force_conjugate: dense oracle only covers d <= 3");
    if (x.size() != d) throw std::invalid_argument("brute_force_conjugate: dimension mismatch");
    if (!(grid.hi > 0.0) || !(grid.step > 0.0)) {
        throw std::invalid_argument("brute_force_conjugate: grid must be positive");
    }
    const std::size_t per_axis = std::size_t(std::floor(grid.hi / grid.step)) + 1;
    double total = 1.0;
    for (int i = 0; i < d; ++i) total *= double(per_axis);
    if (total > 1e7) throw std::invalid_argument("brute_force_conjugate: grid exceeds 1e7 points");

    double best = 0.0;
    Eigen::VectorXd lambda(d);
    std::vector<std::size_t> idx(std::size_t(d), 0);
    while (true) {
        for (int i = 0; i < d; ++i) lambda[i] = double(idx[std::size_t(i)]) * grid.step;
        const double lm = model.log_mgf(lambda);
        if (std::isfinite(lm)) best = std::max(best, x.dot(lambda) - lm);
        int axis = 0;
        for (; axis < d; ++axis) {
            if (++idx[std::size_t(axis)] < per_axis) break;
            idx[std::size_t(axis)] = 0;
        }
        if (axis == d) break;
    }
    return best;
}

namespace {

// Per-coordinate strict tail P(xi_i > u) from the sample matrix.
EmpiricalTailEstimate coordinate_tail(const Eigen::MatrixXd& samples, int i, double u) {
    std::size_t hits = 0;
    for (Eigen::Index k = 0; k < samples.rows(); ++k) {
        if (samples(k, i) > u) ++hits;
    }
    return make_estimate(hits, std::size_t(samples.rows()));
}

struct ZetaDerivation {
    bool available = false;
    double sigma1 = 0.0, sigma2 = 0.0, rho = 0.0;
};

ZetaDerivation derive_zeta_params(const DistributionSpec& spec, const PhiFunction& phi2) {
    ZetaDerivation z;
    if (spec.d != 2) return z;
    if (spec.kind == DistributionSpec::Kind::gaussian) {
        const double v1 = spec.cov(0, 0), v2 = spec.cov(1, 1);
        if (!(v1 > 0.0) || !(v2 > 0.0)) return z;
        z.sigma1 = std::sqrt(v1);
        z.sigma2 = std::sqrt(v2);
        z.rho = spec.cov(0, 1) / (z.sigma1 * z.sigma2);
        z.available = std::fabs(z.rho) < 1.0;
        return z;
    }
    // Independent coordinates: subgaussian envelope with rho = 0 and the
    // per-coordinate Sub norms as sigmas.
    const BphiNormResult n1 = bphi_norm(spec.marginal_model(0), phi2);
    const BphiNormResult n2 = bphi_norm(spec.marginal_model(1), phi2);
    if (!std::isfinite(n1.tau) || !std::isfinite(n2.tau)) return z;
    z.sigma1 = n1.tau;
    z.sigma2 = n2.tau;
    z.rho = 0.0;
    z.available = true;
    return z;
}

}  // namespace

BoundReport validate_bounds(const ScenarioConfig& config) {
    config.validate();
    const PhiFunction phi = build_phi(config.phi);
    const DistributionSpec& spec = config.distribution;

    BoundReport report;
    report.name = config.name;
    report.seed = config.seed;
    report.samples = config.samples;
    report.pair_sum_convention = config.ordered_pairs ? "ordered" : "unordered";
    report.library_version = kLibraryVersion;
    report.deltas = config.deltas;

    const Eigen::MatrixXd samples = sample_vector(spec, config.samples, config.seed);

    // Norms: explicit overrides win, otherwise computed from the marginals.
    std::vector<double> betas;
    if (config.betas.has_value()) {
        betas = *config.betas;
    } else {
        for (int i = 0; i < spec.d; ++i) {
            const BphiNormResult r = bphi_norm(spec.marginal_model(i), phi);
            if (!std::isfinite(r.tau)) {
                throw ConfigError("coordinate " + std::to_string(i) +
                                  " has no finite B(phi) norm under the configured phi");
            }
            betas.push_back(r.tau);
        }
    }
    report.betas = betas;

    const bool needs_max =
        std::any_of(config.bounds.begin(), config.bounds.end(), [](BoundKind b) {
            return b == BoundKind::max_upper_full || b == BoundKind::max_upper_two_term ||
                   b == BoundKind::max_lower;
        });
    const bool needs_min =
        std::any_of(config.bounds.begin(), config.bounds.end(), [](BoundKind b) {
            return b == BoundKind::min_upper || b == BoundKind::combined;
        });
    const bool needs_zeta =
        std::any_of(config.bounds.begin(), config.bounds.end(), [](BoundKind b) {
            return b == BoundKind::zeta || b == BoundKind::combined;
        });

    std::optional<MaxTailInputs> max_inputs;
    if (needs_max) max_inputs.emplace(phi, betas, config.deltas);

    std::optional<MultivariateMgf> joint;
    if (needs_min) joint.emplace(spec.joint_model());

    ZetaDerivation zeta_params;
    if (needs_zeta) {
        const PhiFunction phi2 = build_phi(PhiDescriptor::quadratic());
        zeta_params = derive_zeta_params(spec, phi2);
    }

    BoundOptions bound_opts;
    bound_opts.allow_small_u = config.allow_small_u;
    bound_opts.ordered_pairs = config.ordered_pairs;

    const double slack = report.verdict_slack;

    for (double u : config.u_grid) {
        if (u < 1.0) report.scope_warning = true;
        const EmpiricalTailEstimate max_emp =
            needs_max ? empirical_tail(samples, TailMode::max, u) : EmpiricalTailEstimate{};
        const EmpiricalTailEstimate min_emp =
            (needs_min || needs_zeta) ? empirical_tail(samples, TailMode::min, u)
                                      : EmpiricalTailEstimate{};

        for (BoundKind kind : config.bounds) {
            BoundRecord rec;
            rec.u = u;
            rec.bound = kind;
            switch (kind) {
                case BoundKind::max_upper_full:
                case BoundKind::max_upper_two_term: {
                    rec.value = kind == BoundKind::max_upper_full
                                    ? max_tail_upper_full(*max_inputs, u, bound_opts)
                                    : max_tail_upper_two_term(*max_inputs, u, bound_opts);
                    rec.empirical = max_emp.estimate;
                    rec.stderr_ = max_emp.stderr_;
                    rec.verdict = rec.empirical <= rec.value + slack * rec.stderr_
                                      ? Verdict::holds
                                      : Verdict::violated;
                    break;
                }
                case BoundKind::max_lower: {
                    rec.value = max_tail_lower(*max_inputs, u, bound_opts);
                    rec.empirical = max_emp.estimate;
                    rec.stderr_ = max_emp.stderr_;
                    // Eq-(4.1)-style hypothesis: each per-coordinate tail must
                    // dominate its exp(-nu(u/delta_i)) floor, up to noise.
                    bool hypothesis_ok = true;
                    for (int i = 0; i < spec.d && hypothesis_ok; ++i) {
                        const ConjugateResult nu = legendre_1d(phi, u / (*config.deltas)[std::size_t(i)]);
                        const double floor_i = std::isfinite(nu.value) ? std::exp(-nu.value) : 0.0;
                        const EmpiricalTailEstimate ci = coordinate_tail(samples, i, u);
                        if (ci.estimate + slack * ci.stderr_ < floor_i) hypothesis_ok = false;
                    }
                    if (!hypothesis_ok) {
                        rec.verdict = Verdict::hypothesis_violated;
                    } else {
                        rec.verdict = rec.value <= rec.empirical + slack * rec.stderr_
                                          ? Verdict::holds
                                          : Verdict::violated;
                    }
                    break;
                }
                case BoundKind::min_upper: {
                    rec.value = min_tail_upper(*joint, u, config.allow_small_u);
                    rec.empirical = min_emp.estimate;
                    rec.stderr_ = min_emp.stderr_;
                    rec.verdict = rec.empirical <= rec.value + slack * rec.stderr_
                                      ? Verdict::holds
                                      : Verdict::violated;
                    break;
                }
                case BoundKind::zeta:
                case BoundKind::combined: {
                    rec.empirical = min_emp.estimate;
                    rec.stderr_ = min_emp.stderr_;
                    if (!zeta_params.available) {
                        rec.value = 1.0;
                        rec.verdict = Verdict::not_applicable;
                        break;
                    }
                    const BivariateSubgaussianParams params(zeta_params.sigma1, zeta_params.sigma2,
                                                            zeta_params.rho);
                    rec.value = kind == BoundKind::zeta
                                    ? zeta_bivariate(params, u, config.allow_small_u)
                                    : min_tail_combined_bivariate(params, *joint, u,
                                                                  config.allow_small_u);
                    rec.verdict = rec.empirical <= rec.value + slack * rec.stderr_
                                      ? Verdict::holds
                                      : Verdict::violated;
                    break;
                }
            }
            rec.gap_ratio = rec.empirical > 0.0 ? rec.value / rec.empirical : kInf;
            report.records.push_back(rec);
        }
    }
    return report;
}

}  // namespace tailbound
