#include "tailbound/min_tail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tailbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Objective {
    const MultivariateMgf& model;
    const Eigen::VectorXd& x;

    double operator()(const Eigen::VectorXd& lambda) const {
        const double lm = model.log_mgf(lambda);
        if (!std::isfinite(lm)) return -kInf;
        return x.dot(lambda) - lm;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& lambda) const {
        if (const Eigen::MatrixXd* cov = model.covariance()) {
            return x - *cov * lambda;
        }
        Eigen::VectorXd g(lambda.size());
        for (int i = 0; i < lambda.size(); ++i) {
            const double h = 1e-6 * std::max(1.0, std::fabs(lambda[i]));
            Eigen::VectorXd lp = lambda, lm_ = lambda;
            lp[i] += h;
            lm_[i] -= h;
            double fp = (*this)(lp), fm = (*this)(lm_);
            if (!std::isfinite(fp) || !std::isfinite(fm)) {
                // One-sided fallback near the finiteness boundary.
                const double f0 = (*this)(lambda);
                if (std::isfinite(fm)) {
                    g[i] = (f0 - fm) / h;
                } else if (std::isfinite(fp)) {
                    g[i] = (fp - f0) / h;
                } else {
                    g[i] = 0.0;
                }
            } else {
                g[i] = (fp - fm) / (2.0 * h);
            }
        }
        return g;
    }
};

Eigen::VectorXd project(Eigen::VectorXd lambda, bool orthant, double ball_radius) {
    if (orthant) lambda = lambda.cwiseMax(0.0);
    if (std::isfinite(ball_radius)) {
        const double n = lambda.norm();
        if (n > ball_radius) lambda *= ball_radius / n;
    }
    return lambda;
}

struct AscentOutcome {
    double value = 0.0;
    Eigen::VectorXd argmax;
    bool converged = true;
    bool diverged = false;
};

AscentOutcome ascend(const Objective& f, Eigen::VectorXd lambda, bool orthant,
                     double ball_radius, const ConjugateOptions& opts) {
    AscentOutcome out;
    lambda = project(std::move(lambda), orthant, ball_radius);
    double value = f(lambda);
    if (!std::isfinite(value)) {
        lambda.setZero();
        value = 0.0;
    }
    double step = 1.0;
    const double grad_tol = opts.tolerance * std::max(1.0, f.x.norm());
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        Eigen::VectorXd g = f.gradient(lambda);
        if (orthant) {
            for (int i = 0; i < g.size(); ++i) {
                if (lambda[i] <= 0.0 && g[i] < 0.0) g[i] = 0.0;
            }
        }
        if (g.norm() <= grad_tol) break;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            const Eigen::VectorXd cand = project(lambda + step * g, orthant, ball_radius);
            const double cand_value = f(cand);
            if (cand_value > value + 1e-4 * g.dot(cand - lambda)) {
                lambda = cand;
                value = cand_value;
                accepted = true;
                step = std::min(step * 2.0, 1e8);
                break;
            }
            step *= 0.5;
            if (step < 1e-18) break;
        }
        if (value > opts.value_cap) {
            out.diverged = true;
            break;
        }
        if (!accepted) break;
    }
    out.value = value;
    out.argmax = std::move(lambda);
    out.converged = out.diverged || it < opts.max_iterations;
    return out;
}

}  // namespace

MvConjugateResult log_mgf_conjugate(const MultivariateMgf& model, const Eigen::VectorXd& x,
                                    const ConjugateOptions& opts) {
    const int d = model.dim();
    if (x.size() != d) throw std::invalid_argument("log_mgf_conjugate: dimension mismatch");
    if (!x.allFinite()) throw std::invalid_argument("log_mgf_conjugate: x must be finite");

    const double eps = model.epsilon();
    const double ball_radius = std::isfinite(eps) ? eps * (1.0 - 1e-9) : kInf;
    const double start_scale = std::isfinite(eps) ? 0.1 * eps : 1.0;
    const Objective f{model, x};

    // Deterministic multi-start set: coordinate axes, two diagonal scales, a
    // near-origin point, and the Gaussian closed-form seed where available.
    std::vector<Eigen::VectorXd> starts;
    for (int i = 0; i < std::min(d, 5); ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v[i] = start_scale;
        starts.push_back(std::move(v));
    }
    const Eigen::VectorXd diag = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(double(d)));
    starts.push_back(start_scale * diag);
    starts.push_back(5.0 * start_scale * diag);
    starts.push_back(1e-3 * start_scale * diag);
    if (const Eigen::MatrixXd* cov = model.covariance()) {
        const Eigen::VectorXd seed = cov->ldlt().solve(x);
        if (seed.allFinite() && (x - *cov * seed).norm() <= 1e-8 * std::max(1.0, x.norm())) {
            starts.push_back(seed);
        }
    }
    if (starts.size() > 8) starts.resize(8);

    MvConjugateResult best;
    best.value = 0.0;  // lambda = 0 is always feasible
    best.argmax = Eigen::VectorXd::Zero(d);
    bool any_diverged = false;
    for (const auto& s : starts) {
        const AscentOutcome run = ascend(f, s, opts.orthant_restricted, ball_radius, opts);
        any_diverged = any_diverged || run.diverged;
        if (run.value > best.value) {
            best.value = run.value;
            best.argmax = run.argmax;
            best.converged = run.converged;
        }
    }
    if (any_diverged) {
        best.value = kInf;
        best.converged = true;
    }
    if (std::isfinite(ball_radius) && best.argmax.norm() >= ball_radius * (1.0 - 1e-6)) {
        best.attained_at_boundary = true;
    }
    return best;
}

double orthant_tail_upper(const MultivariateMgf& model, const Eigen::VectorXd& x,
                          const ConjugateOptions& opts) {
    if (x.size() != model.dim()) throw std::invalid_argument("orthant_tail_upper: dimension mismatch");
    if ((x.array() < 0.0).any()) {
        throw std::invalid_argument("orthant_tail_upper: x must be componentwise nonnegative");
    }
    const MvConjugateResult conj = log_mgf_conjugate(model, x, opts);
    if (!std::isfinite(conj.value)) return 0.0;
    return std::min(1.0, std::exp(-conj.value));
}

double min_tail_upper(const MultivariateMgf& model, double u, bool allow_small_u,
                      const ConjugateOptions& opts) {
    if (!std::isfinite(u)) throw std::invalid_argument("min_tail_upper: u must be finite");
    if (u < 1.0 && !allow_small_u) {
        throw std::domain_error("min_tail_upper: bounds are scoped to u >= 1 "
                                "(pass allow_small_u to override)");
    }
    return orthant_tail_upper(model, Eigen::VectorXd::Constant(model.dim(), u), opts);
}

BivariateSubgaussianParams::BivariateSubgaussianParams(double sigma1_in, double sigma2_in,
                                                       double rho_in)
    : sigma1(sigma1_in), sigma2(sigma2_in), rho(rho_in) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma2)) {
        throw std::invalid_argument("BivariateSubgaussianParams: sigmas must be positive");
    }
    if (!(std::fabs(rho) < 1.0)) {
        throw std::invalid_argument("BivariateSubgaussianParams: |rho| must be < 1");
    }
}

double zeta_bivariate(const BivariateSubgaussianParams& params, double u, bool allow_small_u) {
    if (!std::isfinite(u)) throw std::invalid_argument("zeta_bivariate: u must be finite");
    if (u < 1.0 && !allow_small_u) {
        throw std::domain_error("zeta_bivariate: bounds are scoped to u >= 1 "
                                "(pass allow_small_u to override)");
    }
    const double s1 = params.sigma1, s2 = params.sigma2, rho = params.rho;
    const double exponent = u * u / (2.0 * (1.0 - rho * rho)) *
                            (s1 * s1 + s2 * s2 - 2.0 * rho * s1 * s2) / (s1 * s1 * s2 * s2);
    return std::exp(-exponent);
}

double min_tail_combined_bivariate(const BivariateSubgaussianParams& params,
                                   const MultivariateMgf& model, double u, bool allow_small_u,
                                   const ConjugateOptions& opts) {
    if (model.dim() != 2) {
        throw std::invalid_argument("min_tail_combined_bivariate: model must be bivariate");
    }
    // Spot-check that the declared envelope dominates the model log-MGF.
    const double reach = std::isfinite(model.epsilon()) ? 0.3 * model.epsilon() : 2.0;
    const double s1 = params.sigma1, s2 = params.sigma2, rho = params.rho;
    const Eigen::Vector2d dirs[3] = {
        {1.0, 0.0}, {0.0, 1.0}, {0.7071067811865476, 0.7071067811865476}};
    for (const auto& dir : dirs) {
        for (double t : {0.5, 1.0}) {
            const Eigen::VectorXd lambda = t * reach * dir;
            const double lm = model.log_mgf(lambda);
            if (!std::isfinite(lm)) continue;
            const double env = 0.5 * (s1 * s1 * lambda[0] * lambda[0] +
                                      2.0 * rho * s1 * s2 * lambda[0] * lambda[1] +
                                      s2 * s2 * lambda[1] * lambda[1]);
            if (lm > env + 1e-7 * std::max(1.0, std::fabs(env))) {
                throw std::invalid_argument(
                    "min_tail_combined_bivariate: model log-MGF exceeds the subgaussian envelope");
            }
        }
    }
    return std::min(zeta_bivariate(params, u, allow_small_u),
                    min_tail_upper(model, u, allow_small_u, opts));
}

}  // namespace tailbound
