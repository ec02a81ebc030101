#pragma once

#include <Eigen/Dense>

#include "tailbound/mv_mgf.hpp"

namespace tailbound {

// Conjugate of the multivariate log-MGF. value may be +infinity (the
// Chernoff exponent diverges, so the bounded event has probability 0).
// When the ascent stops before reaching tolerance the result is flagged as a
// non-converged lower estimate, which still yields a valid upper tail bound.
struct MvConjugateResult {
    double value = 0.0;
    Eigen::VectorXd argmax;
    bool attained_at_boundary = false;
    bool converged = true;
};

struct ConjugateOptions {
    bool orthant_restricted = true;  // Chernoff multipliers must be >= 0
    double value_cap = 1e4;          // beyond this the supremum is reported divergent
    int max_iterations = 500;
    double tolerance = 1e-10;
};

// sup over lambda (nonnegative orthant by default, intersected with the
// finiteness ball) of (lambda, x) - log_mgf(lambda), by projected gradient
// ascent from deterministic multi-starts (coordinate axes, diagonals, and
// the Gaussian closed-form seed when available).
MvConjugateResult log_mgf_conjugate(const MultivariateMgf& model, const Eigen::VectorXd& x,
                                    const ConjugateOptions& opts = {});

// exp(-conjugate value) bounds P(xi_i >= x_i for all i), x_i >= 0.
double orthant_tail_upper(const MultivariateMgf& model, const Eigen::VectorXd& x,
                          const ConjugateOptions& opts = {});

// Orthant bound at x = (u, ..., u); bounds P(min_i xi_i > u) for u >= 1.
double min_tail_upper(const MultivariateMgf& model, double u, bool allow_small_u = false,
                      const ConjugateOptions& opts = {});

// Subgaussian envelope parameters of a centered bivariate vector:
// E exp(l1 x1 + l2 x2) <= exp(0.5 (s1^2 l1^2 + 2 rho s1 s2 l1 l2 + s2^2 l2^2)).
struct BivariateSubgaussianParams {
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;

    BivariateSubgaussianParams(double sigma1_in, double sigma2_in, double rho_in);
};

// Closed-form bivariate min-tail bound
//   exp(-u^2/(2(1-rho^2)) * (s1^2 + s2^2 - 2 rho s1 s2) / (s1^2 s2^2)).
double zeta_bivariate(const BivariateSubgaussianParams& params, double u,
                      bool allow_small_u = false);

// min(zeta, conjugate-based bound). Spot-checks that the model log-MGF stays
// below the subgaussian envelope at a few grid points; throws on mismatch.
double min_tail_combined_bivariate(const BivariateSubgaussianParams& params,
                                   const MultivariateMgf& model, double u,
                                   bool allow_small_u = false,
                                   const ConjugateOptions& opts = {});

}  // namespace tailbound
