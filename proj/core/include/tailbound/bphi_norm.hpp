#pragma once

#include <optional>
#include <vector>

#include "tailbound/mgf.hpp"
#include "tailbound/phi.hpp"

namespace tailbound {

// ||xi||B(phi): minimal tau with E exp(+-lambda xi) <= exp(phi(lambda tau)).
// +infinity marker when no finite tau satisfies the defining inequality.
struct BphiNormResult {
    double tau = 0.0;
    double sup_achieved_near = 0.0;      // lambda at which the sup is (about) attained
    double zero_limit_component = 0.0;   // sqrt(Var / phi''(0)), the lambda -> 0 floor
    bool lower_estimate_only = false;    // empirical models underestimate far tails
};

struct GridSpec {
    double lo = 1e-3;
    double hi = 50.0;
    int points = 2000;
    bool log_spaced = false;
};

struct StrictSubgaussianResult {
    bool strictly_subgaussian = true;
    std::optional<double> witness_lambda;  // grid point violating the envelope
};

// The symmetrized log-MGF of the model itself, as a generator. The model has
// unit norm in B(phi[xi]). Rejects non-centered models and empirical models
// with fewer than 100 samples.
PhiFunction natural_function(const MgfModel& model);

struct BphiNormOptions {
    int points_per_decade = 2048;
    double unbounded_lambda_lo = 1e-4;
    double unbounded_lambda_hi = 1e3;
};

BphiNormResult bphi_norm(const MgfModel& model, const PhiFunction& phi,
                         const BphiNormOptions& opts = {});

// exp(-nu(x / tau)); 0 when the conjugate diverges.
double tail_bound_from_norm(const PhiFunction& phi, double tau, double x);

// sqrt(sum of squares) for independent subgaussian summands.
double subgaussian_sum_norm(const std::vector<double>& norms);

// Checks E exp(+-lambda xi) <= exp(0.5 sigma2 lambda^2) over the grid;
// sigma2 must match the model variance (1e-6 for analytic kinds).
StrictSubgaussianResult is_strictly_subgaussian(const MgfModel& model, double sigma2,
                                                const GridSpec& grid);

}  // namespace tailbound
