#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tailbound/phi.hpp"

namespace tailbound {

// Per-coordinate B(phi) norms beta_i, optional lower-tail parameters
// delta_i in (0, beta_i], and the shared generator.
struct MaxTailInputs {
    std::size_t d = 0;
    std::vector<double> betas;
    std::optional<std::vector<double>> deltas;
    const PhiFunction* phi = nullptr;

    MaxTailInputs(const PhiFunction& phi_fn, std::vector<double> betas_in,
                  std::optional<std::vector<double>> deltas_in = std::nullopt);
};

// beta = max beta_i, its multiplicity r, the strictly-smaller index set R,
// and the runner-up level beta_under (0 when all norms tie).
struct NormClassification {
    double beta_max = 0.0;
    std::size_t r = 0;
    std::vector<std::size_t> R;
    double beta_under = 0.0;
};

struct BoundOptions {
    bool allow_small_u = false;   // evaluate u < 1 anyway (scope override)
    bool ordered_pairs = false;   // double the subtracted pair sum
};

NormClassification classify_norms(const MaxTailInputs& inputs);

// min(1, r e^{-nu(u/beta)} + sum_{i in R} e^{-nu(u/beta_i)})
double max_tail_upper_full(const MaxTailInputs& inputs, double u,
                           const BoundOptions& opts = {});

// min(1, r e^{-nu(u/beta)} + (d-r) e^{-nu(u/beta_under)})
double max_tail_upper_two_term(const MaxTailInputs& inputs, double u,
                               const BoundOptions& opts = {});

// exp(-nu(2u / (beta_i + beta_j))), via the triangle inequality for the
// pair sum.
double pairwise_joint_upper(double beta_i, double beta_j, const PhiFunction& phi,
                            double u, const BoundOptions& opts = {});

// max(0, sum_i e^{-nu(u/delta_i)} - sum_{i<j} e^{-nu(2u/(beta_i+beta_j))}).
// Requires deltas. The pair sum runs over unordered pairs by default.
double max_tail_lower(const MaxTailInputs& inputs, double u,
                      const BoundOptions& opts = {});

}  // namespace tailbound
