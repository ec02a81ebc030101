#include "tailbound/max_tail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tailbound {

namespace {

void check_scope(double u, const BoundOptions& opts) {
    if (!std::isfinite(u)) throw std::invalid_argument("max_tail: u must be finite");
    if (u < 1.0 && !opts.allow_small_u) {
        throw std::domain_error("max_tail: bounds are scoped to u >= 1 "
                                "(pass allow_small_u to override)");
    }
}

double exp_neg_nu(const PhiFunction& phi, double x) {
    const ConjugateResult nu = legendre_1d(phi, x);
    if (!std::isfinite(nu.value)) return 0.0;
    return std::exp(-nu.value);
}

}  // namespace

MaxTailInputs::MaxTailInputs(const PhiFunction& phi_fn, std::vector<double> betas_in,
                             std::optional<std::vector<double>> deltas_in)
    : d(betas_in.size()), betas(std::move(betas_in)), deltas(std::move(deltas_in)), phi(&phi_fn) {
    if (d == 0) throw std::invalid_argument("MaxTailInputs: empty norm vector");
    for (double b : betas) {
        if (!(b > 0.0) || !std::isfinite(b)) {
            throw std::invalid_argument("MaxTailInputs: betas must be positive and finite");
        }
    }
    if (deltas.has_value()) {
        if (deltas->size() != d) {
            throw std::invalid_argument("MaxTailInputs: deltas/betas size mismatch");
        }
        for (std::size_t i = 0; i < d; ++i) {
            if (!((*deltas)[i] > 0.0) || (*deltas)[i] > betas[i]) {
                throw std::invalid_argument("MaxTailInputs: deltas must lie in (0, beta_i]");
            }
        }
    }
}

NormClassification classify_norms(const MaxTailInputs& inputs) {
    NormClassification c;
    c.beta_max = *std::max_element(inputs.betas.begin(), inputs.betas.end());
    for (std::size_t i = 0; i < inputs.d; ++i) {
        if (inputs.betas[i] == c.beta_max) {
            ++c.r;
        } else {
            c.R.push_back(i);
            c.beta_under = std::max(c.beta_under, inputs.betas[i]);
        }
    }
    return c;
}

double max_tail_upper_full(const MaxTailInputs& inputs, double u, const BoundOptions& opts) {
    check_scope(u, opts);
    const NormClassification c = classify_norms(inputs);
    double total = double(c.r) * exp_neg_nu(*inputs.phi, u / c.beta_max);
    for (std::size_t i : c.R) {
        total += exp_neg_nu(*inputs.phi, u / inputs.betas[i]);
    }
    return std::min(1.0, total);
}

double max_tail_upper_two_term(const MaxTailInputs& inputs, double u, const BoundOptions& opts) {
    check_scope(u, opts);
    const NormClassification c = classify_norms(inputs);
    double total = double(c.r) * exp_neg_nu(*inputs.phi, u / c.beta_max);
    if (!c.R.empty()) {
        total += double(inputs.d - c.r) * exp_neg_nu(*inputs.phi, u / c.beta_under);
    }
    return std::min(1.0, total);
}

double pairwise_joint_upper(double beta_i, double beta_j, const PhiFunction& phi, double u,
                            const BoundOptions& opts) {
    check_scope(u, opts);
    if (!(beta_i > 0.0) || !(beta_j > 0.0)) {
        throw std::invalid_argument("pairwise_joint_upper: norms must be positive");
    }
    return exp_neg_nu(phi, 2.0 * u / (beta_i + beta_j));
}

double max_tail_lower(const MaxTailInputs& inputs, double u, const BoundOptions& opts) {
    check_scope(u, opts);
    if (!inputs.deltas.has_value()) {
        throw std::invalid_argument("max_tail_lower: deltas are required");
    }
    double singles = 0.0;
    for (double delta : *inputs.deltas) {
        singles += exp_neg_nu(*inputs.phi, u / delta);
    }
    double pairs = 0.0;
    for (std::size_t i = 0; i < inputs.d; ++i) {
        for (std::size_t j = i + 1; j < inputs.d; ++j) {
            pairs += exp_neg_nu(*inputs.phi, 2.0 * u / (inputs.betas[i] + inputs.betas[j]));
        }
    }
    if (opts.ordered_pairs) pairs *= 2.0;
    return std::max(0.0, singles - pairs);
}

}  // namespace tailbound
