#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "tailbound/mgf.hpp"
#include "tailbound/mv_mgf.hpp"

namespace tailbound {

// Concrete centered random vectors the oracle can draw from.
struct DistributionSpec {
    enum class Kind { gaussian, iid_rademacher, iid_scaled, mixture };
    enum class Base { gaussian, rademacher };

    Kind kind = Kind::gaussian;
    int d = 0;
    Eigen::MatrixXd cov;                    // gaussian
    Base base = Base::gaussian;             // iid_scaled
    std::vector<double> scales;             // iid_scaled
    std::vector<DistributionSpec> components;  // mixture
    std::vector<double> weights;               // mixture

    static DistributionSpec gaussian(Eigen::MatrixXd cov);
    static DistributionSpec iid_rademacher(int d);
    static DistributionSpec iid_scaled(Base base, std::vector<double> scales);
    static DistributionSpec mixture(std::vector<DistributionSpec> components,
                                    std::vector<double> weights);

    void validate() const;

    // Marginal log-MGF model of coordinate i (exact, analytic).
    MgfModel marginal_model(int i) const;
    // Exact joint log-MGF model.
    MultivariateMgf joint_model() const;
};

struct SampleOptions {
    std::size_t chunk_size = 65536;
    // 0 = use TAILBOUND_THREADS or hardware concurrency.
    unsigned threads = 0;
};

// Deterministic given (spec, n, seed): row k of the result never depends on
// thread count. Gaussian rows are drawn via a symmetric-eigenvalue
// factorization of the covariance (rejects eigenvalues below -1e-10 * scale).
Eigen::MatrixXd sample_vector(const DistributionSpec& spec, std::size_t n, std::uint64_t seed,
                              const SampleOptions& opts = {});

}  // namespace tailbound
