#include "tailbound/sampler.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "tailbound/rng.hpp"

namespace tailbound {

namespace {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TAILBOUND_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return unsigned(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Draws one row into `row`; implementations must consume the stream
// identically regardless of threading.
using RowSampler = std::function<void(RandomStream&, double*)>;

RowSampler make_row_sampler(const DistributionSpec& spec) {
    const int d = spec.d;
    switch (spec.kind) {
        case DistributionSpec::Kind::gaussian: {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.cov);
            const double max_eig = es.eigenvalues().maxCoeff();
            if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, max_eig)) {
                throw std::invalid_argument("sample_vector: covariance is not PSD");
            }
            const Eigen::MatrixXd factor =
                es.eigenvectors() *
                es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
            return [factor, d](RandomStream& rng, double* row) {
                Eigen::VectorXd z(d);
                for (int i = 0; i < d; ++i) z[i] = rng.normal();
                Eigen::Map<Eigen::VectorXd>(row, d) = factor * z;
            };
        }
        case DistributionSpec::Kind::iid_rademacher:
            return [d](RandomStream& rng, double* row) {
                for (int i = 0; i < d; ++i) row[i] = rng.rademacher();
            };
        case DistributionSpec::Kind::iid_scaled: {
            const std::vector<double> scales = spec.scales;
            const bool gaussian_base = spec.base == DistributionSpec::Base::gaussian;
            return [scales, d, gaussian_base](RandomStream& rng, double* row) {
                for (int i = 0; i < d; ++i) {
                    const double z = gaussian_base ? rng.normal() : rng.rademacher();
                    row[i] = scales[std::size_t(i)] * z;
                }
            };
        }
        case DistributionSpec::Kind::mixture: {
            std::vector<RowSampler> parts;
            parts.reserve(spec.components.size());
            for (const auto& c : spec.components) parts.push_back(make_row_sampler(c));
            std::vector<double> cumulative;
            double acc = 0.0;
            for (double w : spec.weights) {
                acc += w;
                cumulative.push_back(acc);
            }
            cumulative.back() = 1.0 + 1e-15;  // guard against rounding at the top
            return [parts, cumulative](RandomStream& rng, double* row) {
                const double pick = rng.uniform();
                std::size_t c = 0;
                while (c + 1 < cumulative.size() && pick > cumulative[c]) ++c;
                parts[c](rng, row);
            };
        }
    }
    throw std::logic_error("sample_vector: unreachable");
}

}  // namespace

DistributionSpec DistributionSpec::gaussian(Eigen::MatrixXd cov) {
    DistributionSpec s;
    s.kind = Kind::gaussian;
    s.d = int(cov.rows());
    s.cov = std::move(cov);
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::iid_rademacher(int d) {
    DistributionSpec s;
    s.kind = Kind::iid_rademacher;
    s.d = d;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::iid_scaled(Base base, std::vector<double> scales) {
    DistributionSpec s;
    s.kind = Kind::iid_scaled;
    s.base = base;
    s.d = int(scales.size());
    s.scales = std::move(scales);
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::mixture(std::vector<DistributionSpec> components,
                                           std::vector<double> weights) {
    DistributionSpec s;
    s.kind = Kind::mixture;
    s.d = components.empty() ? 0 : components.front().d;
    s.components = std::move(components);
    s.weights = std::move(weights);
    s.validate();
    return s;
}

void DistributionSpec::validate() const {
    if (d < 1) throw std::invalid_argument("DistributionSpec: d must be >= 1");
    switch (kind) {
        case Kind::gaussian: {
            if (cov.rows() != d || cov.cols() != d) {
                throw std::invalid_argument("DistributionSpec: covariance must be d x d");
            }
            if (!cov.isApprox(cov.transpose(), 1e-12)) {
                throw std::invalid_argument("DistributionSpec: covariance must be symmetric");
            }
            break;
        }
        case Kind::iid_rademacher:
            break;
        case Kind::iid_scaled: {
            if (int(scales.size()) != d) {
                throw std::invalid_argument("DistributionSpec: scales must have length d");
            }
            for (double s : scales) {
                if (s == 0.0 || !std::isfinite(s)) {
                    throw std::invalid_argument("DistributionSpec: scales must be nonzero finite");
                }
            }
            break;
        }
        case Kind::mixture: {
            if (components.empty() || components.size() != weights.size()) {
                throw std::invalid_argument("DistributionSpec: mixture components/weights mismatch");
            }
            double wsum = 0.0;
            for (double w : weights) {
                if (w < 0.0) throw std::invalid_argument("DistributionSpec: negative mixture weight");
                wsum += w;
            }
            if (std::fabs(wsum - 1.0) > 1e-12) {
                throw std::invalid_argument("DistributionSpec: mixture weights must sum to 1");
            }
            for (const auto& c : components) {
                c.validate();
                if (c.d != d) {
                    throw std::invalid_argument("DistributionSpec: mixture dimension mismatch");
                }
            }
            break;
        }
    }
}

MgfModel DistributionSpec::marginal_model(int i) const {
    if (i < 0 || i >= d) throw std::invalid_argument("marginal_model: index out of range");
    switch (kind) {
        case Kind::gaussian: {
            const double v = cov(i, i);
            if (!(v > 0.0)) {
                throw std::invalid_argument("marginal_model: zero-variance coordinate");
            }
            return MgfModel::gaussian(std::sqrt(v));
        }
        case Kind::iid_rademacher:
            return MgfModel::rademacher();
        case Kind::iid_scaled: {
            const double s = scales[std::size_t(i)];
            if (base == Base::gaussian) return MgfModel::gaussian(std::fabs(s));
            return MgfModel::scaled(MgfModel::rademacher(), s);
        }
        case Kind::mixture: {
            std::vector<MgfModel> comps;
            comps.reserve(components.size());
            for (const auto& c : components) comps.push_back(c.marginal_model(i));
            return MgfModel::mixture(std::move(comps), weights);
        }
    }
    throw std::logic_error("marginal_model: unreachable");
}

MultivariateMgf DistributionSpec::joint_model() const {
    switch (kind) {
        case Kind::gaussian:
            return MultivariateMgf::gaussian(cov);
        case Kind::iid_rademacher:
        case Kind::iid_scaled: {
            std::vector<MgfModel> marginals;
            marginals.reserve(std::size_t(d));
            for (int i = 0; i < d; ++i) marginals.push_back(marginal_model(i));
            return MultivariateMgf::product_of_independent(std::move(marginals));
        }
        case Kind::mixture: {
            std::vector<MultivariateMgf> joints;
            joints.reserve(components.size());
            for (const auto& c : components) joints.push_back(c.joint_model());
            return MultivariateMgf::mixture(std::move(joints), weights);
        }
    }
    throw std::logic_error("joint_model: unreachable");
}

Eigen::MatrixXd sample_vector(const DistributionSpec& spec, std::size_t n, std::uint64_t seed,
                              const SampleOptions& opts) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("sample_vector: n must be >= 1");
    const RowSampler sampler = make_row_sampler(spec);
    Eigen::MatrixXd out(Eigen::Index(n), spec.d);

    const std::size_t chunk = std::max<std::size_t>(1, opts.chunk_size);
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    const unsigned threads = std::min<unsigned>(resolve_threads(opts.threads),
                                                unsigned(n_chunks));

    auto fill_chunk = [&](std::size_t c) {
        RandomStream rng(mix_seed(seed, c));
        const std::size_t begin = c * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        std::vector<double> row(std::size_t(spec.d));
        for (std::size_t k = begin; k < end; ++k) {
            sampler(rng, row.data());
            for (int j = 0; j < spec.d; ++j) out(Eigen::Index(k), j) = row[std::size_t(j)];
        }
    };

    if (threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) fill_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
                    fill_chunk(c);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace tailbound
