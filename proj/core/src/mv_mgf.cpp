#include "tailbound/mv_mgf.hpp"

#include <cmath>
#include <stdexcept>

namespace tailbound {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

HolderWeights::HolderWeights(std::vector<double> q_in) : q(std::move(q_in)) {
    if (q.empty()) throw std::invalid_argument("HolderWeights: empty exponent vector");
    double inv_sum = 0.0;
    for (double qi : q) {
        if (!(qi >= 1.0)) throw std::invalid_argument("HolderWeights: q_i must be >= 1");
        inv_sum += 1.0 / qi;
    }
    if (std::fabs(inv_sum - 1.0) > 1e-12) {
        throw std::invalid_argument("HolderWeights: sum of 1/q_i must equal 1");
    }
}

HolderWeights HolderWeights::uniform(std::size_t d) {
    return HolderWeights(std::vector<double>(d, double(d)));
}

MultivariateMgf MultivariateMgf::gaussian(Eigen::MatrixXd cov) {
    if (cov.rows() != cov.cols() || cov.rows() < 1) {
        throw std::invalid_argument("MultivariateMgf::gaussian: covariance must be square");
    }
    if (!cov.isApprox(cov.transpose(), 1e-12)) {
        throw std::invalid_argument("MultivariateMgf::gaussian: covariance must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double max_eig = es.eigenvalues().maxCoeff();
    const double tol = 1e-10 * std::max(1.0, max_eig);
    if (es.eigenvalues().minCoeff() < -tol) {
        throw std::invalid_argument("MultivariateMgf::gaussian: covariance is not PSD");
    }
    MultivariateMgf m;
    m.kind_ = Kind::gaussian;
    m.d_ = int(cov.rows());
    m.cov_ = std::make_shared<const Eigen::MatrixXd>(std::move(cov));
    m.epsilon_ = kInf;
    return m;
}

MultivariateMgf MultivariateMgf::custom(int d, std::function<double(const Eigen::VectorXd&)> log_mgf,
                                        double epsilon) {
    if (d < 1) throw std::invalid_argument("MultivariateMgf::custom: d must be >= 1");
    if (!log_mgf) throw std::invalid_argument("MultivariateMgf::custom: missing callable");
    if (!(epsilon > 0.0)) throw std::invalid_argument("MultivariateMgf::custom: epsilon must be positive");
    MultivariateMgf m;
    m.kind_ = Kind::custom;
    m.d_ = d;
    m.fn_ = std::move(log_mgf);
    m.epsilon_ = epsilon;
    m.check_convexity();
    return m;
}

MultivariateMgf MultivariateMgf::holder_product(std::vector<MgfModel> marginals, HolderWeights q) {
    if (marginals.empty() || marginals.size() != q.q.size()) {
        throw std::invalid_argument("holder_product: marginals/weights size mismatch");
    }
    MultivariateMgf m;
    m.kind_ = Kind::holder_product;
    m.d_ = int(marginals.size());
    m.epsilon_ = kInf;
    for (std::size_t i = 0; i < marginals.size(); ++i) {
        m.epsilon_ = std::min(m.epsilon_, marginals[i].radius() / q.q[i]);
        m.lower_estimate_only_ = m.lower_estimate_only_ || marginals[i].lower_estimate_only();
    }
    m.marginals_ = std::move(marginals);
    m.q_ = std::move(q.q);
    return m;
}

MultivariateMgf MultivariateMgf::product_of_independent(std::vector<MgfModel> marginals) {
    if (marginals.empty()) throw std::invalid_argument("product_of_independent: no marginals");
    MultivariateMgf m;
    m.kind_ = Kind::custom;
    m.d_ = int(marginals.size());
    m.epsilon_ = kInf;
    for (const auto& mm : marginals) {
        m.epsilon_ = std::min(m.epsilon_, mm.radius());
        m.lower_estimate_only_ = m.lower_estimate_only_ || mm.lower_estimate_only();
    }
    auto shared = std::make_shared<const std::vector<MgfModel>>(std::move(marginals));
    m.fn_ = [shared](const Eigen::VectorXd& lambda) {
        double total = 0.0;
        for (int i = 0; i < lambda.size(); ++i) {
            const double lm = (*shared)[std::size_t(i)].log_mgf(lambda[i]);
            if (!std::isfinite(lm)) return kInf;
            total += lm;
        }
        return total;
    };
    return m;
}

MultivariateMgf MultivariateMgf::empirical(Eigen::MatrixXd samples) {
    if (samples.rows() < 1 || samples.cols() < 1) {
        throw std::invalid_argument("MultivariateMgf::empirical: empty sample matrix");
    }
    MultivariateMgf m;
    m.kind_ = Kind::empirical;
    m.d_ = int(samples.cols());
    m.max_row_norm_ = samples.rowwise().norm().maxCoeff();
    m.epsilon_ = m.max_row_norm_ > 0.0 ? 690.0 / m.max_row_norm_ : kInf;
    m.lower_estimate_only_ = true;
    m.samples_ = std::make_shared<const Eigen::MatrixXd>(std::move(samples));
    m.check_convexity();
    return m;
}

MultivariateMgf MultivariateMgf::mixture(std::vector<MultivariateMgf> components,
                                         std::vector<double> weights) {
    if (components.empty() || components.size() != weights.size()) {
        throw std::invalid_argument("MultivariateMgf::mixture: size mismatch");
    }
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("MultivariateMgf::mixture: negative weight");
        wsum += w;
    }
    if (std::fabs(wsum - 1.0) > 1e-12) {
        throw std::invalid_argument("MultivariateMgf::mixture: weights must sum to 1");
    }
    MultivariateMgf m;
    m.kind_ = Kind::custom;
    m.d_ = components.front().dim();
    m.epsilon_ = kInf;
    for (const auto& c : components) {
        if (c.dim() != m.d_) {
            throw std::invalid_argument("MultivariateMgf::mixture: dimension mismatch");
        }
        m.epsilon_ = std::min(m.epsilon_, c.epsilon());
        m.lower_estimate_only_ = m.lower_estimate_only_ || c.lower_estimate_only();
    }
    auto comps = std::make_shared<const std::vector<MultivariateMgf>>(std::move(components));
    auto ws = std::make_shared<const std::vector<double>>(std::move(weights));
    m.fn_ = [comps, ws](const Eigen::VectorXd& lambda) {
        double mx = -kInf;
        for (const auto& c : *comps) mx = std::max(mx, c.log_mgf(lambda));
        if (!std::isfinite(mx)) return mx;
        double acc = 0.0;
        for (std::size_t i = 0; i < comps->size(); ++i) {
            acc += (*ws)[i] * std::exp((*comps)[i].log_mgf(lambda) - mx);
        }
        return mx + std::log(acc);
    };
    return m;
}

double MultivariateMgf::log_mgf(const Eigen::VectorXd& lambda) const {
    if (lambda.size() != d_) {
        throw std::invalid_argument("MultivariateMgf::log_mgf: dimension mismatch");
    }
    switch (kind_) {
        case Kind::gaussian:
            return 0.5 * lambda.dot(*cov_ * lambda);
        case Kind::custom:
            if (std::isfinite(epsilon_) && lambda.norm() >= epsilon_) return kInf;
            return fn_(lambda);
        case Kind::holder_product: {
            double total = 0.0;
            for (int i = 0; i < d_; ++i) {
                const double qi = q_[std::size_t(i)];
                const double lm = marginals_[std::size_t(i)].log_mgf(qi * lambda[i]);
                if (!std::isfinite(lm)) return kInf;
                total += lm / qi;
            }
            return total;
        }
        case Kind::empirical: {
            const Eigen::VectorXd dots = *samples_ * lambda;
            const double shift = dots.maxCoeff();
            if (shift > 709.0 || -dots.minCoeff() > 709.0) return kInf;
            const double acc = (dots.array() - shift).exp().mean();
            return shift + std::log(acc);
        }
    }
    return kInf;
}

const Eigen::MatrixXd* MultivariateMgf::covariance() const {
    return kind_ == Kind::gaussian ? cov_.get() : nullptr;
}

void MultivariateMgf::check_convexity() const {
    // Midpoint convexity along a handful of deterministic segments.
    const double tol = kind_ == Kind::empirical ? 1e-4 : 1e-9;
    const double reach = std::isfinite(epsilon_) ? 0.9 * epsilon_ : 5.0;
    Eigen::VectorXd at_zero = Eigen::VectorXd::Zero(d_);
    if (std::fabs(log_mgf(at_zero)) > 1e-9) {
        throw std::invalid_argument("MultivariateMgf: log_mgf(0) must be 0");
    }
    for (int dir = 0; dir < std::min(d_ + 1, 4); ++dir) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d_);
        if (dir < d_) {
            v[dir] = 1.0;
        } else {
            v.setOnes();
            v /= std::sqrt(double(d_));
        }
        const Eigen::VectorXd a = -reach * v, b = reach * v;
        const double fa = log_mgf(a), fb = log_mgf(b);
        if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
        const double fm = log_mgf(Eigen::VectorXd(0.5 * (a + b)));
        const double scale = std::max({1.0, std::fabs(fa), std::fabs(fb)});
        if (fm > 0.5 * (fa + fb) + tol * scale) {
            throw std::invalid_argument("MultivariateMgf: log-MGF is not convex");
        }
    }
}

double mgf_joint_eval(const MultivariateMgf& model, const Eigen::VectorXd& lambda) {
    const double lm = model.log_mgf(lambda);
    if (!std::isfinite(lm)) return kInf;
    return std::exp(lm);
}

double holder_mgf_bound(const std::vector<MgfModel>& marginals, const Eigen::VectorXd& lambda,
                        const HolderWeights& q) {
    if (marginals.size() != q.q.size() || int(marginals.size()) != lambda.size()) {
        throw std::invalid_argument("holder_mgf_bound: size mismatch");
    }
    double log_total = 0.0;
    for (std::size_t i = 0; i < marginals.size(); ++i) {
        const double lm = marginals[i].log_mgf(q.q[i] * lambda[int(i)]);
        if (!std::isfinite(lm)) return kInf;
        log_total += lm / q.q[i];
    }
    return std::exp(log_total);
}

}  // namespace tailbound
