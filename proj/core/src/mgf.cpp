#include "tailbound/mgf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tailbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln cosh without overflow: |x| + log1p(e^{-2|x|}) - ln 2.
double log_cosh(double x) {
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453094172321214581766;
}

double central_second_difference(const std::function<double(double)>& f, double h) {
    return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
}

}  // namespace

MgfModel MgfModel::gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("MgfModel::gaussian: sigma must be positive and finite");
    }
    MgfModel m;
    m.kind_ = Kind::gaussian;
    m.sigma_ = sigma;
    m.radius_ = kInf;
    m.variance_ = sigma * sigma;
    return m;
}

MgfModel MgfModel::rademacher() {
    MgfModel m;
    m.kind_ = Kind::rademacher;
    m.radius_ = kInf;
    m.variance_ = 1.0;
    return m;
}

MgfModel MgfModel::custom(std::function<double(double)> log_mgf, double radius,
                          bool hard_radius, double variance) {
    if (!log_mgf) throw std::invalid_argument("MgfModel::custom: missing log-MGF callable");
    if (!(radius > 0.0)) throw std::invalid_argument("MgfModel::custom: radius must be positive");
    MgfModel m;
    m.kind_ = Kind::custom;
    m.fn_ = std::move(log_mgf);
    m.radius_ = radius;
    m.hard_radius_ = hard_radius;
    if (std::isnan(variance)) {
        // Second central difference with one Richardson step.
        const double h = std::min(1e-3, (std::isfinite(radius) ? radius : 1.0) * 1e-3);
        const double c1 = central_second_difference(m.fn_, h);
        const double c2 = central_second_difference(m.fn_, h / 2.0);
        variance = (4.0 * c2 - c1) / 3.0;
    }
    m.variance_ = variance;
    m.validate();
    return m;
}

MgfModel MgfModel::empirical(std::vector<double> samples, double validity_radius) {
    const std::size_t n = samples.size();
    if (n == 0) throw std::invalid_argument("MgfModel::empirical: empty sample");
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / double(n);
    double ss = 0.0, max_abs = 0.0;
    for (double s : samples) {
        ss += (s - mean) * (s - mean);
        max_abs = std::max(max_abs, std::fabs(s));
    }
    const double sd = n > 1 ? std::sqrt(ss / double(n - 1)) : 0.0;
    if (std::fabs(mean) > 3.0 * sd / std::sqrt(double(n))) {
        throw std::invalid_argument("MgfModel::empirical: sample is not centered "
                                    "(|mean| > 3*stddev/sqrt(n))");
    }
    MgfModel m;
    m.kind_ = Kind::empirical;
    m.samples_ = std::make_shared<const std::vector<double>>(std::move(samples));
    m.max_abs_sample_ = max_abs;
    if (validity_radius > 0.0) {
        m.radius_ = validity_radius;
    } else {
        m.radius_ = max_abs > 0.0 ? 690.0 / max_abs : kInf;
    }
    m.hard_radius_ = false;
    m.lower_estimate_only_ = true;
    m.variance_ = n > 1 ? ss / double(n - 1) : 0.0;
    if (!(m.variance_ > 0.0)) {
        throw std::invalid_argument("MgfModel::empirical: sample variance must be positive");
    }
    m.validate();
    return m;
}

MgfModel MgfModel::scaled(const MgfModel& model, double c) {
    if (c == 0.0 || !std::isfinite(c)) {
        throw std::invalid_argument("MgfModel::scaled: scale must be nonzero and finite");
    }
    const double a = std::fabs(c);
    switch (model.kind_) {
        case Kind::gaussian:
            return gaussian(model.sigma_ * a);
        case Kind::empirical: {
            std::vector<double> scaled_samples(*model.samples_);
            for (double& s : scaled_samples) s *= c;
            return empirical(std::move(scaled_samples));
        }
        case Kind::rademacher:
        case Kind::custom: {
            MgfModel base = model;  // keep the callable alive by value
            MgfModel m;
            m.kind_ = Kind::custom;
            m.fn_ = [base, c](double lambda) { return base.log_mgf(c * lambda); };
            m.radius_ = model.radius_ / a;
            m.hard_radius_ = model.hard_radius_;
            m.lower_estimate_only_ = model.lower_estimate_only_;
            m.variance_ = model.variance_ * c * c;
            return m;
        }
    }
    throw std::logic_error("MgfModel::scaled: unreachable");
}

MgfModel MgfModel::sum_of_independent(std::vector<MgfModel> parts) {
    if (parts.empty()) throw std::invalid_argument("sum_of_independent: no parts");
    if (parts.size() == 1) return parts.front();
    MgfModel m;
    m.kind_ = Kind::custom;
    m.radius_ = kInf;
    m.hard_radius_ = false;
    m.variance_ = 0.0;
    for (const auto& p : parts) {
        if (p.radius_ < m.radius_) {
            m.radius_ = p.radius_;
            m.hard_radius_ = p.hard_radius_;
        } else if (p.radius_ == m.radius_) {
            m.hard_radius_ = m.hard_radius_ || p.hard_radius_;
        }
        m.variance_ += p.variance_;
        m.lower_estimate_only_ = m.lower_estimate_only_ || p.lower_estimate_only_;
    }
    auto shared = std::make_shared<const std::vector<MgfModel>>(std::move(parts));
    m.fn_ = [shared](double lambda) {
        double total = 0.0;
        for (const auto& p : *shared) total += p.log_mgf(lambda);
        return total;
    };
    return m;
}

MgfModel MgfModel::mixture(std::vector<MgfModel> components, std::vector<double> weights) {
    if (components.empty() || components.size() != weights.size()) {
        throw std::invalid_argument("MgfModel::mixture: components/weights size mismatch");
    }
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("MgfModel::mixture: negative weight");
        wsum += w;
    }
    if (std::fabs(wsum - 1.0) > 1e-12) {
        throw std::invalid_argument("MgfModel::mixture: weights must sum to 1");
    }
    MgfModel m;
    m.kind_ = Kind::custom;
    m.radius_ = kInf;
    m.hard_radius_ = false;
    m.variance_ = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        if (c.radius_ < m.radius_) {
            m.radius_ = c.radius_;
            m.hard_radius_ = c.hard_radius_;
        } else if (c.radius_ == m.radius_) {
            m.hard_radius_ = m.hard_radius_ || c.hard_radius_;
        }
        m.variance_ += weights[i] * c.variance_;
        m.lower_estimate_only_ = m.lower_estimate_only_ || c.lower_estimate_only_;
    }
    auto comps = std::make_shared<const std::vector<MgfModel>>(std::move(components));
    auto ws = std::make_shared<const std::vector<double>>(std::move(weights));
    m.fn_ = [comps, ws](double lambda) {
        // ln sum w_c exp(lm_c), max-shifted.
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

double MgfModel::log_mgf(double lambda) const {
    if (std::fabs(lambda) >= radius_) return kInf;
    switch (kind_) {
        case Kind::gaussian:
            return 0.5 * sigma_ * sigma_ * lambda * lambda;
        case Kind::rademacher:
            return log_cosh(lambda);
        case Kind::custom:
            return fn_(lambda);
        case Kind::empirical: {
            const auto& s = *samples_;
            // Max-shifted log of the sample-average MGF.
            const double shift = std::fabs(lambda) * max_abs_sample_;
            double acc = 0.0;
            for (double v : s) acc += std::exp(lambda * v - shift);
            return shift + std::log(acc / double(s.size()));
        }
    }
    return kInf;
}

double MgfModel::symmetrized_log_mgf(double lambda) const {
    return std::max(log_mgf(lambda), log_mgf(-lambda));
}

void MgfModel::validate() const {
    const double at_zero = log_mgf(0.0);
    const double tol0 = kind_ == Kind::empirical ? 1e-9 : 1e-9;
    if (std::fabs(at_zero) > tol0) {
        throw std::invalid_argument("MgfModel: log_mgf(0) must be 0");
    }
    if (!(variance_ > 0.0) || !std::isfinite(variance_)) {
        throw std::invalid_argument("MgfModel: variance must be positive and finite");
    }
    // Centered: slope of the log-MGF vanishes at the origin.
    const double h = std::min(1e-4, (std::isfinite(radius_) ? radius_ : 1.0) * 1e-4);
    const double slope = (log_mgf(h) - log_mgf(-h)) / (2.0 * h);
    const double slope_tol = kind_ == Kind::empirical
                                 ? 3.0 * std::sqrt(variance_ / double(samples_->size()))
                                 : 1e-6 * std::max(1.0, variance_);
    if (std::fabs(slope) > slope_tol + 1e-9) {
        throw std::invalid_argument("MgfModel: model is not centered (log-MGF slope at 0)");
    }
    // Midpoint convexity over a symmetric grid inside the radius.
    const double hi = std::isfinite(radius_) ? radius_ * 0.999 : 100.0;
    const double conv_tol = kind_ == Kind::empirical ? 1e-4 : 1e-9;
    const int n = 33;
    for (int i = 0; i < n - 2; ++i) {
        const double a = -hi + 2.0 * hi * double(i) / double(n - 1);
        const double b = -hi + 2.0 * hi * double(i + 2) / double(n - 1);
        const double fa = log_mgf(a), fb = log_mgf(b), fm = log_mgf(0.5 * (a + b));
        if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
        const double scale = std::max({1.0, std::fabs(fa), std::fabs(fb)});
        if (fm > 0.5 * (fa + fb) + conv_tol * scale) {
            throw std::invalid_argument("MgfModel: log-MGF is not convex");
        }
    }
}

}  // namespace tailbound
