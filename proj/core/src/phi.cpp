#include "tailbound/phi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tailbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double power_eval(double a, double m, double eta) {
    return std::pow(a, m) / m + eta * a * a;
}

// Root of a^m/m + eta a^2 = y for a >= 0. Newton from an upper bound on the
// root; f is convex increasing so the iteration descends monotonically.
double power_inverse(double y, double m, double eta) {
    if (y <= 0.0) return 0.0;
    double a = std::pow(m * y, 1.0 / m);
    if (eta > 0.0) a = std::min(a, std::sqrt(y / eta));
    for (int it = 0; it < 64; ++it) {
        const double f = power_eval(a, m, eta) - y;
        const double df = std::pow(a, m - 1.0) + 2.0 * eta * a;
        if (df <= 0.0) break;
        const double step = f / df;
        a -= step;
        if (std::fabs(step) <= 1e-15 * std::max(1.0, a)) break;
    }
    return std::max(a, 0.0);
}

}  // namespace

PhiDescriptor PhiDescriptor::quadratic(double lambda0) {
    PhiDescriptor d;
    d.kind = Kind::quadratic;
    d.lambda0 = lambda0;
    return d;
}

PhiDescriptor PhiDescriptor::power(double m, double eta, double lambda0) {
    PhiDescriptor d;
    d.kind = Kind::power;
    d.m = m;
    d.eta = eta;
    d.lambda0 = lambda0;
    return d;
}

PhiDescriptor PhiDescriptor::tabulated(std::vector<double> lambda, std::vector<double> phi) {
    PhiDescriptor d;
    d.kind = Kind::tabulated;
    d.grid_lambda = std::move(lambda);
    d.grid_phi = std::move(phi);
    return d;
}

PhiDescriptor PhiDescriptor::natural(MgfModel model) {
    PhiDescriptor d;
    d.kind = Kind::natural;
    d.model = std::move(model);
    return d;
}

double PhiFunction::eval_raw(double a) const {
    switch (kind_) {
        case Kind::quadratic:
            return 0.5 * a * a;
        case Kind::power:
            return power_eval(a, m_, eta_);
        case Kind::tabulated: {
            const auto& xs = grid_lambda_;
            const auto& ys = grid_phi_;
            auto it = std::upper_bound(xs.begin(), xs.end(), a);
            if (it == xs.begin()) return ys.front();
            const std::size_t k = std::size_t(it - xs.begin()) - 1;
            if (k + 1 >= xs.size()) return ys.back();
            const double t = (a - xs[k]) / (xs[k + 1] - xs[k]);
            return ys[k] + t * (ys[k + 1] - ys[k]);
        }
        case Kind::natural:
            return model_->symmetrized_log_mgf(a);
    }
    return kInf;
}

double PhiFunction::operator()(double lambda) const {
    const double a = std::fabs(lambda);
    if (a > lambda0_) return kInf;
    return eval_raw(a);
}

double PhiFunction::derivative(double lambda) const {
    const double a = std::fabs(lambda);
    const double sign = lambda < 0.0 ? -1.0 : 1.0;
    switch (kind_) {
        case Kind::quadratic:
            return lambda;
        case Kind::power:
            return sign * (std::pow(a, m_ - 1.0) + 2.0 * eta_ * a);
        case Kind::tabulated: {
            const auto& xs = grid_lambda_;
            const auto& ys = grid_phi_;
            if (xs.size() < 2) return 0.0;
            auto it = std::upper_bound(xs.begin(), xs.end(), a);
            std::size_t k = it == xs.begin() ? 0 : std::size_t(it - xs.begin()) - 1;
            k = std::min(k, xs.size() - 2);
            return sign * (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
        }
        case Kind::natural: {
            double h = std::max(1e-7, 1e-7 * a);
            double lo = a - h, hi = a + h;
            if (std::isfinite(lambda0_) && hi >= lambda0_) {
                hi = a;
                lo = a - 2.0 * h;
            }
            if (lo < 0.0) {
                lo = 0.0;
                hi = 2.0 * h;
            }
            const double flo = eval_raw(lo), fhi = eval_raw(hi);
            if (!std::isfinite(fhi)) return kInf * sign;
            return sign * (fhi - flo) / (hi - lo);
        }
    }
    return 0.0;
}

double PhiFunction::inverse(double y) const {
    if (y < 0.0 || std::isnan(y)) {
        throw std::invalid_argument("PhiFunction::inverse: level must be >= 0");
    }
    if (y == 0.0) return 0.0;
    switch (kind_) {
        case Kind::quadratic: {
            const double a = std::sqrt(2.0 * y);
            return std::min(a, lambda0_);
        }
        case Kind::power: {
            const double a = power_inverse(y, m_, eta_);
            return std::min(a, lambda0_);
        }
        case Kind::tabulated: {
            const auto& xs = grid_lambda_;
            const auto& ys = grid_phi_;
            if (y >= ys.back()) return xs.back();
            auto it = std::upper_bound(ys.begin(), ys.end(), y);
            const std::size_t k = std::size_t(it - ys.begin()) - 1;
            const double span = ys[k + 1] - ys[k];
            if (span <= 0.0) return xs[k];
            return xs[k] + (y - ys[k]) / span * (xs[k + 1] - xs[k]);
        }
        case Kind::natural: {
            // Bisection on the increasing branch.
            double lo = 0.0;
            double hi = std::isfinite(lambda0_) ? lambda0_ : 1.0;
            if (!std::isfinite(lambda0_)) {
                while (eval_raw(hi) < y && hi < 1e12) hi *= 2.0;
            } else {
                const double top = eval_raw(hi * (1.0 - 1e-12));
                if (std::isfinite(top) && top <= y) return lambda0_;
            }
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double f = eval_raw(mid);
                if (f < y) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
            }
            return 0.5 * (lo + hi);
        }
    }
    return 0.0;
}

namespace {

void check_generator_invariants(const PhiFunction& phi) {
    const bool closed = phi.closed_form();
    const double tol0 = closed ? 1e-12 : 1e-6;
    const double at0 = phi(0.0);
    if (std::fabs(at0) > tol0) {
        throw std::invalid_argument("build_phi: phi(0) must be 0");
    }
    const double hi = std::isfinite(phi.lambda0()) ? phi.lambda0() * 0.999
                                                   : 10.0;
    // phi'(0) via a symmetric difference; evenness makes it vanish exactly.
    const double h = hi * 1e-3;
    const double d0 = (phi(h) - phi(-h)) / (2.0 * h);
    if (std::fabs(d0) > tol0) {
        throw std::invalid_argument("build_phi: phi'(0) must be 0");
    }
    const double c = phi.second_deriv_at_zero();
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("build_phi: phi''(0) must be finite and positive");
    }
    // Sampled evenness and midpoint convexity.
    const int n = 41;
    for (int i = 0; i < n; ++i) {
        const double a = hi * double(i) / double(n - 1);
        const double fp = phi(a), fn_ = phi(-a);
        if (std::isfinite(fp) &&
            std::fabs(fp - fn_) > 1e-9 * std::max(1.0, std::fabs(fp))) {
            throw std::invalid_argument("build_phi: phi must be even");
        }
    }
    for (int i = 0; i + 2 < n; ++i) {
        const double a = -hi + 2.0 * hi * double(i) / double(n - 1);
        const double b = -hi + 2.0 * hi * double(i + 2) / double(n - 1);
        const double fa = phi(a), fb = phi(b), fm = phi(0.5 * (a + b));
        if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
        const double scale = std::max({1.0, std::fabs(fa), std::fabs(fb)});
        if (fm > 0.5 * (fa + fb) + 1e-9 * scale) {
            throw std::invalid_argument("build_phi: phi must be convex");
        }
    }
}

}  // namespace

PhiFunction build_phi(const PhiDescriptor& spec) {
    PhiFunction phi;
    phi.kind_ = spec.kind;
    switch (spec.kind) {
        case PhiDescriptor::Kind::quadratic: {
            if (!(spec.lambda0 > 0.0)) {
                throw std::invalid_argument("build_phi: lambda0 must be positive");
            }
            phi.lambda0_ = spec.lambda0;
            phi.phi2_at_zero_ = 1.0;
            break;
        }
        case PhiDescriptor::Kind::power: {
            if (!(spec.m > 1.0) || !std::isfinite(spec.m)) {
                throw std::invalid_argument("build_phi: power exponent must satisfy m > 1");
            }
            if (!(spec.lambda0 > 0.0)) {
                throw std::invalid_argument("build_phi: lambda0 must be positive");
            }
            if (spec.m < 2.0) {
                // |lambda|^m/m has infinite curvature at the origin for m < 2.
                throw std::invalid_argument(
                    "build_phi: phi''(0) must be finite and positive (power m < 2)");
            }
            phi.m_ = spec.m;
            phi.eta_ = spec.m > 2.0 ? spec.eta : 0.0;
            phi.lambda0_ = spec.lambda0;
            phi.phi2_at_zero_ = spec.m > 2.0 ? 2.0 * phi.eta_ : 1.0;
            if (!(phi.phi2_at_zero_ > 0.0)) {
                throw std::invalid_argument(
                    "build_phi: phi''(0) must be finite and positive (eta <= 0)");
            }
            break;
        }
        case PhiDescriptor::Kind::tabulated: {
            auto xs = spec.grid_lambda;
            auto ys = spec.grid_phi;
            if (xs.size() != ys.size() || xs.size() < 2) {
                throw std::invalid_argument("build_phi: tabulated grid needs >= 2 nodes");
            }
            // Accept a full symmetric grid; fold it onto the nonnegative half.
            if (xs.front() < 0.0) {
                std::vector<double> fx, fy;
                const std::size_t n = xs.size();
                for (std::size_t i = 0; i < n; ++i) {
                    if (xs[i] < 0.0) {
                        // must have a mirrored node with the same value
                        const double target = -xs[i];
                        bool found = false;
                        for (std::size_t j = 0; j < n; ++j) {
                            if (std::fabs(xs[j] - target) <= 1e-12 * std::max(1.0, target)) {
                                if (std::fabs(ys[j] - ys[i]) >
                                    1e-9 * std::max(1.0, std::fabs(ys[j]))) {
                                    throw std::invalid_argument(
                                        "build_phi: tabulated grid is not even");
                                }
                                found = true;
                                break;
                            }
                        }
                        if (!found) {
                            throw std::invalid_argument(
                                "build_phi: tabulated grid is not symmetric");
                        }
                    } else {
                        fx.push_back(xs[i]);
                        fy.push_back(ys[i]);
                    }
                }
                xs = std::move(fx);
                ys = std::move(fy);
            }
            if (xs.empty() || xs.front() != 0.0) {
                throw std::invalid_argument("build_phi: tabulated grid must include lambda = 0");
            }
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                if (!(xs[i + 1] > xs[i])) {
                    throw std::invalid_argument(
                        "build_phi: tabulated grid must be strictly increasing in |lambda|");
                }
            }
            // Convex-consistent: segment slopes must be nondecreasing.
            double prev_slope = -kInf;
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                const double slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
                if (slope < prev_slope - 1e-12 * std::max(1.0, std::fabs(slope))) {
                    throw std::invalid_argument("build_phi: tabulated data is not convex");
                }
                prev_slope = slope;
            }
            phi.grid_lambda_ = std::move(xs);
            phi.grid_phi_ = std::move(ys);
            phi.lambda0_ = phi.grid_lambda_.back();
            const double l1 = phi.grid_lambda_[1], p1 = phi.grid_phi_[1];
            phi.phi2_at_zero_ = 2.0 * p1 / (l1 * l1);
            break;
        }
        case PhiDescriptor::Kind::natural: {
            if (!spec.model.has_value()) {
                throw std::invalid_argument("build_phi: natural kind needs a model");
            }
            phi.model_ = spec.model;
            phi.lambda0_ = phi.model_->radius();
            phi.phi2_at_zero_ = phi.model_->variance();
            break;
        }
    }
    check_generator_invariants(phi);
    return phi;
}

namespace {

// Bisection for the stationary point phi'(a) = x on [0, hi]; phi' is
// nondecreasing by convexity so this is globally safe.
double solve_stationary(const PhiFunction& phi, double x, double hi) {
    double lo = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double d = phi.derivative(mid);
        if (d < x) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ConjugateResult legendre_1d(const PhiFunction& phi, double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("legendre_1d: x must be finite");
    }
    if (x == 0.0) return {0.0, 0.0, false};
    const double ax = std::fabs(x);
    const double sign = x < 0.0 ? -1.0 : 1.0;

    // Piecewise-linear generators conjugate exactly on their grid.
    if (phi.kind() == PhiFunction::Kind::tabulated) {
        const auto& xs = phi.grid_lambda();
        const auto& ys = phi.grid_phi();
        double best = 0.0;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double v = xs[k] * ax - ys[k];
            if (v > best) {
                best = v;
                best_k = k;
            }
        }
        return {best, sign * xs[best_k], best_k + 1 == xs.size()};
    }

    if (phi.kind() == PhiFunction::Kind::quadratic) {
        // Stationary point at |x|; clamp to the domain.
        if (ax <= phi.lambda0()) {
            return {0.5 * ax * ax, x, false};
        }
        const double l0 = phi.lambda0();
        return {ax * l0 - 0.5 * l0 * l0, sign * l0, true};
    }

    const double lambda0 = phi.lambda0();
    double hi;
    if (std::isfinite(lambda0)) {
        const bool closed = phi.closed_form();
        hi = closed ? lambda0 : lambda0 * (1.0 - 1e-12);
        const double d_hi = phi.derivative(hi);
        if (!(d_hi > ax)) {
            // Supremum at the domain boundary (limit from inside).
            const double v = ax * hi - phi(hi);
            return {std::max(v, 0.0), sign * lambda0, true};
        }
    } else {
        hi = 1.0;
        while (phi.derivative(hi) < ax && hi < detail::kLegendreLambdaCap) hi *= 2.0;
        if (phi.derivative(hi) < ax) {
            hi = detail::kLegendreLambdaCap;
            const double slope_gap = ax - phi.derivative(hi);
            if (slope_gap > 1e-9 * std::max(1.0, ax)) {
                // Diverging supremum beyond the search cap.
                return {kInf, sign * kInf, false};
            }
            // Slope saturates at |x|: the objective converges to its limit.
            const double v = ax * hi - phi(hi);
            return {std::max(v, 0.0), sign * hi, true};
        }
    }

    const double lambda_star = solve_stationary(phi, ax, hi);
    const double v = ax * lambda_star - phi(lambda_star);
    return {std::max(v, 0.0), sign * lambda_star, false};
}

}  // namespace tailbound
