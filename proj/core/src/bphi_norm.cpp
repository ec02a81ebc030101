#include "tailbound/bphi_norm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tailbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// tau(lambda) = phi^{-1}(psi(lambda)) / lambda; the defining sup runs over
// this ratio. phi^{-1} clamps at lambda0, which encodes the convention
// phi := infinity outside its domain.
double tau_at(const MgfModel& model, const PhiFunction& phi, double lambda) {
    const double psi = model.symmetrized_log_mgf(lambda);
    if (!std::isfinite(psi)) return kInf;
    return phi.inverse(psi) / lambda;
}

double golden_refine(const MgfModel& model, const PhiFunction& phi, double lo, double hi,
                     double* arg_out) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - (b - a) * invphi;
    double d = a + (b - a) * invphi;
    double fc = tau_at(model, phi, c);
    double fd = tau_at(model, phi, d);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * std::max(1.0, b); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * invphi;
            fc = tau_at(model, phi, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * invphi;
            fd = tau_at(model, phi, d);
        }
    }
    const double arg = 0.5 * (a + b);
    *arg_out = arg;
    return tau_at(model, phi, arg);
}

}  // namespace

PhiFunction natural_function(const MgfModel& model) {
    if (model.kind() == MgfModel::Kind::empirical && model.sample_count() < 100) {
        throw std::invalid_argument("natural_function: empirical model needs >= 100 samples");
    }
    return build_phi(PhiDescriptor::natural(model));
}

BphiNormResult bphi_norm(const MgfModel& model, const PhiFunction& phi,
                         const BphiNormOptions& opts) {
    BphiNormResult res;
    res.zero_limit_component = std::sqrt(model.variance() / phi.second_deriv_at_zero());
    res.lower_estimate_only = model.lower_estimate_only();
    res.tau = res.zero_limit_component;
    res.sup_achieved_near = 0.0;

    const double r_m = model.radius();
    const double l0 = phi.lambda0();

    // A hard finiteness radius inside an unbounded generator domain defeats
    // every finite tau: the defining inequality quantifies over all of
    // (-lambda0, lambda0) but the MGF is infinite beyond r_m.
    if (model.hard_radius() && r_m < l0 && !std::isfinite(l0)) {
        res.tau = kInf;
        res.sup_achieved_near = r_m;
        return res;
    }

    double lo, hi;
    if (std::isfinite(r_m) || std::isfinite(l0)) {
        const double edge = std::min(std::isfinite(r_m) ? r_m : kInf,
                                     std::isfinite(l0) ? l0 : kInf);
        hi = edge * (1.0 - 1e-9);
        lo = edge * 1e-8;
    } else {
        lo = opts.unbounded_lambda_lo;
        hi = opts.unbounded_lambda_hi;
    }

    const double decades = std::log10(hi / lo);
    const int n = std::max(16, int(std::ceil(decades * double(opts.points_per_decade))));
    const double step = std::log(hi / lo) / double(n - 1);

    double best = -kInf, best_lambda = lo;
    int best_idx = 0;
    for (int i = 0; i < n; ++i) {
        const double lambda = lo * std::exp(step * double(i));
        const double t = tau_at(model, phi, lambda);
        if (t > best) {
            best = t;
            best_lambda = lambda;
            best_idx = i;
        }
    }
    if (std::isfinite(best)) {
        const double bracket_lo = lo * std::exp(step * double(std::max(0, best_idx - 1)));
        const double bracket_hi = lo * std::exp(step * double(std::min(n - 1, best_idx + 1)));
        double refined_arg = best_lambda;
        const double refined = golden_refine(model, phi, bracket_lo, bracket_hi, &refined_arg);
        if (refined > best) {
            best = refined;
            best_lambda = refined_arg;
        }
    }
    if (best > res.tau) {
        res.tau = best;
        res.sup_achieved_near = best_lambda;
    }

    // Hard radius below a *finite* generator domain adds the boundary
    // constraint tau >= lambda0 / r_m.
    if (model.hard_radius() && std::isfinite(l0) && r_m < l0) {
        const double constraint = l0 / r_m;
        if (constraint > res.tau) {
            res.tau = constraint;
            res.sup_achieved_near = r_m;
        }
    }
    return res;
}

double tail_bound_from_norm(const PhiFunction& phi, double tau, double x) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("tail_bound_from_norm: tau must be positive and finite");
    }
    if (!(x > 0.0)) {
        throw std::invalid_argument("tail_bound_from_norm: x must be positive");
    }
    const ConjugateResult nu = legendre_1d(phi, x / tau);
    if (!std::isfinite(nu.value)) return 0.0;
    return std::min(1.0, std::exp(-nu.value));
}

double subgaussian_sum_norm(const std::vector<double>& norms) {
    double ss = 0.0;
    for (double v : norms) {
        if (v < 0.0) throw std::invalid_argument("subgaussian_sum_norm: negative entry");
        ss += v * v;
    }
    return std::sqrt(ss);
}

StrictSubgaussianResult is_strictly_subgaussian(const MgfModel& model, double sigma2,
                                                const GridSpec& grid) {
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("is_strictly_subgaussian: sigma2 must be positive");
    }
    const double var = model.variance();
    if (model.kind() == MgfModel::Kind::empirical) {
        const double stat_tol =
            4.0 * var * std::sqrt(2.0 / double(std::max<std::size_t>(model.sample_count(), 2) - 1));
        if (std::fabs(sigma2 - var) > stat_tol + 1e-9) {
            throw std::invalid_argument("is_strictly_subgaussian: sigma2 mismatches sample variance");
        }
    } else if (std::fabs(sigma2 - var) > 1e-6 * std::max(1.0, sigma2)) {
        throw std::invalid_argument("is_strictly_subgaussian: sigma2 mismatches model variance");
    }

    StrictSubgaussianResult out;
    const int n = std::max(2, grid.points);
    for (int i = 0; i < n; ++i) {
        double lambda;
        if (grid.log_spaced) {
            lambda = grid.lo * std::exp(std::log(grid.hi / grid.lo) * double(i) / double(n - 1));
        } else {
            lambda = grid.lo + (grid.hi - grid.lo) * double(i) / double(n - 1);
        }
        if (lambda >= model.radius() && !model.hard_radius()) continue;
        const double envelope = 0.5 * sigma2 * lambda * lambda;
        const double tol = 1e-9 * std::max(1.0, envelope);
        for (double sgn : {1.0, -1.0}) {
            const double lm = model.log_mgf(sgn * lambda);
            if (lm > envelope + tol) {
                out.strictly_subgaussian = false;
                out.witness_lambda = sgn * lambda;
                return out;
            }
        }
    }
    return out;
}

}  // namespace tailbound
