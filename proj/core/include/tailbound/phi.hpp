#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "tailbound/mgf.hpp"

namespace tailbound {

// Descriptor for the supported generator family. `lambda0` restricts the
// domain of the closed-form kinds; tabulated kinds take a symmetric grid and
// natural kinds wrap the symmetrized log-MGF of a model.
struct PhiDescriptor {
    enum class Kind { quadratic, power, tabulated, natural };

    Kind kind = Kind::quadratic;
    double lambda0 = std::numeric_limits<double>::infinity();
    double m = 2.0;       // power exponent, > 1
    double eta = 1e-8;    // quadratic regularizer weight for m > 2
    std::vector<double> grid_lambda;  // tabulated, nonnegative half-grid accepted
    std::vector<double> grid_phi;
    std::optional<MgfModel> model;    // natural

    static PhiDescriptor quadratic(double lambda0 = std::numeric_limits<double>::infinity());
    static PhiDescriptor power(double m, double eta = 1e-8,
                               double lambda0 = std::numeric_limits<double>::infinity());
    static PhiDescriptor tabulated(std::vector<double> lambda, std::vector<double> phi);
    static PhiDescriptor natural(MgfModel model);
};

// Even convex generator with phi(0) = phi'(0) = 0 and finite positive
// phi''(0). Immutable after construction; freely shareable across threads.
class PhiFunction {
public:
    using Kind = PhiDescriptor::Kind;

    double operator()(double lambda) const;   // +infinity outside the domain
    double derivative(double lambda) const;   // analytic or central difference
    // Inverse of phi restricted to [0, infinity); clamps to lambda0 when the
    // requested level exceeds sup phi on a bounded domain.
    double inverse(double y) const;

    Kind kind() const { return kind_; }
    double lambda0() const { return lambda0_; }
    double second_deriv_at_zero() const { return phi2_at_zero_; }
    bool closed_form() const { return kind_ == Kind::quadratic || kind_ == Kind::power; }

    const std::vector<double>& grid_lambda() const { return grid_lambda_; }
    const std::vector<double>& grid_phi() const { return grid_phi_; }

private:
    friend PhiFunction build_phi(const PhiDescriptor& spec);
    PhiFunction() = default;

    double eval_raw(double abs_lambda) const;

    Kind kind_ = Kind::quadratic;
    double lambda0_ = std::numeric_limits<double>::infinity();
    double m_ = 2.0;
    double eta_ = 0.0;
    double phi2_at_zero_ = 1.0;
    std::vector<double> grid_lambda_, grid_phi_;  // tabulated, lambda >= 0 half
    std::optional<MgfModel> model_;               // natural
};

// Result of the one-dimensional Young-Fenchel transform
//   nu(x) = sup_{|lambda| <= lambda0} (lambda x - phi(lambda)).
// value may be +infinity (diverging supremum marker).
struct ConjugateResult {
    double value = 0.0;
    double argmax_lambda = 0.0;
    bool attained_at_boundary = false;
};

// Validates the descriptor and the generator invariants (evenness, convexity,
// normalization, finite positive curvature at zero). Throws
// std::invalid_argument on violation.
PhiFunction build_phi(const PhiDescriptor& spec);

ConjugateResult legendre_1d(const PhiFunction& phi, double x);

namespace detail {
// Search cap for unbounded domains; beyond it the supremum is reported as
// diverging unless the slope gap x - phi'(cap) has already vanished.
inline constexpr double kLegendreLambdaCap = 1e6;
}  // namespace detail

}  // namespace tailbound
