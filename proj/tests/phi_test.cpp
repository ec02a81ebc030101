#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tailbound/bphi_norm.hpp"
#include "tailbound/phi.hpp"

using namespace tailbound;

namespace {

// Independent dense-grid supremum of lambda*x - phi(lambda); the test-side
// oracle for the root-finding conjugate.
double grid_conjugate(const PhiFunction& phi, double x, double lambda_hi, int points = 100000) {
    double best = 0.0;
    for (int i = 0; i <= points; ++i) {
        const double l = lambda_hi * double(i) / double(points);
        const double f = phi(l);
        if (!std::isfinite(f)) continue;
        best = std::max(best, l * std::fabs(x) - f);
    }
    return best;
}

}  // namespace

TEST_CASE("quadratic generator basics") {
    const PhiFunction phi = build_phi(PhiDescriptor::quadratic());
    CHECK(phi(2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(phi(0.0) == 0.0);
    CHECK(phi.derivative(0.0) == 0.0);
    CHECK(phi.second_deriv_at_zero() == doctest::Approx(1.0));
    CHECK(std::isinf(phi.lambda0()));
}

TEST_CASE("power generator uses |lambda|^m/m with a quadratic regularizer") {
    const PhiFunction phi = build_phi(PhiDescriptor::power(4.0));
    CHECK(phi(1.0) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(phi(1.0) == doctest::Approx(0.25 + 1e-8).epsilon(1e-12));
    CHECK(phi.second_deriv_at_zero() == doctest::Approx(2e-8).epsilon(1e-9));

    // Finite-difference curvature at 0 approaches 2*eta.
    const double h = 1e-5;
    const double fd = (phi(h) - 2.0 * phi(0.0) + phi(-h)) / (h * h);
    CHECK(fd == doctest::Approx(2e-8 + 0.5 * h * h).epsilon(1e-6));

    // Convexity by finite differences along a coarse grid.
    for (double a = -3.0; a <= 3.0; a += 0.25) {
        CHECK(phi(0.5 * (a + (a + 1.0))) <= 0.5 * (phi(a) + phi(a + 1.0)) + 1e-12);
    }
}

TEST_CASE("power generator rejections") {
    CHECK_THROWS_AS(build_phi(PhiDescriptor::power(1.0)), std::invalid_argument);
    CHECK_THROWS_AS(build_phi(PhiDescriptor::power(0.5)), std::invalid_argument);
    // m in (1,2): curvature at the origin is infinite.
    CHECK_THROWS_AS(build_phi(PhiDescriptor::power(1.5)), std::invalid_argument);
    // m > 2 with a zero regularizer has phi''(0) = 0.
    CHECK_THROWS_AS(build_phi(PhiDescriptor::power(4.0, 0.0)), std::invalid_argument);
    CHECK_NOTHROW(build_phi(PhiDescriptor::power(2.0)));
}

TEST_CASE("tabulated generator validation") {
    // Non-convex data: slopes decrease.
    CHECK_THROWS_AS(build_phi(PhiDescriptor::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 1.5})),
                    std::invalid_argument);
    // Asymmetric full grid.
    CHECK_THROWS_AS(
        build_phi(PhiDescriptor::tabulated({-1.0, 0.0, 2.0}, {0.5, 0.0, 2.0})),
        std::invalid_argument);
    // Uneven values on a symmetric grid.
    CHECK_THROWS_AS(
        build_phi(PhiDescriptor::tabulated({-1.0, 0.0, 1.0}, {0.6, 0.0, 0.5})),
        std::invalid_argument);

    const PhiFunction phi = build_phi(
        PhiDescriptor::tabulated({-2.0, -1.0, 0.0, 1.0, 2.0}, {2.0, 0.5, 0.0, 0.5, 2.0}));
    CHECK(phi(1.5) == doctest::Approx(1.25));   // linear between 0.5 and 2.0
    CHECK(phi(-1.5) == doctest::Approx(1.25));  // even
    CHECK(phi.lambda0() == doctest::Approx(2.0));
    CHECK(!std::isfinite(phi(2.5)));
}

TEST_CASE("natural generator wraps the symmetrized log-MGF") {
    const PhiFunction phi = build_phi(PhiDescriptor::natural(MgfModel::rademacher()));
    CHECK(phi(1.0) == doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-12));
    CHECK(phi(1.0) == doctest::Approx(0.433780).epsilon(1e-5));
    CHECK(phi.second_deriv_at_zero() == doctest::Approx(1.0));
}

TEST_CASE("legendre_1d: quadratic closed form") {
    const PhiFunction phi = build_phi(PhiDescriptor::quadratic());

    const ConjugateResult at3 = legendre_1d(phi, 3.0);
    CHECK(at3.value == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(at3.argmax_lambda == doctest::Approx(3.0));
    CHECK(!at3.attained_at_boundary);

    CHECK(legendre_1d(phi, 0.0).value == 0.0);

    for (double x = -100.0; x <= 100.0; x += 0.25) {
        const double expected = 0.5 * x * x;
        CHECK(std::fabs(legendre_1d(phi, x).value - expected) <=
              1e-8 * std::max(1.0, expected));
    }
}

TEST_CASE("legendre_1d: boundary supremum on a restricted domain") {
    const PhiFunction phi = build_phi(PhiDescriptor::quadratic(1.0));
    const ConjugateResult r = legendre_1d(phi, 2.0);
    CHECK(r.value == 1.5);  // sup over |l| <= 1 of 2l - 0.5 l^2
    CHECK(r.attained_at_boundary);
    CHECK(r.argmax_lambda == doctest::Approx(1.0));

    // Interior when |x| is small enough.
    const ConjugateResult inner = legendre_1d(phi, 0.5);
    CHECK(inner.value == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(!inner.attained_at_boundary);
}

TEST_CASE("legendre_1d: diverging and saturating suprema") {
    const PhiFunction phi = build_phi(PhiDescriptor::natural(MgfModel::rademacher()));
    // ln cosh has slope limit 1: beyond it the conjugate is infinite.
    CHECK(std::isinf(legendre_1d(phi, 1.5).value));
    // At exactly the slope limit the objective converges to ln 2.
    CHECK(legendre_1d(phi, 1.0).value == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    // Inside the slope limit everything is finite and matches the grid oracle.
    const double oracle = grid_conjugate(phi, 0.7, 50.0);
    CHECK(legendre_1d(phi, 0.7).value == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("legendre_1d: non-finite x is a contract violation") {
    const PhiFunction phi = build_phi(PhiDescriptor::quadratic());
    CHECK_THROWS_AS(legendre_1d(phi, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(legendre_1d(phi, std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
}

TEST_CASE("legendre_1d agrees with the dense-grid oracle for every kind") {
    const PhiFunction quad = build_phi(PhiDescriptor::quadratic());
    const PhiFunction pow4 = build_phi(PhiDescriptor::power(4.0));
    const PhiFunction tab = build_phi(
        PhiDescriptor::tabulated({0.0, 0.5, 1.0, 1.5, 2.0}, {0.0, 0.125, 0.5, 1.125, 2.0}));
    const PhiFunction nat_r = build_phi(PhiDescriptor::natural(MgfModel::rademacher()));
    const PhiFunction nat_g = build_phi(PhiDescriptor::natural(MgfModel::gaussian(2.0)));

    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        CHECK(std::fabs(legendre_1d(quad, x).value - grid_conjugate(quad, x, 50.0)) <= 1e-4);
        CHECK(std::fabs(legendre_1d(pow4, x).value - grid_conjugate(pow4, x, 50.0)) <= 1e-4);
        CHECK(std::fabs(legendre_1d(tab, x).value - grid_conjugate(tab, x, 2.0)) <= 1e-4);
        CHECK(std::fabs(legendre_1d(nat_g, x).value - grid_conjugate(nat_g, x, 50.0)) <= 1e-4);
    }
    for (double x : {0.1, 0.3, 0.7, 0.95}) {
        CHECK(std::fabs(legendre_1d(nat_r, x).value - grid_conjugate(nat_r, x, 50.0)) <= 1e-4);
    }
}

TEST_CASE("tabulated conjugate is exact at grid points") {
    const PhiFunction tab = build_phi(
        PhiDescriptor::tabulated({0.0, 0.5, 1.0, 1.5, 2.0}, {0.0, 0.125, 0.5, 1.125, 2.0}));
    const ConjugateResult at1 = legendre_1d(tab, 1.0);
    CHECK(at1.value == 0.5);
    CHECK(at1.argmax_lambda == 1.0);
    const ConjugateResult at3 = legendre_1d(tab, 3.0);
    CHECK(at3.value == 4.0);
    CHECK(at3.attained_at_boundary);
}

TEST_CASE("Fenchel-Young inequality over a lambda-x grid") {
    const PhiFunction quad = build_phi(PhiDescriptor::quadratic());
    const PhiFunction pow4 = build_phi(PhiDescriptor::power(4.0));
    for (const PhiFunction* phi : {&quad, &pow4}) {
        for (double x = -10.0; x <= 10.0; x += 0.5) {
            const double nu = legendre_1d(*phi, x).value;
            for (double l = -10.0; l <= 10.0; l += 0.5) {
                CHECK(l * x <= (*phi)(l) + nu + 1e-9);
            }
        }
    }
}

TEST_CASE("conjugate value is nondecreasing and convex on the positive axis") {
    const PhiFunction phi = build_phi(PhiDescriptor::power(3.0));
    std::vector<double> values;
    const int n = 1000;
    for (int i = 0; i <= n; ++i) {
        values.push_back(legendre_1d(phi, 5.0 * double(i) / double(n)).value);
    }
    for (int i = 0; i + 1 <= n; ++i) {
        CHECK(values[std::size_t(i)] <= values[std::size_t(i) + 1] + 1e-12);
    }
    for (int i = 0; i + 2 <= n; ++i) {
        CHECK(values[std::size_t(i) + 1] <=
              0.5 * (values[std::size_t(i)] + values[std::size_t(i) + 2]) + 1e-9);
    }
}

TEST_CASE("randomized convex polylines conjugate exactly on their grid") {
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> slope_step(0.05, 0.8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> xs{0.0}, ys{0.0};
        double slope = 0.0, x = 0.0, y = 0.0;
        for (int k = 0; k < 8; ++k) {
            slope += slope_step(rng);
            x += 0.25;
            y += slope * 0.25;
            xs.push_back(x);
            ys.push_back(y);
        }
        const PhiFunction tab = build_phi(PhiDescriptor::tabulated(xs, ys));
        for (double target : {0.3, 1.0, 2.7}) {
            double oracle = 0.0;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                oracle = std::max(oracle, xs[k] * target - ys[k]);
            }
            CHECK(legendre_1d(tab, target).value == doctest::Approx(oracle).epsilon(1e-12));
        }
    }
}
