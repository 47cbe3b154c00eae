#include "hilfer/specfun.hpp"

#include <doctest.h>

#include <cmath>
#include <utility>
#include <functional>
#include <numbers>
#include <random>

using namespace hilfer;

namespace {

// Adaptive Simpson, used as an independent quadrature oracle.
double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double s, double eps, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - s) <= 15.0 * eps)
                return left + right + (left + right - s) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, eps / 2, d - 1) +
                   rec(mid, hi, fmid, frm, fhi, right, eps / 2, d - 1);
        };
    return rec(a, b, fa, fm, fb, whole, tol, depth);
}

double erf_oracle(double z) {
    return 2.0 / std::sqrt(std::numbers::pi) * simpson([](double t) { return std::exp(-t * t); }, 0.0, z, 1e-15);
}

}  // namespace

TEST_CASE("gamma at integers and half integers") {
    double fact = 1.0;
    for (int k = 1; k <= 20; ++k) {
        CHECK(gamma_fn(k) == doctest::Approx(fact).epsilon(1e-13));
        fact *= k;
    }
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(gamma_fn(1.5) == doctest::Approx(0.886226925452758).epsilon(1e-13));
}

TEST_CASE("gamma agrees with the C library over (0, 170]") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(1e-3, 170.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(gen);
        CHECK(std::abs(gamma_fn(x) / std::tgamma(x) - 1.0) <= 1e-12);
        CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    }
}

TEST_CASE("gamma rejects non-positive arguments") {
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
    CHECK_THROWS_AS(gamma_fn(NAN), DomainError);
}

TEST_CASE("erf against quadrature") {
    CHECK(erf_fn(0.0) == 0.0);
    CHECK(std::abs(erf_fn(1.0) - erf_oracle(1.0)) <= 1e-12);
    CHECK(std::abs(erf_fn(1.0) - 0.8427007929497149) <= 1e-12);
    for (double z = -4.0; z <= 4.0; z += 0.125) {
        CHECK(std::abs(erf_fn(z) - std::erf(z)) <= 1e-12);
        CHECK(erf_fn(-z) == -erf_fn(z));
    }
    CHECK_THROWS_AS(erf_fn(INFINITY), DomainError);
}

TEST_CASE("Mittag-Leffler half-order identity") {
    for (double z = 0.0; z <= 3.0; z += 0.05) {
        const double ref = std::exp(z * z) * (1.0 + erf_oracle(z));
        CHECK(std::abs(mittag_leffler(0.5, z) - ref) <= 1e-9 * ref);
    }
    CHECK(mittag_leffler(0.5, 2.0) == doctest::Approx(std::exp(4.0) * (1.0 + std::erf(2.0))).epsilon(1e-12));
}

TEST_CASE("Mittag-Leffler at order one is exp") {
    CHECK(mittag_leffler(1.0, 1.0) == doctest::Approx(std::numbers::e).epsilon(1e-14));
    for (double z = -5.0; z <= 5.0; z += 0.25)
        CHECK(std::abs(mittag_leffler(1.0, z) - std::exp(z)) <= 1e-10 * std::exp(z));
}

TEST_CASE("Mittag-Leffler alternating series for negative arguments") {
    // E_{1/2}(z) = exp(z^2) erfc(-z) holds for every real z.
    for (double z = -20.0; z <= 0.0; z += 0.5) {
        const double ref = std::exp(z * z) * std::erfc(-z);
        CHECK(std::abs(mittag_leffler(0.5, z) - ref) <= 1e-10 * ref);
    }
}

TEST_CASE("Mittag-Leffler basic properties") {
    for (double mu : {0.1, 0.5, 1.0, 2.5}) CHECK(mittag_leffler(mu, 0.0) == 1.0);
    // E_mu(z) grows like exp(z^(1/mu)), so small mu gets a shorter range.
    for (auto [mu, zmax] : {std::pair{0.2, 2.0}, std::pair{0.5, 5.0}, std::pair{0.9, 5.0}}) {
        double prev = 0.0;
        for (double z = 0.0; z <= zmax; z += 0.1) {
            const double v = mittag_leffler(mu, z);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("Mittag-Leffler errors") {
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(0.5, NAN), DomainError);
    CHECK_THROWS_AS(mittag_leffler(0.5, 1e9), RangeError);
    CHECK_THROWS_AS(mittag_leffler(0.5, -51.0), RangeError);
    MlEvalPolicy tight;
    tight.max_terms = 50;
    CHECK_THROWS_AS(mittag_leffler(0.1, 40.0, tight), ConvergenceError);
    MlEvalPolicy bad;
    bad.rel_tol = 0.5;
    CHECK_THROWS_AS(bad.validate(), ContractError);
}
