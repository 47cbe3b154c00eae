#include "hilfer/fraccalc.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hilfer;

namespace {

struct Family {
    PsiMap psi;
    double a;
    double T;
};

const Family kFamilies[] = {{PsiMap::identity(), 0.0, 1.0},
                            {PsiMap::logarithm(), 1.0, std::numbers::e},
                            {PsiMap::power(2.0), 0.0, 1.0}};

GridFunction in_x(const MeshPtr& m, double (*f)(double)) {
    std::vector<double> v(m->size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(m->x(j));
    return GridFunction(m, std::move(v));
}

}  // namespace

TEST_CASE("weights are nonnegative and rows reproduce constants") {
    for (const Family& f : kFamilies)
        for (double alpha : {0.3, 0.5, 0.9, 1.0})
            for (double r : {1.0, 2.0 / alpha}) {
                const auto m = build_mesh(f.psi, f.a, f.T, 48, r);
                const FracIntegralOperator op(m, alpha);
                for (std::size_t i = 1; i < m->size(); ++i) {
                    for (std::size_t j = 0; j <= i; ++j) CHECK(op.weight(i, j) >= 0.0);
                    const double exact = std::pow(m->x(i), alpha) / std::tgamma(alpha + 1.0);
                    CHECK(op.row_sum(i) == doctest::Approx(exact).epsilon(1e-12));
                }
            }
}

TEST_CASE("integral of one at T") {
    const auto m = build_mesh(PsiMap::identity(), 0.0, 1.0, 128, 1.0);
    const FracIntegralOperator op(m, 0.5);
    const GridFunction one = GridFunction::sample(m, [](double) { return 1.0; });
    const GridFunction r = op.apply(one);
    CHECK(r[0] == 0.0);
    CHECK(r[m->cells()] == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-13));

    const FracIntegralOperator id(m, 1.0);
    const GridFunction run = id.apply(one);
    for (std::size_t j = 0; j < m->size(); ++j) CHECK(run[j] == doctest::Approx(m->t(j)).epsilon(1e-14));
}

TEST_CASE("power rule in psi-space") {
    // Graded meshes with r = 2/alpha are coarse near T, so the error on this
    // smooth input is O(h^2) with a constant growing as alpha shrinks. With
    // r = 20/3 the log family runs out of distinct t nodes beyond n = 128.
    for (const Family& f : kFamilies)
        for (double alpha : {0.3, 0.5, 0.9}) {
            double worst[2] = {0.0, 0.0};
            for (std::size_t level : {0u, 1u}) {
                const auto m = build_mesh(f.psi, f.a, f.T, 64u << level, 2.0 / alpha);
                const GridFunction r = FracIntegralOperator(m, alpha).apply(in_x(m, [](double x) { return x * x; }));
                const double c = std::tgamma(3.0) / std::tgamma(3.0 + alpha);
                const double scale = std::pow(m->x(m->cells()), 2.0 + alpha);
                for (std::size_t j = 1; j < m->size(); ++j)
                    worst[level] = std::max(worst[level], std::abs(r[j] - c * std::pow(m->x(j), 2.0 + alpha)) / scale);
            }
            INFO("a = " << f.a << ", T = " << f.T << ", alpha = " << alpha);
            CHECK(worst[1] <= 5e-4);
            CHECK(worst[0] / worst[1] >= 3.5);
        }
}

TEST_CASE("Hadamard integral of the square root of ln t") {
    const auto m = build_mesh(PsiMap::logarithm(), 1.0, std::numbers::e, 256, 4.0);
    const GridFunction u = GridFunction::sample(m, [](double t) { return std::sqrt(std::log(t)); });
    const GridFunction r = FracIntegralOperator(m, 0.5).apply(u);
    const double expect = std::sqrt(std::numbers::pi) / 2.0;
    CHECK(r[m->cells()] == doctest::Approx(expect).epsilon(1e-4));
    CHECK(r[m->cells()] <= 2.0 / std::sqrt(std::numbers::pi));
}

TEST_CASE("weighted inputs") {
    const auto m = build_mesh(PsiMap::identity(), 0.0, 1.0, 128, 4.0);
    const FracIntegralOperator op(m, 0.5);
    // x^{-1/2} stored with weight 1/2 is the constant 1.
    const GridFunction inv_sqrt(m, std::vector<double>(m->size(), 1.0), 0.5);
    const GridFunction r = op.apply(inv_sqrt);
    CHECK(r.weight_exp() == 0.0);
    for (std::size_t j = 0; j < m->size(); ++j)
        CHECK(r[j] == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));

    // I^{1/2} x^{-0.3} = Gamma(0.7)/Gamma(1.2) x^{0.2}
    const GridFunction u(m, std::vector<double>(m->size(), 1.0), 0.3);
    const GridFunction s = op.apply(u);
    const double c = std::tgamma(0.7) / std::tgamma(1.2);
    for (std::size_t j = 1; j < m->size(); ++j)
        CHECK(s[j] == doctest::Approx(c * std::pow(m->x(j), 0.2)).epsilon(1e-9));

    // Weighted with a smooth factor: x^{-1/2} (1 + x) -> Gamma(1/2) + Gamma(3/2)/Gamma(2) x
    std::vector<double> v(m->size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = 1.0 + m->x(j);
    const GridFunction w = op.apply(GridFunction(m, v, 0.5));
    for (std::size_t j = 1; j < m->size(); ++j) {
        const double x = m->x(j);
        CHECK(w[j] == doctest::Approx(std::sqrt(std::numbers::pi) * (1.0 + 0.5 * x)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(op.weighted_table(1.0), ContractError);
}

TEST_CASE("linearity and monotonicity") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const Family& f : kFamilies) {
        const auto m = build_mesh(f.psi, f.a, f.T, 40, 3.0);
        const FracIntegralOperator op(m, 0.6);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> p(m->size()), q(m->size()), mix(m->size());
            const double ca = 4.0 * u(gen) - 2.0, cb = 4.0 * u(gen) - 2.0;
            for (std::size_t j = 0; j < m->size(); ++j) {
                p[j] = u(gen);
                q[j] = u(gen);
                mix[j] = ca * p[j] + cb * q[j];
            }
            const GridFunction P = op.apply(GridFunction(m, p)), Q = op.apply(GridFunction(m, q));
            const GridFunction M = op.apply(GridFunction(m, mix));
            for (std::size_t j = 0; j < m->size(); ++j) {
                CHECK(std::abs(M[j] - (ca * P[j] + cb * Q[j])) <= 1e-13);
                CHECK(P[j] >= 0.0);
            }
        }
    }
}

TEST_CASE("weight tables are deterministic") {
    const auto m = build_mesh(PsiMap::logarithm(), 1.0, 4.0, 64, 3.0);
    const FracIntegralOperator a(m, 0.45), b(m, 0.45);
    for (std::size_t i = 0; i < m->size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) CHECK(a.weight(i, j) == b.weight(i, j));
    CHECK(a.weighted_table(0.3) == b.weighted_table(0.3));
}

TEST_CASE("mesh mismatch is a contract error") {
    const auto m1 = build_mesh(PsiMap::identity(), 0.0, 1.0, 8);
    const auto m2 = build_mesh(PsiMap::identity(), 0.0, 1.0, 16);
    const GridFunction u = GridFunction::sample(m2, [](double) { return 1.0; });
    CHECK_THROWS_AS(FracIntegralOperator(m1, 0.5).apply(u), ContractError);
}

TEST_CASE("Hilfer derivative") {
    const auto m = build_mesh(PsiMap::identity(), 0.0, 1.0, 128, 4.0);
    SUBCASE("constant under the Caputo type") {
        const GridFunction c = GridFunction::sample(m, [](double) { return 3.0; });
        const GridFunction d = hilfer_derivative(c, FracOrder(0.5, 1.0));
        for (std::size_t j = 1; j < m->size(); ++j) CHECK(std::abs(d.plain(j)) <= 1e-10);
    }
    SUBCASE("power of x") {
        // D^{1/2, 1} x^2 = Gamma(3)/Gamma(5/2) x^{3/2}
        const GridFunction u = in_x(m, [](double x) { return x * x; });
        const GridFunction d = hilfer_derivative(u, FracOrder(0.5, 1.0));
        const double c = 2.0 / std::tgamma(2.5);
        for (std::size_t j = 1; j < m->size(); ++j)
            CHECK(std::abs(d.plain(j) - c * std::pow(m->x(j), 1.5)) <= 2e-3);
    }
    SUBCASE("kernel identity") {
        for (double beta : {0.0, 0.3, 0.7, 1.0}) CHECK(verify_kernel_identity(m, FracOrder(0.5, beta)) <= 1e-12);
    }
    SUBCASE("too few nodes") {
        const auto tiny = build_mesh(PsiMap::identity(), 0.0, 1.0, 1);
        const GridFunction u = GridFunction::sample(tiny, [](double) { return 1.0; });
        CHECK_THROWS_AS(hilfer_derivative(u, FracOrder(0.5, 0.5)), DiscretizationError);
    }
}

TEST_CASE("composition oracles converge") {
    for (const Family& f : kFamilies)
        for (double beta : {0.0, 0.5, 1.0}) {
            const FracOrder order(0.5, beta);
            double prev1 = INFINITY, prev2 = INFINITY;
            for (std::size_t n : {32, 64, 128}) {
                const auto m = build_mesh(f.psi, f.a, f.T, n, 4.0);
                const GridFunction u = GridFunction::sample(m, [](double t) { return std::cos(t); });
                const double r1 = verify_theorem1(u, order), r2 = verify_theorem2(u, order);
                CHECK(r1 < prev1);
                CHECK(r2 < prev2);
                prev1 = r1;
                prev2 = r2;
            }
            CHECK(prev1 < 1e-2);
            CHECK(prev2 < 1e-2);
        }
    const auto m = build_mesh(PsiMap::identity(), 0.0, 1.0, 16);
    const GridFunction zero(m, std::vector<double>(m->size(), 0.0));
    CHECK(verify_theorem1(zero, FracOrder(0.5, 0.5)) == 0.0);
}

TEST_CASE("Gronwall closed forms") {
    const auto m = build_mesh(PsiMap::identity(), 0.0, 1.0, 64, 2.0);
    const GridFunction one = GridFunction::sample(m, [](double) { return 1.0; });
    const GridFunction zero = GridFunction::sample(m, [](double) { return 0.0; });
    const GridFunction v = GridFunction::sample(m, [](double t) { return 1.0 + std::sin(3.0 * t) * 0.5; });

    const GridFunction b0 = gronwall_bound(v, zero, 0.5);
    for (std::size_t j = 0; j < m->size(); ++j) CHECK(b0[j] == doctest::Approx(v[j]).epsilon(1e-15));

    const double c = 0.7;
    const GridFunction g = GridFunction::sample(m, [c](double) { return c; });
    const GridFunction b1 = gronwall_bound(one, g, 0.5);
    for (std::size_t j = 0; j < m->size(); ++j) {
        const double ref = mittag_leffler(0.5, c * std::sqrt(std::numbers::pi) * std::sqrt(m->t(j)));
        CHECK(b1[j] == doctest::Approx(ref).epsilon(1e-13));
    }
    const GridFunction b2 = gronwall_bound(one, g, 1.0);
    for (std::size_t j = 0; j < m->size(); ++j) CHECK(b2[j] == doctest::Approx(std::exp(c * m->t(j))).epsilon(1e-13));

    // The series form agrees with the closed form for nondecreasing v.
    const GridFunction s = gronwall_series_bound(one, g, 0.5);
    for (std::size_t j = 0; j < m->size(); ++j) CHECK(s[j] == doctest::Approx(b1[j]).epsilon(1e-3));
}

TEST_CASE("Gronwall input validation") {
    const auto m = build_mesh(PsiMap::identity(), 0.0, 1.0, 16);
    const GridFunction one = GridFunction::sample(m, [](double) { return 1.0; });
    const GridFunction neg = GridFunction::sample(m, [](double) { return -1.0; });
    const GridFunction down = GridFunction::sample(m, [](double t) { return 1.0 - t; });
    CHECK_THROWS_AS(gronwall_bound(neg, one, 0.5), DomainError);
    CHECK_THROWS_AS(gronwall_bound(one, neg, 0.5), DomainError);
    CHECK_THROWS_AS(gronwall_bound(one, down, 0.5), DomainError);
}

TEST_CASE("Gronwall dominance on random premise-satisfying instances") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const Family& f : kFamilies) {
        for (int trial = 0; trial < 100; ++trial) {
            const double alpha = 0.2 + 0.75 * u(gen);
            const auto m = build_mesh(f.psi, f.a, f.T, 48, 2.0);
            const double c0 = u(gen), c1 = 2.0 * u(gen), c2 = u(gen), p = 0.5 + 2.0 * u(gen), om = 6.0 * u(gen);
            std::vector<double> uv(m->size()), gv(m->size());
            for (std::size_t j = 0; j < m->size(); ++j) {
                const double x = m->x(j);
                uv[j] = c0 + c1 * std::pow(x, p) + c2 * (1.0 + std::sin(om * x));
                gv[j] = 0.5 * u(gen);
            }
            for (std::size_t j = 1; j < gv.size(); ++j) gv[j] = std::max(gv[j], gv[j - 1]);
            const GridFunction U(m, uv), G(m, gv);
            // v := u - g Gamma(alpha) I^alpha u + slack, shifted to stay nonnegative.
            const GridFunction IU = FracIntegralOperator(m, alpha).apply(U);
            std::vector<double> vv(m->size());
            double lowest = 0.0;
            for (std::size_t j = 0; j < m->size(); ++j) {
                vv[j] = uv[j] - gv[j] * std::tgamma(alpha) * IU[j];
                lowest = std::min(lowest, vv[j]);
            }
            const double slack = -lowest + 0.1 * u(gen);
            for (double& x : vv) x += slack;
            const GridFunction B = gronwall_bound(GridFunction(m, vv), G, alpha);
            for (std::size_t j = 0; j < m->size(); ++j) CHECK(uv[j] <= B[j] * (1.0 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("Gronwall series bound reports overflow") {
    const auto m = build_mesh(PsiMap::identity(), 0.0, 1.0, 16, 2.0);
    std::vector<double> v(m->size(), 1.0);
    v[3] = 2.0;
    const GridFunction V(m, v), G(m, std::vector<double>(m->size(), 1.0));
    CHECK_THROWS_AS(gronwall_bound(V, G, 0.2), RangeError);
}
