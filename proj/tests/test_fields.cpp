#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <thread>

#include "gfr/interp.hpp"
#include "gfr/spectral.hpp"

#include "test_util.hpp"

using namespace gfr;
using test::kTwoPi;

TEST_CASE("TorusGrid validates its invariants") {
    CHECK_THROWS_AS(TorusGrid(3, 16, 1.0), FieldError);
    CHECK_THROWS_AS(TorusGrid(2, 7, 1.0), FieldError);
    CHECK_THROWS_AS(TorusGrid(2, 6, 1.0), FieldError);
    CHECK_THROWS_AS(TorusGrid(2, 16, 0.0), FieldError);
    const TorusGrid g(2, 16, 2.0);
    CHECK(g.size() == 256);
    CHECK(g.cell_volume() == doctest::Approx(0.015625).epsilon(1e-15));
}

TEST_CASE("l2_inner_scalar matches closed forms") {
    const TorusGrid g2(2, 32, 1.0);
    const ScalarField ones(g2, 1.0);
    CHECK(l2_inner_scalar(ones, ones) == doctest::Approx(1.0).epsilon(1e-14));

    const ScalarField zero(g2, 0.0);
    CHECK(l2_inner_scalar(zero, ones) == 0.0);

    const double L = 2.5;
    const TorusGrid g1(1, 64, L);
    ScalarField s(g1);
    for (int i = 0; i < g1.n; ++i) s.values[i] = std::sin(kTwoPi * g1.node(i) / L);
    CHECK(std::abs(l2_inner_scalar(s, s) - L / 2.0) <= 1e-12);

    const TorusGrid other(2, 64, 1.0);
    CHECK_THROWS_AS(l2_inner_scalar(ones, ScalarField(other)), FieldError);
}

TEST_CASE("l2_inner_tensor: identity, zero, brute-force oracle, positivity") {
    const TorusGrid g(2, 32, 1.0);
    const MetricField id = MetricField::identity(g);
    CHECK(l2_inner_tensor(id, id) == doctest::Approx(2.0).epsilon(1e-14));

    const MetricField zero(g);
    CHECK(l2_inner_tensor(zero, id) == 0.0);

    const MetricField p = synth::random_bandlimited_tensor(g, 8, 101);
    const MetricField q = synth::random_bandlimited_tensor(g, 8, 102);
    CHECK(test::rel_diff(l2_inner_tensor(p, q), test::dense_tensor_inner(p, q)) <= 1e-12);

    CHECK(l2_inner_tensor(p, p) > 0.0);
    CHECK(l2_inner_tensor(zero, zero) == 0.0);
}

TEST_CASE("spectral_gradient: constants, eigenfunctions, error paths") {
    const TorusGrid g1(1, 64, 3.0);
    const ScalarField c(g1, 4.25);
    CHECK(test::sup_norm(spectral_gradient(c)) <= 1e-13);

    ScalarField s(g1);
    for (int i = 0; i < g1.n; ++i) s.values[i] = std::sin(kTwoPi * g1.node(i) / g1.length);
    const VectorField grad = spectral_gradient(s);
    double err = 0.0;
    for (int i = 0; i < g1.n; ++i) {
        const double expected = kTwoPi / g1.length * std::cos(kTwoPi * g1.node(i) / g1.length);
        err = std::max(err, std::abs(grad.comp[0][i] - expected));
    }
    CHECK(err <= 1e-12);

    ScalarField bad(g1);
    bad.values[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(spectral_gradient(bad), FieldError);
}

TEST_CASE("spectral_gradient converges at second order against the FD oracle") {
    const test::TrigPoly poly = test::TrigPoly::make(7, 4);
    double prev_err = 0.0;
    for (int n : {32, 64, 128}) {
        const TorusGrid g(2, n, 1.0);
        const ScalarField f = poly.sample_on(g);
        const VectorField grad = spectral_gradient(f);
        // spectral is exact here; the oracle carries the O(h^2) error
        const ScalarField fd = test::centered_difference(f, 0);
        double diff = 0.0;
        double exact_err = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double d = poly.deriv(g.node(i), g.node(j), 1.0, 0);
                diff = std::max(diff, std::abs(grad.comp[0][g.index(i, j)] - fd.values[g.index(i, j)]));
                exact_err = std::max(exact_err, std::abs(grad.comp[0][g.index(i, j)] - d));
            }
        }
        CHECK(exact_err <= 1e-10); // band-limited: spectral derivative is exact
        if (prev_err > 0.0) {
            CHECK(prev_err / diff == doctest::Approx(4.0).epsilon(0.25));
        }
        prev_err = diff;
    }
}

TEST_CASE("spectral_tensor_derivative: constants and eigenfunctions") {
    const TorusGrid g1(1, 64, 1.0);
    MetricField t(g1, 0.7);
    CHECK(test::sup_norm(ScalarField(g1, spectral_tensor_derivative(t)[0].comp[0])) <= 1e-13);

    for (int i = 0; i < g1.n; ++i) t.comp[0][i] = std::cos(kTwoPi * g1.node(i) / g1.length);
    const MetricField dt = spectral_tensor_derivative(t)[0];
    double err = 0.0;
    for (int i = 0; i < g1.n; ++i) {
        const double expected = -kTwoPi / g1.length * std::sin(kTwoPi * g1.node(i) / g1.length);
        err = std::max(err, std::abs(dt.comp[0][i] - expected));
    }
    CHECK(err <= 1e-12);
}

TEST_CASE("tensor derivative tracks the FD oracle at O(h^2)") {
    const test::TrigPoly poly = test::TrigPoly::make(9, 4, 0.3);
    double prev = 0.0;
    for (int n : {32, 64}) {
        const TorusGrid g(2, n, 1.0);
        MetricField t = MetricField::identity(g);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                t.comp[1][g.index(i, j)] = poly(g.node(i), g.node(j), 1.0);
            }
        }
        const MetricField dt0 = spectral_tensor_derivative(t)[0];
        const ScalarField comp01(g, t.comp[1]);
        const ScalarField fd = test::centered_difference(comp01, 0);
        const double diff = test::sup_diff(ScalarField(g, dt0.comp[1]), fd);
        if (prev > 0.0) CHECK(prev / diff == doctest::Approx(4.0).epsilon(0.25));
        prev = diff;
    }
}

TEST_CASE("summation by parts holds for full-spectrum fields") {
    for (int dim : {1, 2}) {
        const TorusGrid g(dim, 32, 1.7);
        const ScalarField a = synth::random_bandlimited_scalar(g, g.n / 2, 201);
        const ScalarField b = synth::random_bandlimited_scalar(g, g.n / 2, 202);
        for (int axis = 0; axis < dim; ++axis) {
            const double lhs = l2_inner_scalar(a, spectral_derivative(b, axis));
            const double rhs = -l2_inner_scalar(spectral_derivative(a, axis), b);
            CHECK(test::rel_diff(lhs, rhs) <= 1e-10);
        }
    }
}

TEST_CASE("quadrature is exact for resolved mode products") {
    const double L = 2.0;
    const TorusGrid g(1, 64, L);
    ScalarField c5(g);
    ScalarField c7(g);
    for (int i = 0; i < g.n; ++i) {
        c5.values[i] = std::cos(kTwoPi * 5.0 * g.node(i) / L);
        c7.values[i] = std::cos(kTwoPi * 7.0 * g.node(i) / L);
    }
    CHECK(test::rel_diff(l2_inner_scalar(c5, c5), L / 2.0) <= 1e-10);
    CHECK(std::abs(l2_inner_scalar(c5, c7)) <= 1e-10 * (L / 2.0));
}

TEST_CASE("spectral ops are safe to invoke concurrently") {
    const TorusGrid g(2, 64, 1.0);
    const ScalarField f = synth::random_bandlimited_scalar(g, 16, 401);
    const VectorField reference = spectral_gradient(f);

    std::vector<VectorField> results(4, VectorField(g));
    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&, t] { results[static_cast<std::size_t>(t)] = spectral_gradient(f); });
    }
    for (auto& w : workers) w.join();
    for (const VectorField& r : results) {
        CHECK(test::sup_diff(r, reference) == 0.0);
    }
}

TEST_CASE("interpolation: node exactness, constants, midpoints, wrapping") {
    const TorusGrid g(2, 32, 1.0);
    const ScalarField f = synth::random_bandlimited_scalar(g, 8, 301);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            CHECK(sample(f, g.node(i), g.node(j)) == f.values[g.index(i, j)]);
        }
    }

    const ScalarField c(g, 3.5);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const double x = 3.0 * synth::uniform01(rng) - 1.0;
        const double y = 3.0 * synth::uniform01(rng) - 1.0;
        CHECK(sample(c, x, y) == doctest::Approx(3.5).epsilon(1e-15));
        CHECK(sample(f, x, y) == doctest::Approx(sample(f, x + g.length, y - g.length))
                                      .epsilon(1e-13));
    }

    // f(x) = x sampled at interior midpoints averages the two neighbors
    const TorusGrid g1(1, 16, 1.0);
    ScalarField ramp(g1);
    for (int i = 0; i < g1.n; ++i) ramp.values[i] = g1.node(i);
    for (int i = 2; i < g1.n - 2; ++i) {
        const double mid = (g1.node(i) + g1.node(i + 1)) / 2.0;
        CHECK(sample(ramp, mid) ==
              doctest::Approx((ramp.values[i] + ramp.values[i + 1]) / 2.0).epsilon(1e-15));
    }

    // batch interface
    const std::vector<double> pts = {0.25, 0.5, 0.75, 0.125};
    const std::vector<double> vals = interpolate(f, pts);
    CHECK(vals.size() == 2);
    CHECK(vals[0] == doctest::Approx(sample(f, 0.25, 0.5)).epsilon(1e-15));
    CHECK(vals[1] == doctest::Approx(sample(f, 0.75, 0.125)).epsilon(1e-15));
}
