#include <cmath>
#include <random>

#include "doctest.h"
#include "miura/grid.hpp"

using namespace miura;

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(1.0, 1.0, 4), ValidationError);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 1), ValidationError);
    Grid g(0.0, 1.0, 10);
    CHECK(g.h() == doctest::Approx(0.1));
    CHECK(g.node_index(0.3, 1e-9) == 3);
    CHECK(g.node_index(0.35, 1e-9) == -1);
    CHECK_THROWS_AS(GridFn(g, std::vector<double>(5, 0.0)), ValidationError);
}

TEST_CASE("quadrature: exact for constants and linears, 1/3 for x^2") {
    Grid g01(0.0, 1.0, 10);
    CHECK(quadrature(GridFn::sample(g01, [](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-15));

    Grid g02(0.0, 2.0, 4);
    CHECK(quadrature(GridFn::sample(g02, [](double x) { return x; })) == doctest::Approx(2.0).epsilon(1e-15));

    Grid gfine(0.0, 1.0, 1000);
    const double v = quadrature(GridFn::sample(gfine, [](double x) { return x * x; }));
    CHECK(std::abs(v - 1.0 / 3.0) < 1e-6);
}

TEST_CASE("quadrature is linear and monotone") {
    Grid g(-2.0, 3.0, 64);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    auto random_fn = [&]() {
        GridFn f = GridFn::zero(g);
        for (auto& v : f.values) v = dist(rng);
        return f;
    };
    for (int rep = 0; rep < 20; ++rep) {
        GridFn a = random_fn(), b = random_fn();
        CHECK(quadrature(a) >= 0.0);
        GridFn combo = GridFn::zero(g);
        for (int k = 0; k <= g.n; ++k) combo[k] = 2.5 * a[k] - 0.5 * b[k];
        CHECK(quadrature(combo) ==
              doctest::Approx(2.5 * quadrature(a) - 0.5 * quadrature(b)).epsilon(1e-12));
    }
}

TEST_CASE("derivative: constants, linears, sin") {
    Grid g(0.0, 2.0 * M_PI, 1000);
    GridFn c = GridFn::sample(g, [](double) { return 4.2; });
    for (double v : derivative(c).values) CHECK(std::abs(v) < 1e-12);

    GridFn lin = GridFn::sample(g, [](double x) { return x; });
    for (double v : derivative(lin).values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    GridFn s = GridFn::sample(g, [](double x) { return std::sin(x); });
    GridFn ds = derivative(s);
    double err = 0.0;
    for (int k = 0; k <= g.n; ++k) err = std::max(err, std::abs(ds[k] - std::cos(g.node(k))));
    CHECK(err < 1e-5);
}

TEST_CASE("discrete fundamental theorem") {
    Grid g(-1.0, 2.0, 300);
    GridFn f = GridFn::sample(g, [](double x) { return std::exp(-x * x) * std::sin(3 * x); });
    const double lhs = quadrature(derivative(f));
    const double rhs = f[g.n] - f[0];
    CHECK(std::abs(lhs - rhs) < 10.0 * g.h() * g.h());
}

TEST_CASE("spectral transform: impulse, round-trip, pure mode") {
    Grid g(0.0, 1.0, 16);
    GridFn delta = GridFn::zero(g);
    delta[0] = 1.0;
    auto coeff = spectral_transform(delta);
    for (const auto& c : coeff) {
        CHECK(c.real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(c.imag()) < 1e-14);
    }

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Grid g2(-3.0, 5.0, 128);
    GridFn noise = GridFn::zero(g2);
    for (int k = 0; k < g2.n; ++k) noise[k] = dist(rng);
    noise[g2.n] = noise[0];
    GridFn back = inverse_spectral_transform(g2, spectral_transform(noise));
    double err = 0.0, scale = noise.max_abs();
    for (int k = 0; k <= g2.n; ++k) err = std::max(err, std::abs(back[k] - noise[k]));
    CHECK(err < 1e-12 * scale);

    const int mode = 5;
    Grid g3(0.0, 2.0, 64);
    GridFn wave = GridFn::sample(g3, [&](double x) { return std::cos(2.0 * M_PI * mode * x / 2.0); });
    auto ch = spectral_transform(wave);
    for (int j = 0; j < g3.n; ++j) {
        const int s = std::abs(signed_mode(j, g3.n));
        if (s == mode)
            CHECK(std::abs(ch[static_cast<size_t>(j)]) == doctest::Approx(g3.n / 2.0).epsilon(1e-12));
        else
            CHECK(std::abs(ch[static_cast<size_t>(j)]) < 1e-10);
    }
}

TEST_CASE("spectral transform rejects non-power-of-two") {
    Grid g(0.0, 1.0, 12);
    CHECK_THROWS_AS(spectral_transform(GridFn::zero(g)), ValidationError);
}
