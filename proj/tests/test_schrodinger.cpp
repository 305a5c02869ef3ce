#include <cmath>
#include <random>

#include "doctest.h"
#include "miura/oracle.hpp"
#include "miura/schrodinger.hpp"

using namespace miura;

TEST_CASE("integrate: free trivial data stays constant") {
    Grid g(-5.0, 5.0, 200);
    Potential q0 = make_zero(g);
    QuasiSolution s = integrate(q0, 0.0, -5.0, 1.0, 0.0, 5.0);
    for (int k = 0; k <= g.n; ++k) {
        CHECK(s.y[static_cast<size_t>(k)] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(s.u[static_cast<size_t>(k)]) < 1e-13);
    }
}

TEST_CASE("integrate: free oscillator reproduces sin") {
    Grid g(0.0, M_PI, 2000);
    Potential q0 = make_zero(g);
    QuasiSolution s = integrate(q0, 1.0, 0.0, 0.0, 1.0, M_PI);
    double err = 0.0;
    for (int k = 0; k <= g.n; ++k)
        err = std::max(err, std::abs(s.y[static_cast<size_t>(k)] - std::sin(g.node(k))));
    CHECK(err < 1e-8);
}

TEST_CASE("integrate: square-well closed form reproduced to 1e-6") {
    Grid g(-5.0, 5.0, 10000); // h = 1e-3
    Potential q = make_square_well(1.0, 1.0, g);
    const double y0 = oracle::square_well_solution(1.0, 1.0, -5.0);
    QuasiSolution s = integrate(q, 0.0, -5.0, y0, 0.0, 5.0);
    double rel = 0.0;
    for (int k = 0; k <= g.n; ++k) {
        const double exact = oracle::square_well_solution(1.0, 1.0, g.node(k));
        rel = std::max(rel, std::abs(s.y[static_cast<size_t>(k)] - exact) / exact);
    }
    CHECK(rel < 1e-6);
}

TEST_CASE("integrate: input validation and rescaling") {
    Grid g(-5.0, 5.0, 100);
    Potential q0 = make_zero(g);
    CHECK_THROWS_AS(integrate(q0, 0.0, -5.0, 0.0, 0.0, 5.0), ValidationError);
    CHECK_THROWS_AS(integrate(q0, 0.0, -4.95, 1.0, 0.0, 5.0), ValidationError); // off-node by half a cell

    // deep negative lambda grows ~ e^{40 sqrt(|lambda|)}; rescaling keeps it finite
    Grid glong(-20.0, 20.0, 2000);
    Potential qz = make_zero(glong);
    QuasiSolution s = integrate(qz, -400.0, -20.0, 0.0, 1.0, 20.0);
    CHECK(s.rescaled);
    CHECK(std::isfinite(s.y.back()));
    CHECK(s.log_scale.back() > 100.0);
}

TEST_CASE("count_zeros: sine, Dirichlet shots, oscillation duality") {
    Grid g(0.0, 4.0 * M_PI, 4000);
    Potential q0 = make_zero(g);
    QuasiSolution s = integrate(q0, 1.0, 0.0, 0.0, 1.0, 4.0 * M_PI);
    CHECK(count_zeros(s, 0.0, 3.5 * M_PI) == 3);

    for (int kzeros : {1, 2, 5}) {
        Grid gk(0.0, kzeros * M_PI + 0.5, 2000 * kzeros);
        Potential qk = make_zero(gk);
        QuasiSolution sk = integrate(qk, 1.0, 0.0, 0.0, 1.0, gk.b);
        CHECK(count_zeros(sk, 0.0, gk.b) == kzeros);
    }

    // q=0 on (0,b): zeros of the lambda-shot = floor(b sqrt(lambda) / pi)
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lam(0.3, 9.0);
    Grid gb(0.0, 7.0, 7000);
    Potential qb = make_zero(gb);
    for (int rep = 0; rep < 8; ++rep) {
        const double lambda = lam(rng);
        QuasiSolution sh = integrate(qb, lambda, 0.0, 0.0, 1.0, gb.b);
        CHECK(count_zeros(sh, 0.0, gb.b) ==
              static_cast<int>(std::floor(gb.b * std::sqrt(lambda) / M_PI)));
    }
}

TEST_CASE("count_zeros: ambiguous data is rejected") {
    Grid g(0.0, 1.0, 10);
    QuasiSolution fake;
    fake.grid = g;
    fake.trail_x = {0.0, 0.25, 0.5, 0.75, 1.0};
    fake.trail_y = {1.0, 0.5, 1e-15, -0.5, -1.0};
    fake.trail_u = {0.1, 0.1, 1e-15, 0.1, 0.1};
    CHECK_THROWS_AS(count_zeros(fake, 0.0, 1.0), NumericalError);
}

TEST_CASE("trichotomy probe") {
    Grid g(-2.0, 6.0, 800);
    Potential q0 = make_zero(g);
    QuasiSolution s = integrate(q0, 1.0, 0.0, 0.0, 1.0, 6.0); // sin from 0
    CHECK(trichotomy_probe(s, 0.0) == Trichotomy::sign_change_up);

    QuasiSolution zero;
    zero.grid = g;
    zero.lambda = 0.0;
    zero.y.assign(static_cast<size_t>(g.n + 1), 0.0);
    zero.u.assign(static_cast<size_t>(g.n + 1), 0.0);
    zero.log_scale.assign(static_cast<size_t>(g.n + 1), 0.0);
    zero.first_node = 0;
    zero.last_node = g.n;
    CHECK(trichotomy_probe(zero, 1.0) == Trichotomy::identically_zero);

    // delta potential: the shot w(0)=0, u(0)=1 has w > 0 to the right
    Potential qd = make_delta(1.0, 0.0, Grid(-2.0, 6.0, 800));
    QuasiSolution w = integrate(qd, 0.0, 0.0, 0.0, 1.0, 6.0);
    CHECK(trichotomy_probe(w, 0.0) == Trichotomy::sign_change_up);
    CHECK(w.y.back() > 0.0);
}

TEST_CASE("dirichlet_lambda0: free interval, constant shift, square well vs fd oracle") {
    Grid g(0.0, M_PI, 3142);
    CHECK(std::abs(dirichlet_lambda0(make_zero(g), 0.0, M_PI) - 1.0) < 1e-8);
    CHECK(std::abs(dirichlet_lambda0(make_constant(2.5, g), 0.0, M_PI) - 3.5) < 1e-8);

    Grid gw(-10.0, 10.0, 2000);
    Potential qw = make_square_well(1.0, 1.0, gw);
    const double engine = dirichlet_lambda0(qw, -10.0, 10.0);
    const double fd = oracle::fd_lowest_eigenvalue(qw, -10.0, 10.0, 4000).lambda0;
    CHECK(std::abs(engine - fd) < 1e-5);
}

TEST_CASE("lambda0_line: free decay, constant") {
    Grid g(-101.0, 101.0, 4040);
    Potential q0 = make_zero(g);
    SpectralReport rep = lambda0_line(q0, {12.5, 25.0, 50.0, 100.0});
    CHECK(rep.nonneg == Verdict::certified_nonneg_up_to_truncation);
    CHECK(rep.lambda0_estimate < 1e-3);
    CHECK(rep.lambda0_estimate > 0.0);
    // (pi/2L)^2 for the free operator
    CHECK(rep.lambda0_estimate == doctest::Approx(std::pow(M_PI / 200.0, 2)).epsilon(1e-3));
    for (size_t i = 1; i < rep.lambda0_of_L.size(); ++i)
        CHECK(rep.lambda0_of_L[i] <= rep.lambda0_of_L[i - 1] + 1e-10);

    Potential qc = make_constant(0.7, g);
    SpectralReport repc = lambda0_line(qc, {12.5, 25.0, 50.0, 100.0});
    CHECK(std::abs(repc.lambda0_estimate - 0.7) < 1e-3);
}

TEST_CASE("is_nonnegative: free, square well, well perturbation") {
    Grid g(-20.0, 20.0, 2000);
    CHECK(is_nonnegative(make_zero(g)).verdict == Verdict::certified_nonneg_up_to_truncation);
    CHECK(is_nonnegative(make_square_well(1.0, 1.0, g)).verdict ==
          Verdict::certified_nonneg_up_to_truncation);

    Grid gp(-20.0, 320.0, 6800);
    Potential qp = make_well_perturbation(make_zero(gp), 0.01);
    PositivityResult res = is_nonnegative(qp);
    CHECK(res.verdict == Verdict::negative_witness);
    REQUIRE(res.witness_interval.has_value());
}

TEST_CASE("positive_solution: free potential gives the constant") {
    Grid g(-20.0, 20.0, 2000);
    PrincipalSolution p = positive_solution(make_zero(g), Side::plus);
    PrincipalSolution m = positive_solution(make_zero(g), Side::minus);
    double errp = 0.0, errm = 0.0;
    for (int k = 0; k <= g.n; ++k) {
        errp = std::max(errp, std::abs(p.sol.y[static_cast<size_t>(k)] - 1.0));
        errm = std::max(errm, std::abs(m.sol.y[static_cast<size_t>(k)] - 1.0));
    }
    CHECK(errp < 1e-9);
    CHECK(errm < 1e-9);
}

TEST_CASE("positive_solution: square well principal solutions match the closed form") {
    Grid g(-15.0, 15.0, 6000);
    Potential q = make_square_well(1.0, 1.0, g);
    PrincipalSolution plus = positive_solution(q, Side::plus);
    double rel = 0.0;
    for (int k = 0; k <= g.n; ++k) {
        // principal at +inf is the mirror y_-(x) = y_+(-x), already 1 at x=0
        const double exact = oracle::square_well_solution(1.0, 1.0, -g.node(k));
        rel = std::max(rel, std::abs(plus.sol.y[static_cast<size_t>(k)] - exact) / exact);
    }
    CHECK(rel < 1e-5);

    PrincipalSolution minus = positive_solution(q, Side::minus);
    rel = 0.0;
    for (int k = 0; k <= g.n; ++k) {
        const double exact = oracle::square_well_solution(1.0, 1.0, g.node(k));
        rel = std::max(rel, std::abs(minus.sol.y[static_cast<size_t>(k)] - exact) / exact);
    }
    CHECK(rel < 1e-5);
}

TEST_CASE("positive_solution: constant potential decays exponentially on the window") {
    Grid g(-20.0, 20.0, 4000);
    Potential q1 = make_constant(1.0, g);
    PrincipalSolution plus = positive_solution(q1, Side::plus);
    double rel = 0.0;
    for (int k = 0; k <= g.n; ++k) {
        const double x = g.node(k);
        if (std::abs(x) > 5.0) continue;
        const double exact = std::exp(-x);
        rel = std::max(rel, std::abs(plus.sol.y[static_cast<size_t>(k)] - exact) / exact);
    }
    CHECK(rel < 1e-6);
}

TEST_CASE("positive_solution: shot monotonicity in the schedule") {
    Grid g(-12.0, 12.0, 2400);
    Potential q = make_square_well(1.0, 1.0, g);
    auto shot = [&](double c) {
        QuasiSolution s = shoot_full(q, 0.0, g.node_index(c, 1e-9), 0.0, -1.0);
        const int k0 = g.node_index(0.0, 1e-9);
        const double y0 = s.y[static_cast<size_t>(k0)];
        std::vector<double> out(s.y.size());
        for (size_t k = 0; k < s.y.size(); ++k) out[k] = s.y[k] / y0;
        return out;
    };
    auto y5 = shot(5.0), y8 = shot(8.0);
    for (int k = 0; k <= g.n; ++k) {
        const double x = g.node(k);
        if (x > 0.05 && x < 5.0) CHECK(y8[static_cast<size_t>(k)] >= y5[static_cast<size_t>(k)] - 1e-12);
        if (x < -0.05) CHECK(y8[static_cast<size_t>(k)] <= y5[static_cast<size_t>(k)] + 1e-12);
    }
}

TEST_CASE("wronskian constancy for fundamental pairs over the fixture set") {
    Grid g(-15.0, 15.0, 3000);
    std::vector<Potential> fixtures;
    fixtures.push_back(make_zero(g));
    fixtures.push_back(make_constant(0.8, g));
    fixtures.push_back(make_square_well(1.0, 1.0, g));
    fixtures.push_back(make_delta(1.0, 0.0, g));
    fixtures.push_back(make_w_eps(0.2, g));
    const int k0 = g.node_index(0.0, 1e-9);
    for (const Potential& q : fixtures) {
        for (double lambda : {0.0, -0.5, 2.0}) {
            QuasiSolution s1 = shoot_full(q, lambda, k0, 1.0, 0.0);
            QuasiSolution s2 = shoot_full(q, lambda, k0, 0.0, 1.0);
            CHECK(wronskian_deviation(s1, s2) < 1e-8);
        }
    }
}

TEST_CASE("greens function: constant potential kernel, symmetry, resolvent check") {
    Grid g(-15.0, 15.0, 1500);
    Potential q1 = make_constant(1.0, g);
    GreenKernel K = greens_function(q1);
    CHECK(K.wronskian == doctest::Approx(2.0).epsilon(1e-8));

    double kerr = 0.0;
    for (int i = 0; i <= g.n; i += 7)
        for (int j = 0; j <= g.n; j += 7)
            kerr = std::max(kerr, std::abs(K(i, j) - oracle::constant_green(1.0, g.node(i), g.node(j))));
    CHECK(kerr < 1e-5);

    double asym = 0.0;
    for (int i = 0; i <= g.n; i += 13)
        for (int j = 0; j <= g.n; j += 13) asym = std::max(asym, std::abs(K(i, j) - K(j, i)));
    CHECK(asym < 1e-10);

    // T f solved two ways: kernel application vs the fd matrix oracle
    GridFn f = GridFn::sample(g, [](double x) { return std::exp(-x * x) * (1.0 + 0.3 * x); });
    std::vector<double> u = apply_kernel(K, f);
    std::vector<double> rhs(static_cast<size_t>(g.n - 1));
    for (int i = 1; i < g.n; ++i) rhs[static_cast<size_t>(i - 1)] = f[i];
    std::vector<double> ufd = oracle::fd_solve(q1, g.a, g.b, g.n, rhs);
    double scale = 0.0, diff = 0.0;
    for (int i = 1; i < g.n; ++i) {
        scale = std::max(scale, std::abs(u[static_cast<size_t>(i)]));
        diff = std::max(diff, std::abs(u[static_cast<size_t>(i)] - ufd[static_cast<size_t>(i - 1)]));
    }
    CHECK(diff < 1e-3 * scale);
}

TEST_CASE("greens function refuses a potential without a spectral gap") {
    Grid g(-15.0, 15.0, 600);
    CHECK_THROWS_AS(greens_function(make_zero(g)), NumericalError);
}
