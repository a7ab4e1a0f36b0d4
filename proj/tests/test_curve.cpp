#include "doctest.h"
#include "kdvspec/curve.hpp"
#include "kdvspec/elliptic.hpp"
#include "kdvspec/quadrature.hpp"

#include <cmath>
#include <random>

using namespace kdvspec;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx I{0.0, 1.0};

HyperellipticCurve band_curve() { return HyperellipticCurve::create({-1.0, 0.0, 1.0}); }
}  // namespace

TEST_CASE("quadrature: smooth and endpoint-singular reference integrals") {
    auto r = integrate_adaptive([](double t) { return cplx(t * t, 0.0); }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-12);
    CHECK(r.converged);
    auto s = integrate_segment([](cplx z) { return z * z; }, cplx(0, 0), cplx(0, 1), 1e-12);
    CHECK(std::abs(s.value - (-I / 3.0)) < 1e-12);
    // 1/sqrt(z) from 0 to 1 with a singular left endpoint.
    auto t = integrate_segment_endpoint_sqrt(
        [](cplx z) { return 1.0 / std::sqrt(z); }, cplx(0, 0), cplx(1, 0), true, false, 1e-12);
    CHECK(std::abs(t.value - 2.0) < 1e-10);
    auto u = integrate_segment_endpoint_sqrt(
        [](cplx z) { return 1.0 / std::sqrt(1.0 - z); }, cplx(0, 0), cplx(1, 0), false, true,
        1e-12);
    CHECK(std::abs(u.value - 2.0) < 1e-10);
}

TEST_CASE("curve construction: cuts, errors, serialization") {
    auto c = band_curve();
    REQUIRE(c.genus() == 1);
    REQUIRE(c.cuts().size() == 2);
    CHECK(!c.cuts()[0].is_ray);
    CHECK(c.cuts()[0].pa == cplx(-1.0, 0.0));
    CHECK(c.cuts()[0].pb == cplx(0.0, 0.0));
    CHECK(c.cuts()[1].is_ray);
    CHECK(c.cuts()[1].pa == cplx(1.0, 0.0));
    CHECK(c.cuts()[1].ray_angle == doctest::Approx(0.0));
    CHECK(c.base_branch_point() == cplx(-1.0, 0.0));

    CHECK_THROWS_AS(HyperellipticCurve::create({0.0, 0.0, 1.0}), CurveError);
    CHECK_THROWS_AS(HyperellipticCurve::create({0.0, 1.0}), CurveError);

    auto back = HyperellipticCurve::from_json(c.to_json());
    CHECK(back.cuts().size() == c.cuts().size());
    CHECK(back.branch_points() == c.branch_points());
    CHECK(back.cuts()[1].ray_angle == doctest::Approx(c.cuts()[1].ray_angle));
}

TEST_CASE("sqrt_R: branch consistency, boundary values, reflection") {
    auto c = band_curve();
    // Spec value on the ray from above.
    CHECK(std::abs(c.sqrt_R_side(1, cplx(4.0, 0.0), +1) - std::sqrt(60.0)) < 1e-12);
    CHECK(std::abs(c.sqrt_R_side(1, cplx(4.0, 0.0), -1) + std::sqrt(60.0)) < 1e-12);
    CHECK(std::abs(c.sqrt_R(cplx(4.0, 1e-9)) - std::sqrt(60.0)) < 1e-6);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    int checked = 0;
    while (checked < 100) {
        cplx z{d(rng), d(rng)};
        if (c.distance_to_cuts(z) < 1e-3) continue;
        ++checked;
        cplx v = c.sqrt_R(z);
        CHECK(std::abs(v * v - c.R(z)) <= 1e-12 * std::abs(c.R(z)));
        // Reflection for a real curve: the square is Schwarz-symmetric, and
        // with cuts along the bands (where R > 0) the branch itself reflects
        // with a global sign flip.
        CHECK(std::abs(c.sqrt_R(std::conj(z)) + std::conj(v)) <=
              1e-12 * (1.0 + std::abs(v)));
    }

    // Same consistency on a generic complex curve.
    auto g = HyperellipticCurve::create(
        {cplx(-1.1, 0.4), cplx(0.2, -0.7), cplx(0.9, 0.8), cplx(2.0, -0.3), cplx(3.1, 1.1)});
    checked = 0;
    while (checked < 100) {
        cplx z{2.0 * d(rng), 2.0 * d(rng)};
        if (g.distance_to_cuts(z) < 1e-3 * g.scale()) continue;
        ++checked;
        cplx v = g.sqrt_R(z);
        CHECK(std::abs(v * v - g.R(z)) <= 1e-11 * std::abs(g.R(z)));
    }
}

TEST_CASE("tracked square root: loop continuation") {
    auto c = band_curve();
    // A loop around both endpoints of the finite cut returns to the start.
    TrackedSqrt tr(c);
    cplx center{-0.5, 0.0};
    double rad = 0.8;
    cplx first = tr.eval(center + rad);
    cplx last;
    for (int k = 1; k <= 400; ++k) {
        double th = 2.0 * kPi * k / 400.0;
        last = tr.eval(center + rad * std::exp(I * th));
    }
    CHECK(std::abs(last - first) < 1e-9);
    // A loop around a single branch point flips the sheet.
    TrackedSqrt tr2(c);
    cplx c2{-1.0, 0.0};
    double r2 = 0.35;
    cplx f2 = tr2.eval(c2 + r2);
    cplx l2;
    for (int k = 1; k <= 400; ++k) {
        double th = 2.0 * kPi * k / 400.0;
        l2 = tr2.eval(c2 + r2 * std::exp(I * th));
    }
    CHECK(std::abs(l2 + f2) < 1e-9);
}

TEST_CASE("a-period against a dense trapezoid oracle") {
    auto c = band_curve();
    std::vector<cplx> one = {cplx(1.0, 0.0)};
    cplx period = a_period(c, one, 1);
    // Independent oracle: dense midpoint rule in the Chebyshev angle along
    // the connector (0 -> 1, both endpoints branch points), Richardson
    // extrapolated once.
    auto midpoint = [&](int N) {
        cplx mid{0.5, 0.0}, half{0.5, 0.0};
        cplx acc = 0.0;
        for (int k = 0; k < N; ++k) {
            double th = kPi * (k + 0.5) / N;
            cplx z = mid - half * std::cos(th);
            acc += half * std::sin(th) / c.sqrt_R(z);
        }
        return acc * (kPi / N) * 2.0;
    };
    cplx m1 = midpoint(20000), m2 = midpoint(40000);
    cplx acc = m2 + (m2 - m1) / 3.0;
    CHECK(std::abs(period - acc) < 1e-10 * std::abs(acc));
    CHECK(std::abs(period) > 0.1);
}

TEST_CASE("normalization: gap root, moment ratio, vanishing residual, homogeneity") {
    auto c = band_curve();
    auto p = normalize_lambda(c);
    REQUIRE(p.lambda.size() == 1);
    // The normalization root sits inside the inter-cut gap (0, 1).
    CHECK(p.lambda[0].real() > 0.0);
    CHECK(p.lambda[0].real() < 1.0);
    CHECK(std::abs(p.lambda[0].imag()) < 1e-10);
    // Moment-ratio oracle over the same cycle.
    std::vector<cplx> one = {cplx(1.0, 0.0)};
    std::vector<cplx> zpoly = {cplx(0.0, 0.0), cplx(1.0, 0.0)};
    cplx ratio = a_period(c, zpoly, 1) / a_period(c, one, 1);
    CHECK(std::abs(p.lambda[0] - ratio) < 1e-9);
    // Residual of the normalized polynomial over the a-cycle.
    std::vector<cplx> q = {-p.lambda[0], cplx(1.0, 0.0)};
    CHECK(std::abs(a_period(c, q, 1)) < 1e-9);
    // Homogeneity under E -> s E.
    auto cs = HyperellipticCurve::create({-2.0, 0.0, 2.0});
    auto ps = normalize_lambda(cs);
    CHECK(std::abs(ps.lambda[0] - 2.0 * p.lambda[0]) < 1e-8);
    // mean_V bookkeeping.
    CHECK(std::abs(p.mean_V - (0.0 - 2.0 * p.lambda[0])) < 1e-12);
}

TEST_CASE("quadrature convergence: halving the tolerance stays within the estimate") {
    auto c = band_curve();
    auto p1 = normalize_lambda(c, 1e-8);
    auto p2 = normalize_lambda(c, 5e-9);
    CHECK(std::abs(p1.a_mono[0][0] - p2.a_mono[0][0]) <= std::max(p1.quad_error, 1e-14));
}

TEST_CASE("Lame curve normalization matches the closed form") {
    auto s = lame_scenario(1.0, I);
    auto c = HyperellipticCurve::create({s.E[0], s.E[1], s.E[2]});
    auto p = normalize_lambda(c);
    REQUIRE(p.lambda.size() == 1);
    CHECK(std::abs(p.lambda[0] - kPi / 4.0) < 1e-8);
    CHECK(std::abs(p.mean_V + kPi / 2.0) < 1e-7);
    // b-periods of <g>dz are purely imaginary in the default basis here.
    b_periods_of_mean_g(c, p);
    REQUIRE(p.b_periods_gdz.size() == 1);
    CHECK(std::abs(p.b_periods_gdz[0].real()) < 1e-8 * std::abs(p.b_periods_gdz[0]));
    CHECK(p.basis_verified);
}

TEST_CASE("self-adjoint curve: purely imaginary b-periods, identity transform optimal") {
    auto c = band_curve();
    auto p = normalize_lambda(c);
    b_periods_of_mean_g(c, p);
    CHECK(std::abs(p.b_periods_gdz[0].real()) < 1e-8 * std::abs(p.b_periods_gdz[0]));
    auto outcome = symplectic_basis_search(c, p, 2);
    CHECK(outcome == BasisSearchOutcome::verified);
    // Identity transform is already optimal.
    CHECK(p.basis_transform[0][0] == 1);
    CHECK(p.basis_transform[0][1] == 0);
    CHECK(p.basis_transform[1][0] == 0);
    CHECK(p.basis_transform[1][1] == 1);
}

TEST_CASE("conjugate-pair Lame curve: basis search reaches the real-B condition") {
    auto s = lame_scenario(cplx(1.0, -0.45), 0.0, LameVariant::conjugate_pair);
    auto c = HyperellipticCurve::create({s.E[0], s.E[1], s.E[2]});
    auto p = normalize_lambda(c);
    b_periods_of_mean_g(c, p);
    auto outcome = symplectic_basis_search(c, p, 3, 1e-6);
    CHECK(outcome == BasisSearchOutcome::verified);
    REQUIRE(p.lambda.size() == 1);
    CHECK(std::abs(p.lambda[0] - s.lambda1_expected) < 1e-7);
    CHECK(std::abs(p.mean_V - s.mean_V_expected) < 1e-6);
}

TEST_CASE("dirichlet zeros") {
    auto s = lame_scenario(1.0, I);
    auto c = HyperellipticCurve::create({s.E[0], s.E[1], s.E[2]});
    double bound = 0.0;
    for (int k = 0; k < 12; ++k) {
        double x = 0.07 + 1.8 * k / 12.0;
        auto mu = dirichlet_mu(c, s.sample(x, 2));
        REQUIRE(mu.size() == 1);
        cplx expected = -wp(s.lattice, cplx(x, 0.0) + s.lattice.omega3);
        CHECK(std::abs(mu[0] - expected) < 1e-9 * (1.0 + std::abs(expected)));
        bound = std::max(bound, std::abs(mu[0]));
    }
    CHECK(bound < 10.0);  // Dirichlet data stays bounded along the line
}

TEST_CASE("path planner detours around cuts") {
    auto c = band_curve();
    // Straight path from below to above the finite cut must detour.
    auto path = c.plan_path(cplx(-0.5, -1.0), cplx(-0.5, 1.0), 1e-3);
    REQUIRE(path.size() >= 3);
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        std::array<cplx, 2> ends = {path.front(), path.back()};
        CHECK(c.segment_clear(path[i], path[i + 1], 5e-4, ends));
    }
}
