#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "pressure_lab/error.hpp"
#include "pressure_lab/random_models.hpp"
#include "pressure_lab/scenarios.hpp"
#include "pressure_lab/smooth2d.hpp"

using namespace pressure_lab;
using namespace pressure_lab::smooth2d;

namespace {

const double kCatLambda = (3.0 + std::sqrt(5.0)) / 2.0;
const double kCatExponent = std::log(kCatLambda);

double angle_between(Vec2 a, Vec2 b) { return line_angle(a, b); }

// Central differences of the lift, independent of the analytic Jacobians.
Mat2 numeric_jacobian(const SmoothMap2D& map, Vec2 p) {
    constexpr double h = 1e-6;
    const Vec2 dx = (1.0 / (2 * h)) * (map.lift({p.x + h, p.y}) - map.lift({p.x - h, p.y}));
    const Vec2 dy = (1.0 / (2 * h)) * (map.lift({p.x, p.y + h}) - map.lift({p.x, p.y - h}));
    return {dx.x, dy.x, dx.y, dy.y};
}

SplittingEstimate splitting_for(const SmoothMap2D& map, Vec2 x0, std::size_t covered) {
    return oseledets_directions(map, orbit(map, x0, covered + 2 * kOseledetsHorizon));
}

}  // namespace

TEST_CASE("built-in maps: analytic Jacobians match finite differences") {
    Rng rng(7);
    for (const auto& name : builtin_map_names()) {
        CAPTURE(name);
        const auto map = make_map(name);
        for (int i = 0; i < 200; ++i) {
            const Vec2 p{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
            const Mat2 a = map.jacobian(p);
            const Mat2 b = numeric_jacobian(map, p);
            CHECK((a - b).norm() <= 1e-6 * std::max(1.0, a.norm()));
        }
    }
}

TEST_CASE("built-in maps: area preservation and domain invariance") {
    Rng rng(11);
    for (const char* name : {"cat", "perturbed_cat", "standard"}) {
        CAPTURE(name);
        const auto map = make_map(name);
        REQUIRE(map.area_preserving());
        for (int i = 0; i < 10000; ++i) {
            const Vec2 p{rng.uniform(), rng.uniform()};
            CHECK(std::abs(std::abs(map.jacobian(p).det()) - 1.0) <= 1e-10);
            const Vec2 q = map(p);
            CHECK((q.x >= 0.0 && q.x < 1.0 && q.y >= 0.0 && q.y < 1.0));
        }
    }
    const auto sinks = two_sinks_map();
    for (int i = 0; i < 1000; ++i) {
        const Vec2 q = sinks({rng.uniform(), rng.uniform()});
        CHECK((q.x >= 0.0 && q.x <= 1.0 && q.y >= 0.0 && q.y <= 1.0));
    }
}

TEST_CASE("built-in maps: inverses and registry errors") {
    Rng rng(3);
    for (const char* name : {"cat", "perturbed_cat", "standard", "two_sinks"}) {
        CAPTURE(name);
        const auto map = make_map(name);
        REQUIRE(map.invertible());
        for (int i = 0; i < 200; ++i) {
            const Vec2 p{rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99)};
            CHECK(map.distance(map.inverse(map(p)), p) <= 1e-10);
        }
    }
    CHECK_THROWS_AS(make_map("nosuch"), Error);
    try {
        make_map("nosuch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownMap);
    }
    CHECK_THROWS_AS(make_map("standard", {{"q", 1.0}}), Error);
    CHECK(make_map("standard", {{"k", 0.7}}).parameters().at("k") == 0.7);
}

TEST_CASE("lyapunov_exponents examples") {
    const auto id = lyapunov_exponents(identity_map(), {0.3, 0.4}, 1000);
    CHECK(id.lambda1 == 0.0);
    CHECK(id.lambda2 == 0.0);

    const auto cat = lyapunov_exponents(cat_map(), {0.1234, 0.5678}, 10000);
    CHECK(std::abs(cat.lambda1 - kCatExponent) <= 1e-4);

    const auto prod = lyapunov_exponents(product_map(std::numbers::phi - 1.0), {0.2, 0.7}, 1000);
    CHECK(prod.lambda1 == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    CHECK(std::abs(prod.lambda2) <= 1e-12);

    // Elliptic island of the standard map: bounded orbit, zero exponents.
    const auto island = lyapunov_exponents(standard_map(0.5), {0.5, 0.05}, 100000);
    CHECK(std::abs(island.lambda1) <= 5e-3);
}

TEST_CASE("property: exponents are ordered and sum to zero for area-preserving maps") {
    Rng rng(42);
    for (const char* name : {"cat", "perturbed_cat", "standard"}) {
        CAPTURE(name);
        const auto map = make_map(name);
        for (int i = 0; i < 100; ++i) {
            const auto ex = lyapunov_exponents(map, {rng.uniform(), rng.uniform()}, 2000);
            CHECK(ex.lambda1 >= ex.lambda2);
            CHECK(std::abs(ex.lambda1 + ex.lambda2) <= 1e-6);
        }
    }
}

TEST_CASE("oseledets_directions examples") {
    const auto cat = cat_map();
    const auto split = splitting_for(cat, {0.1234, 0.5678}, 500);
    REQUIRE(split.points.size() >= 500);
    // Oracle: eigenvectors of [[2,1],[1,1]].
    const Vec2 unstable = normalized(Vec2{1.0, kCatLambda - 2.0});
    const Vec2 stable = normalized(Vec2{1.0, 1.0 / kCatLambda - 2.0});
    for (std::size_t i = 0; i < split.points.size(); ++i) {
        CHECK(angle_between(split.f_dirs[i], unstable) <= 1e-6);
        CHECK(angle_between(split.e_dirs[i], stable) <= 1e-6);
        CHECK(std::abs(norm(split.f_dirs[i]) - 1.0) <= 1e-12);
        CHECK(std::abs(norm(split.e_dirs[i]) - 1.0) <= 1e-12);
    }
    CHECK(split.equivariance_residual <= 1e-6);

    const auto diag = splitting_for(diagonal_map(), {0.3, 0.2}, 300);
    REQUIRE(!diag.points.empty());
    CHECK(angle_between(diag.f_dirs.front(), {1.0, 0.0}) <= 1e-12);
    CHECK(angle_between(diag.e_dirs.front(), {0.0, 1.0}) <= 1e-12);

    const auto prod = splitting_for(product_map(std::numbers::phi - 1.0), {0.3, 0.2}, 300);
    REQUIRE(!prod.points.empty());
    for (std::size_t i = 0; i < prod.points.size(); ++i) {
        CHECK(angle_between(prod.f_dirs[i], {1.0, 0.0}) <= 1e-12);
        CHECK(angle_between(prod.e_dirs[i], {0.0, 1.0}) <= 1e-12);
    }
}

TEST_CASE("property: equivariance on hyperbolic built-ins") {
    for (const char* name : {"cat", "perturbed_cat"}) {
        CAPTURE(name);
        const auto map = make_map(name);
        const auto split = splitting_for(map, {0.31, 0.77}, 400);
        CHECK(split.equivariance_residual <= 1e-6);
        for (std::size_t i = 0; i + 1 < split.points.size(); ++i) {
            CHECK(angle_between(map.jacobian(split.points[i]) * split.f_dirs[i], split.f_dirs[i + 1]) <= 1e-6);
        }
    }
}

TEST_CASE("oseledets_directions rejects maps without a splitting") {
    for (const auto& map : {identity_map(), rotation_map(1.0)}) {
        try {
            splitting_for(map, {0.3, 0.6}, 300);
            FAIL("expected DegenerateSplitting");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DegenerateSplitting);
        }
    }
}

TEST_CASE("domination_check examples") {
    const auto cat = cat_map();
    const auto split = splitting_for(cat, {0.1234, 0.5678}, 300);
    const auto k2 = domination_check(cat, split, 2);
    CHECK(k2.global);
    // Oracle ratio (lambda_-/lambda_+)^2.
    CHECK(k2.ratios.front() == doctest::Approx(std::pow(kCatLambda, -4.0)).epsilon(1e-6));

    const auto prod_map = product_map(std::numbers::phi - 1.0);
    const auto prod = splitting_for(prod_map, {0.3, 0.2}, 300);
    CHECK_FALSE(domination_check(prod_map, prod, 1).global);  // ratio exactly 1/2
    CHECK(domination_check(prod_map, prod, 2).global);         // ratio 1/4
    CHECK(domination_time(prod_map, prod, 5) == 2);

    // Identity: ratio 1 for any pair of directions.
    SplittingEstimate any;
    any.points = {{0.2, 0.3}, {0.7, 0.1}};
    any.e_dirs = {{0.0, 1.0}, {0.0, 1.0}};
    any.f_dirs = {{1.0, 0.0}, {1.0, 0.0}};
    for (int k : {1, 2, 5}) CHECK_FALSE(domination_check(identity_map(), any, k).global);
}

TEST_CASE("geometric_potential examples") {
    const auto cat = cat_map();
    const auto split = splitting_for(cat, {0.1234, 0.5678}, 200);
    for (const Vec2& p : split.points) CHECK(std::abs(geometric_potential(cat, split, p) + kCatExponent) <= 1e-6);

    const auto diag = diagonal_map();
    const auto dsplit = splitting_for(diag, {0.3, 0.2}, 50);
    CHECK(geometric_potential(diag, dsplit, dsplit.points.front()) == doctest::Approx(-std::numbers::ln2));

    const auto prod_map = product_map(std::numbers::phi - 1.0);
    const auto psplit = splitting_for(prod_map, {0.3, 0.2}, 50);
    for (const Vec2& p : psplit.points) CHECK(geometric_potential(prod_map, psplit, p) == doctest::Approx(-std::numbers::ln2));

    try {
        geometric_potential(cat, split, {0.123456, 0.654321});
        FAIL("expected MissingDirection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingDirection);
    }
}

TEST_CASE("eigenvalue_potential examples") {
    const auto rot = rotation_map(1.0);
    for (int k : {1, 2, 7}) CHECK(std::abs(eigenvalue_potential(rot, k, {0.2, 0.9})) <= 1e-14);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        CHECK(eigenvalue_potential(cat_map(), 1, {rng.uniform(), rng.uniform()}) ==
              doctest::Approx(-kCatExponent).epsilon(1e-12));
    }
    // (1/2, 0) is the elliptic fixed point of the standard map for 0 < k < 4.
    const auto std_map = standard_map(0.5);
    CHECK(std_map.distance(std_map({0.5, 0.0}), {0.5, 0.0}) <= 1e-15);
    CHECK(std::abs(eigenvalue_potential(std_map, 1, {0.5, 0.0})) <= 1e-10);
    CHECK(eigenvalue_potential(std_map, 1, {0.0, 0.0}) < -0.1);  // hyperbolic fixed point
}

TEST_CASE("find_periodic_orbits on the cat map") {
    const auto cat = cat_map();
    const auto one = find_periodic_orbits(cat, 1);
    REQUIRE(one.orbits.size() == 1);
    CHECK(cat.distance(one.orbits.front().points.front(), {0.0, 0.0}) <= 1e-12);

    CHECK(find_periodic_orbits(cat, 2).fixed_point_count == 5);

    for (int n = 1; n <= 8; ++n) {
        CAPTURE(n);
        auto set = find_periodic_orbits(cat, n);
        const double oracle = std::round(std::pow(kCatLambda, n) + std::pow(kCatLambda, -n) - 2.0);
        CHECK(static_cast<double>(set.fixed_point_count) == oracle);
        CHECK(set.complete());
        for (const auto& orbit : set.orbits) {
            CHECK(n % orbit.period == 0);
            Vec2 q = orbit.points.front();
            for (int s = 0; s < orbit.period; ++s) q = cat(q);
            CHECK(cat.distance(q, orbit.points.front()) <= 1e-10);
            for (std::size_t a = 0; a < orbit.points.size(); ++a)
                for (std::size_t b = a + 1; b < orbit.points.size(); ++b)
                    CHECK(cat.distance(orbit.points[a], orbit.points[b]) > 1e-8);
        }
    }
}

TEST_CASE("find_periodic_orbits is independent of the worker count") {
    const auto cat = cat_map();
    OrbitSearchOptions serial;
    serial.threads = 1;
    OrbitSearchOptions parallel;
    parallel.threads = 4;
    const auto a = find_periodic_orbits(cat, 6, serial);
    const auto b = find_periodic_orbits(cat, 6, parallel);
    REQUIRE(a.orbits.size() == b.orbits.size());
    for (std::size_t i = 0; i < a.orbits.size(); ++i) {
        CHECK(a.orbits[i].period == b.orbits[i].period);
        CHECK(a.orbits[i].points.front().x == b.orbits[i].points.front().x);
        CHECK(a.orbits[i].points.front().y == b.orbits[i].points.front().y);
    }
}

TEST_CASE("find_periodic_orbits rejects degenerate maps") {
    try {
        find_periodic_orbits(identity_map(), 1);
        FAIL("expected DegenerateMap");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateMap);
    }
}

TEST_CASE("orbit_pressure_estimate examples") {
    const auto cat = cat_map();
    auto set = find_periodic_orbits(cat, 8);
    const double zero = orbit_pressure_estimate(cat, set, Potential::constant(0.0), 1.0);
    CHECK(std::abs(zero - kCatExponent) <= 0.05);
    for (double c : {-1.0, 0.5, 2.0}) {
        for (double t : {-1.0, 0.3, 2.0}) {
            CHECK(orbit_pressure_estimate(cat, set, Potential::constant(c), t) ==
                  doctest::Approx(zero + t * c).epsilon(1e-12));
        }
    }
    CHECK(std::abs(orbit_pressure_estimate(cat, set, Potential::geometric(), 1.0)) <= 0.05);
}

TEST_CASE("property: cat estimator error decreases with the period") {
    const auto cat = cat_map();
    double previous = std::numeric_limits<double>::infinity();
    for (int n : {4, 6, 8, 10}) {
        const double err = std::abs(orbit_pressure_estimate(cat, Potential::constant(0.0), 0.0, n) - kCatExponent);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("property: entropy growth bounded by top expansion on cat orbits") {
    const auto cat = cat_map();
    for (int n = 1; n <= 8; ++n) {
        const auto set = find_periodic_orbits(cat, n);
        double top = -std::numeric_limits<double>::infinity();
        for (const auto& o : set.orbits) {
            top = std::max(top, std::log(cat.jacobian_power(o.points.front(), n).norm()) / n);
        }
        CHECK(std::log(static_cast<double>(set.fixed_point_count)) / n <= top + 0.01);
    }
}

TEST_CASE("constrained_pressure_estimate examples") {
    for (const auto& map : {cat_map(), diagonal_map()}) {
        CAPTURE(map.name());
        auto set = find_periodic_orbits(map, 5);
        for (double t : {-1.0, 0.0, 1.5}) {
            const double all = orbit_pressure_estimate(map, set, Potential::geometric(), t);
            CHECK(constrained_pressure_estimate(map, set, Potential::geometric(), t, OrbitClass::NonExpanding) ==
                  -std::numeric_limits<double>::infinity());
            CHECK(constrained_pressure_estimate(map, set, Potential::geometric(), t, OrbitClass::Expanding) == all);
        }
    }
}

TEST_CASE("constrained estimates on the hybrid map") {
    const auto s = scenarios::build_hybrid(-0.3);
    const auto& map = *s.map;
    for (int n : {1, 4, 6}) {
        auto set = find_periodic_orbits(map, n);
        for (double t = 0.0; t <= 2.0; t += 0.25) {
            const double minus = constrained_pressure_estimate(map, set, *s.potential, t, OrbitClass::NonExpanding);
            const double plus = constrained_pressure_estimate(map, set, *s.potential, t, OrbitClass::Expanding);
            // Oracle: the envelope over the finite orbit set is the sink orbit alone.
            CHECK(std::abs(minus - 0.3 * t) <= 1e-6);
            // Both classes are non-empty here, so the sum estimator sits between
            // the larger class and that plus log(2)/n.
            const double all = orbit_pressure_estimate(map, set, *s.potential, t);
            CHECK(std::max(minus, plus) <= all);
            CHECK(all <= std::max(minus, plus) + std::log(2.0) / n + 1e-12);
        }
    }
}

TEST_CASE("birkhoff_average examples") {
    CHECK(birkhoff_average(cat_map(), Potential::constant(2.5), {0.1, 0.2}, 100) == doctest::Approx(2.5));
    const auto s = scenarios::build_two_sinks(2);
    // Basins: x in (0, 1/2) flows to the sink at x = 1/4, x in (1/2, 1) to x = 3/4.
    CHECK(std::abs(birkhoff_average(*s.map, *s.potential, {0.4, 0.8}, 10'000'000) - 1.0) <= 1e-6);
    CHECK(std::abs(birkhoff_average(*s.map, *s.potential, {0.6, 0.1}, 10'000'000) - 0.5) <= 1e-6);
}
