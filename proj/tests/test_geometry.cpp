#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "caloric/geometry.hpp"
#include "caloric/util.hpp"

using namespace caloric;

TEST_CASE("whole space and box membership") {
    auto ws = Domain::whole_space(2);
    CHECK(ws.contains({1e9, -1e9}));
    CHECK(ws.boundary_distance({0.0, 0.0}) == std::numeric_limits<double>::infinity());

    auto bx = Domain::box({1.0, 2.0});
    CHECK(bx.contains({0.5, 1.9}));
    CHECK_FALSE(bx.contains({0.5, 2.0}));   // open set
    CHECK_FALSE(bx.contains({-0.1, 1.0}));
    CHECK(bx.boundary_distance({0.25, 1.0}) == doctest::Approx(0.25));
    CHECK(bx.boundary_distance({-0.3, -0.4}) == doctest::Approx(0.5));
}

TEST_CASE("graph membership: cone profile") {
    Profile cone;
    cone.kind = Profile::Kind::Cone;
    cone.slope = 0.5;
    auto dom = Domain::graph(2, cone, 1.0);
    CHECK(dom.m == doctest::Approx(0.5));
    CHECK(dom.contains({1.0, 0.6}));        // phi(1) = 0.5 < 0.6
    CHECK_FALSE(dom.contains({1.0, 0.5}));  // boundary is not inside
    CHECK_FALSE(dom.contains({-2.0, 0.9}));
}

TEST_CASE("boundary distance: flat and cone are exact") {
    Profile flat;
    auto half = Domain::graph(2, flat, 8.0);
    CHECK(half.boundary_distance({3.0, 0.7}) == doctest::Approx(0.7).epsilon(1e-12));

    Profile cone;
    cone.kind = Profile::Kind::Cone;
    cone.slope = 0.5;
    auto dom = Domain::graph(2, cone, 1.0);
    // distance from (0,1) to the graph 0.5|x| equals 2/sqrt(5)
    CHECK(dom.boundary_distance({0.0, 1.0}) ==
          doctest::Approx(0.89442719099991588).epsilon(1e-12));
    // apex point: vertical drop is the answer on the axis of symmetry
    CHECK(dom.boundary_distance({0.0, 0.25}) ==
          doctest::Approx(0.25 * 2.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("boundary distance agrees with dense sampling on jagged profiles") {
    Profile saw;
    saw.kind = Profile::Kind::Sawtooth;
    saw.slope = 1.0;
    saw.period = 0.5;
    auto dom = Domain::graph(2, saw, 0.25);

    Profile smp;
    smp.kind = Profile::Kind::Samples;
    smp.xs = {-2.0, -1.0, 0.0, 0.5, 2.0};
    smp.ys = {0.3, 0.0, 0.4, 0.1, 0.2};
    auto dom2 = Domain::graph(2, smp, 0.25);

    std::mt19937_64 rng(716253);
    std::uniform_real_distribution<double> ux(-1.8, 1.8), uy(0.05, 1.2);
    for (int it = 0; it < 40; ++it) {
        double x = ux(rng);
        for (const Domain* d : {&dom, &dom2}) {
            double y = d->phi(x) + uy(rng);
            double got = d->boundary_distance({x, y});
            double ref = std::numeric_limits<double>::infinity();
            for (int k = -40000; k <= 40000; ++k) {
                double s = x + k * 1e-4;
                double dx = s - x, dy = d->phi(s) - y;
                ref = std::min(ref, std::sqrt(dx * dx + dy * dy));
            }
            // sampled minimum overshoots the true distance by at most half a step
            CHECK(got <= ref + 1e-12);
            CHECK(got >= ref - 1e-4);
        }
    }
}

TEST_CASE("profiles respect the declared Lipschitz constant") {
    Profile saw;
    saw.kind = Profile::Kind::Sawtooth;
    saw.slope = 0.75;
    saw.period = 1.0;
    auto dom = Domain::graph(2, saw, 1.0);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 10000; ++i) {
        double a = u(rng), b = u(rng);
        CHECK(std::abs(dom.phi(a) - dom.phi(b)) <= dom.m * std::abs(a - b) + 1e-12);
    }
}

TEST_CASE("corkscrew: half space example and inclusion certificate") {
    Profile flat;
    auto half = Domain::graph(2, flat, 100.0);
    auto cp = corkscrew(half, {0.0, 0.0}, 1.0);
    CHECK(cp.mu == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(cp.inner[0] == doctest::Approx(0.0));
    CHECK(cp.inner[1] == doctest::Approx(0.5));
    CHECK(cp.outer[1] == doctest::Approx(-0.5));

    Profile cone;
    cone.kind = Profile::Kind::Cone;
    cone.slope = 0.5;
    auto dom = Domain::graph(2, cone, 2.0);
    double mu_expect = 1.0 / (4.0 * std::sqrt(1.25));
    std::mt19937_64 rng(9917);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), ur(0.05, 1.9);
    for (int i = 0; i < 10000; ++i) {
        double xc = ux(rng);
        Coords y = {xc, dom.phi(xc)};
        double r = ur(rng);
        auto c = corkscrew(dom, y, r);
        CHECK(c.mu == doctest::Approx(mu_expect).epsilon(1e-14));
        // B_{2 mu r}(inner) inside B_r(y): center offset + radius fits
        CHECK(dist(c.inner, y) + 2.0 * c.mu * r <= r + 1e-12);
        // ... and inside Omega: wall clearance at least 2 mu r
        CHECK(dom.boundary_distance(c.inner) >= 2.0 * c.mu * r - 1e-12);
        // mirrored point clears the outside by the same margin
        CHECK_FALSE(dom.contains(c.outer));
        CHECK(dom.boundary_distance(c.outer) >= 2.0 * c.mu * r - 1e-12);
    }

    CHECK_THROWS_AS(corkscrew(dom, {0.0, 1.0}, 0.5), ConfigError);    // not a wall point
    CHECK_THROWS_AS(corkscrew(dom, {0.0, 0.0}, 2.5), ConfigError);    // r >= r0
    CHECK_THROWS_AS(corkscrew(Domain::whole_space(2), {0.0, 0.0}, 0.5), ConfigError);
}

TEST_CASE("patches: anchor validation and strict membership") {
    Profile flat;
    auto half = Domain::graph(1, flat, 1.0);

    auto corner = make_patch(half, {{0.0}, 0.0}, 0.5);
    CHECK(corner.touches_bottom);
    CHECK(corner.touches_lateral);
    CHECK(patch_contains(corner, {0.25}, 0.2));
    CHECK_FALSE(patch_contains(corner, {0.5}, 0.2));    // |z-y| < r is strict
    CHECK_FALSE(patch_contains(corner, {0.25}, 0.25));  // |tau-s| < r^2 is strict

    auto wall = make_patch(half, {{0.0}, 1.0}, 0.25);
    CHECK_FALSE(wall.touches_bottom);  // window (1-r^2, 1+r^2) misses t=0
    CHECK(wall.touches_lateral);

    auto ws = Domain::whole_space(1);
    auto bottom = make_patch(ws, {{0.0}, 0.0}, 2.0);
    CHECK(bottom.touches_bottom);
    CHECK_FALSE(bottom.touches_lateral);

    CHECK_THROWS_AS(make_patch(half, {{0.5}, 1.0}, 0.1), ConfigError);  // interior anchor
    CHECK_THROWS_AS(make_patch(ws, {{0.0}, 0.5}, 0.1), ConfigError);    // no wall to anchor on
}

TEST_CASE("parabolic cylinders") {
    auto cyl = parabolic_cylinder({{0.0, 0.0}, 1.0}, 2.0, 0.5);
    CHECK(cyl.contains({1.0, 1.0}, 1.2));
    CHECK_FALSE(cyl.contains({2.0, 0.0}, 1.0));   // |x-y| < R strict
    CHECK_FALSE(cyl.contains({0.0, 0.0}, 1.25));  // time window strict
    CHECK_THROWS_AS(parabolic_cylinder({{0.0}, 0.0}, -1.0, 1.0), ConfigError);
}

TEST_CASE("observation region admissibility") {
    auto reg = observation_region({{0.0}, 0.0}, 8.0, 0.0, 2.0);
    CHECK(reg.contains({{0.0}, 1.0}));
    CHECK(reg.contains({{8.0}, 1.0}));        // boundary case: |x| = K sqrt(t)
    CHECK_FALSE(reg.contains({{8.1}, 1.0}));
    CHECK(reg.reject_reason({{8.1}, 1.0}) == "|x-y| above K*sqrt(t-s)");
    CHECK_FALSE(reg.contains({{0.0}, 4.1}));  // sqrt(t) above R
    auto shifted = observation_region({{1.0}, 1.0}, 2.0, 0.5, 4.0);
    CHECK_FALSE(shifted.contains({{1.0}, 1.1}));  // below rho0
    CHECK(shifted.contains({{2.0}, 2.0}));
}

TEST_CASE("shrunken sets") {
    auto bx = Domain::box({1.0});
    ShrunkenBall s{{0.0}, std::numeric_limits<double>::infinity(), 0.25};
    CHECK(shrunken_contains(bx, s, {0.5}));
    CHECK_FALSE(shrunken_contains(bx, s, {0.2}));   // margin is strict
    CHECK_FALSE(shrunken_contains(bx, s, {0.25}));
    ShrunkenBall sb{{0.3}, 0.1, 0.0};
    CHECK(shrunken_contains(bx, sb, {0.35}));
    CHECK_FALSE(shrunken_contains(bx, sb, {0.45}));  // outside the ball
}

TEST_CASE("domain JSON round trip") {
    std::vector<nlohmann::json> cases = {
        {{"kind", "whole_space"}, {"n", 2}},
        {{"kind", "box"}, {"n", 2}, {"sides", {1.0, 2.0}}},
        {{"kind", "graph"}, {"n", 2}, {"m", 0.5}, {"r0", 1.0}, {"phi", {{"kind", "cone"}}}},
        {{"kind", "graph"}, {"n", 1}, {"m", 0.0}, {"r0", 4.0}, {"phi", {{"kind", "flat"}}}},
        {{"kind", "graph"}, {"n", 2}, {"m", 1.0}, {"r0", 0.5},
         {"phi", {{"kind", "sawtooth"}, {"period", 0.5}}}},
        {{"kind", "graph"}, {"n", 2}, {"m", 0.5}, {"r0", 1.0},
         {"phi", {{"kind", "samples"}, {"x", {-1.0, 0.0, 1.0}}, {"y", {0.5, 0.0, 0.5}}}}},
    };
    for (const auto& j : cases) {
        Domain d = j.get<Domain>();
        nlohmann::json back = d;
        Domain d2 = back.get<Domain>();
        CHECK(d2.kind == d.kind);
        CHECK(d2.n == d.n);
        CHECK(d.id() == d2.id());
        if (d.kind == Domain::Kind::Graph) {
            for (double x : {-0.7, 0.0, 0.3, 1.3})
                CHECK(d.phi(x) == doctest::Approx(d2.phi(x)).epsilon(1e-15));
        }
    }
    // declared Lipschitz constant must dominate the profile
    nlohmann::json bad = {{"kind", "graph"}, {"n", 2}, {"m", 0.1}, {"r0", 1.0},
                          {"phi", {{"kind", "samples"}, {"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}}}};
    CHECK_THROWS_AS(bad.get<Domain>(), ConfigError);
    nlohmann::json unsorted = {{"kind", "graph"}, {"n", 2}, {"m", 2.0}, {"r0", 1.0},
                               {"phi", {{"kind", "samples"}, {"x", {1.0, 0.0}}, {"y", {0.0, 1.0}}}}};
    CHECK_THROWS_AS(unsorted.get<Domain>(), ConfigError);
}
