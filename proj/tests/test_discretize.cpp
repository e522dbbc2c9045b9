// Coefficient fields, grid classification, and the monotone step assembly.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "caloric/field.hpp"
#include "caloric/grid.hpp"
#include "caloric/scheme.hpp"
#include "caloric/util.hpp"

using namespace caloric;
using nlohmann::json;

namespace {

Field const_field(double a11, double a12, double a22, Form form, double nu) {
    json j;
    j["a"] = {{a11, a12}, {a12, a22}};
    Field f = builtin_field("const", 2, nu, form, j);
    return f;
}

Grid line_grid(double h, double tau, double half_width, double t1, double nu = 1.0) {
    GridSpec spec;
    spec.h = h;
    spec.tau = tau;
    spec.lo = {-half_width};
    spec.hi = {half_width};
    spec.t1 = t1;
    return build_grid(Domain::whole_space(1), spec, nu);
}

}  // namespace

TEST_CASE("identity and diagonal fields") {
    Field id = builtin_field("identity", 2, 1.0, Form::Divergence, json::object());
    double x[2] = {0.3, -1.7};
    SymMat a = id.eval(x, 0.5);
    CHECK(a.a11 == 1.0);
    CHECK(a.a22 == 1.0);
    CHECK(a.a12 == 0.0);
    CHECK_FALSE(id.time_dependent);

    json dj;
    dj["eig"] = {0.5, 2.0};
    Field dg = builtin_field("diag", 2, 0.5, Form::Divergence, dj);
    a = dg.eval(x, 0.0);
    CHECK(a.a11 == 0.5);
    CHECK(a.a22 == 2.0);
    CHECK(a.a12 == 0.0);

    // eigenvalues must fit the [nu, 1/nu] box
    json bad;
    bad["eig"] = {0.5, 2.0};
    CHECK_THROWS_AS(builtin_field("diag", 2, 0.9, Form::Divergence, bad), ConfigError);
    CHECK_THROWS_AS(builtin_field("nope", 2, 1.0, Form::Divergence, json::object()),
                    ConfigError);
}

TEST_CASE("rotating field has constant eigenvalues and strict dominance") {
    Field rot = builtin_field("rotating", 2, 0.5, Form::NonDivergence, json::object());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 10000; ++k) {
        double x[2] = {u(rng), u(rng)};
        if (x[0] == 0.0 && x[1] == 0.0) continue;
        SymMat a = rot.eval(x, 0.0);
        // trace and determinant pin the eigenvalues to {0.5, 2.0}
        CHECK(a.a11 + a.a22 == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(a.a11 * a.a22 - a.a12 * a.a12 == doctest::Approx(1.0).epsilon(1e-12));
        // dominance margin (needed by the 9-point scheme) is uniform
        CHECK(std::abs(a.a12) <= std::min(a.a11, a.a22) - 0.18);
    }

    EllipticityReport rep =
        validate_ellipticity(rot, {-3.0, -3.0}, {3.0, 3.0}, 0.0, 1.0, 10000, 42);
    CHECK(rep.pass);
    CHECK(rep.quotient_min >= 0.5 - 1e-9);
    CHECK(rep.quotient_min < 0.52);
    CHECK(rep.quotient_max <= 2.0 + 1e-9);
    CHECK(rep.max_entry <= 2.0 + 1e-9);

    // a nonzero rate makes the eigenframe spin in time
    json rj;
    rj["rate"] = std::acos(-1.0) / 2.0;
    Field spin = builtin_field("rotating", 2, 0.5, Form::NonDivergence, rj);
    CHECK(spin.time_dependent);
    double e1[2] = {1.0, 0.0};
    SymMat at1 = spin.eval(e1, 1.0);  // frame angle pi/2: eigenvector flipped
    CHECK(at1.a11 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(at1.a22 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("checkerboard field fills the ellipticity box exactly") {
    Field cb = builtin_field("checkerboard", 2, 0.5, Form::Divergence, json::object());
    // product of sines peaks at (1/4, 1/4) and troughs at (3/4, 1/4)
    double hi[2] = {0.25, 0.25}, lo[2] = {0.75, 0.25};
    CHECK(cb.eval(hi, 0.0).a11 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(cb.eval(lo, 0.0).a11 == doctest::Approx(0.5).epsilon(1e-12));
    EllipticityReport rep =
        validate_ellipticity(cb, {0.0, 0.0}, {1.0, 1.0}, 0.0, 1.0, 20000, 9);
    CHECK(rep.pass);
}

TEST_CASE("ellipticity sampler catches a lying field") {
    // claims nu = 0.9 but has an eigenvalue 0.5
    Field liar;
    liar.name = "liar";
    liar.n = 2;
    liar.nu = 0.9;
    liar.form = Form::Divergence;
    liar.fn = [](const double*, double) {
        SymMat a;
        a.a11 = 0.5;
        a.a22 = 1.0;
        return a;
    };
    EllipticityReport rep =
        validate_ellipticity(liar, {0.0, 0.0}, {1.0, 1.0}, 0.0, 1.0, 5000, 3);
    CHECK_FALSE(rep.pass);
    CHECK(rep.quotient_min < 0.9);
}

TEST_CASE("field JSON round trip") {
    json j;
    j["name"] = "rotating";
    j["nu"] = 0.5;
    j["form"] = "nondiv";
    j["eig"] = {0.5, 2.0};
    Field f = field_from_json(j, 2);
    CHECK(f.name == "rotating");
    CHECK(f.form == Form::NonDivergence);
    CHECK(f.nu == 0.5);

    json missing;
    missing["name"] = "identity";
    CHECK_THROWS_AS(field_from_json(missing, 2), ConfigError);
    json badform = j;
    badform["form"] = "weak";
    CHECK_THROWS_AS(field_from_json(badform, 2), ConfigError);
}

TEST_CASE("const field validates eigenvalues and symmetry") {
    Field ok = const_field(1.0, 0.5, 1.0, Form::NonDivergence, 0.5);
    double x[2] = {0.0, 0.0};
    CHECK(ok.eval(x, 0.0).a12 == 0.5);
    // eigenvalues {5, 3} blow the nu = 0.5 box
    json j;
    j["a"] = {{5.0, 1.0}, {1.0, 3.0}};
    CHECK_THROWS_AS(builtin_field("const", 2, 0.5, Form::Divergence, j), ConfigError);
}

TEST_CASE("grid over a box classifies interior and lateral nodes") {
    GridSpec spec;
    spec.h = 0.25;
    spec.lo = {0.0, 0.0};
    spec.hi = {1.0, 1.0};
    spec.t1 = 0.5;
    Grid g = build_grid(Domain::box({1.0, 1.0}), spec, 1.0);
    CHECK(g.dims[0] == 5);
    CHECK(g.dims[1] == 5);
    CHECK(g.interior.size() == 9);   // the 3x3 block strictly inside
    CHECK(g.boundary.size() == 16);  // full perimeter, all lateral
    for (std::int64_t b : g.boundary) CHECK(g.cls[b] == NodeClass::Lateral);
}

TEST_CASE("grid over a half line: wall node is lateral, far cut is truncation") {
    GridSpec spec;
    spec.h = 0.25;
    spec.lo = {0.0};
    spec.hi = {1.0};
    spec.t1 = 0.5;
    Profile flat;  // level 0
    Grid g = build_grid(Domain::graph(1, flat, 100.0), spec, 1.0);
    CHECK(g.interior.size() == 3);  // 0.25, 0.5, 0.75
    std::int64_t wall = g.nearest_node({0.0});
    std::int64_t cut = g.nearest_node({1.0});
    CHECK(g.cls[wall] == NodeClass::Lateral);
    CHECK(g.cls[cut] == NodeClass::Truncation);
    CHECK(g.coords(wall)[0] == doctest::Approx(0.0));
    // nodes below the wall that no stencil reads stay outside
    long outside = 0;
    for (auto c : g.cls) outside += c == NodeClass::Outside;
    CHECK(outside == 2);
}

TEST_CASE("grid masks a cone graph with a staircase") {
    Profile cone;
    cone.kind = Profile::Kind::Cone;
    cone.slope = 0.5;
    GridSpec spec;
    spec.h = 0.1;
    spec.lo = {-1.0, 0.0};
    spec.hi = {1.0, 1.0};
    spec.t1 = 0.1;
    Domain dom = Domain::graph(2, cone, 100.0);
    Grid g = build_grid(dom, spec, 1.0);
    REQUIRE(!g.interior.empty());
    for (std::int64_t i : g.interior) {
        Coords x = g.coords(i);
        CHECK(x[1] > cone(x[0]));  // strictly above the wall
    }
    for (std::int64_t b : g.boundary)
        if (g.cls[b] == NodeClass::Lateral) CHECK_FALSE(dom.contains(g.coords(b)));
}

TEST_CASE("grid time stepping and alignment") {
    GridSpec spec;
    spec.h = 0.1;
    spec.lo = {-1.0};
    spec.hi = {1.0};
    spec.t1 = 1.0;
    Grid g = build_grid(Domain::whole_space(1), spec, 1.0);
    CHECK(g.tau == doctest::Approx(0.00125).epsilon(1e-15));  // h^2/8
    CHECK(g.steps == 800);
    CHECK(g.time_of_level(g.steps) == doctest::Approx(1.0));
    CHECK(g.level_of_time(0.5) == 400);
    CHECK_THROWS_AS(g.level_of_time(0.5 + 0.3 * g.tau), ConfigError);

    // midpoint alignment puts the anchor halfway between nodes
    spec.midpoint_anchor = Coords{0.0};
    Grid gm = build_grid(Domain::whole_space(1), spec, 1.0);
    double snap = 0.0;
    gm.nearest_node({0.0}, &snap);
    CHECK(snap == doctest::Approx(0.05).epsilon(1e-12));

    // explicit tau is an upper bound and still lands on t1
    spec.midpoint_anchor.reset();
    spec.tau = 0.003;
    Grid ge = build_grid(Domain::whole_space(1), spec, 1.0);
    CHECK(ge.tau <= 0.003 + 1e-15);
    CHECK(ge.steps * ge.tau == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("heat stencil: quarter rule and positivity rejection") {
    Field heat = builtin_field("identity", 1, 1.0, Form::Divergence, json::object());
    Grid g = line_grid(0.1, 0.0025, 1.0, 0.05);  // tau = h^2/4
    StepSystem sys = assemble_step_divergence(heat, g, 0.0);
    auto row = sys.row(g.interior[2]);
    CHECK(row[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(row[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(row[2] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(check_monotone(sys).ok);

    // tau = h^2 gives center weight -1; assembler rejects and names the cure
    Grid bad = line_grid(0.1, 0.01, 1.0, 0.05);
    try {
        assemble_step_divergence(heat, bad, 0.0);
        FAIL("expected a positivity error");
    } catch (const SchemeError& e) {
        CHECK(e.kind == SchemeError::Kind::Positivity);
        CHECK(e.node >= 0);
        CHECK(e.tau_max == doctest::Approx(0.005).epsilon(1e-12));  // h^2/2
    }
}

TEST_CASE("marginal tau = h^2/2 is accepted with center exactly zero") {
    Field heat = builtin_field("identity", 1, 1.0, Form::Divergence, json::object());
    Grid g = line_grid(0.1, 0.005, 1.0, 0.05);
    StepSystem sys = assemble_step_divergence(heat, g, 0.0);
    auto row = sys.row(g.interior[0]);
    CHECK(row[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(row[1] >= 0.0);
    CHECK(row[1] <= 1e-15);
    CHECK(check_monotone(sys).ok);
}

TEST_CASE("diagonal anisotropy keeps exact row sums") {
    json dj;
    dj["eig"] = {0.5, 2.0};
    Field f = builtin_field("diag", 2, 0.5, Form::Divergence, dj);
    GridSpec spec;
    spec.h = 0.2;
    spec.tau = 0.005;  // h^2/8
    spec.lo = {-1.0, -1.0};
    spec.hi = {1.0, 1.0};
    spec.t1 = 0.02;
    Grid g = build_grid(Domain::whole_space(2), spec, 0.5);
    StepSystem sys = assemble_step_divergence(f, g, 0.0);
    MonotoneReport rep = check_monotone(sys);
    CHECK(rep.ok);
    CHECK(rep.max_row_sum_err == 0.0);  // centers are defined as 1 - rest
    auto row = sys.row(g.interior[0]);
    CHECK(row[3] == doctest::Approx(0.5 / 8.0));   // west: a11 = 0.5
    CHECK(row[7] == doctest::Approx(2.0 / 8.0));   // north: a22 = 2
    CHECK(row[4] == doctest::Approx(1.0 - 5.0 / 8.0));
}

TEST_CASE("nine point stencil with cross terms, both forms") {
    GridSpec spec;
    spec.h = 0.2;
    spec.tau = 0.005;  // h^2/8
    spec.lo = {-1.0, -1.0};
    spec.hi = {1.0, 1.0};
    spec.t1 = 0.02;
    Grid g = build_grid(Domain::whole_space(2), spec, 0.5);

    Field nd = const_field(1.0, 0.5, 1.0, Form::NonDivergence, 0.5);
    StepSystem sys = assemble_step_nondivergence(nd, g, 0.0);
    auto row = sys.row(g.interior[0]);
    // axes carry a_ii - |a12| = 1/2, the positive-sign corners carry a12
    CHECK(row[1] == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(row[3] == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(row[5] == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(row[7] == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(row[0] == doctest::Approx(1.0 / 16).epsilon(1e-15));  // SW
    CHECK(row[8] == doctest::Approx(1.0 / 16).epsilon(1e-15));  // NE
    CHECK(row[2] == 0.0);
    CHECK(row[6] == 0.0);
    CHECK(row[4] == doctest::Approx(5.0 / 8).epsilon(1e-15));
    CHECK(check_monotone(sys).ok);

    // negative cross coefficient fills the other diagonal
    Field ndm = const_field(1.0, -0.5, 1.0, Form::NonDivergence, 0.5);
    auto rowm = assemble_step_nondivergence(ndm, g, 0.0).row(g.interior[0]);
    CHECK(rowm[2] == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(rowm[6] == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(rowm[0] == 0.0);
    CHECK(rowm[8] == 0.0);

    // constant coefficients: divergence assembly produces the same stencil
    Field dv = const_field(1.0, 0.5, 1.0, Form::Divergence, 0.5);
    StepSystem dsys = assemble_step_divergence(dv, g, 0.0);
    for (std::int64_t node : g.interior) {
        auto a = sys.row(node), b = dsys.row(node);
        for (int k = 0; k < 9; ++k) CHECK(a[k] == b[k]);
    }

    // dominance violations are named, in both forms
    Field fat_nd = const_field(1.0, 1.5, 4.0, Form::NonDivergence, 0.2);
    CHECK_THROWS_AS(assemble_step_nondivergence(fat_nd, g, 0.0), SchemeError);
    Field fat_d = const_field(1.0, 1.5, 4.0, Form::Divergence, 0.2);
    CHECK_THROWS_AS(assemble_step_divergence(fat_d, g, 0.0), SchemeError);
    try {
        assemble_step_nondivergence(fat_nd, g, 0.0);
    } catch (const SchemeError& e) {
        CHECK(e.kind == SchemeError::Kind::Dominance);
    }
}

TEST_CASE("check_monotone flags a hand-built bad row") {
    Grid g = line_grid(0.1, 0.0025, 1.0, 0.05);
    StepSystem sys;
    sys.grid = &g;
    sys.stencil = 3;
    sys.off = {-1, 0, 1, 0, 0, 0, 0, 0, 0};
    sys.w.assign(g.size() * 3, 0.0);
    for (std::int64_t node : g.interior) {
        double* row = sys.w.data() + node * 3;
        row[0] = 1.0;
        row[1] = -1.0;  // center weight of the tau = h^2 heat stencil
        row[2] = 1.0;
    }
    MonotoneReport rep = check_monotone(sys);
    CHECK_FALSE(rep.ok);
    CHECK(rep.min_weight == -1.0);
    CHECK(rep.worst_node == g.interior[0]);
}

TEST_CASE("advance: binomial kernel, maximum principle, comparison") {
    Field heat = builtin_field("identity", 1, 1.0, Form::Divergence, json::object());
    Grid g = line_grid(0.1, 0.0025, 1.0, 0.05);
    StepSystem sys = assemble_step_divergence(heat, g, 0.0);
    const long N = g.size();

    // delta spreads to the one-step binomial kernel
    std::vector<double> u(N, 0.0), v(N, 0.0);
    std::int64_t mid = g.nearest_node({0.0});
    u[mid] = 1.0;
    advance(sys, u, v);
    CHECK(v[mid] == doctest::Approx(0.5));
    CHECK(v[mid - 1] == doctest::Approx(0.25));
    CHECK(v[mid + 1] == doctest::Approx(0.25));
    CHECK(v[mid + 2] == 0.0);

    // random data in [0,1] stays in [0,1]; ordered data stays ordered
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> a(N), b(N), an(N), bn(N);
    for (long i = 0; i < N; ++i) {
        b[i] = unif(rng);
        a[i] = b[i] + (1.0 - b[i]) * unif(rng);  // a >= b
    }
    for (int step = 0; step < 50; ++step) {
        advance(sys, a, an);
        advance(sys, b, bn);
        a.swap(an);
        b.swap(bn);
        for (long i = 0; i < N; ++i) {
            CHECK(a[i] >= b[i]);
            CHECK(a[i] >= 0.0);
            CHECK(a[i] <= 1.0);
        }
    }

    // constants are preserved to roundoff
    std::vector<double> c(N, 0.7), cn(N);
    for (int step = 0; step < 100; ++step) {
        advance(sys, c, cn);
        c.swap(cn);
    }
    for (long i = 0; i < N; ++i) CHECK(c[i] == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("heat solution converges at second order") {
    Field heat = builtin_field("identity", 1, 1.0, Form::Divergence, json::object());
    auto kernel = [](double x, double t) {
        return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * std::acos(-1.0) * t);
    };
    const double t0 = 0.25, t1 = 0.5;
    std::vector<double> errs;
    for (double h : {0.1, 0.05, 0.025}) {
        Grid g = line_grid(h, h * h / 4.0, 6.0, t1 - t0);
        StepSystem sys = assemble_step_divergence(heat, g, 0.0);
        const long N = g.size();
        std::vector<double> u(N), un(N);
        for (long i = 0; i < N; ++i) u[i] = kernel(g.axis_coord(0, i), t0);
        for (long k = 0; k < g.steps; ++k) {
            advance(sys, u, un);
            u.swap(un);
        }
        double err = 0.0;
        for (std::int64_t i : g.interior)
            err = std::max(err, std::abs(u[i] - kernel(g.axis_coord(0, i), t1)));
        errs.push_back(err);
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
}
