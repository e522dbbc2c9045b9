#include "caloric/solve.hpp"

#include <algorithm>
#include <cmath>

#include "caloric/util.hpp"

namespace caloric {

std::vector<double> march(const Field& f, const Grid& g, const DataFn& data,
                          const LevelHook& hook) {
    const long N = g.size();
    std::vector<double> u(N, 0.0), un(N, 0.0);

    for (std::int64_t i : g.interior) u[i] = data(g.coords(i), g.t0, DataSide::Bottom);
    // level-0 boundary nodes carry initial data too (closure of the bottom)
    for (std::int64_t b : g.boundary) u[b] = data(g.coords(b), g.t0, DataSide::Bottom);
    if (hook) hook(0, g.t0, u);

    StepSystem sys = assemble_step(f, g, g.t0);
    for (long k = 1; k <= g.steps; ++k) {
        const double t_new = g.time_of_level(k);
        if (f.time_dependent && k > 1) sys = assemble_step(f, g, g.time_of_level(k - 1));
        advance(sys, u, un);
        for (std::int64_t b : g.boundary) {
            const DataSide side = g.cls[b] == NodeClass::Lateral ? DataSide::Lateral
                                                                 : DataSide::Truncation;
            un[b] = data(g.coords(b), t_new, side);
        }
        u.swap(un);
        if (hook) hook(k, t_new, u);
    }
    return u;
}

double sample_nearest(const Grid& g, const std::vector<double>& u, const Coords& x) {
    return u[g.nearest_node(x)];
}

double sample_linear(const Grid& g, const std::vector<double>& u, const Coords& x) {
    if ((int)x.size() != g.n) throw ConfigError("sample_linear: dimension mismatch");
    long i0[2] = {0, 0};
    double fr[2] = {0.0, 0.0};
    for (int a = 0; a < g.n; ++a) {
        double s = (x[a] - g.origin[a]) / g.h;
        long i = static_cast<long>(std::floor(s));
        i = std::clamp(i, 0L, g.dims[a] - 2);
        i0[a] = i;
        fr[a] = std::clamp(s - i, 0.0, 1.0);
    }
    if (g.n == 1) {
        const std::int64_t i = i0[0];
        return (1.0 - fr[0]) * u[i] + fr[0] * u[i + 1];
    }
    const std::int64_t i = g.index(i0[0], i0[1]);
    const long sy = g.dims[0];
    const double u00 = u[i], u10 = u[i + 1], u01 = u[i + sy], u11 = u[i + sy + 1];
    return (1.0 - fr[1]) * ((1.0 - fr[0]) * u00 + fr[0] * u10) +
           fr[1] * ((1.0 - fr[0]) * u01 + fr[0] * u11);
}

BoxRefineResult refine_box(const Domain& dom, Coords lo, Coords hi,
                           const std::function<std::vector<double>(const Coords&, const Coords&)>& solve,
                           double rel_tol, int max_doublings) {
    BoxRefineResult res;
    res.values = solve(lo, hi);
    res.lo = lo;
    res.hi = hi;
    res.rel_change = std::numeric_limits<double>::infinity();

    for (int d = 0; d < max_doublings; ++d) {
        // double the half-width of each artificial side about the box center
        Coords nlo = lo, nhi = hi;
        bool grew = false;
        for (int a = 0; a < dom.n; ++a) {
            const double half = 0.5 * (hi[a] - lo[a]);
            const double c = 0.5 * (lo[a] + hi[a]);
            if (dom.side_is_artificial(a, -1)) {
                nlo[a] = c - 2.0 * half;
                grew = true;
            }
            if (dom.side_is_artificial(a, +1)) {
                nhi[a] = c + 2.0 * half;
                grew = true;
            }
        }
        if (!grew) {  // fully physical boundary: nothing to refine
            res.rel_change = 0.0;
            return res;
        }

        std::vector<double> next = solve(nlo, nhi);
        if (next.size() != res.values.size())
            throw ConfigError("refine_box: read set changed size between boxes");
        double scale = 0.0;
        for (double v : res.values) scale = std::max(scale, std::abs(v));
        double diff = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i)
            diff = std::max(diff, std::abs(next[i] - res.values[i]));
        res.rel_change = scale > 0.0 ? diff / scale : diff;
        res.values = std::move(next);
        res.lo = nlo;
        res.hi = nhi;
        res.doublings = d + 1;
        lo = nlo;
        hi = nhi;
        if (res.rel_change < rel_tol) return res;
    }
    return res;
}

}  // namespace caloric
