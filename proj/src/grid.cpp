#include "caloric/grid.hpp"

#include <algorithm>
#include <cmath>

#include "caloric/util.hpp"

namespace caloric {

namespace {

// Lattice through `shift` + h*Z covering [lo, hi]: first node <= lo + slack,
// last node >= hi - slack, with a half-step of fuzz against roundoff.
void axis_lattice(double lo, double hi, double h, double shift, double& origin, long& count) {
    const long k0 = static_cast<long>(std::floor((lo - shift) / h + 1e-9));
    origin = shift + h * k0;
    count = static_cast<long>(std::ceil((hi - origin) / h - 1e-9)) + 1;
    if (count < 2) count = 2;
}

double profile_min(const Profile& phi, double a, double b) {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& seg : phi.segments(a, b)) mn = std::min({mn, seg[1], seg[3]});
    return mn;
}

}  // namespace

Coords Grid::coords(std::int64_t idx) const {
    Coords x(n);
    x[0] = axis_coord(0, ix_of(idx));
    if (n == 2) x[1] = axis_coord(1, iy_of(idx));
    return x;
}

std::int64_t Grid::nearest_node(const Coords& x, double* snap_dist) const {
    if ((int)x.size() != n) throw ConfigError("nearest_node: dimension mismatch");
    long ij[2] = {0, 0};
    for (int a = 0; a < n; ++a) {
        long i = static_cast<long>(std::llround((x[a] - origin[a]) / h));
        ij[a] = std::clamp(i, 0L, dims[a] - 1);
    }
    const std::int64_t idx = index(ij[0], ij[1]);
    if (snap_dist) *snap_dist = dist(coords(idx), x);
    return idx;
}

long Grid::level_of_time(double t) const {
    const long k = static_cast<long>(std::llround((t - t0) / tau));
    if (k < 0 || k > steps || std::abs(time_of_level(k) - t) > tau * 1e-6)
        throw ConfigError("time " + fmt_double(t) + " is not a grid level");
    return k;
}

Grid build_grid(const Domain& dom, const GridSpec& spec, double nu) {
    if (!(spec.h > 0.0)) throw ConfigError("grid: h must be positive");
    if (!(spec.t1 > spec.t0)) throw ConfigError("grid: t1 must exceed t0");
    if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("grid: nu must lie in (0, 1]");
    const int n = dom.n;
    if ((int)spec.lo.size() != n || (int)spec.hi.size() != n)
        throw ConfigError("grid: lo/hi dimension mismatch");
    for (int a = 0; a < n; ++a)
        if (!(spec.hi[a] > spec.lo[a])) throw ConfigError("grid: hi must exceed lo");
    if (spec.midpoint_anchor && (int)spec.midpoint_anchor->size() != n)
        throw ConfigError("grid: midpoint anchor dimension mismatch");

    Grid g;
    g.domain = dom;
    g.n = n;
    g.h = spec.h;
    g.t0 = spec.t0;
    g.t1 = spec.t1;

    // Time step: default keeps a 4x positivity margin for eigenvalues within
    // the nu-box; either way it is shrunk to land on t1 exactly.
    const double tau_req = spec.tau > 0.0 ? spec.tau : spec.h * spec.h * nu / (8.0 * n);
    g.steps = std::max<long>(1, static_cast<long>(std::ceil((spec.t1 - spec.t0) / tau_req - 1e-9)));
    g.tau = (spec.t1 - spec.t0) / g.steps;

    Coords lo = spec.lo, hi = spec.hi;
    if (dom.kind == Domain::Kind::Graph && n >= 1) {
        // Make room for one staircase layer below the lowest wall height in
        // the sampled window, so every interior column sees a lateral node.
        const double mn = n == 2 ? profile_min(dom.phi, lo[0] - spec.h, hi[0] + spec.h)
                                 : dom.phi(0.0);
        lo[n - 1] = std::min(lo[n - 1], mn - 1.5 * spec.h);
    }

    for (int a = 0; a < n; ++a) {
        const double shift = spec.midpoint_anchor ? (*spec.midpoint_anchor)[a] + 0.5 * spec.h : 0.0;
        axis_lattice(lo[a], hi[a], spec.h, shift, g.origin[a], g.dims[a]);
    }

    const long N = g.size();
    g.cls.assign(N, NodeClass::Outside);

    // First pass: interior = inside Omega with the full stencil on-lattice.
    Coords x(n);
    for (long iy = 0; iy < (n == 2 ? g.dims[1] : 1); ++iy) {
        if (n == 2) x[1] = g.axis_coord(1, iy);
        for (long ix = 0; ix < g.dims[0]; ++ix) {
            x[0] = g.axis_coord(0, ix);
            if (!dom.contains(x)) continue;
            const bool edge = ix == 0 || ix == g.dims[0] - 1 ||
                              (n == 2 && (iy == 0 || iy == g.dims[1] - 1));
            g.cls[g.index(ix, iy)] = edge ? NodeClass::Truncation : NodeClass::Interior;
        }
    }

    // Second pass: nodes outside Omega that some interior stencil reads.
    for (long iy = 0; iy < (n == 2 ? g.dims[1] : 1); ++iy)
        for (long ix = 0; ix < g.dims[0]; ++ix) {
            if (g.cls[g.index(ix, iy)] != NodeClass::Interior) continue;
            for (long dy = (n == 2 ? -1 : 0); dy <= (n == 2 ? 1 : 0); ++dy)
                for (long dx = -1; dx <= 1; ++dx) {
                    auto& c = g.cls[g.index(ix + dx, iy + dy)];
                    if (c == NodeClass::Outside) c = NodeClass::Lateral;
                }
        }

    for (std::int64_t i = 0; i < N; ++i) {
        if (g.cls[i] == NodeClass::Interior) g.interior.push_back(i);
        else if (g.cls[i] != NodeClass::Outside) g.boundary.push_back(i);
    }
    if (g.interior.empty()) throw ConfigError("grid: no interior nodes (box too small or h too large)");
    return g;
}

std::string grid_id(const Grid& g) {
    std::string s = g.domain.id();
    s += "|h=" + fmt_double(g.h) + "|tau=" + fmt_double(g.tau);
    s += "|x0=" + fmt_double(g.origin[0]) + "|nx=" + std::to_string(g.dims[0]);
    if (g.n == 2) s += "|y0=" + fmt_double(g.origin[1]) + "|ny=" + std::to_string(g.dims[1]);
    s += "|t=[" + fmt_double(g.t0) + "," + fmt_double(g.t1) + "]";
    return s;
}

}  // namespace caloric
