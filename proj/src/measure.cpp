#include "caloric/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "caloric/mc.hpp"
#include "caloric/util.hpp"

namespace caloric {

void exit_sweep(const Field& f, const Grid& g, const SpaceTimePoint& X, ExitBinner& bin) {
    const long K = g.level_of_time(X.t);
    if (K < 1) throw ConfigError("exit_sweep: X sits on the initial slice");
    const std::int64_t start = g.nearest_node(X.x);
    if (g.cls[start] != NodeClass::Interior)
        throw ConfigError("exit_sweep: X is not an interior node");

    const long N = g.size();
    std::vector<double> m(N, 0.0), mp(N, 0.0);
    m[start] = 1.0;

    StepSystem sys = assemble_step(f, g, g.t0);
    const int S = sys.stencil;
    for (long k = K; k >= 1; --k) {
        // absorb mass sitting on boundary nodes at this level
        for (std::int64_t b : g.boundary) {
            if (m[b] == 0.0) continue;
            const DataSide side = g.cls[b] == NodeClass::Lateral ? DataSide::Lateral
                                                                 : DataSide::Truncation;
            bin.lateral(g.coords(b), g.time_of_level(k), side, m[b]);
            m[b] = 0.0;
        }
        // transpose step: coefficients of the forward step t_{k-1} -> t_k
        if (f.time_dependent) sys = assemble_step(f, g, g.time_of_level(k - 1));
        std::fill(mp.begin(), mp.end(), 0.0);
        for (std::int64_t i : g.interior) {
            const double mi = m[i];
            if (mi == 0.0) continue;
            const double* row = sys.w.data() + i * S;
            for (int s = 0; s < S; ++s)
                if (row[s] != 0.0) mp[i + sys.off[s]] += mi * row[s];
        }
        m.swap(mp);
    }
    for (std::int64_t i = 0; i < N; ++i)
        if (m[i] != 0.0) bin.bottom(g.coords(i), g.t0, m[i]);
}

// --- RingBinner -----------------------------------------------------------------

RingBinner::RingBinner(SpaceTimePoint y, std::vector<double> rs)
    : Y(std::move(y)), radii(std::move(rs)) {
    if (radii.empty()) throw ConfigError("RingBinner: need at least one radius");
    if (!std::is_sorted(radii.begin(), radii.end()))
        throw ConfigError("RingBinner: radii must be ascending");
    lat_within_.assign(radii.size(), 0.0);
    bot_within_.assign(radii.size(), 0.0);
}

namespace {

// Inclusion fraction of a coordinate against an edge: strictly inside = 1,
// on the edge (to lattice roundoff) = 1/2, outside = 0.
double edge_frac(double d, double edge) {
    const double tol = 1e-9 * std::max(1.0, edge);
    if (d < edge - tol) return 1.0;
    if (d <= edge + tol) return 0.5;
    return 0.0;
}

}  // namespace

void RingBinner::deposit(std::vector<double>& acc, const Coords& x, double dt, double mass) {
    const double dx = dist(x, Y.x);
    double f_last = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        const double f = edge_frac(dx, radii[j]) * edge_frac(dt, radii[j] * radii[j]);
        acc[j] += mass * f;
        f_last = f;
    }
    overflow += mass * (1.0 - f_last);
}

void RingBinner::lateral(const Coords& x, double t, DataSide side, double mass) {
    if (side == DataSide::Truncation) {
        truncation += mass;
        return;
    }
    deposit(lat_within_, x, std::abs(t - Y.t), mass);
}

void RingBinner::bottom(const Coords& x, double t, double mass) {
    deposit(bot_within_, x, std::abs(t - Y.t), mass);
}

double RingBinner::total() const {
    return within(radii.size() - 1) + overflow;
}

// --- conveniences ---------------------------------------------------------------

double patch_fraction(const Patch& p, const Coords& z, double tau) {
    return edge_frac(dist(z, p.Y.x), p.r) * edge_frac(std::abs(tau - p.Y.t), p.r * p.r);
}

MeasureSplit patch_measure(const Field& f, const Grid& g, const SpaceTimePoint& X,
                           const Patch& patch) {
    RingBinner bin(patch.Y, {patch.r});
    exit_sweep(f, g, X, bin);
    MeasureSplit ms;
    ms.lateral = bin.lateral_within(0);
    ms.bottom = bin.bottom_within(0);
    ms.total = ms.lateral + ms.bottom;
    ms.truncation = bin.truncation;
    return ms;
}

namespace {

// Integrates boundary data against the exit distribution.
struct DataIntegralBinner : ExitBinner {
    const DataFn* phi;
    double value = 0.0;
    explicit DataIntegralBinner(const DataFn& p) : phi(&p) {}
    void lateral(const Coords& x, double t, DataSide side, double mass) override {
        value += mass * (*phi)(x, t, side);
    }
    void bottom(const Coords& x, double t, double mass) override {
        value += mass * (*phi)(x, t, DataSide::Bottom);
    }
};

}  // namespace

double solve_dirichlet(const Field& f, const Grid& g, const DataFn& phi,
                       const SpaceTimePoint& X) {
    DataIntegralBinner bin(phi);
    exit_sweep(f, g, X, bin);
    return bin.value;
}

MeasureEstimate caloric_measure(const Field& f, const Grid& g, const SpaceTimePoint& X,
                                const Patch& patch, long mc_paths, std::uint64_t seed) {
    const MeasureSplit split = patch_measure(f, g, X, patch);
    MeasureEstimate est;
    est.value = split.total;
    est.grid_id = grid_id(g);
    est.truncation_change = split.truncation;
    if (mc_paths > 0) {
        RingBinner bin(patch.Y, {patch.r});
        mc_exit_sample(f, g, X, mc_paths, seed, bin);
        est.mc_value = bin.within(0);
        est.mc_stderr = mc_stderr(est.mc_value, mc_paths);
    }
    return est;
}

std::vector<std::pair<double, double>> measure_profile(const Field& f, const Grid& g,
                                                       const SpaceTimePoint& X,
                                                       const SpaceTimePoint& Y,
                                                       const std::vector<double>& r_list) {
    if (r_list.empty()) throw ConfigError("measure_profile: empty radius list");
    if (!std::is_sorted(r_list.begin(), r_list.end()))
        throw ConfigError("measure_profile: radii must be ascending");
    RingBinner bin(Y, r_list);
    exit_sweep(f, g, X, bin);
    std::vector<std::pair<double, double>> out;
    out.reserve(r_list.size());
    for (std::size_t j = 0; j < r_list.size(); ++j) out.emplace_back(r_list[j], bin.within(j));
    return out;
}

std::vector<double> measure_field(const Field& f, const Grid& g, const Patch& patch,
                                  const LevelHook& hook) {
    DataFn data = [&patch](const Coords& x, double t, DataSide side) {
        if (side == DataSide::Truncation) return 0.0;
        return patch_fraction(patch, x, t);
    };
    return march(f, g, data, hook);
}

double gaussian_kernel(const Coords& x, double t, const Coords& y, double s) {
    if (!(t > s)) throw ConfigError("gaussian_kernel: needs t > s");
    const double dt = t - s;
    const int n = (int)x.size();
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += (x[i] - y[i]) * (x[i] - y[i]);
    return std::exp(-q / (4.0 * dt)) / std::pow(4.0 * std::numbers::pi * dt, n / 2.0);
}

std::vector<double> green_function(const Field& f, const Grid& g, const Coords& y,
                                   const LevelHook& hook) {
    const std::int64_t src = g.nearest_node(y);
    double weight = 1.0;
    for (int a = 0; a < g.n; ++a) weight /= g.h;
    DataFn data = [src, weight, &g](const Coords& x, double, DataSide side) {
        if (side != DataSide::Bottom) return 0.0;
        return g.nearest_node(x) == src ? weight : 0.0;
    };
    return march(f, g, data, hook);
}

}  // namespace caloric
