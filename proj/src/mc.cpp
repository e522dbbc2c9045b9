#include "caloric/mc.hpp"

#include <cmath>
#include <vector>

#include "caloric/util.hpp"

namespace caloric {

namespace {

inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

McSummary mc_exit_sample(const Field& f, const Grid& g, const SpaceTimePoint& X,
                         long paths, std::uint64_t seed, ExitBinner& bin) {
    if (paths < 1) throw ConfigError("mc_exit_sample: need at least one path");
    const long K = g.level_of_time(X.t);
    if (K < 1) throw ConfigError("mc_exit_sample: X sits on the initial slice");
    const std::int64_t start = g.nearest_node(X.x);
    if (g.cls[start] != NodeClass::Interior)
        throw ConfigError("mc_exit_sample: X is not an interior node");

    const double w_path = 1.0 / static_cast<double>(paths);
    std::vector<std::int64_t> pos(paths, start);
    std::vector<std::uint64_t> rng(paths);
    for (long p = 0; p < paths; ++p) rng[p] = substream_seed(seed, p);

    McSummary sum;
    sum.paths = paths;

    // Level-synchronous reverse walk: all paths share one assembled system
    // per level, so time-dependent fields cost one assembly per level total.
    StepSystem sys = assemble_step(f, g, g.t0);
    const int S = sys.stencil;
    long alive = paths;
    for (long k = K; k >= 1 && alive > 0; --k) {
        for (long p = 0; p < paths; ++p) {
            const std::int64_t node = pos[p];
            if (node < 0 || g.cls[node] == NodeClass::Interior) continue;
            const DataSide side = g.cls[node] == NodeClass::Lateral ? DataSide::Lateral
                                                                    : DataSide::Truncation;
            bin.lateral(g.coords(node), g.time_of_level(k), side, w_path);
            sum.mass += w_path;
            pos[p] = -1;
            --alive;
        }
        if (alive == 0) break;
        if (f.time_dependent) sys = assemble_step(f, g, g.time_of_level(k - 1));
        for (long p = 0; p < paths; ++p) {
            const std::int64_t node = pos[p];
            if (node < 0) continue;
            const double* row = sys.w.data() + node * S;
            const double u = uniform01(rng[p]);
            double acc = 0.0;
            int pick = -1;
            for (int s = 0; s < S; ++s) {
                acc += row[s];
                if (u < acc) {
                    pick = s;
                    break;
                }
            }
            if (pick < 0) {  // roundoff at u ~ 1: take the last positive slot
                for (int s = S - 1; s >= 0; --s)
                    if (row[s] > 0.0) {
                        pick = s;
                        break;
                    }
            }
            pos[p] = node + sys.off[pick];
        }
    }
    for (long p = 0; p < paths; ++p) {
        if (pos[p] < 0) continue;
        bin.bottom(g.coords(pos[p]), g.t0, w_path);
        sum.mass += w_path;
    }
    return sum;
}

}  // namespace caloric
