#include "caloric/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "caloric/util.hpp"

namespace caloric {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tol_of(double scale) { return 1e-9 * std::max(1.0, std::fabs(scale)); }

std::string point_str(const SpaceTimePoint& X) {
    std::string s = "(";
    for (std::size_t i = 0; i < X.x.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(X.x[i]);
    }
    return s + ") @ t=" + fmt_double(X.t);
}

GridSpec box_spec(int n, const Coords& center, double half, double h, double tau, double t0,
                  double t1) {
    GridSpec gs;
    gs.h = h;
    gs.tau = tau;
    gs.t0 = t0;
    gs.t1 = t1;
    gs.lo.assign(n, 0.0);
    gs.hi.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        gs.lo[i] = center[i] - half;
        gs.hi[i] = center[i] + half;
    }
    return gs;
}

long snapped_level(const Grid& g, double t, long lo = 0) {
    long lvl = std::lround((t - g.t0) / g.tau);
    return std::clamp(lvl, lo, g.steps);
}

// Interior nodes inside the closed ball |x - y| <= rho (+tolerance).
std::vector<std::int64_t> nodes_in_ball(const Grid& g, const Coords& y, double rho) {
    std::vector<std::int64_t> out;
    const double lim = rho + tol_of(rho);
    for (auto idx : g.interior)
        if (dist(g.coords(idx), y) <= lim) out.push_back(idx);
    return out;
}

std::vector<std::int64_t> nodes_in_shrunken(const Grid& g, const Domain& dom,
                                            const ShrunkenBall& sb) {
    std::vector<std::int64_t> out;
    for (auto idx : g.interior)
        if (shrunken_contains(dom, sb, g.coords(idx))) out.push_back(idx);
    return out;
}

double corkscrew_margin(const Domain& dom, const Coords& y, double scale, double override_mu) {
    if (override_mu >= 0.0) return override_mu;
    return corkscrew(dom, y, scale).mu;
}

// Non-negativity guard for data that feeds a "nonnegative solution" claim.
DataFn require_nonnegative(const DataFn& data, const char* who) {
    std::string msg = std::string(who) + ": boundary data must be nonnegative";
    return [data, msg](const Coords& x, double t, DataSide side) {
        const double v = data(x, t, side);
        if (v < 0.0) throw ConfigError(msg);
        return v;
    };
}

struct Extreme {
    double value = 0.0;
    SpaceTimePoint at;
    bool seen = false;
};

void take_min(Extreme& e, double v, const Coords& x, double t) {
    if (!e.seen || v < e.value) {
        e.value = v;
        e.at = {x, t};
        e.seen = true;
    }
}

void take_max(Extreme& e, double v, const Coords& x, double t) {
    if (!e.seen || v > e.value) {
        e.value = v;
        e.at = {x, t};
        e.seen = true;
    }
}

}  // namespace

// --- data helpers -------------------------------------------------------------

DataFn hashed_data(const Grid& g, std::uint64_t seed, double lo, double hi) {
    const double o0 = g.origin[0], o1 = g.origin[1];
    const double h = g.h, t0 = g.t0, tau = g.tau;
    const long d0 = g.dims[0], d1 = g.dims[1];
    const int n = g.n;
    return [=](const Coords& x, double t, DataSide) {
        const long ix = std::lround((x[0] - o0) / h);
        const long iy = n == 2 ? std::lround((x[1] - o1) / h) : 0;
        const long k = std::lround((t - t0) / tau);
        const std::uint64_t key =
            static_cast<std::uint64_t>((k * (d1 + 1) + iy) * d0 + ix);
        std::uint64_t s = substream_seed(seed, key);
        const double u01 = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u01;
    };
}

DataFn patch_data(const Patch& p) {
    return [p](const Coords& x, double t, DataSide side) {
        if (side == DataSide::Truncation) return 0.0;
        return patch_fraction(p, x, t);
    };
}

DataSampler uniform_data_sampler(double lo, double hi) {
    return [lo, hi](std::uint64_t seed, const Grid& g) { return hashed_data(g, seed, lo, hi); };
}

DataSampler constant_data_sampler(double value) {
    return [value](std::uint64_t, const Grid&) {
        return [value](const Coords&, double, DataSide) { return value; };
    };
}

// --- doubling sweeps ------------------------------------------------------------

namespace {

// Sorted union of {r, 2r}; returns the list plus an index map for lookups.
std::vector<double> ring_radii(const std::vector<double>& r_list) {
    std::vector<double> radii;
    radii.reserve(2 * r_list.size());
    for (double r : r_list) {
        radii.push_back(r);
        radii.push_back(2.0 * r);
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end(),
                            [](double a, double b) { return std::fabs(a - b) <= tol_of(a); }),
                radii.end());
    return radii;
}

std::size_t radius_index(const std::vector<double>& radii, double r) {
    for (std::size_t j = 0; j < radii.size(); ++j)
        if (std::fabs(radii[j] - r) <= tol_of(r)) return j;
    throw ConfigError("internal: radius not in ring table");
}

struct SweepCellResult {
    std::vector<double> within;  // per ring radius
    double truncation = 0.0;
};

SweepCellResult sweep_once(const Field& f, const Grid& g, const SpaceTimePoint& X,
                           const SpaceTimePoint& Y, const std::vector<double>& radii) {
    RingBinner bin(Y, radii);
    exit_sweep(f, g, X, bin);
    SweepCellResult out;
    out.within.resize(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) out.within[j] = bin.within(j);
    out.truncation = bin.truncation;
    return out;
}

void finalize_doubling(DoublingReport& rep, double den_floor) {
    rep.included = 0;
    rep.max_ratio = 0.0;
    rep.argmax = -1;
    for (std::size_t i = 0; i < rep.cells.size(); ++i) {
        RatioCell& c = rep.cells[i];
        if (!c.note.empty()) continue;  // flagged by the admissibility filter
        if (!(c.den > den_floor)) {
            c.note = "denominator below the round-off floor";
            continue;
        }
        c.ratio = c.num / c.den;
        c.included = true;
        ++rep.included;
        if (c.ratio > rep.max_ratio) {
            rep.max_ratio = c.ratio;
            rep.argmax = static_cast<std::ptrdiff_t>(i);
        }
    }
}

}  // namespace

DoublingReport doubling_sweep_wholespace(const Field& f, double K,
                                         const std::vector<double>& r_list,
                                         const std::vector<double>& t_list, int x_per_t,
                                         const WholeSpaceSweepOptions& opt) {
    if (!(K >= 1.0)) throw ConfigError("doubling_sweep_wholespace: K must be >= 1");
    if (r_list.empty() || t_list.empty())
        throw ConfigError("doubling_sweep_wholespace: empty sweep axes");
    for (double r : r_list)
        if (!(r > 0.0)) throw ConfigError("doubling_sweep_wholespace: radii must be positive");
    for (double t : t_list)
        if (!(t > 0.0)) throw ConfigError("doubling_sweep_wholespace: times must be positive");
    if (x_per_t < 1) throw ConfigError("doubling_sweep_wholespace: x_per_t must be >= 1");

    const int n = f.n;
    const Domain dom = Domain::whole_space(n);
    const double t1 = *std::max_element(t_list.begin(), t_list.end());
    const double rmax = *std::max_element(r_list.begin(), r_list.end());
    // The box must hold the observation points and their diffusion spread;
    // with x_per_t == 1 every sample sits on the time axis, so the K sqrt(t)
    // reach never enters the box size.
    const double xmax = x_per_t > 1 ? K * std::sqrt(t1) : 0.0;
    const double half = xmax + 2.0 * rmax + opt.margin * std::sqrt(t1);
    const Coords y0(n, 0.0);
    const Grid g = build_grid(dom, box_spec(n, y0, half, opt.h, opt.tau, 0.0, t1), f.nu);
    const SpaceTimePoint Y{y0, 0.0};
    const std::vector<double> radii = ring_radii(r_list);

    DoublingReport rep;
    rep.K = K;
    rep.lambda = 0.0;
    rep.h = g.h;
    rep.tau = g.tau;

    // Observation points: x_per_t nodes spread over |x| <= K sqrt(t) on axis 1.
    std::vector<SpaceTimePoint> samples;
    for (double t : t_list) {
        const long lvl = snapped_level(g, t, 1);
        const double ts = g.time_of_level(lvl);
        const double reach = K * std::sqrt(ts);
        for (int j = 0; j < x_per_t; ++j) {
            const double frac = x_per_t == 1 ? 0.0 : -1.0 + 2.0 * j / (x_per_t - 1.0);
            Coords x(n, 0.0);
            x[0] = frac * reach;
            std::int64_t idx = g.nearest_node(x);
            Coords xs = g.coords(idx);
            // Snapping may push the sample just past the cone; walk it back in.
            for (int tries = 0; tries < 2 && std::fabs(xs[0]) > reach + tol_of(reach); ++tries) {
                const long ix = g.ix_of(idx) + (xs[0] > 0.0 ? -1 : 1);
                idx = g.index(ix, g.iy_of(idx));
                xs = g.coords(idx);
            }
            const SpaceTimePoint X{xs, ts};
            if (std::fabs(xs[0]) > reach + tol_of(reach)) {
                rep.rejected.push_back(point_str(X) + ": |x| > K sqrt(t) after snapping");
                continue;
            }
            samples.push_back(X);
        }
    }

    std::vector<SweepCellResult> results(samples.size());
    parallel_for(samples.size(), opt.threads,
                 [&](std::size_t i) { results[i] = sweep_once(f, g, samples[i], Y, radii); });

    for (std::size_t i = 0; i < samples.size(); ++i) {
        rep.truncation = std::max(rep.truncation, results[i].truncation);
        for (double r : r_list) {
            RatioCell c;
            c.X = samples[i];
            c.r = r;
            c.den = results[i].within[radius_index(radii, r)];
            c.num = results[i].within[radius_index(radii, 2.0 * r)];
            rep.cells.push_back(std::move(c));
        }
    }
    finalize_doubling(rep, opt.den_floor);
    return rep;
}

DoublingReport doubling_sweep_lipschitz(const Domain& dom, const Field& f,
                                        const SpaceTimePoint& Y, double K, double lambda,
                                        const std::vector<double>& r_list,
                                        const std::vector<SpaceTimePoint>& X_list,
                                        const LipschitzSweepOptions& opt) {
    if (!dom.has_boundary())
        throw ConfigError("doubling_sweep_lipschitz: domain must have a lateral boundary");
    if (!(K >= 1.0) || !(lambda >= 1.0))
        throw ConfigError("doubling_sweep_lipschitz: need K >= 1 and lambda >= 1");
    if (r_list.empty() || X_list.empty())
        throw ConfigError("doubling_sweep_lipschitz: empty sweep axes");
    const double rmax = *std::max_element(r_list.begin(), r_list.end());
    make_patch(dom, Y, 2.0 * rmax);  // validates the anchor

    const int n = dom.n;
    double t1 = 0.0, spread = 0.0;
    for (const auto& X : X_list) {
        t1 = std::max(t1, X.t);
        spread = std::max(spread, dist(X.x, Y.x));
    }
    if (!(t1 > Y.t)) throw ConfigError("doubling_sweep_lipschitz: no observation after the anchor");
    // Sized by the listed observation points, not by the admissibility cone:
    // each swept X only needs its own diffusion neighborhood in the box.
    const double half = spread + 2.0 * rmax + opt.margin * std::sqrt(t1);
    const Grid g = build_grid(dom, box_spec(n, Y.x, half, opt.h, opt.tau, 0.0, t1), f.nu);
    const std::vector<double> radii = ring_radii(r_list);
    const double lam_r0 = lambda * dom.r0;

    DoublingReport rep;
    rep.K = K;
    rep.lambda = lambda;
    rep.h = g.h;
    rep.tau = g.tau;

    struct Planned {
        SpaceTimePoint X;
        std::vector<std::string> notes;  // per r, empty = admissible
        bool sweep = false;
    };
    std::vector<Planned> plan;
    for (const auto& X0 : X_list) {
        Planned p;
        const long lvl = snapped_level(g, X0.t, 1);
        p.X = {g.coords(g.nearest_node(X0.x)), g.time_of_level(lvl)};
        for (double r : r_list) {
            std::string why;
            if (!(r <= lam_r0 / 4.0 + tol_of(lam_r0)))
                why = "r exceeds lambda r0 / 4";
            else
                why = observation_region(Y, K, 4.0 * r, lam_r0).reject_reason(p.X);
            p.notes.push_back(why);
            if (why.empty()) p.sweep = true;
        }
        if (!p.sweep)
            rep.rejected.push_back(point_str(p.X) + ": no admissible radius (" + p.notes.front() +
                                   ")");
        plan.push_back(std::move(p));
    }

    std::vector<SweepCellResult> results(plan.size());
    parallel_for(plan.size(), opt.threads, [&](std::size_t i) {
        if (plan[i].sweep) results[i] = sweep_once(f, g, plan[i].X, Y, radii);
    });

    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (plan[i].sweep) rep.truncation = std::max(rep.truncation, results[i].truncation);
        for (std::size_t k = 0; k < r_list.size(); ++k) {
            RatioCell c;
            c.X = plan[i].X;
            c.r = r_list[k];
            c.note = plan[i].notes[k];
            if (plan[i].sweep) {
                c.den = results[i].within[radius_index(radii, r_list[k])];
                c.num = results[i].within[radius_index(radii, 2.0 * r_list[k])];
            } else if (c.note.empty()) {
                c.note = "sweep skipped";
            }
            rep.cells.push_back(std::move(c));
        }
    }
    finalize_doubling(rep, opt.den_floor);
    return rep;
}

// --- bottom lower bound -----------------------------------------------------------

ConstantReport bottom_lower_bound(const Domain& dom, const Field& f, const SpaceTimePoint& Y,
                                  double r, const BottomBoundOptions& opt) {
    if (!(r > 0.0)) throw ConfigError("bottom_lower_bound: r must be positive");
    if (dom.has_boundary() && !(r <= dom.r0 / 2.0 + tol_of(dom.r0)))
        throw ConfigError("bottom_lower_bound: need r <= r0 / 2 on Lipschitz domains");
    const Patch big = make_patch(dom, Y, 2.0 * r);
    const double r2 = r * r;
    const double t1 = Y.t + r2;
    const Grid g =
        build_grid(dom, box_spec(dom.n, Y.x, 2.0 * r + opt.margin * std::sqrt(t1), opt.h,
                                 opt.tau, 0.0, t1),
                   f.nu);
    const std::vector<std::int64_t> nodes = nodes_in_ball(g, Y.x, r);
    if (nodes.empty()) throw ConfigError("bottom_lower_bound: Q_r(Y) contains no grid nodes");

    Extreme lo;
    const double t_lo = Y.t - r2 - tol_of(r2);
    auto hook = [&](long lvl, double t, const std::vector<double>& u) {
        if (lvl == 0 || t <= t_lo) return;
        for (auto idx : nodes)
            if (!lo.seen || u[idx] < lo.value) take_min(lo, u[idx], g.coords(idx), t);
    };
    march(f, g, patch_data(big), hook);

    ConstantReport rep;
    rep.experiment = "bottom_lower_bound";
    rep.constant = lo.value;
    rep.argmax = point_str(lo.at);
    rep.admissible = nodes.size();
    rep.params = {{"r", r}, {"anchor_t", Y.t}};
    rep.h = g.h;
    rep.tau = g.tau;
    return rep;
}

// --- oscillation decay ---------------------------------------------------------------

OscillationReport oscillation_decay(const Domain& dom, const Field& f, const SpaceTimePoint& Y,
                                    double r, int draws, std::uint64_t seed,
                                    const DataSampler& sampler, const OscillationOptions& opt) {
    if (!(r > 0.0)) throw ConfigError("oscillation_decay: r must be positive");
    if (draws < 1) throw ConfigError("oscillation_decay: need at least one draw");
    const Patch big = make_patch(dom, Y, 2.0 * r);
    const double r2 = r * r;
    const double t1 = Y.t + 4.0 * r2;
    const Grid g =
        build_grid(dom, box_spec(dom.n, Y.x, 2.0 * r + opt.margin * std::sqrt(t1), opt.h,
                                 opt.tau, 0.0, t1),
                   f.nu);
    const std::vector<std::int64_t> nodes_small = nodes_in_ball(g, Y.x, r);
    const std::vector<std::int64_t> nodes_large = nodes_in_ball(g, Y.x, 2.0 * r);
    if (nodes_small.empty() || nodes_large.empty())
        throw ConfigError("oscillation_decay: cylinder contains no grid nodes");

    OscillationReport rep;
    rep.h = g.h;
    rep.tau = g.tau;
    rep.draws.resize(draws);

    parallel_for(static_cast<std::size_t>(draws), opt.threads, [&](std::size_t d) {
        OscillationDraw& out = rep.draws[d];
        out.seed = substream_seed(seed, d);
        const DataFn raw = sampler(out.seed, g);
        // Cell-average realization of "data vanishes on Delta_{2r}": edge
        // cells keep the fraction of their value that lies off the patch.
        const DataFn data = [&raw, &big](const Coords& x, double t, DataSide side) {
            return raw(x, t, side) * (1.0 - patch_fraction(big, x, t));
        };
        double small_max = -kInf, small_min = kInf, large_max = -kInf, large_min = kInf;
        auto hook = [&](long lvl, double t, const std::vector<double>& u) {
            if (lvl == 0) return;
            const double dt = std::fabs(t - Y.t);
            if (dt <= 4.0 * r2 + tol_of(4.0 * r2)) {
                for (auto idx : nodes_large) {
                    large_max = std::max(large_max, u[idx]);
                    large_min = std::min(large_min, u[idx]);
                }
            }
            if (dt <= r2 + tol_of(r2)) {
                for (auto idx : nodes_small) {
                    small_max = std::max(small_max, u[idx]);
                    small_min = std::min(small_min, u[idx]);
                }
            }
        };
        march(f, g, data, hook);
        const double sup_pos_small = std::max(small_max, 0.0);
        const double sup_neg_small = std::max(-small_min, 0.0);
        const double sup_pos_large = std::max(large_max, 0.0);
        const double sup_neg_large = std::max(-large_min, 0.0);
        if (sup_pos_large > opt.sup_floor) out.ratio_pos = sup_pos_small / sup_pos_large;
        if (sup_neg_large > opt.sup_floor) out.ratio_neg = sup_neg_small / sup_neg_large;
        out.included = out.ratio_pos >= 0.0 || out.ratio_neg >= 0.0;
        if (out.included)
            out.theta = std::max(out.ratio_pos, out.ratio_neg);
        else
            out.note = "both oscillation denominators below the floor";
    });

    for (std::size_t d = 0; d < rep.draws.size(); ++d) {
        if (!rep.draws[d].included) continue;
        if (rep.argmax < 0 || rep.draws[d].theta > rep.theta_hat) {
            rep.theta_hat = rep.draws[d].theta;
            rep.argmax = static_cast<std::ptrdiff_t>(d);
        }
    }
    return rep;
}

// --- exponent laws ----------------------------------------------------------------

namespace {

std::vector<double> half_dyadic(double rho0, double R) {
    std::vector<double> out;
    for (double p = rho0; p <= R * (1.0 + 1e-12); p *= std::sqrt(2.0)) out.push_back(p);
    if (out.back() < R * (1.0 - 1e-9)) out.push_back(R);
    return out;
}

void fit_report(ExponentReport& rep, double floor_abs) {
    std::vector<double> xs, ys;
    for (auto& p : rep.points) {
        if (p.f > floor_abs && p.note.empty()) {
            p.used = true;
            xs.push_back(p.rho);
            ys.push_back(p.f);
        } else if (p.note.empty()) {
            p.note = "below the accuracy floor";
        }
    }
    if (xs.size() < 4) {
        rep.valid = false;
        if (rep.note.empty())
            rep.note = "only " + std::to_string(xs.size()) +
                       " usable samples; an exponent fit needs at least 4";
        return;
    }
    const ExponentFit fit = fit_exponent(xs, ys, 0.0);
    rep.exponent = -fit.exponent;  // report the decay rate with a positive sign
    rep.amplitude = fit.amplitude;
    rep.residual = fit.max_residual;
    rep.valid = true;
}

}  // namespace

ExponentReport growth_exponent(const Domain& dom, const Field& f, const SpaceTimePoint& Y,
                               const DataFn& data, double rho0, double R,
                               const GrowthOptions& opt) {
    if (!(rho0 > 0.0) || !(2.0 * rho0 <= R + tol_of(R)))
        throw ConfigError("growth_exponent: need 0 < 2 rho0 <= R");
    const int n = dom.n;
    const double t1 = Y.t + R * R;
    const double half = R + opt.margin * std::sqrt(t1);
    const Grid g = build_grid(dom, box_spec(n, Y.x, half, opt.h, opt.tau, 0.0, t1), f.nu);
    const double mu =
        dom.has_boundary() ? corkscrew_margin(dom, Y.x, std::min(rho0, dom.r0), opt.mu_override)
                           : 0.0;

    struct Job {
        double rho = 0.0;
        long level = 0;
        std::vector<std::int64_t> nodes;
        double f = kInf;
        bool seen = false;
    };
    std::vector<Job> jobs;
    for (double rho : half_dyadic(rho0, R)) {
        Job j;
        j.rho = rho;
        j.level = snapped_level(g, Y.t + rho * rho, 1);
        if (dom.has_boundary()) {
            const double rp = std::min(rho, dom.r0);
            j.nodes = nodes_in_shrunken(g, dom, ShrunkenBall{Y.x, rho, mu * rp});
        } else {
            j.nodes = nodes_in_ball(g, Y.x, rho);
        }
        jobs.push_back(std::move(j));
    }

    std::map<long, std::vector<std::size_t>> by_level;
    for (std::size_t i = 0; i < jobs.size(); ++i) by_level[jobs[i].level].push_back(i);

    auto hook = [&](long lvl, double, const std::vector<double>& u) {
        auto it = by_level.find(lvl);
        if (it == by_level.end()) return;
        for (std::size_t i : it->second) {
            Job& j = jobs[i];
            for (auto idx : j.nodes) j.f = std::min(j.f, u[idx]);
            j.seen = true;
        }
    };
    march(f, g, require_nonnegative(data, "growth_exponent"), hook);

    ExponentReport rep;
    rep.h = g.h;
    rep.tau = g.tau;
    rep.window_lo = rho0;
    rep.window_hi = R;
    for (const Job& j : jobs) {
        FitPoint p;
        p.rho = j.rho;
        p.f = j.seen && !j.nodes.empty() ? j.f : 0.0;
        if (j.nodes.empty()) p.note = "no grid nodes in the slice";
        rep.points.push_back(std::move(p));
    }
    fit_report(rep, opt.floor_abs);

    if (rep.valid) {
        // Lower growth law: f(rho) (rho/rho0)^gamma >= inf over [rho0, 2 rho0].
        double base = kInf;
        for (const auto& p : rep.points)
            if (p.used && p.rho <= 2.0 * rho0 + tol_of(rho0)) base = std::min(base, p.f);
        rep.lower_law_holds = base < kInf;
        for (const auto& p : rep.points) {
            if (!p.used) continue;
            if (p.f * std::pow(p.rho / rho0, rep.exponent) < base * (1.0 - 1e-9))
                rep.lower_law_holds = false;
        }
    }
    return rep;
}

ExponentReport boundary_decay_exponent(const Domain& dom, const Field& f,
                                       const SpaceTimePoint& Y, double K, double rho0, double R,
                                       const DecayData& data, const DecayOptions& opt) {
    if (!(K >= 8.0)) throw ConfigError("boundary_decay_exponent: need K >= 8");
    if (!(rho0 > 0.0) || !(rho0 <= R))
        throw ConfigError("boundary_decay_exponent: need 0 < rho0 <= R");
    const int n = dom.n;
    const double t1 = Y.t + R * R;
    // In 1d the default step matches the fourth moment of the free kernel,
    // which keeps the deep Gaussian tails of the shell suprema accurate.
    const double tau = opt.tau > 0.0 ? opt.tau : (n == 1 ? opt.h * opt.h / 6.0 : 0.0);
    const double half = K * R + opt.margin * std::sqrt(t1);
    const Grid g = build_grid(dom, box_spec(n, Y.x, half, opt.h, tau, 0.0, t1), f.nu);
    const Patch support = make_patch(dom, Y, rho0 / 2.0);

    DataFn data_fn;
    bool one_signed = false;
    switch (data.kind) {
        case DecayData::Kind::NegativePatch:
            one_signed = true;
            data_fn = [support](const Coords& x, double t, DataSide side) {
                if (side == DataSide::Truncation) return 0.0;
                return -patch_fraction(support, x, t);
            };
            break;
        case DecayData::Kind::PositivePatch:
            one_signed = true;
            data_fn = [support](const Coords& x, double t, DataSide side) {
                if (side == DataSide::Truncation) return 0.0;
                return patch_fraction(support, x, t);
            };
            break;
        case DecayData::Kind::RandomMixed: {
            const DataFn noise = hashed_data(g, data.seed, -1.0, 1.0);
            data_fn = [support, noise](const Coords& x, double t, DataSide side) {
                if (side == DataSide::Truncation) return 0.0;
                const double fr = patch_fraction(support, x, t);
                return fr > 0.0 ? fr * noise(x, t, side) : 0.0;
            };
            break;
        }
    }

    struct Shell {
        double rho = 0.0;
        std::vector<std::int64_t> nodes;
        double fmax = 0.0;
    };
    std::vector<Shell> shells;
    for (double rho : half_dyadic(rho0, R)) {
        Shell s;
        s.rho = rho;
        const double target = K * rho;
        if (n == 1) {
            for (double side : {-1.0, 1.0}) {
                Coords x{Y.x[0] + side * target};
                const std::int64_t idx = g.nearest_node(x);
                if (g.cls[idx] == NodeClass::Interior) s.nodes.push_back(idx);
            }
        } else {
            for (auto idx : g.interior) {
                const double d = dist(g.coords(idx), Y.x);
                if (std::fabs(d - target) <= 0.75 * g.h) s.nodes.push_back(idx);
            }
        }
        shells.push_back(std::move(s));
    }

    auto hook = [&](long lvl, double t, const std::vector<double>& u) {
        if (lvl == 0) return;
        const double dt = std::fabs(t - Y.t);
        for (Shell& s : shells) {
            if (dt > s.rho * s.rho + tol_of(s.rho * s.rho)) continue;
            for (auto idx : s.nodes) s.fmax = std::max(s.fmax, -u[idx]);
        }
    };
    march(f, g, data_fn, hook);

    ExponentReport rep;
    rep.h = g.h;
    rep.tau = g.tau;
    rep.window_lo = rho0;
    rep.window_hi = R;
    const double floor_abs = opt.floor_abs >= 0.0 ? opt.floor_abs : (one_signed ? 1e-280 : 1e-13);
    bool any_negative = false;
    for (const Shell& s : shells) {
        FitPoint p;
        p.rho = s.rho;
        p.f = s.fmax;
        if (s.nodes.empty()) p.note = "no grid nodes on the shell";
        if (s.fmax > 0.0) any_negative = true;
        rep.points.push_back(std::move(p));
    }
    if (!any_negative) {
        rep.note = "no negative part reached the shells";
        return rep;
    }
    fit_report(rep, floor_abs);
    return rep;
}

// --- Harnack family ----------------------------------------------------------------

ConstantReport harnack_constant(const Domain& dom, const Field& f, double delta, double lambda,
                                int draws, std::uint64_t seed, const DataSampler& sampler,
                                const HarnackOptions& opt) {
    if (dom.kind != Domain::Kind::Box)
        throw ConfigError("harnack_constant: a bounded box domain is required");
    if (!(delta > 0.0)) throw ConfigError("harnack_constant: delta must be positive");
    double diam2 = 0.0;
    for (double s : dom.sides) diam2 += s * s;
    const double diam = std::sqrt(diam2);
    if (diam / delta > lambda + tol_of(lambda))
        throw ConfigError("harnack_constant: diam/delta exceeds lambda");
    if (opt.T / (delta * delta) > lambda + tol_of(lambda))
        throw ConfigError("harnack_constant: T/delta^2 exceeds lambda");
    if (draws < 1) throw ConfigError("harnack_constant: need at least one draw");

    GridSpec gs;
    gs.h = opt.h;
    gs.tau = opt.tau;
    gs.lo.assign(dom.n, 0.0);
    gs.hi = dom.sides;
    gs.t0 = 0.0;
    gs.t1 = opt.T;
    const Grid g = build_grid(dom, gs, f.nu);

    std::vector<std::int64_t> qnodes;
    for (auto idx : g.interior)
        if (dom.boundary_distance(g.coords(idx)) > delta) qnodes.push_back(idx);
    if (qnodes.empty())
        throw ConfigError("harnack_constant: Omega^delta contains no grid nodes");

    const double d2 = delta * delta;
    const long first_lvl = snapped_level(g, d2, 1);  // levels in (delta^2, T]
    const long gap = std::max<long>(1, std::lround(d2 / g.tau));

    struct DrawResult {
        double best = -1.0;
        SpaceTimePoint argY, argX;
        std::size_t skipped = 0;
    };
    std::vector<DrawResult> res(draws);

    parallel_for(static_cast<std::size_t>(draws), opt.threads, [&](std::size_t d) {
        const std::uint64_t ds = substream_seed(seed, d);
        const DataFn data = require_nonnegative(sampler(ds, g), "harnack_constant");
        std::vector<double> lmax(g.steps + 1, -kInf), lmin(g.steps + 1, kInf);
        std::vector<std::int64_t> amax(g.steps + 1, -1), amin(g.steps + 1, -1);
        auto hook = [&](long lvl, double, const std::vector<double>& u) {
            if (lvl < first_lvl) return;
            double mx = -kInf, mn = kInf;
            std::int64_t ax = -1, an = -1;
            for (auto idx : qnodes) {
                if (u[idx] > mx) mx = u[idx], ax = idx;
                if (u[idx] < mn) mn = u[idx], an = idx;
            }
            lmax[lvl] = mx;
            lmin[lvl] = mn;
            amax[lvl] = ax;
            amin[lvl] = an;
        };
        march(f, g, data, hook);

        DrawResult& out = res[d];
        double pref = -kInf;
        long pref_lvl = -1;
        for (long k = first_lvl + gap; k <= g.steps; ++k) {
            const long j = k - gap;
            if (j >= first_lvl && lmax[j] > pref) pref = lmax[j], pref_lvl = j;
            if (pref_lvl < 0) continue;
            if (!(lmin[k] > opt.floor)) {
                ++out.skipped;
                continue;
            }
            const double ratio = pref / lmin[k];
            if (ratio > out.best) {
                out.best = ratio;
                out.argY = {g.coords(amax[pref_lvl]), g.time_of_level(pref_lvl)};
                out.argX = {g.coords(amin[k]), g.time_of_level(k)};
            }
        }
    });

    ConstantReport rep;
    rep.experiment = "harnack_constant";
    rep.h = g.h;
    rep.tau = g.tau;
    rep.params = {{"delta", delta}, {"lambda", lambda}, {"T", opt.T}, {"draws", double(draws)}};
    rep.admissible = qnodes.size();
    for (int d = 0; d < draws; ++d) {
        if (res[d].skipped)
            rep.excluded.push_back("draw " + std::to_string(d) + ": " +
                                   std::to_string(res[d].skipped) +
                                   " pair levels below the positivity floor");
        if (res[d].best > rep.constant) {
            rep.constant = res[d].best;
            rep.argmax = "draw " + std::to_string(d) + ": u" + point_str(res[d].argY) + " / u" +
                         point_str(res[d].argX);
        }
    }
    return rep;
}

ConstantReport backward_harnack(const Domain& dom, const Field& f, const Coords& x, double t,
                                double r, double delta, int draws, std::uint64_t seed,
                                const DataSampler& sampler, const BackwardHarnackOptions& opt) {
    if (!dom.has_boundary())
        throw ConfigError("backward_harnack: the solution must vanish on a lateral boundary");
    if (!(t > delta * delta)) throw ConfigError("backward_harnack: need t > delta^2");
    if (!(r > 0.0) || !(r <= 0.5 * std::min(opt.r0, delta) + tol_of(delta)))
        throw ConfigError("backward_harnack: need 0 < r <= min(r0, delta)/2");
    if (!(dom.boundary_distance(x) > opt.mu * r))
        throw ConfigError("backward_harnack: x is too close to the boundary (dist <= mu r)");
    if (draws < 1) throw ConfigError("backward_harnack: need at least one draw");

    GridSpec gs;
    gs.h = opt.h;
    gs.tau = opt.tau;
    if (dom.kind == Domain::Kind::Box) {
        gs.lo.assign(dom.n, 0.0);
        gs.hi = dom.sides;
    } else {
        gs = box_spec(dom.n, x, 6.0 * std::sqrt(t) + 2.0 * r, opt.h, opt.tau, 0.0, t + r * r);
    }
    gs.t0 = 0.0;
    gs.t1 = t + r * r;
    const Grid g = build_grid(dom, gs, f.nu);

    const std::int64_t xnode = g.nearest_node(x);
    if (g.cls[xnode] != NodeClass::Interior)
        throw ConfigError("backward_harnack: x does not snap to an interior node");
    const long k_minus = snapped_level(g, t - r * r, 1);
    const long k_plus = snapped_level(g, t + r * r, 1);

    struct DrawResult {
        double u_minus = 0.0, u_plus = 0.0;
    };
    std::vector<DrawResult> res(draws);

    parallel_for(static_cast<std::size_t>(draws), opt.threads, [&](std::size_t d) {
        const DataFn raw =
            require_nonnegative(sampler(substream_seed(seed, d), g), "backward_harnack");
        const DataFn data = [&raw](const Coords& z, double tt, DataSide side) {
            return side == DataSide::Bottom ? raw(z, tt, side) : 0.0;
        };
        auto hook = [&](long lvl, double, const std::vector<double>& u) {
            if (lvl == k_minus) res[d].u_minus = u[xnode];
            if (lvl == k_plus) res[d].u_plus = u[xnode];
        };
        march(f, g, data, hook);
    });

    ConstantReport rep;
    rep.experiment = "backward_harnack";
    rep.h = g.h;
    rep.tau = g.tau;
    rep.params = {{"r", r},
                  {"t", t},
                  {"delta", delta},
                  {"mu", opt.mu},
                  {"draws", double(draws)},
                  {"t_minus", g.time_of_level(k_minus)},
                  {"t_plus", g.time_of_level(k_plus)}};
    double decay_at_max = 0.0;
    for (int d = 0; d < draws; ++d) {
        if (!(res[d].u_minus > opt.floor)) {
            rep.excluded.push_back("draw " + std::to_string(d) +
                                   ": denominator u(x, t - r^2) below the positivity floor");
            continue;
        }
        ++rep.admissible;
        const double ratio = res[d].u_plus / res[d].u_minus;
        if (ratio > rep.constant) {
            rep.constant = ratio;
            rep.argmax = "draw " + std::to_string(d);
            decay_at_max = res[d].u_plus > 0.0 ? res[d].u_minus / res[d].u_plus : kInf;
        }
    }
    rep.params.emplace_back("decay_factor", decay_at_max);
    return rep;
}

ConstantReport quotient_bound(const Domain& dom, const Field& f, const SpaceTimePoint& Y,
                              double K, double r, const DataFn& data_u, const DataFn& data_v,
                              const QuotientOptions& opt) {
    if (!dom.has_boundary())
        throw ConfigError("quotient_bound: domain must have a lateral boundary");
    if (!(K >= 1.0)) throw ConfigError("quotient_bound: need K >= 1");
    if (!(r > 0.0) || !(r <= dom.r0 / 4.0 + tol_of(dom.r0)))
        throw ConfigError("quotient_bound: need 0 < r <= r0 / 4");
    const double r2 = r * r;
    if (!(Y.t >= 5.0 * r2 - tol_of(r2))) throw ConfigError("quotient_bound: need s >= 5 r^2");

    const double t1 = Y.t + 4.0 * r2;
    const double half = (K + 2.0) * r + opt.margin * std::sqrt(t1);
    const Grid g = build_grid(dom, box_spec(dom.n, Y.x, half, opt.h, opt.tau, 0.0, t1), f.nu);
    const double mu = corkscrew_margin(dom, Y.x, r, opt.mu_override);

    // Force both solutions to vanish on the lateral window C_{(K+2) r, 2r}(Y).
    const double win_r = (K + 2.0) * r + tol_of(r);
    const double win_t = 4.0 * r2 + tol_of(r2);
    auto windowed = [&](const DataFn& raw, const char* who) {
        const DataFn guarded = require_nonnegative(raw, who);
        const Coords yx = Y.x;
        const double ys = Y.t;
        return DataFn([guarded, yx, ys, win_r, win_t](const Coords& z, double tt, DataSide side) {
            if (side == DataSide::Lateral && dist(z, yx) <= win_r && std::fabs(tt - ys) <= win_t)
                return 0.0;
            return guarded(z, tt, side);
        });
    };

    const std::vector<std::int64_t> eval_nodes = nodes_in_ball(g, Y.x, K * r);
    const std::vector<std::int64_t> minus_nodes =
        nodes_in_shrunken(g, dom, ShrunkenBall{Y.x, 2.0 * r, 2.0 * mu * r});
    if (eval_nodes.empty()) throw ConfigError("quotient_bound: Q_{Kr,r}(Y) has no grid nodes");
    if (minus_nodes.empty())
        throw ConfigError("quotient_bound: the corkscrew slices have no grid nodes");

    const long k_minus = snapped_level(g, Y.t - 4.0 * r2, 1);
    const long k_plus = snapped_level(g, Y.t + 4.0 * r2, 1);
    const long k_lo = snapped_level(g, Y.t - r2, 1);
    const long k_hi = snapped_level(g, Y.t + r2, 1);

    // Pass 1: u.  Store its restriction to the evaluation window.
    std::vector<std::vector<double>> u_window(k_hi - k_lo + 1);
    Extreme u_minus_sup;
    auto hook_u = [&](long lvl, double t, const std::vector<double>& u) {
        if (lvl >= k_lo && lvl <= k_hi) {
            auto& slot = u_window[lvl - k_lo];
            slot.reserve(eval_nodes.size());
            for (auto idx : eval_nodes) slot.push_back(u[idx]);
        }
        if (lvl == k_minus)
            for (auto idx : minus_nodes) take_max(u_minus_sup, u[idx], g.coords(idx), t);
    };
    march(f, g, windowed(data_u, "quotient_bound (u)"), hook_u);

    // Pass 2: v.  Ratios against the stored u, plus the plus-slice infimum.
    Extreme lhs, v_plus_inf;
    std::size_t skipped = 0;
    auto hook_v = [&](long lvl, double t, const std::vector<double>& v) {
        if (lvl >= k_lo && lvl <= k_hi) {
            const auto& uu = u_window[lvl - k_lo];
            for (std::size_t i = 0; i < eval_nodes.size(); ++i) {
                if (!(uu[i] > opt.floor)) {
                    ++skipped;
                    continue;
                }
                take_max(lhs, v[eval_nodes[i]] / uu[i], g.coords(eval_nodes[i]), t);
            }
        }
        if (lvl == k_plus)
            for (auto idx : minus_nodes) {
                // Omega_{2r}^+ uses the same shrunken ball at the mirrored time.
                if (!v_plus_inf.seen || v[idx] < v_plus_inf.value)
                    take_min(v_plus_inf, v[idx], g.coords(idx), t);
            }
    };
    march(f, g, windowed(data_v, "quotient_bound (v)"), hook_v);

    if (!lhs.seen) throw ConfigError("quotient_bound: u vanished at every evaluation node");
    if (!v_plus_inf.seen || !(v_plus_inf.value > opt.floor))
        throw ConfigError("quotient_bound: v vanishes on the plus slice");
    if (!(u_minus_sup.value > opt.floor))
        throw ConfigError("quotient_bound: u vanishes on the minus slice");

    ConstantReport rep;
    rep.experiment = "quotient_bound";
    rep.h = g.h;
    rep.tau = g.tau;
    rep.constant = lhs.value * u_minus_sup.value / v_plus_inf.value;
    rep.argmax = "v/u at " + point_str(lhs.at);
    rep.admissible = eval_nodes.size();
    if (skipped)
        rep.excluded.push_back(std::to_string(skipped) +
                               " node evaluations skipped: u below the positivity floor");
    rep.params = {{"K", K},
                  {"r", r},
                  {"s", Y.t},
                  {"mu", mu},
                  {"lhs_sup", lhs.value},
                  {"v_plus_inf", v_plus_inf.value},
                  {"u_minus_sup", u_minus_sup.value}};
    return rep;
}

// --- Aronson envelope ---------------------------------------------------------------

AronsonReport aronson_sandwich(const Field& f, double t_fixed,
                               const std::vector<Coords>& xy_samples,
                               const AronsonOptions& opt) {
    if (f.form != Form::Divergence)
        throw ConfigError(
            "aronson_sandwich: the two-sided Gaussian envelope is a divergence-form "
            "estimate; it fails for nondivergence operators, so the check is refused");
    if (!(t_fixed > 0.0)) throw ConfigError("aronson_sandwich: t must be positive");
    if (xy_samples.empty()) throw ConfigError("aronson_sandwich: no sample offsets");

    const int n = f.n;
    double dmax = 0.0;
    const Coords origin(n, 0.0);
    for (const auto& x : xy_samples) {
        if (static_cast<int>(x.size()) != n)
            throw ConfigError("aronson_sandwich: sample dimension mismatch");
        dmax = std::max(dmax, dist(x, origin));
    }
    const double half = dmax + opt.margin * std::sqrt(t_fixed);
    const Grid g =
        build_grid(Domain::whole_space(n), box_spec(n, origin, half, opt.h, opt.tau, 0.0, t_fixed),
                   f.nu);
    const std::vector<double> slice = green_function(f, g, origin);

    AronsonReport rep;
    rep.h = g.h;
    rep.tau = g.tau;
    for (const auto& x : xy_samples) {
        const std::int64_t idx = g.nearest_node(x);
        const double d = dist(g.coords(idx), origin);  // snapped offset
        const double val = slice[idx];
        if (!(val > 0.0))
            throw ConfigError("aronson_sandwich: kernel vanished at offset " +
                              fmt_double(d) + "; enlarge the box or refine the grid");
        rep.samples.emplace_back(d * d, val);
    }
    std::sort(rep.samples.begin(), rep.samples.end());

    // Least-squares line of log Gamma against d^2.
    const std::size_t m = rep.samples.size();
    double sx = 0.0, sy = 0.0;
    for (const auto& [d2, v] : rep.samples) sx += d2, sy += std::log(v);
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [d2, v] : rep.samples) {
        sxx += (d2 - mx) * (d2 - mx);
        sxy += (d2 - mx) * (std::log(v) - my);
    }
    rep.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    rep.intercept = my - rep.slope * mx;
    for (const auto& [d2, v] : rep.samples)
        rep.residual =
            std::max(rep.residual, std::fabs(std::log(v) - (rep.intercept + rep.slope * d2)));

    const double slack = 1.0 + 1e-12;
    rep.n_upper = bisect_monotone(
        [&](double N) {
            for (const auto& [d2, v] : rep.samples)
                if (v > slack * N * std::exp(-d2 / N)) return false;
            return true;
        },
        1.0, opt.n_cap);
    rep.n_lower = bisect_monotone(
        [&](double N) {
            for (const auto& [d2, v] : rep.samples)
                if (v * slack < std::exp(-N * d2) / N) return false;
            return true;
        },
        1.0, opt.n_cap);
    return rep;
}

// --- Green function comparison --------------------------------------------------------

GreenComparisonReport green_measure_comparison(const Domain& dom, const Field& f,
                                               const SpaceTimePoint& Y,
                                               const std::vector<double>& rho_list,
                                               const SpaceTimePoint& X,
                                               const GreenOptions& opt) {
    if (rho_list.empty()) throw ConfigError("green_measure_comparison: empty rho list");
    std::vector<double> rhos = rho_list;
    std::sort(rhos.begin(), rhos.end());
    const double rmax = rhos.back();
    if (!(rhos.front() > 0.0))
        throw ConfigError("green_measure_comparison: rho must be positive");
    if (dom.has_boundary() && !(rmax <= dom.r0 / 2.0 + tol_of(dom.r0)))
        throw ConfigError("green_measure_comparison: need rho <= r0 / 2");
    if (!(X.t > Y.t + rmax * rmax))
        throw ConfigError("green_measure_comparison: X.t <= s + rho^2");

    const int n = dom.n;
    const double half =
        std::max(dist(X.x, Y.x), 2.0 * rmax) + 2.0 * rmax + opt.margin * std::sqrt(X.t);

    // One backward sweep gives every patch measure.
    const Grid g_sweep =
        build_grid(dom, box_spec(n, Y.x, half, opt.h, opt.tau, 0.0, X.t), f.nu);
    RingBinner bin(Y, rhos);
    exit_sweep(f, g_sweep, X, bin);

    GreenComparisonReport rep;
    rep.h = g_sweep.h;
    rep.tau = g_sweep.tau;
    rep.band_lo = kInf;
    rep.band_hi = 0.0;

    for (std::size_t j = 0; j < rhos.size(); ++j) {
        const double rho = rhos[j];
        GreenRatioRow row;
        row.rho = rho;
        row.measure = bin.within(j);
        const Coords y_rho = dom.has_boundary() ? corkscrew(dom, Y.x, rho).inner : Y.x;
        const double rho_n = std::pow(rho, n);
        for (int sign : {+1, -1}) {
            const double src_t = Y.t + sign * rho * rho;
            const Grid gg =
                build_grid(dom, box_spec(n, Y.x, half, opt.h, opt.tau, src_t, X.t), f.nu);
            const std::vector<double> slice = green_function(f, gg, y_rho);
            const double gv = sample_nearest(gg, slice, X.x);
            if (!(gv > 0.0))
                throw ConfigError("green_measure_comparison: Green value vanished at rho = " +
                                  fmt_double(rho));
            if (sign > 0) {
                row.g_plus = gv;
                row.ratio_plus = row.measure / (rho_n * gv);
            } else {
                row.g_minus = gv;
                row.ratio_minus = row.measure / (rho_n * gv);
            }
        }
        rep.band_lo = std::min(rep.band_lo, row.ratio_plus);
        rep.band_hi = std::max(rep.band_hi, row.ratio_minus);
        rep.rows.push_back(row);
    }
    rep.constant = std::max(rep.band_hi, rep.band_lo > 0.0 ? 1.0 / rep.band_lo : kInf);
    return rep;
}

// --- interior measure domination ------------------------------------------------------

ConstantReport interior_measure_domination(const Domain& dom, const Field& f,
                                           const SpaceTimePoint& Y, double rho, double K,
                                           double lambda, const DominationOptions& opt) {
    if (!(rho > 0.0)) throw ConfigError("interior_measure_domination: rho must be positive");
    if (dom.has_boundary() && !(2.0 * rho <= lambda * dom.r0 + tol_of(dom.r0)))
        throw ConfigError("interior_measure_domination: need 2 rho <= lambda r0");
    if (!(K >= 1.0)) throw ConfigError("interior_measure_domination: need K >= 1");

    const int n = dom.n;
    const double rho_p = std::min(rho, dom.r0);
    const double mu =
        dom.has_boundary() ? corkscrew_margin(dom, Y.x, rho_p, opt.mu_override)
                           : (opt.mu_override >= 0.0 ? opt.mu_override : 0.0);
    const double t0 = Y.t + rho * rho;
    const double t1 = Y.t + 4.0 * rho * rho;
    const double half = 2.0 * K * rho + opt.margin * std::sqrt(t1 - t0) + rho;
    const Grid g = build_grid(dom, box_spec(n, Y.x, half, opt.h, opt.tau, t0, t1), f.nu);

    const ShrunkenBall sb{Y.x, rho_p, mu * rho_p};
    bool any_inner = false;
    for (auto idx : g.interior)
        if (shrunken_contains(dom, sb, g.coords(idx))) {
            any_inner = true;
            break;
        }
    if (!any_inner)
        throw ConfigError(
            "interior_measure_domination: the corkscrew slice has no grid nodes "
            "(resolution too coarse)");

    const DataFn data_u = [&](const Coords& z, double, DataSide side) {
        return side == DataSide::Bottom && shrunken_contains(dom, sb, z) ? 1.0 : 0.0;
    };
    const DataFn data_v = [](const Coords&, double, DataSide side) {
        return side == DataSide::Bottom ? 1.0 : 0.0;
    };
    const std::vector<double> u = march(f, g, data_u);
    const std::vector<double> v = march(f, g, data_v);

    ConstantReport rep;
    rep.experiment = "interior_measure_domination";
    rep.h = g.h;
    rep.tau = g.tau;
    rep.params = {{"rho", rho},     {"K", K},         {"lambda", lambda},
                  {"mu", mu},       {"rho_p", rho_p}, {"slice_t", t0},
                  {"slice_snap", 0.0}};
    Extreme best;
    std::size_t skipped = 0;
    for (auto idx : nodes_in_ball(g, Y.x, 2.0 * K * rho)) {
        if (!(u[idx] > opt.floor)) {
            ++skipped;
            continue;
        }
        ++rep.admissible;
        take_max(best, v[idx] / u[idx], g.coords(idx), t1);
    }
    if (!best.seen)
        throw ConfigError("interior_measure_domination: denominator vanished on the whole slice");
    if (skipped)
        rep.excluded.push_back(std::to_string(skipped) +
                               " slice nodes skipped: denominator below the floor");
    rep.constant = best.value;
    rep.argmax = point_str(best.at);
    return rep;
}

}  // namespace caloric
