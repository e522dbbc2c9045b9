#include "caloric/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "caloric/util.hpp"

namespace caloric {

double dist(const Coords& a, const Coords& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// --- Profile -----------------------------------------------------------------

double Profile::operator()(double xp) const {
    switch (kind) {
        case Kind::Flat:
            return level;
        case Kind::Cone:
            return level + slope * std::abs(xp);
        case Kind::Sawtooth: {
            // triangle wave: zero at multiples of `period`, peaks in between
            double u = xp - period * std::round(xp / period);
            return level + slope * std::abs(u);
        }
        case Kind::Samples: {
            if (xs.empty()) return level;
            if (xp <= xs.front()) return ys.front();
            if (xp >= xs.back()) return ys.back();
            auto it = std::upper_bound(xs.begin(), xs.end(), xp);
            std::size_t i = static_cast<std::size_t>(it - xs.begin());
            double w = (xp - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return ys[i - 1] * (1.0 - w) + ys[i] * w;
        }
    }
    return level;
}

double Profile::lipschitz() const {
    switch (kind) {
        case Kind::Flat:
            return 0.0;
        case Kind::Cone:
        case Kind::Sawtooth:
            return std::abs(slope);
        case Kind::Samples: {
            double m = 0.0;
            for (std::size_t i = 1; i < xs.size(); ++i)
                m = std::max(m, std::abs(ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
            return m;
        }
    }
    return 0.0;
}

std::vector<std::array<double, 4>> Profile::segments(double a, double b) const {
    std::vector<std::array<double, 4>> out;
    auto push = [&out, this](double x0, double x1) {
        out.push_back({x0, (*this)(x0), x1, (*this)(x1)});
    };
    switch (kind) {
        case Kind::Flat:
            push(a, b);
            break;
        case Kind::Cone:
            if (a < 0.0 && b > 0.0) {
                push(a, 0.0);
                push(0.0, b);
            } else {
                push(a, b);
            }
            break;
        case Kind::Sawtooth: {
            // breakpoints every half period
            double step = period / 2.0;
            long k0 = static_cast<long>(std::floor(a / step));
            long k1 = static_cast<long>(std::ceil(b / step));
            for (long k = k0; k < k1; ++k)
                push(std::max(a, k * step), std::min(b, (k + 1) * step));
            break;
        }
        case Kind::Samples: {
            double prev = a;
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                double lo = std::max(a, xs[i]), hi = std::min(b, xs[i + 1]);
                if (lo < hi) {
                    if (prev < lo) push(prev, lo);  // flat extension gap
                    push(lo, hi);
                    prev = hi;
                }
            }
            if (prev < b) push(prev, b);
            break;
        }
    }
    return out;
}

// --- Domain ------------------------------------------------------------------

Domain Domain::whole_space(int n) {
    Domain d;
    d.kind = Kind::WholeSpace;
    d.n = n;
    return d;
}

Domain Domain::graph(int n, Profile phi, double r0) {
    if (n != 1 && n != 2) throw ConfigError("graph domain: n must be 1 or 2");
    if (n == 1 && phi.kind != Profile::Kind::Flat)
        throw ConfigError("graph domain: n = 1 admits only a flat profile");
    Domain d;
    d.kind = Kind::Graph;
    d.n = n;
    d.phi = phi;
    d.m = phi.lipschitz();
    d.r0 = r0;
    if (!(r0 > 0.0)) throw ConfigError("graph domain: r0 must be positive");
    return d;
}

Domain Domain::box(std::vector<double> sides) {
    Domain d;
    d.kind = Kind::Box;
    d.n = static_cast<int>(sides.size());
    if (d.n != 1 && d.n != 2) throw ConfigError("box domain: need 1 or 2 side lengths");
    for (double s : sides)
        if (!(s > 0.0)) throw ConfigError("box domain: side lengths must be positive");
    d.sides = std::move(sides);
    return d;
}

bool Domain::contains(const Coords& x) const {
    switch (kind) {
        case Kind::WholeSpace:
            return true;
        case Kind::Graph:
            return x[static_cast<std::size_t>(n - 1)] > (n == 1 ? phi(0.0) : phi(x[0]));
        case Kind::Box:
            for (int i = 0; i < n; ++i) {
                auto u = static_cast<std::size_t>(i);
                if (!(x[u] > 0.0 && x[u] < sides[u])) return false;
            }
            return true;
    }
    return false;
}

static double point_segment_dist(double px, double py, const std::array<double, 4>& s) {
    double vx = s[2] - s[0], vy = s[3] - s[1];
    double wx = px - s[0], wy = py - s[1];
    double vv = vx * vx + vy * vy;
    double t = vv > 0.0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
    double dx = wx - t * vx, dy = wy - t * vy;
    return std::sqrt(dx * dx + dy * dy);
}

double Domain::boundary_distance(const Coords& x) const {
    switch (kind) {
        case Kind::WholeSpace:
            return std::numeric_limits<double>::infinity();
        case Kind::Graph: {
            if (n == 1) return std::abs(x[0] - phi(0.0));
            // vertical gap bounds the minimizer's chart window
            double d0 = std::abs(x[1] - phi(x[0]));
            if (d0 == 0.0) return 0.0;
            double best = d0;
            for (const auto& seg : segments_cache_window(x[0], d0))
                best = std::min(best, point_segment_dist(x[0], x[1], seg));
            return best;
        }
        case Kind::Box: {
            // inside: smallest face margin; outside: distance to the surface
            bool inside = true;
            double margin = std::numeric_limits<double>::infinity();
            double out2 = 0.0;
            for (int i = 0; i < n; ++i) {
                auto u = static_cast<std::size_t>(i);
                if (x[u] < 0.0) {
                    inside = false;
                    out2 += x[u] * x[u];
                } else if (x[u] > sides[u]) {
                    inside = false;
                    out2 += (x[u] - sides[u]) * (x[u] - sides[u]);
                } else {
                    margin = std::min(margin, std::min(x[u], sides[u] - x[u]));
                }
            }
            return inside ? margin : std::sqrt(out2);
        }
    }
    return 0.0;
}

std::vector<std::array<double, 4>> Domain::segments_cache_window(double xc, double halfwidth) const {
    return phi.segments(xc - halfwidth - 1e-12, xc + halfwidth + 1e-12);
}

bool Domain::side_is_artificial(int axis, int dir) const {
    switch (kind) {
        case Kind::WholeSpace:
            return true;
        case Kind::Graph:
            // bounded below by the graph along the last axis only
            return !(axis == n - 1 && dir < 0);
        case Kind::Box:
            return false;
    }
    return false;
}

std::string Domain::id() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::WholeSpace:
            os << "ws" << n;
            break;
        case Kind::Graph: {
            os << "graph" << n << "_";
            switch (phi.kind) {
                case Profile::Kind::Flat: os << "flat"; break;
                case Profile::Kind::Cone: os << "cone"; break;
                case Profile::Kind::Sawtooth: os << "saw"; break;
                case Profile::Kind::Samples: os << "samples"; break;
            }
            os << "_m" << fmt_double(m) << "_r0" << fmt_double(r0);
            break;
        }
        case Kind::Box: {
            os << "box" << n;
            for (double s : sides) os << "_" << fmt_double(s);
            break;
        }
    }
    return os.str();
}

// --- Cylinder / patches --------------------------------------------------------

Cylinder parabolic_cylinder(const SpaceTimePoint& Y, double R, double r) {
    if (!(R > 0.0) || !(r > 0.0)) throw ConfigError("cylinder: R and r must be positive");
    return Cylinder{Y, R, r};
}

bool Cylinder::contains(const Coords& x, double t) const {
    if (dist(x, Y.x) >= R) return false;
    return std::abs(t - Y.t) < r * r;
}

Patch make_patch(const Domain& dom, const SpaceTimePoint& Y, double r) {
    if (!(r > 0.0)) throw ConfigError("patch: radius must be positive");
    if (Y.t < 0.0) throw ConfigError("patch: anchor time must be >= 0");
    const double tol = 1e-9 * std::max(1.0, std::abs(Y.t) + dist(Y.x, Coords(Y.x.size(), 0.0)));
    double bd = dom.boundary_distance(Y.x);
    bool on_wall = dom.has_boundary() && bd <= tol;
    bool on_bottom = Y.t <= tol && (dom.contains(Y.x) || bd <= tol);
    if (!on_wall && !on_bottom)
        throw ConfigError("patch: anchor not on the parabolic boundary");
    Patch p;
    p.Y = Y;
    p.r = r;
    p.touches_bottom = Y.t < r * r;
    p.touches_lateral = dom.has_boundary() && bd < r;
    return p;
}

bool patch_contains(const Patch& p, const Coords& z, double tau) {
    if (dist(z, p.Y.x) >= p.r) return false;
    return std::abs(tau - p.Y.t) < p.r * p.r;
}

// --- corkscrew -----------------------------------------------------------------

CorkscrewPair corkscrew(const Domain& dom, const Coords& y, double r) {
    if (!(r > 0.0)) throw ConfigError("corkscrew: r must be positive");
    if (!dom.has_boundary()) throw ConfigError("corkscrew: domain has no boundary");
    double bd = dom.boundary_distance(y);
    if (bd > 1e-9 * std::max(1.0, r))
        throw ConfigError("corkscrew: y is not a boundary point");
    CorkscrewPair cp;
    if (dom.kind == Domain::Kind::Graph) {
        if (!(r < dom.r0)) throw ConfigError("corkscrew: r must be below the chart radius r0");
        cp.mu = 1.0 / (4.0 * std::sqrt(1.0 + dom.m * dom.m));
        cp.inner = y;
        cp.outer = y;
        auto axis = static_cast<std::size_t>(dom.n - 1);
        cp.inner[axis] += r / 2.0;
        cp.outer[axis] -= r / 2.0;
    } else {
        // box: step along the inward normal of the nearest face
        int axis = 0, dir = +1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < dom.n; ++i) {
            auto u = static_cast<std::size_t>(i);
            if (std::abs(y[u]) < best) {
                best = std::abs(y[u]);
                axis = i;
                dir = +1;
            }
            if (std::abs(dom.sides[u] - y[u]) < best) {
                best = std::abs(dom.sides[u] - y[u]);
                axis = i;
                dir = -1;
            }
        }
        cp.mu = 0.25;
        cp.inner = y;
        cp.outer = y;
        auto u = static_cast<std::size_t>(axis);
        cp.inner[u] += dir * r / 2.0;
        cp.outer[u] -= dir * r / 2.0;
        if (!dom.contains(cp.inner) || dom.boundary_distance(cp.inner) < 2.0 * cp.mu * r)
            throw ConfigError("corkscrew: no interior clearance at this scale (box corner?)");
    }
    return cp;
}

// --- shrunken sets ---------------------------------------------------------------

bool shrunken_contains(const Domain& dom, const ShrunkenBall& s, const Coords& x) {
    if (!dom.contains(x)) return false;
    if (dom.boundary_distance(x) <= s.delta) return false;
    if (std::isfinite(s.rho) && dist(x, s.y) > s.rho) return false;
    return true;
}

// --- observation region ----------------------------------------------------------

ObservationRegion observation_region(const SpaceTimePoint& Y, double K, double rho0, double R) {
    if (!(K > 0.0)) throw ConfigError("observation region: K must be positive");
    if (rho0 < 0.0 || !(R > 0.0) || rho0 > R)
        throw ConfigError("observation region: need 0 <= rho0 <= R");
    return ObservationRegion{Y, K, rho0, R};
}

std::string ObservationRegion::reject_reason(const SpaceTimePoint& X) const {
    double dt = X.t - Y.t;
    if (dt < rho0 * rho0) return "sqrt(t-s) below rho0";
    if (dt > R * R) return "sqrt(t-s) above R";
    if (dist(X.x, Y.x) > K * std::sqrt(dt)) return "|x-y| above K*sqrt(t-s)";
    return {};
}

bool ObservationRegion::contains(const SpaceTimePoint& X) const {
    return reject_reason(X).empty();
}

// --- JSON ------------------------------------------------------------------------

static void profile_to_json(nlohmann::json& j, const Profile& p) {
    switch (p.kind) {
        case Profile::Kind::Flat:
            j = {{"kind", "flat"}};
            if (p.level != 0.0) j["level"] = p.level;
            break;
        case Profile::Kind::Cone:
            j = {{"kind", "cone"}};
            break;
        case Profile::Kind::Sawtooth:
            j = {{"kind", "sawtooth"}, {"period", p.period}};
            break;
        case Profile::Kind::Samples:
            j = {{"kind", "samples"}, {"x", p.xs}, {"y", p.ys}};
            break;
    }
}

void to_json(nlohmann::json& j, const Domain& d) {
    switch (d.kind) {
        case Domain::Kind::WholeSpace:
            j = {{"kind", "whole_space"}, {"n", d.n}};
            break;
        case Domain::Kind::Graph: {
            nlohmann::json pj;
            profile_to_json(pj, d.phi);
            j = {{"kind", "graph"}, {"n", d.n}, {"m", d.m}, {"r0", d.r0}, {"phi", pj}};
            break;
        }
        case Domain::Kind::Box:
            j = {{"kind", "box"}, {"n", d.n}, {"sides", d.sides}};
            break;
    }
}

void from_json(const nlohmann::json& j, Domain& d) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "whole_space") {
        d = Domain::whole_space(j.at("n").get<int>());
    } else if (kind == "graph") {
        int n = j.at("n").get<int>();
        double m = j.at("m").get<double>();
        double r0 = j.at("r0").get<double>();
        Profile p;
        const auto& pj = j.at("phi");
        const std::string pk = pj.at("kind").get<std::string>();
        if (pk == "flat") {
            p.kind = Profile::Kind::Flat;
            p.level = pj.value("level", 0.0);
        } else if (pk == "cone") {
            p.kind = Profile::Kind::Cone;
            p.slope = m;
        } else if (pk == "sawtooth") {
            p.kind = Profile::Kind::Sawtooth;
            p.slope = m;
            p.period = pj.at("period").get<double>();
        } else if (pk == "samples") {
            p.kind = Profile::Kind::Samples;
            p.xs = pj.at("x").get<std::vector<double>>();
            p.ys = pj.at("y").get<std::vector<double>>();
            if (p.xs.size() != p.ys.size() || p.xs.size() < 2)
                throw ConfigError("profile samples: need matching x/y lists, length >= 2");
            for (std::size_t i = 1; i < p.xs.size(); ++i)
                if (!(p.xs[i] > p.xs[i - 1]))
                    throw ConfigError("profile samples: x must be strictly increasing");
        } else {
            throw ConfigError("unknown profile kind: " + pk);
        }
        d = Domain::graph(n, p, r0);
        if (d.m > m + 1e-12)
            throw ConfigError("graph domain: profile violates the declared Lipschitz constant");
        d.m = m;  // declared constant governs mu and admissibility
    } else if (kind == "box") {
        d = Domain::box(j.at("sides").get<std::vector<double>>());
    } else {
        throw ConfigError("unknown domain kind: " + kind);
    }
}

}  // namespace caloric
