// Space-time geometry: domains bounded below by Lipschitz graphs, boxes,
// and whole space; parabolic cylinders, boundary patches, corkscrew points,
// shrunken sets, and the admissible observation regions used by the sweeps.
//
// Conventions.  A space-time point is (x, t) with x in R^n, n in {1, 2}.
// Graph domains are Omega = { x : x_n > phi(x') } for a single global chart
// phi with Lipschitz constant m; for n = 1 the chart degenerates and Omega
// is the half line { x_1 > phi() }.  The parabolic boundary of the cylinder
// Q = Omega x (0, T) is the bottom (closure of Omega at t = 0) plus the
// lateral wall (graph x (0, T]).
#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace caloric {

using Coords = std::vector<double>;

struct SpaceTimePoint {
    Coords x;
    double t = 0.0;
};

// Piecewise-linear boundary profile evaluated on the chart coordinate
// (the first n-1 coordinates; for n = 1 it is a constant).
struct Profile {
    enum class Kind { Flat, Cone, Sawtooth, Samples };
    Kind kind = Kind::Flat;
    double level = 0.0;            // Flat value / apex height for Cone
    double slope = 0.0;            // Cone, Sawtooth: |phi'| = slope
    double period = 1.0;           // Sawtooth
    std::vector<double> xs, ys;    // Samples: breakpoints (strictly increasing)

    double operator()(double xp) const;
    // Smallest Lipschitz constant of the profile.
    double lipschitz() const;
    // Segment endpoints covering [a, b]; used for exact distance queries.
    // Each segment is ((x0,y0),(x1,y1)); half-infinite pieces are clamped
    // to the query window.
    std::vector<std::array<double, 4>> segments(double a, double b) const;
};

struct Domain {
    enum class Kind { WholeSpace, Graph, Box };
    Kind kind = Kind::WholeSpace;
    int n = 1;
    // Graph data
    Profile phi;
    double m = 0.0;                         // Lipschitz constant of phi
    double r0 = std::numeric_limits<double>::infinity();  // chart radius
    // Box data: (0, sides[i]) per axis
    std::vector<double> sides;

    bool contains(const Coords& x) const;          // open set membership
    double boundary_distance(const Coords& x) const;  // exact; +inf for whole space
    bool has_boundary() const { return kind != Kind::WholeSpace; }
    // True if Omega extends past the given side of a finite sampling box,
    // i.e. a grid cut there is artificial truncation rather than boundary.
    bool side_is_artificial(int axis, int dir) const;
    std::string id() const;                        // short attribution tag
    // Graph segments within +-halfwidth of the chart coordinate xc.
    std::vector<std::array<double, 4>> segments_cache_window(double xc, double halfwidth) const;

    static Domain whole_space(int n);
    static Domain graph(int n, Profile phi, double r0);
    static Domain box(std::vector<double> sides);
};

// C_{R,r}(Y) = B_R(y) x (s - r^2, s + r^2)
struct Cylinder {
    SpaceTimePoint Y;
    double R = 0.0;
    double r = 0.0;
    bool contains(const Coords& x, double t) const;
};

Cylinder parabolic_cylinder(const SpaceTimePoint& Y, double R, double r);
inline Cylinder parabolic_cylinder(const SpaceTimePoint& Y, double r) {
    return parabolic_cylinder(Y, r, r);
}

// Boundary patch Delta_r(Y): points of the parabolic boundary with
// |z - y| < r and |tau - s| < r^2.  Y itself must lie on the parabolic
// boundary (validated by make_patch).
struct Patch {
    SpaceTimePoint Y;
    double r = 0.0;
    bool touches_bottom = false;   // window reaches t = 0
    bool touches_lateral = false;  // ball reaches the lateral wall
};

Patch make_patch(const Domain& dom, const SpaceTimePoint& Y, double r);

// Membership of a parabolic-boundary point (z, tau); `lateral` tells which
// part of the boundary the point lives on (false = bottom slice t = 0).
bool patch_contains(const Patch& p, const Coords& z, double tau);

// Corkscrew points for a boundary point y at scale r: an interior and an
// exterior point a fixed fraction of r away from the wall.  mu is the
// guaranteed clearance factor: B_{2 mu r}(inner) sits inside B_r(y) cap Omega.
struct CorkscrewPair {
    Coords inner;
    Coords outer;
    double mu = 0.0;
};

CorkscrewPair corkscrew(const Domain& dom, const Coords& y, double r);

// Shrunken set Omega^delta = { x in Omega : dist(x, boundary) > delta },
// optionally intersected with a closed ball B_rho(y).
struct ShrunkenBall {
    Coords y;
    double rho = std::numeric_limits<double>::infinity();
    double delta = 0.0;
};

bool shrunken_contains(const Domain& dom, const ShrunkenBall& s, const Coords& x);

// Admissible observation region around a boundary anchor Y:
//   |x - y| <= K sqrt(t - s),  rho0 <= sqrt(t - s) <= R.
// rho0 = 0 gives the whole-space variant.
struct ObservationRegion {
    SpaceTimePoint Y;
    double K = 1.0;
    double rho0 = 0.0;
    double R = std::numeric_limits<double>::infinity();
    bool contains(const SpaceTimePoint& X) const;
    // Reason the point fails, empty if admissible; used for reject logs.
    std::string reject_reason(const SpaceTimePoint& X) const;
};

ObservationRegion observation_region(const SpaceTimePoint& Y, double K, double rho0, double R);

double dist(const Coords& a, const Coords& b);

// JSON (config schema) round trip.
void to_json(nlohmann::json& j, const Domain& d);
void from_json(const nlohmann::json& j, Domain& d);

}  // namespace caloric
