// Space-time lattices.  A Grid is a uniform node lattice over a spatial box
// together with a node classification against the domain:
//
//   Interior    inside Omega, all 3^n stencil neighbours on the lattice
//   Lateral     outside Omega (or on its wall) but stencil-adjacent to an
//               interior node -- carries lateral boundary data
//   Truncation  inside Omega but on the lattice edge -- an artificial cut
//               where Omega extends past the sampled box
//   Outside     everything else (never read by the stepper)
//
// Curved walls are realized by masking (staircase boundary).  The bottom of
// the space-time cylinder is the full level t0 slice, not a node class.
// Time levels are t0 + k * tau with tau chosen to divide t1 - t0 exactly.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caloric/geometry.hpp"

namespace caloric {

enum class NodeClass : std::uint8_t { Interior, Lateral, Truncation, Outside };

struct GridSpec {
    double h = 0.1;
    double tau = 0.0;   // <= 0 requests the default h^2 nu / (8 n)
    Coords lo, hi;      // requested spatial cover; the lattice snaps outward
    double t0 = 0.0;
    double t1 = 1.0;
    // When set, lattice nodes sit at anchor + (k + 1/2) h per axis, so the
    // anchor is a cell midpoint; otherwise the lattice passes through 0.
    std::optional<Coords> midpoint_anchor;
};

struct Grid {
    Domain domain;
    int n = 1;
    double h = 0.0, tau = 0.0;
    double t0 = 0.0, t1 = 0.0;
    long steps = 0;
    std::array<long, 2> dims{1, 1};
    std::array<double, 2> origin{0.0, 0.0};
    std::vector<NodeClass> cls;
    std::vector<std::int64_t> interior;   // ascending flat indices
    std::vector<std::int64_t> boundary;   // Lateral + Truncation, ascending

    long size() const { return dims[0] * dims[1]; }
    std::int64_t index(long ix, long iy = 0) const { return ix + dims[0] * iy; }
    long ix_of(std::int64_t idx) const { return static_cast<long>(idx % dims[0]); }
    long iy_of(std::int64_t idx) const { return static_cast<long>(idx / dims[0]); }
    double axis_coord(int axis, long i) const { return origin[axis] + h * i; }
    Coords coords(std::int64_t idx) const;

    // Nearest lattice node to x (clamped to the box); the snap distance is
    // reported so callers can surface how far an anchor moved.
    std::int64_t nearest_node(const Coords& x, double* snap_dist = nullptr) const;
    long level_of_time(double t) const;           // nearest level, validated
    double time_of_level(long k) const { return t0 + tau * k; }
};

// nu enters only through the default time step.
Grid build_grid(const Domain& dom, const GridSpec& spec, double nu);

// Stable fingerprint of a grid (domain, resolution, box, time range) for
// attributing results to the lattice that produced them.
std::string grid_id(const Grid& g);

}  // namespace caloric
