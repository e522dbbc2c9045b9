// Caloric measure of an observation point X = (x, t): the exit distribution
// of the monotone chain run backwards from X.  One backward sweep of the
// transposed step systems delivers the full measure of X over every boundary
// event (node, level); binners aggregate events into patches, rings, or
// per-node histograms on the fly so nothing quadratic is ever stored.
//
// Duality: march() with data = indicator of a boundary set E satisfies
// u(X) = (measure of E under X) exactly, to roundoff -- the two directions
// are transposes of the same matrix product.  Experiments pick whichever
// direction needs fewer solves.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "caloric/field.hpp"
#include "caloric/geometry.hpp"
#include "caloric/grid.hpp"
#include "caloric/solve.hpp"

namespace caloric {

// Receives every absorption event of a backward sweep (or MC run).
// `side` distinguishes the physical wall from artificial cuts; bottom events
// arrive separately because the initial slice is all absorbing.
struct ExitBinner {
    virtual void lateral(const Coords& x, double t, DataSide side, double mass) = 0;
    virtual void bottom(const Coords& x, double t, double mass) = 0;
    virtual ~ExitBinner() = default;
};

// Exit distribution of X; X.t must be a grid level and X.x an interior node
// (snapped to the lattice; the snap distance is available from the grid).
void exit_sweep(const Field& f, const Grid& g, const SpaceTimePoint& X, ExitBinner& bin);

// --- binners ------------------------------------------------------------------

// Accumulates the measure of each patch Delta_{r_j}(Y) directly, with a
// lateral/bottom split.  Events landing exactly on a patch edge (a lattice
// node on the sphere |z-y| = r, or a level on the time window boundary)
// count half -- the midpoint-rule treatment of the indicator, which keeps
// the realized patch second-order accurate for any alignment.  Mass
// absorbed on artificial cuts is tracked separately and never enters a bin.
struct RingBinner : ExitBinner {
    SpaceTimePoint Y;
    std::vector<double> radii;  // ascending
    double overflow = 0.0;    // physical mass outside the largest patch
    double truncation = 0.0;  // artificial-cut exits (diagnostic)

    RingBinner(SpaceTimePoint y, std::vector<double> rs);
    void lateral(const Coords& x, double t, DataSide side, double mass) override;
    void bottom(const Coords& x, double t, double mass) override;

    // measure of Delta_{radii[j]}(Y), split and total
    double lateral_within(std::size_t j) const { return lat_within_[j]; }
    double bottom_within(std::size_t j) const { return bot_within_[j]; }
    double within(std::size_t j) const { return lat_within_[j] + bot_within_[j]; }
    double total() const;  // all physical mass (largest patch + overflow)

  private:
    std::vector<double> lat_within_, bot_within_;
    void deposit(std::vector<double>& acc, const Coords& x, double dt, double mass);
};

// Full per-node bottom histogram plus lateral/truncation totals; used for
// kernel comparisons and for reusing one sweep across many anchors.
struct BottomGridBinner : ExitBinner {
    const Grid* grid;
    std::vector<double> bottom_mass;  // per node
    double lateral_total = 0.0;
    double truncation_total = 0.0;

    explicit BottomGridBinner(const Grid& g) : grid(&g), bottom_mass(g.size(), 0.0) {}
    void lateral(const Coords&, double, DataSide side, double mass) override {
        (side == DataSide::Lateral ? lateral_total : truncation_total) += mass;
    }
    void bottom(const Coords& x, double, double mass) override {
        bottom_mass[grid->nearest_node(x)] += mass;
    }
};

// --- measure conveniences ------------------------------------------------------

// Inclusion fraction of a boundary event in a patch: 1 inside, 0 outside,
// with on-edge events counting 1/2 (same convention as RingBinner, so the
// forward and backward computations stay exact transposes).
double patch_fraction(const Patch& p, const Coords& z, double tau);

struct MeasureSplit {
    double total = 0.0;  // lateral + bottom within the patch
    double lateral = 0.0;
    double bottom = 0.0;
    double truncation = 0.0;  // diagnostic: mass lost to artificial cuts
};

// One backward sweep, binned on a single patch.
MeasureSplit patch_measure(const Field& f, const Grid& g, const SpaceTimePoint& X,
                           const Patch& patch);

// Forward direction: the measure of one fixed patch as a field over all X.
// Returns the slice at t1; `hook` sees every level (measure vs level time).
std::vector<double> measure_field(const Field& f, const Grid& g, const Patch& patch,
                                  const LevelHook& hook = nullptr);

// A measure value with its provenance: the grid that produced it, the mass
// lost to artificial cuts (a truncation-quality indicator), and an optional
// Monte Carlo companion estimate of the same discrete quantity.
struct MeasureEstimate {
    double value = 0.0;
    std::string grid_id;
    double truncation_change = 0.0;
    double mc_value = -1.0;  // < 0: no companion requested
    double mc_stderr = -1.0;
};

// u(X) for the discrete problem with total boundary data `phi`, computed by
// the backward sweep: u(X) = sum over exit events of mass * phi(event).
// This is the exact dual of march() with the same data, at the cost of one
// solve per observation point instead of one per data function.
double solve_dirichlet(const Field& f, const Grid& g, const DataFn& phi,
                       const SpaceTimePoint& X);

// omega^X of one patch, with provenance; mc_paths > 0 adds the time-reversed
// chain estimate of the same patch mass (identical binning convention).
MeasureEstimate caloric_measure(const Field& f, const Grid& g, const SpaceTimePoint& X,
                                const Patch& patch, long mc_paths = 0,
                                std::uint64_t seed = 0);

// One backward sweep shared across nested patches around one anchor; returns
// (r, omega^X(Delta_r(Y))) per radius, nondecreasing in r by set inclusion.
std::vector<std::pair<double, double>> measure_profile(const Field& f, const Grid& g,
                                                       const SpaceTimePoint& X,
                                                       const SpaceTimePoint& Y,
                                                       const std::vector<double>& r_list);

// --- reference kernels ----------------------------------------------------------

// Whole-space heat kernel value at (x,t) for a source at (y,s), t > s.
double gaussian_kernel(const Coords& x, double t, const Coords& y, double s);

// Grid Green function for the cylinder: forward solve from a unit point mass
// (value 1/h^n at the node nearest y) at time s, zero boundary data.
// Returns the slice at g.t1.
std::vector<double> green_function(const Field& f, const Grid& g, const Coords& y,
                                   const LevelHook& hook = nullptr);

}  // namespace caloric
