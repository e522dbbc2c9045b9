// Time marching for the explicit monotone step.  A solve is driven by a
// total boundary-data function: the marcher asks it for bottom values on the
// initial slice and for lateral/truncation values on every later level, so a
// Dirichlet problem, a measure computation (indicator data), and a kernel
// solve (delta data) are all the same loop with different data functions.
#pragma once

#include <functional>
#include <vector>

#include "caloric/field.hpp"
#include "caloric/grid.hpp"
#include "caloric/scheme.hpp"

namespace caloric {

// Which piece of the parabolic boundary a data value is requested for.
// Truncation marks artificial cuts of an unbounded domain; the physical
// problem has no data there, so experiments choose a policy (zero for
// kernels, frozen-to-bottom for measures) and report its effect.
enum class DataSide { Bottom, Lateral, Truncation };

using DataFn = std::function<double(const Coords& x, double t, DataSide side)>;

inline DataFn zero_data() {
    return [](const Coords&, double, DataSide) { return 0.0; };
}

// Observes each completed level, including level 0.
using LevelHook = std::function<void(long level, double t, const std::vector<double>& u)>;

// March from g.t0 to g.t1; returns the final slice.  Coefficients for each
// step are evaluated at the step's start time and the assembled system is
// reused across steps when the field is time independent.
std::vector<double> march(const Field& f, const Grid& g, const DataFn& data,
                          const LevelHook& hook = nullptr);

// Point reads from a slice.
double sample_nearest(const Grid& g, const std::vector<double>& u, const Coords& x);
double sample_linear(const Grid& g, const std::vector<double>& u, const Coords& x);

// Artificial-truncation control: runs `solve` on growing boxes, doubling the
// half-width of every artificial side until the returned read set changes by
// less than rel_tol in sup norm (relative to the largest read value).
struct BoxRefineResult {
    Coords lo, hi;            // accepted box
    double rel_change = 0.0;  // between the last two boxes
    int doublings = 0;
    std::vector<double> values;
};

BoxRefineResult refine_box(const Domain& dom, Coords lo, Coords hi,
                           const std::function<std::vector<double>(const Coords&, const Coords&)>& solve,
                           double rel_tol = 1e-4, int max_doublings = 4);

}  // namespace caloric
