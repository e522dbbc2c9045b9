// One explicit time step as a sparse stochastic matrix.  Each interior node
// carries 3^n stencil weights; every weight is >= 0 and each interior row
// sums to 1 exactly (the center weight is defined as 1 minus the rest), so
// a step is a convex combination of the previous slice -- the discrete
// comparison principle.  Non-interior rows are zero and the stepper copies
// their values through, to be overwritten with boundary data by the caller.
//
// Divergence form uses conservative flux differences: face coefficients are
// arithmetic means of a at the two adjacent nodes, and the cross term is the
// difference of diagonal/antidiagonal fluxes with symmetric 4-node corner
// averages.  Nondivergence form uses pointwise coefficients with the
// sign-split 9-point corner scheme.  Both need |a12| <= min(a11, a22) to
// keep every weight nonnegative ("dominance"); violations and oversized
// time steps raise SchemeError with the worst node and the tau that fixes it.
#pragma once

#include <array>
#include <span>
#include <vector>

#include "caloric/field.hpp"
#include "caloric/grid.hpp"

namespace caloric {

struct StepSystem {
    const Grid* grid = nullptr;
    double t = 0.0;        // coefficient evaluation time (start of the step)
    int stencil = 3;       // 3^n entries per row
    std::array<std::int64_t, 9> off{};        // flat index offsets per slot
    std::array<std::array<int, 2>, 9> delta{};  // (dx, dy) per slot
    std::vector<double> w;                    // size() * stencil, row-major

    std::span<const double> row(std::int64_t node) const {
        return {w.data() + node * stencil, static_cast<std::size_t>(stencil)};
    }
    int center_slot() const { return stencil / 2; }
};

StepSystem assemble_step_divergence(const Field& f, const Grid& g, double t);
StepSystem assemble_step_nondivergence(const Field& f, const Grid& g, double t);
// Dispatch on f.form.
StepSystem assemble_step(const Field& f, const Grid& g, double t);

struct MonotoneReport {
    bool ok = true;
    std::int64_t worst_node = -1;
    double min_weight = 0.0;
    double max_row_sum_err = 0.0;
};

MonotoneReport check_monotone(const StepSystem& sys);

// out[i] = sum_k w[i,k] in[i + off[k]] on interior nodes; all other nodes
// keep their previous values (the marcher overwrites boundary data after).
void advance(const StepSystem& sys, const std::vector<double>& in, std::vector<double>& out);

}  // namespace caloric
