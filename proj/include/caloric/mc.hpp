// Monte Carlo cross-check of the backward exit sweep.  The explicit step is
// a stochastic matrix, so its rows are exact transition probabilities of the
// time-reversed chain; sampling paths and binning their exits estimates the
// same measure that exit_sweep computes deterministically -- identical
// binning, independent code path.  Each path owns a splitmix64 substream of
// the root seed, so results are independent of scheduling and path count
// changes only append paths.
#pragma once

#include <cmath>
#include <cstdint>

#include "caloric/measure.hpp"

namespace caloric {

struct McSummary {
    long paths = 0;
    double mass = 0.0;  // total binned mass, == 1 up to roundoff
};

McSummary mc_exit_sample(const Field& f, const Grid& g, const SpaceTimePoint& X,
                         long paths, std::uint64_t seed, ExitBinner& bin);

// Standard error of a binomial proportion estimate from `paths` samples.
inline double mc_stderr(double p, long paths) {
    const double v = p * (1.0 - p) / static_cast<double>(paths);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

}  // namespace caloric
