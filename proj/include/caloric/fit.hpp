// Least-squares power-law fits and monotone bisection for envelope
// constants.  Exponent fits run in log-log space; callers must keep the
// data above the forward-error floor of whatever produced it (positive
// combinations of positive terms stay accurate down to ~1e-280, mixed-sign
// results only to ~10 eps times their scale), so the floor is a parameter.
#pragma once

#include <functional>
#include <vector>

namespace caloric {

struct ExponentFit {
    double exponent = 0.0;   // slope of log f vs log rho
    double amplitude = 0.0;  // exp(intercept)
    double max_residual = 0.0;  // in log space
    int points = 0;
};

// Fits f ~ amplitude * rho^exponent.  Requires >= 2 samples, all values
// strictly above floor_abs.
ExponentFit fit_exponent(const std::vector<double>& rho, const std::vector<double>& f,
                         double floor_abs = 0.0);

// Smallest c in [lo, hi] with pred(c) true, given pred monotone (false then
// true); returns hi if pred never fires.  Used for envelope constants.
double bisect_monotone(const std::function<bool(double)>& pred, double lo, double hi,
                       int iters = 60);

}  // namespace caloric
