#include "caloric/fit.hpp"

#include <cmath>

#include "caloric/util.hpp"

namespace caloric {

ExponentFit fit_exponent(const std::vector<double>& rho, const std::vector<double>& f,
                         double floor_abs) {
    if (rho.size() != f.size()) throw ConfigError("fit_exponent: size mismatch");
    if (rho.size() < 2) throw ConfigError("fit_exponent: need at least 2 samples");
    const int n = (int)rho.size();
    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        if (!(rho[i] > 0.0)) throw ConfigError("fit_exponent: rho must be positive");
        if (!(f[i] > floor_abs))
            throw ConfigError("fit_exponent: value " + fmt_double(f[i]) +
                              " at or below the accuracy floor " + fmt_double(floor_abs));
        lx[i] = std::log(rho[i]);
        ly[i] = std::log(f[i]);
    }
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_exponent: all rho identical");

    ExponentFit out;
    out.points = n;
    out.exponent = sxy / sxx;
    out.amplitude = std::exp(my - out.exponent * mx);
    for (int i = 0; i < n; ++i) {
        const double pred = my + out.exponent * (lx[i] - mx);
        out.max_residual = std::max(out.max_residual, std::abs(ly[i] - pred));
    }
    return out;
}

double bisect_monotone(const std::function<bool(double)>& pred, double lo, double hi,
                       int iters) {
    if (!pred(hi)) return hi;
    if (pred(lo)) return lo;
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace caloric
