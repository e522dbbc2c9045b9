#include "caloric/scheme.hpp"

#include <algorithm>
#include <cmath>

#include "caloric/util.hpp"

namespace caloric {

namespace {

// Slot layout: slot = (dx+1) + 3*(dy+1) for n=2 (SW..NE row-major),
// slot = dx+1 for n=1; the center is always slot stencil/2.
StepSystem make_frame(const Grid& g, double t) {
    StepSystem sys;
    sys.grid = &g;
    sys.t = t;
    sys.stencil = g.n == 2 ? 9 : 3;
    int s = 0;
    for (int dy = (g.n == 2 ? -1 : 0); dy <= (g.n == 2 ? 1 : 0); ++dy)
        for (int dx = -1; dx <= 1; ++dx, ++s) {
            sys.off[s] = dx + (g.n == 2 ? g.dims[0] * dy : 0);
            sys.delta[s] = {dx, dy};
        }
    sys.w.assign(static_cast<std::size_t>(g.size()) * sys.stencil, 0.0);
    return sys;
}

// Common positivity pass: define centers as 1 - (sum of the others), throw
// if some row's off-center mass exceeds 1.  Tiny negative off-center weights
// (roundoff from coefficient averaging) are clamped; real dominance failures
// were already rejected by the assemblers.
void close_rows(StepSystem& sys) {
    const Grid& g = *sys.grid;
    const int S = sys.stencil, c = sys.center_slot();
    double worst_sum = 0.0;
    std::int64_t worst_node = -1;
    for (std::int64_t node : g.interior) {
        double* row = sys.w.data() + node * S;
        double sum = 0.0;
        for (int k = 0; k < S; ++k)
            if (k != c) sum += row[k];
        row[c] = 1.0 - sum;
        if (sum > worst_sum) {
            worst_sum = sum;
            worst_node = node;
        }
    }
    if (worst_sum > 1.0 + 1e-12) {
        const double tau_max = g.tau / worst_sum;
        throw SchemeError(SchemeError::Kind::Positivity,
                          "time step too large for positivity: center weight " +
                              fmt_double(1.0 - worst_sum) + " at node " +
                              std::to_string(worst_node) + "; largest admissible tau = " +
                              fmt_double(tau_max),
                          worst_node, tau_max);
    }
    if (worst_sum > 1.0) {  // marginal scheme: snap the center to exactly 0
        for (std::int64_t node : g.interior) {
            double* row = sys.w.data() + node * S;
            if (row[c] < 0.0) row[c] = 0.0;
        }
    }
}

// Negative-weight guard with a roundoff allowance.
double guarded(std::int64_t node, double v, const char* what) {
    if (v < -1e-12)
        throw SchemeError(SchemeError::Kind::Dominance,
                          std::string("dominance condition violated: ") + what + " = " +
                              fmt_double(v) + " < 0 at node " + std::to_string(node),
                          node, 0.0);
    return v < 0.0 ? 0.0 : v;
}

}  // namespace

StepSystem assemble_step_divergence(const Field& f, const Grid& g, double t) {
    if (f.form != Form::Divergence)
        throw ConfigError("assemble_step_divergence: field is not divergence-form");
    StepSystem sys = make_frame(g, t);
    const double r = g.tau / (g.h * g.h);
    const long N = g.size();

    if (g.n == 1) {
        std::vector<double> a(N);
        for (long i = 0; i < N; ++i) {
            const double x = g.axis_coord(0, i);
            a[i] = f.eval(&x, t).a11;
        }
        for (std::int64_t node : g.interior) {
            double* row = sys.w.data() + node * 3;
            row[0] = r * 0.5 * (a[node] + a[node - 1]);
            row[2] = r * 0.5 * (a[node] + a[node + 1]);
        }
        close_rows(sys);
        return sys;
    }

    // Node samples of the coefficients, split at evaluation time into the
    // positive and negative parts of a12 (p - q), which are fluxed along the
    // diagonal and antidiagonal lattice directions respectively.
    std::vector<double> a11(N), a22(N), p(N), q(N);
    {
        double x[2];
        for (long iy = 0; iy < g.dims[1]; ++iy) {
            x[1] = g.axis_coord(1, iy);
            for (long ix = 0; ix < g.dims[0]; ++ix) {
                x[0] = g.axis_coord(0, ix);
                const SymMat a = f.eval(x, t);
                const std::int64_t i = g.index(ix, iy);
                a11[i] = a.a11;
                a22[i] = a.a22;
                p[i] = std::max(a.a12, 0.0);
                q[i] = std::max(-a.a12, 0.0);
            }
        }
    }

    const long sx = 1, sy = g.dims[0];
    for (std::int64_t c : g.interior) {
        const std::int64_t e = c + sx, w_ = c - sx, nn = c + sy, s = c - sy;
        const std::int64_t ne = nn + sx, nw = nn - sx, se = s + sx, sw = s - sx;
        double* row = sys.w.data() + c * 9;

        // Axis fluxes: face average of a_dd minus the |a12| correction that
        // the diagonal flux identity moves onto the axes.
        const auto face = [&](const std::vector<double>& v, std::int64_t nb) {
            return 0.5 * (v[c] + v[nb]);
        };
        row[5] = r * guarded(c, face(a11, e) - face(p, e) - face(q, e), "east face weight");
        row[3] = r * guarded(c, face(a11, w_) - face(p, w_) - face(q, w_), "west face weight");
        row[7] = r * guarded(c, face(a22, nn) - face(p, nn) - face(q, nn), "north face weight");
        row[1] = r * guarded(c, face(a22, s) - face(p, s) - face(q, s), "south face weight");

        // Corner fluxes: symmetric 4-node averages at the cell corners.
        const auto corner = [&](const std::vector<double>& v, std::int64_t b1, std::int64_t b2,
                                std::int64_t b3) { return 0.25 * (v[c] + v[b1] + v[b2] + v[b3]); };
        row[8] = r * corner(p, e, nn, ne);
        row[0] = r * corner(p, w_, s, sw);
        row[6] = r * corner(q, w_, nn, nw);
        row[2] = r * corner(q, e, s, se);
    }
    close_rows(sys);
    return sys;
}

StepSystem assemble_step_nondivergence(const Field& f, const Grid& g, double t) {
    if (f.form != Form::NonDivergence)
        throw ConfigError("assemble_step_nondivergence: field is not nondivergence-form");
    StepSystem sys = make_frame(g, t);
    const double r = g.tau / (g.h * g.h);

    if (g.n == 1) {
        for (std::int64_t node : g.interior) {
            const double x = g.axis_coord(0, node);
            const double a = f.eval(&x, t).a11;
            double* row = sys.w.data() + node * 3;
            row[0] = row[2] = r * a;
        }
        close_rows(sys);
        return sys;
    }

    double x[2];
    for (std::int64_t c : g.interior) {
        x[0] = g.axis_coord(0, g.ix_of(c));
        x[1] = g.axis_coord(1, g.iy_of(c));
        const SymMat a = f.eval(x, t);
        const double abs12 = std::abs(a.a12);
        if (abs12 > std::min(a.a11, a.a22) + 1e-12) {
            throw SchemeError(SchemeError::Kind::Dominance,
                              "dominance condition violated: |a12| = " + fmt_double(abs12) +
                                  " exceeds min(a11, a22) = " +
                                  fmt_double(std::min(a.a11, a.a22)) + " at node " +
                                  std::to_string(c),
                              c, 0.0);
        }
        const double p = std::max(a.a12, 0.0), q = std::max(-a.a12, 0.0);
        double* row = sys.w.data() + c * 9;
        row[5] = row[3] = r * guarded(c, a.a11 - abs12, "axis weight");
        row[7] = row[1] = r * guarded(c, a.a22 - abs12, "axis weight");
        row[8] = row[0] = r * p;
        row[6] = row[2] = r * q;
    }
    close_rows(sys);
    return sys;
}

StepSystem assemble_step(const Field& f, const Grid& g, double t) {
    return f.form == Form::Divergence ? assemble_step_divergence(f, g, t)
                                      : assemble_step_nondivergence(f, g, t);
}

MonotoneReport check_monotone(const StepSystem& sys) {
    MonotoneReport rep;
    rep.min_weight = std::numeric_limits<double>::infinity();
    const int S = sys.stencil;
    for (std::int64_t node : sys.grid->interior) {
        const double* row = sys.w.data() + node * S;
        double sum = 0.0, mn = std::numeric_limits<double>::infinity();
        for (int k = 0; k < S; ++k) {
            sum += row[k];
            mn = std::min(mn, row[k]);
        }
        const double err = std::abs(sum - 1.0);
        if (mn < rep.min_weight) {
            rep.min_weight = mn;
            rep.worst_node = node;
        }
        rep.max_row_sum_err = std::max(rep.max_row_sum_err, err);
    }
    rep.ok = rep.min_weight >= 0.0 && rep.max_row_sum_err <= 1e-12;
    return rep;
}

void advance(const StepSystem& sys, const std::vector<double>& in, std::vector<double>& out) {
    const Grid& g = *sys.grid;
    if ((long)in.size() != g.size() || (long)out.size() != g.size())
        throw ConfigError("advance: slice size mismatch");
    std::copy(in.begin(), in.end(), out.begin());
    const int S = sys.stencil;
    if (S == 3) {
        for (std::int64_t node : g.interior) {
            const double* row = sys.w.data() + node * 3;
            out[node] = row[0] * in[node - 1] + row[1] * in[node] + row[2] * in[node + 1];
        }
    } else {
        const long sy = g.dims[0];
        for (std::int64_t node : g.interior) {
            const double* row = sys.w.data() + node * 9;
            const double* b = in.data() + node;
            out[node] = row[0] * b[-sy - 1] + row[1] * b[-sy] + row[2] * b[-sy + 1] +
                        row[3] * b[-1] + row[4] * b[0] + row[5] * b[1] +
                        row[6] * b[sy - 1] + row[7] * b[sy] + row[8] * b[sy + 1];
        }
    }
}

}  // namespace caloric
