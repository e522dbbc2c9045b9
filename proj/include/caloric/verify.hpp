// Experiment layer: each operation realizes one inequality of the theory as
// a finite sweep on a grid and reports the empirical constant (a supremum or
// infimum over the sweep, with its arg-max), the admissibility filter
// outcomes, and enough grid metadata to rerun at h/2 for stability checks.
//
// Conventions shared by every experiment:
//   - suprema/infima run over lattice nodes in the closure of the stated
//     region (closed balls / closed time windows, with a 1e-9 relative
//     tolerance) intersected with the open cylinder, so data slices are
//     never sampled as solution values;
//   - rejected sample points are recorded, never silently dropped;
//   - random data draws are hash-based (seed + lattice index), so results
//     do not depend on traversal order or thread count.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "caloric/field.hpp"
#include "caloric/fit.hpp"
#include "caloric/geometry.hpp"
#include "caloric/grid.hpp"
#include "caloric/measure.hpp"
#include "caloric/solve.hpp"

namespace caloric {

// --- report types ---------------------------------------------------------

// One cell of a doubling sweep: the pair of concentric patch measures at a
// given observation point and radius.
struct RatioCell {
    SpaceTimePoint X;
    double r = 0.0;
    double num = 0.0;    // omega^X(Delta_{2r})
    double den = 0.0;    // omega^X(Delta_r)
    double ratio = 0.0;  // num / den when included
    bool included = false;
    std::string note;  // exclusion reason when not included
};

struct DoublingReport {
    double K = 0.0;
    double lambda = 0.0;
    std::vector<RatioCell> cells;
    double max_ratio = 0.0;
    std::ptrdiff_t argmax = -1;  // index into cells, -1 if nothing included
    std::size_t included = 0;
    std::vector<std::string> rejected;  // sample points that failed the filter
    double h = 0.0, tau = 0.0;
    double truncation = 0.0;  // worst artificial-exit mass over the sweeps
};

struct FitPoint {
    double rho = 0.0;
    double f = 0.0;
    bool used = false;
    std::string note;
};

struct ExponentReport {
    std::vector<FitPoint> points;
    double exponent = 0.0;   // positive decay rate gamma-hat
    double amplitude = 0.0;  // fitted prefactor
    double residual = 0.0;   // max |log f - fitted line| over used points
    double window_lo = 0.0, window_hi = 0.0;
    // growth law only: f(rho) * (rho/rho0)^gamma >= inf_{[rho0, 2 rho0]} f
    // at every sampled rho.
    bool lower_law_holds = false;
    bool valid = false;  // enough points above the floor to fit
    double h = 0.0, tau = 0.0;
    std::string note;
};

struct OscillationDraw {
    std::uint64_t seed = 0;
    double ratio_pos = -1.0;  // sup_{Q_r} u+ / sup_{Q_2r} u+, -1 if skipped
    double ratio_neg = -1.0;
    double theta = 0.0;  // max of the available sides
    bool included = false;
    std::string note;
};

struct OscillationReport {
    std::vector<OscillationDraw> draws;
    double theta_hat = 0.0;
    std::ptrdiff_t argmax = -1;
    double h = 0.0, tau = 0.0;
};

struct ConstantReport {
    std::string experiment;
    double constant = 0.0;
    std::string argmax;  // human-readable arg-max (or arg-min) cell
    std::vector<std::pair<std::string, double>> params;
    std::size_t admissible = 0;
    std::vector<std::string> excluded;
    double h = 0.0, tau = 0.0;
};

struct GreenRatioRow {
    double rho = 0.0;
    double measure = 0.0;  // omega^X(Delta_rho(Y))
    double g_plus = 0.0;   // G(X; Y_rho^+)
    double g_minus = 0.0;  // G(X; Y_rho^-)
    double ratio_plus = 0.0;   // measure / (rho^n g_plus), bounded below
    double ratio_minus = 0.0;  // measure / (rho^n g_minus), bounded above
};

struct GreenComparisonReport {
    std::vector<GreenRatioRow> rows;
    double band_lo = 0.0;   // min over rho of ratio_plus
    double band_hi = 0.0;   // max over rho of ratio_minus
    double constant = 0.0;  // single N covering both sides
    double h = 0.0, tau = 0.0;
};

struct AronsonReport {
    std::vector<std::pair<double, double>> samples;  // (|x-y|^2, Gamma)
    double n_lower = 0.0;    // smallest N with Gamma >= exp(-N d^2)/N everywhere
    double n_upper = 0.0;    // smallest N with Gamma <= N exp(-d^2/N) everywhere
    double slope = 0.0;      // least-squares line of log Gamma vs d^2
    double intercept = 0.0;
    double residual = 0.0;   // max |log Gamma - line|
    double h = 0.0, tau = 0.0;
};

// --- data helpers -----------------------------------------------------------

// Deterministic bounded data: the value at a boundary event depends only on
// the draw seed and the event's lattice indices.
DataFn hashed_data(const Grid& g, std::uint64_t seed, double lo, double hi);

// Indicator of a patch's grid realization (same half-weight edge convention
// as the measure computations).
DataFn patch_data(const Patch& p);

// A family of data draws indexed by seed; the grid is supplied so draws can
// quantize coordinates.
using DataSampler = std::function<DataFn(std::uint64_t draw_seed, const Grid& g)>;

DataSampler uniform_data_sampler(double lo, double hi);
DataSampler constant_data_sampler(double value);

// --- experiments ------------------------------------------------------------

struct WholeSpaceSweepOptions {
    double h = 0.02;
    double tau = 0.0;       // <= 0: default stable step
    double margin = 6.0;    // box half-width beyond the sweep reach, in sqrt(t1)
    double den_floor = 1e-13;
    int threads = 1;
};

// Ratios omega^X(Delta_{2r}(0)) / omega^X(Delta_r(0)) over the product of
// r_list and t_list, with x_per_t observation points per time spread evenly
// across |x| <= K sqrt(t) along the first axis (x_per_t = 1 samples x = 0).
DoublingReport doubling_sweep_wholespace(const Field& f, double K,
                                         const std::vector<double>& r_list,
                                         const std::vector<double>& t_list, int x_per_t,
                                         const WholeSpaceSweepOptions& opt = {});

struct LipschitzSweepOptions {
    double h = 0.02;
    double tau = 0.0;
    double margin = 6.0;
    double den_floor = 1e-13;
    int threads = 1;
};

// Ratios for patches centered at a parabolic-boundary anchor Y, over the
// supplied observation points.  A cell (X, r) enters the max only when
// |x - y| <= K sqrt(t - s), 4 r <= sqrt(t - s) <= lambda r0 and
// r <= lambda r0 / 4; everything else is kept in the report but flagged.
DoublingReport doubling_sweep_lipschitz(const Domain& dom, const Field& f,
                                        const SpaceTimePoint& Y, double K, double lambda,
                                        const std::vector<double>& r_list,
                                        const std::vector<SpaceTimePoint>& X_list,
                                        const LipschitzSweepOptions& opt = {});

struct BottomBoundOptions {
    double h = 0.02;
    double tau = 0.0;
    double margin = 6.0;
};

// inf over lattice points of Q_r(Y) of omega^X(Delta_{2r}(Y)); the reported
// constant is the infimum itself (the lower bound says it stays above 1/N).
ConstantReport bottom_lower_bound(const Domain& dom, const Field& f,
                                  const SpaceTimePoint& Y, double r,
                                  const BottomBoundOptions& opt = {});

struct OscillationOptions {
    double h = 0.02;
    double tau = 0.0;
    double margin = 6.0;
    double sup_floor = 1e-13;
    int threads = 1;
};

// theta-hat = max over data draws of sup_{Q_r}(u+-) / sup_{Q_2r}(u+-) for
// solutions whose data vanishes on the realization of Delta_{2r}(Y).  The
// sampler fills the rest of the parabolic boundary; draws whose denominators
// both vanish are excluded.
OscillationReport oscillation_decay(const Domain& dom, const Field& f,
                                    const SpaceTimePoint& Y, double r, int draws,
                                    std::uint64_t seed,
                                    const DataSampler& sampler = uniform_data_sampler(-1.0, 1.0),
                                    const OscillationOptions& opt = {});

struct GrowthOptions {
    double h = 0.25;
    double tau = 0.0;
    double margin = 6.0;
    double floor_abs = 1e-280;  // data must be one-signed, so deep tails are trusted
    double mu_override = -1.0;  // Lipschitz variant: corkscrew margin factor
};

// Decay exponent of f1(rho) = inf over the slice B_rho(y) x {s + rho^2}
// (whole space) or its corkscrew-shrunken version (graph domains) of the
// nonnegative solution with the given data, sampled at half-dyadic rho in
// [rho0, R].  Also checks the fitted lower growth law pointwise.
ExponentReport growth_exponent(const Domain& dom, const Field& f, const SpaceTimePoint& Y,
                               const DataFn& data, double rho0, double R,
                               const GrowthOptions& opt = {});

struct DecayData {
    enum class Kind { NegativePatch, RandomMixed, PositivePatch };
    Kind kind = Kind::NegativePatch;
    std::uint64_t seed = 0;
};

struct DecayOptions {
    double h = 0.05;
    double tau = 0.0;            // <= 0: h^2/6 in 1d (vanishing 4th cumulant), default otherwise
    double margin = 6.0;
    double floor_abs = -1.0;     // < 0: 1e-280 for one-signed data, 1e-13 otherwise
};

// Decay exponent of f2(rho) = sup over the shell |x - y| = K rho,
// |t - s| < rho^2 of u^-, for data supported inside C_{rho0/2}(Y) and
// vanishing on the rest of the parabolic boundary.
ExponentReport boundary_decay_exponent(const Domain& dom, const Field& f,
                                       const SpaceTimePoint& Y, double K, double rho0,
                                       double R, const DecayData& data,
                                       const DecayOptions& opt = {});

struct HarnackOptions {
    double h = 0.02;
    double tau = 0.0;
    double T = 0.5;          // cylinder height
    double floor = 1e-250;
    int threads = 1;
};

// N-hat = max over draws of nonnegative data and over pairs X = (x,t),
// Y = (y,s) in Q^delta = Omega^delta x (delta^2, T) with t - s >= delta^2 of
// u(Y)/u(X).  Requires a bounded domain with diam/delta <= lambda and
// T/delta^2 <= lambda.
ConstantReport harnack_constant(const Domain& dom, const Field& f, double delta,
                                double lambda, int draws, std::uint64_t seed,
                                const DataSampler& sampler = uniform_data_sampler(0.0, 1.0),
                                const HarnackOptions& opt = {});

struct BackwardHarnackOptions {
    double h = 0.02;
    double tau = 0.0;
    double mu = 1.0;
    double r0 = std::numeric_limits<double>::infinity();
    double floor = 1e-250;
    int threads = 1;
};

// N-hat = max over draws of u(x, t + r^2) / u(x, t - r^2) for nonnegative
// solutions with bottom-only data (lateral data forced to zero).  Requires
// dist(x, boundary) > mu r, t > delta^2 and r <= min(r0, delta)/2.
ConstantReport backward_harnack(const Domain& dom, const Field& f, const Coords& x,
                                double t, double r, double delta, int draws,
                                std::uint64_t seed,
                                const DataSampler& sampler = uniform_data_sampler(0.0, 1.0),
                                const BackwardHarnackOptions& opt = {});

struct QuotientOptions {
    double h = 0.02;
    double tau = 0.0;
    double margin = 6.0;
    double floor = 1e-250;
    double mu_override = -1.0;
};

// Smallest N-hat with  sup_{Q_{Kr,r}(Y)} v/u <= N-hat * (inf_{Omega_{2r}^+} v)
// / (sup_{Omega_{2r}^-} u), for two positive solutions whose data is forced
// to vanish on the lateral window C_{(K+2)r, 2r}(Y).  Requires r <= r0/4 and
// s >= 5 r^2.
ConstantReport quotient_bound(const Domain& dom, const Field& f, const SpaceTimePoint& Y,
                              double K, double r, const DataFn& data_u,
                              const DataFn& data_v, const QuotientOptions& opt = {});

struct AronsonOptions {
    double h = 0.02;
    double tau = 0.0;
    double margin = 6.0;
    double n_cap = 1e8;  // bisection upper bound for the envelope constants
};

// Discrete fundamental solution started from a point mass at the origin,
// read at t_fixed on the given offsets; fits the two-sided exponential
// envelope and the least-squares line of log Gamma against |x - y|^2.
// Divergence-form fields only: the estimate has no nondivergence analogue,
// so a nondivergence field is refused.
AronsonReport aronson_sandwich(const Field& f, double t_fixed,
                               const std::vector<Coords>& xy_samples,
                               const AronsonOptions& opt = {});

struct GreenOptions {
    double h = 0.02;
    double tau = 0.0;
    double margin = 6.0;
};

// Ratios omega^X(Delta_rho(Y)) / (rho^n G(X; Y_rho^{+-})) over rho_list,
// where Y_rho^{+-} sit at the interior corkscrew point of Y at scale rho and
// times s +- rho^2.  Requires rho <= r0/2 and X.t > s + rho^2.
GreenComparisonReport green_measure_comparison(const Domain& dom, const Field& f,
                                               const SpaceTimePoint& Y,
                                               const std::vector<double>& rho_list,
                                               const SpaceTimePoint& X,
                                               const GreenOptions& opt = {});

struct DominationOptions {
    double h = 0.02;
    double tau = 0.0;
    double margin = 6.0;
    double floor = 1e-300;
    double mu_override = -1.0;
};

// N1-hat = max over the slice D = Omega_{2 K rho}(y) x {s + 4 rho^2} of
// omega^X(Omega x {s + rho^2}) / omega^X(Omega_rho^+): both measures are
// computed by restarting the problem on t > s + rho^2 with data 1 on the
// whole cut slice (numerator) or on its corkscrew-shrunken ball piece
// (denominator).  The ratio is >= 1 node by node, exactly.
ConstantReport interior_measure_domination(const Domain& dom, const Field& f,
                                           const SpaceTimePoint& Y, double rho, double K,
                                           double lambda, const DominationOptions& opt = {});

}  // namespace caloric
