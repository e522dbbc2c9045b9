// Coefficient fields a(x,t): symmetric, uniformly elliptic, bounded.
// A field carries its own ellipticity constant nu in (0,1]:
//   nu |xi|^2 <= sum a_ij xi_i xi_j   and   max |a_ij| <= 1/nu.
// Fields are used either in divergence form  sum D_i(a_ij D_j u) - D_t u
// or nondivergence form  sum a_ij D_ij u - D_t u; the form tag travels with
// the field so downstream code can refuse form-specific claims.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace caloric {

enum class Form { Divergence, NonDivergence };

std::string form_tag(Form f);  // "div" / "nondiv"

// Symmetric n x n matrix, n in {1, 2}.
struct SymMat {
    double a11 = 1.0, a22 = 1.0, a12 = 0.0;
};

struct Field {
    std::string name;
    Form form = Form::Divergence;
    int n = 1;
    double nu = 1.0;
    bool time_dependent = false;
    std::function<SymMat(const double* x, double t)> fn;

    // Coefficients are extended to t < 0 by constancy in time.
    SymMat eval(const double* x, double t) const { return fn(x, t < 0.0 ? 0.0 : t); }
    std::string id() const { return name; }
};

// Built-in families.  `params` supplies family-specific knobs:
//   identity:      none
//   diag:          "eig": [l1, ..., ln] with each l in [nu, 1/nu]
//   rotating:      n=2; "eig": [l1, l2] (default [0.5, 2.0]), "rate": w
//                  eigenframe angle = atan2(x2, x1) + w * t
//   checkerboard:  scalar c(x) * I with c = mid + amp * prod_i sin(2 pi x_i / scale);
//                  "scale": s (default 1).  Range of c is exactly [nu, 1/nu].
//   const:         "a": [[a11, a12], [a12, a22]] (or scalar for n=1); constant
//                  matrix whose eigenvalues must lie in [nu, 1/nu].
Field builtin_field(const std::string& name, int n, double nu, Form form,
                    const nlohmann::json& params);

Field field_from_json(const nlohmann::json& j, int n);
void field_to_json(nlohmann::json& j, const Field& f, const nlohmann::json& params);

// Monte Carlo spot check of the ellipticity box (a sampler, not a proof).
struct EllipticityReport {
    double quotient_min = 0.0;   // min xi.a xi / |xi|^2 over samples
    double quotient_max = 0.0;
    double max_entry = 0.0;
    bool pass = false;
    long samples = 0;
    std::vector<double> worst_x;
    double worst_t = 0.0;
};

EllipticityReport validate_ellipticity(const Field& f, const std::vector<double>& lo,
                                       const std::vector<double>& hi, double t0, double t1,
                                       long samples, std::uint64_t seed);

}  // namespace caloric
