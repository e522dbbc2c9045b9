#include "caloric/field.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "caloric/util.hpp"

namespace caloric {

std::string form_tag(Form f) { return f == Form::Divergence ? "div" : "nondiv"; }

namespace {

Form form_from_tag(const std::string& s) {
    if (s == "div") return Form::Divergence;
    if (s == "nondiv") return Form::NonDivergence;
    throw ConfigError("field: form must be \"div\" or \"nondiv\", got \"" + s + "\"");
}

void require_eig_in_box(double lambda, double nu) {
    if (!(lambda >= nu - 1e-12 && lambda <= 1.0 / nu + 1e-12))
        throw ConfigError("field: eigenvalue " + fmt_double(lambda) +
                          " outside [nu, 1/nu] = [" + fmt_double(nu) + ", " +
                          fmt_double(1.0 / nu) + "]");
}

// Symmetric matrix with eigenvalues (l1, l2) and first eigenvector at angle th.
SymMat from_frame(double l1, double l2, double th) {
    const double c = std::cos(th), s = std::sin(th);
    SymMat a;
    a.a11 = l1 * c * c + l2 * s * s;
    a.a22 = l1 * s * s + l2 * c * c;
    a.a12 = (l1 - l2) * c * s;
    return a;
}

}  // namespace

Field builtin_field(const std::string& name, int n, double nu, Form form,
                    const nlohmann::json& params) {
    if (n != 1 && n != 2) throw ConfigError("field: n must be 1 or 2");
    if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("field: nu must lie in (0, 1]");

    Field f;
    f.name = name;
    f.form = form;
    f.n = n;
    f.nu = nu;

    if (name == "identity") {
        f.fn = [](const double*, double) { return SymMat{}; };
        return f;
    }

    if (name == "diag") {
        std::vector<double> eig = params.value("eig", std::vector<double>{});
        if ((int)eig.size() != n)
            throw ConfigError("field diag: \"eig\" must list one eigenvalue per axis");
        for (double l : eig) require_eig_in_box(l, nu);
        const double l1 = eig[0];
        const double l2 = n == 2 ? eig[1] : 1.0;
        f.fn = [l1, l2](const double*, double) {
            SymMat a;
            a.a11 = l1;
            a.a22 = l2;
            return a;
        };
        return f;
    }

    if (name == "rotating") {
        if (n != 2) throw ConfigError("field rotating: requires n = 2");
        std::vector<double> eig = params.value("eig", std::vector<double>{0.5, 2.0});
        if (eig.size() != 2) throw ConfigError("field rotating: \"eig\" must have 2 entries");
        require_eig_in_box(eig[0], nu);
        require_eig_in_box(eig[1], nu);
        const double rate = params.value("rate", 0.0);
        const double l1 = eig[0], l2 = eig[1];
        // The eigenframe angle atan2(x2, x1) is defined up to jumps of 2*pi,
        // but the matrix entries depend on it through cos/sin of 2*th, so the
        // field is smooth away from the origin; at the origin we fall back to
        // the isotropic average to keep entries bounded and measurable.
        f.fn = [l1, l2, rate](const double* x, double t) {
            const double r2 = x[0] * x[0] + x[1] * x[1];
            if (r2 == 0.0) {
                SymMat a;
                a.a11 = a.a22 = 0.5 * (l1 + l2);
                return a;
            }
            const double th = std::atan2(x[1], x[0]) + rate * t;
            return from_frame(l1, l2, th);
        };
        f.time_dependent = rate != 0.0;
        return f;
    }

    if (name == "const") {
        if (!params.contains("a")) throw ConfigError("field const: missing matrix \"a\"");
        const auto& aj = params.at("a");
        SymMat a;
        if (n == 1) {
            a.a11 = aj.is_array() ? aj.at(0).is_array() ? aj.at(0).at(0).get<double>()
                                                        : aj.at(0).get<double>()
                                  : aj.get<double>();
            require_eig_in_box(a.a11, nu);
        } else {
            a.a11 = aj.at(0).at(0).get<double>();
            a.a12 = aj.at(0).at(1).get<double>();
            a.a22 = aj.at(1).at(1).get<double>();
            if (std::abs(aj.at(1).at(0).get<double>() - a.a12) > 1e-14)
                throw ConfigError("field const: matrix must be symmetric");
            const double tr = a.a11 + a.a22;
            const double disc = std::sqrt(0.25 * (a.a11 - a.a22) * (a.a11 - a.a22) +
                                          a.a12 * a.a12);
            require_eig_in_box(0.5 * tr - disc, nu);
            require_eig_in_box(0.5 * tr + disc, nu);
        }
        f.fn = [a](const double*, double) { return a; };
        return f;
    }

    if (name == "checkerboard") {
        const double scale = params.value("scale", 1.0);
        if (!(scale > 0.0)) throw ConfigError("field checkerboard: scale must be positive");
        const double mid = 0.5 * (nu + 1.0 / nu);
        const double amp = 0.5 * (1.0 / nu - nu);
        const double k = 2.0 * std::numbers::pi / scale;
        const int dim = n;
        f.fn = [mid, amp, k, dim](const double* x, double) {
            double c = mid;
            double prod = 1.0;
            for (int i = 0; i < dim; ++i) prod *= std::sin(k * x[i]);
            c += amp * prod;
            SymMat a;
            a.a11 = a.a22 = c;
            return a;
        };
        return f;
    }

    throw ConfigError("field: unknown builtin \"" + name + "\"");
}

Field field_from_json(const nlohmann::json& j, int n) {
    if (!j.is_object()) throw ConfigError("field: expected a JSON object");
    if (!j.contains("name")) throw ConfigError("field: missing \"name\"");
    if (!j.contains("nu")) throw ConfigError("field: missing \"nu\"");
    if (!j.contains("form")) throw ConfigError("field: missing \"form\"");
    const std::string name = j.at("name").get<std::string>();
    const double nu = j.at("nu").get<double>();
    const Form form = form_from_tag(j.at("form").get<std::string>());
    return builtin_field(name, n, nu, form, j);
}

void field_to_json(nlohmann::json& j, const Field& f, const nlohmann::json& params) {
    j = params;
    j["name"] = f.name;
    j["nu"] = f.nu;
    j["form"] = form_tag(f.form);
}

EllipticityReport validate_ellipticity(const Field& f, const std::vector<double>& lo,
                                       const std::vector<double>& hi, double t0, double t1,
                                       long samples, std::uint64_t seed) {
    if ((int)lo.size() != f.n || (int)hi.size() != f.n)
        throw ConfigError("validate_ellipticity: box dimension mismatch");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EllipticityReport rep;
    rep.samples = samples;
    rep.quotient_min = std::numeric_limits<double>::infinity();
    rep.quotient_max = -std::numeric_limits<double>::infinity();
    rep.worst_x.assign(f.n, 0.0);

    double x[2] = {0.0, 0.0};
    for (long s = 0; s < samples; ++s) {
        for (int i = 0; i < f.n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
        const double t = t0 + (t1 - t0) * unit(rng);
        const SymMat a = f.eval(x, t);

        double q;
        if (f.n == 1) {
            q = a.a11;
        } else {
            const double th = 2.0 * std::numbers::pi * unit(rng);
            const double c = std::cos(th), si = std::sin(th);
            q = a.a11 * c * c + 2.0 * a.a12 * c * si + a.a22 * si * si;
        }
        if (q < rep.quotient_min) {
            rep.quotient_min = q;
            for (int i = 0; i < f.n; ++i) rep.worst_x[i] = x[i];
            rep.worst_t = t;
        }
        rep.quotient_max = std::max(rep.quotient_max, q);
        rep.max_entry = std::max({rep.max_entry, std::abs(a.a11), std::abs(a.a22),
                                  std::abs(a.a12)});
    }
    rep.pass = rep.quotient_min >= f.nu - 1e-9 && rep.quotient_max <= 1.0 / f.nu + 1e-9 &&
               rep.max_entry <= 1.0 / f.nu + 1e-9;
    return rep;
}

}  // namespace caloric
