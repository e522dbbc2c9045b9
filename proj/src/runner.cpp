#include "caloric/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "caloric/acceptance.hpp"
#include "caloric/mc.hpp"
#include "caloric/util.hpp"
#include "caloric/verify.hpp"

namespace caloric {
namespace {

using nlohmann::json;

// --- small formatting helpers ------------------------------------------------

// Space-time cell content: coordinates then time, ';'-separated so no CSV
// cell ever needs quoting and report parsing stays a plain split.
std::string st_cell(const Coords& x, double t) {
    std::string s;
    for (double xi : x) s += fmt_double(xi) + ";";
    s += fmt_double(t);
    return s;
}

Coords coords_of(const json& arr, int n, const std::string& who) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
        throw ConfigError(who + ": expected an array of " + std::to_string(n) + " coordinates");
    Coords x;
    for (const auto& v : arr) x.push_back(v.get<double>());
    return x;
}

SpaceTimePoint point_of(const json& arr, int n, const std::string& who) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != n + 1)
        throw ConfigError(who + ": expected [x1, ..., xn, t]");
    SpaceTimePoint p;
    for (int i = 0; i < n; ++i) p.x.push_back(arr[i].get<double>());
    p.t = arr[n].get<double>();
    return p;
}

std::vector<double> doubles_of(const json& arr) {
    std::vector<double> v;
    for (const auto& e : arr) v.push_back(e.get<double>());
    return v;
}

// --- schema -------------------------------------------------------------------

enum class PType { Number, Integer, Array, Object };

struct ParamSpec {
    const char* key;
    PType type;
    bool required;
};

struct ExpSpec {
    std::vector<ParamSpec> params;
    bool whole_space_only = false;
};

const std::map<std::string, ExpSpec>& experiment_table() {
    static const std::map<std::string, ExpSpec> table = {
        {"measure_profile",
         {{{"X", PType::Array, true},
           {"Y", PType::Array, true},
           {"r_list", PType::Array, true},
           {"half_width", PType::Number, false},
           {"mc_paths", PType::Integer, false}},
          false}},
        {"doubling_wholespace",
         {{{"K", PType::Number, true},
           {"r_list", PType::Array, true},
           {"t_list", PType::Array, true},
           {"x_per_t", PType::Integer, false}},
          true}},
        {"doubling_lipschitz",
         {{{"Y", PType::Array, true},
           {"K", PType::Number, true},
           {"lambda", PType::Number, true},
           {"r_list", PType::Array, true},
           {"X_list", PType::Array, true}},
          false}},
        {"bottom_bound",
         {{{"Y", PType::Array, true}, {"r", PType::Number, true}}, false}},
        {"oscillation",
         {{{"Y", PType::Array, true},
           {"r", PType::Number, true},
           {"draws", PType::Integer, true},
           {"data", PType::Object, false}},
          false}},
        {"growth_exponent",
         {{{"Y", PType::Array, true},
           {"rho0", PType::Number, true},
           {"R", PType::Number, true},
           {"data", PType::Object, true},
           {"mu", PType::Number, false}},
          false}},
        {"boundary_decay",
         {{{"Y", PType::Array, true},
           {"K", PType::Number, true},
           {"rho0", PType::Number, true},
           {"R", PType::Number, true},
           {"data", PType::Object, true}},
          false}},
        {"harnack",
         {{{"delta", PType::Number, true},
           {"lambda", PType::Number, true},
           {"draws", PType::Integer, true},
           {"T", PType::Number, false},
           {"data", PType::Object, false}},
          false}},
        {"backward_harnack",
         {{{"x", PType::Array, true},
           {"t", PType::Number, true},
           {"r", PType::Number, true},
           {"delta", PType::Number, true},
           {"draws", PType::Integer, true},
           {"mu", PType::Number, false},
           {"r0", PType::Number, false},
           {"data", PType::Object, false}},
          false}},
        {"quotient",
         {{{"Y", PType::Array, true},
           {"K", PType::Number, true},
           {"r", PType::Number, true},
           {"data_u", PType::Object, true},
           {"data_v", PType::Object, true},
           {"mu", PType::Number, false}},
          false}},
        {"aronson",
         {{{"t", PType::Number, true}, {"offsets", PType::Array, true}}, true}},
        {"green_comparison",
         {{{"Y", PType::Array, true},
           {"rho_list", PType::Array, true},
           {"X", PType::Array, true}},
          false}},
        {"domination",
         {{{"Y", PType::Array, true},
           {"rho", PType::Number, true},
           {"K", PType::Number, true},
           {"lambda", PType::Number, true},
           {"mu", PType::Number, false}},
          false}},
    };
    return table;
}

bool ptype_ok(const json& v, PType t) {
    switch (t) {
        case PType::Number: return v.is_number();
        case PType::Integer: return v.is_number_integer();
        case PType::Array: return v.is_array();
        case PType::Object: return v.is_object();
    }
    return false;
}

const char* ptype_name(PType t) {
    switch (t) {
        case PType::Number: return "number";
        case PType::Integer: return "integer";
        case PType::Array: return "array";
        case PType::Object: return "object";
    }
    return "?";
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                std::vector<std::string>& errs) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) errs.push_back(where + ": unknown key \"" + it.key() + "\"");
}

// Data-draw descriptors.  Which kinds are legal depends on the experiment;
// "uniform", "hashed" and "random_mixed" consume the top-level seed.
bool data_kind_random(const std::string& kind) {
    return kind == "uniform" || kind == "hashed" || kind == "random_mixed";
}

void check_data_object(const json& d, const std::string& where,
                       const std::set<std::string>& kinds, std::vector<std::string>& errs,
                       bool& random) {
    if (!d.is_object() || !d.contains("kind") || !d.at("kind").is_string()) {
        errs.push_back(where + ": expected an object with a \"kind\" string");
        return;
    }
    const std::string kind = d.at("kind").get<std::string>();
    if (!kinds.count(kind)) {
        std::string lst;
        for (const auto& k : kinds) lst += (lst.empty() ? "" : ", ") + k;
        errs.push_back(where + ": kind \"" + kind + "\" not allowed here (use one of: " + lst + ")");
        return;
    }
    random = random || data_kind_random(kind);
    std::set<std::string> allowed = {"kind"};
    if (kind == "uniform" || kind == "hashed") {
        allowed.insert("lo");
        allowed.insert("hi");
        if (!d.contains("lo") || !d.contains("hi") || !d.at("lo").is_number() ||
            !d.at("hi").is_number())
            errs.push_back(where + ": kind \"" + kind + "\" needs numeric \"lo\" and \"hi\"");
        else if (!(d.at("lo").get<double>() < d.at("hi").get<double>()))
            errs.push_back(where + ": need lo < hi");
    } else if (kind == "constant") {
        allowed.insert("value");
        if (!d.contains("value") || !d.at("value").is_number())
            errs.push_back(where + ": kind \"constant\" needs a numeric \"value\"");
    } else if (kind == "patch") {
        allowed.insert("r");
        if (!d.contains("r") || !d.at("r").is_number() || !(d.at("r").get<double>() > 0.0))
            errs.push_back(where + ": kind \"patch\" needs a positive \"r\"");
    }
    check_keys(d, where, allowed, errs);
}

}  // namespace

json validate_config(const json& config) {
    std::vector<std::string> errs;
    if (!config.is_object()) throw ConfigError("config: expected a JSON object");
    json cfg = config;

    check_keys(cfg, "config",
               {"schema_version", "experiment", "seed", "domain", "field", "grid", "params",
                "assert"},
               errs);

    if (!cfg.contains("schema_version") || !cfg.at("schema_version").is_number_integer())
        errs.push_back("config: missing integer \"schema_version\"");
    else if (cfg.at("schema_version").get<int>() != kSchemaVersion)
        errs.push_back("config: schema_version " + cfg.at("schema_version").dump() +
                       " unsupported (this build reads version " +
                       std::to_string(kSchemaVersion) + ")");

    std::string exp;
    const ExpSpec* spec = nullptr;
    if (!cfg.contains("experiment") || !cfg.at("experiment").is_string()) {
        errs.push_back("config: missing string \"experiment\"");
    } else {
        exp = cfg.at("experiment").get<std::string>();
        auto it = experiment_table().find(exp);
        if (it == experiment_table().end())
            errs.push_back("config: unknown experiment \"" + exp + "\"");
        else
            spec = &it->second;
    }

    // domain
    int n = 0;
    if (!cfg.contains("domain") || !cfg.at("domain").is_object()) {
        errs.push_back("config: missing object \"domain\"");
    } else {
        try {
            Domain dom = cfg.at("domain").get<Domain>();
            n = dom.n;
            if (spec && spec->whole_space_only && dom.kind != Domain::Kind::WholeSpace)
                errs.push_back("config: experiment \"" + exp + "\" runs on the whole space only");
        } catch (const std::exception& e) {
            errs.push_back(std::string("config/domain: ") + e.what());
        }
    }

    // field
    if (!cfg.contains("field") || !cfg.at("field").is_object()) {
        errs.push_back("config: missing object \"field\"");
    } else {
        const json& fj = cfg.at("field");
        check_keys(fj, "config/field", {"name", "nu", "form", "eig", "rate", "scale", "a"}, errs);
        if (n > 0) {
            try {
                (void)field_from_json(fj, n);
            } catch (const std::exception& e) {
                errs.push_back(std::string("config/field: ") + e.what());
            }
        }
    }

    // grid
    if (!cfg.contains("grid") || !cfg.at("grid").is_object()) {
        errs.push_back("config: missing object \"grid\"");
    } else {
        json& gj = cfg.at("grid");
        check_keys(gj, "config/grid", {"h", "tau", "margin"}, errs);
        if (!gj.contains("h") || !gj.at("h").is_number() || !(gj.at("h").get<double>() > 0.0))
            errs.push_back("config/grid: needs a positive number \"h\"");
        if (!gj.contains("tau"))
            gj["tau"] = 0.0;
        else if (!gj.at("tau").is_number() || gj.at("tau").get<double>() < 0.0)
            errs.push_back("config/grid: \"tau\" must be a number >= 0 (0 = stable default)");
        if (!gj.contains("margin"))
            gj["margin"] = 6.0;
        else if (!gj.at("margin").is_number() || !(gj.at("margin").get<double>() > 0.0))
            errs.push_back("config/grid: \"margin\" must be a positive number");
    }

    // params
    bool random = false;
    if (!cfg.contains("params") || !cfg.at("params").is_object()) {
        errs.push_back("config: missing object \"params\"");
    } else if (spec) {
        json& pj = cfg.at("params");
        std::set<std::string> allowed;
        for (const auto& p : spec->params) {
            allowed.insert(p.key);
            if (!pj.contains(p.key)) {
                if (p.required)
                    errs.push_back("config/params: experiment \"" + exp +
                                   "\" requires \"" + p.key + "\"");
                continue;
            }
            if (!ptype_ok(pj.at(p.key), p.type))
                errs.push_back("config/params: \"" + std::string(p.key) + "\" must be a " +
                               ptype_name(p.type));
        }
        check_keys(pj, "config/params", allowed, errs);

        // data-draw descriptors and their defaults
        if (exp == "oscillation" || exp == "harnack" || exp == "backward_harnack") {
            if (!pj.contains("data"))
                pj["data"] = exp == "oscillation"
                                 ? json{{"kind", "uniform"}, {"lo", -1.0}, {"hi", 1.0}}
                                 : json{{"kind", "uniform"}, {"lo", 0.0}, {"hi", 1.0}};
            check_data_object(pj.at("data"), "config/params/data", {"uniform", "constant"}, errs,
                              random);
        } else if (exp == "growth_exponent" && pj.contains("data")) {
            check_data_object(pj.at("data"), "config/params/data", {"patch", "constant"}, errs,
                              random);
        } else if (exp == "boundary_decay" && pj.contains("data")) {
            check_data_object(pj.at("data"), "config/params/data",
                              {"negative_patch", "positive_patch", "random_mixed"}, errs, random);
        } else if (exp == "quotient") {
            if (pj.contains("data_u"))
                check_data_object(pj.at("data_u"), "config/params/data_u", {"hashed", "constant"},
                                  errs, random);
            if (pj.contains("data_v"))
                check_data_object(pj.at("data_v"), "config/params/data_v", {"hashed", "constant"},
                                  errs, random);
        } else if (exp == "measure_profile") {
            if (!pj.contains("mc_paths")) pj["mc_paths"] = 0;
            if (pj.at("mc_paths").is_number_integer() && pj.at("mc_paths").get<long>() > 0)
                random = true;
        }
        if (exp == "doubling_wholespace" && !pj.contains("x_per_t")) pj["x_per_t"] = 1;
        if (exp == "harnack" && !pj.contains("T")) pj["T"] = 0.5;
    }

    // seed: required exactly when something is drawn, rejected otherwise
    if (random) {
        if (!cfg.contains("seed") || !cfg.at("seed").is_number_unsigned())
            errs.push_back(
                "config: this experiment draws random data, so a non-negative integer "
                "\"seed\" is required (seeds are never defaulted)");
    } else if (cfg.contains("seed")) {
        errs.push_back("config: \"seed\" given but nothing in this experiment is random");
    }

    // assert
    if (cfg.contains("assert")) {
        const json& aj = cfg.at("assert");
        if (!aj.is_array()) {
            errs.push_back("config: \"assert\" must be an array");
        } else {
            int i = 0;
            for (const auto& a : aj) {
                const std::string where = "config/assert[" + std::to_string(i++) + "]";
                if (!a.is_object() || !a.contains("metric") || !a.at("metric").is_string()) {
                    errs.push_back(where + ": expected an object with a \"metric\" string");
                    continue;
                }
                check_keys(a, where, {"metric", "at_most", "at_least", "equals", "rel_tol"}, errs);
                if (!a.contains("at_most") && !a.contains("at_least") && !a.contains("equals"))
                    errs.push_back(where + ": needs at_most, at_least or equals");
                for (const char* k : {"at_most", "at_least", "equals", "rel_tol"})
                    if (a.contains(k) && !a.at(k).is_number())
                        errs.push_back(where + ": \"" + std::string(k) + "\" must be a number");
            }
        }
    }

    if (!errs.empty()) {
        std::string msg = "config rejected by schema:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

namespace {

// --- execution ----------------------------------------------------------------

struct ExpOutput {
    CsvTable csv;
    json details = json::object();
    std::map<std::string, double> metrics;
    json grid = json::object();
};

// Everything executors share, parsed once.
struct Ctx {
    std::string experiment;
    Domain dom{Domain::whole_space(1)};
    Field f;
    double h = 0.0, tau = 0.0, margin = 6.0;
    json params;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string hash;
};

Ctx make_ctx(const json& cfg, const std::string& hash, int threads) {
    Ctx c;
    c.experiment = cfg.at("experiment").get<std::string>();
    c.dom = cfg.at("domain").get<Domain>();
    c.f = field_from_json(cfg.at("field"), c.dom.n);
    c.h = cfg.at("grid").at("h").get<double>();
    c.tau = cfg.at("grid").at("tau").get<double>();
    c.margin = cfg.at("grid").at("margin").get<double>();
    c.params = cfg.at("params");
    c.seed = cfg.value("seed", 0ULL);
    c.threads = threads;
    c.hash = hash;
    return c;
}

struct RowSink {
    CsvTable* t;
    std::string exp, hash, domain_id, field_id, form, hs, taus;

    RowSink(CsvTable* table, const Ctx& c) : t(table) {
        t->header = {"experiment", "config_hash", "domain_id", "field_id", "form",
                     "h",          "tau",         "X",         "Y",        "r",
                     "value",      "mc_value",    "mc_stderr", "truncation_change"};
        exp = c.experiment;
        hash = c.hash;
        domain_id = c.dom.id();
        field_id = c.f.id();
        form = form_tag(c.f.form);
    }
    void grid_scale(double h, double tau) {
        hs = fmt_double(h);
        taus = fmt_double(tau);
    }
    void row(const std::string& X, const std::string& Y, const std::string& r,
             const std::string& value, const std::string& mcv = "", const std::string& mce = "",
             const std::string& trunc = "") {
        t->add_row({exp, hash, domain_id, field_id, form, hs, taus, X, Y, r, value, mcv, mce,
                    trunc});
    }
};

json grid_meta(double h, double tau) { return json{{"h", h}, {"tau", tau}}; }

DataSampler sampler_of(const json& d) {
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "constant") return constant_data_sampler(d.at("value").get<double>());
    return uniform_data_sampler(d.at("lo").get<double>(), d.at("hi").get<double>());
}

// Deterministic bounded data for the quotient experiment: the value depends
// only on the spatial cell index at scale h, so it does not change when the
// operation resizes its internal box.
DataFn spatial_hash_data(double h, std::uint64_t seed, double lo, double hi) {
    return [=](const Coords& x, double, DataSide) {
        const std::uint64_t ix = static_cast<std::uint64_t>(std::llround(x[0] / h) + (1LL << 32));
        const std::uint64_t iy =
            x.size() > 1 ? static_cast<std::uint64_t>(std::llround(x[1] / h) + (1LL << 32)) : 0;
        std::uint64_t s = substream_seed(seed, (ix << 21) ^ iy);
        const double u01 = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u01;
    };
}

DataFn quotient_data_of(const json& d, double h, std::uint64_t seed, int slot) {
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "constant") {
        const double v = d.at("value").get<double>();
        return [v](const Coords&, double, DataSide) { return v; };
    }
    return spatial_hash_data(h, substream_seed(seed, static_cast<std::uint64_t>(slot)),
                             d.at("lo").get<double>(), d.at("hi").get<double>());
}

void constant_report_out(const ConstantReport& rep, const Ctx& c, ExpOutput& out,
                         const std::string& Ycell, const std::string& rcell) {
    RowSink sink(&out.csv, c);
    sink.grid_scale(rep.h, rep.tau);
    sink.row("", Ycell, rcell, fmt_double(rep.constant));
    out.metrics["constant"] = rep.constant;
    out.metrics["admissible"] = static_cast<double>(rep.admissible);
    for (const auto& p : rep.params) out.metrics[p.first] = p.second;
    out.details["argmax"] = rep.argmax;
    out.details["excluded"] = rep.excluded;
    out.grid = grid_meta(rep.h, rep.tau);
}

void doubling_out(const DoublingReport& rep, const Ctx& c, ExpOutput& out,
                  const std::string& Ycell, bool key_by_time,
                  const std::vector<double>& r_list) {
    RowSink sink(&out.csv, c);
    sink.grid_scale(rep.h, rep.tau);
    json cells = json::array();
    const std::size_t nr = r_list.size();
    for (std::size_t i = 0; i < rep.cells.size(); ++i) {
        const RatioCell& cell = rep.cells[i];
        const std::string Xc = st_cell(cell.X.x, cell.X.t);
        sink.row(Xc, Ycell, fmt_double(cell.r), cell.included ? fmt_double(cell.ratio) : "", "",
                 "", fmt_double(rep.truncation));
        cells.push_back(json{{"X", Xc},
                             {"r", cell.r},
                             {"num", cell.num},
                             {"den", cell.den},
                             {"ratio", cell.ratio},
                             {"included", cell.included},
                             {"note", cell.note}});
        if (cell.included) {
            const std::string key =
                key_by_time ? "ratio@r=" + fmt_double(cell.r) + ",t=" + fmt_double(cell.X.t)
                            : "ratio@r=" + fmt_double(cell.r) + ",x=" +
                                  std::to_string(nr ? i / nr : i);
            out.metrics[key] = cell.ratio;
        }
    }
    out.metrics["max_ratio"] = rep.max_ratio;
    out.metrics["included"] = static_cast<double>(rep.included);
    out.metrics["truncation"] = rep.truncation;
    out.details["cells"] = cells;
    out.details["rejected"] = rep.rejected;
    if (rep.argmax >= 0)
        out.details["argmax"] = json{{"X", st_cell(rep.cells[rep.argmax].X.x,
                                                   rep.cells[rep.argmax].X.t)},
                                     {"r", rep.cells[rep.argmax].r}};
    out.grid = grid_meta(rep.h, rep.tau);
}

void exponent_out(const ExponentReport& rep, const Ctx& c, ExpOutput& out,
                  const std::string& Ycell) {
    RowSink sink(&out.csv, c);
    sink.grid_scale(rep.h, rep.tau);
    json pts = json::array();
    for (const auto& p : rep.points) {
        sink.row("", Ycell, fmt_double(p.rho), fmt_double(p.f));
        pts.push_back(json{{"rho", p.rho}, {"f", p.f}, {"used", p.used}, {"note", p.note}});
    }
    out.metrics["exponent"] = rep.exponent;
    out.metrics["amplitude"] = rep.amplitude;
    out.metrics["residual"] = rep.residual;
    out.metrics["valid"] = rep.valid ? 1.0 : 0.0;
    out.metrics["lower_law"] = rep.lower_law_holds ? 1.0 : 0.0;
    std::size_t used = 0;
    for (const auto& p : rep.points) used += p.used ? 1 : 0;
    out.metrics["points_used"] = static_cast<double>(used);
    out.details["points"] = pts;
    out.details["note"] = rep.note;
    out.details["window"] = json::array({rep.window_lo, rep.window_hi});
    out.grid = grid_meta(rep.h, rep.tau);
}

// --- executors ----------------------------------------------------------------

ExpOutput run_measure_profile(const Ctx& c) {
    const int n = c.dom.n;
    const SpaceTimePoint X = point_of(c.params.at("X"), n, "params/X");
    const SpaceTimePoint Y = point_of(c.params.at("Y"), n, "params/Y");
    std::vector<double> r_list = doubles_of(c.params.at("r_list"));

    GridSpec gs;
    gs.h = c.h;
    gs.tau = c.tau;
    gs.t0 = 0.0;
    gs.t1 = X.t;
    if (c.dom.kind == Domain::Kind::Box) {
        gs.lo.assign(n, 0.0);
        gs.hi = c.dom.sides;
    } else {
        if (!c.params.contains("half_width"))
            throw ConfigError(
                "measure_profile: \"half_width\" is required on an unbounded domain");
        const double w = c.params.at("half_width").get<double>();
        if (!(w > 0.0)) throw ConfigError("measure_profile: half_width must be positive");
        for (int i = 0; i < n; ++i) {
            gs.lo.push_back(Y.x[i] - w);
            gs.hi.push_back(Y.x[i] + w);
        }
    }
    const Grid g = build_grid(c.dom, gs, c.f.nu);

    if (r_list.empty()) throw ConfigError("measure_profile: r_list must not be empty");
    for (std::size_t i = 1; i < r_list.size(); ++i)
        if (!(r_list[i] > r_list[i - 1]))
            throw ConfigError("measure_profile: r_list must be strictly increasing");

    RingBinner bin({Y.x, Y.t}, r_list);
    exit_sweep(c.f, g, X, bin);

    const long mc_paths = c.params.at("mc_paths").get<long>();
    RingBinner mc_bin({Y.x, Y.t}, r_list);
    if (mc_paths > 0) mc_exit_sample(c.f, g, X, mc_paths, c.seed, mc_bin);

    ExpOutput out;
    RowSink sink(&out.csv, c);
    sink.grid_scale(g.h, g.tau);
    const std::string Xc = st_cell(X.x, X.t), Yc = st_cell(Y.x, Y.t);
    json rows = json::array();
    for (std::size_t j = 0; j < r_list.size(); ++j) {
        const double v = bin.within(j);
        std::string mcv, mce;
        if (mc_paths > 0) {
            mcv = fmt_double(mc_bin.within(j));
            mce = fmt_double(mc_stderr(mc_bin.within(j), mc_paths));
        }
        sink.row(Xc, Yc, fmt_double(r_list[j]), fmt_double(v), mcv, mce,
                 fmt_double(bin.truncation));
        out.metrics["value@r=" + fmt_double(r_list[j])] = v;
        rows.push_back(json{{"r", r_list[j]},
                            {"value", v},
                            {"lateral", bin.lateral_within(j)},
                            {"bottom", bin.bottom_within(j)}});
    }
    out.metrics["truncation"] = bin.truncation;
    out.details["rows"] = rows;
    out.details["grid_id"] = grid_id(g);
    out.grid = grid_meta(g.h, g.tau);
    out.grid["nodes"] = g.size();
    out.grid["levels"] = g.steps;
    return out;
}

ExpOutput run_doubling_wholespace(const Ctx& c) {
    WholeSpaceSweepOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    opt.threads = c.threads;
    const std::vector<double> r_list = doubles_of(c.params.at("r_list"));
    DoublingReport rep = doubling_sweep_wholespace(
        c.f, c.params.at("K").get<double>(), r_list, doubles_of(c.params.at("t_list")),
        c.params.at("x_per_t").get<int>(), opt);
    ExpOutput out;
    doubling_out(rep, c, out, st_cell(Coords(c.dom.n, 0.0), 0.0), true, r_list);
    return out;
}

ExpOutput run_doubling_lipschitz(const Ctx& c) {
    LipschitzSweepOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    opt.threads = c.threads;
    const int n = c.dom.n;
    const SpaceTimePoint Y = point_of(c.params.at("Y"), n, "params/Y");
    std::vector<SpaceTimePoint> xs;
    for (const auto& e : c.params.at("X_list")) xs.push_back(point_of(e, n, "params/X_list[i]"));
    const std::vector<double> r_list = doubles_of(c.params.at("r_list"));
    DoublingReport rep =
        doubling_sweep_lipschitz(c.dom, c.f, Y, c.params.at("K").get<double>(),
                                 c.params.at("lambda").get<double>(), r_list, xs, opt);
    ExpOutput out;
    doubling_out(rep, c, out, st_cell(Y.x, Y.t), false, r_list);
    return out;
}

ExpOutput run_bottom_bound(const Ctx& c) {
    BottomBoundOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    const SpaceTimePoint Y = point_of(c.params.at("Y"), c.dom.n, "params/Y");
    const double r = c.params.at("r").get<double>();
    ConstantReport rep = bottom_lower_bound(c.dom, c.f, Y, r, opt);
    ExpOutput out;
    constant_report_out(rep, c, out, st_cell(Y.x, Y.t), fmt_double(r));
    return out;
}

ExpOutput run_oscillation(const Ctx& c) {
    OscillationOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    opt.threads = c.threads;
    const SpaceTimePoint Y = point_of(c.params.at("Y"), c.dom.n, "params/Y");
    const double r = c.params.at("r").get<double>();
    OscillationReport rep =
        oscillation_decay(c.dom, c.f, Y, r, c.params.at("draws").get<int>(), c.seed,
                          sampler_of(c.params.at("data")), opt);
    ExpOutput out;
    RowSink sink(&out.csv, c);
    sink.grid_scale(rep.h, rep.tau);
    json draws = json::array();
    std::size_t included = 0;
    for (const auto& d : rep.draws) {
        sink.row("", st_cell(Y.x, Y.t), fmt_double(r), d.included ? fmt_double(d.theta) : "");
        draws.push_back(json{{"seed", d.seed},
                             {"ratio_pos", d.ratio_pos},
                             {"ratio_neg", d.ratio_neg},
                             {"theta", d.theta},
                             {"included", d.included},
                             {"note", d.note}});
        included += d.included ? 1 : 0;
    }
    out.metrics["theta_hat"] = rep.theta_hat;
    out.metrics["draws_included"] = static_cast<double>(included);
    out.details["draws"] = draws;
    out.grid = grid_meta(rep.h, rep.tau);
    return out;
}

ExpOutput run_growth_exponent(const Ctx& c) {
    GrowthOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    if (c.params.contains("mu")) opt.mu_override = c.params.at("mu").get<double>();
    const SpaceTimePoint Y = point_of(c.params.at("Y"), c.dom.n, "params/Y");
    const json& d = c.params.at("data");
    DataFn data;
    if (d.at("kind").get<std::string>() == "patch")
        data = patch_data(make_patch(c.dom, Y, d.at("r").get<double>()));
    else {
        const double v = d.at("value").get<double>();
        data = [v](const Coords&, double, DataSide) { return v; };
    }
    ExponentReport rep = growth_exponent(c.dom, c.f, Y, data, c.params.at("rho0").get<double>(),
                                         c.params.at("R").get<double>(), opt);
    ExpOutput out;
    exponent_out(rep, c, out, st_cell(Y.x, Y.t));
    return out;
}

ExpOutput run_boundary_decay(const Ctx& c) {
    DecayOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    const SpaceTimePoint Y = point_of(c.params.at("Y"), c.dom.n, "params/Y");
    const std::string kind = c.params.at("data").at("kind").get<std::string>();
    DecayData dd;
    dd.kind = kind == "negative_patch"  ? DecayData::Kind::NegativePatch
              : kind == "positive_patch" ? DecayData::Kind::PositivePatch
                                         : DecayData::Kind::RandomMixed;
    dd.seed = c.seed;
    ExponentReport rep =
        boundary_decay_exponent(c.dom, c.f, Y, c.params.at("K").get<double>(),
                                c.params.at("rho0").get<double>(),
                                c.params.at("R").get<double>(), dd, opt);
    ExpOutput out;
    exponent_out(rep, c, out, st_cell(Y.x, Y.t));
    return out;
}

ExpOutput run_harnack(const Ctx& c) {
    HarnackOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.T = c.params.at("T").get<double>();
    opt.threads = c.threads;
    ConstantReport rep =
        harnack_constant(c.dom, c.f, c.params.at("delta").get<double>(),
                         c.params.at("lambda").get<double>(), c.params.at("draws").get<int>(),
                         c.seed, sampler_of(c.params.at("data")), opt);
    ExpOutput out;
    constant_report_out(rep, c, out, "", "");
    return out;
}

ExpOutput run_backward_harnack(const Ctx& c) {
    BackwardHarnackOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    if (c.params.contains("mu")) opt.mu = c.params.at("mu").get<double>();
    if (c.params.contains("r0")) opt.r0 = c.params.at("r0").get<double>();
    opt.threads = c.threads;
    const Coords x = coords_of(c.params.at("x"), c.dom.n, "params/x");
    const double r = c.params.at("r").get<double>();
    ConstantReport rep = backward_harnack(c.dom, c.f, x, c.params.at("t").get<double>(), r,
                                          c.params.at("delta").get<double>(),
                                          c.params.at("draws").get<int>(), c.seed,
                                          sampler_of(c.params.at("data")), opt);
    ExpOutput out;
    constant_report_out(rep, c, out, st_cell(x, c.params.at("t").get<double>()), fmt_double(r));
    return out;
}

ExpOutput run_quotient(const Ctx& c) {
    QuotientOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    if (c.params.contains("mu")) opt.mu_override = c.params.at("mu").get<double>();
    const SpaceTimePoint Y = point_of(c.params.at("Y"), c.dom.n, "params/Y");
    const double r = c.params.at("r").get<double>();
    ConstantReport rep = quotient_bound(c.dom, c.f, Y, c.params.at("K").get<double>(), r,
                                        quotient_data_of(c.params.at("data_u"), c.h, c.seed, 0),
                                        quotient_data_of(c.params.at("data_v"), c.h, c.seed, 1),
                                        opt);
    ExpOutput out;
    constant_report_out(rep, c, out, st_cell(Y.x, Y.t), fmt_double(r));
    return out;
}

ExpOutput run_aronson(const Ctx& c) {
    AronsonOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    const double t = c.params.at("t").get<double>();
    std::vector<Coords> offsets;
    for (const auto& e : c.params.at("offsets"))
        offsets.push_back(coords_of(e, c.dom.n, "params/offsets[i]"));
    AronsonReport rep = aronson_sandwich(c.f, t, offsets, opt);
    ExpOutput out;
    RowSink sink(&out.csv, c);
    sink.grid_scale(rep.h, rep.tau);
    json samples = json::array();
    for (const auto& s : rep.samples) {
        sink.row("", "", fmt_double(std::sqrt(s.first)), fmt_double(s.second));
        samples.push_back(json::array({s.first, s.second}));
    }
    out.metrics["slope"] = rep.slope;
    out.metrics["amplitude"] = std::exp(rep.intercept);
    out.metrics["n_lower"] = rep.n_lower;
    out.metrics["n_upper"] = rep.n_upper;
    out.metrics["residual"] = rep.residual;
    out.details["samples"] = samples;
    out.grid = grid_meta(rep.h, rep.tau);
    return out;
}

ExpOutput run_green_comparison(const Ctx& c) {
    GreenOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    const int n = c.dom.n;
    const SpaceTimePoint Y = point_of(c.params.at("Y"), n, "params/Y");
    const SpaceTimePoint X = point_of(c.params.at("X"), n, "params/X");
    GreenComparisonReport rep =
        green_measure_comparison(c.dom, c.f, Y, doubles_of(c.params.at("rho_list")), X, opt);
    ExpOutput out;
    RowSink sink(&out.csv, c);
    sink.grid_scale(rep.h, rep.tau);
    const std::string Xc = st_cell(X.x, X.t), Yc = st_cell(Y.x, Y.t);
    json rows = json::array();
    for (const auto& row : rep.rows) {
        sink.row(Xc, Yc, fmt_double(row.rho), fmt_double(row.measure));
        rows.push_back(json{{"rho", row.rho},
                            {"measure", row.measure},
                            {"g_plus", row.g_plus},
                            {"g_minus", row.g_minus},
                            {"ratio_plus", row.ratio_plus},
                            {"ratio_minus", row.ratio_minus}});
    }
    out.metrics["band_lo"] = rep.band_lo;
    out.metrics["band_hi"] = rep.band_hi;
    out.metrics["constant"] = rep.constant;
    out.details["rows"] = rows;
    out.grid = grid_meta(rep.h, rep.tau);
    return out;
}

ExpOutput run_domination(const Ctx& c) {
    DominationOptions opt;
    opt.h = c.h;
    opt.tau = c.tau;
    opt.margin = c.margin;
    if (c.params.contains("mu")) opt.mu_override = c.params.at("mu").get<double>();
    const SpaceTimePoint Y = point_of(c.params.at("Y"), c.dom.n, "params/Y");
    const double rho = c.params.at("rho").get<double>();
    ConstantReport rep =
        interior_measure_domination(c.dom, c.f, Y, rho, c.params.at("K").get<double>(),
                                    c.params.at("lambda").get<double>(), opt);
    ExpOutput out;
    constant_report_out(rep, c, out, st_cell(Y.x, Y.t), fmt_double(rho));
    return out;
}

ExpOutput dispatch(const json& cfg, const std::string& hash, int threads) {
    const Ctx c = make_ctx(cfg, hash, threads);
    if (c.experiment == "measure_profile") return run_measure_profile(c);
    if (c.experiment == "doubling_wholespace") return run_doubling_wholespace(c);
    if (c.experiment == "doubling_lipschitz") return run_doubling_lipschitz(c);
    if (c.experiment == "bottom_bound") return run_bottom_bound(c);
    if (c.experiment == "oscillation") return run_oscillation(c);
    if (c.experiment == "growth_exponent") return run_growth_exponent(c);
    if (c.experiment == "boundary_decay") return run_boundary_decay(c);
    if (c.experiment == "harnack") return run_harnack(c);
    if (c.experiment == "backward_harnack") return run_backward_harnack(c);
    if (c.experiment == "quotient") return run_quotient(c);
    if (c.experiment == "aronson") return run_aronson(c);
    if (c.experiment == "green_comparison") return run_green_comparison(c);
    if (c.experiment == "domination") return run_domination(c);
    throw ConfigError("unknown experiment: " + c.experiment);
}

// --- assertions -----------------------------------------------------------------

std::vector<AssertionOutcome> evaluate_asserts(const json& cfg,
                                               const std::map<std::string, double>& metrics) {
    std::vector<AssertionOutcome> outcomes;
    if (!cfg.contains("assert")) return outcomes;
    for (const auto& a : cfg.at("assert")) {
        const std::string metric = a.at("metric").get<std::string>();
        AssertionOutcome o;
        auto it = metrics.find(metric);
        if (it == metrics.end()) {
            o.name = metric;
            o.passed = false;
            o.detail = "metric not produced by this experiment";
            outcomes.push_back(std::move(o));
            continue;
        }
        const double v = it->second;
        if (a.contains("at_most")) {
            const double b = a.at("at_most").get<double>();
            outcomes.push_back({metric + " <= " + fmt_double(b),
                                std::isfinite(v) && v <= b,
                                metric + " = " + fmt_double(v)});
        }
        if (a.contains("at_least")) {
            const double b = a.at("at_least").get<double>();
            outcomes.push_back({metric + " >= " + fmt_double(b),
                                std::isfinite(v) && v >= b,
                                metric + " = " + fmt_double(v)});
        }
        if (a.contains("equals")) {
            const double e = a.at("equals").get<double>();
            const double rt = a.value("rel_tol", 0.01);
            const bool ok = std::isfinite(v) && std::fabs(v - e) <= rt * std::fabs(e);
            outcomes.push_back({metric + " = " + fmt_double(e) + " (rel_tol " + fmt_double(rt) +
                                    ")",
                                ok,
                                metric + " = " + fmt_double(v) + ", rel err " +
                                    fmt_double(e != 0.0 ? std::fabs(v - e) / std::fabs(e)
                                                        : std::fabs(v))});
        }
    }
    return outcomes;
}

void write_text_file(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + p.string());
    os << bytes;
    if (!os.good()) throw ConfigError("short write to " + p.string());
}

}  // namespace

RunResult run_config(const json& config, const RunOptions& opt) {
    const json cfg = validate_config(config);
    const std::string hash = hex64(fnv1a64(cfg.dump()));
    const std::string exp = cfg.at("experiment").get<std::string>();
    const std::string base = exp + "_" + hash;

    const auto t_start = std::chrono::steady_clock::now();
    ExpOutput out = dispatch(cfg, hash, opt.threads);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();

    RunResult res;
    res.assertions = evaluate_asserts(cfg, out.metrics);
    bool all_pass = true;
    for (const auto& a : res.assertions) all_pass = all_pass && a.passed;
    res.exit_code = all_pass ? 0 : 1;

    json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["code_version"] = kCodeVersion;
    summary["experiment"] = exp;
    summary["config_hash"] = hash;
    summary["grid"] = out.grid;
    json metrics = json::object();
    for (const auto& [k, v] : out.metrics) metrics[k] = v;
    summary["metrics"] = metrics;
    summary["details"] = out.details;
    json asserts = json::array();
    for (const auto& a : res.assertions)
        asserts.push_back(json{{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    summary["assertions"] = asserts;

    std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    const std::string csv_name = base + ".csv";
    const std::string sum_name = base + ".summary.json";
    const std::string man_name = base + ".manifest.json";
    write_text_file(dir / csv_name, out.csv.serialize());
    write_text_file(dir / sum_name, summary.dump(2) + "\n");

    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["code_version"] = kCodeVersion;
    manifest["config_hash"] = hash;
    manifest["experiment"] = exp;
    manifest["config"] = cfg;
    manifest["outputs"] = json::array({csv_name, sum_name});
    manifest["grid_sizes"] = json::array({out.grid});
    manifest["wall_ms"] = wall_ms;
    manifest["status"] = all_pass ? "pass" : "fail";
    write_text_file(dir / man_name, manifest.dump(2) + "\n");

    res.manifest = manifest;
    res.manifest_path = (dir / man_name).string();
    res.outputs = {csv_name, sum_name, man_name};
    return res;
}

RunResult run_config_file(const std::string& path, const RunOptions& opt) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        cfg = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return run_config(cfg, opt);
}

// --- report ---------------------------------------------------------------------

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    // Our own emitter never quotes (cells contain no comma/quote/newline),
    // so a plain split is exact for the files this tool writes.
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

std::vector<std::string> write_report(const std::string& manifest_path,
                                      const std::string& out_dir) {
    std::ifstream is(manifest_path);
    if (!is) throw ConfigError("cannot open manifest: " + manifest_path);
    json manifest;
    try {
        manifest = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!manifest.contains("experiment") || !manifest.contains("outputs"))
        throw ConfigError("manifest lacks experiment/outputs fields: " + manifest_path);

    const std::string exp = manifest.at("experiment").get<std::string>();
    const std::string hash = manifest.value("config_hash", std::string("nohash"));
    const std::filesystem::path mdir = std::filesystem::path(manifest_path).parent_path();

    std::string csv_text;
    json summary;
    for (const auto& o : manifest.at("outputs")) {
        const std::filesystem::path p = mdir / o.get<std::string>();
        std::ifstream f(p);
        if (!f) throw ConfigError("manifest output missing: " + p.string());
        std::stringstream ss;
        ss << f.rdbuf();
        if (p.extension() == ".csv")
            csv_text = ss.str();
        else if (p.extension() == ".json")
            summary = json::parse(ss.str());
    }
    if (csv_text.empty() || summary.is_null())
        throw ConfigError("manifest does not list both a CSV and a summary JSON");

    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    const std::string base = exp + "_" + hash;
    const json& metrics = summary.at("metrics");

    // Constants table: one "name value" line per empirical constant.
    {
        std::ostringstream os;
        os << "# experiment " << exp << "\n# config_hash " << hash << "\n# code_version "
           << manifest.value("code_version", std::string("?")) << "\n";
        for (auto it = metrics.begin(); it != metrics.end(); ++it)
            os << it.key() << " " << fmt_double(it.value().get<double>()) << "\n";
        const std::string name = base + ".constants.txt";
        write_text_file(dir / name, os.str());
        written.push_back(name);
    }

    const auto rows = parse_csv(csv_text);
    if (rows.size() < 1) throw ConfigError("empty CSV in manifest outputs");
    // Column indices in the pinned layout.
    constexpr std::size_t kX = 7, kR = 9, kValue = 10;

    if (exp == "doubling_wholespace" || exp == "doubling_lipschitz") {
        // One two-column file (r, ratio) per observation point.
        std::vector<std::string> order;
        std::map<std::string, std::ostringstream> series;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() <= kValue || row[kValue].empty()) continue;
            if (!series.count(row[kX])) order.push_back(row[kX]);
            series[row[kX]] << row[kR] << " " << row[kValue] << "\n";
        }
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::string name = base + ".X" + std::to_string(i) + ".dat";
            write_text_file(dir / name,
                            "# X = " + order[i] + "\n# columns: r ratio\n" +
                                series[order[i]].str());
            written.push_back(name);
        }
    } else if (exp == "growth_exponent" || exp == "boundary_decay") {
        // (log rho, log f) with the fitted line in the header.
        std::ostringstream os;
        os << "# columns: log_rho log_f\n# fit: log_f = log(amplitude) - exponent * log_rho\n"
           << "# exponent " << fmt_double(metrics.value("exponent", 0.0)) << "\n"
           << "# amplitude " << fmt_double(metrics.value("amplitude", 0.0)) << "\n";
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() <= kValue || row[kValue].empty()) continue;
            const double rho = std::strtod(row[kR].c_str(), nullptr);
            const double f = std::strtod(row[kValue].c_str(), nullptr);
            if (rho > 0.0 && f > 0.0)
                os << fmt_double(std::log(rho)) << " " << fmt_double(std::log(f)) << "\n";
        }
        const std::string name = base + ".fit.dat";
        write_text_file(dir / name, os.str());
        written.push_back(name);
    } else if (exp == "aronson") {
        // (|x-y|^2, log Gamma) plus the two envelope lines.
        const double nl = metrics.value("n_lower", 0.0), nu = metrics.value("n_upper", 0.0);
        std::ostringstream os;
        os << "# columns: d2 log_gamma log_lower_envelope log_upper_envelope\n"
           << "# lower: log(exp(-n_lower*d2)/n_lower), n_lower " << fmt_double(nl) << "\n"
           << "# upper: log(n_upper*exp(-d2/n_upper)), n_upper " << fmt_double(nu) << "\n";
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() <= kValue || row[kValue].empty()) continue;
            const double d = std::strtod(row[kR].c_str(), nullptr);
            const double gamma = std::strtod(row[kValue].c_str(), nullptr);
            if (!(gamma > 0.0)) continue;
            const double d2 = d * d;
            os << fmt_double(d2) << " " << fmt_double(std::log(gamma)) << " "
               << fmt_double(nl > 0.0 ? -nl * d2 - std::log(nl) : 0.0) << " "
               << fmt_double(nu > 0.0 ? -d2 / nu + std::log(nu) : 0.0) << "\n";
        }
        const std::string name = base + ".envelope.dat";
        write_text_file(dir / name, os.str());
        written.push_back(name);
    } else {
        // Generic (r, value) series when the rows carry one.
        std::ostringstream os;
        os << "# columns: r value\n";
        int data_rows = 0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() <= kValue || row[kValue].empty() || row[kR].empty()) continue;
            os << row[kR] << " " << row[kValue] << "\n";
            ++data_rows;
        }
        if (data_rows > 0) {
            const std::string name = base + ".profile.dat";
            write_text_file(dir / name, os.str());
            written.push_back(name);
        }
    }
    return written;
}

// --- suites -----------------------------------------------------------------------

namespace {

const char* kSmokeMeasureConfig = R"json({
  "schema_version": 1,
  "experiment": "measure_profile",
  "domain": {"kind": "whole_space", "n": 1},
  "field": {"name": "identity", "nu": 1.0, "form": "div"},
  "grid": {"h": 0.05},
  "params": {
    "X": [0.0, 1.0],
    "Y": [0.0, 0.0],
    "r_list": [0.5, 1.0, 2.0],
    "half_width": 8.0
  },
  "assert": [
    {"metric": "value@r=0.5", "equals": 0.27632639016823693, "rel_tol": 0.015},
    {"metric": "value@r=1", "equals": 0.52049987781304654, "rel_tol": 0.015},
    {"metric": "value@r=2", "equals": 0.84270079294971487, "rel_tol": 0.015},
    {"metric": "truncation", "at_most": 1e-6}
  ]
})json";

const char* kSmokeDoublingConfig = R"json({
  "schema_version": 1,
  "experiment": "doubling_wholespace",
  "domain": {"kind": "whole_space", "n": 1},
  "field": {"name": "identity", "nu": 1.0, "form": "div"},
  "grid": {"h": 0.05},
  "params": {
    "K": 8.0,
    "r_list": [0.5, 1.0],
    "t_list": [1.0],
    "x_per_t": 1
  },
  "assert": [
    {"metric": "ratio@r=1,t=1", "equals": 1.6190220764132372, "rel_tol": 0.02},
    {"metric": "max_ratio", "at_most": 2.2},
    {"metric": "included", "at_least": 2}
  ]
})json";

int run_config_suite(const std::vector<const char*>& raw_configs, const std::string& suite,
                     const RunOptions& opt, json& runs) {
    int worst = 0;
    for (const char* raw : raw_configs) {
        const json cfg = json::parse(raw);
        RunResult r = run_config(cfg, opt);
        worst = std::max(worst, r.exit_code);
        std::cout << (r.exit_code == 0 ? "[PASS] " : "[FAIL] ") << suite << "/"
                  << cfg.at("experiment").get<std::string>() << ": "
                  << r.assertions.size() << " assertions";
        for (const auto& a : r.assertions)
            if (!a.passed) std::cout << "; FAILED " << a.name << " (" << a.detail << ")";
        std::cout << "\n";
        runs.push_back(json{{"manifest", std::filesystem::path(r.manifest_path).filename()
                                             .string()},
                            {"exit_code", r.exit_code}});
    }
    return worst;
}

int run_acceptance_suite(const RunOptions& opt, json& runs) {
    std::vector<CriterionResult> res = run_acceptance(opt.threads, &std::cout);
    json arr = json::array();
    bool all = true;
    for (const auto& c : res) {
        all = all && c.passed;
        arr.push_back(json{{"index", c.index},
                           {"name", c.name},
                           {"passed", c.passed},
                           {"seconds", c.seconds},
                           {"detail", c.detail}});
    }
    std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    write_text_file(dir / "acceptance.results.json", arr.dump(2) + "\n");
    runs.push_back(json{{"results", "acceptance.results.json"}, {"exit_code", all ? 0 : 1}});
    return all ? 0 : 1;
}

}  // namespace

int run_suite(const std::string& name, const RunOptions& opt) {
    if (name != "smoke" && name != "acceptance" && name != "full")
        throw ConfigError("unknown suite \"" + name + "\" (use smoke, acceptance or full)");

    const auto t_start = std::chrono::steady_clock::now();
    json runs = json::array();
    int worst = 0;
    if (name == "smoke" || name == "full")
        worst = std::max(worst,
                         run_config_suite({kSmokeMeasureConfig, kSmokeDoublingConfig}, name, opt,
                                          runs));
    if (name == "acceptance" || name == "full")
        worst = std::max(worst, run_acceptance_suite(opt, runs));
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();

    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["code_version"] = kCodeVersion;
    manifest["suite"] = name;
    manifest["config_hash"] = hex64(fnv1a64("suite:" + name));
    manifest["runs"] = runs;
    manifest["wall_ms"] = wall_ms;
    manifest["status"] = worst == 0 ? "pass" : "fail";
    std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    write_text_file(dir / ("suite_" + name + ".manifest.json"), manifest.dump(2) + "\n");

    std::cout << (worst == 0 ? "[PASS] " : "[FAIL] ") << "suite " << name << " ("
              << fmt_double(wall_ms / 1000.0) << "s)\n";
    return worst;
}

}  // namespace caloric
