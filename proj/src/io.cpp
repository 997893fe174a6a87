#include "specwave/io.hpp"

#include "specwave/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specwave {

namespace {

void check_keys(const Json& obj, const std::vector<std::string>& allowed,
                const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(context + ": unknown key \"" + key + "\"");
        }
    }
}

double get_num(const Json& obj, const std::string& key, double fallback,
               const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(context + "." + key + ": expected a number");
    return obj[key].get<double>();
}

std::size_t get_size(const Json& obj, const std::string& key, std::size_t fallback,
                     const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer()) {
        throw ConfigError(context + "." + key + ": expected a non-negative integer");
    }
    const auto v = obj[key].get<std::int64_t>();
    if (v < 0) throw ConfigError(context + "." + key + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string get_str(const Json& obj, const std::string& key, const std::string& fallback,
                    const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw ConfigError(context + "." + key + ": expected a string");
    return obj[key].get<std::string>();
}

bool get_bool(const Json& obj, const std::string& key, bool fallback, const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) throw ConfigError(context + "." + key + ": expected a boolean");
    return obj[key].get<bool>();
}

}  // namespace

std::vector<std::vector<double>> load_matrix(const std::string& path) {
    const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
    std::vector<std::vector<double>> rows;
    if (csv) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open matrix file: " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
            rows.push_back(std::move(row));
        }
    } else {
        std::ifstream in(path, std::ios::binary | std::ios::ate);
        if (!in) throw ConfigError("cannot open matrix file: " + path);
        const std::streamsize bytes = in.tellg();
        if (bytes % static_cast<std::streamsize>(sizeof(double)) != 0) {
            throw ConfigError("matrix file " + path + ": size is not a multiple of 8 bytes");
        }
        const std::size_t count = static_cast<std::size_t>(bytes) / sizeof(double);
        const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
        if (side * side != count) {
            throw ConfigError("matrix file " + path + ": element count " + std::to_string(count) +
                              " is not a perfect square");
        }
        std::vector<double> flat(count);
        in.seekg(0);
        in.read(reinterpret_cast<char*>(flat.data()), bytes);
        rows.assign(side, std::vector<double>(side));
        for (std::size_t i = 0; i < side; ++i) {
            for (std::size_t j = 0; j < side; ++j) rows[i][j] = flat[i * side + j];
        }
    }
    if (rows.empty()) throw ConfigError("matrix file " + path + ": empty");
    for (const auto& row : rows) {
        if (row.size() != rows.size()) {
            throw ConfigError("matrix file " + path + ": not square");
        }
    }
    return rows;
}

std::vector<double> load_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open vector file: " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    }
    if (out.empty()) throw ConfigError("vector file " + path + ": empty");
    return out;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return j;
}

Json default_config(const std::string& subcommand) {
    const double pi = 3.14159265358979323846;
    Json j;
    j["backend"] = {{"kind", "dirichlet-1d"}, {"L", 200.0 * pi}, {"N", 4096}};
    j["data"] = {{"kind", "bump"}, {"amplitude", 1e-2}, {"width", 2.0}, {"u1_scale", 1.0}};
    j["q"] = 1.0;
    j["seed"] = 0;
    j["threads"] = 0;
    if (subcommand == "linear" || subcommand == "heat") {
        j["times"] = {{"lo", 1.0}, {"hi", 200.0}, {"count", 40}, {"spacing", "log"}};
    } else if (subcommand == "nonlinear" || subcommand == "smalldata") {
        j["p"] = 4.0;
        j["form"] = "+|u|^{p-1}u";
        j["evolve"] = {{"T", 400.0}, {"h", 0.05}, {"mode", "euler"},
                       {"linf_cap", 1e6}, {"record_stride", 10}, {"snapshot_stride", 0}};
        j["fit"] = {{"t_lo", 10.0}, {"t_hi", 200.0}};
        if (subcommand == "smalldata") {
            j["tolerances"] = {{"x_ratio_cap", 50.0}, {"smalldata_exp", 0.07}};
        }
    } else if (subcommand == "verify-matsumura") {
        j["fit"] = {{"t_lo", 10.0}, {"t_hi", 200.0}};
        j["tolerances"] = {{"l2", 0.05}, {"linf", 0.1}, {"ut", 0.1}, {"h1dot", 0.1}};
    } else if (subcommand == "verify-diffusion") {
        j["fit"] = {{"t_lo", 10.0}, {"t_hi", 200.0}};
        j["tolerances"] = {{"diff_l2", 0.1}, {"diff_linf", 0.1}};
    } else if (subcommand == "kernel-scan") {
        j.erase("backend");
        j.erase("data");
        j.erase("q");
        j["scan"] = {{"t_lo", 0.05}, {"t_hi", 100.0}, {"t_count", 2000}, {"t_spacing", "linear"},
                     {"lambda_lo", 0.0}, {"lambda_hi", 100.0}, {"lambda_count", 2000},
                     {"diff_t_lo", 10.0}, {"diff_t_hi", 1e4}, {"diff_t_count", 25},
                     {"diff_lambda_count", 4000}};
    } else if (subcommand == "check-inequalities") {
        j.erase("backend");
        j.erase("data");
        j["inequalities"] = {{"L", 200.0 * pi}, {"levels", {512, 1024, 2048, 4096}},
                             {"trials", 200}, {"band_fraction", 0.25}, {"s", 0.6},
                             {"gn_q", "inf"}, {"tolerance", 0.2}};
    } else if (subcommand == "sweep") {
        j["p"] = 4.0;
        j["form"] = "+|u|^p";
        j["backend"] = {{"kind", "dirichlet-1d"}, {"L", 200.0 * pi}, {"N", 1024}};
        j["evolve"] = {{"T", 400.0}, {"h", 0.05}, {"mode", "euler"},
                       {"linf_cap", 1e6}, {"record_stride", 10}, {"snapshot_stride", 0}};
        j["sweep"] = {{"p_values", {2.0, 2.5, 3.5, 4.0}}, {"q_values", {1.0}},
                      {"eps_values", {1e-2, 0.25}}};
    }
    return j;
}

void apply_override(Json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key=value or a.b=value, got \"" + assignment +
                          "\"");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    Json value;
    try {
        value = Json::parse(text);
    } catch (...) {
        value = text;  // bare strings allowed without quotes
    }

    Json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw ConfigError("override path has an empty segment: \"" + path + "\"");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

BackendSpec parse_backend_spec(const Json& spec) {
    check_keys(spec, {"kind", "L", "N", "nu", "base", "matrix_path", "weights_path", "alpha_hint"},
               "backend");
    BackendSpec out;
    out.kind = get_str(spec, "kind", out.kind, "backend");
    if (out.kind != "dirichlet-1d" && out.kind != "fractional-of-base" &&
        out.kind != "dense-matrix") {
        throw ConfigError("backend.kind: must be dirichlet-1d|fractional-of-base|dense-matrix, got \"" +
                          out.kind + "\"");
    }
    out.length = get_num(spec, "L", out.length, "backend");
    if (!(out.length > 0.0)) throw ConfigError("backend.L: must be > 0");
    out.modes = get_size(spec, "N", out.modes, "backend");
    if (out.modes < 2) throw ConfigError("backend.N: must be >= 2");
    out.nu = get_num(spec, "nu", out.nu, "backend");
    if (!(out.nu > 0.0)) throw ConfigError("backend.nu: must be > 0");
    if (spec.contains("base")) {
        out.base = std::make_shared<BackendSpec>(parse_backend_spec(spec["base"]));
    }
    out.matrix_path = get_str(spec, "matrix_path", "", "backend");
    out.weights_path = get_str(spec, "weights_path", "", "backend");
    if (spec.contains("alpha_hint")) {
        const double hint = get_num(spec, "alpha_hint", 0.0, "backend");
        if (!(hint > 0.0)) throw ConfigError("backend.alpha_hint: must be > 0");
        out.alpha_hint = hint;
    }
    if (out.kind == "dense-matrix" && out.matrix_path.empty()) {
        throw ConfigError("backend.matrix_path: required for dense-matrix");
    }
    return out;
}

DataSpec parse_data_spec(const Json& spec) {
    check_keys(spec,
               {"kind", "amplitude", "width", "center", "u1_scale", "u1_form", "modes",
                "mode_weights", "band_fraction"},
               "data");
    DataSpec out;
    out.kind = get_str(spec, "kind", out.kind, "data");
    if (out.kind != "bump" && out.kind != "eigen-mix" && out.kind != "random") {
        throw ConfigError("data.kind: must be bump|eigen-mix|random, got \"" + out.kind + "\"");
    }
    out.amplitude = get_num(spec, "amplitude", out.amplitude, "data");
    out.width = get_num(spec, "width", out.width, "data");
    if (!(out.width > 0.0)) throw ConfigError("data.width: must be > 0");
    if (spec.contains("center")) out.center = get_num(spec, "center", 0.0, "data");
    out.u1_scale = get_num(spec, "u1_scale", out.u1_scale, "data");
    out.u1_form = get_str(spec, "u1_form", out.u1_form, "data");
    if (out.u1_form != "scaled" && out.u1_form != "minus-A-u0") {
        throw ConfigError("data.u1_form: must be scaled|minus-A-u0");
    }
    if (spec.contains("modes")) {
        if (!spec["modes"].is_array()) throw ConfigError("data.modes: expected an array");
        for (const auto& m : spec["modes"]) out.modes.push_back(m.get<std::size_t>());
    }
    if (spec.contains("mode_weights")) {
        if (!spec["mode_weights"].is_array()) throw ConfigError("data.mode_weights: expected an array");
        for (const auto& m : spec["mode_weights"]) out.mode_weights.push_back(m.get<double>());
    }
    out.band_fraction = get_num(spec, "band_fraction", out.band_fraction, "data");
    return out;
}

namespace {

EvolveOptions parse_evolve(const Json& spec) {
    check_keys(spec, {"T", "h", "mode", "linf_cap", "record_stride", "snapshot_stride"}, "evolve");
    EvolveOptions out;
    out.horizon = get_num(spec, "T", out.horizon, "evolve");
    out.step = get_num(spec, "h", out.step, "evolve");
    if (!(out.step > 0.0)) throw ConfigError("evolve.h: must be > 0");
    if (!(out.horizon >= out.step)) throw ConfigError("evolve.T: must be >= h");
    const std::string mode = get_str(spec, "mode", "euler", "evolve");
    if (mode == "euler") out.mode = StepperMode::ExponentialEuler;
    else if (mode == "midpoint") out.mode = StepperMode::ExponentialMidpoint;
    else throw ConfigError("evolve.mode: must be euler|midpoint, got \"" + mode + "\"");
    out.linf_cap = get_num(spec, "linf_cap", out.linf_cap, "evolve");
    if (!(out.linf_cap > 0.0)) throw ConfigError("evolve.linf_cap: must be > 0");
    out.record_stride = get_size(spec, "record_stride", out.record_stride, "evolve");
    if (out.record_stride == 0) throw ConfigError("evolve.record_stride: must be >= 1");
    out.snapshot_stride = get_size(spec, "snapshot_stride", out.snapshot_stride, "evolve");
    return out;
}

Tolerances parse_tolerances(const Json& spec) {
    check_keys(spec,
               {"l2", "linf", "ut", "h1dot", "diff_l2", "diff_linf", "x_ratio_cap",
                "smalldata_exp"},
               "tolerances");
    Tolerances out;
    out.l2 = get_num(spec, "l2", out.l2, "tolerances");
    out.linf = get_num(spec, "linf", out.linf, "tolerances");
    out.ut = get_num(spec, "ut", out.ut, "tolerances");
    out.h1dot = get_num(spec, "h1dot", out.h1dot, "tolerances");
    out.diff_l2 = get_num(spec, "diff_l2", out.diff_l2, "tolerances");
    out.diff_linf = get_num(spec, "diff_linf", out.diff_linf, "tolerances");
    out.x_ratio_cap = get_num(spec, "x_ratio_cap", out.x_ratio_cap, "tolerances");
    out.smalldata_exp = get_num(spec, "smalldata_exp", out.smalldata_exp, "tolerances");
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const Json& config) {
    check_keys(config,
               {"backend", "data", "q", "p", "form", "evolve", "fit", "tolerances", "times",
                "scan", "inequalities", "sweep", "seed", "threads", "exploratory", "n_fit_times"},
               "config");
    ExperimentConfig out;
    if (config.contains("backend")) out.backend = parse_backend_spec(config["backend"]);
    if (config.contains("data")) out.data = parse_data_spec(config["data"]);
    out.q = get_num(config, "q", out.q, "config");
    if (!(out.q >= 1.0 && out.q <= 2.0)) throw ConfigError("q: must lie in [1,2]");
    out.p = get_num(config, "p", out.p, "config");
    if (!(out.p > 1.0)) throw ConfigError("p: must be > 1");
    out.form = get_str(config, "form", out.form, "config");
    Nonlinearity::parse(out.p, out.form);  // validates the form text
    if (config.contains("evolve")) out.evolve = parse_evolve(config["evolve"]);
    if (config.contains("fit")) {
        check_keys(config["fit"], {"t_lo", "t_hi"}, "fit");
        out.fit.t_lo = get_num(config["fit"], "t_lo", out.fit.t_lo, "fit");
        out.fit.t_hi = get_num(config["fit"], "t_hi", out.fit.t_hi, "fit");
        if (!(out.fit.t_lo > 0.0) || !(out.fit.t_hi > out.fit.t_lo)) {
            throw ConfigError("fit: need 0 < t_lo < t_hi");
        }
    }
    if (config.contains("tolerances")) out.tol = parse_tolerances(config["tolerances"]);
    out.n_fit_times = get_size(config, "n_fit_times", out.n_fit_times, "config");
    if (out.n_fit_times < 8) throw ConfigError("n_fit_times: must be >= 8");
    out.seed = get_size(config, "seed", 0, "config");
    out.threads = static_cast<int>(get_size(config, "threads", 0, "config"));
    out.exploratory = get_bool(config, "exploratory", false, "config");
    return out;
}

SweepConfig parse_sweep_config(const Json& config) {
    SweepConfig out;
    out.base = parse_experiment_config(config);
    if (config.contains("sweep")) {
        const Json& sw = config["sweep"];
        check_keys(sw, {"p_values", "q_values", "eps_values"}, "sweep");
        auto load_list = [&](const char* key, std::vector<double>& into) {
            if (!sw.contains(key)) return;
            if (!sw[key].is_array() || sw[key].empty()) {
                throw ConfigError(std::string("sweep.") + key + ": expected a non-empty array");
            }
            into.clear();
            for (const auto& v : sw[key]) into.push_back(v.get<double>());
        };
        load_list("p_values", out.p_values);
        load_list("q_values", out.q_values);
        load_list("eps_values", out.eps_values);
    }
    for (double p : out.p_values) {
        if (!(p > 1.0)) throw ConfigError("sweep.p_values: every p must be > 1");
    }
    for (double q : out.q_values) {
        if (!(q >= 1.0 && q <= 2.0)) throw ConfigError("sweep.q_values: every q must lie in [1,2]");
    }
    out.form = get_str(config, "form", out.form, "config");
    return out;
}

KernelScanGrid parse_scan_grid(const Json& config) {
    KernelScanGrid out;
    if (!config.contains("scan")) return out;
    const Json& s = config["scan"];
    check_keys(s,
               {"t_lo", "t_hi", "t_count", "t_spacing", "lambda_lo", "lambda_hi", "lambda_count",
                "diff_t_lo", "diff_t_hi", "diff_t_count", "diff_lambda_count"},
               "scan");
    out.t_lo = get_num(s, "t_lo", out.t_lo, "scan");
    out.t_hi = get_num(s, "t_hi", out.t_hi, "scan");
    out.t_count = get_size(s, "t_count", out.t_count, "scan");
    const std::string spacing = get_str(s, "t_spacing", "linear", "scan");
    if (spacing != "linear" && spacing != "log") {
        throw ConfigError("scan.t_spacing: must be linear|log");
    }
    out.t_log = spacing == "log";
    out.lambda_lo = get_num(s, "lambda_lo", out.lambda_lo, "scan");
    out.lambda_hi = get_num(s, "lambda_hi", out.lambda_hi, "scan");
    out.lambda_count = get_size(s, "lambda_count", out.lambda_count, "scan");
    out.diff_t_lo = get_num(s, "diff_t_lo", out.diff_t_lo, "scan");
    out.diff_t_hi = get_num(s, "diff_t_hi", out.diff_t_hi, "scan");
    out.diff_t_count = get_size(s, "diff_t_count", out.diff_t_count, "scan");
    out.diff_lambda_count = get_size(s, "diff_lambda_count", out.diff_lambda_count, "scan");
    if (!(out.t_lo > 0.0) || !(out.t_hi > out.t_lo)) throw ConfigError("scan: need 0 < t_lo < t_hi");
    if (out.t_count < 2 || out.lambda_count < 2 || out.diff_t_count < 2 ||
        out.diff_lambda_count < 2) {
        throw ConfigError("scan: grid counts must be >= 2");
    }
    return out;
}

InequalityRunSpec parse_inequality_spec(const Json& config) {
    InequalityRunSpec out;
    if (!config.contains("inequalities")) return out;
    const Json& s = config["inequalities"];
    check_keys(s, {"L", "levels", "trials", "band_fraction", "s", "gn_q", "tolerance"},
               "inequalities");
    out.length = get_num(s, "L", out.length, "inequalities");
    if (s.contains("levels")) {
        if (!s["levels"].is_array() || s["levels"].size() < 2) {
            throw ConfigError("inequalities.levels: expected an array of >= 2 mode counts");
        }
        out.levels.clear();
        for (const auto& v : s["levels"]) out.levels.push_back(v.get<std::size_t>());
    }
    out.options.trials = get_size(s, "trials", out.options.trials, "inequalities");
    out.band_fraction = get_num(s, "band_fraction", out.band_fraction, "inequalities");
    out.options.sobolev_s = get_num(s, "s", out.options.sobolev_s, "inequalities");
    if (s.contains("gn_q")) {
        if (s["gn_q"].is_string()) {
            if (s["gn_q"].get<std::string>() != "inf") {
                throw ConfigError("inequalities.gn_q: must be a number > 2 or \"inf\"");
            }
            out.options.gn_q = std::numeric_limits<double>::infinity();
        } else {
            out.options.gn_q = get_num(s, "gn_q", out.options.gn_q, "inequalities");
        }
    }
    out.tolerance = get_num(s, "tolerance", out.tolerance, "inequalities");
    return out;
}

std::vector<double> parse_times(const Json& config) {
    if (!config.contains("times")) {
        return log_spaced(1.0, 200.0, 40);
    }
    const Json& t = config["times"];
    if (t.is_array()) {
        std::vector<double> out;
        for (const auto& v : t) out.push_back(v.get<double>());
        return out;
    }
    check_keys(t, {"lo", "hi", "count", "spacing"}, "times");
    const double lo = get_num(t, "lo", 1.0, "times");
    const double hi = get_num(t, "hi", 200.0, "times");
    const std::size_t count = get_size(t, "count", 40, "times");
    const std::string spacing = get_str(t, "spacing", "log", "times");
    if (spacing == "log") return log_spaced(lo, hi, count);
    if (spacing == "linear") return lin_spaced(lo, hi, count);
    throw ConfigError("times.spacing: must be log|linear");
}

// -- emission ----------------------------------------------------------------

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline surprises
    if (!out) throw std::runtime_error("cannot open output file for writing: " + path);
    return out;
}

void check_row_finite(const TraceRow& r, bool is_blowup_row, const std::string& path) {
    if (is_blowup_row) return;
    for (double v : {r.t, r.l1, r.lq, r.l2, r.linf, r.h1dot, r.ut_l2}) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("emit: non-finite value outside a blow-up record in " + path);
        }
    }
}

}  // namespace

void write_trace_csv(const std::string& path, const EvolutionTrace& trace) {
    auto out = open_out(path);
    out << "t,l1,lq,l2,linf,h1dot,ut_l2,blowup\n";
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        const TraceRow& r = trace.rows[i];
        const bool is_blowup_row = trace.blowup && i + 1 == trace.rows.size();
        check_row_finite(r, is_blowup_row, path);
        out << format_double(r.t) << ',' << format_double(r.l1) << ',' << format_double(r.lq)
            << ',' << format_double(r.l2) << ',' << format_double(r.linf) << ','
            << format_double(r.h1dot) << ',' << format_double(r.ut_l2) << ','
            << (is_blowup_row ? 1 : 0) << '\n';
    }
}

void write_snapshots_csv(const std::string& path, const EvolutionTrace& trace) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < trace.snapshot_times.size(); ++i) {
        out << format_double(trace.snapshot_times[i]);
        for (double v : trace.snapshots[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_phase_csv(const std::string& path, const SweepReport& report) {
    auto out = open_out(path);
    out << "p,q,eps,class,t_blowup\n";
    for (const SweepPoint& pt : report.points) {
        out << format_double(pt.p) << ',' << format_double(pt.q) << ',' << format_double(pt.eps)
            << ',' << pt.outcome << ','
            << (std::isnan(pt.t_blowup) ? "" : format_double(pt.t_blowup)) << '\n';
    }
}

void write_kernel_scan_csv(const std::string& path, const KernelScanGrid& grid) {
    auto out = open_out(path);
    out << "t,lambda,D,dtD,diff_symbol\n";
    const std::vector<double> ts = grid.t_log ? log_spaced(grid.t_lo, grid.t_hi, grid.t_count)
                                              : lin_spaced(grid.t_lo, grid.t_hi, grid.t_count);
    const std::vector<double> lams = lin_spaced(grid.lambda_lo, grid.lambda_hi, grid.lambda_count);
    for (double t : ts) {
        for (double lam : lams) {
            out << format_double(t) << ',' << format_double(lam) << ','
                << format_double(eval_D(t, lam)) << ',' << format_double(eval_dtD(t, lam)) << ',';
            if (lam < 0.125) out << format_double(eval_diff_symbol(t, lam));
            out << '\n';
        }
    }
}

Json report_to_json(const ExperimentReport& report) {
    Json j;
    j["experiment"] = report.experiment;
    j["pass"] = report.pass;
    Json crits = Json::array();
    for (const CriterionResult& c : report.criteria) {
        crits.push_back({{"name", c.name},
                         {"predicted", c.predicted},
                         {"fitted", c.fitted},
                         {"tolerance", c.tolerance},
                         {"r_squared", c.r_squared},
                         {"window", {c.window_lo, c.window_hi}},
                         {"pass", c.pass}});
    }
    j["criteria"] = crits;
    for (const auto& [k, v] : report.values) j["values"][k] = v;
    if (!report.notes.empty()) j["notes"] = report.notes;
    if (report.blowup) {
        j["blowup"] = {{"t", report.blowup->t}, {"reason", report.blowup->reason}};
    }
    return j;
}

Json kernel_bounds_to_json(const KernelBoundsReport& report) {
    Json j;
    j["sup_D"] = {{"value", report.sup_D}, {"t", report.sup_D_t}, {"lambda", report.sup_D_lambda}};
    j["sup_dtD"] = {{"value", report.sup_dtD}, {"t", report.sup_dtD_t},
                    {"lambda", report.sup_dtD_lambda}};
    j["grid"] = {{"t_count", report.grid.t_count}, {"lambda_count", report.grid.lambda_count},
                 {"diff_t_count", report.grid.diff_t_count},
                 {"diff_lambda_count", report.grid.diff_lambda_count}};
    Json rows = Json::array();
    for (const DiffSymbolRow& r : report.diff_rows) {
        rows.push_back({{"t", r.t}, {"sup", r.sup_abs}, {"weighted_sup", r.weighted_sup}});
    }
    j["diff_rows"] = rows;
    j["diff_constant"] = report.diff_constant;
    return j;
}

Json inequality_scan_to_json(const InequalityScanReport& report) {
    Json j;
    j["tolerance"] = report.tolerance;
    j["stable"] = report.stable;
    Json levels = Json::array();
    for (const InequalityLevelRow& row : report.levels) {
        Json r;
        r["N"] = row.modes;
        Json results = Json::array();
        for (const InequalityResult& res : row.results) {
            Json e = {{"inequality", res.name}, {"applicable", res.applicable},
                      {"max_ratio", res.max_ratio}, {"exponent", res.exponent_a}};
            if (!res.applicable) e["skip_reason"] = res.skip_reason;
            results.push_back(e);
        }
        r["results"] = results;
        levels.push_back(r);
    }
    j["per_level"] = levels;
    Json steps = Json::array();
    for (const auto& [name, step] : report.max_step) {
        steps.push_back({{"inequality", name}, {"max_relative_step", step}});
    }
    j["max_step"] = steps;
    return j;
}

Json trace_summary_json(const EvolutionTrace& trace) {
    Json j;
    j["rows"] = trace.rows.size();
    if (!trace.rows.empty()) {
        j["t_final"] = trace.rows.back().t;
        j["l2_final"] = trace.rows.back().l2;
        j["linf_final"] = trace.rows.back().linf;
    }
    if (trace.blowup) {
        j["blowup"] = {{"t", trace.blowup->t}, {"reason", trace.blowup->reason}};
    }
    return j;
}

namespace {

void check_json_finite(const Json& j, const std::string& path, bool in_blowup) {
    if (j.is_number_float()) {
        if (!std::isfinite(j.get<double>()) && !in_blowup) {
            throw std::runtime_error("emit: non-finite value outside a blow-up record in " + path);
        }
        return;
    }
    if (j.is_object()) {
        for (const auto& [key, val] : j.items()) {
            check_json_finite(val, path, in_blowup || key == "blowup");
        }
    } else if (j.is_array()) {
        for (const auto& val : j) check_json_finite(val, path, in_blowup);
    }
}

}  // namespace

void write_report_json(const std::string& path, const Json& body, const Json& config_echo,
                       const std::vector<std::string>& overrides) {
    Json j = body;
    j["schema_version"] = 1;
    j["config"] = config_echo;
    j["overrides"] = overrides;
    check_json_finite(j, path, false);
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace specwave
