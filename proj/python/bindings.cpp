#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "specwave/analysis.hpp"
#include "specwave/backend.hpp"
#include "specwave/evolution.hpp"
#include "specwave/experiments.hpp"
#include "specwave/io.hpp"
#include "specwave/kernels.hpp"
#include "specwave/sierpinski.hpp"

namespace py = pybind11;
using namespace specwave;

namespace {

std::vector<double> to_vec(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
    return std::vector<double>(a.data(), a.data() + a.shape(0));
}

py::array_t<double> to_np(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

GridFunction grid_fn(const BackendPtr& b, const py::array_t<double>& a) {
    return b->make_grid_function(to_vec(a));
}

CauchyData cauchy(const BackendPtr& b, const py::array_t<double>& u0,
                  const py::array_t<double>& u1) {
    return CauchyData{grid_fn(b, u0), grid_fn(b, u1)};
}

StepperMode parse_mode(const std::string& text) {
    if (text == "euler") return StepperMode::ExponentialEuler;
    if (text == "midpoint") return StepperMode::ExponentialMidpoint;
    throw std::invalid_argument("mode must be euler|midpoint");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spectral functional-calculus toolkit for the damped wave flow";

    // multiplier kernels (vectorized over numpy inputs)
    m.def("eval_D", py::vectorize(eval_D), py::arg("t"), py::arg("lam"));
    m.def("eval_dtD", py::vectorize(eval_dtD), py::arg("t"), py::arg("lam"));
    m.def("eval_dt2D", py::vectorize(eval_dt2D), py::arg("t"), py::arg("lam"));
    m.def("eval_heat", py::vectorize(eval_heat), py::arg("t"), py::arg("lam"));
    m.def("eval_step_integral", py::vectorize(eval_step_integral), py::arg("h"), py::arg("lam"));
    m.def("eval_diff_symbol", py::vectorize(eval_diff_symbol), py::arg("t"), py::arg("lam"));

    py::class_<SpectrumBackend, BackendPtr>(m, "SpectrumBackend")
        .def_property_readonly("kind",
                               [](const SpectrumBackend& b) { return to_string(b.kind()); })
        .def_property_readonly("mode_count", &SpectrumBackend::mode_count)
        .def_property_readonly("alpha", &SpectrumBackend::alpha)
        .def_property_readonly("domain_length", &SpectrumBackend::domain_length)
        .def_property_readonly("fractional_power", &SpectrumBackend::fractional_power)
        .def_property_readonly(
            "eigenvalues", [](const SpectrumBackend& b) { return to_np(b.eigenvalues()); })
        .def_property_readonly(
            "quadrature_weights",
            [](const SpectrumBackend& b) { return to_np(b.quadrature_weights()); })
        .def("forward",
             [](const BackendPtr& b, const py::array_t<double>& f) {
                 return to_np(b->forward(grid_fn(b, f)).coeffs);
             })
        .def("inverse",
             [](const BackendPtr& b, const py::array_t<double>& c) {
                 return to_np(b->inverse(b->make_coeffs(to_vec(c))).samples);
             })
        .def("lq_norm",
             [](const BackendPtr& b, const py::array_t<double>& f, double q) {
                 return b->lq_norm(grid_fn(b, f), q);
             },
             py::arg("f"), py::arg("q"))
        .def("sobolev_norm",
             [](const BackendPtr& b, const py::array_t<double>& f, double s) {
                 return b->sobolev_norm(grid_fn(b, f), s);
             },
             py::arg("f"), py::arg("s"))
        .def("heat_l2_to_linf_norm", &SpectrumBackend::heat_l2_to_linf_norm, py::arg("t"))
        .def("power_law_time_guard", &SpectrumBackend::power_law_time_guard);

    m.def("build_dirichlet_1d", &build_dirichlet_1d, py::arg("length"), py::arg("modes"));
    m.def("build_fractional", &build_fractional, py::arg("base"), py::arg("nu"));
    m.def(
        "build_matrix_backend",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& matrix,
           const py::array_t<double>& weights, std::optional<double> alpha_hint) {
            if (matrix.ndim() != 2 || matrix.shape(0) != matrix.shape(1)) {
                throw std::invalid_argument("matrix must be square 2-d");
            }
            const std::size_t n = static_cast<std::size_t>(matrix.shape(0));
            std::vector<std::vector<double>> rows(n, std::vector<double>(n));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    rows[i][j] = matrix.at(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
                }
            }
            return build_matrix_backend(rows, to_vec(weights), alpha_hint);
        },
        py::arg("matrix"), py::arg("weights"), py::arg("alpha_hint") = std::nullopt);
    m.def("build_sierpinski", &build_sierpinski, py::arg("level"));
    m.def("sierpinski_laplacian", [](std::size_t level) {
        const SierpinskiGraph g = sierpinski_laplacian(level);
        const py::ssize_t n = static_cast<py::ssize_t>(g.vertex_count);
        py::array_t<double> matrix({n, n});
        for (py::ssize_t i = 0; i < n; ++i) {
            for (py::ssize_t j = 0; j < n; ++j) {
                matrix.mutable_at(i, j) =
                    g.laplacian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
        return py::make_tuple(matrix, to_np(g.weights), g.alpha_hint);
    });

    py::class_<DecayFit>(m, "DecayFit")
        .def_readonly("exponent", &DecayFit::exponent)
        .def_readonly("intercept", &DecayFit::intercept)
        .def_readonly("t_lo", &DecayFit::t_lo)
        .def_readonly("t_hi", &DecayFit::t_hi)
        .def_readonly("r_squared", &DecayFit::r_squared)
        .def_readonly("n_points", &DecayFit::n_points)
        .def_readonly("power_law", &DecayFit::power_law)
        .def("__repr__", [](const DecayFit& f) {
            return "DecayFit(exponent=" + std::to_string(f.exponent) +
                   ", r_squared=" + std::to_string(f.r_squared) + ")";
        });

    m.def(
        "measure_alpha",
        [](const BackendPtr& b, double t_lo, double t_hi, std::size_t n) {
            return measure_alpha(*b, t_lo, t_hi, n);
        },
        py::arg("backend"), py::arg("t_lo"), py::arg("t_hi"), py::arg("n_samples") = 16);
    m.def("fit_powerlaw", &fit_powerlaw, py::arg("times"), py::arg("values"), py::arg("t_lo"),
          py::arg("t_hi"));

    py::class_<EvolutionTrace>(m, "EvolutionTrace")
        .def("times", &EvolutionTrace::times)
        .def("series", &EvolutionTrace::series, py::arg("which"))
        .def_property_readonly("blowup",
                               [](const EvolutionTrace& tr) -> py::object {
                                   if (!tr.blowup) return py::none();
                                   return py::make_tuple(tr.blowup->t, tr.blowup->reason);
                               })
        .def_property_readonly("snapshot_times",
                               [](const EvolutionTrace& tr) { return to_np(tr.snapshot_times); })
        .def("snapshot", [](const EvolutionTrace& tr, std::size_t i) {
            return to_np(tr.snapshots.at(i));
        });

    m.def(
        "linear_solve",
        [](const BackendPtr& b, const py::array_t<double>& u0, const py::array_t<double>& u1,
           const std::vector<double>& times, double lq_q) {
            TraceOptions opts;
            opts.lq_q = lq_q;
            return linear_solve(cauchy(b, u0, u1), times, opts);
        },
        py::arg("backend"), py::arg("u0"), py::arg("u1"), py::arg("times"), py::arg("lq_q") = 1.0);
    m.def(
        "heat_solve",
        [](const BackendPtr& b, const py::array_t<double>& f, const std::vector<double>& times,
           double lq_q) {
            TraceOptions opts;
            opts.lq_q = lq_q;
            return heat_solve(grid_fn(b, f), times, opts);
        },
        py::arg("backend"), py::arg("f"), py::arg("times"), py::arg("lq_q") = 1.0);
    m.def(
        "nonlinear_evolve",
        [](const BackendPtr& b, const py::array_t<double>& u0, const py::array_t<double>& u1,
           double p, const std::string& form, double h, double T, const std::string& mode,
           double linf_cap, std::size_t record_stride, std::size_t snapshot_stride, double lq_q) {
            EvolveOptions opts;
            opts.step = h;
            opts.horizon = T;
            opts.mode = parse_mode(mode);
            opts.linf_cap = linf_cap;
            opts.record_stride = record_stride;
            opts.snapshot_stride = snapshot_stride;
            opts.lq_q = lq_q;
            return nonlinear_evolve(cauchy(b, u0, u1), Nonlinearity::parse(p, form), opts);
        },
        py::arg("backend"), py::arg("u0"), py::arg("u1"), py::arg("p"), py::arg("form"),
        py::arg("h"), py::arg("T"), py::arg("mode") = "euler", py::arg("linf_cap") = 1e6,
        py::arg("record_stride") = 1, py::arg("snapshot_stride") = 0, py::arg("lq_q") = 1.0);
    m.def(
        "duhamel_residual",
        [](const EvolutionTrace& trace, double p, const std::string& form,
           const std::vector<double>& sample_times) {
            return duhamel_residual(trace, Nonlinearity::parse(p, form), sample_times);
        },
        py::arg("trace"), py::arg("p"), py::arg("form"), py::arg("sample_times"));

    m.def(
        "fit_decay",
        [](const EvolutionTrace& trace, const std::string& which, double t_lo, double t_hi) {
            return fit_decay(trace, which, t_lo, t_hi);
        },
        py::arg("trace"), py::arg("which"), py::arg("t_lo"), py::arg("t_hi"));

    m.def(
        "predict_exponent",
        [](double alpha, double q, int k, double s, const std::string& target) {
            return predict_exponent(alpha, q, k, s, parse_decay_target(target)).predicted;
        },
        py::arg("alpha"), py::arg("q"), py::arg("k"), py::arg("s"), py::arg("target"));

    py::class_<CriticalityRecord>(m, "CriticalityRecord")
        .def_readonly("p", &CriticalityRecord::p)
        .def_readonly("q", &CriticalityRecord::q)
        .def_readonly("alpha", &CriticalityRecord::alpha)
        .def_readonly("p_fujita", &CriticalityRecord::p_fujita)
        .def_readonly("admissible", &CriticalityRecord::admissible)
        .def_readonly("delta", &CriticalityRecord::delta)
        .def_readonly("sigma", &CriticalityRecord::sigma)
        .def_readonly("q_lo", &CriticalityRecord::q_lo)
        .def_readonly("q_hi", &CriticalityRecord::q_hi)
        .def_readonly("reason", &CriticalityRecord::reason)
        .def("__repr__", [](const CriticalityRecord& r) {
            return "CriticalityRecord(p_fujita=" + std::to_string(r.p_fujita) +
                   ", admissible=" + (r.admissible ? std::string("True") : std::string("False")) +
                   ")";
        });
    m.def("criticality", &criticality, py::arg("p"), py::arg("q"), py::arg("alpha"));

    m.def(
        "weighted_X_norm",
        [](const EvolutionTrace& tr, double q, double alpha, int delta) {
            return weighted_X_norm(tr, q, alpha, delta);
        },
        py::arg("trace"), py::arg("q"), py::arg("alpha"), py::arg("delta"));
    m.def(
        "weighted_Y_norm",
        [](const EvolutionTrace& tr, double p, double q, double alpha, double sigma) {
            return weighted_Y_norm(tr, p, q, alpha, sigma);
        },
        py::arg("trace"), py::arg("p"), py::arg("q"), py::arg("alpha"), py::arg("sigma"));

    m.def(
        "scan_kernel_bounds",
        [](double t_lo, double t_hi, std::size_t t_count, double lambda_hi,
           std::size_t lambda_count, double diff_t_lo, double diff_t_hi, std::size_t diff_t_count,
           std::size_t diff_lambda_count, int threads) {
            KernelScanGrid grid;
            grid.t_lo = t_lo;
            grid.t_hi = t_hi;
            grid.t_count = t_count;
            grid.lambda_hi = lambda_hi;
            grid.lambda_count = lambda_count;
            grid.diff_t_lo = diff_t_lo;
            grid.diff_t_hi = diff_t_hi;
            grid.diff_t_count = diff_t_count;
            grid.diff_lambda_count = diff_lambda_count;
            const KernelBoundsReport rep = scan_kernel_bounds(grid, threads);
            py::dict out;
            out["sup_D"] = rep.sup_D;
            out["sup_dtD"] = rep.sup_dtD;
            out["diff_constant"] = rep.diff_constant;
            std::vector<double> ts, sups, weighted;
            for (const auto& row : rep.diff_rows) {
                ts.push_back(row.t);
                sups.push_back(row.sup_abs);
                weighted.push_back(row.weighted_sup);
            }
            out["diff_t"] = to_np(ts);
            out["diff_sup"] = to_np(sups);
            out["diff_weighted_sup"] = to_np(weighted);
            return out;
        },
        py::arg("t_lo") = 0.05, py::arg("t_hi") = 100.0, py::arg("t_count") = 2000,
        py::arg("lambda_hi") = 100.0, py::arg("lambda_count") = 2000, py::arg("diff_t_lo") = 10.0,
        py::arg("diff_t_hi") = 1e4, py::arg("diff_t_count") = 25,
        py::arg("diff_lambda_count") = 4000, py::arg("threads") = 1);

    m.def(
        "check_inequalities",
        [](const BackendPtr& b, std::size_t trials, std::uint64_t seed, std::size_t band_modes,
           double s, double gn_q) {
            InequalityOptions opts;
            opts.trials = trials;
            opts.seed = seed;
            opts.band_modes = band_modes;
            opts.sobolev_s = s;
            opts.gn_q = gn_q;
            const InequalityReport rep = check_inequalities(*b, opts);
            py::list out;
            for (const auto& r : rep.results) {
                py::dict e;
                e["inequality"] = r.name;
                e["applicable"] = r.applicable;
                e["max_ratio"] = r.max_ratio;
                if (!r.applicable) e["skip_reason"] = r.skip_reason;
                out.append(e);
            }
            return out;
        },
        py::arg("backend"), py::arg("trials") = 200, py::arg("seed") = 0,
        py::arg("band_modes") = 0, py::arg("s") = 0.6,
        py::arg("gn_q") = std::numeric_limits<double>::infinity());

    // Experiments run off the same JSON configs as the command-line tool;
    // returns the report as a JSON string.
    m.def(
        "run_experiment",
        [](const std::string& name, const std::string& config_json) {
            Json config = default_config(name);
            if (!config_json.empty()) config.merge_patch(Json::parse(config_json));
            Json body;
            if (name == "verify-matsumura") {
                body = report_to_json(verify_matsumura(parse_experiment_config(config)));
            } else if (name == "verify-diffusion") {
                body = report_to_json(verify_diffusion(parse_experiment_config(config)));
            } else if (name == "smalldata") {
                body = report_to_json(smalldata_global(parse_experiment_config(config)));
            } else if (name == "sweep") {
                const SweepReport rep = critical_sweep(parse_sweep_config(config));
                Json pts = Json::array();
                for (const auto& pt : rep.points) {
                    Json e = {{"p", pt.p}, {"q", pt.q}, {"eps", pt.eps}, {"class", pt.outcome}};
                    if (!std::isnan(pt.t_blowup)) e["t_blowup"] = pt.t_blowup;
                    pts.push_back(e);
                }
                body["points"] = pts;
            } else {
                throw std::invalid_argument(
                    "experiment must be verify-matsumura|verify-diffusion|smalldata|sweep");
            }
            body["config"] = config;
            return body.dump(2);
        },
        py::arg("name"), py::arg("config_json") = "");

    m.attr("__version__") = "0.1.0";
}
