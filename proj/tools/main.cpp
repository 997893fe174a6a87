#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "specwave/io.hpp"
#include "specwave/kernels.hpp"
#include "specwave/parallel.hpp"

namespace {

using specwave::Json;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    long long seed = -1;
    int threads = 0;
    bool exploratory = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
    cmd->add_option("--set", args.overrides, "override config keys, e.g. --set evolve.h=0.025")
        ->take_all();
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--threads", args.threads, "worker threads (SPECWAVE_THREADS fallback)");
    cmd->add_flag("--exploratory", args.exploratory, "run outside the admissible (p,q,alpha) range");
}

Json resolve_config(const std::string& subcommand, const CommonArgs& args) {
    Json config = specwave::default_config(subcommand);
    if (!args.config_path.empty()) {
        config.merge_patch(specwave::load_json(args.config_path));
    }
    for (const std::string& ov : args.overrides) {
        specwave::apply_override(config, ov);
        std::cout << "override: " << ov << "\n";
    }
    if (args.seed >= 0) config["seed"] = args.seed;
    if (args.threads > 0) config["threads"] = args.threads;
    if (args.exploratory) config["exploratory"] = true;
    return config;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    std::filesystem::create_directories(args.out_dir);
    return (std::filesystem::path(args.out_dir) / name).string();
}

int report_exit(const specwave::ExperimentReport& report) {
    for (const auto& c : report.criteria) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << report.experiment << "/" << c.name
                  << ": fitted " << c.fitted << " vs " << c.predicted << " (tol " << c.tolerance
                  << ")\n";
    }
    for (const auto& note : report.notes) std::cout << "note: " << note << "\n";
    return report.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral damped-wave toolkit"};
    app.require_subcommand(1);

    std::map<std::string, CommonArgs> args;
    const std::vector<std::string> subcommands = {
        "kernel-scan", "linear",  "heat",      "nonlinear", "verify-matsumura",
        "verify-diffusion", "check-inequalities", "smalldata", "sweep"};
    const std::map<std::string, std::string> descriptions = {
        {"kernel-scan", "tabulate the multiplier kernels over a (t, lambda) grid"},
        {"linear", "exact linear damped-wave flow, norm trace"},
        {"heat", "heat comparison flow, norm trace"},
        {"nonlinear", "exponential-integrator nonlinear run"},
        {"verify-matsumura", "fit linear decay rates against predictions"},
        {"verify-diffusion", "fit the decay of the gap to the heat flow"},
        {"check-inequalities", "random-trial functional inequality ratios across refinements"},
        {"smalldata", "small-data global run with weighted X-norm check"},
        {"sweep", "phase classification over (p, q, eps)"}};
    for (const auto& name : subcommands) {
        add_common(app.add_subcommand(name, descriptions.at(name)), args[name]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const CommonArgs& common = args[name];

    try {
        const Json config = resolve_config(name, common);

        if (name == "kernel-scan") {
            const specwave::KernelScanGrid grid = specwave::parse_scan_grid(config);
            const int threads = specwave::resolve_threads(
                static_cast<int>(config.value("threads", 0)));
            const auto report = specwave::scan_kernel_bounds(grid, threads);
            specwave::write_kernel_scan_csv(out_path(common, "kernel_scan.csv"), grid);
            specwave::write_report_json(out_path(common, "kernel_bounds.json"),
                                        specwave::kernel_bounds_to_json(report), config,
                                        common.overrides);
            std::cout << "sup |D| = " << report.sup_D << ", sup |dtD| = " << report.sup_dtD
                      << ", diff constant = " << report.diff_constant << "\n";
            return 0;
        }

        if (name == "linear" || name == "heat") {
            const specwave::ExperimentConfig cfg = specwave::parse_experiment_config(config);
            const specwave::BackendPtr backend = specwave::build_backend(cfg.backend);
            const specwave::CauchyData data = specwave::make_data(backend, cfg.data, cfg.seed);
            const std::vector<double> times = specwave::parse_times(config);
            specwave::TraceOptions topts;
            topts.lq_q = cfg.q;
            const specwave::EvolutionTrace trace =
                name == "linear" ? specwave::linear_solve(data, times, topts)
                                 : specwave::heat_solve(data.u0, times, topts);
            specwave::write_trace_csv(out_path(common, "trace.csv"), trace);
            specwave::write_report_json(out_path(common, "report.json"),
                                        specwave::trace_summary_json(trace), config,
                                        common.overrides);
            std::cout << "trace rows: " << trace.rows.size() << "\n";
            return 0;
        }

        if (name == "nonlinear") {
            const specwave::ExperimentConfig cfg = specwave::parse_experiment_config(config);
            const specwave::BackendPtr backend = specwave::build_backend(cfg.backend);
            const specwave::CauchyData data = specwave::make_data(backend, cfg.data, cfg.seed);
            const specwave::Nonlinearity F = specwave::Nonlinearity::parse(cfg.p, cfg.form);
            specwave::EvolveOptions eopts = cfg.evolve;
            eopts.lq_q = cfg.q;
            const specwave::EvolutionTrace trace = specwave::nonlinear_evolve(data, F, eopts);
            specwave::write_trace_csv(out_path(common, "trace.csv"), trace);
            if (!trace.snapshots.empty()) {
                specwave::write_snapshots_csv(out_path(common, "snapshots.csv"), trace);
            }
            specwave::write_report_json(out_path(common, "report.json"),
                                        specwave::trace_summary_json(trace), config,
                                        common.overrides);
            if (trace.blowup) {
                std::cout << "blow-up at t = " << trace.blowup->t << " (" << trace.blowup->reason
                          << ")\n";
            } else {
                std::cout << "reached T = " << trace.rows.back().t << "\n";
            }
            return 0;
        }

        if (name == "verify-matsumura" || name == "verify-diffusion" || name == "smalldata") {
            const specwave::ExperimentConfig cfg = specwave::parse_experiment_config(config);
            specwave::ExperimentReport report;
            if (name == "verify-matsumura") report = specwave::verify_matsumura(cfg);
            else if (name == "verify-diffusion") report = specwave::verify_diffusion(cfg);
            else report = specwave::smalldata_global(cfg);
            specwave::write_report_json(out_path(common, "report.json"),
                                        specwave::report_to_json(report), config,
                                        common.overrides);
            return report_exit(report);
        }

        if (name == "check-inequalities") {
            const specwave::InequalityRunSpec spec = specwave::parse_inequality_spec(config);
            specwave::InequalityOptions opts = spec.options;
            opts.seed = config.value("seed", 0);
            const auto report = specwave::check_inequalities_levels(
                spec.length, spec.levels, opts, spec.band_fraction, spec.tolerance);
            specwave::write_report_json(out_path(common, "inequalities.json"),
                                        specwave::inequality_scan_to_json(report), config,
                                        common.overrides);
            for (const auto& [ineq, step] : report.max_step) {
                std::cout << (step <= report.tolerance ? "[PASS] " : "[FAIL] ") << ineq
                          << ": max level step " << step * 100.0 << "%\n";
            }
            return report.stable ? 0 : 3;
        }

        if (name == "sweep") {
            const specwave::SweepConfig cfg = specwave::parse_sweep_config(config);
            const specwave::SweepReport report = specwave::critical_sweep(cfg);
            specwave::write_phase_csv(out_path(common, "phase.csv"), report);
            Json body;
            body["points"] = report.points.size();
            body["horizon"] = report.horizon;
            body["form"] = report.form;
            specwave::write_report_json(out_path(common, "report.json"), body, config,
                                        common.overrides);
            for (const auto& pt : report.points) {
                std::cout << "p=" << pt.p << " q=" << pt.q << " eps=" << pt.eps << " -> "
                          << pt.outcome << "\n";
            }
            return 0;
        }

        std::cerr << "unknown subcommand: " << name << "\n";
        return 2;
    } catch (const specwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
