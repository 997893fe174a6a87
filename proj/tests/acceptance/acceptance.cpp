// Acceptance suite: one numbered check per run-time criterion, each printing
// a single [PASS]/[FAIL] line (details indented). Run with no arguments for
// the full set, or pass criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "specwave/analysis.hpp"
#include "specwave/backend.hpp"
#include "specwave/evolution.hpp"
#include "specwave/experiments.hpp"
#include "specwave/io.hpp"
#include "specwave/kernels.hpp"
#include "specwave/rng.hpp"

using namespace specwave;

namespace {

const double kPi = 3.14159265358979323846;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

bool report(int num, const std::string& label, bool ok, const Timer& timer, double budget_s) {
    const double elapsed = timer.seconds();
    const bool in_budget = elapsed < budget_s;
    std::printf("[%s] criterion %d: %s (%.2f s, budget %.0f s)\n",
                ok && in_budget ? "PASS" : "FAIL", num, label.c_str(), elapsed, budget_s);
    if (!in_budget) std::printf("       runtime budget exceeded\n");
    return ok && in_budget;
}

bool criterion1() {
    Timer timer;
    bool ok = true;
    for (double t : {0.1, 1.0, 2.0, 10.0, 100.0}) {
        const double d0 = std::abs(eval_D(t, 0.0) - (1.0 - std::exp(-t)));
        const double dq = std::abs(eval_D(t, 0.25) - t * std::exp(-0.5 * t));
        if (d0 > 1e-12 || dq > 1e-12) {
            std::printf("       t=%g: |D(t,0)-closed| = %.2e, |D(t,1/4)-closed| = %.2e\n", t, d0,
                        dq);
            ok = false;
        }
    }
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = 1000.0 * i / 4000.0;
        worst = std::max(worst, std::abs(eval_D(t, 0.25 + 1e-9) - eval_D(t, 0.25 - 1e-9)));
    }
    std::printf("       branch continuity worst gap %.3e (limit 1e-8)\n", worst);
    if (worst >= 1e-8) ok = false;
    return report(1, "kernel closed forms and branch continuity", ok, timer, 1.0);
}

bool criterion2() {
    Timer timer;
    Rng rng(12345);
    const double h = 5e-5;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double t = 0.01 + (100.0 - 0.01) * rng.uniform();
        const double lam = 100.0 * rng.uniform();
        const double dpp =
            (eval_D(t + h, lam) - 2.0 * eval_D(t, lam) + eval_D(t - h, lam)) / (h * h);
        const double dp = (eval_D(t + h, lam) - eval_D(t - h, lam)) / (2.0 * h);
        worst = std::max(worst, std::abs(dpp + dp + lam * eval_D(t, lam)));
    }
    std::printf("       max finite-difference ODE residual %.3e (limit 1e-5)\n", worst);
    return report(2, "ODE identity via finite differences, 10^4 points", worst < 1e-5, timer, 5.0);
}

bool criterion3() {
    Timer timer;
    KernelScanGrid grid;  // defaults: t in (0,100] and lambda in [0,100], 2000 x 2000
    grid.diff_t_count = 2;
    grid.diff_lambda_count = 2;
    const KernelBoundsReport rep = scan_kernel_bounds(grid, 4);
    std::printf("       sup|D| = %.6f at (t=%.3f, lambda=%.3f); sup|dtD| = %.6f (limit 3)\n",
                rep.sup_D, rep.sup_D_t, rep.sup_D_lambda, rep.sup_dtD);
    return report(3, "Lemma 4.1 kernel bound scan, 2000x2000 grid",
                  rep.sup_D <= 3.0 && rep.sup_dtD <= 3.0, timer, 30.0);
}

bool criterion4() {
    Timer timer;
    KernelScanGrid grid;
    grid.t_count = 2;  // the D/dtD part is not under test here
    grid.lambda_count = 2;
    grid.diff_t_lo = 10.0;
    grid.diff_t_hi = 1e4;
    grid.diff_t_count = 25;
    grid.diff_lambda_count = 4000;
    const KernelBoundsReport rep = scan_kernel_bounds(grid, 4);

    std::vector<double> weighted;
    for (const auto& row : rep.diff_rows) weighted.push_back(row.weighted_sup);
    std::vector<double> sorted = weighted;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    double lo = weighted.front(), hi = weighted.front();
    for (double v : weighted) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool stable = true;
    for (double v : weighted) {
        if (std::abs(v - median) > 0.10 * median) stable = false;
    }
    std::printf("       <t> sup|diff symbol|: min %.4f, median %.4f, max %.4f over t in [10, 1e4]\n",
                lo, median, hi);
    std::printf("       certified constant %.4f; +-10%% stability from t = 10: %s\n",
                rep.diff_constant, stable ? "yes" : "NO");
    if (!stable) {
        // Where the plateau actually starts (the interior maximizer
        // lambda* ~ (3+sqrt(5))/t only enters [0,1/8) near t ~ 42).
        std::size_t first_stable = weighted.size();
        for (std::size_t s = 0; s < weighted.size(); ++s) {
            bool all_in = true;
            std::vector<double> tail(weighted.begin() + static_cast<long>(s), weighted.end());
            std::sort(tail.begin(), tail.end());
            const double med_tail = tail[tail.size() / 2];
            for (std::size_t i = s; i < weighted.size(); ++i) {
                if (std::abs(weighted[i] - med_tail) > 0.10 * med_tail) all_in = false;
            }
            if (all_in) {
                first_stable = s;
                break;
            }
        }
        if (first_stable < weighted.size()) {
            std::printf("       (stability does hold for t >= %.1f)\n",
                        rep.diff_rows[first_stable].t);
        }
    }
    return report(4, "Lemma 4.2 weighted diff-symbol scan, stability +-10% from t = 10", stable,
                  timer, 30.0);
}

ExperimentConfig matsumura_config() {
    ExperimentConfig cfg;
    cfg.backend.kind = "dirichlet-1d";
    cfg.backend.length = 200.0 * kPi;
    cfg.backend.modes = 4096;
    cfg.data.kind = "bump";
    cfg.data.amplitude = 1e-2;
    cfg.data.width = 2.0;
    cfg.q = 1.0;
    cfg.fit.t_lo = 10.0;
    cfg.fit.t_hi = 200.0;
    return cfg;
}

bool criterion5() {
    Timer timer;
    ExperimentConfig cfg = matsumura_config();
    cfg.tol.l2 = 0.05;
    cfg.tol.ut = 0.1;
    cfg.tol.h1dot = 0.1;
    cfg.tol.linf = 0.1;
    const ExperimentReport rep = verify_matsumura(cfg);
    for (const auto& c : rep.criteria) {
        std::printf("       %-6s fitted %.4f vs predicted %.4f (tol %.2f) %s\n", c.name.c_str(),
                    c.fitted, c.predicted, c.tolerance, c.pass ? "ok" : "FAIL");
    }
    return report(5, "Matsumura rates, d=1 Dirichlet, q=1 bump, window [10,200]", rep.pass, timer,
                  60.0);
}

bool criterion6() {
    Timer timer;
    ExperimentConfig cfg = matsumura_config();
    const ExperimentReport rep = verify_diffusion(cfg);
    const CriterionResult& c = rep.criterion("diff_l2");
    std::printf("       diff L2 fitted %.4f vs predicted %.4f (tol %.2f)\n", c.fitted, c.predicted,
                c.tolerance);
    const CriterionResult& ci = rep.criterion("diff_linf");
    std::printf("       diff Linf fitted %.4f vs predicted %.4f (tol %.2f)\n", ci.fitted,
                ci.predicted, ci.tolerance);
    return report(6, "diffusion phenomenon: heat-flow gap decays one power faster", rep.pass,
                  timer, 60.0);
}

bool criterion7() {
    Timer timer;
    ExperimentConfig cfg;
    cfg.backend.kind = "fractional-of-base";
    cfg.backend.nu = 1.0;
    cfg.backend.length = 2000.0 * kPi;
    cfg.backend.modes = 8192;
    cfg.data.width = 2.0;
    cfg.data.amplitude = 1e-2;
    cfg.q = 1.0;
    cfg.fit.t_lo = 10.0;
    cfg.fit.t_hi = 200.0;
    cfg.tol.l2 = 0.07;
    const ExperimentReport rep = verify_matsumura(cfg);
    const CriterionResult& c = rep.criterion("l2");
    std::printf("       alpha = %.3f; L2 fitted %.4f vs predicted %.4f (tol 0.07)\n",
                rep.value("alpha"), c.fitted, c.predicted);
    return report(7, "fractional backend nu=1 (alpha=1/2), q=1 L2 rate", c.pass, timer, 60.0);
}

bool criterion8() {
    Timer timer;
    InequalityOptions opts;
    opts.trials = 200;
    opts.seed = 0;
    opts.sobolev_s = 0.6;
    const InequalityScanReport rep =
        check_inequalities_levels(200.0 * kPi, {512, 1024, 2048, 4096}, opts, 0.25, 0.2);
    bool ok = true;
    for (const auto& [name, step] : rep.max_step) {
        if (name != "gagliardo-nirenberg" && name != "sobolev") continue;
        std::printf("       %-20s max level-to-level ratio change %.2f%% (limit 20%%)\n",
                    name.c_str(), 100.0 * step);
        if (step > 0.2) ok = false;
    }
    for (const auto& lvl : rep.levels) {
        std::printf("       N=%-5zu GN ratio %.4f, Sobolev ratio %.4f\n", lvl.modes,
                    lvl.results[1].max_ratio, lvl.results[0].max_ratio);
    }
    return report(8, "GN and Sobolev ratio stability across N in {512..4096}", ok, timer, 120.0);
}

bool criterion9() {
    Timer timer;
    ExperimentConfig cfg = matsumura_config();
    cfg.p = 4.0;
    cfg.form = "+|u|^{p-1}u";
    cfg.evolve.step = 0.05;
    cfg.evolve.horizon = 400.0;
    cfg.evolve.record_stride = 10;
    cfg.tol.x_ratio_cap = 50.0;
    cfg.tol.smalldata_exp = 0.07;
    const ExperimentReport rep = smalldata_global(cfg);
    if (rep.blowup) {
        std::printf("       unexpected blow-up at t = %.3f\n", rep.blowup->t);
        return report(9, "small-data global run", false, timer, 300.0);
    }
    std::printf("       I0 = %.5f, X = %.5f, X/I0 = %.3f (cap 50)\n", rep.value("I0"),
                rep.value("x_norm"), rep.value("x_ratio"));
    const CriterionResult& c = rep.criterion("l2");
    std::printf("       L2 fitted %.4f vs predicted %.4f (tol 0.07)\n", c.fitted, c.predicted);
    return report(9, "small-data global: bounded X-norm and linear L2 rate", rep.pass, timer,
                  300.0);
}

bool criterion10() {
    Timer timer;
    const BackendPtr b = build_matrix_backend({{1.0}}, {1.0}, std::nullopt);
    const Nonlinearity cubic = Nonlinearity::parse(3.0, "-|u|^{p-1}u");
    const double T = 5.0;

    // RK4 reference at h = 1e-4
    double u = 0.5, v = 0.0;
    {
        const double h = 1e-4;
        const auto rhs = [&](double uu, double vv) {
            return std::pair<double, double>{vv, -vv - uu + cubic(uu)};
        };
        const std::size_t n = static_cast<std::size_t>(std::llround(T / h));
        for (std::size_t i = 0; i < n; ++i) {
            const auto [k1u, k1v] = rhs(u, v);
            const auto [k2u, k2v] = rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
            const auto [k3u, k3v] = rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
            const auto [k4u, k4v] = rhs(u + h * k3u, v + h * k3v);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
    }
    const double ref = std::abs(u);

    auto run_err = [&](double h, StepperMode mode) {
        CauchyData data{b->make_grid_function({0.5}), b->make_grid_function({0.0})};
        EvolveOptions opts;
        opts.step = h;
        opts.horizon = T;
        opts.mode = mode;
        const EvolutionTrace tr = nonlinear_evolve(data, cubic, opts);
        return std::abs(tr.rows.back().l2 - ref);
    };

    bool ok = true;
    {
        const double e1 = run_err(0.1, StepperMode::ExponentialEuler);
        const double e2 = run_err(0.05, StepperMode::ExponentialEuler);
        const double r = e1 / e2;
        std::printf("       exponential Euler step-halving ratio %.3f (want [1.7, 2.3])\n", r);
        if (r < 1.7 || r > 2.3) ok = false;
    }
    {
        const double e1 = run_err(0.1, StepperMode::ExponentialMidpoint);
        const double e2 = run_err(0.05, StepperMode::ExponentialMidpoint);
        const double r = e1 / e2;
        std::printf("       exponential midpoint step-halving ratio %.3f (want [3.5, 4.5])\n", r);
        if (r < 3.5 || r > 4.5) ok = false;
    }
    return report(10, "integrator order on the single-mode cubic benchmark", ok, timer, 30.0);
}

#ifdef SPECWAVE_CLI_PATH
std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<missing " + path + ">";
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool run_cli(const std::string& args, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string cmd = std::string(SPECWAVE_CLI_PATH) + " " + args + " --out " + out_dir +
                            " > " + out_dir + "/stdout.txt 2>&1";
    return std::system(cmd.c_str()) == 0;
}
#endif

bool criterion11() {
    Timer timer;
#ifndef SPECWAVE_CLI_PATH
    std::printf("       CLI binary not built; cannot check end-to-end determinism\n");
    return report(11, "byte-identical reruns", false, timer, 300.0);
#else
    const std::string base =
        (std::filesystem::temp_directory_path() / "specwave_acceptance_11").string();
    std::filesystem::remove_all(base);

    struct Case {
        std::string name;
        std::string args;
        std::vector<std::string> files;
    };
    const std::vector<Case> cases = {
        {"verify-matsumura",
         "verify-matsumura --seed 0 --set backend.N=512 --set fit.t_lo=5 --set fit.t_hi=40",
         {"report.json"}},
        {"sweep",
         "sweep --seed 0 --set backend.N=256 --set evolve.T=20 "
         "--set sweep.p_values=[2.0,4.0] --set sweep.eps_values=[0.25]",
         {"phase.csv", "report.json"}},
        {"kernel-scan",
         "kernel-scan --seed 0 --set scan.t_count=40 --set scan.lambda_count=40 "
         "--set scan.diff_t_count=5 --set scan.diff_lambda_count=50",
         {"kernel_scan.csv", "kernel_bounds.json"}},
    };

    bool ok = true;
    for (const auto& c : cases) {
        const std::string d1 = base + "/" + c.name + "_a";
        const std::string d2 = base + "/" + c.name + "_b";
        const std::string d4 = base + "/" + c.name + "_t4";
        if (!run_cli(c.args + " --threads 1", d1) || !run_cli(c.args + " --threads 1", d2) ||
            !run_cli(c.args + " --threads 4", d4)) {
            std::printf("       %s: CLI run failed\n", c.name.c_str());
            ok = false;
            continue;
        }
        for (const auto& f : c.files) {
            const std::string a = read_bytes(d1 + "/" + f);
            const bool rerun_same = a == read_bytes(d2 + "/" + f);
            // json reports echo the thread count in the config, so the
            // cross-thread comparison uses the csv payloads
            bool threads_same = true;
            if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") {
                threads_same = a == read_bytes(d4 + "/" + f);
            }
            std::printf("       %s/%s: rerun identical %s%s\n", c.name.c_str(), f.c_str(),
                        rerun_same ? "yes" : "NO",
                        threads_same ? "" : ", thread-count changed bytes!");
            if (!rerun_same || !threads_same) ok = false;
        }
    }
    return report(11, "byte-identical CSV/JSON under rerun and thread count", ok, timer, 300.0);
#endif
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

    bool all_ok = true;
    for (int num : selected) {
        bool ok = false;
        switch (num) {
            case 1: ok = criterion1(); break;
            case 2: ok = criterion2(); break;
            case 3: ok = criterion3(); break;
            case 4: ok = criterion4(); break;
            case 5: ok = criterion5(); break;
            case 6: ok = criterion6(); break;
            case 7: ok = criterion7(); break;
            case 8: ok = criterion8(); break;
            case 9: ok = criterion9(); break;
            case 10: ok = criterion10(); break;
            case 11: ok = criterion11(); break;
            default:
                std::printf("[FAIL] criterion %d: unknown\n", num);
                ok = false;
        }
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
