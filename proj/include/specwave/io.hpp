#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "specwave/analysis.hpp"
#include "specwave/evolution.hpp"
#include "specwave/experiments.hpp"

namespace specwave {

/// Configuration problems (malformed file, unknown key, constraint
/// violation). The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

using Json = nlohmann::json;

// -- file loading -----------------------------------------------------------

/// Square matrix from a CSV of rows or a raw little-endian double dump
/// (row-major; the side is inferred from the byte count).
std::vector<std::vector<double>> load_matrix(const std::string& path);
std::vector<double> load_vector(const std::string& path);

Json load_json(const std::string& path);

// -- config parsing ---------------------------------------------------------

/// Defaults for a subcommand, as a json object the file/overrides merge onto.
Json default_config(const std::string& subcommand);

/// Dotted-path overrides ("evolve.h=0.025", "q=1.5"); values parsed as JSON
/// scalars with a string fallback.
void apply_override(Json& config, const std::string& assignment);

/// Rejects unknown keys anywhere in the tree and checks every constraint the
/// typed structs need; errors name the offending key.
ExperimentConfig parse_experiment_config(const Json& config);
SweepConfig parse_sweep_config(const Json& config);
BackendSpec parse_backend_spec(const Json& spec);
DataSpec parse_data_spec(const Json& spec);
KernelScanGrid parse_scan_grid(const Json& config);

struct InequalityRunSpec {
    double length = 200.0 * 3.14159265358979323846;
    std::vector<std::size_t> levels{512, 1024, 2048, 4096};
    InequalityOptions options;
    double band_fraction = 0.25;
    double tolerance = 0.2;
};
InequalityRunSpec parse_inequality_spec(const Json& config);

std::vector<double> parse_times(const Json& config);

// -- emission ---------------------------------------------------------------

/// 17-significant-digit decimal text; identical inputs give identical bytes.
std::string format_double(double v);

void write_trace_csv(const std::string& path, const EvolutionTrace& trace);
void write_snapshots_csv(const std::string& path, const EvolutionTrace& trace);
void write_phase_csv(const std::string& path, const SweepReport& report);
void write_kernel_scan_csv(const std::string& path, const KernelScanGrid& grid);

Json report_to_json(const ExperimentReport& report);
Json kernel_bounds_to_json(const KernelBoundsReport& report);
Json inequality_scan_to_json(const InequalityScanReport& report);
Json trace_summary_json(const EvolutionTrace& trace);

/// Writes with a schema_version field and a config echo; rejects non-finite
/// numbers outside blow-up records.
void write_report_json(const std::string& path, const Json& body, const Json& config_echo,
                       const std::vector<std::string>& overrides);

}  // namespace specwave
