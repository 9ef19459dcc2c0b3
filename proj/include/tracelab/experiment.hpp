#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tracelab/generators.hpp"

namespace tracelab {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::string_view kVersionStamp = "tracelab 0.1.0";

enum class ExperimentKind {
    cover,
    strong_cover,
    blanket,
    visits,
    return_probe,
    trace_hamilton,
    tau,
    bounds_sweep,
    counterexample,
    mixing,
};

std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(std::string_view tag);

/// Walk length: absolute steps, or multiplier * n log n (rounded up).
struct LengthRule {
    std::optional<std::size_t> steps;
    std::optional<double> multiplier;

    bool specified() const { return steps.has_value() || multiplier.has_value(); }
    std::size_t resolve(std::size_t n) const;
};

struct ExperimentParams {
    double epsilon = 0.1;
    double c = 16.0;        // probe/segment C, counterexample certification C, certify C
    double c_prime = 2.0;   // expansion parameter for trace certification
    double delta = 0.1;     // blanket time
    double xi = 0.25;       // mixing threshold
    std::size_t certify_samples = 0;  // trace_hamilton: sampled C-expander checks per set size (0 = skip)
};

struct BoundsGrid {
    std::vector<double> n;
    std::vector<double> d;
    std::vector<double> ratio;  // d / lambda
    std::vector<double> epsilon;
};

/// Threshold on a summary value addressed by a dotted path, e.g. "statistics.mean".
struct Expectation {
    std::string metric;
    std::optional<double> min;
    std::optional<double> max;
};

struct OutputSpec {
    std::string dir = "results";
    std::string prefix;  // defaults to the experiment tag
};

struct ExperimentConfig {
    int schema_version = kConfigSchemaVersion;
    ExperimentKind kind = ExperimentKind::cover;
    GenSpec graph;
    bool resample_graph = false;  // trace_hamilton / tau: new graph per trial
    LengthRule length;
    ExperimentParams params;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    bool worst_start = false;
    std::optional<std::uint32_t> start;
    std::optional<std::uint32_t> target;
    std::size_t budget = 0;  // step budget for cover runs; 0 = default
    BoundsGrid grid;
    std::vector<Expectation> checks;
    OutputSpec output;

    /// Throws FormatError on schema violations.
    void validate() const;
};

/// Strict parse: unknown fields, wrong types, and missing required fields
/// throw FormatError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& file);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Column-major-agnostic string table; the per-trial CSV ground truth.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws PreconditionError
    void write_csv(std::ostream& os) const;
    std::string to_csv() const;
    static Table parse_csv(std::istream& is);
};

/// Shortest round-trip text for a double, so re-parsing recovers it exactly.
std::string format_number(double x);

/// Statistics of one numeric column; rows where `censor_column` is "1" are
/// counted as censored and excluded.
nlohmann::json summarize(const Table& table, std::string_view metric, std::string_view censor_column = {});

struct ExperimentResult {
    ExperimentConfig config;
    Table trials;
    std::string metric;         // primary column
    std::string censor_column;  // may be empty
    nlohmann::json summary;     // {"statistics": ..., "derived": ...}
    double wall_seconds = 0.0;
    std::string version{kVersionStamp};

    nlohmann::json summary_document() const;
};

struct RunOptions {
    std::size_t workers = 1;
};

/// Validates the config, runs all trials, and assembles the result.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct PersistedFiles {
    std::filesystem::path trials_csv;
    std::filesystem::path summary_json;
};

PersistedFiles persist(const ExperimentResult& res, const std::filesystem::path& dir);

struct CheckOutcome {
    Expectation expectation;
    std::optional<double> value;
    bool passed = false;
};

std::vector<CheckOutcome> evaluate_checks(const ExperimentResult& res);

enum class PlotKind { histogram, series, tv_profile, cover_vs_n, success_vs_multiplier };

std::string_view to_string(PlotKind k);
PlotKind plot_kind_from_string(std::string_view tag);

/// Writes CSV curves (x, y [, ci_low, ci_high]) and returns the paths.
std::vector<std::filesystem::path> emit_plot_data(std::span<const ExperimentResult> results, PlotKind kind,
                                                  const std::filesystem::path& dir, std::string_view prefix);

}  // namespace tracelab
