#pragma once

// Declarative experiment manifests (YAML): generated from a validated
// configuration, parsed back with full re-validation, and executed by the same
// engine from the CLI and the server.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairbench/bench.hpp"
#include "fairbench/extfm.hpp"

namespace fairbench::manifest {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

struct Provenance {
    std::string tool_version;
    std::string created;
    std::string feature_model_checksum;
};

struct GenerateOptions {
    /// ISO-8601 timestamp; empty means the current UTC time.
    std::string created;
};

/// Selection is closed over ancestors and mandatory children first. Throws
/// ConstraintError carrying the violation messages when the result is invalid.
std::string generate_manifest(const extfm::FeatureModel& model, const extfm::Configuration& config,
                              const GenerateOptions& options = {});

struct ParsedManifest {
    int format_version = kFormatVersion;
    Provenance provenance;
    extfm::Configuration config;  ///< closed selection with every attribute value filled in
    bench::ExperimentSpec spec;
    std::vector<std::string> warnings;
};

/// Throws ParseError (syntax, schema, version; messages carry line/column) or
/// ConstraintError (feature-model violations, same messages as validation).
ParsedManifest parse_manifest(std::string_view text, const extfm::FeatureModel& model);

/// Configuration with every attribute of a selected feature set explicitly
/// (declared defaults fill the gaps).
extfm::Configuration with_defaults(const extfm::FeatureModel& model, const extfm::Configuration& config);

/// Builds the experiment from a configuration; validates first. Throws
/// ConstraintError.
bench::ExperimentSpec resolve(const extfm::FeatureModel& model, const extfm::Configuration& config);

/// {"selected": [ids], "attributes": {feature: {name: value}}}. Numbers and
/// number arrays are accepted as attribute values. Throws ParseError.
extfm::Configuration parse_configuration_document(std::string_view json_text);
std::string configuration_document(const extfm::Configuration& config);

/// One-line shell wrapper that runs `manifest_path` with the CLI ($FAIRBENCH
/// overrides the executable). Relative paths are taken from the script's directory.
std::string shell_wrapper(std::string_view manifest_path);

struct RunArtifacts {
    bench::QualityReport report;
    std::string report_csv;
    std::string result_document;
    std::string model_bytes;
    std::string best;  ///< "scaler/learner/mitigation"
};

/// Manifest stage: parse + optional seed override.
ParsedManifest load_manifest(std::string_view manifest_text, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Dataset stage: parse the CSV and bind it to the manifest's schema.
data::BoundDataset load_dataset(const ParsedManifest& manifest, std::string_view csv_text);

/// Engine stage: benchmark, pick the best combination and refit it.
RunArtifacts execute(const ParsedManifest& manifest, const data::BoundDataset& bound,
                     const bench::RunOptions& options = {});

/// All three stages; the single code path used by both the CLI and the server.
RunArtifacts run_manifest(std::string_view manifest_text, std::string_view csv_text,
                          std::optional<std::uint64_t> seed_override = std::nullopt,
                          const bench::RunOptions& options = {});

struct ComparisonRow {
    std::string column;
    double h = 0.0;
    double p = 1.0;
    bool significant = false;
};

/// Kruskal-Wallis over every shared `*_mean` column and `score`. NA cells are
/// skipped. Throws InvalidArgument when nothing is shared or a report has
/// fewer than two rows.
std::vector<ComparisonRow> compare_reports(std::string_view report_a, std::string_view report_b,
                                           double alpha = 0.05);
std::string format_comparison(const std::vector<ComparisonRow>& rows);

}  // namespace fairbench::manifest
