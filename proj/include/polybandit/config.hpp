#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "polybandit/harness.hpp"

namespace polybandit {

/// Parsed experiment file. `experiment.theta` stays empty until
/// resolve_theta() when the file asks for "uniform01".
struct ExperimentConfig
{
    explicit ExperimentConfig(Experiment exp) : experiment(std::move(exp)) {}

    Experiment experiment;
    std::string polyhedron_source;  ///< e.g. "hypercube(10)" or the file path
    bool random_theta = false;
    double min_gap = 0;
    bool lower_bound = false;
    std::string csv_name = "traces.csv";
    std::string summary_name = "summary.json";
    std::string echo;  ///< the input document, re-serialized
};

/// {"A": [[...], ...], "b": [...]}
Polyhedron<double> parse_polyhedron(const std::string& json_text);
Polyhedron<double> load_polyhedron(const std::filesystem::path& path);

/// Relative polyhedron file paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Draws theta uniformly on [0, 1]^N from the experiment seed when requested,
/// redrawing until the vertex gap exceeds max(min_gap, tolerance). Explicit
/// theta is checked for a positive gap instead.
void resolve_theta(ExperimentConfig& config);

/// Config echo, per-policy mean/std arrays and, when requested, the
/// lower-bound reference curve.
void write_summary_json(std::ostream& out, const ExperimentConfig& config, const std::vector<PolicySummary>& summary);

}  // namespace polybandit
