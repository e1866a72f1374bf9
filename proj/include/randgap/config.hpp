#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "randgap/inference.hpp"

namespace randgap {

/// Campaign description shared by the CLI and the programmatic entry points.
/// Loaded from flat key=value config files; every key has a CLI flag override
/// and RANDGAP_SEED is the lowest-precedence seed source.
struct CampaignConfig {
    enum class Suite { Gaps, Amplitude, ControlMap, Turnpike, DesignCheck };

    Suite suite = Suite::Gaps;
    int dim = 2;
    int n_instances = 50;   // paper-scale is 1000; desk-scale default
    int n_experiments = 200;
    InferenceConfig inference;
    std::uint64_t seed = 0;
    std::string output_path;
    int jobs = 0; // 0 = hardware concurrency

    // Gaps suite, adiabatic variant (enabled when subspace > 0).
    int subspace = 0;
    double anneal_time = 32.0;
    int anneal_steps = 0; // 0 = auto
    double coupling = 0.3;

    // Amplitude suite: true theta_a drawn uniformly from this range, which
    // sits inside the identifiable window (0, pi/8) of the even-t likelihood.
    double theta_min = 0.12;
    double theta_max = 0.35;

    // ControlMap suite.
    std::string mode = "miscalibration"; // diagonal | triangular | two-by-two | miscalibration
    std::vector<double> deltas = {0.0, 1e-5, 1e-4, 1e-3, 1e-2};

    void validate() const; // throws invalid_argument naming the offending field
};

CampaignConfig::Suite parse_suite(const std::string& name);
std::string suite_name(CampaignConfig::Suite suite);

/// Flat key=value lines, '#' comments, blank lines ignored.
std::map<std::string, std::string> parse_key_value_file(const std::string& path);

/// Applies parsed keys onto a config; unknown keys throw invalid_argument.
void apply_key_values(CampaignConfig& cfg, const std::map<std::string, std::string>& kv);

} // namespace randgap
