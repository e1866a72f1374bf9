#pragma once

#include <iosfwd>
#include <utility>

#include "randgap/config.hpp"
#include "randgap/controlmap.hpp"

namespace randgap {

/// Per-instance outcome of a gaps campaign. Collapsed instances keep no trace
/// (the posterior died at collapse_step) and are excluded from medians.
struct GapsInstanceResult {
    int instance = 0;
    bool collapsed = false;
    int collapse_step = -1;
    bool degenerate_path = false;
    double initial_error = 0.0;
    std::vector<InferenceStep> trace;
};

struct StepAggregate {
    int step = 0;
    double t = 0.0;
    double error = 0.0;
    double uncertainty = 0.0;
    int contributors = 0;
};

struct GapsCampaignResult {
    std::vector<GapsInstanceResult> instances;
    std::vector<StepAggregate> medians;
    int collapse_count = 0;
};

GapsCampaignResult run_gaps_campaign_compute(const CampaignConfig& cfg);
void write_gaps_csv(const GapsCampaignResult& result, const CampaignConfig& cfg, std::ostream& out);
void run_gaps_campaign(const CampaignConfig& cfg);

struct AmplitudeStep {
    int step = 0;
    double t = 0.0;
    int outcome = 0;
    double error = 0.0;
    double uncertainty = 0.0;
    double cum_time = 0.0;
    double baseline_error = 0.0;
    double baseline_cum_time = 0.0;
};

struct AmplitudeInstanceResult {
    int instance = 0;
    double theta_true = 0.0;
    bool collapsed = false;
    int collapse_step = -1;
    std::vector<AmplitudeStep> trace;
};

struct AmplitudeStepAggregate {
    int step = 0;
    double error = 0.0;
    double cum_time = 0.0;
    double baseline_error = 0.0;
    double baseline_cum_time = 0.0;
    int contributors = 0;
};

struct AmplitudeCampaignResult {
    std::vector<AmplitudeInstanceResult> instances;
    std::vector<AmplitudeStepAggregate> medians;
    int collapse_count = 0;
};

AmplitudeCampaignResult run_amplitude_campaign_compute(const CampaignConfig& cfg);
void write_amplitude_csv(const AmplitudeCampaignResult& result, const CampaignConfig& cfg, std::ostream& out);
void run_amplitude_campaign(const CampaignConfig& cfg);

struct RecoveryRow {
    int instance = 0;
    double error = 0.0;    // max-entry deviation from the sampled map
    double residual = 0.0; // recover_2x2 consistency residual (0 for other modes)
};

struct ControlMapCampaignResult {
    std::string mode;
    std::vector<RecoveryRow> recovery_rows;
    std::vector<std::pair<double, std::vector<MiscalibrationPoint>>> miscalibration; // (delta, trace)
};

ControlMapCampaignResult run_controlmap_campaign_compute(const CampaignConfig& cfg);
void write_controlmap_csv(const ControlMapCampaignResult& result, const CampaignConfig& cfg,
                          std::ostream& out);
void run_controlmap_campaign(const CampaignConfig& cfg);

} // namespace randgap
