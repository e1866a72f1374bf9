#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "randgap/experiments.hpp"
#include "randgap/qcore.hpp"

namespace randgap {

/// Gaussian model over the free parameters (for spectra: the N-1 eigenvalues
/// above the pinned lambda_1 = 0).
class GaussianPosterior {
  public:
    GaussianPosterior(RealVector mean, RealMatrix covariance);

    int dim() const { return static_cast<int>(mean_.size()); }
    const RealVector& mean() const { return mean_; }
    const RealMatrix& covariance() const { return covariance_; }

  private:
    RealVector mean_;
    RealMatrix covariance_;
};

struct InferenceConfig {
    int accept_threshold = 10000;     // accepted samples per update
    int max_attempts_factor = 1000;   // draw cap = factor * threshold
    double pgh_prefactor = 0.5;       // t = prefactor / sigma
    int max_experiments = 200;
    std::uint64_t rng_seed = 0;
    double t_max = 1e6;

    void validate() const;
};

/// Raised when rejection sampling cannot reach the acceptance threshold;
/// signals that the model assigns almost no probability to the observed data.
class PosteriorCollapseError : public std::runtime_error {
  public:
    PosteriorCollapseError(double acceptance_rate_in, long attempts_in);

    double acceptance_rate;
    long attempts;
    std::optional<int> experiment_index; // filled in by infer_spectrum
};

/// Raised by fisher_information when an outcome probability sits on the boundary.
class DegenerateOutcomeError : public std::runtime_error {
  public:
    explicit DegenerateOutcomeError(double probability);
    double probability;
};

/// One Bayesian update: draw from the prior, accept with probability
/// L(outcome | hypothesis), refit a Gaussian to the accepted samples with a
/// single-pass streaming mean/covariance. `likelihood_zero` maps a hypothesis
/// to L(0 | hypothesis); L(1 | .) = 1 - L(0 | .).
GaussianPosterior rejection_filter_update(const GaussianPosterior& prior, int outcome,
                                          const std::function<double(const RealVector&)>& likelihood_zero,
                                          const InferenceConfig& cfg, Rng& rng);

/// sqrt(Tr(covariance)).
double uncertainty(const GaussianPosterior& posterior);

/// Particle guess heuristic, t = prefactor / uncertainty, capped at t_max.
double pgh_time(const GaussianPosterior& posterior, double prefactor, double t_max = 1e6);

/// Inference error against the true spectrum. Both vectors are brought to the
/// sorted, lambda_1 = 0 form; the mirror-reflected estimate is scored too and
/// the smaller total deviation wins, so the reflection degeneracy inherent to
/// gap data is not penalised.
double error_metric(const std::vector<double>& estimated_means, const Spectrum& truth);

/// Monte Carlo calibrated initial prior: mean and per-eigenvalue variances of
/// sorted, normalized GUE spectra (eigenvalues 2..N), diagonal covariance.
GaussianPosterior gue_prior(int dim, int n_calibration_draws, Rng& rng);

/// Single-experiment binary-outcome Fisher matrix by central differences:
/// I_kl = sum_d dP(d)/dx_k dP(d)/dx_l / P(d).
RealMatrix fisher_information(const std::function<double(const RealVector&, double)>& likelihood_zero,
                              const RealVector& params, double t, double step);

struct InferenceStep {
    int experiment_index;
    double error;
    double uncertainty;
    double t;
    int outcome;
};

struct InferenceResult {
    GaussianPosterior posterior;
    std::vector<InferenceStep> trace;
};

/// Binds an experiment simulator to the reference spectrum used for the error
/// trace. `hypothesis_dim` counts eigenvalues including the pinned zero.
struct SpectrumOracle {
    int hypothesis_dim;
    std::function<int(double t, Rng&)> run;
    Spectrum reference;
};

/// Full randomized-gap-estimation loop: PGH time, experiment, rejection-filter
/// update with the signed likelihood, error/uncertainty trace per step.
InferenceResult infer_spectrum(const SpectrumOracle& oracle, const GaussianPosterior& prior,
                               const InferenceConfig& cfg, Rng& rng);

/// Convenience: full-space Haar-randomized experiments on a known Hamiltonian,
/// GUE-calibrated prior.
InferenceResult infer_spectrum(const HermitianOperator& truth, const InferenceConfig& cfg, Rng& rng);

/// Alg.-2 variant: adiabatically confined randomization on the lowest
/// subspace_size eigenvalues of sched.hp.
InferenceResult infer_spectrum_adiabatic(const AdiabaticSchedule& sched, int subspace_size,
                                         const InferenceConfig& cfg, Rng& rng);

SpectrumOracle make_gap_oracle(const HermitianOperator& truth);
SpectrumOracle make_adiabatic_oracle(const AdiabaticSchedule& sched, int subspace_size);

} // namespace randgap
