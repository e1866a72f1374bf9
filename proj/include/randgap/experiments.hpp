#pragma once

#include <cstdint>
#include <vector>

#include "randgap/qcore.hpp"
#include "randgap/randunitary.hpp"

namespace randgap {

enum class ExperimentKind { Gap, Adiabatic, Amplitude, AmplitudeSampling };

/// One binary measurement: outcome 0 means the register was found in |0>.
/// For Amplitude experiments `time` is the (even, integer) Grover power.
struct ExperimentRecord {
    int outcome;
    double time;
    ExperimentKind kind;
    std::uint64_t seed;
};

ExperimentRecord make_record(int outcome, double time, ExperimentKind kind, std::uint64_t seed);

/// |<0| U' e^{-iHt} U |0>|^2. Clamped into [0,1] against rounding only;
/// overshoot beyond 1e-12 is an internal-consistency failure.
double prob_zero_exact(const HermitianOperator& h, double t, const UnitaryMatrix& u);

/// Same with the evolution operator precomputed (hot loops).
double prob_zero_exact(const UnitaryMatrix& evolution, const UnitaryMatrix& u);

/// Haar-averaged outcome-0 probability: (2/(N+1)) (1 + (1/N) sum_{i>j} cos(D_ij t)).
double likelihood_haar(const GapMatrix& gaps, double t);

/// Sign-modified hypothesis likelihood, truncated into [0,1]. The sign term
/// penalises hypothesis vectors whose eigenvalues are out of order, which is
/// what lets a plain Gaussian model learn a sorted spectrum.
double likelihood_signed(const std::vector<double>& hypothesis_eigs, double t);

ExperimentRecord run_gap_experiment(const HermitianOperator& h, double t, const UnitarySampler& sampler,
                                    Rng& rng);

/// Adiabatic protocol: outcome ~ Bernoulli(|<0| U' W' e^{-i hp t} W U |0>|^2)
/// with W the time-ordered transport of the schedule and U drawn from the
/// (SubspaceHaar) sampler.
ExperimentRecord run_adiabatic_experiment(const AdiabaticSchedule& sched, double t,
                                          const UnitarySampler& sampler, Rng& rng);

/// Variant with W precomputed, for campaigns that fix the schedule.
ExperimentRecord run_adiabatic_experiment(const UnitaryMatrix& transport, const HermitianOperator& hp,
                                          double t, const UnitarySampler& sampler, Rng& rng);

/// Norm of the component of W|b> outside the target eigenspace of hp,
/// maximised over subspace basis states b. Decays as O(1/T) on a gapped path.
double adiabatic_leakage(const AdiabaticSchedule& sched, const std::vector<int>& subspace_indices);

/// Smallest spectral gap between the tracked eigenvalue block and the rest of
/// the spectrum along the interpolation path (grid-sampled). Zero means the
/// adiabatic theorem's precondition fails.
double min_path_gap(const AdiabaticSchedule& sched, int subspace_size, int grid_points = 64);

/// State A|0> = a |marked> + sqrt(1-a^2) |rest>, the amplitude-estimation target.
struct AmplitudeInstance {
    AmplitudeInstance(UnitaryMatrix prep_in, int marked_index_in);

    UnitaryMatrix prep;
    int marked_index;
    double a;
    double theta_a; // asin(a)

    int dim() const { return prep.dim(); }
};

/// Builds an instance with |<marked|A|0>| = a and an otherwise random prep.
AmplitudeInstance random_amplitude_instance(int dim, int marked_index, double a, Rng& rng);

/// Grover operator Q = -A X0 A' X; eigenphases on the rotation plane are +-2 theta_a.
UnitaryMatrix grover_operator(const AmplitudeInstance& inst);

/// Q^t for integer t >= 0 (binary exponentiation; no fractional queries).
UnitaryMatrix grover_power(const AmplitudeInstance& inst, long t);

/// Haar-conjugated power-of-Q measurement: outcome 0 with |<0|U' Q^t U|0>|^2.
ExperimentRecord run_amplitude_experiment(const AmplitudeInstance& inst, long t, Rng& rng);

/// Even-t likelihood for gap estimation on Q:
/// (2/(N+1)) (1 + (1/N) (C(N-2,2) + 2(N-2) cos(2 theta_a t) + cos(4 theta_a t))).
double likelihood_amplitude_even_t(double theta_a, long t, int dim);

/// Iterative phase estimation baseline, cos^2(2 theta_a t).
double likelihood_iterative_pe(double theta_a, double t);

/// Free-evolution sampling likelihood cos^2(Et) + sin^2(Et) a^2.
double likelihood_amplitude_sampling(double energy, double a, double t);

/// Its average over Et uniform on [0, 2pi): (a^2 + 1)/2.
double marginal_likelihood_amplitude(double a);

ExperimentRecord run_amplitude_sampling_experiment(double energy, double a, double t, Rng& rng);

} // namespace randgap
