#include "randgap/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace randgap {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdFloor = -1e-10;

// Draws x = mean + V sqrt(max(lambda, 0)) z from a (possibly semi-definite)
// Gaussian; the eigen factorization is reused across an update's many draws.
class GaussianSampler {
  public:
    explicit GaussianSampler(const GaussianPosterior& g) : mean_(g.mean()) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver(g.covariance());
        scaled_basis_ = solver.eigenvectors() * solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    RealVector draw(Rng& rng) {
        RealVector z(mean_.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal_(rng);
        return mean_ + scaled_basis_ * z;
    }

  private:
    RealVector mean_;
    RealMatrix scaled_basis_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::vector<double> normalized_ascending(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double base = v.front();
    for (double& x : v) x -= base;
    v.front() = 0.0;
    return v;
}

double absolute_deviation(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

} // namespace

GaussianPosterior::GaussianPosterior(RealVector mean, RealMatrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
    if (mean_.size() < 1) throw std::invalid_argument("GaussianPosterior: empty mean");
    if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size()) {
        throw std::invalid_argument("GaussianPosterior: covariance shape mismatch");
    }
    if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
        throw std::invalid_argument("GaussianPosterior: covariance not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(covariance_);
    if (solver.eigenvalues().minCoeff() < kPsdFloor) {
        throw std::invalid_argument("GaussianPosterior: covariance not positive semidefinite");
    }
}

void InferenceConfig::validate() const {
    if (accept_threshold < 1 || max_attempts_factor < 1 || max_experiments < 1 ||
        !(pgh_prefactor > 0.0) || !(t_max > 0.0)) {
        throw std::invalid_argument("InferenceConfig: all fields must be positive");
    }
}

PosteriorCollapseError::PosteriorCollapseError(double acceptance_rate_in, long attempts_in)
    : std::runtime_error("posterior collapse: acceptance rate " + std::to_string(acceptance_rate_in) +
                         " after " + std::to_string(attempts_in) + " draws"),
      acceptance_rate(acceptance_rate_in),
      attempts(attempts_in) {}

DegenerateOutcomeError::DegenerateOutcomeError(double probability_in)
    : std::runtime_error("degenerate outcome probability " + std::to_string(probability_in)),
      probability(probability_in) {}

GaussianPosterior rejection_filter_update(const GaussianPosterior& prior, int outcome,
                                          const std::function<double(const RealVector&)>& likelihood_zero,
                                          const InferenceConfig& cfg, Rng& rng) {
    cfg.validate();
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("rejection_filter_update: bad outcome");

    GaussianSampler sampler(prior);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const long threshold = cfg.accept_threshold;
    const long max_attempts = threshold * static_cast<long>(cfg.max_attempts_factor);

    long accepted = 0;
    long attempts = 0;
    RealVector mean = RealVector::Zero(prior.dim());
    RealMatrix m2 = RealMatrix::Zero(prior.dim(), prior.dim());

    while (accepted < threshold) {
        if (attempts >= max_attempts) {
            throw PosteriorCollapseError(static_cast<double>(accepted) / static_cast<double>(attempts),
                                         attempts);
        }
        ++attempts;
        RealVector x = sampler.draw(rng);
        double l0 = likelihood_zero(x);
        double l = outcome == 0 ? l0 : 1.0 - l0;
        if (l < 0.0 || l > 1.0) {
            throw std::invalid_argument("rejection_filter_update: likelihood outside [0, 1]");
        }
        if (uniform(rng) >= l) continue;

        ++accepted;
        RealVector delta = x - mean;
        mean += delta / static_cast<double>(accepted);
        m2 += delta * (x - mean).transpose();
    }

    RealMatrix cov = accepted > 1 ? RealMatrix(m2 / static_cast<double>(accepted - 1))
                                  : RealMatrix(RealMatrix::Zero(prior.dim(), prior.dim()));
    cov = ((cov + cov.transpose()) / 2.0).eval();
    return GaussianPosterior(std::move(mean), std::move(cov));
}

double uncertainty(const GaussianPosterior& posterior) {
    return std::sqrt(posterior.covariance().trace());
}

double pgh_time(const GaussianPosterior& posterior, double prefactor, double t_max) {
    if (!(prefactor > 0.0)) throw std::invalid_argument("pgh_time: prefactor must be positive");
    double sigma = uncertainty(posterior);
    if (sigma <= 0.0) return t_max;
    return std::min(prefactor / sigma, t_max);
}

double error_metric(const std::vector<double>& estimated_means, const Spectrum& truth) {
    if (static_cast<int>(estimated_means.size()) != truth.dim()) {
        throw std::invalid_argument("error_metric: length mismatch");
    }
    std::vector<double> estimate = normalized_ascending(estimated_means);
    double direct = absolute_deviation(truth.values(), estimate);

    double top = estimate.back();
    std::vector<double> mirrored(estimate.size());
    for (std::size_t i = 0; i < estimate.size(); ++i) mirrored[i] = top - estimate[i];
    mirrored = normalized_ascending(std::move(mirrored));
    double reflected = absolute_deviation(truth.values(), mirrored);

    return std::min(direct, reflected);
}

GaussianPosterior gue_prior(int dim, int n_calibration_draws, Rng& rng) {
    if (dim < 2) throw std::invalid_argument("gue_prior: dim must be >= 2");
    if (n_calibration_draws < 2) throw std::invalid_argument("gue_prior: need at least 2 draws");

    int params = dim - 1;
    RealVector mean = RealVector::Zero(params);
    RealVector m2 = RealVector::Zero(params);
    for (int n = 1; n <= n_calibration_draws; ++n) {
        Spectrum s = spectrum_of(gue_sample(dim, rng));
        for (int k = 0; k < params; ++k) {
            double x = s[k + 1];
            double delta = x - mean(k);
            mean(k) += delta / n;
            m2(k) += delta * (x - mean(k));
        }
    }
    RealMatrix cov = RealMatrix::Zero(params, params);
    for (int k = 0; k < params; ++k) cov(k, k) = m2(k) / (n_calibration_draws - 1);
    return GaussianPosterior(std::move(mean), std::move(cov));
}

RealMatrix fisher_information(const std::function<double(const RealVector&, double)>& likelihood_zero,
                              const RealVector& params, double t, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("fisher_information: step must be positive");
    int n = static_cast<int>(params.size());

    double p0 = likelihood_zero(params, t);
    if (p0 < 1e-8 || 1.0 - p0 < 1e-8) throw DegenerateOutcomeError(p0);

    RealVector grad(n);
    for (int k = 0; k < n; ++k) {
        RealVector hi = params, lo = params;
        hi(k) += step;
        lo(k) -= step;
        grad(k) = (likelihood_zero(hi, t) - likelihood_zero(lo, t)) / (2.0 * step);
    }
    // d P(1) = -d P(0), so I_kl = g_k g_l (1/P0 + 1/P1).
    double weight = 1.0 / p0 + 1.0 / (1.0 - p0);
    return weight * (grad * grad.transpose());
}

InferenceResult infer_spectrum(const SpectrumOracle& oracle, const GaussianPosterior& prior,
                               const InferenceConfig& cfg, Rng& rng) {
    cfg.validate();
    if (prior.dim() != oracle.hypothesis_dim - 1) {
        throw std::invalid_argument("infer_spectrum: prior dimension must be hypothesis_dim - 1");
    }

    GaussianPosterior posterior = prior;
    std::vector<InferenceStep> trace;
    trace.reserve(static_cast<std::size_t>(cfg.max_experiments));

    std::vector<double> eigs(static_cast<std::size_t>(oracle.hypothesis_dim));
    for (int i = 0; i < cfg.max_experiments; ++i) {
        double t = pgh_time(posterior, cfg.pgh_prefactor, cfg.t_max);
        int outcome = oracle.run(t, rng);
        auto likelihood = [&eigs, t](const RealVector& x) {
            eigs[0] = 0.0;
            for (Eigen::Index k = 0; k < x.size(); ++k) eigs[static_cast<std::size_t>(k) + 1] = x(k);
            return likelihood_signed(eigs, t);
        };
        try {
            posterior = rejection_filter_update(posterior, outcome, likelihood, cfg, rng);
        } catch (PosteriorCollapseError& e) {
            e.experiment_index = i;
            throw;
        }

        std::vector<double> estimate(static_cast<std::size_t>(oracle.hypothesis_dim), 0.0);
        for (int k = 0; k < posterior.dim(); ++k) estimate[static_cast<std::size_t>(k) + 1] = posterior.mean()(k);
        trace.push_back(InferenceStep{i, error_metric(estimate, oracle.reference), uncertainty(posterior), t,
                                      outcome});
    }
    return InferenceResult{std::move(posterior), std::move(trace)};
}

SpectrumOracle make_gap_oracle(const HermitianOperator& truth) {
    UnitarySampler sampler = UnitarySampler::haar(truth.dim());
    HermitianOperator h = truth;
    return SpectrumOracle{
        truth.dim(),
        [h, sampler](double t, Rng& rng) { return run_gap_experiment(h, t, sampler, rng).outcome; },
        spectrum_of(truth)};
}

SpectrumOracle make_adiabatic_oracle(const AdiabaticSchedule& sched, int subspace_size) {
    int n = sched.h0.dim();
    if (subspace_size < 2 || subspace_size > n) {
        throw std::invalid_argument("make_adiabatic_oracle: need 2 <= subspace size <= dim");
    }
    // Subspace indices: computational basis states carrying the lowest h0 levels.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return sched.h0.entries()(a, a).real() < sched.h0.entries()(b, b).real();
    });
    order.resize(static_cast<std::size_t>(subspace_size));
    UnitarySampler sampler = UnitarySampler::subspace(n, order);

    UnitaryMatrix transport = timeordered_evolve(sched);
    HermitianOperator hp = sched.hp;
    RealVector all = eig_decompose(hp).eigenvalues;
    std::vector<double> lowest(all.data(), all.data() + subspace_size);

    return SpectrumOracle{subspace_size,
                          [transport, hp, sampler](double t, Rng& rng) {
                              return run_adiabatic_experiment(transport, hp, t, sampler, rng).outcome;
                          },
                          normalize_spectrum(std::move(lowest))};
}

InferenceResult infer_spectrum(const HermitianOperator& truth, const InferenceConfig& cfg, Rng& rng) {
    GaussianPosterior prior = gue_prior(truth.dim(), 10000, rng);
    return infer_spectrum(make_gap_oracle(truth), prior, cfg, rng);
}

InferenceResult infer_spectrum_adiabatic(const AdiabaticSchedule& sched, int subspace_size,
                                         const InferenceConfig& cfg, Rng& rng) {
    GaussianPosterior prior = gue_prior(subspace_size, 10000, rng);
    return infer_spectrum(make_adiabatic_oracle(sched, subspace_size), prior, cfg, rng);
}

} // namespace randgap
