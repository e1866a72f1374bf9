#include "randgap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace randgap {

namespace {

constexpr double kClampTol = 1e-12;

double clamp_probability(double p) {
    if (p < -kClampTol || p > 1.0 + kClampTol) {
        throw std::logic_error("probability overshoot beyond rounding tolerance: " + std::to_string(p));
    }
    return std::clamp(p, 0.0, 1.0);
}

int bernoulli(double p, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < p ? 0 : 1; // outcome 0 <-> measured |0>
}

// Ranks of the diagonal entries of a diagonal Hamiltonian in ascending order,
// matching eigenvalue ordering conventions of eig_decompose.
std::vector<int> diagonal_ranks(const HermitianOperator& h0) {
    int n = h0.dim();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return h0.entries()(a, a).real() < h0.entries()(b, b).real();
    });
    std::vector<int> rank(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
    return rank;
}

} // namespace

ExperimentRecord make_record(int outcome, double time, ExperimentKind kind, std::uint64_t seed) {
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("ExperimentRecord: outcome must be 0 or 1");
    if (kind == ExperimentKind::Amplitude) {
        double rounded = std::nearbyint(time);
        if (time != rounded || std::fmod(rounded, 2.0) != 0.0) {
            throw std::invalid_argument("ExperimentRecord: Amplitude kind requires an even integer time");
        }
    }
    return ExperimentRecord{outcome, time, kind, seed};
}

double prob_zero_exact(const HermitianOperator& h, double t, const UnitaryMatrix& u) {
    if (h.dim() != u.dim()) throw std::invalid_argument("prob_zero_exact: dimension mismatch");
    return prob_zero_exact(evolve(h, t), u);
}

double prob_zero_exact(const UnitaryMatrix& evolution, const UnitaryMatrix& u) {
    if (evolution.dim() != u.dim()) throw std::invalid_argument("prob_zero_exact: dimension mismatch");
    CVector psi = u.entries().col(0);
    Complex amp = psi.dot(evolution.entries() * psi); // <psi| E |psi>, dot conjugates the left factor
    return clamp_probability(std::norm(amp));
}

double likelihood_haar(const GapMatrix& gaps, double t) {
    int n = gaps.dim();
    double sum = 0.0;
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            sum += std::cos(gaps(i, j) * t);
        }
    }
    return clamp_probability(2.0 / (n + 1.0) * (1.0 + sum / n));
}

double likelihood_signed(const std::vector<double>& hypothesis_eigs, double t) {
    int n = static_cast<int>(hypothesis_eigs.size());
    if (n < 1) throw std::invalid_argument("likelihood_signed: empty hypothesis");
    double sum = 0.0;
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            double gap = hypothesis_eigs[static_cast<std::size_t>(i)] - hypothesis_eigs[static_cast<std::size_t>(j)];
            double sign = gap > 0.0 ? 1.0 : -1.0;
            sum += sign * std::cos(gap * t);
        }
    }
    double raw = 2.0 / (n + 1.0) * (1.0 + sum / n);
    return std::clamp(raw, 0.0, 1.0); // documented truncation; raw value can leave [0,1]
}

ExperimentRecord run_gap_experiment(const HermitianOperator& h, double t, const UnitarySampler& sampler,
                                    Rng& rng) {
    if (h.dim() != sampler.dim) throw std::invalid_argument("run_gap_experiment: dimension mismatch");
    std::uint64_t seed = rng();
    Rng local(seed);
    UnitaryMatrix u = sampler.sample(local);
    double p = prob_zero_exact(h, t, u);
    return make_record(bernoulli(p, local), t, ExperimentKind::Gap, seed);
}

ExperimentRecord run_adiabatic_experiment(const AdiabaticSchedule& sched, double t,
                                          const UnitarySampler& sampler, Rng& rng) {
    return run_adiabatic_experiment(timeordered_evolve(sched), sched.hp, t, sampler, rng);
}

ExperimentRecord run_adiabatic_experiment(const UnitaryMatrix& transport, const HermitianOperator& hp,
                                          double t, const UnitarySampler& sampler, Rng& rng) {
    if (sampler.kind != UnitarySampler::Kind::SubspaceHaar) {
        throw std::invalid_argument("run_adiabatic_experiment: sampler must be SubspaceHaar");
    }
    if (transport.dim() != hp.dim() || sampler.dim != hp.dim()) {
        throw std::invalid_argument("run_adiabatic_experiment: dimension mismatch");
    }
    std::uint64_t seed = rng();
    Rng local(seed);
    UnitaryMatrix u = sampler.sample(local);
    Matrix kernel = transport.entries().adjoint() * evolve(hp, t).entries() * transport.entries();
    CVector psi = u.entries().col(0);
    double p = std::clamp(std::norm(psi.dot(kernel * psi)), 0.0, 1.0);
    return make_record(bernoulli(p, local), t, ExperimentKind::Adiabatic, seed);
}

double adiabatic_leakage(const AdiabaticSchedule& sched, const std::vector<int>& subspace_indices) {
    if (subspace_indices.empty()) throw std::invalid_argument("adiabatic_leakage: empty subspace");
    int n = sched.h0.dim();
    UnitaryMatrix w = timeordered_evolve(sched);
    EigenSystem target = eig_decompose(sched.hp);
    std::vector<int> rank = diagonal_ranks(sched.h0);

    // Complement projector of the eigenspace the subspace states transport into.
    Matrix projector = Matrix::Identity(n, n);
    for (int b : subspace_indices) {
        if (b < 0 || b >= n) throw std::invalid_argument("adiabatic_leakage: index out of range");
        CVector v = target.eigenvectors.entries().col(rank[static_cast<std::size_t>(b)]);
        projector -= v * v.adjoint();
    }

    double worst = 0.0;
    for (int b : subspace_indices) {
        CVector transported = w.entries().col(b);
        worst = std::max(worst, (projector * transported).norm());
    }
    return worst;
}

double min_path_gap(const AdiabaticSchedule& sched, int subspace_size, int grid_points) {
    if (subspace_size < 1 || subspace_size > sched.h0.dim()) {
        throw std::invalid_argument("min_path_gap: bad subspace size");
    }
    if (subspace_size == sched.h0.dim()) return std::numeric_limits<double>::infinity();
    double smallest = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= grid_points; ++k) {
        double s = static_cast<double>(k) / grid_points;
        RealVector ev = eig_decompose(sched.hamiltonian_at(s)).eigenvalues;
        smallest = std::min(smallest, ev(subspace_size) - ev(subspace_size - 1));
    }
    return smallest;
}

AmplitudeInstance::AmplitudeInstance(UnitaryMatrix prep_in, int marked_index_in)
    : prep(std::move(prep_in)), marked_index(marked_index_in) {
    if (marked_index < 0 || marked_index >= prep.dim()) {
        throw std::invalid_argument("AmplitudeInstance: marked index out of range");
    }
    a = std::abs(prep.entries()(marked_index, 0));
    if (!(a > 0.0 && a < 1.0)) {
        throw std::invalid_argument("AmplitudeInstance: amplitude must lie strictly in (0, 1)");
    }
    theta_a = std::asin(a);
}

AmplitudeInstance random_amplitude_instance(int dim, int marked_index, double a, Rng& rng) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("random_amplitude_instance: dim out of range");
    if (marked_index < 0 || marked_index >= dim) {
        throw std::invalid_argument("random_amplitude_instance: marked index out of range");
    }
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("random_amplitude_instance: need 0 < a < 1");

    // First column: a on the marked index plus a random unit vector on the rest.
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector rest = CVector::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        if (i != marked_index) rest(i) = Complex(normal(rng), normal(rng));
    }
    rest.normalize();
    CVector first = std::sqrt(1.0 - a * a) * rest;
    first(marked_index) = a;

    Matrix m(dim, dim);
    m.col(0) = first;
    for (int j = 1; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) m(i, j) = Complex(normal(rng), normal(rng));
    }
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    // QR reproduces the first column only up to phase; undo it exactly.
    Complex overlap = q.col(0).dot(first);
    q.col(0) *= overlap / std::abs(overlap);
    q.col(0) = first; // remove residual rounding so the invariant holds bitwise
    return AmplitudeInstance(UnitaryMatrix(std::move(q)), marked_index);
}

UnitaryMatrix grover_operator(const AmplitudeInstance& inst) {
    int n = inst.dim();
    Matrix chi = Matrix::Identity(n, n);
    chi(inst.marked_index, inst.marked_index) = -1.0;
    Matrix chi0 = Matrix::Identity(n, n);
    chi0(0, 0) = -1.0;
    const Matrix& a = inst.prep.entries();
    return UnitaryMatrix(-(a * chi0 * a.adjoint() * chi));
}

UnitaryMatrix grover_power(const AmplitudeInstance& inst, long t) {
    if (t < 0) throw std::invalid_argument("grover_power: t must be >= 0");
    Matrix result = Matrix::Identity(inst.dim(), inst.dim());
    Matrix base = grover_operator(inst).entries();
    while (t > 0) {
        if (t & 1) result = base * result;
        base = base * base;
        t >>= 1;
    }
    return UnitaryMatrix(std::move(result));
}

ExperimentRecord run_amplitude_experiment(const AmplitudeInstance& inst, long t, Rng& rng) {
    if (t < 0 || t % 2 != 0) throw std::invalid_argument("run_amplitude_experiment: t must be even and >= 0");
    std::uint64_t seed = rng();
    Rng local(seed);
    UnitaryMatrix u = haar_sample(inst.dim(), local);
    double p = prob_zero_exact(grover_power(inst, t), u);
    return make_record(bernoulli(p, local), static_cast<double>(t), ExperimentKind::Amplitude, seed);
}

double likelihood_amplitude_even_t(double theta_a, long t, int dim) {
    if (t < 0 || t % 2 != 0) throw std::invalid_argument("likelihood_amplitude_even_t: t must be even and >= 0");
    if (dim < 2) throw std::invalid_argument("likelihood_amplitude_even_t: dim must be >= 2");
    double n = dim;
    double pairs_flat = (n - 2.0) * (n - 3.0) / 2.0; // C(N-2, 2), zero below N=4
    double td = static_cast<double>(t);
    double sum = pairs_flat + 2.0 * (n - 2.0) * std::cos(2.0 * theta_a * td) + std::cos(4.0 * theta_a * td);
    return clamp_probability(2.0 / (n + 1.0) * (1.0 + sum / n));
}

double likelihood_iterative_pe(double theta_a, double t) {
    double c = std::cos(2.0 * theta_a * t);
    return c * c;
}

double likelihood_amplitude_sampling(double energy, double a, double t) {
    if (a < 0.0 || a > 1.0) throw std::invalid_argument("likelihood_amplitude_sampling: need 0 <= a <= 1");
    double c = std::cos(energy * t);
    double s = std::sin(energy * t);
    return c * c + s * s * a * a;
}

double marginal_likelihood_amplitude(double a) {
    if (a < 0.0 || a > 1.0) throw std::invalid_argument("marginal_likelihood_amplitude: need 0 <= a <= 1");
    return (a * a + 1.0) / 2.0;
}

ExperimentRecord run_amplitude_sampling_experiment(double energy, double a, double t, Rng& rng) {
    std::uint64_t seed = rng();
    Rng local(seed);
    double p = likelihood_amplitude_sampling(energy, a, t);
    return make_record(bernoulli(p, local), t, ExperimentKind::AmplitudeSampling, seed);
}

} // namespace randgap
