#include "randgap/qcore.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace randgap {

namespace {

void check_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
    }
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

HermitianOperator::HermitianOperator(const Matrix& m) {
    check_square(m, "HermitianOperator");
    if (m.rows() > kMaxDim) {
        throw std::invalid_argument("HermitianOperator: dim exceeds " + std::to_string(kMaxDim));
    }
    if (max_abs(m - m.adjoint()) > kHermiticityTol) {
        throw std::invalid_argument("HermitianOperator: input is not Hermitian");
    }
    // (m + m')/2 makes conjugate symmetry exact in floating point.
    entries_ = (m + m.adjoint()) / 2.0;
}

HermitianOperator HermitianOperator::diagonal(const RealVector& d) {
    if (d.size() < 1 || d.size() > kMaxDim) {
        throw std::invalid_argument("HermitianOperator::diagonal: bad dimension");
    }
    Matrix m = Matrix::Zero(d.size(), d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) m(i, i) = d(i);
    return HermitianOperator(m);
}

HermitianOperator HermitianOperator::zero(int dim) {
    return HermitianOperator(Matrix::Zero(dim, dim));
}

bool HermitianOperator::is_diagonal() const {
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
            if (i != j && entries_(i, j) != Complex(0.0, 0.0)) return false;
        }
    }
    return true;
}

UnitaryMatrix::UnitaryMatrix(Matrix m) : entries_(std::move(m)) {
    check_square(entries_, "UnitaryMatrix");
    Matrix residual = entries_.adjoint() * entries_ - Matrix::Identity(entries_.rows(), entries_.cols());
    if (max_abs(residual) > kUnitarityTol) {
        throw std::invalid_argument("UnitaryMatrix: not unitary within tolerance");
    }
}

UnitaryMatrix UnitaryMatrix::identity(int dim) {
    return UnitaryMatrix(Matrix::Identity(dim, dim));
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(entries_.adjoint()); }

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& rhs) const {
    if (dim() != rhs.dim()) {
        throw std::invalid_argument("UnitaryMatrix: dimension mismatch in product");
    }
    return UnitaryMatrix(entries_ * rhs.entries_);
}

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("Spectrum: empty");
    if (values_.front() != 0.0) throw std::invalid_argument("Spectrum: values[0] must be 0");
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (values_[i] < values_[i - 1]) throw std::invalid_argument("Spectrum: not ascending");
    }
}

GapMatrix::GapMatrix(int dim, RealMatrix gaps) : dim_(dim), gaps_(std::move(gaps)) {
    if (gaps_.rows() != dim_ || gaps_.cols() != dim_) {
        throw std::invalid_argument("GapMatrix: shape mismatch");
    }
}

AdiabaticSchedule::AdiabaticSchedule(HermitianOperator h0_in, HermitianOperator hp_in,
                                     double anneal_time_in, int steps_in,
                                     std::function<double(double)> interpolation_in)
    : h0(std::move(h0_in)),
      hp(std::move(hp_in)),
      anneal_time(anneal_time_in),
      steps(steps_in),
      interpolation(std::move(interpolation_in)) {
    if (h0.dim() != hp.dim()) throw std::invalid_argument("AdiabaticSchedule: dim mismatch");
    if (!h0.is_diagonal()) throw std::invalid_argument("AdiabaticSchedule: h0 must be diagonal");
    if (!(anneal_time >= 0.0)) throw std::invalid_argument("AdiabaticSchedule: T must be >= 0");
    if (steps < 1) throw std::invalid_argument("AdiabaticSchedule: steps must be >= 1");
    if (!interpolation) interpolation = [](double s) { return s; };
}

HermitianOperator AdiabaticSchedule::hamiltonian_at(double s) const {
    double f = interpolation(s);
    return HermitianOperator((1.0 - f) * h0.entries() + f * hp.entries());
}

int recommended_steps(const HermitianOperator& h0, const HermitianOperator& hp, double anneal_time) {
    HermitianOperator diff(hp.entries() - h0.entries());
    double norm = eig_decompose(diff).eigenvalues.cwiseAbs().maxCoeff();
    double n = 256.0 * anneal_time * norm;
    return std::max(1, static_cast<int>(std::ceil(n)));
}

HermitianOperator gue_sample(int dim, Rng& rng) {
    if (dim < 2 || dim > kMaxDim) {
        throw std::invalid_argument("gue_sample: dim must be in [2, 16]");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            double re = normal(rng);
            double im = normal(rng);
            a(i, j) = Complex(re, im);
        }
    }
    return HermitianOperator((a + a.adjoint()) / 2.0);
}

EigenSystem eig_decompose(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.entries());
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_decompose: eigensolver failed");
    }
    return EigenSystem{solver.eigenvalues(), UnitaryMatrix(solver.eigenvectors())};
}

UnitaryMatrix evolve(const HermitianOperator& h, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("evolve: t must be finite");
    EigenSystem es = eig_decompose(h);
    const Matrix& v = es.eigenvectors.entries();
    CVector phases(h.dim());
    for (int k = 0; k < h.dim(); ++k) {
        phases(k) = std::exp(Complex(0.0, -es.eigenvalues(k) * t));
    }
    return UnitaryMatrix(v * phases.asDiagonal() * v.adjoint());
}

UnitaryMatrix timeordered_evolve(const AdiabaticSchedule& sched) {
    int n = sched.steps;
    double dt = sched.anneal_time / n;
    Matrix w = Matrix::Identity(sched.h0.dim(), sched.h0.dim());
    for (int k = 1; k <= n; ++k) {
        double s_mid = (k - 0.5) / n;
        UnitaryMatrix u = evolve(sched.hamiltonian_at(s_mid), dt);
        w = u.entries() * w;
    }
    return UnitaryMatrix(std::move(w));
}

Spectrum normalize_spectrum(std::vector<double> eigs) {
    if (eigs.empty()) throw std::invalid_argument("normalize_spectrum: empty list");
    std::sort(eigs.begin(), eigs.end());
    double base = eigs.front();
    for (double& v : eigs) v -= base;
    eigs.front() = 0.0;
    return Spectrum(std::move(eigs));
}

Spectrum spectrum_of(const HermitianOperator& h) {
    RealVector ev = eig_decompose(h).eigenvalues;
    return normalize_spectrum(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

GapMatrix spectrum_to_gaps(const Spectrum& s) {
    int n = s.dim();
    RealMatrix g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g(i, j) = s[i] - s[j];
        }
    }
    return GapMatrix(n, std::move(g));
}

} // namespace randgap
