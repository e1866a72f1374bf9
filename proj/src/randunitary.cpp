#include "randgap/randunitary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace randgap {

namespace {

void check_subspace_indices(int dim, const std::vector<int>& indices) {
    if (indices.empty() || static_cast<int>(indices.size()) > dim) {
        throw std::invalid_argument("subspace indices: need 1 <= count <= dim");
    }
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 0 || sorted[i] >= dim) {
            throw std::invalid_argument("subspace indices: out of range");
        }
        if (i > 0 && sorted[i] == sorted[i - 1]) {
            throw std::invalid_argument("subspace indices: duplicate index");
        }
    }
}

Matrix ginibre(int dim, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            a(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    return a;
}

// Canonical global phase: first entry (row-major) with |z| above threshold is
// rotated to the positive real axis.
Matrix canonical_phase(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            Complex z = m(i, j);
            if (std::abs(z) > 1e-8) {
                return m * (std::conj(z) / std::abs(z));
            }
        }
    }
    return m;
}

bool matrices_close(const Matrix& a, const Matrix& b, double tol) {
    return (a - b).cwiseAbs().maxCoeff() < tol;
}

std::vector<UnitaryMatrix> build_clifford_table() {
    Matrix h(2, 2), s(2, 2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    h << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
    s << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 1);

    std::vector<Matrix> table;
    table.push_back(canonical_phase(Matrix::Identity(2, 2)));
    std::size_t frontier = 0;
    while (frontier < table.size()) {
        Matrix base = table[frontier++];
        for (const Matrix* g : {&h, &s}) {
            Matrix candidate = canonical_phase(*g * base);
            bool known = false;
            for (const Matrix& m : table) {
                if (matrices_close(m, candidate, 1e-9)) {
                    known = true;
                    break;
                }
            }
            if (!known) table.push_back(candidate);
        }
    }
    if (table.size() != 24) {
        throw std::logic_error("clifford_qubit_table: closure produced " + std::to_string(table.size()) +
                               " elements, expected 24");
    }
    std::vector<UnitaryMatrix> out;
    out.reserve(table.size());
    for (Matrix& m : table) out.emplace_back(std::move(m));
    return out;
}

} // namespace

UnitarySampler UnitarySampler::haar(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("UnitarySampler: dim out of range");
    return UnitarySampler{Kind::Haar, dim, {}};
}

UnitarySampler UnitarySampler::euler_qubit_sampler() { return UnitarySampler{Kind::EulerQubit, 2, {}}; }

UnitarySampler UnitarySampler::clifford_qubit_sampler() { return UnitarySampler{Kind::CliffordQubit, 2, {}}; }

UnitarySampler UnitarySampler::subspace(int dim, std::vector<int> indices) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("UnitarySampler: dim out of range");
    check_subspace_indices(dim, indices);
    return UnitarySampler{Kind::SubspaceHaar, dim, std::move(indices)};
}

UnitaryMatrix UnitarySampler::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Haar:
            return haar_sample(dim, rng);
        case Kind::EulerQubit: {
            std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
            std::uniform_real_distribution<double> cosine(-1.0, 1.0);
            return euler_qubit(angle(rng), std::acos(cosine(rng)), angle(rng));
        }
        case Kind::CliffordQubit:
            return clifford_qubit_sample(rng);
        case Kind::SubspaceHaar:
            return subspace_haar(dim, subspace_indices, rng);
    }
    throw std::logic_error("UnitarySampler: unknown kind");
}

UnitaryMatrix haar_sample(int dim, Rng& rng) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("haar_sample: dim out of range");
    Matrix a = ginibre(dim, rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < dim; ++k) {
        Complex rkk = r(k, k);
        double mag = std::abs(rkk);
        Complex phase = mag > 0.0 ? rkk / mag : Complex(1.0, 0.0);
        q.col(k) *= phase;
    }
    return UnitaryMatrix(std::move(q));
}

UnitaryMatrix euler_qubit(double phi, double theta, double psi) {
    auto rz = [](double angle) {
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = std::exp(Complex(0.0, -angle / 2));
        m(1, 1) = std::exp(Complex(0.0, angle / 2));
        return m;
    };
    auto rx = [](double angle) {
        Matrix m(2, 2);
        m(0, 0) = m(1, 1) = std::cos(angle / 2);
        m(0, 1) = m(1, 0) = Complex(0.0, -std::sin(angle / 2));
        return m;
    };
    return UnitaryMatrix(rz(phi) * rx(theta) * rz(psi));
}

const std::vector<UnitaryMatrix>& clifford_qubit_table() {
    static const std::vector<UnitaryMatrix> table = build_clifford_table();
    return table;
}

UnitaryMatrix clifford_qubit_sample(Rng& rng) {
    const auto& table = clifford_qubit_table();
    std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
    return table[pick(rng)];
}

UnitaryMatrix subspace_haar(int dim, const std::vector<int>& subspace_indices, Rng& rng) {
    check_subspace_indices(dim, subspace_indices);
    int m = static_cast<int>(subspace_indices.size());
    UnitaryMatrix block = haar_sample(m, rng);
    Matrix u = Matrix::Identity(dim, dim);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            u(subspace_indices[static_cast<std::size_t>(i)], subspace_indices[static_cast<std::size_t>(j)]) =
                block.entries()(i, j);
        }
    }
    return UnitaryMatrix(std::move(u));
}

double haar_moment_value(const MomentMonomial& m, int dim) {
    double n = dim;
    switch (m.kind) {
        case MomentMonomial::Kind::AbsQuartic:
            return 2.0 / (n * (n + 1.0));
        case MomentMonomial::Kind::SameColumnPair:
        case MomentMonomial::Kind::SameRowPair:
            return 1.0 / (n * (n + 1.0));
        case MomentMonomial::Kind::DistinctPair:
            return 1.0 / (n * n - 1.0);
        case MomentMonomial::Kind::CrossTerm:
            return -1.0 / (n * (n * n - 1.0));
    }
    throw std::invalid_argument("haar_moment_value: unknown monomial kind");
}

namespace {

void validate_monomial(const MomentMonomial& m, int dim) {
    auto in_range = [dim](int i) { return i >= 0 && i < dim; };
    if (!in_range(m.a) || !in_range(m.b)) throw std::invalid_argument("monomial: index out of range");
    switch (m.kind) {
        case MomentMonomial::Kind::AbsQuartic:
            return;
        case MomentMonomial::Kind::SameColumnPair:
            if (!in_range(m.c) || m.a == m.c) throw std::invalid_argument("monomial: need a != c");
            return;
        case MomentMonomial::Kind::SameRowPair:
            if (!in_range(m.d) || m.b == m.d) throw std::invalid_argument("monomial: need b != d");
            return;
        case MomentMonomial::Kind::DistinctPair:
        case MomentMonomial::Kind::CrossTerm:
            if (!in_range(m.c) || !in_range(m.d) || m.a == m.c || m.b == m.d) {
                throw std::invalid_argument("monomial: need a != c and b != d");
            }
            return;
    }
    throw std::invalid_argument("monomial: unknown kind");
}

} // namespace

Complex evaluate_monomial(const MomentMonomial& m, const UnitaryMatrix& u) {
    validate_monomial(m, u.dim());
    const Matrix& e = u.entries();
    switch (m.kind) {
        case MomentMonomial::Kind::AbsQuartic: {
            double v = std::norm(e(m.a, m.b));
            return Complex(v * v, 0.0);
        }
        case MomentMonomial::Kind::SameColumnPair:
            return Complex(std::norm(e(m.a, m.b)) * std::norm(e(m.c, m.b)), 0.0);
        case MomentMonomial::Kind::SameRowPair:
            return Complex(std::norm(e(m.a, m.b)) * std::norm(e(m.a, m.d)), 0.0);
        case MomentMonomial::Kind::DistinctPair:
            return Complex(std::norm(e(m.a, m.b)) * std::norm(e(m.c, m.d)), 0.0);
        case MomentMonomial::Kind::CrossTerm:
            return e(m.a, m.b) * e(m.c, m.d) * std::conj(e(m.a, m.d)) * std::conj(e(m.c, m.b));
    }
    throw std::invalid_argument("evaluate_monomial: unknown kind");
}

double design_check(const UnitarySampler& sampler, const MomentMonomial& m, long n_samples, Rng& rng) {
    if (sampler.kind == UnitarySampler::Kind::CliffordQubit) {
        const auto& table = clifford_qubit_table();
        Complex sum(0.0, 0.0);
        for (const UnitaryMatrix& u : table) sum += evaluate_monomial(m, u);
        return std::abs(sum / static_cast<double>(table.size()) - haar_moment_value(m, sampler.dim));
    }
    return design_check([&sampler](Rng& r) { return sampler.sample(r); }, sampler.dim, m, n_samples, rng);
}

double design_check(const std::function<UnitaryMatrix(Rng&)>& source, int dim, const MomentMonomial& m,
                    long n_samples, Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("design_check: n_samples must be >= 1");
    validate_monomial(m, dim);
    Complex sum(0.0, 0.0);
    for (long i = 0; i < n_samples; ++i) {
        sum += evaluate_monomial(m, source(rng));
    }
    return std::abs(sum / static_cast<double>(n_samples) - haar_moment_value(m, dim));
}

} // namespace randgap
