#pragma once

#include <functional>
#include <vector>

#include "randgap/qcore.hpp"

namespace randgap {

/// Stateless descriptor of a random-unitary source. SubspaceHaar embeds an
/// independent Haar block on the listed computational-basis indices and acts
/// as the identity on the rest.
struct UnitarySampler {
    enum class Kind { Haar, EulerQubit, CliffordQubit, SubspaceHaar };

    Kind kind = Kind::Haar;
    int dim = 2;
    std::vector<int> subspace_indices; // SubspaceHaar only

    static UnitarySampler haar(int dim);
    static UnitarySampler euler_qubit_sampler();
    static UnitarySampler clifford_qubit_sampler();
    static UnitarySampler subspace(int dim, std::vector<int> indices);

    UnitaryMatrix sample(Rng& rng) const;
};

/// Exact Haar draw: QR of a Ginibre matrix with the R-diagonal phase fix
/// (Q scaled so diag(R) is positive real).
UnitaryMatrix haar_sample(int dim, Rng& rng);

/// R_z(phi) R_x(theta) R_z(psi) with R_a(angle) = exp(-i angle P_a / 2).
UnitaryMatrix euler_qubit(double phi, double theta, double psi);

/// The 24 single-qubit Cliffords, enumerated once from <H, S> closure with
/// global phase canonicalised (first nonzero entry positive real).
const std::vector<UnitaryMatrix>& clifford_qubit_table();

UnitaryMatrix clifford_qubit_sample(Rng& rng);

UnitaryMatrix subspace_haar(int dim, const std::vector<int>& subspace_indices, Rng& rng);

/// Degree-(2,2) monomials in matrix entries and conjugates whose Haar
/// averages the gap-estimation likelihood depends on.
///   AbsQuartic      |U_ab|^4
///   SameColumnPair  |U_ab|^2 |U_cb|^2          (a != c)
///   SameRowPair     |U_ab|^2 |U_ad|^2          (b != d)
///   DistinctPair    |U_ab|^2 |U_cd|^2          (a != c, b != d)
///   CrossTerm       U_ab U_cd conj(U_ad) conj(U_cb)  (a != c, b != d)
struct MomentMonomial {
    enum class Kind { AbsQuartic, SameColumnPair, SameRowPair, DistinctPair, CrossTerm };
    Kind kind = Kind::AbsQuartic;
    int a = 0, b = 0, c = 1, d = 1;
};

/// Closed-form Haar average of a cataloged monomial on U(dim).
double haar_moment_value(const MomentMonomial& m, int dim);

Complex evaluate_monomial(const MomentMonomial& m, const UnitaryMatrix& u);

/// |sampler average - analytic Haar average|. CliffordQubit samplers are
/// averaged exactly over the 24-element table; everything else is Monte Carlo
/// over n_samples draws.
double design_check(const UnitarySampler& sampler, const MomentMonomial& m, long n_samples, Rng& rng);

/// Same check against an arbitrary unitary source.
double design_check(const std::function<UnitaryMatrix(Rng&)>& source, int dim, const MomentMonomial& m,
                    long n_samples, Rng& rng);

} // namespace randgap
