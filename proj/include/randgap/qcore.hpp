#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "randgap/rng.hpp"

namespace randgap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Everything here targets small dense systems; the methods degrade with
/// dimension, so the cap is part of the contract.
constexpr int kMaxDim = 16;

constexpr double kUnitarityTol = 1e-10;
constexpr double kHermiticityTol = 1e-10;

/// Dense Hermitian operator in dimensionless energy units (hbar = 1).
/// Conjugate symmetry is made exact on construction by averaging with the
/// adjoint, so entries(i,j) == conj(entries(j,i)) bitwise.
class HermitianOperator {
  public:
    explicit HermitianOperator(const Matrix& m);
    static HermitianOperator diagonal(const RealVector& d);
    static HermitianOperator zero(int dim);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    bool is_diagonal() const;

  private:
    Matrix entries_;
};

/// Unitary matrix; ||U'U - I||_max <= 1e-10 is validated on every construction.
class UnitaryMatrix {
  public:
    explicit UnitaryMatrix(Matrix m);
    static UnitaryMatrix identity(int dim);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    UnitaryMatrix adjoint() const;
    UnitaryMatrix operator*(const UnitaryMatrix& rhs) const;

  private:
    Matrix entries_;
};

/// Sorted eigenvalues pinned at values[0] = 0 (gaps are invariant under the
/// shift, and only gaps are observable).
class Spectrum {
  public:
    explicit Spectrum(std::vector<double> values);

    int dim() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

  private:
    std::vector<double> values_;
};

/// Antisymmetric matrix of pairwise eigenvalue differences, gaps(i,j) = l_i - l_j.
class GapMatrix {
  public:
    GapMatrix(int dim, RealMatrix gaps);

    int dim() const { return dim_; }
    const RealMatrix& gaps() const { return gaps_; }
    double operator()(int i, int j) const { return gaps_(i, j); }

  private:
    int dim_;
    RealMatrix gaps_;
};

/// Interpolation H(s) = (1 - f(s)) h0 + f(s) hp, integrated over total time T.
/// h0 must be diagonal in the computational basis.
struct AdiabaticSchedule {
    AdiabaticSchedule(HermitianOperator h0_in, HermitianOperator hp_in, double anneal_time_in,
                      int steps_in, std::function<double(double)> interpolation_in = {});

    HermitianOperator h0;
    HermitianOperator hp;
    double anneal_time;
    int steps;
    std::function<double(double)> interpolation; // identity unless overridden

    HermitianOperator hamiltonian_at(double s) const;
};

/// Product-formula step count tuned so discretisation error stays well below
/// the adiabatic error being studied: 256 steps per unit of T * ||hp - h0||.
int recommended_steps(const HermitianOperator& h0, const HermitianOperator& hp, double anneal_time);

struct EigenSystem {
    RealVector eigenvalues;   // ascending
    UnitaryMatrix eigenvectors;
};

/// GUE draw: H = (A + A')/2 with A having i.i.d. N(0,1) real and imaginary
/// parts, giving off-diagonal variance 1/2 per component and diagonal
/// variance 1. The same convention feeds prior calibration.
HermitianOperator gue_sample(int dim, Rng& rng);

EigenSystem eig_decompose(const HermitianOperator& h);

/// exp(-i H t) through the spectral decomposition.
UnitaryMatrix evolve(const HermitianOperator& h, double t);

/// Midpoint product formula for the time-ordered exponential of the schedule;
/// second-order accurate in 1/steps.
UnitaryMatrix timeordered_evolve(const AdiabaticSchedule& sched);

Spectrum normalize_spectrum(std::vector<double> eigs);

Spectrum spectrum_of(const HermitianOperator& h);

GapMatrix spectrum_to_gaps(const Spectrum& s);

} // namespace randgap
