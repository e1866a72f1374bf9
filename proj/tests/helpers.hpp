#pragma once

#include <cmath>
#include <vector>

#include "randgap/qcore.hpp"

namespace randgap::testing {

/// Truncated Taylor series for exp(-iHt); independent oracle for evolve().
/// Valid for ||Ht|| well inside the radius where 40 terms converge.
inline Matrix taylor_expm(const HermitianOperator& h, double t, int terms = 40) {
    int n = h.dim();
    Matrix a = Complex(0.0, -t) * h.entries();
    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= terms; ++k) {
        term = (term * a / static_cast<double>(k)).eval();
        result += term;
    }
    return result;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// Mean and standard error of a sample.
struct MeanWithError {
    double mean;
    double standard_error;
};

inline MeanWithError mean_with_error(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

} // namespace randgap::testing
