#pragma once

#include <stdexcept>
#include <vector>

#include "randgap/qcore.hpp"

namespace randgap {

/// Multiset of positive pairwise gaps |l_i - l_j|, i > j. Size must be a
/// triangular number N(N-1)/2; membership tests use an absolute tolerance
/// (gaps come from eigendecompositions, not integers).
class GapMultiset {
  public:
    /// tolerance < 0 selects the default 1e-9 * max gap.
    explicit GapMultiset(std::vector<double> values, double tolerance = -1.0);

    int spectrum_size() const { return spectrum_size_; }
    const std::vector<double>& values() const { return values_; } // sorted ascending
    double tolerance() const { return tolerance_; }

  private:
    std::vector<double> values_;
    double tolerance_;
    int spectrum_size_;
};

struct TurnpikeOptions {
    long node_budget = 10'000'000; // backtracking is worst-case exponential
};

class NodeBudgetExceeded : public std::runtime_error {
  public:
    NodeBudgetExceeded() : std::runtime_error("turnpike: node budget exceeded") {}
};

/// All spectra (lambda_1 = 0 form) whose pairwise gaps match the multiset,
/// deduplicated within tolerance. Empty result means the gap data is
/// inconsistent with any spectrum. Classic backtracking: anchor 0 and the
/// largest gap, then repeatedly place the largest unexplained distance at
/// either end.
std::vector<Spectrum> reconstruct_spectrum(const GapMultiset& gaps, const TurnpikeOptions& opts = {});

/// True iff all N(N-1)/2 pairwise gaps are pairwise distinct beyond the
/// tolerance; the hypothesis under which reconstruction is unique up to
/// reflection.
bool is_unique_gap(const Spectrum& s, double tolerance);

/// Reflection about the midpoint: l -> max - l, re-sorted, re-normalized.
/// Preserves the gap multiset exactly.
Spectrum reflect(const Spectrum& s);

} // namespace randgap
