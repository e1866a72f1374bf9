#include "randgap/turnpike.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace randgap {

namespace {

// Sorted multiset with tolerance-based membership, backed by a map from value
// to multiplicity. Erase/restore pairs drive the backtracking.
class ToleranceMultiset {
  public:
    ToleranceMultiset(const std::vector<double>& values, double tol) : tol_(tol) {
        for (double v : values) ++counts_[v];
        size_ = static_cast<long>(values.size());
    }

    bool empty() const { return size_ == 0; }

    double largest() const { return counts_.rbegin()->first; }

    // Finds the stored value closest to v within tolerance, or NaN.
    double find(double v) const {
        auto it = counts_.lower_bound(v - tol_);
        double best = std::numeric_limits<double>::quiet_NaN();
        double best_dist = tol_;
        for (; it != counts_.end() && it->first <= v + tol_; ++it) {
            double dist = std::abs(it->first - v);
            if (dist <= best_dist) {
                best = it->first;
                best_dist = dist;
            }
        }
        return best;
    }

    void erase(double stored_value) {
        auto it = counts_.find(stored_value);
        if (--(it->second) == 0) counts_.erase(it);
        --size_;
    }

    void insert(double value) {
        ++counts_[value];
        ++size_;
    }

  private:
    std::map<double, long> counts_;
    double tol_;
    long size_ = 0;
};

class TurnpikeSolver {
  public:
    TurnpikeSolver(const GapMultiset& gaps, const TurnpikeOptions& opts)
        : remaining_(gaps.values(), gaps.tolerance()), tol_(gaps.tolerance()), budget_(opts.node_budget) {
        width_ = remaining_.largest();
    }

    std::vector<std::vector<double>> solve() {
        remaining_.erase(width_);
        points_ = {0.0, width_};
        recurse();
        return solutions_;
    }

  private:
    bool try_place(double p, std::vector<double>& removed) {
        for (double q : points_) {
            double d = remaining_.find(std::abs(p - q));
            if (std::isnan(d)) {
                for (double r : removed) remaining_.insert(r);
                removed.clear();
                return false;
            }
            remaining_.erase(d);
            removed.push_back(d);
        }
        return true;
    }

    void recurse() {
        if (--budget_ < 0) throw NodeBudgetExceeded();
        if (remaining_.empty()) {
            std::vector<double> sorted = points_;
            std::sort(sorted.begin(), sorted.end());
            record(sorted);
            return;
        }
        double next = remaining_.largest();
        // The largest unexplained distance must reach one of the anchors:
        // candidate point at `next` (from 0) or `width - next` (from the top).
        // try_place consumes `next` itself along with the other distances.
        for (double candidate : {next, width_ - next}) {
            std::vector<double> removed;
            if (!try_place(candidate, removed)) continue;
            points_.push_back(candidate);
            recurse();
            points_.pop_back();
            for (double r : removed) remaining_.insert(r);
        }
    }

    void record(const std::vector<double>& sorted) {
        for (const auto& known : solutions_) {
            double dist = 0.0;
            for (std::size_t i = 0; i < sorted.size(); ++i) dist = std::max(dist, std::abs(known[i] - sorted[i]));
            if (dist < tol_) return;
        }
        solutions_.push_back(sorted);
    }

    ToleranceMultiset remaining_;
    double tol_;
    long budget_;
    double width_ = 0.0;
    std::vector<double> points_;
    std::vector<std::vector<double>> solutions_;
};

} // namespace

GapMultiset::GapMultiset(std::vector<double> values, double tolerance)
    : values_(std::move(values)), tolerance_(tolerance) {
    if (values_.empty()) throw std::invalid_argument("GapMultiset: empty");
    std::sort(values_.begin(), values_.end());
    if (values_.front() <= 0.0) throw std::invalid_argument("GapMultiset: gaps must be strictly positive");

    // N(N-1)/2 = m  =>  N = (1 + sqrt(1 + 8m)) / 2 must be an integer >= 2.
    long m = static_cast<long>(values_.size());
    long n = static_cast<long>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(m))) / 2.0));
    if (n < 2 || n * (n - 1) / 2 != m) {
        throw std::invalid_argument("GapMultiset: size " + std::to_string(m) + " is not triangular");
    }
    spectrum_size_ = static_cast<int>(n);

    if (tolerance_ < 0.0) tolerance_ = 1e-9 * values_.back();
}

std::vector<Spectrum> reconstruct_spectrum(const GapMultiset& gaps, const TurnpikeOptions& opts) {
    TurnpikeSolver solver(gaps, opts);
    std::vector<Spectrum> out;
    for (std::vector<double>& points : solver.solve()) {
        points.front() = 0.0; // anchored there already; make it exact
        out.push_back(Spectrum(std::move(points)));
    }
    return out;
}

bool is_unique_gap(const Spectrum& s, double tolerance) {
    std::vector<double> gaps;
    for (int i = 1; i < s.dim(); ++i) {
        for (int j = 0; j < i; ++j) gaps.push_back(s[i] - s[j]);
    }
    std::sort(gaps.begin(), gaps.end());
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        if (gaps[i] - gaps[i - 1] <= tolerance) return false;
    }
    return true;
}

Spectrum reflect(const Spectrum& s) {
    double top = s.values().back();
    std::vector<double> mirrored;
    mirrored.reserve(s.values().size());
    for (double v : s.values()) mirrored.push_back(top - v);
    return normalize_spectrum(std::move(mirrored));
}

} // namespace randgap
