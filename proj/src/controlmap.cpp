#include "randgap/controlmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace randgap {

namespace {

std::string setting_to_string(const ControlSetting& c) {
    std::string s = "[";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    return s + "]";
}

RealVector apply_map(const ControlMap& g, const ControlSetting& c) {
    if (static_cast<int>(c.size()) != g.dim()) {
        throw std::invalid_argument("control setting length does not match map dimension");
    }
    Eigen::Map<const RealVector> cv(c.data(), static_cast<Eigen::Index>(c.size()));
    return g.entries() * cv;
}

double checked_sqrt(double v, double slack, const char* what) {
    if (v < -slack) {
        throw InfeasibleEnergiesError(std::string(what) + ": negative value under square root (" +
                                      std::to_string(v) + ")");
    }
    return std::sqrt(std::max(v, 0.0));
}

} // namespace

ControlMap::ControlMap(RealMatrix entries, MapStructure structure)
    : entries_(std::move(entries)), structure_(structure) {
    int d = static_cast<int>(entries_.rows());
    if (entries_.cols() != d || (d != 2 && d != 3)) {
        throw std::invalid_argument("ControlMap: must be square with dim 2 or 3");
    }
    if (structure_ == MapStructure::Diagonal || structure_ == MapStructure::UpperTriangular) {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < i; ++j) {
                if (entries_(i, j) != 0.0) {
                    throw std::invalid_argument("ControlMap: entries below the diagonal must be exactly zero");
                }
            }
        }
    }
    if (structure_ == MapStructure::Diagonal) {
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                if (entries_(i, j) != 0.0) {
                    throw std::invalid_argument("ControlMap: diagonal structure requires zero off-diagonal");
                }
            }
        }
    }
    if (structure_ == MapStructure::UpperTriangular) {
        for (int i = 0; i < d; ++i) {
            if (entries_(i, i) < 0.0) {
                throw std::invalid_argument("ControlMap: upper-triangular structure requires nonnegative diagonal");
            }
        }
    }
}

void SettingTable::set(ControlSetting setting, double value) {
    for (auto& row : rows_) {
        if (row.first == setting) {
            row.second = value;
            return;
        }
    }
    rows_.emplace_back(std::move(setting), value);
}

double SettingTable::at(const ControlSetting& setting) const {
    for (const auto& row : rows_) {
        if (row.first == setting) return row.second;
    }
    throw std::invalid_argument("SettingTable: missing setting " + setting_to_string(setting));
}

bool SettingTable::contains(const ControlSetting& setting) const {
    for (const auto& row : rows_) {
        if (row.first == setting) return true;
    }
    return false;
}

HermitianOperator hamiltonian_from_controls(const ControlMap& g, const ControlSetting& c) {
    RealVector x = apply_map(g, c);
    Matrix h = Matrix::Zero(2, 2);
    auto add_x = [&h](double w) { h(0, 1) += w; h(1, 0) += w; };
    auto add_y = [&h](double w) { h(0, 1) += Complex(0.0, -w); h(1, 0) += Complex(0.0, w); };
    auto add_z = [&h](double w) { h(0, 0) += w; h(1, 1) -= w; };
    if (g.dim() == 2) {
        add_x(x(0));
        add_z(x(1));
    } else {
        add_x(x(0));
        add_y(x(1));
        add_z(x(2));
    }
    return HermitianOperator(h);
}

double energy_magnitude(const ControlMap& g, const ControlSetting& c) {
    return apply_map(g, c).norm();
}

SettingTable forward_energies(const ControlMap& g, const std::vector<ControlSetting>& settings) {
    SettingTable table;
    for (const ControlSetting& c : settings) table.set(c, energy_magnitude(g, c));
    return table;
}

ControlMap recover_diagonal(const SettingTable& energies, int dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("recover_diagonal: dim must be 2 or 3");
    RealMatrix g = RealMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        ControlSetting unit(static_cast<std::size_t>(dim), 0.0);
        unit[static_cast<std::size_t>(k)] = 1.0;
        g(k, k) = energies.at(unit);
    }
    return ControlMap(std::move(g), MapStructure::Diagonal);
}

ControlMap recover_upper_triangular(const SettingTable& energies) {
    double e1 = energies.at({1, 0, 0});
    double e2 = energies.at({0, 1, 0});
    double e3 = energies.at({0, 0, 1});
    double e110 = energies.at({1, 1, 0});
    double e101 = energies.at({1, 0, 1});
    double e011 = energies.at({0, 1, 1});
    for (double e : {e1, e2, e3, e110, e101, e011}) {
        if (!(e > 0.0)) throw std::invalid_argument("recover_upper_triangular: energies must be positive");
    }
    double scale = std::max({e1, e2, e3, e110, e101, e011});
    double slack = 1e-9 * scale * scale;

    RealMatrix g = RealMatrix::Zero(3, 3);
    g(0, 0) = e1;
    if (g(0, 0) <= 0.0) throw InfeasibleEnergiesError("recover_upper_triangular: G00 must be positive");
    // E^2([1,1,0]) - E^2([0,1,0]) = G00^2 + 2 G00 G01
    g(0, 1) = (e110 * e110 - e2 * e2 - g(0, 0) * g(0, 0)) / (2.0 * g(0, 0));
    g(1, 1) = checked_sqrt(e2 * e2 - g(0, 1) * g(0, 1), slack, "G11");
    // E^2([1,0,1]) - E^2([0,0,1]) = G00^2 + 2 G00 G02
    g(0, 2) = (e101 * e101 - e3 * e3 - g(0, 0) * g(0, 0)) / (2.0 * g(0, 0));
    // E^2([0,1,1]) - E^2([0,0,1]) = G01^2 + 2 G01 G02 + G11^2 + 2 G11 G12
    if (g(1, 1) <= 0.0) throw InfeasibleEnergiesError("recover_upper_triangular: G11 vanished");
    g(1, 2) = (e011 * e011 - e3 * e3 - g(0, 1) * g(0, 1) - 2.0 * g(0, 1) * g(0, 2) - g(1, 1) * g(1, 1)) /
              (2.0 * g(1, 1));
    g(2, 2) = checked_sqrt(e3 * e3 - g(0, 2) * g(0, 2) - g(1, 2) * g(1, 2), slack, "G22");
    return ControlMap(std::move(g), MapStructure::UpperTriangular);
}

RealMatrix gram(const ControlMap& g) { return g.entries().transpose() * g.entries(); }

Recovery2x2 recover_2x2(const SettingTable& energies, const SettingTable& amplitudes, SignHint hint,
                        double tolerance) {
    double e10 = energies.at({1, 0});
    double e01 = energies.at({0, 1});
    double e11 = energies.at({1, 1});
    for (double e : {e10, e01, e11}) {
        if (!(e > 0.0)) throw std::invalid_argument("recover_2x2: energies must be positive");
    }
    double a10 = amplitudes.at({1, 0});
    double a01 = amplitudes.at({0, 1});
    double a11 = amplitudes.at({1, 1});
    for (double a : {a10, a01, a11}) {
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("recover_2x2: amplitudes must lie in [0, 1]");
    }

    double m10 = a10 * e10; // |G10|
    double m11 = a01 * e01; // |G11|
    double target = a11 * e11; // |G10 + G11|

    // Relative sign of the bottom row from the [1,1] amplitude.
    double scale = std::max({e10, e01, e11, 1.0});
    double same = std::abs(m10 + m11 - target);
    double opposite = std::abs(std::abs(m10 - m11) - target);
    if (std::min(same, opposite) > tolerance * scale) {
        throw InconsistentAmplitudesError("recover_2x2: no sign assignment matches |a([1,1])| (deviations " +
                                          std::to_string(same) + ", " + std::to_string(opposite) + ")");
    }
    double relative = same <= opposite ? 1.0 : -1.0;

    // Global flip of the bottom row comes from the hint.
    double g10 = m10, g11 = relative * m11;
    double hinted = hint.entry == SignHint::Entry::G10 ? g10 : g11;
    double wanted = hint.positive ? 1.0 : -1.0;
    if (std::abs(hinted) > tolerance * scale) {
        if (hinted * wanted < 0.0) {
            g10 = -g10;
            g11 = -g11;
        }
    } else {
        // Hinted entry is compatible with zero; pin the other one nonnegative.
        double other = hint.entry == SignHint::Entry::G10 ? g11 : g10;
        if (other < 0.0) {
            g10 = -g10;
            g11 = -g11;
        }
    }

    double slack = tolerance * scale * scale;
    double g00 = checked_sqrt(e10 * e10 - g10 * g10, slack, "G00");
    double g01_mag = checked_sqrt(e01 * e01 - g11 * g11, slack, "G01");

    // E^2([1,1]) fixes the relative sign of the top row; G00 >= 0 by convention.
    double s = e11 * e11 - (g10 + g11) * (g10 + g11);
    double plus = (g00 + g01_mag) * (g00 + g01_mag);
    double minus = (g00 - g01_mag) * (g00 - g01_mag);
    double g01 = std::abs(plus - s) <= std::abs(minus - s) ? g01_mag : -g01_mag;
    double residual = std::min(std::abs(plus - s), std::abs(minus - s));

    RealMatrix g(2, 2);
    g << g00, g01, g10, g11;
    return Recovery2x2{ControlMap(std::move(g), MapStructure::Full), residual};
}

namespace {

const std::vector<ControlSetting> kTwoLevelSettings = {{1, 0}, {0, 1}, {1, 1}};

// Gap prior for 2 ||G c|| with standard-normal map entries, calibrated once
// per setting by Monte Carlo.
GaussianPosterior gap_prior_for_setting(const ControlSetting& c, Rng& rng) {
    const int draws = 4000;
    double mean = 0.0, m2 = 0.0;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int n = 1; n <= draws; ++n) {
        RealMatrix g(2, 2);
        g << normal(rng), normal(rng), normal(rng), normal(rng);
        Eigen::Map<const RealVector> cv(c.data(), static_cast<Eigen::Index>(c.size()));
        double gap = 2.0 * (g * cv).norm();
        double delta = gap - mean;
        mean += delta / n;
        m2 += delta * (gap - mean);
    }
    RealVector mu(1);
    mu(0) = mean;
    RealMatrix cov(1, 1);
    cov(0, 0) = m2 / (draws - 1);
    return GaussianPosterior(mu, cov);
}

struct MapInstance {
    ControlMap map;
    std::vector<double> true_energies;
};

// Generic 2x2 map with G00 >= 0 (the recovery representative) and no
// near-degenerate energies or amplitudes, so recovery is well conditioned.
ControlMap draw_generic_map(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        RealMatrix g(2, 2);
        g << normal(rng), normal(rng), normal(rng), normal(rng);
        if (g(0, 0) < 0.0) g.row(0) = -g.row(0);
        ControlMap map(g, MapStructure::Full);
        bool ok = g(0, 0) > 0.3;
        double m10 = std::abs(g(1, 0)), m11 = std::abs(g(1, 1));
        ok = ok && std::abs((m10 + m11) - std::abs(m10 - m11)) > 0.1;
        for (const ControlSetting& c : kTwoLevelSettings) {
            double e = energy_magnitude(map, c);
            ok = ok && e > 0.3;
            if (e > 0.0) {
                double a = std::abs(apply_map(map, c)(1)) / e;
                ok = ok && a > 0.05 && a < 0.95;
            }
        }
        if (ok) return map;
    }
    throw std::runtime_error("draw_generic_map: could not draw a well-conditioned map");
}

} // namespace

std::vector<MiscalibrationPoint> miscalibration_study(double delta, const MiscalibrationConfig& cfg,
                                                      Rng& rng) {
    if (delta < 0.0 || delta > 1e-2) {
        throw std::invalid_argument("miscalibration_study: delta must lie in [0, 1e-2]");
    }
    InferenceConfig inf = cfg.inference;
    inf.max_experiments = std::max(inf.max_experiments, cfg.n_experiments);

    // Shared prior calibration, one stream independent of the instances.
    Rng prior_rng(derive_seed(rng(), 0x9d2c5680));
    std::vector<GaussianPosterior> priors;
    priors.reserve(kTwoLevelSettings.size());
    for (const ControlSetting& c : kTwoLevelSettings) priors.push_back(gap_prior_for_setting(c, prior_rng));

    std::vector<int> checkpoints;
    for (int round = cfg.checkpoint_stride; round <= cfg.n_experiments; round += cfg.checkpoint_stride) {
        checkpoints.push_back(round);
    }
    if (checkpoints.empty() || checkpoints.back() != cfg.n_experiments) checkpoints.push_back(cfg.n_experiments);

    std::vector<std::vector<double>> errors_at(checkpoints.size());

    std::uint64_t base_seed = rng();
    for (int instance = 0; instance < cfg.n_instances; ++instance) {
        Rng inst_rng(derive_seed(base_seed, static_cast<std::uint64_t>(instance)));
        ControlMap g_true = draw_generic_map(inst_rng);

        // The trusted simulator the learner can interrogate carries the
        // miscalibration; zero-mean Gaussian entries with variance delta.
        RealMatrix perturbation = RealMatrix::Zero(2, 2);
        std::normal_distribution<double> miscal(0.0, std::sqrt(delta));
        if (delta > 0.0) {
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) perturbation(i, j) = miscal(inst_rng);
            }
        }
        ControlMap g_ref(g_true.entries() + perturbation, MapStructure::Full);

        std::vector<GaussianPosterior> posteriors = priors;
        std::vector<bool> frozen(kTwoLevelSettings.size(), false);
        std::vector<HermitianOperator> hams;
        for (const ControlSetting& c : kTwoLevelSettings) hams.push_back(hamiltonian_from_controls(g_ref, c));
        UnitarySampler sampler = UnitarySampler::haar(2);

        std::size_t next_checkpoint = 0;
        for (int round = 1; round <= cfg.n_experiments; ++round) {
            for (std::size_t k = 0; k < kTwoLevelSettings.size(); ++k) {
                if (frozen[k]) continue;
                double t = pgh_time(posteriors[k], inf.pgh_prefactor, inf.t_max);
                int outcome = run_gap_experiment(hams[k], t, sampler, inst_rng).outcome;
                auto likelihood = [t](const RealVector& x) {
                    return likelihood_signed({0.0, x(0)}, t);
                };
                try {
                    posteriors[k] = rejection_filter_update(posteriors[k], outcome, likelihood, inf, inst_rng);
                } catch (const PosteriorCollapseError&) {
                    frozen[k] = true; // keep the last posterior; the instance stays in the medians
                }
            }
            if (next_checkpoint < checkpoints.size() && round == checkpoints[next_checkpoint]) {
                SettingTable energies, amps;
                for (std::size_t k = 0; k < kTwoLevelSettings.size(); ++k) {
                    const ControlSetting& c = kTwoLevelSettings[k];
                    energies.set(c, std::max(posteriors[k].mean()(0) / 2.0, 1e-12));
                    double e_ref = energy_magnitude(g_ref, c);
                    amps.set(c, std::min(1.0, std::abs(apply_map(g_ref, c)(1)) / e_ref));
                }
                SignHint hint{SignHint::Entry::G11, g_ref.entries()(1, 1) >= 0.0};
                // Lenient tolerance: early checkpoints carry large energy
                // errors and should yield a best-effort map, not an exception.
                Recovery2x2 rec = recover_2x2(energies, amps, hint, 1e9);
                double err = (rec.map.entries() - g_true.entries()).cwiseAbs().maxCoeff();
                errors_at[next_checkpoint].push_back(err);
                ++next_checkpoint;
            }
        }
    }

    std::vector<MiscalibrationPoint> trace;
    trace.reserve(checkpoints.size());
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        std::vector<double>& errs = errors_at[i];
        std::sort(errs.begin(), errs.end());
        double median = errs.empty() ? 0.0
                                     : (errs.size() % 2 ? errs[errs.size() / 2]
                                                        : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]));
        trace.push_back(MiscalibrationPoint{3 * checkpoints[i], median});
    }
    return trace;
}

ControlMap random_control_map(MapStructure structure, int dim, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    switch (structure) {
        case MapStructure::Diagonal: {
            if (dim != 2 && dim != 3) throw std::invalid_argument("random_control_map: dim must be 2 or 3");
            RealMatrix g = RealMatrix::Zero(dim, dim);
            for (int i = 0; i < dim; ++i) g(i, i) = std::abs(normal(rng));
            return ControlMap(std::move(g), MapStructure::Diagonal);
        }
        case MapStructure::UpperTriangular: {
            if (dim != 3) throw std::invalid_argument("random_control_map: triangular maps are 3x3");
            RealMatrix g = RealMatrix::Zero(3, 3);
            for (int i = 0; i < 3; ++i) {
                g(i, i) = std::abs(normal(rng)) + 0.1; // keep the sequential solve well conditioned
                for (int j = i + 1; j < 3; ++j) g(i, j) = normal(rng);
            }
            return ControlMap(std::move(g), MapStructure::UpperTriangular);
        }
        case MapStructure::Full: {
            if (dim != 2) throw std::invalid_argument("random_control_map: full maps are 2x2 here");
            return draw_generic_map(rng);
        }
    }
    throw std::invalid_argument("random_control_map: unknown structure");
}

SettingTable forward_amplitudes(const ControlMap& g, const std::vector<ControlSetting>& settings) {
    SettingTable table;
    int z_row = g.dim() - 1; // Z coefficient: row 1 of a 2x2 map, row 2 of a 3x3 map
    for (const ControlSetting& c : settings) {
        double e = energy_magnitude(g, c);
        if (!(e > 0.0)) throw std::invalid_argument("forward_amplitudes: zero-energy setting");
        table.set(c, std::min(1.0, std::abs(apply_map(g, c)(z_row)) / e));
    }
    return table;
}

FisherComparison amplitude_fisher_comparison(double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("amplitude_fisher_comparison: need 0 < a < 1");
    double u = a * a;
    RealVector params(1);
    params(0) = u;
    const double energy = 1.0;
    const double t_opt = std::numbers::pi / (2.0 * energy);

    auto fixed_time = [energy](const RealVector& p, double t) {
        return likelihood_amplitude_sampling(energy, std::sqrt(p(0)), t);
    };
    auto marginal = [](const RealVector& p, double) { return marginal_likelihood_amplitude(std::sqrt(p(0))); };

    double i_opt = fisher_information(fixed_time, params, t_opt, 1e-6)(0, 0);
    double i_marg = fisher_information(marginal, params, 0.0, 1e-6)(0, 0);
    return FisherComparison{i_opt, i_marg, i_opt / i_marg};
}

} // namespace randgap
