#include "randgap/campaign.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "randgap/stats.hpp"

namespace randgap {

namespace {

void parallel_instances(int count, int jobs, const std::function<void(int)>& work) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::clamp(jobs, 1, count);
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    if (path.empty()) throw std::invalid_argument("output path not set (use --out or the 'out' config key)");
    std::ofstream out(path, std::ios::binary); // fixed newline policy keeps bytes reproducible
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

} // namespace

GapsCampaignResult run_gaps_campaign_compute(const CampaignConfig& cfg) {
    cfg.validate();
    GapsCampaignResult result;
    result.instances.resize(static_cast<std::size_t>(cfg.n_instances));

    InferenceConfig inf = cfg.inference;
    inf.max_experiments = cfg.n_experiments;

    parallel_instances(cfg.n_instances, cfg.jobs, [&](int instance) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(instance)));
        GapsInstanceResult& slot = result.instances[static_cast<std::size_t>(instance)];
        slot.instance = instance;

        std::optional<SpectrumOracle> oracle;
        std::optional<GaussianPosterior> prior;
        if (cfg.subspace == 0) {
            HermitianOperator truth = gue_sample(cfg.dim, rng);
            oracle = make_gap_oracle(truth);
            prior = gue_prior(cfg.dim, 10000, rng);
        } else {
            // Problem family for the adiabatic variant: a trusted diagonal
            // Hamiltonian plus a GUE coupling of configurable strength.
            Spectrum base = spectrum_of(gue_sample(cfg.dim, rng));
            RealVector diag(cfg.dim);
            for (int i = 0; i < cfg.dim; ++i) diag(i) = base[i];
            HermitianOperator h0 = HermitianOperator::diagonal(diag);
            HermitianOperator coupling_term = gue_sample(cfg.dim, rng);
            HermitianOperator hp(h0.entries() + cfg.coupling * coupling_term.entries());
            int steps = cfg.anneal_steps > 0 ? cfg.anneal_steps : recommended_steps(h0, hp, cfg.anneal_time);
            AdiabaticSchedule sched(h0, hp, cfg.anneal_time, steps);
            slot.degenerate_path = min_path_gap(sched, cfg.subspace) < 1e-3;
            oracle = make_adiabatic_oracle(sched, cfg.subspace);
            prior = gue_prior(cfg.subspace, 10000, rng);
        }

        std::vector<double> prior_estimate(static_cast<std::size_t>(oracle->hypothesis_dim), 0.0);
        for (int k = 0; k < prior->dim(); ++k) {
            prior_estimate[static_cast<std::size_t>(k) + 1] = prior->mean()(k);
        }
        slot.initial_error = error_metric(prior_estimate, oracle->reference);

        try {
            InferenceResult run = infer_spectrum(*oracle, *prior, inf, rng);
            slot.trace = std::move(run.trace);
        } catch (const PosteriorCollapseError& e) {
            slot.collapsed = true;
            slot.collapse_step = e.experiment_index.value_or(-1);
        }
    });

    for (const GapsInstanceResult& inst : result.instances) {
        if (inst.collapsed) ++result.collapse_count;
    }

    result.medians.reserve(static_cast<std::size_t>(cfg.n_experiments));
    for (int step = 0; step < cfg.n_experiments; ++step) {
        std::vector<double> t, err, unc;
        for (const GapsInstanceResult& inst : result.instances) {
            if (inst.collapsed || step >= static_cast<int>(inst.trace.size())) continue;
            const InferenceStep& s = inst.trace[static_cast<std::size_t>(step)];
            t.push_back(s.t);
            err.push_back(s.error);
            unc.push_back(s.uncertainty);
        }
        if (err.empty()) continue;
        result.medians.push_back(StepAggregate{step, median(t), median(err), median(unc),
                                               static_cast<int>(err.size())});
    }
    return result;
}

void write_gaps_csv(const GapsCampaignResult& result, const CampaignConfig& cfg, std::ostream& out) {
    out << "suite,instance,step,t,outcome_count,error,uncertainty,flag\n";
    const std::string suite = suite_name(cfg.suite);
    for (const GapsInstanceResult& inst : result.instances) {
        std::string base_flag = inst.degenerate_path ? "degenerate_path" : "";
        if (inst.collapsed) {
            std::string flag = base_flag.empty() ? "collapsed" : "collapsed;" + base_flag;
            out << suite << ',' << inst.instance << ',' << inst.collapse_step << ",0,0,0,0," << flag << "\n";
            continue;
        }
        long zeros = 0;
        for (const InferenceStep& s : inst.trace) {
            if (s.outcome == 0) ++zeros;
            out << suite << ',' << inst.instance << ',' << s.experiment_index << ',' << fmt(s.t) << ','
                << zeros << ',' << fmt(s.error) << ',' << fmt(s.uncertainty) << ',' << base_flag << "\n";
        }
    }
    for (const StepAggregate& m : result.medians) {
        out << suite << ",-1," << m.step << ',' << fmt(m.t) << ',' << m.contributors << ',' << fmt(m.error)
            << ',' << fmt(m.uncertainty) << ",median\n";
    }
}

void run_gaps_campaign(const CampaignConfig& cfg) {
    GapsCampaignResult result = run_gaps_campaign_compute(cfg);
    std::ofstream out = open_output(cfg.output_path);
    write_gaps_csv(result, cfg, out);
}

AmplitudeCampaignResult run_amplitude_campaign_compute(const CampaignConfig& cfg) {
    cfg.validate();
    if (cfg.dim != 2) throw std::invalid_argument("amplitude campaign: dim must be 2");
    AmplitudeCampaignResult result;
    result.instances.resize(static_cast<std::size_t>(cfg.n_instances));

    const double prior_mean = 0.5 * (cfg.theta_min + cfg.theta_max);
    const double prior_sigma = 0.5 * (cfg.theta_max - cfg.theta_min);

    parallel_instances(cfg.n_instances, cfg.jobs, [&](int instance) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(instance)));
        AmplitudeInstanceResult& slot = result.instances[static_cast<std::size_t>(instance)];
        slot.instance = instance;

        std::uniform_real_distribution<double> theta_dist(cfg.theta_min, cfg.theta_max);
        double theta = theta_dist(rng);
        slot.theta_true = theta;
        AmplitudeInstance inst = random_amplitude_instance(2, 1, std::sin(theta), rng);

        RealVector mu(1);
        mu(0) = prior_mean;
        RealMatrix cov(1, 1);
        cov(0, 0) = prior_sigma * prior_sigma;
        GaussianPosterior posterior(mu, cov);
        GaussianPosterior baseline = posterior;
        bool baseline_frozen = false;

        double cum = 0.0, baseline_cum = 0.0;
        for (int step = 0; step < cfg.n_experiments; ++step) {
            double raw = pgh_time(posterior, cfg.inference.pgh_prefactor, cfg.inference.t_max);
            long t = 2 * std::max(1L, std::lround(raw / 2.0));
            int outcome = run_amplitude_experiment(inst, t, rng).outcome;
            auto likelihood = [t](const RealVector& x) { return likelihood_amplitude_even_t(x(0), t, 2); };
            try {
                posterior = rejection_filter_update(posterior, outcome, likelihood, cfg.inference, rng);
            } catch (const PosteriorCollapseError&) {
                slot.collapsed = true;
                slot.collapse_step = step;
                break;
            }
            cum += static_cast<double>(t);

            // Iterative-PE comparison baseline with its own adaptive schedule.
            double braw = pgh_time(baseline, cfg.inference.pgh_prefactor, cfg.inference.t_max);
            long bt = std::max(1L, std::lround(braw));
            std::uniform_real_distribution<double> u(0.0, 1.0);
            int boutcome = u(rng) < likelihood_iterative_pe(theta, static_cast<double>(bt)) ? 0 : 1;
            if (!baseline_frozen) {
                auto blik = [bt](const RealVector& x) {
                    return likelihood_iterative_pe(x(0), static_cast<double>(bt));
                };
                try {
                    baseline = rejection_filter_update(baseline, boutcome, blik, cfg.inference, rng);
                } catch (const PosteriorCollapseError&) {
                    baseline_frozen = true;
                }
            }
            baseline_cum += static_cast<double>(bt);

            slot.trace.push_back(AmplitudeStep{step, static_cast<double>(t), outcome,
                                               std::abs(posterior.mean()(0) - theta), uncertainty(posterior),
                                               cum, std::abs(baseline.mean()(0) - theta), baseline_cum});
        }
    });

    for (const AmplitudeInstanceResult& inst : result.instances) {
        if (inst.collapsed) ++result.collapse_count;
    }

    for (int step = 0; step < cfg.n_experiments; ++step) {
        std::vector<double> err, cum, berr, bcum;
        for (const AmplitudeInstanceResult& inst : result.instances) {
            if (inst.collapsed || step >= static_cast<int>(inst.trace.size())) continue;
            const AmplitudeStep& s = inst.trace[static_cast<std::size_t>(step)];
            err.push_back(s.error);
            cum.push_back(s.cum_time);
            berr.push_back(s.baseline_error);
            bcum.push_back(s.baseline_cum_time);
        }
        if (err.empty()) continue;
        result.medians.push_back(AmplitudeStepAggregate{step, median(err), median(cum), median(berr),
                                                        median(bcum), static_cast<int>(err.size())});
    }
    return result;
}

void write_amplitude_csv(const AmplitudeCampaignResult& result, const CampaignConfig& cfg,
                         std::ostream& out) {
    out << "suite,instance,step,t,outcome_count,error,uncertainty,flag,cum_time,baseline_error,"
           "baseline_cum_time\n";
    const std::string suite = suite_name(cfg.suite);
    for (const AmplitudeInstanceResult& inst : result.instances) {
        if (inst.collapsed) {
            out << suite << ',' << inst.instance << ',' << inst.collapse_step << ",0,0,0,0,collapsed,0,0,0\n";
            continue;
        }
        long zeros = 0;
        for (const AmplitudeStep& s : inst.trace) {
            if (s.outcome == 0) ++zeros;
            out << suite << ',' << inst.instance << ',' << s.step << ',' << fmt(s.t) << ',' << zeros << ','
                << fmt(s.error) << ',' << fmt(s.uncertainty) << ",," << fmt(s.cum_time) << ','
                << fmt(s.baseline_error) << ',' << fmt(s.baseline_cum_time) << "\n";
        }
    }
    for (const AmplitudeStepAggregate& m : result.medians) {
        out << suite << ",-1," << m.step << ",0," << m.contributors << ',' << fmt(m.error)
            << ",0,median," << fmt(m.cum_time) << ',' << fmt(m.baseline_error) << ','
            << fmt(m.baseline_cum_time) << "\n";
    }
}

void run_amplitude_campaign(const CampaignConfig& cfg) {
    AmplitudeCampaignResult result = run_amplitude_campaign_compute(cfg);
    std::ofstream out = open_output(cfg.output_path);
    write_amplitude_csv(result, cfg, out);
}

ControlMapCampaignResult run_controlmap_campaign_compute(const CampaignConfig& cfg) {
    cfg.validate();
    ControlMapCampaignResult result;
    result.mode = cfg.mode;

    if (cfg.mode == "miscalibration") {
        result.miscalibration.resize(cfg.deltas.size());
        MiscalibrationConfig mis;
        mis.n_instances = cfg.n_instances;
        mis.n_experiments = cfg.n_experiments;
        mis.inference = cfg.inference;
        parallel_instances(static_cast<int>(cfg.deltas.size()), cfg.jobs, [&](int di) {
            Rng rng(derive_seed(cfg.seed, 0xC0FFEE + static_cast<std::uint64_t>(di)));
            double delta = cfg.deltas[static_cast<std::size_t>(di)];
            result.miscalibration[static_cast<std::size_t>(di)] = {delta,
                                                                   miscalibration_study(delta, mis, rng)};
        });
        return result;
    }

    const std::vector<ControlSetting> unit2 = {{1, 0}, {0, 1}};
    const std::vector<ControlSetting> unit3 = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const std::vector<ControlSetting> triangular_settings = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                                             {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
    const std::vector<ControlSetting> two_by_two_settings = {{1, 0}, {0, 1}, {1, 1}};

    result.recovery_rows.resize(static_cast<std::size_t>(cfg.n_instances));
    parallel_instances(cfg.n_instances, cfg.jobs, [&](int instance) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(instance)));
        RecoveryRow& row = result.recovery_rows[static_cast<std::size_t>(instance)];
        row.instance = instance;
        if (cfg.mode == "diagonal") {
            int d = cfg.dim == 2 ? 2 : 3;
            ControlMap truth = random_control_map(MapStructure::Diagonal, d, rng);
            ControlMap recovered = recover_diagonal(forward_energies(truth, d == 2 ? unit2 : unit3), d);
            row.error = (recovered.entries() - truth.entries()).cwiseAbs().maxCoeff();
        } else if (cfg.mode == "triangular") {
            ControlMap truth = random_control_map(MapStructure::UpperTriangular, 3, rng);
            ControlMap recovered = recover_upper_triangular(forward_energies(truth, triangular_settings));
            row.error = (recovered.entries() - truth.entries()).cwiseAbs().maxCoeff();
        } else { // two-by-two
            ControlMap truth = random_control_map(MapStructure::Full, 2, rng);
            SignHint hint{SignHint::Entry::G11, truth.entries()(1, 1) >= 0.0};
            Recovery2x2 rec = recover_2x2(forward_energies(truth, two_by_two_settings),
                                          forward_amplitudes(truth, two_by_two_settings), hint);
            row.error = (rec.map.entries() - truth.entries()).cwiseAbs().maxCoeff();
            row.residual = rec.residual;
        }
    });
    return result;
}

void write_controlmap_csv(const ControlMapCampaignResult& result, const CampaignConfig& cfg,
                          std::ostream& out) {
    out << "suite,instance,step,t,outcome_count,error,uncertainty,flag,mode,delta\n";
    const std::string suite = suite_name(cfg.suite);
    for (const RecoveryRow& row : result.recovery_rows) {
        out << suite << ',' << row.instance << ",0,0,0," << fmt(row.error) << ',' << fmt(row.residual)
            << ",," << result.mode << ",0\n";
    }
    for (const auto& [delta, trace] : result.miscalibration) {
        for (const MiscalibrationPoint& p : trace) {
            out << suite << ",-1," << p.n_experiments << ",0," << cfg.n_instances << ','
                << fmt(p.median_error) << ",0,median," << result.mode << ',' << fmt(delta) << "\n";
        }
    }
}

void run_controlmap_campaign(const CampaignConfig& cfg) {
    ControlMapCampaignResult result = run_controlmap_campaign_compute(cfg);
    std::ofstream out = open_output(cfg.output_path);
    write_controlmap_csv(result, cfg, out);
}

} // namespace randgap
