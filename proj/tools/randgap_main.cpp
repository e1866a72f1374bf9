#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "randgap/campaign.hpp"
#include "randgap/turnpike.hpp"

namespace {

using randgap::CampaignConfig;

// Precedence: CLI flag > config file > RANDGAP_SEED env > built-in default.
struct CommonFlags {
    std::string config_path;
    int dim = -1;
    long long seed = -1;
    int instances = -1;
    int experiments = -1;
    std::string out;
    int jobs = -1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file");
        cmd->add_option("--dim", dim, "system dimension");
        cmd->add_option("--seed", seed, "campaign seed");
        cmd->add_option("--instances", instances, "number of instances");
        cmd->add_option("--experiments", experiments, "experiments per instance");
        cmd->add_option("--out", out, "output CSV path");
        cmd->add_option("--jobs", jobs, "concurrent instances (0 = auto)");
    }

    CampaignConfig build(CampaignConfig::Suite suite) const {
        CampaignConfig cfg;
        cfg.suite = suite;
        if (const char* env = std::getenv("RANDGAP_SEED")) {
            cfg.seed = std::stoull(env);
        }
        if (!config_path.empty()) {
            randgap::apply_key_values(cfg, randgap::parse_key_value_file(config_path));
        }
        cfg.suite = suite; // the subcommand wins over any 'suite' config key
        if (dim >= 0) cfg.dim = dim;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (instances >= 0) cfg.n_instances = instances;
        if (experiments >= 0) cfg.n_experiments = experiments;
        if (!out.empty()) cfg.output_path = out;
        if (jobs >= 0) cfg.jobs = jobs;
        return cfg;
    }
};

int run_turnpike(const std::string& input_path, double tolerance) {
    std::vector<double> gaps;
    auto read_gaps = [&gaps](std::istream& in) {
        double v;
        while (in >> v) gaps.push_back(v);
    };
    if (input_path.empty() || input_path == "-") {
        read_gaps(std::cin);
    } else {
        std::ifstream in(input_path);
        if (!in) throw std::invalid_argument("cannot read gap list: " + input_path);
        read_gaps(in);
    }
    randgap::GapMultiset multiset(gaps, tolerance);
    std::vector<randgap::Spectrum> spectra = randgap::reconstruct_spectrum(multiset);
    if (spectra.empty()) {
        std::cerr << "no consistent spectrum (corrupted gap data?)\n";
    }
    for (const randgap::Spectrum& s : spectra) {
        for (int i = 0; i < s.dim(); ++i) {
            if (i) std::cout << ' ';
            std::cout << s[i];
        }
        std::cout << '\n';
    }
    return 0;
}

int run_designcheck(const std::string& sampler_name, const std::string& monomial_name, int dim,
                    long samples, std::uint64_t seed, const std::string& out_path) {
    randgap::MomentMonomial monomial;
    if (monomial_name == "abs-quartic") monomial.kind = randgap::MomentMonomial::Kind::AbsQuartic;
    else if (monomial_name == "same-column") monomial.kind = randgap::MomentMonomial::Kind::SameColumnPair;
    else if (monomial_name == "same-row") monomial.kind = randgap::MomentMonomial::Kind::SameRowPair;
    else if (monomial_name == "distinct") monomial.kind = randgap::MomentMonomial::Kind::DistinctPair;
    else if (monomial_name == "cross") monomial.kind = randgap::MomentMonomial::Kind::CrossTerm;
    else throw std::invalid_argument("unknown monomial '" + monomial_name + "'");
    if (dim < 2) throw std::invalid_argument("designcheck: dim must be >= 2");

    randgap::UnitarySampler sampler = randgap::UnitarySampler::haar(dim);
    if (sampler_name == "haar") sampler = randgap::UnitarySampler::haar(dim);
    else if (sampler_name == "euler") sampler = randgap::UnitarySampler::euler_qubit_sampler();
    else if (sampler_name == "clifford") sampler = randgap::UnitarySampler::clifford_qubit_sampler();
    else throw std::invalid_argument("unknown sampler '" + sampler_name + "'");

    randgap::Rng rng(seed);
    double deviation = randgap::design_check(sampler, monomial, samples, rng);
    double haar_value = randgap::haar_moment_value(monomial, sampler.dim);
    std::cout << "sampler=" << sampler_name << " monomial=" << monomial_name << " dim=" << sampler.dim
              << " samples=" << samples << " haar=" << haar_value << " deviation=" << deviation << '\n';
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << "sampler,monomial,dim,samples,haar_value,deviation\n"
            << sampler_name << ',' << monomial_name << ',' << sampler.dim << ',' << samples << ','
            << haar_value << ',' << deviation << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized gap and amplitude estimation simulator"};
    app.require_subcommand(1);

    CommonFlags gaps_flags, amplitude_flags, controlmap_flags;

    CLI::App* gaps = app.add_subcommand("gaps", "Eigenvalue-gap estimation campaign (CSV output)");
    gaps_flags.attach(gaps);

    CLI::App* amplitude = app.add_subcommand("amplitude", "In-place amplitude estimation campaign");
    amplitude_flags.attach(amplitude);

    CLI::App* controlmap = app.add_subcommand("controlmap", "Control-map recovery studies");
    controlmap_flags.attach(controlmap);
    std::string cm_mode;
    controlmap->add_option("--mode", cm_mode, "diagonal | triangular | two-by-two | miscalibration");

    CLI::App* turnpike = app.add_subcommand("turnpike", "Reconstruct spectra from a gap list (stdin or --in)");
    std::string tp_in;
    double tp_tolerance = -1.0;
    turnpike->add_option("--in", tp_in, "gap list file, one value per line ('-' = stdin)");
    turnpike->add_option("--tolerance", tp_tolerance, "multiset matching tolerance (default 1e-9 * max gap)");

    CLI::App* designcheck = app.add_subcommand("designcheck", "Compare a sampler's moment to the Haar value");
    std::string dc_sampler = "haar", dc_monomial = "abs-quartic", dc_out;
    int dc_dim = 2;
    long dc_samples = 100000;
    long long dc_seed = 0;
    designcheck->add_option("--sampler", dc_sampler, "haar | euler | clifford");
    designcheck->add_option("--monomial", dc_monomial, "abs-quartic | same-column | same-row | distinct | cross");
    designcheck->add_option("--dim", dc_dim, "dimension (haar sampler only; others are qubit-sized)");
    designcheck->add_option("--samples", dc_samples, "Monte Carlo samples (ignored for clifford)");
    designcheck->add_option("--seed", dc_seed, "rng seed");
    designcheck->add_option("--out", dc_out, "optional CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e); // 0 for --help, nonzero for usage errors
    }

    try {
        if (gaps->parsed()) {
            randgap::run_gaps_campaign(gaps_flags.build(CampaignConfig::Suite::Gaps));
        } else if (amplitude->parsed()) {
            randgap::run_amplitude_campaign(amplitude_flags.build(CampaignConfig::Suite::Amplitude));
        } else if (controlmap->parsed()) {
            CampaignConfig cfg = controlmap_flags.build(CampaignConfig::Suite::ControlMap);
            if (!cm_mode.empty()) cfg.mode = cm_mode;
            randgap::run_controlmap_campaign(cfg);
        } else if (turnpike->parsed()) {
            return run_turnpike(tp_in, tp_tolerance);
        } else if (designcheck->parsed()) {
            return run_designcheck(dc_sampler, dc_monomial, dc_dim, dc_samples,
                                   static_cast<std::uint64_t>(dc_seed), dc_out);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
