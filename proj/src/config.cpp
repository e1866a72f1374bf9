#include "randgap/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace randgap {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

} // namespace

void CampaignConfig::validate() const {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("config field 'dim' must be in [2, 16]");
    if (n_instances < 1) throw std::invalid_argument("config field 'instances' must be positive");
    if (n_experiments < 1) throw std::invalid_argument("config field 'experiments' must be positive");
    if (jobs < 0) throw std::invalid_argument("config field 'jobs' must be >= 0");
    inference.validate();
    if (subspace < 0 || subspace > dim) {
        throw std::invalid_argument("config field 'subspace' must be in [0, dim]");
    }
    if (subspace == 1) throw std::invalid_argument("config field 'subspace' must be 0 or >= 2");
    if (subspace > 0 && !(anneal_time > 0.0)) {
        throw std::invalid_argument("config field 'anneal_time' must be positive in adiabatic mode");
    }
    if (anneal_steps < 0) throw std::invalid_argument("config field 'anneal_steps' must be >= 0");
    if (!(theta_min > 0.0) || !(theta_max > theta_min)) {
        throw std::invalid_argument("config fields 'theta_min'/'theta_max' must satisfy 0 < min < max");
    }
    if (suite == Suite::ControlMap) {
        if (mode != "diagonal" && mode != "triangular" && mode != "two-by-two" && mode != "miscalibration") {
            throw std::invalid_argument("config field 'mode' must be diagonal|triangular|two-by-two|miscalibration");
        }
        if (mode == "miscalibration") {
            if (deltas.empty()) throw std::invalid_argument("config field 'deltas' must be non-empty");
            for (double d : deltas) {
                if (d < 0.0 || d > 1e-2) {
                    throw std::invalid_argument("config field 'deltas' entries must lie in [0, 1e-2]");
                }
            }
        }
    }
}

CampaignConfig::Suite parse_suite(const std::string& name) {
    if (name == "gaps") return CampaignConfig::Suite::Gaps;
    if (name == "amplitude") return CampaignConfig::Suite::Amplitude;
    if (name == "controlmap") return CampaignConfig::Suite::ControlMap;
    if (name == "turnpike") return CampaignConfig::Suite::Turnpike;
    if (name == "designcheck") return CampaignConfig::Suite::DesignCheck;
    throw std::invalid_argument("unknown suite '" + name + "'");
}

std::string suite_name(CampaignConfig::Suite suite) {
    switch (suite) {
        case CampaignConfig::Suite::Gaps: return "gaps";
        case CampaignConfig::Suite::Amplitude: return "amplitude";
        case CampaignConfig::Suite::ControlMap: return "controlmap";
        case CampaignConfig::Suite::Turnpike: return "turnpike";
        case CampaignConfig::Suite::DesignCheck: return "designcheck";
    }
    return "unknown";
}

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not readable: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config file " + path + ": line " + std::to_string(line_no) +
                                        " is not key=value");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_key_values(CampaignConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        try {
            if (key == "suite") cfg.suite = parse_suite(value);
            else if (key == "dim") cfg.dim = std::stoi(value);
            else if (key == "instances") cfg.n_instances = std::stoi(value);
            else if (key == "experiments") cfg.n_experiments = std::stoi(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "out") cfg.output_path = value;
            else if (key == "jobs") cfg.jobs = std::stoi(value);
            else if (key == "accept_threshold") cfg.inference.accept_threshold = std::stoi(value);
            else if (key == "max_attempts_factor") cfg.inference.max_attempts_factor = std::stoi(value);
            else if (key == "pgh_prefactor") cfg.inference.pgh_prefactor = std::stod(value);
            else if (key == "t_max") cfg.inference.t_max = std::stod(value);
            else if (key == "subspace") cfg.subspace = std::stoi(value);
            else if (key == "anneal_time") cfg.anneal_time = std::stod(value);
            else if (key == "anneal_steps") cfg.anneal_steps = std::stoi(value);
            else if (key == "coupling") cfg.coupling = std::stod(value);
            else if (key == "theta_min") cfg.theta_min = std::stod(value);
            else if (key == "theta_max") cfg.theta_max = std::stod(value);
            else if (key == "mode") cfg.mode = value;
            else if (key == "deltas") cfg.deltas = parse_double_list(value);
            else throw std::invalid_argument("unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "': could not parse value '" + value + "'");
        }
    }
}

} // namespace randgap
