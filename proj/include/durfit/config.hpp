#ifndef DURFIT_CONFIG_HPP
#define DURFIT_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace durfit {

// Resolved run configuration. Flags override config-file values; the master
// seed has no default and must always be given explicitly.
struct RunConfig {
    std::string experiment;  // table2 | methods | nsweep | arms | placement | custom
    std::uint64_t master_seed = 0;
    bool seed_set = false;
    int n_sims = 1000;
    double step = 0.01;
    std::string output_dir = ".";
    bool emit_curves = false;
    int curve_sample = 100;
    bool svg = false;
    int threads = 1;
    // custom experiment definition
    std::vector<int> scenarios;
    std::string design = "ED7";
    int total_n = 504;
    std::string method = "FP";
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

}  // namespace detail

// Flat key=value config file; '#' starts a comment line.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("bad config line (expected key=value): " + line);
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "experiment") cfg.experiment = value;
        else if (key == "master_seed" || key == "seed") {
            cfg.master_seed = std::stoull(value);
            cfg.seed_set = true;
        } else if (key == "n_sims") cfg.n_sims = std::stoi(value);
        else if (key == "step") cfg.step = std::stod(value);
        else if (key == "output_dir" || key == "out") cfg.output_dir = value;
        else if (key == "emit_curves") cfg.emit_curves = (value == "true" || value == "1");
        else if (key == "curve_sample") cfg.curve_sample = std::stoi(value);
        else if (key == "svg") cfg.svg = (value == "true" || value == "1");
        else if (key == "threads") cfg.threads = std::stoi(value);
        else if (key == "scenarios") cfg.scenarios = detail::parse_int_list(value);
        else if (key == "design") cfg.design = value;
        else if (key == "total_n") cfg.total_n = std::stoi(value);
        else if (key == "method") cfg.method = value;
        else throw std::runtime_error("unknown config key: " + key);
    }
}

}  // namespace durfit

#endif
