#include "crem/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace crem {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a nonnegative integer, got '" + v + "'");
    }
}

std::vector<std::string> split_list(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<ComplexTemperature> parse_betas(const std::string& v) {
    std::vector<ComplexTemperature> out;
    if (trim(v).empty()) return out;
    for (const auto& item : split_list(v, ';')) {
        auto parts = split_list(item, ',');
        if (parts.size() != 2) throw ConfigError("betas", "each beta must be 'sigma,tau': " + item);
        out.push_back({to_double("betas", parts[0]), to_double("betas", parts[1])});
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v, ',')) out.push_back(to_double(key, item));
    return out;
}

}  // namespace

OffspringDistribution SimConfig::offspring_distribution() const {
    try {
        return OffspringDistribution::parse(offspring);
    } catch (const DomainError& e) {
        throw ConfigError("offspring", e.what());
    }
}

SimConfig SimConfig::parse_string(const std::string& text) {
    SimConfig cfg;
    bool have_t = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (key == "speed") cfg.speed = val;
        else if (key == "offspring") cfg.offspring = val;
        else if (key == "t") { cfg.t = to_double(key, val); have_t = true; }
        else if (key == "rho") cfg.rho = to_double(key, val);
        else if (key == "betas") cfg.betas = parse_betas(val);
        else if (key == "replicas") cfg.replicas = to_u64(key, val);
        else if (key == "seed") cfg.seed = to_u64(key, val);
        else if (key == "grid_step") cfg.grid_step = to_double(key, val);
        else if (key == "envelope_gamma") cfg.envelope_gamma = to_double(key, val);
        else if (key == "envelope_c") cfg.envelope_c = to_double(key, val);
        else if (key == "envelope_c_list") cfg.envelope_c_list = parse_double_list(key, val);
        else if (key == "snapshot_b") cfg.snapshot_b = to_double(key, val);
        else if (key == "snapshot_w") cfg.snapshot_w = (val == "auto") ? 0.0 : to_double(key, val);
        else if (key == "pop_cap") cfg.pop_cap = to_u64(key, val);
        else if (key == "phase_factor") cfg.phase_factor = to_double(key, val);
        else if (key == "kernel") cfg.kernel = val;
        else if (key == "strict_speed") cfg.strict_speed = val;
        else if (key == "sigma_min") cfg.sigma_min = to_double(key, val);
        else if (key == "sigma_max") cfg.sigma_max = to_double(key, val);
        else if (key == "sigma_step") cfg.sigma_step = to_double(key, val);
        else if (key == "tau_min") cfg.tau_min = to_double(key, val);
        else if (key == "tau_max") cfg.tau_max = to_double(key, val);
        else if (key == "tau_step") cfg.tau_step = to_double(key, val);
        else if (key == "boundary_exclusion") cfg.boundary_exclusion = to_double(key, val);
        else if (key == "scan_tol") cfg.scan_tol = to_double(key, val);
        else throw ConfigError(key, "unknown key");
    }
    if (!have_t) throw ConfigError("t", "required key missing");
    if (!(cfg.t > 0.0)) throw ConfigError("t", "must be positive");
    if (!(std::abs(cfg.rho) <= 1.0)) throw ConfigError("rho", "must lie in [-1,1]");
    if (cfg.replicas < 1) throw ConfigError("replicas", "must be at least 1");
    for (const auto& b : cfg.betas) {
        if (!std::isfinite(b.sigma) || !std::isfinite(b.tau))
            throw ConfigError("betas", "beta values must be finite");
    }
    if (cfg.strict_speed != "auto" && cfg.strict_speed != "true" && cfg.strict_speed != "false")
        throw ConfigError("strict_speed", "expected auto|true|false");
    if (cfg.envelope_gamma && !(*cfg.envelope_gamma > 0.0 && *cfg.envelope_gamma < 1.0))
        throw ConfigError("envelope_gamma", "must lie in (0,1)");
    if (cfg.envelope_c && !(*cfg.envelope_c > 0.0))
        throw ConfigError("envelope_c", "must be positive");
    // Reject malformed profile/offspring specs here rather than mid-run.
    try {
        (void)cfg.speed_function();
    } catch (const std::exception& e) {
        throw ConfigError("speed", e.what());
    }
    (void)cfg.offspring_distribution();
    return cfg;
}

SimConfig SimConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

}  // namespace crem
