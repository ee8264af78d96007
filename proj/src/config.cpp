#include "cascade/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

namespace cascade {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

double parse_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw UsageError("invalid numeric value for " + key + ": '" + value + "'");
    return v;
}

long parse_integer(const std::string& key, const std::string& value) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw UsageError("invalid integer value for " + key + ": '" + value + "'");
    return v;
}

}  // namespace

void RunConfig::require_single_da() const {
    if (da_range.has_value()) throw UsageError("this command takes a single --da, not a range");
    if (!da.has_value()) throw UsageError("missing --da");
}

void RunConfig::require_da_range() const {
    if (da.has_value()) throw UsageError("this command takes --da-min/--da-max, not a single --da");
    if (!da_range.has_value()) throw UsageError("missing --da-min/--da-max");
    if (!(da_range->first < da_range->second))
        throw UsageError("empty Da range: da-min must be below da-max");
}

OperatingMode RunConfig::mode() const {
    if (tau_rel.has_value()) {
        if (!tau_rf.has_value()) throw UsageError("--tau-rel requires --tau-rf");
        if (*tau_rel < 0.0 || *tau_rel > *tau_rf)
            throw UsageError("--tau-rel must lie in [0, tau-rf]");
        return RelaxationModeCfg{*tau_rf, *tau_rel};
    }
    if (tau_rf.has_value()) {
        if (!(*tau_rf > 0.0)) throw UsageError("--tau-rf must be positive");
        return ReverseFlowMode{*tau_rf};
    }
    return ConstantFlowMode{FlowDirection::forward};
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path + ": " + std::strerror(errno));
    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
        entries[key] = value;
    }
    return entries;
}

void apply_config_entry(RunConfig& config, const std::string& raw_key, const std::string& value) {
    const std::string key = normalize_key(raw_key);
    if (key == "gamma") {
        config.params.gamma = parse_number(key, value);
    } else if (key == "beta") {
        config.params.beta = parse_number(key, value);
    } else if (key == "order") {
        config.params.order = parse_number(key, value);
    } else if (key == "da") {
        config.da = parse_number(key, value);
    } else if (key == "da_min") {
        const double v = parse_number(key, value);
        config.da_range = {v, config.da_range ? config.da_range->second : v};
    } else if (key == "da_max") {
        const double v = parse_number(key, value);
        config.da_range = {config.da_range ? config.da_range->first : v, v};
    } else if (key == "dp") {
        config.dp = parse_number(key, value);
        if (!(config.dp > 0.0)) throw UsageError("dp must be positive");
    } else if (key == "tau_rf") {
        config.tau_rf = parse_number(key, value);
    } else if (key == "tau_rel") {
        config.tau_rel = parse_number(key, value);
    } else if (key == "scan_step") {
        config.scan_step = parse_number(key, value);
        if (!(config.scan_step > 0.0)) throw UsageError("scan-step must be positive");
    } else if (key == "cycles") {
        config.cycles = parse_integer(key, value);
        if (config.cycles < 0) throw UsageError("cycles must be nonnegative");
    } else if (key == "settle_cycles") {
        config.settle_cycles = parse_integer(key, value);
        if (config.settle_cycles < 1) throw UsageError("settle-cycles must be positive");
    } else if (key == "seed_alpha1") {
        config.seed.alpha1 = parse_number(key, value);
        if (config.seed.alpha1 < 0.0 || config.seed.alpha1 > 1.0)
            throw UsageError("seed-alpha1 must lie in [0, 1]");
    } else if (key == "seed_alpha2") {
        config.seed.alpha2 = parse_number(key, value);
        if (config.seed.alpha2 < 0.0 || config.seed.alpha2 > 1.0)
            throw UsageError("seed-alpha2 must lie in [0, 1]");
    } else if (key == "step") {
        config.step = parse_number(key, value);
        if (!(config.step > 0.0)) throw UsageError("step must be positive");
    } else if (key == "record_every") {
        config.record_every = static_cast<int>(parse_integer(key, value));
    } else if (key == "out") {
        config.out = value;
    } else if (key == "svg") {
        config.svg = value;
    } else {
        throw UsageError("unknown configuration key: " + raw_key);
    }
}

}  // namespace cascade
