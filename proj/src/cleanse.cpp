#include "gputrace/cleanse.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "gputrace/hostlist.hpp"
#include "gputrace/metrics.hpp"

namespace gputrace {

namespace {

const std::vector<std::string> kDefaultKeywords = {
    "epoch",      "training",       "neural",    "cnn",        "rnn",        "lstm",
    "transformer", "bert",          "tensorflow", "pytorch",   "keras",      "deep",
    "inference",  "autoencoder",    "classification", "detection", "activation", "sklearn",
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

std::string_view reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::unmatched: return "unmatched";
        case RejectReason::login_node: return "login_node";
        case RejectReason::non_gpu_partition: return "non_gpu_partition";
        case RejectReason::staff: return "staff";
        case RejectReason::not_completed: return "not_completed";
        case RejectReason::too_short: return "too_short";
        case RejectReason::over_physical_limit: return "over_physical_limit";
        case RejectReason::below_mean_floor: return "below_mean_floor";
    }
    return "unknown";
}

FilterConfig::FilterConfig() : keywords(kDefaultKeywords) {}

FilterConfig FilterConfig::load(std::istream& in) {
    FilterConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line missing '=': " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "min_duration_s") {
            cfg.min_duration_s = std::stoi(value);
        } else if (key == "min_mean_percent") {
            cfg.min_mean_percent = std::stod(value);
        } else if (key == "gpu_partitions") {
            auto items = split_list(value);
            cfg.gpu_partition_names = {items.begin(), items.end()};
        } else if (key == "login_prefixes") {
            auto items = split_list(value);
            cfg.login_node_prefixes = {items.begin(), items.end()};
        } else if (key == "exclude_staff") {
            cfg.staff_user_class_excluded = (value == "true" || value == "1");
        } else if (key == "keywords") {
            cfg.keywords.clear();
            for (auto& k : split_list(value)) cfg.keywords.push_back(lower(k));
        } else if (key == "hbm_capacity_mb") {
            cfg.limits.hbm_capacity_mb = std::stod(value);
        } else {
            throw std::runtime_error("unknown config key: " + key);
        }
    }
    if (cfg.min_duration_s < 0) throw std::runtime_error("min_duration_s must be >= 0");
    if (cfg.min_mean_percent < 0 || cfg.min_mean_percent > 100)
        throw std::runtime_error("min_mean_percent must be in [0,100]");
    return cfg;
}

FilterOutcome filter_job(const JobTrace& trace, const FilterConfig& cfg) {
    FilterOutcome out;
    const JobRecord& r = trace.record;

    if (trace.series.empty()) out.reasons.push_back(RejectReason::unmatched);

    bool on_login = false;
    for (const auto& node : expand_hostlist(r.nodelist_expr)) {
        for (const auto& prefix : cfg.login_node_prefixes) {
            if (node.rfind(prefix, 0) == 0) on_login = true;
        }
    }
    if (on_login) out.reasons.push_back(RejectReason::login_node);

    if (!cfg.gpu_partition_names.contains(r.partition))
        out.reasons.push_back(RejectReason::non_gpu_partition);

    if (cfg.staff_user_class_excluded && r.user_class == UserClass::staff)
        out.reasons.push_back(RejectReason::staff);

    if (r.state != JobState::completed) out.reasons.push_back(RejectReason::not_completed);

    if (r.end - r.start < cfg.min_duration_s) out.reasons.push_back(RejectReason::too_short);

    bool over_limit = false;
    bool has_gpu_util = false;
    for (const auto& [key, series] : trace.series) {
        if (key.counter == CounterKind::GPU_UTIL && !series.points.empty()) has_gpu_util = true;
        const double bound = cfg.limits.upper_bound(key.counter);
        for (const auto& [ts, v] : series.points) {
            if (v > bound) over_limit = true;
        }
    }
    if (over_limit) out.reasons.push_back(RejectReason::over_physical_limit);

    // The global keep decision uses the GPU_UTIL mean; per-counter floors are
    // applied again inside each per-counter analysis population.
    if (has_gpu_util && job_mean(trace, CounterKind::GPU_UTIL) < cfg.min_mean_percent)
        out.reasons.push_back(RejectReason::below_mean_floor);

    out.kept = out.reasons.empty();
    return out;
}

bool classify_ml(const JobRecord& record, const FilterConfig& cfg) {
    const std::string line = lower(record.submit_line);
    for (const auto& kw : cfg.keywords) {
        if (line.find(kw) != std::string::npos) return true;
    }
    return false;
}

}  // namespace gputrace
