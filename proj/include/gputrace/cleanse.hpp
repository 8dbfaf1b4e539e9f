#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "gputrace/types.hpp"

namespace gputrace {

enum class RejectReason {
    unmatched,           // no counter samples joined this job
    login_node,
    non_gpu_partition,
    staff,
    not_completed,
    too_short,
    over_physical_limit,
    below_mean_floor,
};

std::string_view reject_reason_name(RejectReason r);

struct FilterConfig {
    int min_duration_s = 180;
    double min_mean_percent = 1.0;
    std::set<std::string> gpu_partition_names = {"gpu"};
    std::set<std::string> login_node_prefixes = {"login"};
    bool staff_user_class_excluded = true;
    std::vector<std::string> keywords;  // lowercase; defaults to the 18 ML keywords
    CounterLimits limits;

    FilterConfig();

    // Loads overrides from a flat key=value file. Unknown keys throw
    // std::runtime_error naming the key.
    static FilterConfig load(std::istream& in);
};

struct FilterOutcome {
    bool kept = true;
    std::vector<RejectReason> reasons;  // ordered, deduplicated
};

// Evaluates every cleaning rule and records all violations.
FilterOutcome filter_job(const JobTrace& trace, const FilterConfig& cfg);

// True when the lowercased submit line contains any configured keyword.
bool classify_ml(const JobRecord& record, const FilterConfig& cfg);

}  // namespace gputrace
