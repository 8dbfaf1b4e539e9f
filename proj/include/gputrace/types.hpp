#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gputrace {

// The eight DCGM counters tracked per GPU.
enum class CounterKind : int {
    GPU_UTIL = 0,
    MEM_UTIL,
    FP16_ACTV,
    FP32_ACTV,
    FP64_ACTV,
    TNSR_ACTV,
    SM_ACTV,
    HBM_USED,
};

inline constexpr int kCounterCount = 8;

inline constexpr std::array<CounterKind, kCounterCount> kAllCounters = {
    CounterKind::GPU_UTIL,  CounterKind::MEM_UTIL,  CounterKind::FP16_ACTV,
    CounterKind::FP32_ACTV, CounterKind::FP64_ACTV, CounterKind::TNSR_ACTV,
    CounterKind::SM_ACTV,   CounterKind::HBM_USED,
};

std::string_view counter_name(CounterKind k);       // short name, e.g. "GPU_UTIL"
std::string_view counter_dcgm_name(CounterKind k);  // e.g. "DCGM_FI_DEV_GPU_UTIL"

// Accepts either the short or the DCGM field name.
std::optional<CounterKind> counter_from_name(std::string_view name);

// True for the seven 0-100 counters; false for HBM_USED (absolute MB).
constexpr bool is_fraction_counter(CounterKind k) { return k != CounterKind::HBM_USED; }

// Physical upper bounds per counter. The fraction counters cap at 100;
// HBM capacity depends on the GPU model.
struct CounterLimits {
    double hbm_capacity_mb = 40960.0;

    double upper_bound(CounterKind k) const {
        return is_fraction_counter(k) ? 100.0 : hbm_capacity_mb;
    }
};

struct CounterSample {
    std::int64_t timestamp = 0;  // unix seconds
    std::string node;
    int gpu_index = 0;
    CounterKind counter = CounterKind::GPU_UTIL;
    double value = 0.0;
};

enum class UserClass { regular, staff };
enum class JobState { completed, failed, cancelled, other };

std::string_view user_class_name(UserClass c);
std::string_view job_state_name(JobState s);

struct JobRecord {
    std::string job_id;
    std::string step_id;  // may be empty
    std::string user;
    UserClass user_class = UserClass::regular;
    std::string partition;
    JobState state = JobState::other;
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::string nodelist_expr;
    int gpus_allocated = 1;
    std::string submit_line;
};

// Identifies one GPU within a job: node plus local device index.
struct GpuId {
    std::string node;
    int gpu_index = 0;

    auto operator<=>(const GpuId&) const = default;
};

struct GpuSeries {
    GpuId gpu;
    CounterKind counter = CounterKind::GPU_UTIL;
    // Strictly increasing timestamps.
    std::vector<std::pair<std::int64_t, double>> points;
};

struct SeriesKey {
    GpuId gpu;
    CounterKind counter = CounterKind::GPU_UTIL;

    auto operator<=>(const SeriesKey&) const = default;
};

struct JobTrace {
    JobRecord record;
    std::map<SeriesKey, GpuSeries> series;
    bool ambiguity_flag = false;  // samples in this trace matched multiple jobs

    // Distinct GPUs observed for a counter over the job lifetime.
    std::vector<GpuId> observed_gpus(CounterKind counter) const;
};

// Per-(job, counter) derived values. Bounded metrics that cannot be
// computed (single GPU, too few events, all-zero data) stay nullopt.
struct JobMetrics {
    std::string job_id;
    CounterKind counter = CounterKind::GPU_UTIL;
    double mean = 0.0;
    std::optional<double> spatial_imbalance;     // [0,1]
    double temporal_imbalance = 0.0;             // [0,1]
    std::optional<double> burstiness;            // [-1,1]
    std::optional<double> cv_percent;            // >= 0
    std::optional<double> underutilized_fraction;  // [0,1]
    std::optional<double> spatial_burstiness;    // [-1,1]
    double gpu_hours = 0.0;
};

}  // namespace gputrace
