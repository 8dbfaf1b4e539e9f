#include "gputrace/types.hpp"

#include <algorithm>

namespace gputrace {

namespace {

struct CounterNames {
    std::string_view short_name;
    std::string_view dcgm_name;
};

constexpr std::array<CounterNames, kCounterCount> kNames = {{
    {"GPU_UTIL", "DCGM_FI_DEV_GPU_UTIL"},
    {"MEM_UTIL", "DCGM_FI_DEV_MEM_COPY_UTIL"},
    {"FP16_ACTV", "DCGM_FI_PROF_PIPE_FP16_ACTIVE"},
    {"FP32_ACTV", "DCGM_FI_PROF_PIPE_FP32_ACTIVE"},
    {"FP64_ACTV", "DCGM_FI_PROF_PIPE_FP64_ACTIVE"},
    {"TNSR_ACTV", "DCGM_FI_PROF_PIPE_TENSOR_ACTIVE"},
    {"SM_ACTV", "DCGM_FI_PROF_SM_ACTIVE"},
    {"HBM_USED", "DCGM_FI_DEV_FB_USED"},
}};

}  // namespace

std::string_view counter_name(CounterKind k) { return kNames[static_cast<int>(k)].short_name; }

std::string_view counter_dcgm_name(CounterKind k) { return kNames[static_cast<int>(k)].dcgm_name; }

std::optional<CounterKind> counter_from_name(std::string_view name) {
    for (int i = 0; i < kCounterCount; ++i) {
        if (name == kNames[i].short_name || name == kNames[i].dcgm_name)
            return static_cast<CounterKind>(i);
    }
    return std::nullopt;
}

std::string_view user_class_name(UserClass c) {
    return c == UserClass::staff ? "staff" : "regular";
}

std::string_view job_state_name(JobState s) {
    switch (s) {
        case JobState::completed: return "completed";
        case JobState::failed: return "failed";
        case JobState::cancelled: return "cancelled";
        default: return "other";
    }
}

std::vector<GpuId> JobTrace::observed_gpus(CounterKind counter) const {
    std::vector<GpuId> gpus;
    for (const auto& [key, s] : series) {
        if (key.counter == counter) gpus.push_back(key.gpu);
    }
    return gpus;
}

}  // namespace gputrace
