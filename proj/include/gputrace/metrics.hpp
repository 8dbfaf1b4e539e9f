#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "gputrace/types.hpp"

namespace gputrace {

struct MetricConfig {
    int window_len_s = 60;
    double event_threshold = 15.0;   // percentage points; relative % for HBM_USED
    int sample_period_s = 10;        // nominal sampler interval, gap breaking for events
    double spatial_event_threshold = 0.15;  // window-to-window SI jump
};

// Per-window counter totals for one job and counter. GPUs that reported no
// sample in a window are simply absent from the map and count as zero.
struct WindowAggregate {
    std::int64_t window_index = 0;
    std::map<GpuId, double> per_gpu_totals;  // TC(g, w)
    int window_len_s = 60;
};

std::vector<WindowAggregate> window_totals(const JobTrace& trace, CounterKind counter,
                                           int window_len_s);

// 1 - sum(TC) / (max(TC) * g_j); absent when no GPU has a positive total.
std::optional<double> spatial_imbalance_window(const WindowAggregate& agg, int observed_gpus);

// Mean over windows with a defined value.
std::optional<double> spatial_imbalance_job(const std::vector<std::optional<double>>& window_si);

// 1 - sum(C) / (count * max(C)); 0 for an all-zero series.
double temporal_imbalance_gpu(const GpuSeries& series);

double temporal_imbalance_job(const std::vector<double>& per_gpu);

// Timestamps where the value jumps past the threshold between consecutive
// samples. Fraction counters use an absolute percentage-point threshold;
// HBM_USED uses a relative one. Gaps wider than twice the nominal sample
// period break adjacency.
std::vector<std::int64_t> detect_events(const GpuSeries& series, double threshold,
                                        int sample_period_s);

// (sigma - mu) / (sigma + mu) of interevent times, population sigma.
// Needs at least 3 events (2 interevent times).
std::optional<double> burstiness_gpu(const std::vector<std::int64_t>& events);

std::optional<double> burstiness_job(const std::vector<std::optional<double>>& per_gpu);

// Mean over GPUs of each GPU's time mean.
double job_mean(const JobTrace& trace, CounterKind counter);

// Coefficient of variation across per-GPU totals, in percent.
std::optional<double> cv_across_gpus(const JobTrace& trace, CounterKind counter);

// Share of GPUs whose total is at most half the per-GPU maximum.
std::optional<double> underutilized_fraction(const JobTrace& trace, CounterKind counter);

// Burstiness of the window-SI sequence: events where |SI_w - SI_{w-1}|
// exceeds the threshold, event times in seconds (window index * length).
std::optional<double> spatial_burstiness(
    const std::vector<std::pair<std::int64_t, double>>& window_si_by_index, int window_len_s,
    double threshold);

double gpu_hours(const JobRecord& record);

// Everything above, wired together for one (job, counter) pair.
// Spatial metrics stay absent for single-GPU jobs.
std::optional<JobMetrics> compute_job_metrics(const JobTrace& trace, CounterKind counter,
                                              const MetricConfig& cfg);

}  // namespace gputrace
