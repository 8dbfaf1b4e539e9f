#include "gputrace/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gputrace {

namespace {

std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& xs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& x : xs) {
        if (x) {
            sum += *x;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

// Population standard deviation and mean.
std::pair<double, double> sigma_mu(const std::vector<double>& xs) {
    double mu = 0.0;
    for (double x : xs) mu += x;
    mu /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mu) * (x - mu);
    var /= static_cast<double>(xs.size());
    return {std::sqrt(var), mu};
}

std::map<GpuId, double> gpu_totals(const JobTrace& trace, CounterKind counter) {
    std::map<GpuId, double> totals;
    for (const auto& [key, series] : trace.series) {
        if (key.counter != counter) continue;
        double sum = 0.0;
        for (const auto& [ts, v] : series.points) sum += v;
        totals[key.gpu] = sum;
    }
    return totals;
}

}  // namespace

std::vector<WindowAggregate> window_totals(const JobTrace& trace, CounterKind counter,
                                           int window_len_s) {
    std::map<std::int64_t, WindowAggregate> by_window;
    const std::int64_t start = trace.record.start;
    for (const auto& [key, series] : trace.series) {
        if (key.counter != counter) continue;
        for (const auto& [ts, v] : series.points) {
            std::int64_t w = (ts - start) / window_len_s;
            auto& agg = by_window[w];
            agg.window_index = w;
            agg.window_len_s = window_len_s;
            agg.per_gpu_totals[key.gpu] += v;
        }
    }
    std::vector<WindowAggregate> out;
    out.reserve(by_window.size());
    for (auto& [w, agg] : by_window) out.push_back(std::move(agg));
    return out;
}

std::optional<double> spatial_imbalance_window(const WindowAggregate& agg, int observed_gpus) {
    double sum = 0.0, max = 0.0;
    for (const auto& [gpu, tc] : agg.per_gpu_totals) {
        sum += tc;
        max = std::max(max, tc);
    }
    if (max <= 0.0) return std::nullopt;
    return 1.0 - sum / (max * static_cast<double>(observed_gpus));
}

std::optional<double> spatial_imbalance_job(const std::vector<std::optional<double>>& window_si) {
    return mean_of_defined(window_si);
}

double temporal_imbalance_gpu(const GpuSeries& series) {
    double sum = 0.0, max = 0.0;
    for (const auto& [ts, v] : series.points) {
        sum += v;
        max = std::max(max, v);
    }
    if (max <= 0.0) return 0.0;  // constant-zero series is perfectly consistent
    return 1.0 - sum / (static_cast<double>(series.points.size()) * max);
}

double temporal_imbalance_job(const std::vector<double>& per_gpu) {
    return *std::max_element(per_gpu.begin(), per_gpu.end());
}

std::vector<std::int64_t> detect_events(const GpuSeries& series, double threshold,
                                        int sample_period_s) {
    std::vector<std::int64_t> events;
    const bool relative = !is_fraction_counter(series.counter);
    const std::int64_t max_gap = 2 * static_cast<std::int64_t>(sample_period_s);
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        const auto& [t0, v0] = series.points[i - 1];
        const auto& [t1, v1] = series.points[i];
        if (t1 - t0 > max_gap) continue;  // gap breaks adjacency
        const double jump = relative ? (v0 > 0.0 ? (v1 - v0) / v0 * 100.0 : (v1 > 0.0 ? 1e9 : 0.0))
                                     : v1 - v0;
        if (jump > threshold) events.push_back(t1);
    }
    return events;
}

std::optional<double> burstiness_gpu(const std::vector<std::int64_t>& events) {
    if (events.size() < 3) return std::nullopt;
    std::vector<double> gaps;
    gaps.reserve(events.size() - 1);
    for (std::size_t i = 1; i < events.size(); ++i)
        gaps.push_back(static_cast<double>(events[i] - events[i - 1]));
    auto [sigma, mu] = sigma_mu(gaps);
    if (sigma + mu == 0.0) return std::nullopt;
    return (sigma - mu) / (sigma + mu);
}

std::optional<double> burstiness_job(const std::vector<std::optional<double>>& per_gpu) {
    return mean_of_defined(per_gpu);
}

double job_mean(const JobTrace& trace, CounterKind counter) {
    double sum_of_means = 0.0;
    int gpus = 0;
    for (const auto& [key, series] : trace.series) {
        if (key.counter != counter || series.points.empty()) continue;
        double s = 0.0;
        for (const auto& [ts, v] : series.points) s += v;
        sum_of_means += s / static_cast<double>(series.points.size());
        ++gpus;
    }
    return gpus ? sum_of_means / gpus : 0.0;
}

std::optional<double> cv_across_gpus(const JobTrace& trace, CounterKind counter) {
    auto totals = gpu_totals(trace, counter);
    if (totals.size() < 2) return std::nullopt;
    std::vector<double> xs;
    xs.reserve(totals.size());
    for (const auto& [gpu, t] : totals) xs.push_back(t);
    auto [sigma, mu] = sigma_mu(xs);
    if (mu == 0.0) return std::nullopt;
    return sigma / mu * 100.0;
}

std::optional<double> underutilized_fraction(const JobTrace& trace, CounterKind counter) {
    auto totals = gpu_totals(trace, counter);
    if (totals.size() < 2) return std::nullopt;
    double max = 0.0;
    for (const auto& [gpu, t] : totals) max = std::max(max, t);
    int under = 0;
    for (const auto& [gpu, t] : totals)
        if (t <= 0.5 * max) ++under;
    return static_cast<double>(under) / static_cast<double>(totals.size());
}

std::optional<double> spatial_burstiness(
    const std::vector<std::pair<std::int64_t, double>>& window_si_by_index, int window_len_s,
    double threshold) {
    std::vector<std::int64_t> events;
    for (std::size_t i = 1; i < window_si_by_index.size(); ++i) {
        const double delta =
            std::abs(window_si_by_index[i].second - window_si_by_index[i - 1].second);
        if (delta > threshold)
            events.push_back(window_si_by_index[i].first * static_cast<std::int64_t>(window_len_s));
    }
    return burstiness_gpu(events);
}

double gpu_hours(const JobRecord& record) {
    return static_cast<double>(record.end - record.start) / 3600.0 *
           static_cast<double>(record.gpus_allocated);
}

std::optional<JobMetrics> compute_job_metrics(const JobTrace& trace, CounterKind counter,
                                              const MetricConfig& cfg) {
    std::vector<const GpuSeries*> series;
    for (const auto& [key, s] : trace.series) {
        if (key.counter == counter && !s.points.empty()) series.push_back(&s);
    }
    if (series.empty()) return std::nullopt;

    JobMetrics m;
    m.job_id = trace.record.job_id;
    m.counter = counter;
    m.mean = job_mean(trace, counter);
    m.gpu_hours = gpu_hours(trace.record);

    std::vector<double> per_gpu_ti;
    std::vector<std::optional<double>> per_gpu_b;
    for (const GpuSeries* s : series) {
        per_gpu_ti.push_back(temporal_imbalance_gpu(*s));
        per_gpu_b.push_back(
            burstiness_gpu(detect_events(*s, cfg.event_threshold, cfg.sample_period_s)));
    }
    m.temporal_imbalance = temporal_imbalance_job(per_gpu_ti);
    m.burstiness = burstiness_job(per_gpu_b);

    const int g = static_cast<int>(series.size());
    if (g >= 2) {
        auto windows = window_totals(trace, counter, cfg.window_len_s);
        std::vector<std::optional<double>> window_si;
        std::vector<std::pair<std::int64_t, double>> defined_si;
        for (const auto& w : windows) {
            auto si = spatial_imbalance_window(w, g);
            window_si.push_back(si);
            if (si) defined_si.emplace_back(w.window_index, *si);
        }
        m.spatial_imbalance = spatial_imbalance_job(window_si);
        m.spatial_burstiness =
            spatial_burstiness(defined_si, cfg.window_len_s, cfg.spatial_event_threshold);
        m.cv_percent = cv_across_gpus(trace, counter);
        m.underutilized_fraction = underutilized_fraction(trace, counter);
    }
    return m;
}

}  // namespace gputrace
