#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gputrace/metrics.hpp"
#include "gputrace/rng.hpp"

using namespace gputrace;
using doctest::Approx;

namespace {

GpuSeries series(std::vector<double> values, CounterKind counter = CounterKind::GPU_UTIL,
                 std::int64_t t0 = 1000, int period = 10) {
    GpuSeries s;
    s.gpu = {"nid1", 0};
    s.counter = counter;
    for (std::size_t i = 0; i < values.size(); ++i)
        s.points.emplace_back(t0 + static_cast<std::int64_t>(i) * period, values[i]);
    return s;
}

// Multi-GPU trace from per-GPU value vectors on a shared 10 s grid.
JobTrace trace_of(const std::vector<std::vector<double>>& per_gpu,
                  CounterKind counter = CounterKind::GPU_UTIL) {
    JobTrace t;
    t.record.job_id = "j";
    t.record.start = 1000;
    std::size_t longest = 0;
    for (std::size_t g = 0; g < per_gpu.size(); ++g) {
        GpuSeries s = series(per_gpu[g], counter);
        s.gpu = {"nid1", static_cast<int>(g)};
        t.series[{s.gpu, counter}] = s;
        longest = std::max(longest, per_gpu[g].size());
    }
    t.record.end = 1000 + static_cast<std::int64_t>(longest) * 10;
    t.record.gpus_allocated = static_cast<int>(per_gpu.size());
    return t;
}

WindowAggregate agg_of(std::vector<double> totals) {
    WindowAggregate a;
    int i = 0;
    for (double t : totals) a.per_gpu_totals[{"nid1", i++}] = t;
    return a;
}

}  // namespace

TEST_CASE("window totals sum per GPU") {
    auto t = trace_of({{50, 50}, {25, 25}});
    auto windows = window_totals(t, CounterKind::GPU_UTIL, 60);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].per_gpu_totals.at({"nid1", 0}) == 100.0);
    CHECK(windows[0].per_gpu_totals.at({"nid1", 1}) == 50.0);
}

TEST_CASE("windows tile the job span with a trailing partial window") {
    JobTrace t;
    t.record.start = 0;
    t.record.end = 150;
    GpuSeries s = series(std::vector<double>(16, 1.0), CounterKind::GPU_UTIL, 0);
    t.series[{s.gpu, s.counter}] = s;  // samples at 0,10,...,150
    auto windows = window_totals(t, CounterKind::GPU_UTIL, 60);
    REQUIRE(windows.size() == 3);
    CHECK(windows[0].window_index == 0);
    CHECK(windows[1].window_index == 1);
    CHECK(windows[2].window_index == 2);  // partial, 30 s worth of samples
    CHECK(windows[2].per_gpu_totals.at({"nid1", 0}) == 4.0);  // t=120,130,140,150
}

TEST_CASE("spatial imbalance window examples") {
    CHECK(*spatial_imbalance_window(agg_of({100, 50}), 2) == Approx(0.25).epsilon(1e-12));
    CHECK(*spatial_imbalance_window(agg_of({7, 7, 7, 7}), 4) == Approx(0.0));
    CHECK(*spatial_imbalance_window(agg_of({9, 0, 0, 0}), 4) == Approx(0.75));
    CHECK_FALSE(spatial_imbalance_window(agg_of({0, 0}), 2).has_value());
}

TEST_CASE("GPUs missing from a window count as zero") {
    WindowAggregate a = agg_of({100});  // only one of two GPUs reported
    CHECK(*spatial_imbalance_window(a, 2) == Approx(0.5));
}

TEST_CASE("spatial imbalance job is the mean of defined windows") {
    CHECK(*spatial_imbalance_job({0.25, 0.75}) == Approx(0.5));
    CHECK(*spatial_imbalance_job({0.3}) == Approx(0.3));
    CHECK_FALSE(spatial_imbalance_job({std::nullopt, std::nullopt}).has_value());
    CHECK(*spatial_imbalance_job({std::nullopt, 0.4}) == Approx(0.4));
}

TEST_CASE("temporal imbalance examples") {
    CHECK(temporal_imbalance_gpu(series({100, 50, 50, 0})) == Approx(0.5));
    CHECK(temporal_imbalance_gpu(series({7, 7, 7})) == Approx(0.0));
    CHECK(temporal_imbalance_gpu(series({0, 0, 100})) == Approx(2.0 / 3.0));
    CHECK(temporal_imbalance_gpu(series({0, 0, 0})) == 0.0);
    CHECK(temporal_imbalance_job({0.2, 0.5}) == 0.5);
    CHECK(temporal_imbalance_job({0.9, 0.9, 0.1}) == 0.9);
}

TEST_CASE("event detection threshold is strict") {
    auto events = detect_events(series({50, 66}), 15.0, 10);
    CHECK(events.size() == 1);
    CHECK(events[0] == 1010);
    CHECK(detect_events(series({50, 65}), 15.0, 10).empty());
}

TEST_CASE("HBM events use a relative threshold") {
    auto s = series({10000, 12000}, CounterKind::HBM_USED);
    CHECK(detect_events(s, 15.0, 10).size() == 1);  // +20% relative
    auto s2 = series({10000, 11000}, CounterKind::HBM_USED);
    CHECK(detect_events(s2, 15.0, 10).empty());  // +10% relative
}

TEST_CASE("sampling gaps break event adjacency") {
    GpuSeries s;
    s.counter = CounterKind::GPU_UTIL;
    s.points = {{1000, 10.0}, {1030, 90.0}, {1040, 10.0}, {1050, 90.0}};
    auto events = detect_events(s, 15.0, 10);  // 30 s gap > 2x period
    REQUIRE(events.size() == 1);
    CHECK(events[0] == 1050);
}

TEST_CASE("burstiness examples") {
    CHECK(*burstiness_gpu({10, 20, 30, 40}) == Approx(-1.0));  // sigma = 0
    CHECK(*burstiness_gpu({0, 10, 40}) == Approx(-1.0 / 3.0));  // gaps 10,30
    CHECK_FALSE(burstiness_gpu({10, 20}).has_value());          // < 3 events
    CHECK_FALSE(burstiness_gpu({}).has_value());
    CHECK(*burstiness_job({-1.0, 0.0}) == Approx(-0.5));
    CHECK(*burstiness_job({std::nullopt, 0.4}) == Approx(0.4));
    CHECK_FALSE(burstiness_job({}).has_value());
}

TEST_CASE("job mean is GPU-weighted") {
    auto t = trace_of({{40, 40}, {60, 60}});
    CHECK(job_mean(t, CounterKind::GPU_UTIL) == Approx(50.0));
    auto t2 = trace_of({{10, 20, 30}});
    CHECK(job_mean(t2, CounterKind::GPU_UTIL) == Approx(20.0));
    // 2 points of 0 vs 100 points of 100: GPU-weighted, not sample-weighted
    auto t3 = trace_of({std::vector<double>(2, 0.0), std::vector<double>(100, 100.0)});
    CHECK(job_mean(t3, CounterKind::GPU_UTIL) == Approx(50.0));
}

TEST_CASE("cv across gpus") {
    CHECK(*cv_across_gpus(trace_of({{100}, {100}}), CounterKind::GPU_UTIL) == Approx(0.0));
    CHECK(*cv_across_gpus(trace_of({{0}, {100}}), CounterKind::GPU_UTIL) == Approx(100.0));
    auto cv = *cv_across_gpus(trace_of({{100}, {40}, {100}, {100}}), CounterKind::GPU_UTIL);
    CHECK(cv == Approx(100.0 * std::sqrt(675.0) / 85.0).epsilon(1e-9));  // ~30.57%
    CHECK_FALSE(cv_across_gpus(trace_of({{0}, {0}}), CounterKind::GPU_UTIL).has_value());
    CHECK_FALSE(cv_across_gpus(trace_of({{50}}), CounterKind::GPU_UTIL).has_value());
}

TEST_CASE("underutilized fraction") {
    CHECK(*underutilized_fraction(trace_of({{100}, {40}, {100}, {100}}), CounterKind::GPU_UTIL) ==
          Approx(0.25));
    CHECK(*underutilized_fraction(trace_of({{100}, {0}, {0}, {0}}), CounterKind::GPU_UTIL) ==
          Approx(0.75));
    CHECK(*underutilized_fraction(trace_of({{100}, {100}}), CounterKind::GPU_UTIL) == Approx(0.0));
}

TEST_CASE("spatial burstiness event rule") {
    auto si_seq = [](std::vector<double> vals) {
        std::vector<std::pair<std::int64_t, double>> out;
        for (std::size_t i = 0; i < vals.size(); ++i)
            out.emplace_back(static_cast<std::int64_t>(i), vals[i]);
        return out;
    };
    // alternating 0.1/0.5: an event at every window
    CHECK(*spatial_burstiness(si_seq({0.1, 0.5, 0.1, 0.5, 0.1, 0.5}), 60, 0.15) == Approx(-1.0));
    // constant: no events
    CHECK_FALSE(spatial_burstiness(si_seq({0.3, 0.3, 0.3, 0.3}), 60, 0.15).has_value());
    // events at windows 2, 4, 6: interevent gaps equal
    CHECK(*spatial_burstiness(si_seq({0.1, 0.1, 0.4, 0.4, 0.8, 0.8, 0.1}), 60, 0.15) ==
          Approx(-1.0));
}

TEST_CASE("gpu hours") {
    JobRecord r;
    r.start = 0;
    r.end = 3600;
    r.gpus_allocated = 4;
    CHECK(gpu_hours(r) == Approx(4.0));
    r.end = 0;
    CHECK(gpu_hours(r) == 0.0);
    r.end = 1800;
    r.gpus_allocated = 1;
    CHECK(gpu_hours(r) == Approx(0.5));
}

TEST_CASE("single GPU jobs have no spatial metrics and SI identity holds") {
    auto t = trace_of({{50, 80, 10, 90}});
    auto m = compute_job_metrics(t, CounterKind::GPU_UTIL, {});
    REQUIRE(m.has_value());
    CHECK_FALSE(m->spatial_imbalance.has_value());
    CHECK_FALSE(m->cv_percent.has_value());
    CHECK_FALSE(m->underutilized_fraction.has_value());
    CHECK_FALSE(m->spatial_burstiness.has_value());
}

TEST_CASE("one-hot limit: SI = 1 - 1/g in every window") {
    for (int g : {2, 4, 8}) {
        std::vector<std::vector<double>> per_gpu(g, std::vector<double>(20, 0.0));
        per_gpu[0].assign(20, 80.0);
        auto t = trace_of(per_gpu);
        auto m = compute_job_metrics(t, CounterKind::GPU_UTIL, {});
        REQUIRE(m.has_value());
        CHECK(*m->spatial_imbalance == Approx(1.0 - 1.0 / g).epsilon(1e-12));
    }
}

TEST_CASE("scale invariance of SI, TI, B, CV; M scales") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const int g = static_cast<int>(rng.next_int(2, 4));
        const int n = static_cast<int>(rng.next_int(5, 40));
        std::vector<std::vector<double>> per_gpu(g);
        for (auto& v : per_gpu)
            for (int i = 0; i < n; ++i) v.push_back(rng.next_range(0, 100));
        const double k = rng.next_range(0.1, 3.0);
        auto scaled = per_gpu;
        for (auto& v : scaled)
            for (auto& x : v) x *= k;

        auto a = compute_job_metrics(trace_of(per_gpu), CounterKind::GPU_UTIL, {});
        // Scale the event threshold along with the data so B compares too.
        MetricConfig scaled_cfg;
        scaled_cfg.event_threshold = 15.0 * k;
        auto b = compute_job_metrics(trace_of(scaled), CounterKind::GPU_UTIL, scaled_cfg);
        REQUIRE(a);
        REQUIRE(b);
        CHECK(b->mean == Approx(a->mean * k).epsilon(1e-9));
        CHECK(*b->spatial_imbalance == Approx(*a->spatial_imbalance).epsilon(1e-9));
        CHECK(b->temporal_imbalance == Approx(a->temporal_imbalance).epsilon(1e-9));
        CHECK(*b->cv_percent == Approx(*a->cv_percent).epsilon(1e-9));
        CHECK(*b->underutilized_fraction == Approx(*a->underutilized_fraction));
        CHECK(a->burstiness.has_value() == b->burstiness.has_value());
        if (a->burstiness) CHECK(*b->burstiness == Approx(*a->burstiness).epsilon(1e-9));
    }
}

TEST_CASE("permutation invariance under GPU relabeling") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const int g = 4;
        std::vector<std::vector<double>> per_gpu(g);
        for (auto& v : per_gpu)
            for (int i = 0; i < 20; ++i) v.push_back(rng.next_range(0, 100));
        auto rotated = per_gpu;
        std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());

        auto a = compute_job_metrics(trace_of(per_gpu), CounterKind::GPU_UTIL, {});
        auto b = compute_job_metrics(trace_of(rotated), CounterKind::GPU_UTIL, {});
        REQUIRE(a);
        REQUIRE(b);
        CHECK(b->mean == Approx(a->mean).epsilon(1e-9));
        CHECK(*b->spatial_imbalance == Approx(*a->spatial_imbalance).epsilon(1e-9));
        CHECK(b->temporal_imbalance == Approx(a->temporal_imbalance).epsilon(1e-9));
        CHECK(*b->cv_percent == Approx(*a->cv_percent).epsilon(1e-9));
        if (a->burstiness) CHECK(*b->burstiness == Approx(*a->burstiness).epsilon(1e-9));
    }
}
