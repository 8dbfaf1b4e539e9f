#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gputrace/types.hpp"

namespace gputrace {

enum class UtilBand { low, medium, high };  // <30, 30..70, >70

UtilBand util_band(double mean);

// Decile bin for a 0-100 value; 100 lands in bin 9.
int decile_bin(double mean);

enum class HistWeight { count, gpu_hours };

struct BandHistogram {
    std::array<double, 10> bins{};  // weight per decile
    std::vector<double> cdf;        // running share per decile; empty when no input
    double total = 0.0;
};

BandHistogram band_histogram(const std::vector<JobMetrics>& metrics, HistWeight weight);

// Which of the four precision/tensor core counters a job keeps busy.
struct CoreComboKey {
    bool fp16 = false, fp32 = false, fp64 = false, tensor = false;

    auto operator<=>(const CoreComboKey&) const = default;
    bool empty() const { return !fp16 && !fp32 && !fp64 && !tensor; }
    std::string label() const;  // e.g. "FP64+TENSOR"
};

struct CoreComboStats {
    std::map<CoreComboKey, std::size_t> counts;
    std::map<CoreComboKey, double> shares;  // over included jobs
    std::size_t included = 0;
    std::size_t excluded = 0;   // jobs with every core below the floor
    std::size_t fp16_star = 0;  // jobs in any FP16-containing subset
};

// metrics_by_job: per job id, the per-counter job means (absent counters missing).
CoreComboStats core_combinations(
    const std::map<std::string, std::map<CounterKind, double>>& means_by_job,
    double activity_floor);

struct QuadrantKey {
    bool high_burstiness = false;  // B > 0
    bool high_ti = false;          // TI > 0.5

    auto operator<=>(const QuadrantKey&) const = default;
};

struct QuadrantCell {
    std::size_t jobs = 0;
    double gpu_hours = 0.0;
    std::array<std::size_t, 3> band_counts{};  // low/medium/high mean bands
};

struct QuadrantMatrix {
    std::map<QuadrantKey, QuadrantCell> cells;
    std::size_t unclassified = 0;  // jobs without a defined burstiness
    std::size_t total = 0;
};

QuadrantMatrix quadrant_matrix(const std::vector<JobMetrics>& metrics);

struct HeatmapCell {
    double mean = 0.0;
    std::size_t count = 0;
};

struct Heatmap {
    int bins = 10;
    double x_lo = 0, x_hi = 100, y_lo = 0, y_hi = 100;
    std::vector<HeatmapCell> cells;  // row-major [y * bins + x]

    HeatmapCell& at(int x, int y) { return cells[static_cast<std::size_t>(y) * bins + x]; }
    const HeatmapCell& at(int x, int y) const {
        return cells[static_cast<std::size_t>(y) * bins + x];
    }
};

Heatmap binned_heatmap(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<double>& zs, int bins, double x_lo, double x_hi,
                       double y_lo, double y_hi);

// Spearman rank correlation with average ranks for ties. Absent when either
// ranked side is constant or fewer than 2 pairs survive.
std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Pairwise-complete Spearman over optional-valued sequences.
std::optional<double> spearman_pairwise(const std::vector<std::optional<double>>& xs,
                                        const std::vector<std::optional<double>>& ys);

struct CorrelationMatrix {
    // [i][j] over kAllCounters; diagonal fixed at 1, symmetric, absent where
    // fewer than 2 jobs have both values.
    std::array<std::array<std::optional<double>, kCounterCount>, kCounterCount> cells;
};

struct CounterMetricTable {
    // Per job id: one optional value per counter.
    std::map<std::string, std::array<std::optional<double>, kCounterCount>> rows;
};

CorrelationMatrix correlation_matrix(const CounterMetricTable& table);

struct MlSplit {
    std::array<double, 10> ml_shares{};
    std::array<double, 10> non_ml_shares{};
    std::array<double, 10> ml_abs{};
    std::array<double, 10> non_ml_abs{};
    double ml_total = 0.0;
    double non_ml_total = 0.0;
};

MlSplit ml_split(const std::vector<JobMetrics>& metrics,
                 const std::map<std::string, bool>& ml_labels, HistWeight weight);

}  // namespace gputrace
