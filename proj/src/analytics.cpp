#include "gputrace/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gputrace {

UtilBand util_band(double mean) {
    if (mean < 30.0) return UtilBand::low;
    if (mean <= 70.0) return UtilBand::medium;
    return UtilBand::high;
}

int decile_bin(double mean) {
    int bin = static_cast<int>(mean / 10.0);
    return std::clamp(bin, 0, 9);
}

BandHistogram band_histogram(const std::vector<JobMetrics>& metrics, HistWeight weight) {
    BandHistogram h;
    for (const auto& m : metrics) {
        const double w = weight == HistWeight::count ? 1.0 : m.gpu_hours;
        h.bins[decile_bin(m.mean)] += w;
        h.total += w;
    }
    if (h.total > 0.0) {
        double run = 0.0;
        for (double b : h.bins) {
            run += b;
            h.cdf.push_back(run / h.total);
        }
    }
    return h;
}

std::string CoreComboKey::label() const {
    std::string out;
    auto add = [&](const char* name) {
        if (!out.empty()) out += '+';
        out += name;
    };
    if (fp16) add("FP16");
    if (fp32) add("FP32");
    if (fp64) add("FP64");
    if (tensor) add("TENSOR");
    return out.empty() ? "NONE" : out;
}

CoreComboStats core_combinations(
    const std::map<std::string, std::map<CounterKind, double>>& means_by_job,
    double activity_floor) {
    CoreComboStats stats;
    auto used = [&](const std::map<CounterKind, double>& means, CounterKind k) {
        auto it = means.find(k);
        return it != means.end() && it->second >= activity_floor;
    };
    for (const auto& [job, means] : means_by_job) {
        CoreComboKey key;
        key.fp16 = used(means, CounterKind::FP16_ACTV);
        key.fp32 = used(means, CounterKind::FP32_ACTV);
        key.fp64 = used(means, CounterKind::FP64_ACTV);
        key.tensor = used(means, CounterKind::TNSR_ACTV);
        if (key.empty()) {
            ++stats.excluded;
            continue;
        }
        ++stats.counts[key];
        ++stats.included;
        if (key.fp16) ++stats.fp16_star;
    }
    for (const auto& [key, n] : stats.counts)
        stats.shares[key] = static_cast<double>(n) / static_cast<double>(stats.included);
    return stats;
}

QuadrantMatrix quadrant_matrix(const std::vector<JobMetrics>& metrics) {
    QuadrantMatrix q;
    for (const auto& m : metrics) {
        ++q.total;
        if (!m.burstiness) {
            ++q.unclassified;
            continue;
        }
        QuadrantKey key{*m.burstiness > 0.0, m.temporal_imbalance > 0.5};
        auto& cell = q.cells[key];
        ++cell.jobs;
        cell.gpu_hours += m.gpu_hours;
        ++cell.band_counts[static_cast<int>(util_band(m.mean))];
    }
    return q;
}

Heatmap binned_heatmap(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<double>& zs, int bins, double x_lo, double x_hi,
                       double y_lo, double y_hi) {
    if (xs.size() != ys.size() || xs.size() != zs.size())
        throw std::invalid_argument("heatmap inputs must be aligned");
    Heatmap h;
    h.bins = bins;
    h.x_lo = x_lo;
    h.x_hi = x_hi;
    h.y_lo = y_lo;
    h.y_hi = y_hi;
    h.cells.assign(static_cast<std::size_t>(bins) * bins, {});
    auto bin_of = [bins](double v, double lo, double hi) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        return std::clamp(b, 0, bins - 1);
    };
    std::vector<double> sums(h.cells.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        int bx = bin_of(xs[i], x_lo, x_hi);
        int by = bin_of(ys[i], y_lo, y_hi);
        auto& cell = h.at(bx, by);
        sums[static_cast<std::size_t>(by) * bins + bx] += zs[i];
        ++cell.count;
    }
    for (std::size_t i = 0; i < h.cells.size(); ++i) {
        if (h.cells[i].count) h.cells[i].mean = sums[i] / static_cast<double>(h.cells[i].count);
    }
    return h;
}

namespace {

// Average ranks, 1-based; ties get the mean rank of their group.
std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;  // constant side
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("spearman: length mismatch");
    if (xs.size() < 2) return std::nullopt;
    return pearson(average_ranks(xs), average_ranks(ys));
}

std::optional<double> spearman_pairwise(const std::vector<std::optional<double>>& xs,
                                        const std::vector<std::optional<double>>& ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("spearman: length mismatch");
    std::vector<double> a, b;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] && ys[i]) {
            a.push_back(*xs[i]);
            b.push_back(*ys[i]);
        }
    }
    if (a.size() < 2) return std::nullopt;
    return spearman(a, b);
}

CorrelationMatrix correlation_matrix(const CounterMetricTable& table) {
    CorrelationMatrix m;
    std::array<std::vector<std::optional<double>>, kCounterCount> columns;
    for (const auto& [job, row] : table.rows) {
        for (int c = 0; c < kCounterCount; ++c) columns[c].push_back(row[c]);
    }
    for (int i = 0; i < kCounterCount; ++i) {
        m.cells[i][i] = 1.0;
        for (int j = i + 1; j < kCounterCount; ++j) {
            auto rho = spearman_pairwise(columns[i], columns[j]);
            m.cells[i][j] = rho;
            m.cells[j][i] = rho;
        }
    }
    return m;
}

MlSplit ml_split(const std::vector<JobMetrics>& metrics,
                 const std::map<std::string, bool>& ml_labels, HistWeight weight) {
    MlSplit s;
    for (const auto& m : metrics) {
        const double w = weight == HistWeight::count ? 1.0 : m.gpu_hours;
        auto it = ml_labels.find(m.job_id);
        const bool ml = it != ml_labels.end() && it->second;
        const int bin = decile_bin(m.mean);
        if (ml) {
            s.ml_abs[bin] += w;
            s.ml_total += w;
        } else {
            s.non_ml_abs[bin] += w;
            s.non_ml_total += w;
        }
    }
    for (int i = 0; i < 10; ++i) {
        if (s.ml_total > 0.0) s.ml_shares[i] = s.ml_abs[i] / s.ml_total;
        if (s.non_ml_total > 0.0) s.non_ml_shares[i] = s.non_ml_abs[i] / s.non_ml_total;
    }
    return s;
}

}  // namespace gputrace
