#include "gputrace/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gputrace {

namespace {

using nlohmann::json;

// Report bundle floats carry 6 significant digits.
std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

std::vector<JobMetrics> rows_for(const std::vector<JobMetrics>& rows, CounterKind counter) {
    std::vector<JobMetrics> out;
    for (const auto& m : rows)
        if (m.counter == counter) out.push_back(m);
    return out;
}

std::string quadrant_label(const QuadrantKey& k) {
    std::string out = k.high_burstiness ? "high_b" : "low_b";
    out += k.high_ti ? "_high_ti" : "_low_ti";
    return out;
}

}  // namespace

void write_report_bundle(const std::vector<JobMetrics>& rows,
                         const std::map<std::string, bool>& ml_labels, const ReportOptions& opts,
                         const std::string& out_dir,
                         const std::map<std::string, std::string>& digest_chain) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    const auto util_rows = rows_for(rows, CounterKind::GPU_UTIL);

    // Per-job per-counter means, and the metric tables for correlations.
    std::map<std::string, std::map<CounterKind, double>> means_by_job;
    CounterMetricTable mean_table, si_table, ti_table;
    std::map<std::string, bool> has_active_precision;
    for (const auto& m : rows) {
        means_by_job[m.job_id][m.counter] = m.mean;
        const bool precision =
            m.counter == CounterKind::FP16_ACTV || m.counter == CounterKind::FP32_ACTV ||
            m.counter == CounterKind::FP64_ACTV || m.counter == CounterKind::TNSR_ACTV;
        if (precision && m.mean >= opts.activity_floor) has_active_precision[m.job_id] = true;
    }
    std::size_t correlation_population = 0;
    for (const auto& m : rows) {
        if (!has_active_precision.count(m.job_id)) continue;
        // Per-counter floor inside each analysis population; HBM_USED is in
        // MB, the percent floor does not apply to it.
        if (is_fraction_counter(m.counter) && m.mean < opts.activity_floor) continue;
        const int c = static_cast<int>(m.counter);
        mean_table.rows[m.job_id][c] = m.mean;
        si_table.rows[m.job_id][c] = m.spatial_imbalance;
        ti_table.rows[m.job_id][c] = m.temporal_imbalance;
    }
    correlation_population = mean_table.rows.size();

    // histograms.csv
    {
        auto by_count = band_histogram(util_rows, HistWeight::count);
        auto by_hours = band_histogram(util_rows, HistWeight::gpu_hours);
        std::ostringstream os;
        os << "bin_lo,bin_hi,count,count_cdf,gpu_hours,gpu_hours_cdf\n";
        for (int b = 0; b < 10; ++b) {
            os << b * 10 << ',' << (b + 1) * 10 << ',' << fmt6(by_count.bins[b]) << ','
               << (by_count.cdf.empty() ? "" : fmt6(by_count.cdf[b])) << ','
               << fmt6(by_hours.bins[b]) << ','
               << (by_hours.cdf.empty() ? "" : fmt6(by_hours.cdf[b])) << "\n";
        }
        write_file(dir / "histograms.csv", os.str());
    }

    // quadrants.csv
    auto quads = quadrant_matrix(util_rows);
    {
        std::ostringstream os;
        os << "quadrant,jobs,gpu_hours,low_pct,medium_pct,high_pct\n";
        for (bool hb : {false, true}) {
            for (bool hti : {false, true}) {
                QuadrantKey key{hb, hti};
                QuadrantCell cell;
                if (auto it = quads.cells.find(key); it != quads.cells.end()) cell = it->second;
                os << quadrant_label(key) << ',' << cell.jobs << ',' << fmt6(cell.gpu_hours);
                for (int band = 0; band < 3; ++band) {
                    double pct = cell.jobs ? 100.0 * static_cast<double>(cell.band_counts[band]) /
                                                 static_cast<double>(cell.jobs)
                                           : 0.0;
                    os << ',' << fmt6(pct);
                }
                os << "\n";
            }
        }
        os << "unclassified," << quads.unclassified << ",,,,\n";
        write_file(dir / "quadrants.csv", os.str());
    }

    // core_combos.csv
    auto combos = core_combinations(means_by_job, opts.activity_floor);
    {
        std::ostringstream os;
        os << "combo,jobs,share\n";
        for (const auto& [key, n] : combos.counts)
            os << key.label() << ',' << n << ',' << fmt6(combos.shares.at(key)) << "\n";
        os << "FP16*," << combos.fp16_star << ','
           << fmt6(combos.included ? static_cast<double>(combos.fp16_star) /
                                         static_cast<double>(combos.included)
                                   : 0.0)
           << "\n";
        os << "EXCLUDED," << combos.excluded << ",\n";
        write_file(dir / "core_combos.csv", os.str());
    }

    // heatmap_mean_si_ti.csv (GPU_UTIL jobs with a defined spatial imbalance)
    std::size_t heatmap_dropped = 0;
    {
        std::vector<double> xs, ys, zs;
        for (const auto& m : util_rows) {
            if (!m.spatial_imbalance) {
                ++heatmap_dropped;
                continue;
            }
            xs.push_back(m.mean);
            ys.push_back(*m.spatial_imbalance);
            zs.push_back(m.temporal_imbalance);
        }
        auto h = binned_heatmap(xs, ys, zs, opts.heatmap_bins, 0.0, 100.0, 0.0, 1.0);
        std::ostringstream os;
        os << "bin_x,bin_y,value,empty_flag\n";
        for (int y = 0; y < h.bins; ++y) {
            for (int x = 0; x < h.bins; ++x) {
                const auto& cell = h.at(x, y);
                os << x << ',' << y << ',' << (cell.count ? fmt6(cell.mean) : "") << ','
                   << (cell.count ? 0 : 1) << "\n";
            }
        }
        write_file(dir / "heatmap_mean_si_ti.csv", os.str());
    }

    // correlation_{means,si,ti}.csv
    auto write_matrix = [&](const char* name, const CounterMetricTable& table) {
        auto m = correlation_matrix(table);
        std::ostringstream os;
        os << "counter";
        for (auto k : kAllCounters) os << ',' << counter_name(k);
        os << "\n";
        for (int i = 0; i < kCounterCount; ++i) {
            os << counter_name(kAllCounters[i]);
            for (int j = 0; j < kCounterCount; ++j) {
                os << ',';
                if (m.cells[i][j]) os << fmt6(*m.cells[i][j]);
            }
            os << "\n";
        }
        write_file(dir / name, os.str());
    };
    write_matrix("correlation_means.csv", mean_table);
    write_matrix("correlation_si.csv", si_table);
    write_matrix("correlation_ti.csv", ti_table);

    // summary.json
    {
        auto split = ml_split(util_rows, ml_labels, opts.weight);
        std::array<std::size_t, 3> band_counts{};
        double total_gpu_hours = 0.0;
        for (const auto& m : util_rows) {
            ++band_counts[static_cast<int>(util_band(m.mean))];
            total_gpu_hours += m.gpu_hours;
        }
        json j;
        j["jobs"] = util_rows.size();
        j["metric_rows"] = rows.size();
        j["total_gpu_hours"] = total_gpu_hours;
        j["bands"] = {{"low", band_counts[0]}, {"medium", band_counts[1]}, {"high", band_counts[2]}};
        j["quadrants"] = {{"classified", quads.total - quads.unclassified},
                          {"unclassified", quads.unclassified},
                          {"total", quads.total}};
        j["core_combos"] = {{"included", combos.included},
                            {"excluded", combos.excluded},
                            {"fp16_star", combos.fp16_star}};
        j["correlation_population"] = correlation_population;
        j["dropped_absent"] = {{"heatmap", heatmap_dropped}};
        j["ml_split"] = {{"ml_total", split.ml_total},
                         {"non_ml_total", split.non_ml_total},
                         {"ml_shares", split.ml_shares},
                         {"non_ml_shares", split.non_ml_shares},
                         {"ml_abs", split.ml_abs},
                         {"non_ml_abs", split.non_ml_abs}};
        j["weight"] = opts.weight == HistWeight::count ? "count" : "gpu_hours";
        j["digest_chain"] = digest_chain;
        write_file(dir / "summary.json", j.dump(2) + "\n");
    }
}

}  // namespace gputrace
