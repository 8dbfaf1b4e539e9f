#pragma once

#include <map>
#include <string>
#include <vector>

#include "gputrace/analytics.hpp"
#include "gputrace/types.hpp"

namespace gputrace {

struct ReportOptions {
    HistWeight weight = HistWeight::count;
    double activity_floor = 1.0;  // per-counter mean floor for analysis populations
    int heatmap_bins = 10;
};

// Writes the full report bundle into out_dir: summary.json, histograms.csv,
// quadrants.csv, core_combos.csv, heatmap_mean_si_ti.csv and the three
// correlation CSVs. digest_chain is embedded into summary.json untouched.
void write_report_bundle(const std::vector<JobMetrics>& rows,
                         const std::map<std::string, bool>& ml_labels, const ReportOptions& opts,
                         const std::string& out_dir,
                         const std::map<std::string, std::string>& digest_chain);

}  // namespace gputrace
