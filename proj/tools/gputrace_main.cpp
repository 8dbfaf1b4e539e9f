#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gputrace/cleanse.hpp"
#include "gputrace/hostlist.hpp"
#include "gputrace/ingest.hpp"
#include "gputrace/metrics.hpp"
#include "gputrace/report.hpp"
#include "gputrace/store.hpp"
#include "gputrace/synth.hpp"

namespace fs = std::filesystem;
using namespace gputrace;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 ok, 2 IO, 3 parse, 4 config, 5 schema.
constexpr int kExitIo = 2;
constexpr int kExitParse = 3;
constexpr int kExitConfig = 4;
constexpr int kExitSchema = 5;

struct ExitError {
    int code;
    std::string message;
};

bool g_quiet = false;

void note(const std::string& msg) {
    if (!g_quiet) std::cerr << msg << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ExitError{kExitIo, "cannot read " + path};
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// Write-to-temp, rename-on-success: no partial output survives a failure.
void write_file_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw ExitError{kExitIo, "cannot write " + tmp.string()};
        f << content;
        if (!f) throw ExitError{kExitIo, "write failed for " + tmp.string()};
    }
    fs::rename(tmp, target);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    std::ifstream f(spec_path);
    if (!f) throw ExitError{kExitIo, "cannot read " + spec_path};
    SynthSpec spec;
    try {
        spec = SynthSpec::load(f);
    } catch (const std::exception& e) {
        throw ExitError{kExitConfig, e.what()};
    }
    auto out = generate(spec);
    fs::create_directories(out_dir);
    write_file_atomic((fs::path(out_dir) / "samples.csv").string(), out.samples_csv);
    write_file_atomic((fs::path(out_dir) / "jobs.csv").string(), out.jobs_csv);
    write_file_atomic((fs::path(out_dir) / "ground_truth.csv").string(), out.ground_truth_csv);
    note("synth: wrote " + out_dir);
    return 0;
}

int cmd_ingest(const std::string& samples_path, const std::string& jobs_path,
               const std::string& out_path, SampleFormat format, ErrorPolicy policy) {
    auto t0 = std::chrono::steady_clock::now();
    const std::string samples_raw = read_file(samples_path);
    const std::string jobs_raw = read_file(jobs_path);

    ParseStats sample_stats, job_stats;
    std::vector<CounterSample> samples;
    std::vector<JobRecord> jobs;
    try {
        std::istringstream ss(samples_raw);
        samples = parse_samples(ss, format, policy, sample_stats);
        std::istringstream js(jobs_raw);
        jobs = parse_jobs(js, policy, job_stats);
    } catch (const ParseError& e) {
        throw ExitError{kExitParse, e.what()};
    }
    for (const auto& err : sample_stats.errors)
        note("ingest: samples line " + std::to_string(err.line_no) + ": " + err.message);
    for (const auto& err : job_stats.errors)
        note("ingest: jobs line " + std::to_string(err.line_no) + ": " + err.message);

    AssignResult assigned;
    try {
        assigned = assign_samples(samples, jobs);
    } catch (const HostlistError& e) {
        throw ExitError{kExitParse, e.what()};
    }

    std::ostringstream store;
    write_trace_store(store, assigned.traces);

    RunManifest m;
    m.tool_version = kVersion;
    m.input_digests["samples"] = digest_hex(samples_raw);
    m.input_digests["jobs"] = digest_hex(jobs_raw);
    m.counts["parsed"] = static_cast<std::int64_t>(samples.size());
    m.counts["matched"] = static_cast<std::int64_t>(samples.size() - assigned.unmatched);
    m.counts["unmatched"] = static_cast<std::int64_t>(assigned.unmatched);
    m.counts["sample_rows"] = static_cast<std::int64_t>(sample_stats.rows);
    m.counts["sample_errors"] = static_cast<std::int64_t>(sample_stats.errors.size());
    m.counts["unknown_counter"] = static_cast<std::int64_t>(sample_stats.unknown_counter);
    m.counts["jobs"] = static_cast<std::int64_t>(jobs.size());
    m.counts["job_errors"] = static_cast<std::int64_t>(job_stats.errors.size());
    m.wall_time_s["ingest"] = seconds_since(t0);

    write_file_atomic(out_path, store.str());
    write_file_atomic(out_path + ".manifest.json", m.to_json());
    note("ingest: " + std::to_string(samples.size()) + " samples, " +
         std::to_string(jobs.size()) + " jobs, " + std::to_string(assigned.unmatched) +
         " unmatched");
    return 0;
}

int cmd_clean(const std::string& store_path, const std::string& out_path,
              const std::string& audit_path, const std::string& labels_path,
              const std::string& config_path) {
    auto t0 = std::chrono::steady_clock::now();
    FilterConfig cfg;
    std::string config_raw;
    if (!config_path.empty()) {
        config_raw = read_file(config_path);
        std::istringstream cs(config_raw);
        try {
            cfg = FilterConfig::load(cs);
        } catch (const std::exception& e) {
            throw ExitError{kExitConfig, e.what()};
        }
    }
    const std::string store_raw = read_file(store_path);
    std::istringstream ss(store_raw);
    std::vector<JobTrace> traces;
    try {
        traces = read_trace_store(ss);
    } catch (const std::exception& e) {
        throw ExitError{kExitParse, e.what()};
    }

    std::vector<JobTrace> kept;
    std::ostringstream audit;
    audit << "job_id,reasons\n";
    std::map<std::string, bool> labels;
    std::map<std::string, std::int64_t> reason_counts;
    std::int64_t rejected = 0;
    for (const auto& t : traces) {
        auto outcome = filter_job(t, cfg);
        if (outcome.kept) {
            labels[t.record.job_id] = classify_ml(t.record, cfg);
            kept.push_back(t);
        } else {
            ++rejected;
            std::string reasons;
            for (auto r : outcome.reasons) {
                if (!reasons.empty()) reasons += ';';
                reasons += reject_reason_name(r);
                ++reason_counts["rejected_" + std::string(reject_reason_name(r))];
            }
            audit << t.record.job_id << ',' << reasons << "\n";
        }
    }

    std::ostringstream out_store;
    write_trace_store(out_store, kept);
    std::ostringstream labels_csv;
    write_labels_csv(labels_csv, labels);

    RunManifest m;
    m.tool_version = kVersion;
    m.input_digests["store"] = digest_hex(store_raw);
    m.config_digest = digest_hex(config_raw);
    m.counts["jobs_in"] = static_cast<std::int64_t>(traces.size());
    m.counts["kept"] = static_cast<std::int64_t>(kept.size());
    m.counts["rejected"] = rejected;
    for (const auto& [k, v] : reason_counts) m.counts[k] = v;
    m.wall_time_s["clean"] = seconds_since(t0);

    write_file_atomic(out_path, out_store.str());
    write_file_atomic(audit_path, audit.str());
    if (!labels_path.empty()) write_file_atomic(labels_path, labels_csv.str());
    write_file_atomic(out_path + ".manifest.json", m.to_json());
    note("clean: kept " + std::to_string(kept.size()) + " of " + std::to_string(traces.size()));
    return 0;
}

int cmd_metrics(const std::string& store_path, const std::string& out_path,
                const std::vector<std::string>& counter_names, const MetricConfig& mcfg,
                int threads) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<CounterKind> counters;
    for (const auto& name : counter_names) {
        auto k = counter_from_name(name);
        if (!k) throw ExitError{kExitConfig, "unknown counter name: " + name};
        counters.push_back(*k);
    }
    const std::string store_raw = read_file(store_path);
    std::istringstream ss(store_raw);
    std::vector<JobTrace> traces;
    try {
        traces = read_trace_store(ss);
    } catch (const std::exception& e) {
        throw ExitError{kExitParse, e.what()};
    }

    // Per-trace slots keep the output independent of thread scheduling.
    std::vector<std::vector<JobMetrics>> slots(traces.size());
    parallel_for(traces.size(), threads, [&](std::size_t i) {
        for (auto counter : counters) {
            if (auto m = compute_job_metrics(traces[i], counter, mcfg)) slots[i].push_back(*m);
        }
    });
    std::vector<JobMetrics> rows;
    for (auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
    std::sort(rows.begin(), rows.end(), [](const JobMetrics& a, const JobMetrics& b) {
        return std::tie(a.job_id, a.counter) < std::tie(b.job_id, b.counter);
    });

    std::ostringstream csv;
    write_metrics_csv(csv, rows);

    RunManifest m;
    m.tool_version = kVersion;
    m.input_digests["store"] = digest_hex(store_raw);
    m.counts["jobs_in"] = static_cast<std::int64_t>(traces.size());
    m.counts["metric_rows"] = static_cast<std::int64_t>(rows.size());
    m.wall_time_s["metrics"] = seconds_since(t0);

    write_file_atomic(out_path, csv.str());
    write_file_atomic(out_path + ".manifest.json", m.to_json());
    note("metrics: " + std::to_string(rows.size()) + " rows");
    return 0;
}

int cmd_report(const std::string& metrics_path, const std::string& labels_path,
               const std::string& out_dir, const ReportOptions& opts) {
    const std::string metrics_raw = read_file(metrics_path);
    std::vector<JobMetrics> rows;
    try {
        std::istringstream ms(metrics_raw);
        rows = read_metrics_csv(ms);
    } catch (const SchemaError& e) {
        throw ExitError{kExitSchema, e.what()};
    } catch (const std::exception& e) {
        throw ExitError{kExitParse, e.what()};
    }
    std::map<std::string, bool> labels;
    std::map<std::string, std::string> chain;
    chain["metrics"] = digest_hex(metrics_raw);
    if (!labels_path.empty()) {
        const std::string labels_raw = read_file(labels_path);
        std::istringstream ls(labels_raw);
        labels = read_labels_csv(ls);
        chain["labels"] = digest_hex(labels_raw);
    }
    // Chain in the upstream manifest when it sits next to the metrics file.
    // Wall-clock timings are excluded so reruns over identical inputs chain
    // to identical digests.
    const std::string upstream = metrics_path + ".manifest.json";
    if (fs::exists(upstream)) {
        std::ifstream mf(upstream);
        auto m = RunManifest::from_json(mf);
        std::string stable = m.tool_version + "|" + m.config_digest;
        for (const auto& [k, v] : m.input_digests) stable += "|" + k + "=" + v;
        for (const auto& [k, v] : m.counts) stable += "|" + k + "=" + std::to_string(v);
        chain["metrics_manifest"] = digest_hex(stable);
    }

    write_report_bundle(rows, labels, opts, out_dir, chain);
    note("report: wrote " + out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GPU telemetry and job-accounting characterization toolkit"};
    app.set_version_flag("--version", kVersion);
    std::string global_config;
    int threads = 1;
    app.add_option("--config", global_config, "filter config file (key=value)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", g_quiet, "suppress progress output");
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string spec_path, synth_out;
    synth->add_option("--spec", spec_path, "synth spec JSON")->required();
    synth->add_option("--out", synth_out, "output directory")->required();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "join samples to jobs");
    std::string samples_path, jobs_path, ingest_out, format_name = "wide_csv",
                on_error = "skip";
    ingest->add_option("--samples", samples_path, "counter sample file")->required();
    ingest->add_option("--jobs", jobs_path, "job accounting CSV")->required();
    ingest->add_option("--out", ingest_out, "trace store output")->required();
    ingest->add_option("--format", format_name, "wide_csv|long_jsonl|prom_matrix");
    ingest->add_option("--on-error", on_error, "skip|abort");

    // clean
    auto* clean = app.add_subcommand("clean", "apply the cleaning filter chain");
    std::string clean_store, clean_out, audit_path = "audit.csv", labels_path;
    clean->add_option("--store", clean_store, "trace store from ingest")->required();
    clean->add_option("--out", clean_out, "filtered trace store")->required();
    clean->add_option("--audit", audit_path, "rejection audit CSV");
    clean->add_option("--labels", labels_path, "ML label CSV for kept jobs");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "compute per-job metrics");
    std::string metrics_store, metrics_out;
    std::vector<std::string> counter_names = {"GPU_UTIL"};
    MetricConfig mcfg;
    metrics->add_option("--store", metrics_store, "cleaned trace store")->required();
    metrics->add_option("--out", metrics_out, "metrics CSV output")->required();
    metrics->add_option("--counters", counter_names, "counters to evaluate")->delimiter(',');
    metrics->add_option("--window", mcfg.window_len_s, "window length, seconds")
        ->check(CLI::PositiveNumber);
    metrics->add_option("--threshold", mcfg.event_threshold, "event threshold, percent");
    metrics->add_option("--period", mcfg.sample_period_s, "nominal sample period, seconds")
        ->check(CLI::PositiveNumber);

    // report
    auto* report = app.add_subcommand("report", "aggregate metrics into the report bundle");
    std::string report_metrics, report_labels, report_out, weight_name = "count";
    ReportOptions ropts;
    report->add_option("--metrics", report_metrics, "metrics CSV")->required();
    report->add_option("--labels", report_labels, "ML label CSV");
    report->add_option("--out", report_out, "report bundle directory")->required();
    report->add_option("--weight", weight_name, "count|gpu_hours");
    report->add_option("--floor", ropts.activity_floor, "activity floor, percent");
    report->add_option("--bins", ropts.heatmap_bins, "heatmap bins")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(spec_path, synth_out);
        if (*ingest) {
            SampleFormat format;
            if (format_name == "wide_csv")
                format = SampleFormat::wide_csv;
            else if (format_name == "long_jsonl")
                format = SampleFormat::long_jsonl;
            else if (format_name == "prom_matrix")
                format = SampleFormat::prom_matrix;
            else
                throw ExitError{kExitConfig, "unknown format: " + format_name};
            if (on_error != "skip" && on_error != "abort")
                throw ExitError{kExitConfig, "unknown error policy: " + on_error};
            return cmd_ingest(samples_path, jobs_path, ingest_out, format,
                              on_error == "abort" ? ErrorPolicy::abort
                                                  : ErrorPolicy::skip_and_log);
        }
        if (*clean)
            return cmd_clean(clean_store, clean_out, audit_path, labels_path, global_config);
        if (*metrics) return cmd_metrics(metrics_store, metrics_out, counter_names, mcfg, threads);
        if (*report) {
            if (weight_name == "gpu_hours")
                ropts.weight = HistWeight::gpu_hours;
            else if (weight_name != "count")
                throw ExitError{kExitConfig, "unknown weight: " + weight_name};
            return cmd_report(report_metrics, report_labels, report_out, ropts);
        }
    } catch (const ExitError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
