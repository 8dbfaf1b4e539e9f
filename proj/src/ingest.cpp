#include "gputrace/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "gputrace/csv.hpp"
#include "gputrace/hostlist.hpp"

namespace gputrace {

const char* const kWideCsvHeader =
    "timestamp,node,gpu,DCGM_FI_DEV_GPU_UTIL,DCGM_FI_DEV_MEM_COPY_UTIL,"
    "DCGM_FI_PROF_PIPE_FP16_ACTIVE,DCGM_FI_PROF_PIPE_FP32_ACTIVE,"
    "DCGM_FI_PROF_PIPE_FP64_ACTIVE,DCGM_FI_PROF_PIPE_TENSOR_ACTIVE,"
    "DCGM_FI_PROF_SM_ACTIVE,DCGM_FI_DEV_FB_USED";

const char* const kJobCsvHeader =
    "JobID,StepID,User,UserClass,Partition,State,Start,End,NodeList,AllocGPUS,SubmitLine";

namespace {

using nlohmann::json;

void report(ParseStats& stats, ErrorPolicy policy, std::size_t line_no, std::string msg) {
    if (policy == ErrorPolicy::abort)
        throw ParseError("line " + std::to_string(line_no) + ": " + msg);
    stats.errors.push_back({line_no, std::move(msg)});
}

bool parse_i64(std::string_view s, std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool strip_line(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return !line.empty();
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<CounterSample> parse_wide_csv(std::istream& in, ErrorPolicy policy,
                                          ParseStats& stats) {
    std::vector<CounterSample> out;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: missing wide CSV header");
    strip_line(line);
    if (line != kWideCsvHeader) throw ParseError("unexpected wide CSV header: " + line);

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!strip_line(line)) continue;
        ++stats.rows;
        auto fields = csv_split(line);
        if (fields.size() != 3 + kCounterCount) {
            report(stats, policy, line_no, "expected 11 fields, got " + std::to_string(fields.size()));
            continue;
        }
        std::int64_t ts = 0;
        int gpu = 0;
        std::int64_t gpu_raw = 0;
        if (!parse_i64(fields[0], ts) || ts <= 0) {
            report(stats, policy, line_no, "bad timestamp '" + fields[0] + "'");
            continue;
        }
        if (!parse_i64(fields[2], gpu_raw) || gpu_raw < 0) {
            report(stats, policy, line_no, "bad gpu index '" + fields[2] + "'");
            continue;
        }
        gpu = static_cast<int>(gpu_raw);

        std::vector<CounterSample> row;
        bool bad = false;
        for (int i = 0; i < kCounterCount; ++i) {
            const std::string& cell = fields[3 + i];
            if (cell.empty()) continue;  // missing reading
            double v = 0.0;
            if (!parse_real(cell, v) || !std::isfinite(v) || v < 0.0) {
                report(stats, policy, line_no, "bad value '" + cell + "' for " +
                                                   std::string(counter_name(kAllCounters[i])));
                bad = true;
                break;
            }
            row.push_back({ts, fields[1], gpu, kAllCounters[i], v});
        }
        if (bad) continue;
        stats.samples += row.size();
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

std::vector<CounterSample> parse_long_jsonl(std::istream& in, ErrorPolicy policy,
                                            ParseStats& stats) {
    std::vector<CounterSample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!strip_line(line)) continue;
        ++stats.rows;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            report(stats, policy, line_no, "malformed JSON object");
            continue;
        }
        if (!j.contains("ts") || !j.contains("node") || !j.contains("gpu") ||
            !j.contains("counter") || !j.contains("value")) {
            report(stats, policy, line_no, "missing required key");
            continue;
        }
        auto kind = counter_from_name(j["counter"].get<std::string>());
        if (!kind) {
            ++stats.unknown_counter;
            continue;
        }
        CounterSample s;
        if (!j["ts"].is_number() || !j["gpu"].is_number_integer() || !j["value"].is_number() ||
            !j["node"].is_string()) {
            report(stats, policy, line_no, "wrong field type");
            continue;
        }
        s.timestamp = j["ts"].get<std::int64_t>();
        s.node = j["node"].get<std::string>();
        s.gpu_index = j["gpu"].get<int>();
        s.counter = *kind;
        s.value = j["value"].get<double>();
        if (s.timestamp <= 0 || s.gpu_index < 0 || !std::isfinite(s.value) || s.value < 0.0) {
            report(stats, policy, line_no, "value out of domain");
            continue;
        }
        ++stats.samples;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CounterSample> parse_prom_matrix(std::istream& in, ErrorPolicy policy,
                                             ParseStats& stats) {
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ParseError("malformed Prometheus matrix document");
    // Accept either the bare {"result": ...} shape or the full API envelope
    // {"data": {"result": ...}}.
    const json* result = nullptr;
    if (doc.contains("result"))
        result = &doc["result"];
    else if (doc.contains("data") && doc["data"].contains("result"))
        result = &doc["data"]["result"];
    if (!result || !result->is_array())
        throw ParseError("Prometheus document has no result array");

    std::vector<CounterSample> out;
    std::size_t series_no = 0;
    for (const auto& series : *result) {
        ++series_no;
        ++stats.rows;
        if (!series.contains("metric") || !series.contains("values")) {
            report(stats, policy, series_no, "series missing metric/values");
            continue;
        }
        const auto& metric = series["metric"];
        if (!metric.contains("__name__") || !metric.contains("node") || !metric.contains("gpu")) {
            report(stats, policy, series_no, "metric labels missing __name__/node/gpu");
            continue;
        }
        auto kind = counter_from_name(metric["__name__"].get<std::string>());
        if (!kind) {
            stats.unknown_counter += series["values"].size();
            continue;
        }
        std::string node = metric["node"].get<std::string>();
        int gpu = 0;
        if (metric["gpu"].is_string()) {
            std::int64_t g = 0;
            if (!parse_i64(metric["gpu"].get<std::string>(), g) || g < 0) {
                report(stats, policy, series_no, "bad gpu label");
                continue;
            }
            gpu = static_cast<int>(g);
        } else {
            gpu = metric["gpu"].get<int>();
        }
        for (const auto& pair : series["values"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                !pair[1].is_string()) {
                report(stats, policy, series_no, "malformed value pair");
                continue;
            }
            std::int64_t ts = static_cast<std::int64_t>(pair[0].get<double>());
            double v = 0.0;
            std::string vs = pair[1].get<std::string>();
            if (!parse_real(vs, v) || !std::isfinite(v) || v < 0.0 || ts <= 0) {
                report(stats, policy, series_no, "bad sample value '" + vs + "'");
                continue;
            }
            ++stats.samples;
            out.push_back({ts, node, gpu, *kind, v});
        }
    }
    return out;
}

}  // namespace

std::vector<CounterSample> parse_samples(std::istream& in, SampleFormat format,
                                         ErrorPolicy policy, ParseStats& stats) {
    switch (format) {
        case SampleFormat::wide_csv: return parse_wide_csv(in, policy, stats);
        case SampleFormat::long_jsonl: return parse_long_jsonl(in, policy, stats);
        case SampleFormat::prom_matrix: return parse_prom_matrix(in, policy, stats);
    }
    throw ParseError("unknown sample format");
}

std::vector<JobRecord> parse_jobs(std::istream& in, ErrorPolicy policy, ParseStats& stats) {
    std::vector<JobRecord> out;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: missing job CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kJobCsvHeader) throw ParseError("unexpected job CSV header: " + line);

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!strip_line(line)) continue;
        ++stats.rows;
        auto fields = csv_split(line);
        if (fields.size() != 11) {
            report(stats, policy, line_no,
                   "expected 11 fields, got " + std::to_string(fields.size()));
            continue;
        }
        JobRecord r;
        r.job_id = fields[0];
        r.step_id = fields[1];
        r.user = fields[2];
        r.user_class = lower(fields[3]) == "staff" ? UserClass::staff : UserClass::regular;
        r.partition = fields[4];
        std::string state = lower(fields[5]);
        if (state == "completed")
            r.state = JobState::completed;
        else if (state == "failed")
            r.state = JobState::failed;
        else if (state.rfind("cancelled", 0) == 0)
            r.state = JobState::cancelled;
        else
            r.state = JobState::other;
        std::int64_t gpus = 0;
        if (!parse_i64(fields[6], r.start) || !parse_i64(fields[7], r.end)) {
            report(stats, policy, line_no, "bad Start/End");
            continue;
        }
        if (r.end < r.start) {
            report(stats, policy, line_no, "End before Start for job " + r.job_id);
            continue;
        }
        r.nodelist_expr = fields[8];
        if (!parse_i64(fields[9], gpus) || gpus < 1) {
            report(stats, policy, line_no, "bad AllocGPUS '" + fields[9] + "'");
            continue;
        }
        r.gpus_allocated = static_cast<int>(gpus);
        r.submit_line = fields[10];
        out.push_back(std::move(r));
    }
    return out;
}

AssignResult assign_samples(const std::vector<CounterSample>& samples,
                            const std::vector<JobRecord>& jobs) {
    AssignResult res;
    res.traces.reserve(jobs.size());
    std::unordered_map<std::string, std::vector<std::size_t>> jobs_on_node;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        res.traces.push_back({jobs[i], {}, false});
        for (const auto& node : expand_hostlist(jobs[i].nodelist_expr))
            jobs_on_node[node].push_back(i);
    }

    std::vector<std::size_t> candidates;
    for (const auto& s : samples) {
        candidates.clear();
        auto it = jobs_on_node.find(s.node);
        if (it != jobs_on_node.end()) {
            for (std::size_t j : it->second) {
                if (jobs[j].start <= s.timestamp && s.timestamp <= jobs[j].end)
                    candidates.push_back(j);
            }
        }
        if (candidates.empty()) {
            ++res.unmatched;
            continue;
        }
        std::size_t pick = candidates[0];
        if (candidates.size() > 1) {
            // Latest-starting job wins; job id breaks exact start ties.
            for (std::size_t j : candidates) {
                if (jobs[j].start > jobs[pick].start ||
                    (jobs[j].start == jobs[pick].start && jobs[j].job_id > jobs[pick].job_id))
                    pick = j;
            }
            for (std::size_t j : candidates) res.traces[j].ambiguity_flag = true;
        }
        SeriesKey key{{s.node, s.gpu_index}, s.counter};
        auto& series = res.traces[pick].series[key];
        series.gpu = key.gpu;
        series.counter = s.counter;
        series.points.emplace_back(s.timestamp, s.value);
    }

    for (auto& trace : res.traces) {
        for (auto& [key, series] : trace.series) {
            auto& pts = series.points;
            std::stable_sort(pts.begin(), pts.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            // Duplicate timestamps: keep the last value in input order.
            std::vector<std::pair<std::int64_t, double>> dedup;
            dedup.reserve(pts.size());
            for (const auto& p : pts) {
                if (!dedup.empty() && dedup.back().first == p.first)
                    dedup.back().second = p.second;
                else
                    dedup.push_back(p);
            }
            pts = std::move(dedup);
        }
    }
    return res;
}

}  // namespace gputrace
