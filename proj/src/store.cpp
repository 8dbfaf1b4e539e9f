#include "gputrace/store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gputrace/csv.hpp"

namespace gputrace {

using nlohmann::json;

const char* const kMetricsCsvHeader =
    "job_id,counter,mean,si,ti,b,cv,underutil_frac,spatial_b,gpu_hours";

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string digest_hex(std::string_view data) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

std::string digest_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return digest_hex(os.str());
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

json record_to_json(const JobRecord& r) {
    return json{{"job_id", r.job_id},
                {"step_id", r.step_id},
                {"user", r.user},
                {"user_class", std::string(user_class_name(r.user_class))},
                {"partition", r.partition},
                {"state", std::string(job_state_name(r.state))},
                {"start", r.start},
                {"end", r.end},
                {"nodelist", r.nodelist_expr},
                {"alloc_gpus", r.gpus_allocated},
                {"submit_line", r.submit_line}};
}

JobRecord record_from_json(const json& j) {
    JobRecord r;
    r.job_id = j.at("job_id").get<std::string>();
    r.step_id = j.at("step_id").get<std::string>();
    r.user = j.at("user").get<std::string>();
    r.user_class =
        j.at("user_class").get<std::string>() == "staff" ? UserClass::staff : UserClass::regular;
    r.partition = j.at("partition").get<std::string>();
    std::string state = j.at("state").get<std::string>();
    r.state = state == "completed"   ? JobState::completed
              : state == "failed"    ? JobState::failed
              : state == "cancelled" ? JobState::cancelled
                                     : JobState::other;
    r.start = j.at("start").get<std::int64_t>();
    r.end = j.at("end").get<std::int64_t>();
    r.nodelist_expr = j.at("nodelist").get<std::string>();
    r.gpus_allocated = j.at("alloc_gpus").get<int>();
    r.submit_line = j.at("submit_line").get<std::string>();
    return r;
}

}  // namespace

void write_trace_store(std::ostream& out, const std::vector<JobTrace>& traces) {
    for (const auto& t : traces) {
        json series = json::array();
        for (const auto& [key, s] : t.series) {
            json points = json::array();
            for (const auto& [ts, v] : s.points) points.push_back(json::array({ts, v}));
            series.push_back(json{{"node", key.gpu.node},
                                  {"gpu", key.gpu.gpu_index},
                                  {"counter", std::string(counter_name(key.counter))},
                                  {"points", std::move(points)}});
        }
        json j{{"job", record_to_json(t.record)},
               {"ambiguous", t.ambiguity_flag},
               {"series", std::move(series)}};
        out << j.dump() << "\n";
    }
}

std::vector<JobTrace> read_trace_store(std::istream& in) {
    std::vector<JobTrace> traces;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw std::runtime_error("trace store: malformed JSON at line " +
                                     std::to_string(line_no));
        JobTrace t;
        t.record = record_from_json(j.at("job"));
        t.ambiguity_flag = j.at("ambiguous").get<bool>();
        for (const auto& s : j.at("series")) {
            auto kind = counter_from_name(s.at("counter").get<std::string>());
            if (!kind)
                throw std::runtime_error("trace store: unknown counter at line " +
                                         std::to_string(line_no));
            SeriesKey key{{s.at("node").get<std::string>(), s.at("gpu").get<int>()}, *kind};
            GpuSeries series;
            series.gpu = key.gpu;
            series.counter = *kind;
            for (const auto& p : s.at("points"))
                series.points.emplace_back(p[0].get<std::int64_t>(), p[1].get<double>());
            t.series.emplace(key, std::move(series));
        }
        traces.push_back(std::move(t));
    }
    return traces;
}

void write_metrics_csv(std::ostream& out, const std::vector<JobMetrics>& rows) {
    out << kMetricsCsvHeader << "\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    for (const auto& m : rows) {
        out << m.job_id << ',' << counter_name(m.counter) << ',' << fmt(m.mean) << ','
            << opt(m.spatial_imbalance) << ',' << fmt(m.temporal_imbalance) << ','
            << opt(m.burstiness) << ',' << opt(m.cv_percent) << ','
            << opt(m.underutilized_fraction) << ',' << opt(m.spatial_burstiness) << ','
            << fmt(m.gpu_hours) << "\n";
    }
}

std::vector<JobMetrics> read_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("metrics CSV: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto have = csv_split(line);
    auto want = csv_split(kMetricsCsvHeader);
    std::vector<std::string> missing;
    for (const auto& col : want) {
        if (std::find(have.begin(), have.end(), col) == have.end()) missing.push_back(col);
    }
    if (!missing.empty()) {
        std::string msg = "metrics CSV: missing columns:";
        for (const auto& c : missing) msg += " " + c;
        throw SchemaError(msg, missing);
    }
    // Column positions by name so extra columns are tolerated.
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < have.size(); ++i) pos[have[i]] = i;

    std::vector<JobMetrics> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() < want.size())
            throw SchemaError("metrics CSV: short row at line " + std::to_string(line_no));
        auto cell = [&](const char* name) -> const std::string& { return f[pos.at(name)]; };
        auto opt = [&](const char* name) -> std::optional<double> {
            const std::string& c = cell(name);
            if (c.empty()) return std::nullopt;
            return std::stod(c);
        };
        JobMetrics m;
        m.job_id = cell("job_id");
        auto kind = counter_from_name(cell("counter"));
        if (!kind)
            throw SchemaError("metrics CSV: unknown counter at line " + std::to_string(line_no));
        m.counter = *kind;
        m.mean = std::stod(cell("mean"));
        m.spatial_imbalance = opt("si");
        m.temporal_imbalance = std::stod(cell("ti"));
        m.burstiness = opt("b");
        m.cv_percent = opt("cv");
        m.underutilized_fraction = opt("underutil_frac");
        m.spatial_burstiness = opt("spatial_b");
        m.gpu_hours = std::stod(cell("gpu_hours"));
        rows.push_back(std::move(m));
    }
    return rows;
}

void write_labels_csv(std::ostream& out, const std::map<std::string, bool>& labels) {
    out << "job_id,is_ml\n";
    for (const auto& [job, ml] : labels) out << job << ',' << (ml ? 1 : 0) << "\n";
}

std::map<std::string, bool> read_labels_csv(std::istream& in) {
    std::map<std::string, bool> labels;
    std::string line;
    if (!std::getline(in, line)) return labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() >= 2) labels[f[0]] = f[1] == "1" || f[1] == "true";
    }
    return labels;
}

std::string RunManifest::to_json() const {
    json j{{"tool_version", tool_version},
           {"input_digests", input_digests},
           {"config_digest", config_digest},
           {"counts", counts},
           {"wall_time_s", wall_time_s}};
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::istream& in) {
    json j = json::parse(in);
    RunManifest m;
    m.tool_version = j.value("tool_version", "");
    if (j.contains("input_digests"))
        m.input_digests = j["input_digests"].get<std::map<std::string, std::string>>();
    m.config_digest = j.value("config_digest", "");
    if (j.contains("counts")) m.counts = j["counts"].get<std::map<std::string, std::int64_t>>();
    if (j.contains("wall_time_s"))
        m.wall_time_s = j["wall_time_s"].get<std::map<std::string, double>>();
    return m;
}

}  // namespace gputrace
