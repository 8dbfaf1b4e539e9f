#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gputrace/types.hpp"

namespace gputrace {

// FNV-1a 64-bit content digest, hex-encoded. Used for manifest digests and
// the golden-output comparisons; not a cryptographic hash.
std::uint64_t fnv1a64(std::string_view data);
std::string digest_hex(std::string_view data);
std::string digest_file(const std::string& path);

// Line-delimited trace store: one JSON object per JobTrace.
void write_trace_store(std::ostream& out, const std::vector<JobTrace>& traces);
std::vector<JobTrace> read_trace_store(std::istream& in);

// Metric rows as the pipeline CSV:
// job_id,counter,mean,si,ti,b,cv,underutil_frac,spatial_b,gpu_hours
extern const char* const kMetricsCsvHeader;
void write_metrics_csv(std::ostream& out, const std::vector<JobMetrics>& rows);
std::vector<JobMetrics> read_metrics_csv(std::istream& in);  // throws SchemaError

struct SchemaError : std::runtime_error {
    std::vector<std::string> missing_columns;
    explicit SchemaError(const std::string& msg, std::vector<std::string> missing = {})
        : std::runtime_error(msg), missing_columns(std::move(missing)) {}
};

// ML labels emitted by the clean stage: job_id,is_ml
void write_labels_csv(std::ostream& out, const std::map<std::string, bool>& labels);
std::map<std::string, bool> read_labels_csv(std::istream& in);

// Stage bookkeeping carried between pipeline commands.
struct RunManifest {
    std::string tool_version;
    std::map<std::string, std::string> input_digests;  // path (basename) -> digest
    std::string config_digest;
    std::map<std::string, std::int64_t> counts;  // stage counters
    std::map<std::string, double> wall_time_s;

    std::string to_json() const;
    static RunManifest from_json(std::istream& in);
};

}  // namespace gputrace
