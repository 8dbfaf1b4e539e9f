#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gputrace/types.hpp"

namespace gputrace {

enum class SampleFormat { wide_csv, long_jsonl, prom_matrix };

// What to do with a malformed row: record it and continue, or stop.
enum class ErrorPolicy { skip_and_log, abort };

struct RowError {
    std::size_t line_no = 0;  // 1-based; 0 when not line-oriented
    std::string message;
};

struct ParseStats {
    std::size_t rows = 0;              // data rows seen (excluding header)
    std::size_t samples = 0;           // samples emitted
    std::size_t unknown_counter = 0;   // values skipped for unrecognized counter names
    std::vector<RowError> errors;      // rejected rows
};

// Unrecoverable input problem: bad header, malformed document, or any row
// error under ErrorPolicy::abort.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<CounterSample> parse_samples(std::istream& in, SampleFormat format,
                                         ErrorPolicy policy, ParseStats& stats);

std::vector<JobRecord> parse_jobs(std::istream& in, ErrorPolicy policy, ParseStats& stats);

struct AssignResult {
    std::vector<JobTrace> traces;   // one per input job, in input order
    std::size_t unmatched = 0;      // samples matching no job
};

// Joins samples to jobs: a sample lands on job j when its node is in j's
// expanded nodelist and its timestamp is within [start, end]. Multi-match
// goes to the latest-starting job and flags every candidate ambiguous.
// Duplicate (gpu, counter, timestamp) readings collapse to the last seen.
AssignResult assign_samples(const std::vector<CounterSample>& samples,
                            const std::vector<JobRecord>& jobs);

extern const char* const kWideCsvHeader;
extern const char* const kJobCsvHeader;

}  // namespace gputrace
