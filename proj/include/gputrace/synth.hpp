#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gputrace {

// Fixed value, inclusive uniform range, or an explicit choice set.
struct IntDistribution {
    std::vector<std::int64_t> choices;  // uniform over these
    std::int64_t lo = 0, hi = 0;        // used when choices is empty

    static IntDistribution fixed(std::int64_t v) { return {{}, v, v}; }
};

enum class RegimeKind { constant, one_hot, periodic_burst, poisson_burst, ramp };

struct Regime {
    RegimeKind kind = RegimeKind::constant;
    double level = 50.0;      // constant, one_hot
    int period_s = 60;        // periodic_burst
    double rate = 0.01;       // poisson_burst: expected events per second
    double low = 10.0;        // burst regimes
    double high = 90.0;
    double lo = 0.0;          // ramp
    double hi = 100.0;
};

struct SynthSpec {
    std::uint64_t seed = 1;
    int n_jobs = 1;
    IntDistribution gpus_per_job = IntDistribution::fixed(4);
    IntDistribution duration_s = IntDistribution::fixed(600);
    int sample_period_s = 10;
    Regime regime;
    double ml_fraction = 0.0;
    double missing_rate = 0.0;

    void validate() const;  // throws std::invalid_argument
    static SynthSpec load(std::istream& in);  // JSON document
};

struct SynthOutput {
    std::string samples_csv;       // wide CSV
    std::string jobs_csv;          // job accounting CSV
    std::string ground_truth_csv;  // job_id,metric,counter,value
};

// Deterministic for a fixed spec; ground truth lists the analytically known
// metric values for each job's regime.
SynthOutput generate(const SynthSpec& spec);

void write_synth_files(const SynthOutput& out, const std::string& dir);

// Jitters timestamps within +/-jitter_s (ordering preserved per series) and
// values within +/-noise_pct, clamped to each counter's physical bound.
std::string perturb(const std::string& samples_csv, int jitter_s, double noise_pct,
                    std::uint64_t seed);

}  // namespace gputrace
