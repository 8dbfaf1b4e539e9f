#include "gputrace/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gputrace/csv.hpp"
#include "gputrace/hostlist.hpp"
#include "gputrace/ingest.hpp"
#include "gputrace/rng.hpp"
#include "gputrace/types.hpp"

namespace gputrace {

namespace {

using nlohmann::json;

constexpr std::int64_t kTimeBase = 1700000000;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

IntDistribution dist_from_json(const json& j, const char* what) {
    IntDistribution d;
    if (j.is_number_integer()) return IntDistribution::fixed(j.get<std::int64_t>());
    if (j.contains("fixed")) return IntDistribution::fixed(j["fixed"].get<std::int64_t>());
    if (j.contains("choices")) {
        d.choices = j["choices"].get<std::vector<std::int64_t>>();
        if (d.choices.empty()) throw std::invalid_argument(std::string(what) + ": empty choices");
        return d;
    }
    if (j.contains("min") && j.contains("max")) {
        d.lo = j["min"].get<std::int64_t>();
        d.hi = j["max"].get<std::int64_t>();
        if (d.lo > d.hi) throw std::invalid_argument(std::string(what) + ": min > max");
        return d;
    }
    throw std::invalid_argument(std::string(what) + ": expected fixed/min+max/choices");
}

std::int64_t draw(const IntDistribution& d, SplitMix64& rng) {
    if (!d.choices.empty())
        return d.choices[static_cast<std::size_t>(
            rng.next_int(0, static_cast<std::int64_t>(d.choices.size()) - 1))];
    if (d.lo == d.hi) return d.lo;
    return rng.next_int(d.lo, d.hi);
}

}  // namespace

void SynthSpec::validate() const {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("synth spec: " + msg); };
    if (n_jobs < 0) bad("n_jobs must be >= 0");
    if (sample_period_s <= 0) bad("sample_period_s must be > 0");
    if (missing_rate < 0.0 || missing_rate >= 1.0) bad("missing_rate must be in [0,1)");
    if (ml_fraction < 0.0 || ml_fraction > 1.0) bad("ml_fraction must be in [0,1]");
    auto level_ok = [](double v) { return v >= 0.0 && v <= 100.0; };
    switch (regime.kind) {
        case RegimeKind::constant:
        case RegimeKind::one_hot:
            if (!level_ok(regime.level)) bad("level must be in [0,100]");
            break;
        case RegimeKind::periodic_burst:
            if (!level_ok(regime.low) || !level_ok(regime.high) || regime.low > regime.high)
                bad("burst levels must be in [0,100] with low <= high");
            if (regime.period_s <= 0 || regime.period_s % sample_period_s != 0 ||
                regime.period_s < 2 * sample_period_s)
                bad("period_s must be a multiple of sample_period_s and at least twice it");
            break;
        case RegimeKind::poisson_burst:
            if (!level_ok(regime.low) || !level_ok(regime.high) || regime.low > regime.high)
                bad("burst levels must be in [0,100] with low <= high");
            if (regime.rate <= 0.0) bad("rate must be > 0");
            break;
        case RegimeKind::ramp:
            if (!level_ok(regime.lo) || !level_ok(regime.hi) || regime.lo > regime.hi)
                bad("ramp bounds must be in [0,100] with lo <= hi");
            break;
    }
}

SynthSpec SynthSpec::load(std::istream& in) {
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw std::invalid_argument("synth spec: malformed JSON");
    SynthSpec spec;
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_jobs")) spec.n_jobs = j["n_jobs"].get<int>();
    if (j.contains("gpus_per_job")) spec.gpus_per_job = dist_from_json(j["gpus_per_job"], "gpus_per_job");
    if (j.contains("duration_s")) spec.duration_s = dist_from_json(j["duration_s"], "duration_s");
    if (j.contains("sample_period_s")) spec.sample_period_s = j["sample_period_s"].get<int>();
    if (j.contains("ml_fraction")) spec.ml_fraction = j["ml_fraction"].get<double>();
    if (j.contains("missing_rate")) spec.missing_rate = j["missing_rate"].get<double>();
    if (j.contains("regime")) {
        const json& r = j["regime"];
        std::string kind = r.value("kind", "constant");
        if (kind == "constant")
            spec.regime.kind = RegimeKind::constant;
        else if (kind == "one_hot")
            spec.regime.kind = RegimeKind::one_hot;
        else if (kind == "periodic_burst")
            spec.regime.kind = RegimeKind::periodic_burst;
        else if (kind == "poisson_burst")
            spec.regime.kind = RegimeKind::poisson_burst;
        else if (kind == "ramp")
            spec.regime.kind = RegimeKind::ramp;
        else
            throw std::invalid_argument("synth spec: unknown regime kind '" + kind + "'");
        spec.regime.level = r.value("level", spec.regime.level);
        spec.regime.period_s = r.value("period_s", spec.regime.period_s);
        spec.regime.rate = r.value("rate", spec.regime.rate);
        spec.regime.low = r.value("low", spec.regime.low);
        spec.regime.high = r.value("high", spec.regime.high);
        spec.regime.lo = r.value("lo", spec.regime.lo);
        spec.regime.hi = r.value("hi", spec.regime.hi);
    }
    spec.validate();
    return spec;
}

SynthOutput generate(const SynthSpec& spec) {
    spec.validate();
    SynthOutput out;
    std::ostringstream samples, jobs, truth;
    samples << kWideCsvHeader << "\n";
    jobs << kJobCsvHeader << "\n";
    truth << "# rng=splitmix64 seed=" << spec.seed << "\n";
    truth << "job_id,metric,counter,value\n";

    const int p = spec.sample_period_s;
    const int n_ml = static_cast<int>(std::llround(spec.ml_fraction * spec.n_jobs));
    std::int64_t next_node = 1;

    for (int ji = 0; ji < spec.n_jobs; ++ji) {
        SplitMix64 job_rng(derive_seed(spec.seed, static_cast<std::uint64_t>(ji), 1));
        const int g = static_cast<int>(draw(spec.gpus_per_job, job_rng));
        std::int64_t duration = draw(spec.duration_s, job_rng);
        duration -= duration % p;  // align to the sample grid
        if (duration < p) duration = p;
        const std::int64_t start = kTimeBase;
        const std::int64_t end = start + duration;
        const std::int64_t n_samples = duration / p + 1;

        const int n_nodes = (g + 3) / 4;
        std::vector<std::string> nodes;
        for (int n = 0; n < n_nodes; ++n) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "nid%06lld", static_cast<long long>(next_node + n));
            nodes.emplace_back(buf);
        }
        next_node += n_nodes;

        const std::string job_id = std::to_string(100000 + ji);
        const bool is_ml = ji < n_ml;
        const std::string submit =
            is_ml ? "python train.py --epoch 10" : "srun ./mhd_step input.nml";

        // Per-GPU spike grids for the poisson regime.
        std::vector<std::vector<char>> spikes;
        if (spec.regime.kind == RegimeKind::poisson_burst) {
            spikes.assign(g, std::vector<char>(static_cast<std::size_t>(n_samples), 0));
            for (int gi = 0; gi < g; ++gi) {
                SplitMix64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(ji),
                                           static_cast<std::uint64_t>(gi), 2));
                double pos = 0.0;
                while (true) {
                    const double gap_s = -std::log(1.0 - rng.next_double()) / spec.regime.rate;
                    std::int64_t k = std::llround(gap_s / p);
                    if (k < 2) k = 2;  // keep spikes separable at the sample rate
                    pos += static_cast<double>(k);
                    if (pos >= static_cast<double>(n_samples)) break;
                    spikes[gi][static_cast<std::size_t>(pos)] = 1;
                }
            }
        }

        SplitMix64 miss_rng(derive_seed(spec.seed, static_cast<std::uint64_t>(ji), 3));
        for (std::int64_t s = 0; s < n_samples; ++s) {
            const std::int64_t ts = start + s * p;
            for (int gi = 0; gi < g; ++gi) {
                if (spec.missing_rate > 0.0 && miss_rng.next_double() < spec.missing_rate)
                    continue;
                double v = 0.0;
                switch (spec.regime.kind) {
                    case RegimeKind::constant: v = spec.regime.level; break;
                    case RegimeKind::one_hot: v = gi == 0 ? spec.regime.level : 0.0; break;
                    case RegimeKind::periodic_burst: {
                        const std::int64_t phase = (s * p) % spec.regime.period_s;
                        v = 2 * phase < spec.regime.period_s ? spec.regime.low : spec.regime.high;
                        break;
                    }
                    case RegimeKind::poisson_burst:
                        v = spikes[gi][static_cast<std::size_t>(s)] ? spec.regime.high
                                                                    : spec.regime.low;
                        break;
                    case RegimeKind::ramp:
                        v = n_samples == 1 ? spec.regime.lo
                                           : spec.regime.lo + (spec.regime.hi - spec.regime.lo) *
                                                                  static_cast<double>(s) /
                                                                  static_cast<double>(n_samples - 1);
                        break;
                }
                samples << ts << ',' << nodes[gi / 4] << ',' << (gi % 4) << ',' << fmt(v)
                        << ",,,,,,,\n";
            }
        }

        jobs << job_id << ",,user1,regular,gpu,COMPLETED," << start << ',' << end << ','
             << csv_quote(compress_hostlist(nodes)) << ',' << g << ',' << csv_quote(submit)
             << "\n";

        auto gt = [&](const char* metric, double value) {
            truth << job_id << ',' << metric << ",GPU_UTIL," << fmt(value) << "\n";
        };
        switch (spec.regime.kind) {
            case RegimeKind::constant:
                gt("mean", spec.regime.level);
                gt("ti", 0.0);
                if (g >= 2) gt("si", 0.0);
                break;
            case RegimeKind::one_hot:
                gt("mean", spec.regime.level / g);
                gt("ti", 0.0);
                if (g >= 2) gt("si", 1.0 - 1.0 / g);
                break;
            case RegimeKind::periodic_burst:
                gt("b", -1.0);
                break;
            case RegimeKind::poisson_burst:
                gt("b", 0.0);  // expected value for exponential interevent times
                break;
            case RegimeKind::ramp: {
                const double mean = (spec.regime.lo + spec.regime.hi) / 2.0;
                gt("mean", mean);
                if (spec.regime.hi > 0.0) gt("ti", 1.0 - mean / spec.regime.hi);
                if (g >= 2) gt("si", 0.0);
                break;
            }
        }
        truth << job_id << ",ml,-," << (is_ml ? 1 : 0) << "\n";
    }

    out.samples_csv = samples.str();
    out.jobs_csv = jobs.str();
    out.ground_truth_csv = truth.str();
    return out;
}

void write_synth_files(const SynthOutput& out, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + name + " in " + dir);
        f << content;
    };
    write("samples.csv", out.samples_csv);
    write("jobs.csv", out.jobs_csv);
    write("ground_truth.csv", out.ground_truth_csv);
}

std::string perturb(const std::string& samples_csv, int jitter_s, double noise_pct,
                    std::uint64_t seed) {
    if (jitter_s < 0 || noise_pct < 0.0)
        throw std::invalid_argument("perturb: jitter and noise must be >= 0");
    if (jitter_s == 0 && noise_pct == 0.0) return samples_csv;

    CounterLimits limits;
    std::istringstream in(samples_csv);
    std::ostringstream out;
    std::string line;
    if (!std::getline(in, line)) return samples_csv;
    out << line << "\n";

    SplitMix64 rng(derive_seed(seed, 0, 0, 4));
    std::map<std::pair<std::string, std::string>, std::int64_t> last_ts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = csv_split(line);
        if (fields.size() != 3 + kCounterCount) {
            out << line << "\n";
            continue;
        }
        std::int64_t ts = std::stoll(fields[0]);
        std::int64_t shifted = ts + rng.next_int(-jitter_s, jitter_s);
        auto key = std::make_pair(fields[1], fields[2]);
        auto it = last_ts.find(key);
        if (it != last_ts.end() && shifted <= it->second) shifted = it->second + 1;
        if (shifted > ts + jitter_s) shifted = ts + jitter_s;  // stay within the bound
        last_ts[key] = shifted;
        fields[0] = std::to_string(shifted);

        for (int c = 0; c < kCounterCount; ++c) {
            std::string& cell = fields[3 + c];
            if (cell.empty()) continue;
            double v = std::stod(cell) + rng.next_range(-noise_pct, noise_pct);
            const double bound = limits.upper_bound(kAllCounters[c]);
            v = std::min(std::max(v, 0.0), bound);
            cell = fmt(v);
        }
        out << csv_join(fields) << "\n";
    }
    return out.str();
}

}  // namespace gputrace
