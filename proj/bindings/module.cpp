#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gputrace/analytics.hpp"
#include "gputrace/cleanse.hpp"
#include "gputrace/hostlist.hpp"
#include "gputrace/metrics.hpp"
#include "gputrace/synth.hpp"

namespace py = pybind11;
using namespace gputrace;

namespace {

GpuSeries series_from_pairs(const std::vector<std::pair<std::int64_t, double>>& points,
                            const std::string& counter) {
    auto kind = counter_from_name(counter);
    if (!kind) throw py::value_error("unknown counter: " + counter);
    GpuSeries s;
    s.counter = *kind;
    s.points = points;
    return s;
}

}  // namespace

PYBIND11_MODULE(_gputrace, m) {
    m.doc() = "GPU telemetry workload-characterization metrics";
    m.attr("__version__") = "0.1.0";

    py::register_exception<HostlistError>(m, "HostlistError", PyExc_ValueError);

    m.def("expand_hostlist", &expand_hostlist, py::arg("expr"),
          "Expand a compressed Slurm hostlist expression");
    m.def("compress_hostlist", &compress_hostlist, py::arg("nodes"));

    m.def(
        "temporal_imbalance",
        [](const std::vector<double>& values) {
            GpuSeries s;
            for (std::size_t i = 0; i < values.size(); ++i)
                s.points.emplace_back(static_cast<std::int64_t>(i), values[i]);
            return temporal_imbalance_gpu(s);
        },
        py::arg("values"), "Temporal imbalance of one GPU series");

    m.def(
        "spatial_imbalance",
        [](const std::vector<double>& gpu_totals, int observed_gpus) {
            WindowAggregate agg;
            int i = 0;
            for (double t : gpu_totals) agg.per_gpu_totals[{"n", i++}] = t;
            return spatial_imbalance_window(agg, observed_gpus);
        },
        py::arg("gpu_totals"), py::arg("observed_gpus"),
        "Window spatial imbalance from per-GPU totals; None when all totals are zero");

    m.def(
        "detect_events",
        [](const std::vector<std::pair<std::int64_t, double>>& points,
           const std::string& counter, double threshold, int sample_period_s) {
            return detect_events(series_from_pairs(points, counter), threshold, sample_period_s);
        },
        py::arg("points"), py::arg("counter") = "GPU_UTIL", py::arg("threshold") = 15.0,
        py::arg("sample_period_s") = 10);

    m.def("burstiness", &burstiness_gpu, py::arg("event_timestamps"),
          "Burstiness of an event stream; None with fewer than 3 events");

    m.def("spearman", &spearman, py::arg("xs"), py::arg("ys"),
          "Spearman rank correlation with average ranks for ties");

    m.def(
        "classify_ml",
        [](const std::string& submit_line) {
            JobRecord r;
            r.submit_line = submit_line;
            return classify_ml(r, FilterConfig{});
        },
        py::arg("submit_line"), "True when the submit line matches an ML keyword");

    m.def(
        "generate_synth",
        [](const std::string& spec_json) {
            std::istringstream in(spec_json);
            auto out = generate(SynthSpec::load(in));
            return py::make_tuple(out.samples_csv, out.jobs_csv, out.ground_truth_csv);
        },
        py::arg("spec_json"),
        "Generate a synthetic dataset; returns (samples_csv, jobs_csv, ground_truth_csv)");
}
