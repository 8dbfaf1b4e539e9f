#pragma once

#include <string>
#include <vector>

#include "gputrace/cleanse.hpp"
#include "gputrace/types.hpp"

// 30 hand-built jobs with documented expected filter outcomes, shared by the
// cleanse unit tests and the acceptance suite.
namespace filter_fixture {

struct Case {
    gputrace::JobTrace trace;
    std::vector<gputrace::RejectReason> expected_reasons;  // empty = kept
    bool expected_ml = false;
};

inline gputrace::JobTrace make_trace(const std::string& id, const std::string& nodes,
                                     std::int64_t duration, gputrace::JobState state,
                                     gputrace::UserClass uclass, const std::string& partition,
                                     const std::string& submit, double util_level,
                                     int n_points = 30) {
    using namespace gputrace;
    JobTrace t;
    t.record.job_id = id;
    t.record.nodelist_expr = nodes;
    t.record.start = 1000;
    t.record.end = 1000 + duration;
    t.record.state = state;
    t.record.user_class = uclass;
    t.record.partition = partition;
    t.record.submit_line = submit;
    t.record.gpus_allocated = 1;
    GpuSeries s;
    s.gpu = {"nid1", 0};
    s.counter = CounterKind::GPU_UTIL;
    for (int i = 0; i < n_points; ++i) s.points.emplace_back(1000 + i * 10, util_level);
    t.series[{s.gpu, s.counter}] = s;
    return t;
}

inline std::vector<Case> cases() {
    using namespace gputrace;
    using R = RejectReason;
    std::vector<Case> out;
    auto add = [&](JobTrace t, std::vector<R> reasons, bool ml = false) {
        out.push_back({std::move(t), std::move(reasons), ml});
    };

    // 1-6: clean keepers, mixed submit lines
    add(make_trace("j01", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                   "python train.py --epoch 50", 40), {}, true);
    add(make_trace("j02", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                   "./lmp -in shear.in", 40), {});
    add(make_trace("j03", "nid1", 180, JobState::completed, UserClass::regular, "gpu",
                   "run_DEEPmd.sh", 95), {}, true);
    add(make_trace("j04", "nid1", 86400, JobState::completed, UserClass::regular, "gpu",
                   "srun vasp_std", 1.0), {});
    add(make_trace("j05", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                   "python inference.py", 99.5), {}, true);
    add(make_trace("j06", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                   "bash run_gromacs.sh", 60), {});

    // 7-10: duration rule
    add(make_trace("j07", "nid1", 120, JobState::completed, UserClass::regular, "gpu", "x", 40),
        {R::too_short});
    add(make_trace("j08", "nid1", 179, JobState::completed, UserClass::regular, "gpu", "x", 40),
        {R::too_short});
    add(make_trace("j09", "nid1", 0, JobState::completed, UserClass::regular, "gpu", "x", 40, 1),
        {R::too_short});
    add(make_trace("j10", "nid1", 181, JobState::completed, UserClass::regular, "gpu", "x", 40),
        {});

    // 11-14: state rule
    add(make_trace("j11", "nid1", 600, JobState::failed, UserClass::regular, "gpu", "x", 40),
        {R::not_completed});
    add(make_trace("j12", "nid1", 600, JobState::cancelled, UserClass::regular, "gpu", "x", 40),
        {R::not_completed});
    add(make_trace("j13", "nid1", 600, JobState::other, UserClass::regular, "gpu", "x", 40),
        {R::not_completed});
    add(make_trace("j14", "nid1", 600, JobState::completed, UserClass::staff, "gpu", "x", 40),
        {R::staff});

    // 15-17: partition and login rules
    add(make_trace("j15", "nid1", 600, JobState::completed, UserClass::regular, "cpu", "x", 40),
        {R::non_gpu_partition});
    add(make_trace("j16", "login01", 600, JobState::completed, UserClass::regular, "gpu", "x", 40),
        {R::login_node});
    add(make_trace("j17", "login[01-02]", 600, JobState::completed, UserClass::regular, "shared",
                   "x", 40),
        {R::login_node, R::non_gpu_partition});

    // 18-20: physical limit rule
    {
        auto t = make_trace("j18", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                            "x", 40);
        t.series.begin()->second.points[5].second = 101.0;
        add(std::move(t), {R::over_physical_limit});
    }
    {
        auto t = make_trace("j19", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                            "x", 40);
        GpuSeries hbm;
        hbm.gpu = {"nid1", 0};
        hbm.counter = CounterKind::HBM_USED;
        hbm.points.emplace_back(1000, 50000.0);  // above the 40960 MB default
        t.series[{hbm.gpu, hbm.counter}] = hbm;
        add(std::move(t), {R::over_physical_limit});
    }
    {
        auto t = make_trace("j20", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                            "x", 100.0);  // exactly at the bound is legal
        add(std::move(t), {});
    }

    // 21-23: mean floor rule
    add(make_trace("j21", "nid1", 600, JobState::completed, UserClass::regular, "gpu", "x", 0.5),
        {R::below_mean_floor});
    add(make_trace("j22", "nid1", 600, JobState::completed, UserClass::regular, "gpu", "x", 0.0),
        {R::below_mean_floor});
    add(make_trace("j23", "nid1", 600, JobState::completed, UserClass::regular, "gpu", "x", 1.0),
        {});

    // 24: no samples at all
    {
        auto t = make_trace("j24", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                            "x", 40);
        t.series.clear();
        add(std::move(t), {R::unmatched});
    }

    // 25-27: multiple simultaneous violations
    add(make_trace("j25", "nid1", 60, JobState::failed, UserClass::regular, "gpu", "x", 40),
        {R::not_completed, R::too_short});
    add(make_trace("j26", "login7", 60, JobState::completed, UserClass::staff, "gpu", "x", 40),
        {R::login_node, R::staff, R::too_short});
    {
        auto t = make_trace("j27", "nid1", 120, JobState::cancelled, UserClass::regular, "cpu",
                            "x", 0.2);
        t.series.begin()->second.points[0].second = 120.0;
        add(std::move(t), {R::non_gpu_partition, R::not_completed, R::too_short,
                           R::over_physical_limit});
    }

    // 28-30: ML keyword edge cases on keepers
    add(make_trace("j28", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                   "MY_TENSORFLOW_RUN.sh", 40), {}, true);   // case-insensitive
    add(make_trace("j29", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                   "prepare_detections.py", 40), {}, true);  // substring "detection"
    add(make_trace("j30", "nid1", 600, JobState::completed, UserClass::regular, "gpu",
                   "./solve --tolerance 1e-6", 40), {});
    return out;
}

}  // namespace filter_fixture
