#include <doctest.h>

#include <sstream>

#include "filter_fixture.hpp"
#include "gputrace/cleanse.hpp"

using namespace gputrace;

TEST_CASE("30-job fixture reproduces expected reason sets") {
    FilterConfig cfg;
    for (const auto& c : filter_fixture::cases()) {
        CAPTURE(c.trace.record.job_id);
        auto outcome = filter_job(c.trace, cfg);
        CHECK(outcome.reasons == c.expected_reasons);
        CHECK(outcome.kept == c.expected_reasons.empty());
        if (outcome.kept) CHECK(classify_ml(c.trace.record, cfg) == c.expected_ml);
    }
}

TEST_CASE("kept iff reasons empty") {
    FilterConfig cfg;
    for (const auto& c : filter_fixture::cases()) {
        auto outcome = filter_job(c.trace, cfg);
        CHECK(outcome.kept == outcome.reasons.empty());
    }
}

TEST_CASE("relaxing thresholds never drops a kept job") {
    FilterConfig strict;
    FilterConfig relaxed;
    relaxed.min_duration_s = 0;
    relaxed.min_mean_percent = 0.0;
    for (const auto& c : filter_fixture::cases()) {
        if (filter_job(c.trace, strict).kept) CHECK(filter_job(c.trace, relaxed).kept);
    }
}

TEST_CASE("classify_ml is case invariant") {
    FilterConfig cfg;
    JobRecord r;
    for (const char* line : {"python train.py --EPOCH 5", "RUN_pyTORCH.sh", "KERAS model"}) {
        r.submit_line = line;
        CHECK(classify_ml(r, cfg));
    }
    r.submit_line = "./lmp -in shear.in";
    CHECK_FALSE(classify_ml(r, cfg));
    r.submit_line = "";
    CHECK_FALSE(classify_ml(r, cfg));  // missing submit line is non-ML
}

TEST_CASE("all 18 default keywords match") {
    FilterConfig cfg;
    REQUIRE(cfg.keywords.size() == 18);
    JobRecord r;
    for (const auto& kw : cfg.keywords) {
        r.submit_line = "run_" + kw + "_job.sh";
        CHECK(classify_ml(r, cfg));
    }
}

TEST_CASE("config file loading") {
    std::istringstream in(
        "# comment\n"
        "min_duration_s = 60\n"
        "min_mean_percent = 2.5\n"
        "gpu_partitions = gpu,gpu_debug\n"
        "login_prefixes = login,ln\n"
        "exclude_staff = false\n"
        "hbm_capacity_mb = 81920\n");
    auto cfg = FilterConfig::load(in);
    CHECK(cfg.min_duration_s == 60);
    CHECK(cfg.min_mean_percent == 2.5);
    CHECK(cfg.gpu_partition_names.contains("gpu_debug"));
    CHECK(cfg.login_node_prefixes.contains("ln"));
    CHECK_FALSE(cfg.staff_user_class_excluded);
    CHECK(cfg.limits.hbm_capacity_mb == 81920.0);
}

TEST_CASE("unknown config key names the key") {
    std::istringstream in("min_durations = 60\n");
    CHECK_THROWS_WITH_AS(FilterConfig::load(in), "unknown config key: min_durations",
                         std::runtime_error);
}
