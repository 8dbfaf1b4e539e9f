"""Smoke tests for the pybind11 extension."""

import math

import pytest

import gputrace


def test_hostlist_round_trip():
    nodes = gputrace.expand_hostlist("nid[001000-001003,002100]")
    assert nodes == ["nid001000", "nid001001", "nid001002", "nid001003", "nid002100"]
    assert gputrace.expand_hostlist(gputrace.compress_hostlist(nodes)) == nodes


def test_hostlist_rejects_malformed():
    with pytest.raises(ValueError):
        gputrace.expand_hostlist("nid[001-")


def test_temporal_imbalance():
    assert gputrace.temporal_imbalance([100, 100, 0, 0]) == pytest.approx(0.5)
    assert gputrace.temporal_imbalance([50, 50, 50]) == pytest.approx(0.0)


def test_spatial_imbalance():
    assert gputrace.spatial_imbalance([100, 100, 0, 0], 4) == pytest.approx(0.5)
    assert gputrace.spatial_imbalance([0, 0], 2) is None


def test_events_and_burstiness():
    points = [(i * 10, 90.0 if (i % 6) == 0 else 5.0) for i in range(60)]
    events = gputrace.detect_events(points)
    assert len(events) >= 3
    assert gputrace.burstiness(events) == pytest.approx(-1.0)
    assert gputrace.burstiness(events[:2]) is None


def test_spearman():
    assert gputrace.spearman([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)
    assert gputrace.spearman([1, 2, 3], [30, 20, 10]) == pytest.approx(-1.0)
    assert gputrace.spearman([1, 1, 1], [1, 2, 3]) is None


def test_classify_ml():
    assert gputrace.classify_ml("python train.py --epoch 10")
    assert gputrace.classify_ml("sbatch RUN_PYTORCH.sh")
    assert not gputrace.classify_ml("srun ./mhd_step input.nml")


def test_generate_synth_deterministic():
    spec = '{"seed": 5, "n_jobs": 2, "gpus_per_job": 2, "duration_s": 300}'
    a = gputrace.generate_synth(spec)
    b = gputrace.generate_synth(spec)
    assert a == b
    samples, jobs, truth = a
    assert samples.splitlines()[0].startswith("timestamp,node,gpu,")
    assert jobs.splitlines()[0].startswith("JobID,")
    assert any(line.startswith("# rng=") for line in truth.splitlines())


def test_generate_synth_rejects_bad_spec():
    with pytest.raises(ValueError):
        gputrace.generate_synth('{"missing_rate": 2.0}')
