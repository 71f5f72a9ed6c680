"""RunManager lifecycle: directories, determinism, interactive commands."""

import json
import time

import pytest

from conftest import tiny_scenario_doc
from satsim import ValidationError
from satsim.runs import RunManager, UnknownRunError, new_run_id
from satsim.scenario import parse_scenario


def _wait_state(run, state, timeout_s=30.0):
    deadline = time.monotonic() + timeout_s
    while time.monotonic() < deadline:
        if run.state == state:
            return True
        time.sleep(0.01)
    return False


def test_run_ids_sortable_and_unique():
    ids = [new_run_id() for _ in range(50)]
    assert len(set(ids)) == 50
    assert all(len(i) == 26 for i in ids)
    # Millisecond timestamps prefix the ids, so later batches sort later.
    first = new_run_id()
    time.sleep(0.002)
    assert new_run_id() > first


def test_run_lifecycle_and_artifacts(tmp_path):
    manager = RunManager(out_dir=tmp_path)
    scenario = parse_scenario(tiny_scenario_doc())
    run = manager.start(scenario)
    assert run.wait(60.0) == "done"

    status = run.status()
    assert status["run_id"] == run.run_id
    assert status["state"] == "done"
    assert status["progress"] == {"completed_slots": 2, "total_slots": 2}
    assert status["scenario_hash"] == scenario.scenario_hash
    assert status["record_counts"]["topology_record"] == 2
    assert status["record_counts"]["rtt_sample"] == 2
    assert status["error"] is None

    run_dir = tmp_path / "runs" / run.run_id
    stored = json.loads((run_dir / "scenario.json").read_text())
    assert stored == scenario.doc
    lines = (run_dir / "metrics.ndjson").read_text().splitlines()
    assert json.loads(lines[0])["kind"] == "run_header"
    assert len(lines) == 1 + sum(status["record_counts"].values())

    assert manager.get(run.run_id) is run
    assert manager.list() == [run]
    with pytest.raises(UnknownRunError):
        manager.get("NOSUCHRUN0000000000000000")


def test_equal_seeds_byte_identical_streams(tmp_path):
    manager = RunManager(out_dir=tmp_path)
    scenario = parse_scenario(tiny_scenario_doc(seed=5))
    a = manager.start(scenario)
    b = manager.start(scenario)
    assert a.wait(60.0) == "done" and b.wait(60.0) == "done"
    bytes_a = (a.run_dir / "metrics.ndjson").read_bytes()
    bytes_b = (b.run_dir / "metrics.ndjson").read_bytes()
    assert bytes_a == bytes_b


def test_failed_compile_surfaces_as_failed_run(tmp_path):
    doc = tiny_scenario_doc(tle_path="missing.tle")
    del doc["shell"]
    scenario = parse_scenario(doc)
    run = RunManager(out_dir=tmp_path).start(scenario)
    assert run.wait(30.0) == "failed"
    assert "missing.tle" in run.error
    assert run.log.closed


def test_interactive_ping_requires_running_state(tmp_path):
    manager = RunManager(out_dir=tmp_path)
    # Paced at 2 simulated seconds per wall second: ~2s of wall time to probe.
    doc = tiny_scenario_doc(duration_s=4.0)
    run = manager.start(parse_scenario(doc), realtime_factor=2.0)
    assert _wait_state(run, "running")

    sample = manager.ping(run.run_id, "gs-a", "gs-b")
    assert sample["kind"] == "rtt_sample"
    assert sample["src"] == "gs-a" and sample["dst"] == "gs-b"
    if not sample["timed_out"]:
        assert sample["rtt_s"] >= sample["theoretical_rtt_s"] - 1e-12

    with pytest.raises(ValidationError, match="unknown"):
        manager.ping(run.run_id, "gs-a", "nowhere")

    assert run.wait(60.0) == "done"
    with pytest.raises(ValidationError, match="not running"):
        manager.ping(run.run_id, "gs-a", "gs-b")


def test_inject_scales_next_slots(tmp_path):
    manager = RunManager(out_dir=tmp_path)
    doc = tiny_scenario_doc(duration_s=4.0, workload=[])
    run = manager.start(parse_scenario(doc), realtime_factor=2.0)
    assert _wait_state(run, "running")
    echoed = manager.inject(run.run_id, fail_isls=True, capacity_scale=0.5)
    assert echoed == {"fail_isls": True, "capacity_scale": 0.5}
    assert run.wait(60.0) == "done"
    # The transform lands at some later boundary; at least one slot after the
    # first must report failed ISLs.
    failed = [r["failed_link_count"] for r in run.log.of_kind("topology_record")]
    assert any(count > 0 for count in failed[1:])
    with pytest.raises(ValidationError, match="not running"):
        manager.inject(run.run_id, capacity_scale=2.0)
