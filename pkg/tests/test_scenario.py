"""Scenario parsing, validation paths, canonical hashing, compilation."""

import json

import pytest

from satsim import ValidationError
from satsim.engine import FlowDirective, PingDirective
from satsim.scenario import (
    Scenario,
    ScenarioError,
    bundled_scenario,
    bundled_scenarios,
    load_scenario,
    parse_scenario,
)
from satsim.tle import export_tle
from satsim.constellation import ShellSpec, synthesize_walker


def _doc(**overrides):
    """A small valid scenario document; overrides are applied on top."""
    base = {
        "schema_version": 1,
        "name": "tiny",
        "shell": {
            "plane_count": 6,
            "sats_per_plane": 6,
            "altitude_km": 550.0,
            "inclination_deg": 53.2,
        },
        "ground_stations": [
            {"gs_id": "a", "latitude_deg": 0.0, "longitude_deg": 0.0},
            {"gs_id": "b", "latitude_deg": 10.0, "longitude_deg": 20.0},
        ],
        "radio": {
            "frequency_hz": 1.2e10,
            "bandwidth_hz": 2.5e8,
            "tx_power_w": 20.0,
            "g_max_dbi": 34.5,
            "aperture_radius_m": 0.3,
            "rx_gain_dbi": 40.0,
            "rx_noise_temp_k": 150.0,
        },
        "isl_capacity_bit_s": 1.0e9,
        "relay_mode": "isl",
        "slot_duration_s": 1.0,
        "duration_s": 2.0,
    }
    base.update(overrides)
    return base


def test_minimal_document_fills_defaults():
    sc = parse_scenario(_doc())
    assert sc.name == "tiny"
    assert sc.doc["algorithm"] == "centralized"
    assert sc.doc["seed"] == 0
    assert sc.doc["timeout_s"] == 2.0
    assert sc.doc["radio"]["elevation_mask_deg"] == 25.0
    assert sc.doc["processing"]["per_hop_processing_s"] == pytest.approx(200e-6)
    assert sc.doc["processing"]["endpoint_overhead_s"] == pytest.approx(300e-6)
    assert sc.doc["workload"] == []
    assert sc.doc["failure_plan"] is None
    assert len(sc.scenario_hash) == 64


def test_unknown_fields_rejected_with_paths():
    doc = _doc(bogus=1)
    doc["shell"]["extra"] = 2
    doc["ground_stations"][0]["coord"] = 3
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario(doc)
    errors = excinfo.value.errors
    assert any(e.startswith("bogus:") and "unknown field" in e for e in errors)
    assert any(e.startswith("shell.extra:") for e in errors)
    assert any(e.startswith("ground_stations[0].coord:") for e in errors)


def test_every_error_reported_in_one_pass():
    doc = _doc(relay_mode="teleport", slot_duration_s=-1.0)
    del doc["radio"]
    doc["ground_stations"][1]["latitude_deg"] = 123.0
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario(doc)
    errors = excinfo.value.errors
    assert len(errors) >= 4
    assert any(e.startswith("relay_mode:") for e in errors)
    assert any(e.startswith("slot_duration_s:") for e in errors)
    assert any(e.startswith("radio:") for e in errors)
    assert any(e.startswith("ground_stations[1].latitude_deg:") for e in errors)


def test_exactly_one_constellation_source():
    doc = _doc()
    del doc["shell"]
    with pytest.raises(ScenarioError, match="exactly one of shell / tle_path"):
        parse_scenario(doc)
    both = _doc(tle_path="x.tle")
    with pytest.raises(ScenarioError, match="exactly one of shell / tle_path"):
        parse_scenario(both)


def test_duplicate_station_id_is_named():
    doc = _doc()
    doc["ground_stations"].append({"gs_id": "a", "latitude_deg": 5.0, "longitude_deg": 5.0})
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario(doc)
    assert any(e.startswith("ground_stations[2].gs_id:") and "'a'" in e for e in excinfo.value.errors)


def test_schema_version_checked():
    doc = _doc(schema_version=99)
    with pytest.raises(ScenarioError, match="schema_version"):
        parse_scenario(doc)
    doc = _doc()
    del doc["schema_version"]
    with pytest.raises(ScenarioError, match="schema_version"):
        parse_scenario(doc)


def test_hash_stable_across_key_order_and_explicit_defaults():
    plain = parse_scenario(_doc())
    explicit = _doc(algorithm="centralized", seed=0, timeout_s=2.0, description="", workload=[])
    # Rebuild with keys inserted in a different order.
    shuffled = {k: explicit[k] for k in reversed(list(explicit))}
    assert parse_scenario(shuffled).scenario_hash == plain.scenario_hash

    reseeded = plain.with_seed(1)
    assert reseeded.scenario_hash != plain.scenario_hash
    assert reseeded.doc["seed"] == 1


def test_capacity_override_and_pattern_are_exclusive():
    doc = _doc(capacity_override_bit_s=1.0e7, capacity_pattern_bit_s=[1.0e7, 1.0e6])
    with pytest.raises(ScenarioError, match="cannot be combined"):
        parse_scenario(doc)


def test_flow_window_checked_against_duration():
    doc = _doc(workload=[{"kind": "flow", "src": "a", "dst": "b", "t_start_s": 0.0, "t_end_s": 3.0}])
    with pytest.raises(ScenarioError, match=r"workload\[0\].t_end_s"):
        parse_scenario(doc)


def test_workload_station_references_checked():
    doc = _doc(workload=[{"kind": "ping", "src": "a", "dst": "nowhere"}])
    with pytest.raises(ScenarioError, match="unknown ground station 'nowhere'"):
        parse_scenario(doc)


def test_compile_builds_bundle_with_directives():
    doc = _doc(
        seed=9,
        workload=[
            {"kind": "ping", "src": "a", "dst": "b", "first_t_s": 0.5, "interval_s": 1.0},
            {"kind": "flow", "src": "a", "dst": "b", "t_start_s": 0.0, "t_end_s": 2.0},
        ],
        failure_plan={"failure_rate": 0.25},
    )
    bundle = parse_scenario(doc).compile()
    assert len(bundle.constellation.sat_ids) == 36
    assert bundle.schedule is not None and bundle.schedule.n_slots == 2
    assert bundle.algorithm_name == "centralized"
    assert isinstance(bundle.workload[0], PingDirective)
    assert isinstance(bundle.workload[1], FlowDirective)
    # Failure seed defaults to the scenario seed so a --seed override moves it.
    assert bundle.failure_plan.seed == 9
    explicit = _doc(seed=9, failure_plan={"failure_rate": 0.25, "seed": 1234})
    assert parse_scenario(explicit).compile().failure_plan.seed == 1234


def test_capacity_pattern_cycles_per_slot():
    doc = _doc(duration_s=4.0, capacity_pattern_bit_s=[2.0e7, 5.0e6])
    schedule = parse_scenario(doc).compile().schedule
    assert schedule.n_slots == 4
    for i, entries in enumerate(schedule.slots):
        want = [2.0e7, 5.0e6][i % 2]
        for _, capacity in entries.values():
            assert capacity == pytest.approx(want)


def test_load_scenario_roundtrip(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(_doc()))
    loaded = load_scenario(path)
    assert isinstance(loaded, Scenario)
    assert loaded.scenario_hash == parse_scenario(_doc()).scenario_hash
    assert loaded.source_path == path


def test_json_syntax_error_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"name": }')
    with pytest.raises(ValidationError, match=r"broken\.json:1:10"):
        load_scenario(path)


def test_tle_path_resolves_relative_to_scenario_file(tmp_path):
    con = synthesize_walker(ShellSpec(plane_count=2, sats_per_plane=3, altitude_km=550.0, inclination_deg=53.2))
    (tmp_path / "const.tle").write_text(export_tle(con))
    doc = _doc(tle_path="const.tle")
    del doc["shell"]
    (tmp_path / "s.json").write_text(json.dumps(doc))
    bundle = load_scenario(tmp_path / "s.json").compile()
    assert len(bundle.constellation.sat_ids) == 6


def test_bundled_scenarios_parse_and_compile_lightly():
    names = [s.name for s in bundled_scenarios()]
    assert names == sorted(names)
    assert "kuiper-relay-steady" in names
    assert "kuiper-relay-varying" in names
    assert "starlink-isl-failures" in names
    assert "starlink-global-pings" in names
    sc = bundled_scenario("kuiper-relay-steady")
    assert sc.doc["relay_mode"] == "ground-relay"
    assert sc.doc["capacity_override_bit_s"] == pytest.approx(1.0e7)
    with pytest.raises(ValidationError, match="unknown bundled scenario"):
        bundled_scenario("nope")
