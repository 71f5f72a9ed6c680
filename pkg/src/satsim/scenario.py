"""Scenario files: parsing, validation, canonical hashing, compilation.

A scenario is a single JSON object that pins down everything a run needs:
the constellation (synthesized shell or TLE file), ground stations, the
radio front end, link capacities, failure injection, routing algorithm,
and the probe/flow workload. Validation is all-at-once: every problem in
the document is reported in one error, each prefixed with the JSON path
of the offending field, so a bad file never needs more than one round
trip to fix.

The scenario hash is a sha256 over the normalized document (defaults
filled in, keys sorted), so two files that mean the same thing hash the
same even when they spell it differently.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .constellation import Constellation, GroundStation, ShellSpec, synthesize_walker
from .engine import (
    RELAY_MODES,
    FlowDirective,
    PingDirective,
    ProcessingModel,
    ScenarioBundle,
)
from .errors import ValidationError
from .pathcomp import available_algorithms
from .phy import RadioParams, capacity_schedule
from .tle import import_tle
from .topology import FailurePlan

__all__ = [
    "SCHEMA_VERSION",
    "Scenario",
    "ScenarioError",
    "bundled_scenario",
    "bundled_scenarios",
    "load_scenario",
    "parse_scenario",
]

SCHEMA_VERSION = 1

_FAILURE_SCOPES = ("isl-only", "all")


class ScenarioError(ValidationError):
    """Scenario document failed validation; ``errors`` lists every problem
    found, one ``path: message`` string per field."""

    def __init__(self, errors: list[str]):
        self.errors = tuple(errors)
        lines = "\n  ".join(errors)
        super().__init__(f"invalid scenario ({len(errors)} error(s)):\n  {lines}")


def _is_num(value: Any) -> bool:
    # bool is an int subclass; a scenario saying "seed": true is a mistake.
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class _Validator:
    """Accumulates path-prefixed errors while normalizing a document."""

    def __init__(self) -> None:
        self.errors: list[str] = []

    def err(self, path: str, message: str) -> None:
        self.errors.append(f"{path}: {message}")

    def take_num(
        self,
        src: dict,
        key: str,
        path: str,
        *,
        required: bool = False,
        default: float | None = None,
        min_: float | None = None,
        min_exclusive: bool = False,
        max_: float | None = None,
    ) -> float | None:
        value = src.pop(key, None)
        # Explicit JSON null means "unset", same as leaving the key out.
        if value is None:
            if required:
                self.err(f"{path}{key}", "required field is missing")
            return default
        if not _is_num(value):
            self.err(f"{path}{key}", f"expected a number, got {type(value).__name__}")
            return default
        value = float(value)
        if min_ is not None:
            if min_exclusive and value <= min_:
                self.err(f"{path}{key}", f"must be > {min_}, got {value}")
            elif not min_exclusive and value < min_:
                self.err(f"{path}{key}", f"must be >= {min_}, got {value}")
        if max_ is not None and value > max_:
            self.err(f"{path}{key}", f"must be <= {max_}, got {value}")
        return value

    def take_int(
        self,
        src: dict,
        key: str,
        path: str,
        *,
        required: bool = False,
        default: int | None = None,
        min_: int | None = None,
    ) -> int | None:
        value = src.pop(key, None)
        if value is None:
            if required:
                self.err(f"{path}{key}", "required field is missing")
            return default
        if not isinstance(value, int) or isinstance(value, bool):
            self.err(f"{path}{key}", f"expected an integer, got {type(value).__name__}")
            return default
        if min_ is not None and value < min_:
            self.err(f"{path}{key}", f"must be >= {min_}, got {value}")
        return value

    def take_str(
        self,
        src: dict,
        key: str,
        path: str,
        *,
        required: bool = False,
        default: str | None = None,
        choices: tuple[str, ...] | None = None,
        nonempty: bool = True,
    ) -> str | None:
        value = src.pop(key, None)
        if value is None:
            if required:
                self.err(f"{path}{key}", "required field is missing")
            return default
        if not isinstance(value, str):
            self.err(f"{path}{key}", f"expected a string, got {type(value).__name__}")
            return default
        if nonempty and not value:
            self.err(f"{path}{key}", "must not be empty")
            return default
        if choices is not None and value not in choices:
            self.err(f"{path}{key}", f"must be one of {list(choices)}, got {value!r}")
            return default
        return value

    def reject_leftovers(self, src: dict, path: str) -> None:
        for key in sorted(src):
            self.err(f"{path}{key}", "unknown field")


def _normalize(doc: Any) -> tuple[dict, list[str]]:
    """Validate ``doc`` and return (normalized document, errors).

    The normalized document has every optional field filled with its
    default and every number coerced to float (integers that are counts
    or seeds stay integers), so it hashes stably.
    """
    v = _Validator()
    if not isinstance(doc, dict):
        return {}, ["$: scenario must be a JSON object"]
    d = dict(doc)
    norm: dict[str, Any] = {"schema_version": SCHEMA_VERSION}

    version = d.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        v.err("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")

    norm["name"] = v.take_str(d, "name", "", required=True)
    norm["description"] = v.take_str(d, "description", "", default="", nonempty=False)
    norm["seed"] = v.take_int(d, "seed", "", default=0)

    shell_doc = d.pop("shell", None)
    tle_path = d.pop("tle_path", None)
    if (shell_doc is None) == (tle_path is None):
        v.err("shell", "exactly one of shell / tle_path must be given")
    norm["shell"] = None
    norm["tle_path"] = None
    if shell_doc is not None:
        if not isinstance(shell_doc, dict):
            v.err("shell", f"expected an object, got {type(shell_doc).__name__}")
        else:
            s = dict(shell_doc)
            norm["shell"] = {
                "plane_count": v.take_int(s, "plane_count", "shell.", required=True, min_=1),
                "sats_per_plane": v.take_int(s, "sats_per_plane", "shell.", required=True, min_=1),
                "altitude_km": v.take_num(s, "altitude_km", "shell.", required=True, min_=0.0, min_exclusive=True),
                "inclination_deg": v.take_num(s, "inclination_deg", "shell.", required=True, min_=0.0, max_=180.0),
                "phasing_offset": v.take_num(s, "phasing_offset", "shell.", default=0.0, min_=0.0),
            }
            phasing = norm["shell"]["phasing_offset"]
            if phasing is not None and phasing >= 1.0:
                v.err("shell.phasing_offset", f"must be < 1 (fraction of the in-plane spacing), got {phasing}")
            v.reject_leftovers(s, "shell.")
    if tle_path is not None:
        if not isinstance(tle_path, str) or not tle_path:
            v.err("tle_path", "expected a nonempty string")
        else:
            norm["tle_path"] = tle_path

    stations_doc = d.pop("ground_stations", None)
    norm["ground_stations"] = []
    station_ids: set[str] = set()
    if not isinstance(stations_doc, list) or not stations_doc:
        v.err("ground_stations", "expected a nonempty list")
    else:
        for i, entry in enumerate(stations_doc):
            path = f"ground_stations[{i}]."
            if not isinstance(entry, dict):
                v.err(path.rstrip("."), f"expected an object, got {type(entry).__name__}")
                continue
            g = dict(entry)
            gs_id = v.take_str(g, "gs_id", path, required=True)
            if gs_id is not None:
                if gs_id in station_ids:
                    v.err(f"{path}gs_id", f"duplicate station id {gs_id!r}")
                station_ids.add(gs_id)
            norm["ground_stations"].append(
                {
                    "gs_id": gs_id,
                    "name": v.take_str(g, "name", path, default=gs_id, nonempty=False),
                    "latitude_deg": v.take_num(g, "latitude_deg", path, required=True, min_=-90.0, max_=90.0),
                    "longitude_deg": v.take_num(g, "longitude_deg", path, required=True, min_=-180.0, max_=180.0),
                    "altitude_km": v.take_num(g, "altitude_km", path, default=0.0, min_=0.0),
                }
            )
            v.reject_leftovers(g, path)

    radio_doc = d.pop("radio", None)
    norm["radio"] = None
    if not isinstance(radio_doc, dict):
        v.err("radio", "required field is missing" if radio_doc is None else "expected an object")
    else:
        r = dict(radio_doc)
        norm["radio"] = {
            "frequency_hz": v.take_num(r, "frequency_hz", "radio.", required=True, min_=0.0, min_exclusive=True),
            "bandwidth_hz": v.take_num(r, "bandwidth_hz", "radio.", required=True, min_=0.0, min_exclusive=True),
            "tx_power_w": v.take_num(r, "tx_power_w", "radio.", required=True, min_=0.0, min_exclusive=True),
            "g_max_dbi": v.take_num(r, "g_max_dbi", "radio.", required=True),
            "aperture_radius_m": v.take_num(r, "aperture_radius_m", "radio.", required=True, min_=0.0, min_exclusive=True),
            "rx_gain_dbi": v.take_num(r, "rx_gain_dbi", "radio.", required=True),
            "rx_noise_temp_k": v.take_num(r, "rx_noise_temp_k", "radio.", required=True, min_=0.0, min_exclusive=True),
            "elevation_mask_deg": v.take_num(r, "elevation_mask_deg", "radio.", default=25.0, min_=0.0, max_=90.0),
        }
        v.reject_leftovers(r, "radio.")

    norm["isl_capacity_bit_s"] = v.take_num(d, "isl_capacity_bit_s", "", required=True, min_=0.0, min_exclusive=True)
    norm["relay_mode"] = v.take_str(d, "relay_mode", "", required=True, choices=RELAY_MODES)
    norm["slot_duration_s"] = v.take_num(d, "slot_duration_s", "", required=True, min_=0.0, min_exclusive=True)
    norm["duration_s"] = v.take_num(d, "duration_s", "", required=True, min_=0.0, min_exclusive=True)
    norm["algorithm"] = v.take_str(d, "algorithm", "", default="centralized", choices=available_algorithms())
    norm["timeout_s"] = v.take_num(d, "timeout_s", "", default=2.0, min_=0.0, min_exclusive=True)

    failure_doc = d.pop("failure_plan", None)
    norm["failure_plan"] = None
    if failure_doc is not None:
        if not isinstance(failure_doc, dict):
            v.err("failure_plan", f"expected an object, got {type(failure_doc).__name__}")
        else:
            f = dict(failure_doc)
            norm["failure_plan"] = {
                "failure_rate": v.take_num(f, "failure_rate", "failure_plan.", required=True, min_=0.0, max_=1.0),
                # None means "inherit the scenario seed" at compile time.
                "seed": v.take_int(f, "seed", "failure_plan.", default=None),
                "scope": v.take_str(f, "scope", "failure_plan.", default="isl-only", choices=_FAILURE_SCOPES),
            }
            v.reject_leftovers(f, "failure_plan.")

    override = v.take_num(d, "capacity_override_bit_s", "", default=None, min_=0.0)
    pattern_doc = d.pop("capacity_pattern_bit_s", None)
    pattern: list[float] | None = None
    if pattern_doc is not None:
        if not isinstance(pattern_doc, list) or not pattern_doc:
            v.err("capacity_pattern_bit_s", "expected a nonempty list of numbers")
        else:
            pattern = []
            for i, value in enumerate(pattern_doc):
                if not _is_num(value) or value < 0:
                    v.err(f"capacity_pattern_bit_s[{i}]", f"expected a number >= 0, got {value!r}")
                    pattern.append(0.0)
                else:
                    pattern.append(float(value))
    if override is not None and pattern is not None:
        v.err("capacity_override_bit_s", "cannot be combined with capacity_pattern_bit_s")
    norm["capacity_override_bit_s"] = override
    norm["capacity_pattern_bit_s"] = pattern

    workload_doc = d.pop("workload", [])
    norm["workload"] = []
    duration = norm["duration_s"]
    if not isinstance(workload_doc, list):
        v.err("workload", f"expected a list, got {type(workload_doc).__name__}")
    else:
        for i, entry in enumerate(workload_doc):
            path = f"workload[{i}]."
            if not isinstance(entry, dict):
                v.err(path.rstrip("."), f"expected an object, got {type(entry).__name__}")
                continue
            w = dict(entry)
            kind = v.take_str(w, "kind", path, required=True, choices=("ping", "flow"))
            src = v.take_str(w, "src", path, required=True)
            dst = v.take_str(w, "dst", path, required=True)
            for field_name, node in (("src", src), ("dst", dst)):
                if node is not None and station_ids and node not in station_ids:
                    v.err(f"{path}{field_name}", f"unknown ground station {node!r}")
            if kind == "ping":
                norm["workload"].append(
                    {
                        "kind": "ping",
                        "src": src,
                        "dst": dst,
                        "first_t_s": v.take_num(w, "first_t_s", path, default=0.0, min_=0.0),
                        "interval_s": v.take_num(w, "interval_s", path, default=0.0, min_=0.0),
                        "count": v.take_int(w, "count", path, default=None, min_=1),
                    }
                )
            elif kind == "flow":
                if src is not None and src == dst:
                    v.err(f"{path}dst", "flow src and dst must differ")
                t_start = v.take_num(w, "t_start_s", path, required=True, min_=0.0)
                t_end = v.take_num(w, "t_end_s", path, required=True, min_=0.0, min_exclusive=True)
                if t_start is not None and t_end is not None and t_end <= t_start:
                    v.err(f"{path}t_end_s", f"must be > t_start_s ({t_start}), got {t_end}")
                if t_end is not None and duration is not None and t_end > duration:
                    v.err(f"{path}t_end_s", f"must be <= duration_s ({duration}), got {t_end}")
                norm["workload"].append(
                    {"kind": "flow", "src": src, "dst": dst, "t_start_s": t_start, "t_end_s": t_end}
                )
            v.reject_leftovers(w, path)

    processing_doc = d.pop("processing", None)
    defaults = ProcessingModel()
    norm["processing"] = {
        "per_hop_processing_s": defaults.per_hop_processing_s,
        "endpoint_overhead_s": defaults.endpoint_overhead_s,
    }
    if processing_doc is not None:
        if not isinstance(processing_doc, dict):
            v.err("processing", f"expected an object, got {type(processing_doc).__name__}")
        else:
            p = dict(processing_doc)
            norm["processing"] = {
                "per_hop_processing_s": v.take_num(
                    p, "per_hop_processing_s", "processing.", default=defaults.per_hop_processing_s, min_=0.0
                ),
                "endpoint_overhead_s": v.take_num(
                    p, "endpoint_overhead_s", "processing.", default=defaults.endpoint_overhead_s, min_=0.0
                ),
            }
            v.reject_leftovers(p, "processing.")

    v.reject_leftovers(d, "")
    return norm, v.errors


def _canonical_hash(norm: dict) -> str:
    payload = json.dumps(norm, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()


@dataclass(frozen=True)
class Scenario:
    """A validated, normalized scenario document.

    ``doc`` always has the full key set with defaults filled in;
    ``scenario_hash`` identifies the document independent of formatting.
    """

    doc: dict
    scenario_hash: str
    source_path: Path | None = None

    @property
    def name(self) -> str:
        return self.doc["name"]

    @property
    def description(self) -> str:
        return self.doc["description"]

    def with_seed(self, seed: int) -> "Scenario":
        """Same scenario with the top-level seed replaced (hash changes)."""
        doc = json.loads(json.dumps(self.doc))
        doc["seed"] = int(seed)
        norm, errors = _normalize(doc)
        if errors:  # pragma: no cover - the base doc already validated
            raise ScenarioError(errors)
        return Scenario(doc=norm, scenario_hash=_canonical_hash(norm), source_path=self.source_path)

    def compile(self) -> ScenarioBundle:
        """Build the engine-ready bundle: constellation, per-slot capacity
        schedule, failure plan, and workload directives."""
        doc = self.doc
        constellation = self._constellation()
        stations = tuple(GroundStation(**entry) for entry in doc["ground_stations"])
        radio = RadioParams(**doc["radio"])

        override = doc["capacity_override_bit_s"]
        pattern = doc["capacity_pattern_bit_s"]
        capacity_fn = None
        if override is not None:
            capacity_fn = lambda slot: override  # noqa: E731
        elif pattern is not None:
            capacity_fn = lambda slot: pattern[slot % len(pattern)]  # noqa: E731

        schedule = capacity_schedule(
            constellation,
            list(stations),
            radio,
            doc["slot_duration_s"],
            doc["duration_s"],
            capacity_override=capacity_fn,
        )

        failure_plan = None
        if doc["failure_plan"] is not None:
            f = doc["failure_plan"]
            seed = f["seed"] if f["seed"] is not None else doc["seed"]
            failure_plan = FailurePlan(failure_rate=f["failure_rate"], seed=seed, scope=f["scope"])

        workload = []
        for entry in doc["workload"]:
            if entry["kind"] == "ping":
                workload.append(
                    PingDirective(
                        src=entry["src"],
                        dst=entry["dst"],
                        first_t_s=entry["first_t_s"],
                        interval_s=entry["interval_s"],
                        count=entry["count"],
                    )
                )
            else:
                workload.append(
                    FlowDirective(
                        src=entry["src"],
                        dst=entry["dst"],
                        t_start_s=entry["t_start_s"],
                        t_end_s=entry["t_end_s"],
                    )
                )

        return ScenarioBundle(
            name=doc["name"],
            constellation=constellation,
            ground_stations=stations,
            schedule=schedule,
            isl_capacity_bit_s=doc["isl_capacity_bit_s"],
            relay_mode=doc["relay_mode"],
            slot_duration_s=doc["slot_duration_s"],
            duration_s=doc["duration_s"],
            failure_plan=failure_plan,
            algorithm_name=doc["algorithm"],
            workload=tuple(workload),
            seed=doc["seed"],
            scenario_hash=self.scenario_hash,
            elevation_mask_deg=doc["radio"]["elevation_mask_deg"],
            processing=ProcessingModel(**doc["processing"]),
            timeout_s=doc["timeout_s"],
        )

    def _constellation(self) -> Constellation:
        if self.doc["shell"] is not None:
            return synthesize_walker(ShellSpec(**self.doc["shell"]))
        tle_path = Path(self.doc["tle_path"])
        if not tle_path.is_absolute() and self.source_path is not None:
            tle_path = self.source_path.parent / tle_path
        try:
            text = tle_path.read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read tle_path {tle_path}: {exc}") from exc
        return import_tle(text)


def parse_scenario(doc: Any, source_path: Path | None = None) -> Scenario:
    """Validate an in-memory scenario document. Raises ScenarioError with
    every problem found when the document is invalid."""
    norm, errors = _normalize(doc)
    if errors:
        raise ScenarioError(errors)
    return Scenario(doc=norm, scenario_hash=_canonical_hash(norm), source_path=source_path)


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_scenario(doc, source_path=path)


def bundled_scenarios() -> list[Scenario]:
    """Scenarios shipped inside the package, sorted by name."""
    out = []
    root = resources.files("satsim").joinpath("scenarios")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out.append(parse_scenario(json.loads(entry.read_text())))
    return sorted(out, key=lambda s: s.name)


def bundled_scenario(name: str) -> Scenario:
    """Look up one bundled scenario by its ``name`` field."""
    for scenario in bundled_scenarios():
        if scenario.name == name:
            return scenario
    known = [s.name for s in bundled_scenarios()]
    raise ValidationError(f"unknown bundled scenario {name!r} (known: {known})")
