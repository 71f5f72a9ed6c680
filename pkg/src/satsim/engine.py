"""Deterministic slot-driven event engine.

Replays the per-slot topology/capacity series, carries ping probes hop by
hop with configurable processing delays, and runs an AIMD rate controller
against the path's per-slot bottleneck capacity. Everything is driven by a
single heap of (timestamp, sequence) events, so a (scenario, seed) pair
reproduces a bit-identical metrics stream.
"""

from __future__ import annotations

import heapq
import itertools
import json
import threading
import time
from dataclasses import dataclass, field, replace

from satsim import __version__
from satsim.constellation import Constellation, GroundStation
from satsim.errors import NoRouteError, ValidationError
from satsim.pathcomp import PathRecord, get_algorithm, route as _route
from satsim.phy import CapacitySchedule, slot_count
from satsim.topology import FailurePlan, Link, TopologySnapshot, build_snapshot

# AIMD window unit: one 1500-byte segment equivalent.
SEGMENT_BITS = 1500 * 8

RELAY_MODES = ("ground-relay", "isl")


@dataclass(frozen=True)
class ProcessingModel:
    """Stack overheads added on top of propagation: the sending endpoint
    pays endpoint_overhead_s once per direction, every intermediate
    forwarding node pays per_hop_processing_s."""

    per_hop_processing_s: float = 200e-6
    endpoint_overhead_s: float = 300e-6

    def __post_init__(self):
        if self.per_hop_processing_s < 0 or self.endpoint_overhead_s < 0:
            raise ValidationError("processing delays must be nonnegative")


@dataclass(frozen=True)
class PingDirective:
    """Probe src -> dst at first_t_s, then every interval_s while the run
    lasts (or count probes, when given). interval_s = 0 means one probe."""

    src: str
    dst: str
    first_t_s: float = 0.0
    interval_s: float = 0.0
    count: int | None = None

    def __post_init__(self):
        if self.first_t_s < 0:
            raise ValidationError(f"ping first_t_s must be >= 0, got {self.first_t_s}")
        if self.interval_s < 0:
            raise ValidationError(f"ping interval_s must be >= 0, got {self.interval_s}")
        if self.count is not None and self.count < 1:
            raise ValidationError(f"ping count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class FlowDirective:
    src: str
    dst: str
    t_start_s: float
    t_end_s: float

    def __post_init__(self):
        if self.src == self.dst:
            raise ValidationError("flow src and dst must differ")
        if self.t_start_s < 0 or self.t_end_s <= self.t_start_s:
            raise ValidationError(f"flow window [{self.t_start_s}, {self.t_end_s}) is not a positive span")


@dataclass(frozen=True)
class SlotTransform:
    """What-if steering: applied to every slot from the next boundary on,
    until replaced by another transform."""

    fail_isls: bool = False
    capacity_scale: float = 1.0

    def __post_init__(self):
        if self.capacity_scale <= 0:
            raise ValidationError(f"capacity_scale must be > 0, got {self.capacity_scale}")

    @property
    def is_identity(self) -> bool:
        return not self.fail_isls and self.capacity_scale == 1.0


@dataclass(frozen=True)
class ScenarioBundle:
    """Everything one run needs, compiled ahead of time."""

    name: str
    constellation: Constellation
    ground_stations: tuple[GroundStation, ...]
    schedule: CapacitySchedule | None
    isl_capacity_bit_s: float
    relay_mode: str
    slot_duration_s: float
    duration_s: float
    failure_plan: FailurePlan | None = None
    algorithm_name: str = "centralized"
    workload: tuple = ()
    seed: int = 0
    scenario_hash: str = ""
    elevation_mask_deg: float = 25.0
    processing: ProcessingModel = field(default_factory=ProcessingModel)
    timeout_s: float = 2.0

    def __post_init__(self):
        if self.relay_mode not in RELAY_MODES:
            raise ValidationError(f"relay_mode must be one of {RELAY_MODES}, got {self.relay_mode!r}")
        if self.isl_capacity_bit_s <= 0:
            raise ValidationError(f"isl_capacity_bit_s must be > 0, got {self.isl_capacity_bit_s}")
        if self.timeout_s <= 0:
            raise ValidationError(f"timeout_s must be > 0, got {self.timeout_s}")
        n = slot_count(self.duration_s, self.slot_duration_s)
        if self.schedule is not None:
            if abs(self.schedule.slot_duration_s - self.slot_duration_s) > 1e-12:
                raise ValidationError("schedule slot duration does not match the scenario slot duration")
            if self.schedule.n_slots < n:
                raise ValidationError(
                    f"schedule covers {self.schedule.n_slots} slots, scenario needs {n}"
                )
        gs_ids = {gs.gs_id for gs in self.ground_stations}
        for d in self.workload:
            for node in (d.src, d.dst):
                if node not in gs_ids:
                    raise ValidationError(f"workload references unknown ground station {node!r}")
            if isinstance(d, FlowDirective) and d.t_end_s > self.duration_s + 1e-9:
                raise ValidationError(f"flow ends at {d.t_end_s}s, beyond the {self.duration_s}s scenario")

    @property
    def n_slots(self) -> int:
        return slot_count(self.duration_s, self.slot_duration_s)


@dataclass(frozen=True)
class RttSample:
    launch_t_s: float
    src: str
    dst: str
    rtt_s: float
    theoretical_rtt_s: float
    hop_count: int
    path: tuple[str, ...]
    timed_out: bool = False

    def as_record(self) -> dict:
        return {
            "kind": "rtt_sample",
            "launch_t_s": self.launch_t_s,
            "src": self.src,
            "dst": self.dst,
            "rtt_s": self.rtt_s,
            "theoretical_rtt_s": self.theoretical_rtt_s,
            "hop_count": self.hop_count,
            "path": list(self.path),
            "timed_out": self.timed_out,
        }


@dataclass
class FlowStats:
    """Per-flow accumulator, filled in while the run executes."""

    src: str
    dst: str
    t_start_s: float
    t_end_s: float
    slot_indices: list[int] = field(default_factory=list)
    send_rate_bit_s: list[float] = field(default_factory=list)
    cwnd_trace: list[tuple[float, float]] = field(default_factory=list)
    bottleneck_trace: list[tuple[int, float]] = field(default_factory=list)


@dataclass
class MetricsLog:
    """Append-only record stream; the header precedes every sample."""

    header: dict
    records: list[dict] = field(default_factory=list)

    def of_kind(self, kind: str) -> list[dict]:
        return [r for r in self.records if r["kind"] == kind]

    @property
    def rtt_samples(self) -> list[dict]:
        return self.of_kind("rtt_sample")

    @property
    def flow_samples(self) -> list[dict]:
        return self.of_kind("flow_rate_sample")

    @property
    def path_records(self) -> list[dict]:
        return self.of_kind("path_record")

    @property
    def topology_records(self) -> list[dict]:
        return self.of_kind("topology_record")

    def lines(self) -> list[str]:
        out = [_json_line(self.header)]
        out.extend(_json_line(r) for r in self.records)
        return out


def _json_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class _PendingPing:
    """Handle for an interactive probe; resolves when the sample lands."""

    def __init__(self):
        self._done = threading.Event()
        self.sample: RttSample | None = None

    def resolve(self, sample: RttSample) -> None:
        self.sample = sample
        self._done.set()

    def wait(self, timeout_s: float | None = None) -> RttSample:
        if not self._done.wait(timeout_s):
            raise TimeoutError("probe did not complete in time")
        return self.sample


class _Probe:
    __slots__ = ("src", "dst", "launch_t_s", "path", "index", "direction", "prop_s", "fwd_hops", "pending")

    def __init__(self, src, dst, launch_t_s, pending=None):
        self.src = src
        self.dst = dst
        self.launch_t_s = launch_t_s
        self.path: tuple[str, ...] = ()
        self.index = 0
        self.direction = "fwd"
        self.prop_s = 0.0
        self.fwd_hops: tuple[str, ...] = ()
        self.pending = pending


class _FlowState:
    __slots__ = (
        "directive", "stats", "active", "cwnd", "slow_start", "rtt_s",
        "rate_bit_s", "bottleneck", "last_t", "slot_bits", "sampled_slot",
    )

    def __init__(self, directive: FlowDirective):
        self.directive = directive
        self.stats = FlowStats(directive.src, directive.dst, directive.t_start_s, directive.t_end_s)
        self.active = False
        self.cwnd = 1.0
        self.slow_start = True
        self.rtt_s = 0.0
        self.rate_bit_s = 0.0
        self.bottleneck: float | None = None
        self.last_t = directive.t_start_s
        self.slot_bits = 0.0
        self.sampled_slot = -1


class Emulator:
    """One isolated run over a compiled scenario.

    run() drains the event heap to completion; probes and injections may
    also be submitted from other threads while running and are picked up
    between events. One-shot ping() works without a run by replaying the
    precomputed artifacts directly.
    """

    def __init__(self, bundle: ScenarioBundle, realtime_factor: float = 0.0, on_record=None):
        if realtime_factor < 0:
            raise ValidationError(f"realtime_factor must be >= 0, got {realtime_factor}")
        self.bundle = bundle
        self.realtime_factor = realtime_factor
        self.state = "pending"
        self.completed_slots = 0
        self._algorithm = get_algorithm(bundle.algorithm_name)
        self._gs_ids = {gs.gs_id for gs in bundle.ground_stations}
        self._failure_memo: dict = {}
        self._on_record = on_record

        self._pings = [d for d in bundle.workload if isinstance(d, PingDirective)]
        self._flows = [_FlowState(d) for d in bundle.workload if isinstance(d, FlowDirective)]
        self._scheduled_injects: list[tuple[float, SlotTransform]] = []

        self._heap: list = []
        self._seq = itertools.count()
        self._now = 0.0
        self._snapshot: TopologySnapshot | None = None
        self._bound = None
        self._route_cache: dict = {}
        self._transform = SlotTransform()
        self._commands: list = []
        self._lock = threading.Lock()
        self._log: MetricsLog | None = None
        self._snap_memo: dict[int, TopologySnapshot] = {}

    # -- public control surface ------------------------------------------

    @property
    def progress(self) -> tuple[int, int]:
        return (self.completed_slots, self.bundle.n_slots)

    @property
    def log(self) -> MetricsLog | None:
        return self._log

    def start_flow(self, src: str, dst: str, t_start_s: float, t_end_s: float) -> FlowStats:
        """Register a flow before run(); the returned stats fill in live."""
        if self.state != "pending":
            raise ValidationError("flows must be registered before the run starts")
        directive = FlowDirective(src, dst, t_start_s, t_end_s)
        if t_end_s > self.bundle.duration_s + 1e-9:
            raise ValidationError(f"flow ends at {t_end_s}s, beyond the {self.bundle.duration_s}s scenario")
        self._check_station(src)
        self._check_station(dst)
        flow = _FlowState(directive)
        self._flows.append(flow)
        return flow.stats

    def add_ping(self, directive: PingDirective) -> None:
        if self.state != "pending":
            raise ValidationError("pings must be registered before the run starts")
        self._check_station(directive.src)
        self._check_station(directive.dst)
        self._pings.append(directive)

    def schedule_inject(self, t_s: float, transform: SlotTransform) -> None:
        """Pre-run injection: takes effect at the first boundary after t_s."""
        if self.state != "pending":
            raise ValidationError("scheduled injections must be registered before the run starts")
        if t_s < 0:
            raise ValidationError(f"inject time must be >= 0, got {t_s}")
        self._scheduled_injects.append((t_s, transform))

    def submit_ping(self, src: str, dst: str) -> _PendingPing:
        """Thread-safe: queue a probe for the engine's next safe point."""
        self._check_station(src)
        self._check_station(dst)
        if self.state != "running":
            raise ValidationError(f"run is {self.state}, not running")
        pending = _PendingPing()
        with self._lock:
            self._commands.append(("ping", src, dst, pending))
        return pending

    def submit_inject(self, transform: SlotTransform) -> None:
        if self.state != "running":
            raise ValidationError(f"run is {self.state}, not running")
        with self._lock:
            self._commands.append(("inject", transform))

    # -- the run ----------------------------------------------------------

    def run(self) -> MetricsLog:
        if self.state != "pending":
            raise ValidationError(f"run already {self.state}")
        self.state = "running"
        b = self.bundle
        self._log = MetricsLog(header=self._header())
        if self._on_record is not None:
            self._on_record(self._log.header)
        try:
            # Boundaries enter the heap first so a workload event at exactly
            # t = k * slot sees slot k already installed.
            for k in range(b.n_slots):
                self._push(k * b.slot_duration_s, "slot", k)
            for t_s, transform in sorted(self._scheduled_injects, key=lambda e: e[0]):
                self._push(t_s, "inject", transform)
            for d in self._pings:
                self._expand_ping(d)
            for flow in self._flows:
                self._push(flow.directive.t_start_s, "flow-start", flow)
                self._push(flow.directive.t_end_s, "flow-end", flow)

            wall_start = time.monotonic()
            while self._heap:
                self._drain_commands()
                t, _, kind, payload = heapq.heappop(self._heap)
                if self.realtime_factor > 0:
                    lag = wall_start + t / self.realtime_factor - time.monotonic()
                    if lag > 0:
                        time.sleep(lag)
                self._now = t
                self._dispatch(t, kind, payload)
        except BaseException:
            self.state = "failed"
            raise
        self.state = "done"
        return self._log

    def ping(self, src: str, dst: str, t_s: float) -> RttSample:
        """One-shot probe against the precomputed artifacts at t_s; does not
        need (or touch) a running event loop."""
        self._check_station(src)
        self._check_station(dst)
        if t_s < 0:
            raise ValidationError(f"t_s must be >= 0, got {t_s}")
        p = self.bundle.processing
        if src == dst:
            return RttSample(t_s, src, dst, 2.0 * p.endpoint_overhead_s, 0.0, 0, (src,))

        bounds: dict[int, object] = {}

        def route_at(t: float, a: str, bz: str) -> PathRecord | None:
            snap = self._snapshot_at(t)
            bound = bounds.get(snap.slot_index)
            if bound is None:
                bound = self._algorithm.bind(snap)
                bounds[snap.slot_index] = bound
            try:
                return _route_with(snap, a, bz, bound)
            except NoRouteError:
                return None

        t = t_s
        prop = 0.0
        fwd_hops: tuple[str, ...] = ()
        for leg_src, leg_dst in ((src, dst), (dst, src)):
            rec = route_at(t, leg_src, leg_dst)
            if rec is None:
                return _timeout_sample(t_s, src, dst, self.bundle.timeout_s)
            if leg_src == src:
                fwd_hops = rec.hops
            t += p.endpoint_overhead_s
            for i in range(len(rec.hops) - 1):
                if i > 0:
                    t += p.per_hop_processing_s
                link = _live_between(self._snapshot_at(t), rec.hops[i], rec.hops[i + 1])
                if link is None:
                    return _timeout_sample(t_s, src, dst, self.bundle.timeout_s)
                t += link.delay_s
                prop += link.delay_s
        return RttSample(t_s, src, dst, t - t_s, prop, len(fwd_hops) - 1, fwd_hops)

    # -- event plumbing ----------------------------------------------------

    def _push(self, t_s: float, kind: str, payload) -> None:
        heapq.heappush(self._heap, (t_s, next(self._seq), kind, payload))

    def _dispatch(self, t: float, kind: str, payload) -> None:
        if kind == "slot":
            self._on_slot(t, payload)
        elif kind == "probe-launch":
            self._on_probe_launch(t, payload)
        elif kind == "hop-start":
            self._on_hop_start(t, payload)
        elif kind == "turnaround":
            self._on_turnaround(t, payload)
        elif kind == "complete":
            self._on_complete(t, payload)
        elif kind == "flow-start":
            self._on_flow_start(t, payload)
        elif kind == "flow-tick":
            self._on_flow_tick(t, payload)
        elif kind == "flow-end":
            self._on_flow_end(t, payload)
        elif kind == "inject":
            self._transform = payload

    def _drain_commands(self) -> None:
        if not self._commands:
            return
        with self._lock:
            commands, self._commands = self._commands, []
        for cmd in commands:
            if cmd[0] == "ping":
                _, src, dst, pending = cmd
                self._push(self._now, "probe-launch", _Probe(src, dst, self._now, pending))
            else:
                self._transform = cmd[1]

    def _expand_ping(self, d: PingDirective) -> None:
        t = d.first_t_s
        fired = 0
        while t < self.bundle.duration_s - 1e-12 and (d.count is None or fired < d.count):
            self._push(t, "probe-launch", _Probe(d.src, d.dst, t))
            fired += 1
            if d.interval_s <= 0:
                break
            t = d.first_t_s + fired * d.interval_s

    def _emit(self, record: dict) -> None:
        self._log.records.append(record)
        if self._on_record is not None:
            self._on_record(record)

    def _header(self) -> dict:
        b = self.bundle
        return {
            "kind": "run_header",
            "scenario_name": b.name,
            "scenario_hash": b.scenario_hash,
            "seed": b.seed,
            "algorithm": b.algorithm_name,
            "relay_mode": b.relay_mode,
            "slot_duration_s": b.slot_duration_s,
            "duration_s": b.duration_s,
            "slot_count": b.n_slots,
            "engine_version": __version__,
        }

    def _check_station(self, node: str) -> None:
        if node not in self._gs_ids:
            raise ValidationError(f"unknown ground station {node!r}")

    # -- slot installation -------------------------------------------------

    def _build_slot(self, t_s: float) -> TopologySnapshot:
        b = self.bundle
        snap = build_snapshot(
            t_s,
            b.constellation,
            list(b.ground_stations),
            b.schedule,
            b.isl_capacity_bit_s,
            b.elevation_mask_deg,
            failure_plan=b.failure_plan,
            include_isls=(b.relay_mode == "isl"),
            failure_memo=self._failure_memo,
        )
        return self._apply_transform(snap)

    def _apply_transform(self, snap: TopologySnapshot) -> TopologySnapshot:
        tr = self._transform
        if tr.is_identity:
            return snap
        links = []
        for link in snap.links:
            if tr.fail_isls and link.kind == "isl" and not link.failed:
                link = replace(link, failed=True)
            if tr.capacity_scale != 1.0:
                link = replace(link, capacity_bit_s=link.capacity_bit_s * tr.capacity_scale)
            links.append(link)
        return replace(snap, links=tuple(links))

    def _snapshot_at(self, t_s: float) -> TopologySnapshot:
        """Slot artifacts for one-shot probes; the last slot covers any
        overhang past the horizon, matching the live loop."""
        b = self.bundle
        k = min(int(t_s / b.slot_duration_s + 1e-9), b.n_slots - 1)
        snap = self._snap_memo.get(k)
        if snap is None:
            snap = self._build_slot(k * b.slot_duration_s)
            self._snap_memo[k] = snap
        return snap

    def _on_slot(self, t: float, k: int) -> None:
        self._snapshot = self._build_slot(t)
        self._bound = self._algorithm.bind(self._snapshot)
        self._route_cache = {}
        snap = self._snapshot
        self._emit({
            "kind": "topology_record",
            "slot_index": k,
            "t_s": t,
            "node_count": len(snap.nodes),
            "link_count": len(snap.links),
            "failed_link_count": sum(1 for l in snap.links if l.failed),
        })
        for src, dst in self._monitored_pairs():
            rec = self._route_cached(src, dst)
            if rec is not None:
                self._emit({
                    "kind": "path_record",
                    "slot_index": k,
                    "t_s": t,
                    "src": src,
                    "dst": dst,
                    "hops": list(rec.hops),
                    "hop_count": len(rec.hops) - 1,
                    "total_distance_km": rec.total_distance_km,
                    "theoretical_rtt_s": rec.theoretical_rtt_s,
                })
        for flow in self._flows:
            if flow.active:
                self._integrate(flow, t)
                self._emit_flow_sample(flow, k - 1)
                if flow.directive.t_end_s > t:
                    self._refresh_flow_path(flow, t)
        self.completed_slots = k + 1

    def _monitored_pairs(self):
        pairs = {(d.src, d.dst) for d in self._pings if d.src != d.dst}
        pairs.update((f.directive.src, f.directive.dst) for f in self._flows)
        return sorted(pairs)

    def _route_cached(self, src: str, dst: str) -> PathRecord | None:
        key = (src, dst)
        if key in self._route_cache:
            return self._route_cache[key]
        try:
            rec = _route_with(self._snapshot, src, dst, self._bound)
        except NoRouteError:
            rec = None
        self._route_cache[key] = rec
        return rec

    # -- probes -------------------------------------------------------------

    def _on_probe_launch(self, t: float, probe: _Probe) -> None:
        p = self.bundle.processing
        if probe.src == probe.dst:
            self._push(t + 2.0 * p.endpoint_overhead_s, "complete", probe)
            return
        rec = self._route_cached(probe.src, probe.dst)
        if rec is None:
            self._probe_timeout(probe)
            return
        probe.path = rec.hops
        probe.fwd_hops = rec.hops
        probe.index = 0
        self._push(t + p.endpoint_overhead_s, "hop-start", probe)

    def _on_hop_start(self, t: float, probe: _Probe) -> None:
        """The probe is about to enter link path[index] -> path[index+1];
        the slot installed right now governs the whole hop."""
        p = self.bundle.processing
        link = _live_between(self._snapshot, probe.path[probe.index], probe.path[probe.index + 1])
        if link is None:
            self._probe_timeout(probe)
            return
        probe.prop_s += link.delay_s
        probe.index += 1
        arrive = t + link.delay_s
        if probe.index == len(probe.path) - 1:
            if probe.direction == "fwd":
                self._push(arrive, "turnaround", probe)
            else:
                self._push(arrive, "complete", probe)
        else:
            self._push(arrive + p.per_hop_processing_s, "hop-start", probe)

    def _on_turnaround(self, t: float, probe: _Probe) -> None:
        # Return route is recomputed at arrival time: the topology may have
        # slid under the probe while it was in flight.
        rec = self._route_cached(probe.dst, probe.src)
        if rec is None:
            self._probe_timeout(probe)
            return
        probe.path = rec.hops
        probe.index = 0
        probe.direction = "ret"
        self._push(t + self.bundle.processing.endpoint_overhead_s, "hop-start", probe)

    def _on_complete(self, t: float, probe: _Probe) -> None:
        sample = RttSample(
            launch_t_s=probe.launch_t_s,
            src=probe.src,
            dst=probe.dst,
            rtt_s=t - probe.launch_t_s,
            theoretical_rtt_s=probe.prop_s,
            hop_count=max(0, len(probe.fwd_hops) - 1),
            path=probe.fwd_hops if probe.fwd_hops else (probe.src,),
        )
        self._emit(sample.as_record())
        if probe.pending is not None:
            probe.pending.resolve(sample)

    def _probe_timeout(self, probe: _Probe) -> None:
        sample = _timeout_sample(probe.launch_t_s, probe.src, probe.dst, self.bundle.timeout_s)
        self._emit(sample.as_record())
        if probe.pending is not None:
            probe.pending.resolve(sample)

    # -- flows ---------------------------------------------------------------

    def _on_flow_start(self, t: float, flow: _FlowState) -> None:
        flow.active = True
        flow.last_t = t
        flow.slot_bits = 0.0
        self._refresh_flow_path(flow, t)
        self._push(t + self._tick_interval(flow), "flow-tick", flow)

    def _on_flow_tick(self, t: float, flow: _FlowState) -> None:
        if not flow.active:
            return
        self._integrate(flow, t)
        c = flow.bottleneck
        if c is not None:
            # Loss when the window exceeds the pipe: one bandwidth-delay
            # product in flight plus one more absorbed by buffering.
            if flow.cwnd * SEGMENT_BITS > 2.0 * c * flow.rtt_s:
                flow.cwnd = max(1.0, flow.cwnd / 2.0)
                flow.slow_start = False
            elif flow.slow_start:
                flow.cwnd *= 2.0
            else:
                flow.cwnd += 1.0
            flow.rate_bit_s = self._flow_rate(flow)
        flow.stats.cwnd_trace.append((t, flow.cwnd))
        self._push(t + self._tick_interval(flow), "flow-tick", flow)

    def _on_flow_end(self, t: float, flow: _FlowState) -> None:
        if not flow.active:
            return
        self._integrate(flow, t)
        # Emit the trailing partial-slot sample only when the flow actually
        # spent time inside the currently installed slot; a flow ending
        # exactly on a boundary was already sampled by that boundary.
        k = self._snapshot.slot_index
        if t - k * self.bundle.slot_duration_s > 1e-12:
            self._emit_flow_sample(flow, k)
        flow.active = False

    def _tick_interval(self, flow: _FlowState) -> float:
        # Without a route the controller retries at slot cadence.
        return flow.rtt_s if flow.rtt_s > 0 else self.bundle.slot_duration_s

    def _refresh_flow_path(self, flow: _FlowState, t: float) -> None:
        rec = self._route_cached(flow.directive.src, flow.directive.dst)
        if rec is None:
            flow.bottleneck = None
            flow.rate_bit_s = 0.0
            return
        p = self.bundle.processing
        flow.rtt_s = rec.theoretical_rtt_s + 2.0 * p.endpoint_overhead_s + 2.0 * (len(rec.hops) - 2) * p.per_hop_processing_s
        caps = []
        for i in range(len(rec.hops) - 1):
            link = _live_between(self._snapshot, rec.hops[i], rec.hops[i + 1])
            caps.append(link.capacity_bit_s)
        flow.bottleneck = min(caps)
        flow.rate_bit_s = self._flow_rate(flow)
        flow.stats.bottleneck_trace.append((self._snapshot.slot_index, flow.bottleneck))

    def _flow_rate(self, flow: _FlowState) -> float:
        if flow.bottleneck is None or flow.rtt_s <= 0:
            return 0.0
        return min(flow.cwnd * SEGMENT_BITS / flow.rtt_s, flow.bottleneck)

    def _integrate(self, flow: _FlowState, t: float) -> None:
        # Rate and slot are both constant between consecutive events, so a
        # single product per interval is exact.
        dt = t - flow.last_t
        if dt > 0:
            flow.slot_bits += flow.rate_bit_s * dt
        flow.last_t = t

    def _emit_flow_sample(self, flow: _FlowState, k: int) -> None:
        if k < 0 or k <= flow.sampled_slot:
            return
        rate = flow.slot_bits / self.bundle.slot_duration_s
        flow.slot_bits = 0.0
        flow.sampled_slot = k
        flow.stats.slot_indices.append(k)
        flow.stats.send_rate_bit_s.append(rate)
        self._emit({
            "kind": "flow_rate_sample",
            "slot_index": k,
            "t_s": k * self.bundle.slot_duration_s,
            "src": flow.directive.src,
            "dst": flow.directive.dst,
            "send_rate_bit_s": rate,
            "cwnd_segments": flow.cwnd,
            "bottleneck_bit_s": flow.bottleneck if flow.bottleneck is not None else 0.0,
        })


def _route_with(snapshot: TopologySnapshot, src: str, dst: str, bound) -> PathRecord:
    return _route(snapshot, src, dst, bound=bound)


def _live_between(snapshot: TopologySnapshot, a: str, b: str) -> Link | None:
    for neighbor, link in snapshot.adjacency().get(a, ()):
        if neighbor == b:
            return link
    return None


def _timeout_sample(launch_t_s: float, src: str, dst: str, timeout_s: float) -> RttSample:
    return RttSample(launch_t_s, src, dst, timeout_s, 0.0, 0, (), timed_out=True)
