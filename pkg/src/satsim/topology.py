"""Time-sliced network topology: +Grid inter-satellite links, schedule-driven
ground-satellite links, and deterministic link failure injection.

A snapshot freezes the graph for one slot. Failures are decided per link id
from a seeded hash, so they are stable across slots (persistent for a run)
and reproducible across processes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT_KM_S
from .constellation import Constellation, GroundStation, elevation_deg, ground_ecef, positions_at
from .errors import ValidationError
from .phy import CapacitySchedule

__all__ = [
    "Link",
    "FailurePlan",
    "TopologySnapshot",
    "grid_isls",
    "link_failed",
    "build_snapshot",
    "snapshot_series",
]

FAILURE_SCOPES = ("isl-only", "all-links")


@dataclass(frozen=True)
class Link:
    """Undirected link; delay is distance over the speed of light."""

    link_id: str
    kind: str  # "isl" | "gsl"
    endpoint_a: str
    endpoint_b: str
    distance_km: float
    delay_s: float
    capacity_bit_s: float
    failed: bool

    def other(self, node_id: str) -> str:
        return self.endpoint_b if node_id == self.endpoint_a else self.endpoint_a


@dataclass(frozen=True)
class FailurePlan:
    """Deterministic persistent link failures: each eligible link fails with
    probability failure_rate, decided by hashing (seed, link_id)."""

    failure_rate: float = 0.0
    seed: int = 0
    scope: str = "isl-only"

    def __post_init__(self):
        if not 0.0 <= self.failure_rate <= 1.0:
            raise ValidationError(f"failure_rate must be in [0, 1], got {self.failure_rate}")
        if self.scope not in FAILURE_SCOPES:
            raise ValidationError(f"failure scope must be one of {FAILURE_SCOPES}, got {self.scope!r}")


def link_failed(plan: FailurePlan, link_id: str, kind: str) -> bool:
    if plan.failure_rate <= 0.0:
        return False
    if plan.scope == "isl-only" and kind != "isl":
        return False
    if plan.failure_rate >= 1.0:
        return True
    digest = hashlib.sha256(f"{plan.seed}:{link_id}".encode()).digest()
    u = int.from_bytes(digest[:8], "big") / 2.0**64
    return u < plan.failure_rate


def _isl_id(a: str, b: str) -> str:
    lo, hi = (a, b) if a < b else (b, a)
    return f"isl:{lo}--{hi}"


def _gsl_id(sat_id: str, gs_id: str) -> str:
    return f"gsl:{sat_id}--{gs_id}"


def grid_isls(constellation: Constellation) -> list[tuple[str, str]]:
    """+Grid neighbor pairs: in-plane ring (phase +/-1) plus the same slot
    in both adjacent planes (RAAN +/-1, wrapping). Duplicates from small
    plane or slot counts are removed; a single plane degenerates to a ring.
    """
    if not constellation.has_grid:
        raise ValidationError("constellation carries no plane/slot grid metadata")
    planes = constellation.plane_count
    per_plane = constellation.sats_per_plane
    if per_plane < 2:
        raise ValidationError(f"+Grid needs >= 2 sats per plane, got {per_plane}")

    by_pos = {}
    for idx, sid in enumerate(constellation.sat_ids):
        by_pos[(constellation.plane_index[idx], constellation.slot_index[idx])] = sid

    pairs: set[tuple[str, str]] = set()
    for (p, s), sid in by_pos.items():
        neighbors = [(p, (s + 1) % per_plane)]
        if planes > 1:
            neighbors.append(((p + 1) % planes, s))
        for key in neighbors:
            other = by_pos.get(key)
            if other is None:
                raise ValidationError(f"grid position {key} missing; plane metadata is not rectangular")
            if other != sid:
                pairs.add((sid, other) if sid < other else (other, sid))
    return sorted(pairs)


@dataclass(frozen=True)
class TopologySnapshot:
    """The network graph frozen for one slot."""

    slot_index: int
    t_s: float
    nodes: tuple[str, ...]
    links: tuple[Link, ...]
    positions: dict

    def adjacency(self) -> dict:
        """node -> ((neighbor, Link), ...) over live links, sorted for
        deterministic traversal. Cached per snapshot."""
        cached = self.__dict__.get("_adj")
        if cached is None:
            adj: dict[str, list] = {n: [] for n in self.nodes}
            for link in self.links:
                if link.failed:
                    continue
                adj[link.endpoint_a].append((link.endpoint_b, link))
                adj[link.endpoint_b].append((link.endpoint_a, link))
            cached = {n: tuple(sorted(v, key=lambda e: (e[0], e[1].link_id))) for n, v in adj.items()}
            self.__dict__["_adj"] = cached
        return cached

    def incident(self, node_id: str) -> tuple:
        """All links touching node_id, failed ones included, sorted."""
        cached = self.__dict__.get("_incident")
        if cached is None:
            inc: dict[str, list] = {n: [] for n in self.nodes}
            for link in self.links:
                inc[link.endpoint_a].append(link)
                inc[link.endpoint_b].append(link)
            cached = {n: tuple(sorted(v, key=lambda l: l.link_id)) for n, v in inc.items()}
            self.__dict__["_incident"] = cached
        return cached[node_id]

    def to_lines(self) -> list[str]:
        lines = ["slot_index,link_id,kind,endpoint_a,endpoint_b,distance_km,delay_s,capacity_bit_s,failed"]
        for link in self.links:
            lines.append(
                f"{self.slot_index},{link.link_id},{link.kind},{link.endpoint_a},{link.endpoint_b},"
                f"{link.distance_km!r},{link.delay_s!r},{link.capacity_bit_s!r},"
                f"{'true' if link.failed else 'false'}"
            )
        return lines


def _grid_pair_indices(constellation: Constellation) -> tuple[np.ndarray, np.ndarray, list[tuple[str, str]]]:
    cached = constellation.__dict__.get("_grid_pairs")
    if cached is None:
        pairs = grid_isls(constellation)
        index = {sid: i for i, sid in enumerate(constellation.sat_ids)}
        ia = np.array([index[a] for a, _ in pairs], dtype=np.intp)
        ib = np.array([index[b] for _, b in pairs], dtype=np.intp)
        cached = (ia, ib, pairs)
        constellation.__dict__["_grid_pairs"] = cached
    return cached


def build_snapshot(
    t_s: float,
    constellation: Constellation,
    ground_stations: list[GroundStation],
    capacity_schedule: CapacitySchedule | None,
    isl_capacity_bit_s: float,
    elevation_mask_deg: float,
    failure_plan: FailurePlan | None = None,
    include_isls: bool = True,
    failure_memo: dict | None = None,
) -> TopologySnapshot:
    """Freeze the graph at t_s.

    GSL pairs and capacities come from the capacity schedule's slot when one
    is given (the schedule already applied the elevation mask); without a
    schedule the pairs are recomputed geometrically from the mask and carry
    zero capacity, which is enough for pure-topology inspection. Distances
    always come from the instantaneous geometry at t_s.
    """
    pos, _ = positions_at(constellation, t_s)
    index = {sid: i for i, sid in enumerate(constellation.sat_ids)}
    memo = failure_memo if failure_memo is not None else {}

    def decide(link_id: str, kind: str) -> bool:
        if failure_plan is None:
            return False
        hit = memo.get(link_id)
        if hit is None:
            hit = link_failed(failure_plan, link_id, kind)
            memo[link_id] = hit
        return hit

    links: list[Link] = []
    if include_isls:
        ia, ib, pairs = _grid_pair_indices(constellation)
        dists = np.linalg.norm(pos[ia] - pos[ib], axis=1)
        for k, (a, b) in enumerate(pairs):
            d = float(dists[k])
            lid = _isl_id(a, b)
            links.append(
                Link(
                    link_id=lid,
                    kind="isl",
                    endpoint_a=a,
                    endpoint_b=b,
                    distance_km=d,
                    delay_s=d / SPEED_OF_LIGHT_KM_S,
                    capacity_bit_s=float(isl_capacity_bit_s),
                    failed=decide(lid, "isl"),
                )
            )

    gs_vecs = {gs.gs_id: ground_ecef(gs) for gs in ground_stations}
    slot_index = 0
    if capacity_schedule is not None:
        slot_index = capacity_schedule.slot_index_for(t_s)
        entries = capacity_schedule.slots[slot_index]
        for (sat_id, gs_id) in sorted(entries):
            _, cap = entries[(sat_id, gs_id)]
            d = float(np.linalg.norm(pos[index[sat_id]] - gs_vecs[gs_id]))
            lid = _gsl_id(sat_id, gs_id)
            links.append(
                Link(
                    link_id=lid,
                    kind="gsl",
                    endpoint_a=sat_id,
                    endpoint_b=gs_id,
                    distance_km=d,
                    delay_s=d / SPEED_OF_LIGHT_KM_S,
                    capacity_bit_s=float(cap),
                    failed=decide(lid, "gsl"),
                )
            )
    else:
        for gs in ground_stations:
            gvec = gs_vecs[gs.gs_id]
            for sat_id, i in index.items():
                if elevation_deg(pos[i], gvec) >= elevation_mask_deg:
                    d = float(np.linalg.norm(pos[i] - gvec))
                    lid = _gsl_id(sat_id, gs.gs_id)
                    links.append(
                        Link(
                            link_id=lid,
                            kind="gsl",
                            endpoint_a=sat_id,
                            endpoint_b=gs.gs_id,
                            distance_km=d,
                            delay_s=d / SPEED_OF_LIGHT_KM_S,
                            capacity_bit_s=0.0,
                            failed=decide(lid, "gsl"),
                        )
                    )

    positions = {sid: pos[i] for sid, i in index.items()}
    positions.update(gs_vecs)

    return TopologySnapshot(
        slot_index=slot_index,
        t_s=t_s,
        nodes=tuple(constellation.sat_ids) + tuple(g.gs_id for g in ground_stations),
        links=tuple(links),
        positions=positions,
    )


def snapshot_series(
    constellation: Constellation,
    ground_stations: list[GroundStation],
    capacity_schedule: CapacitySchedule,
    isl_capacity_bit_s: float,
    failure_plan: FailurePlan | None = None,
    include_isls: bool = True,
) -> list[TopologySnapshot]:
    """One snapshot per schedule slot, failures memoized so every slot sees
    the same failure set."""
    memo: dict = {}
    out = []
    for i in range(capacity_schedule.n_slots):
        out.append(
            build_snapshot(
                t_s=capacity_schedule.t_of_slot(i),
                constellation=constellation,
                ground_stations=ground_stations,
                capacity_schedule=capacity_schedule,
                isl_capacity_bit_s=isl_capacity_bit_s,
                elevation_mask_deg=0.0,
                failure_plan=failure_plan,
                include_isls=include_isls,
                failure_memo=memo,
            )
        )
    return out
