"""Walker-style shell synthesis and circular two-body propagation.

Coordinates are Earth-centered Earth-fixed (ECEF) on a spherical Earth.
The frame coincides with the inertial frame at epoch t = 0 and the Earth
spins about +z at a uniform rate afterwards. Orbits are circular, so the
argument of latitude equals the mean anomaly and no eccentricity state is
carried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import EARTH_RADIUS_KM, EARTH_ROTATION_RAD_S, MU_EARTH_KM3_S2
from .errors import ValidationError

TWO_PI = 2.0 * math.pi

__all__ = [
    "ShellSpec",
    "OrbitalElements",
    "SatelliteState",
    "GroundStation",
    "Constellation",
    "synthesize_walker",
    "propagate",
    "positions_at",
    "ground_ecef",
    "elevation_deg",
    "mean_motion_rad_s",
    "orbital_period_s",
]


@dataclass(frozen=True)
class ShellSpec:
    """One Walker shell: evenly spaced planes of evenly spaced satellites."""

    plane_count: int
    sats_per_plane: int
    altitude_km: float
    inclination_deg: float
    phasing_offset: float = 0.0

    def __post_init__(self):
        if self.plane_count < 1:
            raise ValidationError(f"plane_count must be >= 1, got {self.plane_count}")
        if self.sats_per_plane < 1:
            raise ValidationError(f"sats_per_plane must be >= 1, got {self.sats_per_plane}")
        if not 0.0 < self.altitude_km < 100000.0:
            raise ValidationError(f"altitude_km must be in (0, 100000), got {self.altitude_km}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValidationError(f"inclination_deg must be in [0, 180], got {self.inclination_deg}")
        if not 0.0 <= self.phasing_offset < 1.0:
            raise ValidationError(f"phasing_offset must be in [0, 1), got {self.phasing_offset}")


@dataclass(frozen=True)
class OrbitalElements:
    """Circular-orbit element set; angles in radians, normalized to [0, 2*pi)."""

    semi_major_axis_km: float
    inclination_rad: float
    raan_rad: float
    mean_anomaly_at_epoch_rad: float
    epoch_s: float = 0.0

    def __post_init__(self):
        if self.semi_major_axis_km <= EARTH_RADIUS_KM:
            raise ValidationError(
                f"semi_major_axis_km must exceed the Earth radius, got {self.semi_major_axis_km}"
            )


@dataclass(frozen=True)
class SatelliteState:
    sat_id: str
    position_ecef_km: np.ndarray
    velocity_ecef_km_s: np.ndarray


@dataclass(frozen=True)
class GroundStation:
    """A fixed site on the (spherical) Earth surface."""

    gs_id: str
    name: str
    latitude_deg: float
    longitude_deg: float
    altitude_km: float = 0.0

    def __post_init__(self):
        if not self.gs_id:
            raise ValidationError("gs_id must be non-empty")
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValidationError(f"{self.gs_id}: latitude_deg must be in [-90, 90], got {self.latitude_deg}")
        if not -180.0 <= self.longitude_deg <= 180.0:
            raise ValidationError(f"{self.gs_id}: longitude_deg must be in [-180, 180], got {self.longitude_deg}")
        if self.altitude_km < 0.0:
            raise ValidationError(f"{self.gs_id}: altitude_km must be >= 0, got {self.altitude_km}")


@dataclass(frozen=True)
class Constellation:
    """Parallel per-satellite arrays plus optional plane/slot grid metadata.

    ``plane_index``/``slot_index`` are present when the constellation came
    from a Walker synthesis or could be reconstructed from imported element
    sets; the grid topology builder requires them.
    """

    sat_ids: tuple[str, ...]
    elements: tuple[OrbitalElements, ...]
    plane_count: int | None = None
    sats_per_plane: int | None = None
    plane_index: tuple[int, ...] | None = None
    slot_index: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.sat_ids) != len(self.elements):
            raise ValidationError("sat_ids and elements must have equal length")
        if len(set(self.sat_ids)) != len(self.sat_ids):
            raise ValidationError("duplicate sat_id in constellation")

    def __len__(self) -> int:
        return len(self.sat_ids)

    @property
    def has_grid(self) -> bool:
        return self.plane_index is not None and self.slot_index is not None

    def _element_arrays(self) -> tuple[np.ndarray, ...]:
        # Cached column views of the element sets; cache lives in __dict__,
        # which frozen dataclasses still have.
        cached = self.__dict__.get("_cols")
        if cached is None:
            a = np.array([e.semi_major_axis_km for e in self.elements])
            inc = np.array([e.inclination_rad for e in self.elements])
            raan = np.array([e.raan_rad for e in self.elements])
            m0 = np.array([e.mean_anomaly_at_epoch_rad for e in self.elements])
            epoch = np.array([e.epoch_s for e in self.elements])
            cached = (a, inc, raan, m0, epoch)
            self.__dict__["_cols"] = cached
        return cached


def mean_motion_rad_s(semi_major_axis_km: float) -> float:
    return math.sqrt(MU_EARTH_KM3_S2 / semi_major_axis_km**3)


def orbital_period_s(semi_major_axis_km: float) -> float:
    return TWO_PI / mean_motion_rad_s(semi_major_axis_km)


def synthesize_walker(spec: ShellSpec) -> Constellation:
    """Lay out a Walker shell.

    Plane p gets RAAN 2*pi*p/P. Satellite s of plane p gets mean anomaly
    2*pi*s/S plus the inter-plane stagger 2*pi*phasing_offset*p/S. All
    satellites share one circular altitude and inclination.
    """
    a = EARTH_RADIUS_KM + spec.altitude_km
    inc = math.radians(spec.inclination_deg)
    sat_ids: list[str] = []
    elements: list[OrbitalElements] = []
    planes: list[int] = []
    slots: list[int] = []
    for p in range(spec.plane_count):
        raan = TWO_PI * p / spec.plane_count
        stagger = TWO_PI * spec.phasing_offset * p / spec.sats_per_plane
        for s in range(spec.sats_per_plane):
            anomaly = (TWO_PI * s / spec.sats_per_plane + stagger) % TWO_PI
            sat_ids.append(f"sat-{p:03d}-{s:03d}")
            elements.append(
                OrbitalElements(
                    semi_major_axis_km=a,
                    inclination_rad=inc,
                    raan_rad=raan,
                    mean_anomaly_at_epoch_rad=anomaly,
                )
            )
            planes.append(p)
            slots.append(s)
    return Constellation(
        sat_ids=tuple(sat_ids),
        elements=tuple(elements),
        plane_count=spec.plane_count,
        sats_per_plane=spec.sats_per_plane,
        plane_index=tuple(planes),
        slot_index=tuple(slots),
    )


def positions_at(constellation: Constellation, t_s: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized propagation: (N, 3) ECEF positions and velocities at t_s.

    The velocity is the orbital (inertial) velocity expressed in Earth-fixed
    axes; its magnitude is sqrt(mu/a) for every satellite.
    """
    a, inc, raan, m0, epoch = constellation._element_arrays()
    n = np.sqrt(MU_EARTH_KM3_S2 / a**3)
    u = m0 + n * (t_s - epoch)

    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_i, sin_i = np.cos(inc), np.sin(inc)
    cos_o, sin_o = np.cos(raan), np.sin(raan)

    # Orbital-plane vector rotated by Rx(inclination) then Rz(RAAN).
    x1, y1, z1 = a * cos_u, a * sin_u * cos_i, a * sin_u * sin_i
    xi = x1 * cos_o - y1 * sin_o
    yi = x1 * sin_o + y1 * cos_o
    zi = z1

    vx1 = -a * n * sin_u
    vy1 = a * n * cos_u * cos_i
    vz1 = a * n * cos_u * sin_i
    vxi = vx1 * cos_o - vy1 * sin_o
    vyi = vx1 * sin_o + vy1 * cos_o
    vzi = vz1

    # Inertial -> Earth-fixed: rotate by -(rotation rate * t) about z.
    ang = EARTH_ROTATION_RAD_S * t_s
    c, s = math.cos(ang), math.sin(ang)
    pos = np.stack([xi * c + yi * s, -xi * s + yi * c, zi], axis=1)
    vel = np.stack([vxi * c + vyi * s, -vxi * s + vyi * c, vzi], axis=1)
    return pos, vel


def propagate(constellation: Constellation, t_s: float) -> list[SatelliteState]:
    """Per-satellite states at t_s; see positions_at for the frame rules."""
    pos, vel = positions_at(constellation, t_s)
    return [
        SatelliteState(sat_id=sid, position_ecef_km=pos[i], velocity_ecef_km_s=vel[i])
        for i, sid in enumerate(constellation.sat_ids)
    ]


def ground_ecef(gs: GroundStation) -> np.ndarray:
    """Station ECEF position on the spherical Earth (km)."""
    r = EARTH_RADIUS_KM + gs.altitude_km
    lat = math.radians(gs.latitude_deg)
    lon = math.radians(gs.longitude_deg)
    return np.array(
        [r * math.cos(lat) * math.cos(lon), r * math.cos(lat) * math.sin(lon), r * math.sin(lat)]
    )


def elevation_deg(sat: SatelliteState | np.ndarray, gs_ecef: np.ndarray) -> float:
    """Elevation of a satellite above a station's local horizon, degrees.

    Spherical Earth, so local up is the station's radial direction:
    elevation = asin((s - g) . g_hat / |s - g|).
    """
    s = sat.position_ecef_km if isinstance(sat, SatelliteState) else np.asarray(sat, dtype=float)
    g = np.asarray(gs_ecef, dtype=float)
    g_norm = np.linalg.norm(g)
    if g_norm == 0.0:
        raise ValidationError("gs_ecef must be non-zero")
    rel = s - g
    rel_norm = np.linalg.norm(rel)
    if rel_norm == 0.0:
        raise ValidationError("satellite and station positions coincide")
    sin_el = float(np.dot(rel, g) / (rel_norm * g_norm))
    return math.degrees(math.asin(max(-1.0, min(1.0, sin_el))))
