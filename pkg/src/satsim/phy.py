"""Reference physical layer for satellite-ground links.

Models a uniformly illuminated circular-aperture transmit antenna, free-space
path loss, co-channel interference from every other visible satellite, and
Shannon capacity over the resulting SINR. Gains are linear inside the model;
dB only appears at config boundaries.

The downlink geometry convention: satellite transmit boresight points at
nadir, station receive gain is a plain scalar, and the off-axis angle is
measured at the satellite between boresight and the ray to the station.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .constants import BOLTZMANN_J_K, SPEED_OF_LIGHT_M_S
from .constellation import Constellation, GroundStation, ground_ecef, positions_at
from .errors import DomainError, ValidationError

__all__ = [
    "AntennaModel",
    "RadioLink",
    "RadioParams",
    "CapacitySchedule",
    "bessel_j1",
    "antenna_gain",
    "channel_coefficient",
    "interference_power",
    "sinr",
    "channel_capacity",
    "capacity_schedule",
    "slot_count",
    "linear_from_db",
    "db_from_linear",
]

_SERIES_ASYMPTOTIC_SWITCH = 12.0


def bessel_j1(x: float) -> float:
    """Bessel function of the first kind, order one.

    Truncated power series sum_m (-1)^m / (m! (m+1)!) (x/2)^(2m+1) for
    |x| <= 12, Hankel large-argument asymptotic expansion beyond. Absolute
    accuracy is better than 1e-10 for |x| <= 50.
    """
    ax = abs(x)
    if ax <= _SERIES_ASYMPTOTIC_SWITCH:
        half = ax / 2.0
        neg_q = -(half * half)
        term = half
        total = half
        m = 0
        while abs(term) > 1e-18 and m < 80:
            term *= neg_q / ((m + 1) * (m + 2))
            total += term
            m += 1
    else:
        # Hankel expansion with mu = 4: J1 = sqrt(2/(pi x)) (P cos chi - Q sin chi),
        # chi = x - 3*pi/4, P = sum (-1)^k t_2k, Q = sum (-1)^k t_2k+1 over the
        # signed products t_j = prod(mu - (2m-1)^2) / (j! (8x)^j). The series is
        # divergent; terms are summed only while they keep shrinking.
        inv8x = 1.0 / (8.0 * ax)
        p_sum, q_sum = 1.0, 0.0
        term = 1.0
        sign_p, sign_q = -1.0, 1.0
        j = 1
        prev = math.inf
        while j <= 40:
            term *= (4.0 - (2 * j - 1) ** 2) * inv8x / j
            if abs(term) >= prev or abs(term) < 1e-19:
                break
            if j % 2 == 1:
                q_sum += sign_q * term
                sign_q = -sign_q
            else:
                p_sum += sign_p * term
                sign_p = -sign_p
            prev = abs(term)
            j += 1
        chi = ax - 0.75 * math.pi
        total = math.sqrt(2.0 / (math.pi * ax)) * (p_sum * math.cos(chi) - q_sum * math.sin(chi))
    return total if x >= 0 else -total


def linear_from_db(db: float) -> float:
    return 10.0 ** (db / 10.0)


def db_from_linear(linear: float) -> float:
    if linear <= 0:
        raise DomainError(f"dB of non-positive value {linear}")
    return 10.0 * math.log10(linear)


@dataclass(frozen=True)
class AntennaModel:
    """Circular-aperture transmit antenna: peak gain (linear), aperture
    radius in meters, carrier frequency in Hz."""

    g_max: float
    aperture_radius_m: float
    frequency_hz: float

    def __post_init__(self):
        if self.g_max <= 0:
            raise ValidationError(f"g_max must be > 0, got {self.g_max}")
        if self.aperture_radius_m <= 0:
            raise ValidationError(f"aperture_radius_m must be > 0, got {self.aperture_radius_m}")
        if self.frequency_hz <= 0:
            raise ValidationError(f"frequency_hz must be > 0, got {self.frequency_hz}")

    @property
    def wave_number_rad_m(self) -> float:
        return 2.0 * math.pi * self.frequency_hz / SPEED_OF_LIGHT_M_S

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.frequency_hz


def antenna_gain(theta_rad: float, antenna: AntennaModel) -> float:
    """Transmit gain (linear) at off-axis angle theta.

    G(0) = g_max exactly; off boresight G = 4 g_max |J1(ka sin t)/(ka sin t)|^2,
    which tends to g_max as t -> 0 since J1(x)/x -> 1/2.
    """
    if not 0.0 <= theta_rad <= math.pi / 2.0:
        raise DomainError(f"off-axis angle must be in [0, pi/2], got {theta_rad}")
    if theta_rad == 0.0:
        return antenna.g_max
    x = antenna.wave_number_rad_m * antenna.aperture_radius_m * math.sin(theta_rad)
    if x < 1e-6:
        ratio = 0.5 - x * x / 16.0
    else:
        ratio = bessel_j1(x) / x
    return 4.0 * antenna.g_max * ratio * ratio


@dataclass(frozen=True)
class RadioLink:
    """One directed transmitter-receiver geometry sample."""

    tx_id: str
    rx_id: str
    tx_power_w: float
    tx_antenna: AntennaModel
    rx_gain_linear: float
    distance_km: float
    offaxis_angle_rad: float
    bandwidth_hz: float = 1e7
    rx_noise_temp_k: float = 290.0

    def __post_init__(self):
        if self.tx_power_w <= 0:
            raise ValidationError(f"{self.tx_id}->{self.rx_id}: tx_power_w must be > 0")
        if self.rx_gain_linear <= 0:
            raise ValidationError(f"{self.tx_id}->{self.rx_id}: rx_gain_linear must be > 0")
        if self.distance_km <= 0:
            raise ValidationError(f"{self.tx_id}->{self.rx_id}: distance_km must be > 0")
        if not 0.0 <= self.offaxis_angle_rad <= math.pi / 2:
            raise ValidationError(f"{self.tx_id}->{self.rx_id}: offaxis_angle_rad outside [0, pi/2]")
        if self.bandwidth_hz <= 0:
            raise ValidationError(f"{self.tx_id}->{self.rx_id}: bandwidth_hz must be > 0")
        if self.rx_noise_temp_k <= 0:
            raise ValidationError(f"{self.tx_id}->{self.rx_id}: rx_noise_temp_k must be > 0")


def channel_coefficient(link: RadioLink) -> float:
    """Amplitude channel coefficient sqrt(G_t G_r) / (4 pi d / lambda)."""
    g_t = antenna_gain(link.offaxis_angle_rad, link.tx_antenna)
    d_m = link.distance_km * 1000.0
    return math.sqrt(g_t * link.rx_gain_linear) / (4.0 * math.pi * d_m / link.tx_antenna.wavelength_m)


def interference_power(rx_id: str, interferers: Iterable[RadioLink]) -> float:
    """Aggregate received co-channel power sum_k P_k |h_k|^2 at rx_id (W)."""
    total = 0.0
    for link in interferers:
        if link.rx_id != rx_id:
            raise ValidationError(f"interferer {link.tx_id} targets {link.rx_id}, expected {rx_id}")
        h = channel_coefficient(link)
        total += link.tx_power_w * h * h
    return total


def sinr(desired: RadioLink, interferers: Iterable[RadioLink]) -> float:
    """P |h|^2 over (k_B T B + aggregate interference power). Bandwidth and
    receiver noise temperature come from the desired link itself."""
    h = channel_coefficient(desired)
    signal = desired.tx_power_w * h * h
    noise = BOLTZMANN_J_K * desired.rx_noise_temp_k * desired.bandwidth_hz
    return signal / (noise + interference_power(desired.rx_id, interferers))


def channel_capacity(sinr_value: float, bandwidth_hz: float) -> float:
    """Shannon capacity B log2(1 + SINR) in bit/s."""
    if sinr_value < 0:
        raise DomainError(f"SINR must be >= 0, got {sinr_value}")
    if bandwidth_hz <= 0:
        raise ValidationError(f"bandwidth_hz must be > 0, got {bandwidth_hz}")
    return bandwidth_hz * math.log2(1.0 + sinr_value)


@dataclass(frozen=True)
class RadioParams:
    """Scenario radio block; gains enter in dBi and are used linearly."""

    frequency_hz: float
    bandwidth_hz: float
    tx_power_w: float
    g_max_dbi: float
    aperture_radius_m: float
    rx_gain_dbi: float
    rx_noise_temp_k: float
    elevation_mask_deg: float = 25.0

    def __post_init__(self):
        for field_name in ("frequency_hz", "bandwidth_hz", "tx_power_w", "aperture_radius_m", "rx_noise_temp_k"):
            if getattr(self, field_name) <= 0:
                raise ValidationError(f"radio.{field_name} must be > 0, got {getattr(self, field_name)}")
        if not 0.0 <= self.elevation_mask_deg < 90.0:
            raise ValidationError(f"radio.elevation_mask_deg must be in [0, 90), got {self.elevation_mask_deg}")

    @property
    def rx_gain_linear(self) -> float:
        return linear_from_db(self.rx_gain_dbi)

    def tx_antenna(self) -> AntennaModel:
        return AntennaModel(
            g_max=linear_from_db(self.g_max_dbi),
            aperture_radius_m=self.aperture_radius_m,
            frequency_hz=self.frequency_hz,
        )


def slot_count(duration_s: float, slot_duration_s: float) -> int:
    """Number of slots covering [0, duration): ceil(duration/slot), with a
    tolerance so exact multiples don't gain a phantom slot to float noise."""
    if duration_s <= 0:
        raise ValidationError(f"duration_s must be > 0, got {duration_s}")
    if slot_duration_s <= 0:
        raise ValidationError(f"slot_duration_s must be > 0, got {slot_duration_s}")
    return max(1, math.ceil(duration_s / slot_duration_s - 1e-9))


@dataclass(frozen=True)
class CapacitySchedule:
    """Per-slot downlink SINR and capacity for every visible (sat, gs) pair.

    ``slots[i]`` maps (sat_id, gs_id) -> (sinr, capacity_bit_s) for the slot
    starting at i * slot_duration_s. Invisible pairs are simply absent.
    """

    slot_duration_s: float
    duration_s: float
    slots: tuple[dict, ...]

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    def t_of_slot(self, slot_index: int) -> float:
        return slot_index * self.slot_duration_s

    def slot_index_for(self, t_s: float) -> int:
        if t_s < 0:
            raise ValidationError(f"t_s must be >= 0, got {t_s}")
        idx = int(t_s / self.slot_duration_s + 1e-9)
        if idx >= self.n_slots:
            raise ValidationError(f"t_s {t_s} is beyond the schedule horizon ({self.duration_s}s)")
        return idx

    def iter_records(self):
        """Deterministic record stream: slots in order, pairs sorted."""
        for i, entries in enumerate(self.slots):
            t = self.t_of_slot(i)
            for (sat_id, gs_id) in sorted(entries):
                s, c = entries[(sat_id, gs_id)]
                yield i, t, sat_id, gs_id, s, c

    def to_lines(self) -> list[str]:
        """Line-delimited export: header plus one CSV record per pair-slot.
        SINR keeps 12 significant digits; capacity is an integer bit/s."""
        lines = ["slot_index,t_s,sat_id,gs_id,sinr,capacity_bit_s"]
        for i, t, sat_id, gs_id, s, c in self.iter_records():
            lines.append(f"{i},{t!r},{sat_id},{gs_id},{s:.11e},{int(round(c))}")
        return lines


def _station_slot_entries(
    pos: np.ndarray,
    sat_ids: tuple[str, ...],
    gs_vec: np.ndarray,
    radio: RadioParams,
    mask_deg: float,
) -> list[tuple[str, float, float]]:
    """Visible satellites for one station with their SINR and capacity."""
    rel = gs_vec[None, :] - pos  # satellite -> station rays
    dist = np.linalg.norm(rel, axis=1)
    gs_norm = np.linalg.norm(gs_vec)
    # Elevation uses the sat->up projection (s - g) . g = -(rel . g).
    sin_el = -(rel @ gs_vec) / (dist * gs_norm)
    el = np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0)))
    visible = np.nonzero(el >= mask_deg)[0]
    if visible.size == 0:
        return []

    antenna = radio.tx_antenna()
    rx_gain = radio.rx_gain_linear
    noise_w = BOLTZMANN_J_K * radio.rx_noise_temp_k * radio.bandwidth_hz

    sat_norm = np.linalg.norm(pos[visible], axis=1)
    cos_theta = -np.einsum("ij,ij->i", rel[visible], pos[visible]) / (dist[visible] * sat_norm)
    theta = np.arccos(np.clip(cos_theta, -1.0, 1.0))

    rx_power = np.empty(visible.size)
    for k in range(visible.size):
        g_t = antenna_gain(float(theta[k]), antenna)
        h = math.sqrt(g_t * rx_gain) / (4.0 * math.pi * dist[visible[k]] * 1000.0 / antenna.wavelength_m)
        rx_power[k] = radio.tx_power_w * h * h

    total_power = float(rx_power.sum())
    out = []
    for k, idx in enumerate(visible):
        s_val = float(rx_power[k] / (noise_w + (total_power - rx_power[k])))
        out.append((sat_ids[idx], s_val, channel_capacity(s_val, radio.bandwidth_hz)))
    return out


def capacity_schedule(
    constellation: Constellation,
    ground_stations: list[GroundStation],
    radio: RadioParams,
    slot_duration_s: float,
    duration_s: float,
    elevation_mask_deg: float | None = None,
    capacity_override: Callable[[int], float] | None = None,
) -> CapacitySchedule:
    """Evaluate the downlink physical layer once per slot boundary.

    Every satellite visible to a station above the elevation mask gets an
    entry; all other visible satellites at that station act as co-channel
    interferers. ``capacity_override`` replaces the radio-derived capacity
    with a per-slot value (visibility still applies); the recorded SINR is
    then back-derived so capacity = B log2(1 + SINR) stays coherent.
    """
    mask = radio.elevation_mask_deg if elevation_mask_deg is None else elevation_mask_deg
    n = slot_count(duration_s, slot_duration_s)
    gs_vecs = {gs.gs_id: ground_ecef(gs) for gs in ground_stations}

    slots: list[dict] = []
    for i in range(n):
        t = i * slot_duration_s
        pos, _ = positions_at(constellation, t)
        entries: dict = {}
        for gs in ground_stations:
            for sat_id, s_val, cap in _station_slot_entries(pos, constellation.sat_ids, gs_vecs[gs.gs_id], radio, mask):
                if capacity_override is not None:
                    cap = float(capacity_override(i))
                    if cap < 0:
                        raise ValidationError(f"capacity override returned {cap} for slot {i}")
                    s_val = 2.0 ** (cap / radio.bandwidth_hz) - 1.0
                entries[(sat_id, gs.gs_id)] = (s_val, cap)
        slots.append(entries)
    return CapacitySchedule(slot_duration_s=slot_duration_s, duration_s=duration_s, slots=tuple(slots))
