"""Shared helpers: a small scenario document whose stations are pinned to
sub-satellite points, so routes exist from slot 0 without needing a dense
shell."""

import math

from satsim.constellation import ShellSpec, positions_at, synthesize_walker

_SHELL = {
    "plane_count": 6,
    "sats_per_plane": 6,
    "altitude_km": 550.0,
    "inclination_deg": 53.2,
}


def _subsat_latlon(sat_index: int) -> tuple[float, float]:
    con = synthesize_walker(ShellSpec(**_SHELL))
    pos, _ = positions_at(con, 0.0)
    x, y, z = pos[sat_index]
    r = math.sqrt(x * x + y * y + z * z)
    return math.degrees(math.asin(z / r)), math.degrees(math.atan2(y, x))


def tiny_scenario_doc(**overrides) -> dict:
    """A fast, fully routable scenario: 36 satellites, two stations sitting
    under satellites 0 and 7 at epoch. Runs in well under a second."""
    lat_a, lon_a = _subsat_latlon(0)
    lat_b, lon_b = _subsat_latlon(7)
    doc = {
        "schema_version": 1,
        "name": "tiny",
        "shell": dict(_SHELL),
        "ground_stations": [
            {"gs_id": "gs-a", "latitude_deg": round(lat_a, 4), "longitude_deg": round(lon_a, 4)},
            {"gs_id": "gs-b", "latitude_deg": round(lat_b, 4), "longitude_deg": round(lon_b, 4)},
        ],
        "radio": {
            "frequency_hz": 1.2e10,
            "bandwidth_hz": 1.0e7,
            "tx_power_w": 10.0,
            "g_max_dbi": 35.0,
            "aperture_radius_m": 0.1,
            "rx_gain_dbi": 30.0,
            "rx_noise_temp_k": 290.0,
            "elevation_mask_deg": 10.0,
        },
        "isl_capacity_bit_s": 1.0e8,
        "relay_mode": "isl",
        "slot_duration_s": 1.0,
        "duration_s": 2.0,
        "workload": [{"kind": "ping", "src": "gs-a", "dst": "gs-b", "first_t_s": 0.25, "interval_s": 1.0}],
    }
    doc.update(overrides)
    return doc
