from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from satsim.constants import BOLTZMANN_J_K, SPEED_OF_LIGHT_M_S
from satsim.constellation import GroundStation, ShellSpec, synthesize_walker
from satsim.errors import DomainError, ValidationError
from satsim.phy import (
    AntennaModel,
    RadioLink,
    RadioParams,
    antenna_gain,
    bessel_j1,
    capacity_schedule,
    channel_capacity,
    channel_coefficient,
    db_from_linear,
    interference_power,
    linear_from_db,
    sinr,
    slot_count,
)


def _j1_series(x: float) -> float:
    """Alternating power series in exact rational arithmetic, so the oracle
    carries no cancellation error of its own. Adequate up to x ~ 20 where the
    largest term is ~1e7."""
    xf = Fraction(x)
    half = xf / 2
    term = half  # m = 0 term: (x/2) / (0! * 1!)
    total = term
    m = 0
    while True:
        m += 1
        term = -term * half * half / (m * (m + 1))
        total += term
        if abs(term) < Fraction(1, 10**30):
            return float(total)


def test_bessel_zero():
    assert bessel_j1(0.0) == 0.0


def test_bessel_peak_and_first_root():
    assert bessel_j1(1.8412) == pytest.approx(0.5819, abs=5e-5)
    assert abs(bessel_j1(3.8317)) < 1e-4


def test_bessel_odd_symmetry():
    for x in (0.3, 2.7, 11.0, 31.4):
        assert bessel_j1(-x) == pytest.approx(-bessel_j1(x), abs=1e-13)


def test_bessel_matches_series_oracle_on_grid():
    xs = np.linspace(0.0, 20.0, 1000)
    worst = max(abs(bessel_j1(float(x)) - _j1_series(float(x))) for x in xs)
    assert worst < 1e-10


def test_bessel_large_argument_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    xs = np.linspace(12.0, 50.0, 250)
    worst = max(abs(bessel_j1(float(x)) - float(mpmath.besselj(1, float(x)))) for x in xs)
    assert worst < 1e-10


def _ku_antenna(g_max: float = 1000.0, aperture_m: float = 0.1) -> AntennaModel:
    return AntennaModel(g_max=g_max, aperture_radius_m=aperture_m, frequency_hz=12e9)


def test_antenna_gain_boresight_exact():
    ant = _ku_antenna()
    assert antenna_gain(0.0, ant) == 1000.0


def test_antenna_gain_boresight_continuity():
    ant = _ku_antenna()
    assert antenna_gain(1e-12, ant) == pytest.approx(1000.0, rel=1e-6)


def test_antenna_gain_first_null():
    ant = _ku_antenna()
    ka = ant.wave_number_rad_m * ant.aperture_radius_m
    theta = math.asin(3.8317 / ka)
    assert antenna_gain(theta, ant) < 1e-6 * ant.g_max


def test_antenna_gain_peak_dominates():
    ant = _ku_antenna()
    for theta in np.linspace(1e-6, math.pi / 2, 300):
        assert antenna_gain(float(theta), ant) <= ant.g_max + 1e-12


@pytest.mark.parametrize("theta", [-0.001, math.pi / 2 + 0.001])
def test_antenna_gain_domain(theta):
    with pytest.raises(DomainError):
        antenna_gain(theta, _ku_antenna())


def _link(
    distance_km: float,
    g_max: float = 1.0,
    rx_gain: float = 1.0,
    power_w: float = 10.0,
    noise_temp_k: float = 290.0,
) -> RadioLink:
    return RadioLink(
        tx_id="sat-a",
        rx_id="gs-b",
        tx_power_w=power_w,
        tx_antenna=AntennaModel(g_max=g_max, aperture_radius_m=0.1, frequency_hz=12e9),
        rx_gain_linear=rx_gain,
        distance_km=distance_km,
        offaxis_angle_rad=0.0,
        bandwidth_hz=1e7,
        rx_noise_temp_k=noise_temp_k,
    )


def test_channel_coefficient_unit_normalization():
    lam = SPEED_OF_LIGHT_M_S / 12e9
    d_km = lam / (4 * math.pi) / 1000.0
    assert channel_coefficient(_link(d_km)) == pytest.approx(1.0, rel=1e-12)


def test_channel_coefficient_inverse_distance():
    h1 = channel_coefficient(_link(500.0))
    h2 = channel_coefficient(_link(1000.0))
    assert h1 == pytest.approx(2.0 * h2, rel=1e-12)


def test_channel_coefficient_ku_band_oracle():
    lam = SPEED_OF_LIGHT_M_S / 12e9
    want = math.sqrt(1e6) / (4 * math.pi * 1e6 / lam)
    got = channel_coefficient(_link(1000.0, g_max=1000.0, rx_gain=1000.0))
    assert got == pytest.approx(want, rel=1e-12)


def test_zero_distance_rejected():
    with pytest.raises(ValidationError):
        _link(0.0)


def test_interference_empty_and_single():
    assert interference_power("gs-b", []) == 0.0
    one = _link(800.0)
    h = channel_coefficient(one)
    assert interference_power("gs-b", [one]) == pytest.approx(one.tx_power_w * h * h, rel=1e-12)


def test_interference_linearity_and_permutation():
    links = [_link(600.0 + 50.0 * i) for i in range(5)]
    total = interference_power("gs-b", links)
    assert total == pytest.approx(sum(interference_power("gs-b", [l]) for l in links), rel=1e-12)
    assert interference_power("gs-b", list(reversed(links))) == pytest.approx(total, rel=1e-12)
    n_same = interference_power("gs-b", [_link(700.0)] * 4)
    assert n_same == pytest.approx(4 * interference_power("gs-b", [_link(700.0)]), rel=1e-12)


def test_interference_rejects_wrong_receiver():
    stray = RadioLink(
        tx_id="sat-x",
        rx_id="gs-other",
        tx_power_w=1.0,
        tx_antenna=_ku_antenna(1.0),
        rx_gain_linear=1.0,
        distance_km=100.0,
        offaxis_angle_rad=0.0,
    )
    with pytest.raises(ValidationError):
        interference_power("gs-b", [stray])


def test_sinr_hand_oracle():
    # engineered so h = 1e-9: unity gains, 4*pi*d/lambda = 1e9
    lam = SPEED_OF_LIGHT_M_S / 12e9
    d_km = 1e9 * lam / (4 * math.pi) / 1000.0
    link = _link(d_km)
    want = 10.0 * 1e-18 / (BOLTZMANN_J_K * 290.0 * 1e7)
    got = sinr(link, [])
    assert got == pytest.approx(want, rel=1e-9)
    assert got == pytest.approx(2.4975e-4, rel=1e-3)


def test_sinr_monotone_in_interference_and_noise():
    link = _link(1000.0, g_max=100.0, rx_gain=100.0)
    quiet = sinr(link, [])
    noisy = sinr(link, [_link(900.0)])
    noisier = sinr(link, [_link(900.0), _link(950.0)])
    assert quiet > noisy > noisier > 0.0
    hot = sinr(_link(1000.0, g_max=100.0, rx_gain=100.0, noise_temp_k=580.0), [])
    assert hot < quiet


def test_channel_capacity_fixed_points():
    assert channel_capacity(0.0, 1e7) == 0.0
    assert channel_capacity(3.0, 1e6) == pytest.approx(2e6, rel=1e-12)
    assert channel_capacity(1023.0, 1e7) == pytest.approx(1e8, rel=1e-12)


def test_channel_capacity_monotone_and_linear_in_bandwidth():
    assert channel_capacity(2.0, 1e6) < channel_capacity(3.0, 1e6)
    assert channel_capacity(3.0, 2e6) == pytest.approx(2 * channel_capacity(3.0, 1e6), rel=1e-12)


def test_db_conversions_roundtrip():
    for db in (-3.0, 0.0, 10.0, 35.0):
        assert db_from_linear(linear_from_db(db)) == pytest.approx(db, abs=1e-12)
    assert linear_from_db(10.0) == pytest.approx(10.0, rel=1e-12)


def test_slot_count_examples():
    assert slot_count(200.0, 1.0) == 200
    assert slot_count(200.0, 0.1) == 2000
    assert slot_count(10.0, 20.0) == 1


RADIO = RadioParams(
    frequency_hz=12e9,
    bandwidth_hz=1e7,
    tx_power_w=10.0,
    g_max_dbi=35.0,
    aperture_radius_m=0.1,
    rx_gain_dbi=30.0,
    rx_noise_temp_k=290.0,
    elevation_mask_deg=25.0,
)


def test_schedule_single_link_composition_oracle():
    """One overhead satellite, one station, no interferers: the scheduled
    value must equal chaining the four single-link operations by hand."""
    con = synthesize_walker(ShellSpec(plane_count=1, sats_per_plane=1, altitude_km=550.0, inclination_deg=0.0))
    gs = GroundStation(gs_id="gs-sub", name="Subsatellite", latitude_deg=0.0, longitude_deg=0.0)
    sched = capacity_schedule(con, [gs], RADIO, slot_duration_s=1.0, duration_s=1.0)
    assert sched.n_slots == 1
    entries = sched.slots[0]
    assert set(entries) == {("sat-000-000", "gs-sub")}

    link = RadioLink(
        tx_id="sat-000-000",
        rx_id="gs-sub",
        tx_power_w=RADIO.tx_power_w,
        tx_antenna=RADIO.tx_antenna(),
        rx_gain_linear=RADIO.rx_gain_linear,
        distance_km=550.0,
        offaxis_angle_rad=0.0,
        bandwidth_hz=RADIO.bandwidth_hz,
        rx_noise_temp_k=RADIO.rx_noise_temp_k,
    )
    want_sinr = sinr(link, [])
    want_cap = channel_capacity(want_sinr, RADIO.bandwidth_hz)
    got_sinr, got_cap = entries[("sat-000-000", "gs-sub")]
    assert got_sinr == pytest.approx(want_sinr, rel=1e-9)
    assert got_cap == pytest.approx(want_cap, rel=1e-9)


def test_schedule_empty_when_nothing_visible():
    con = synthesize_walker(ShellSpec(plane_count=1, sats_per_plane=2, altitude_km=550.0, inclination_deg=0.0))
    polar = GroundStation(gs_id="gs-pole", name="Pole", latitude_deg=89.0, longitude_deg=0.0)
    sched = capacity_schedule(con, [polar], RADIO, slot_duration_s=1.0, duration_s=3.0)
    assert all(len(slot) == 0 for slot in sched.slots)


def test_schedule_mask_monotonicity():
    con = synthesize_walker(ShellSpec(plane_count=8, sats_per_plane=8, altitude_km=550.0, inclination_deg=53.2))
    gs = GroundStation(gs_id="gs-lon", name="London", latitude_deg=51.5074, longitude_deg=-0.1278)
    tight = capacity_schedule(con, [gs], RADIO, slot_duration_s=10.0, duration_s=60.0, elevation_mask_deg=25.0)
    loose = capacity_schedule(con, [gs], RADIO, slot_duration_s=10.0, duration_s=60.0, elevation_mask_deg=10.0)
    for a, b in zip(tight.slots, loose.slots):
        assert set(a) <= set(b)


def test_schedule_deterministic():
    con = synthesize_walker(ShellSpec(plane_count=4, sats_per_plane=6, altitude_km=550.0, inclination_deg=53.2))
    gs = GroundStation(gs_id="gs-x", name="X", latitude_deg=40.0, longitude_deg=8.0)
    a = capacity_schedule(con, [gs], RADIO, slot_duration_s=1.0, duration_s=20.0)
    b = capacity_schedule(con, [gs], RADIO, slot_duration_s=1.0, duration_s=20.0)
    assert a.to_lines() == b.to_lines()


def test_schedule_export_format():
    con = synthesize_walker(ShellSpec(plane_count=1, sats_per_plane=1, altitude_km=550.0, inclination_deg=0.0))
    gs = GroundStation(gs_id="gs-sub", name="Sub", latitude_deg=0.0, longitude_deg=0.0)
    sched = capacity_schedule(con, [gs], RADIO, slot_duration_s=1.0, duration_s=2.0)
    lines = sched.to_lines()
    assert lines[0] == "slot_index,t_s,sat_id,gs_id,sinr,capacity_bit_s"
    record = lines[1].split(",")
    assert record[0] == "0"
    assert record[2] == "sat-000-000"
    # SINR keeps >= 9 significant digits; capacity is integer bit/s
    mantissa = record[4].split("e")[0].replace("-", "").replace(".", "")
    assert len(mantissa) >= 9
    assert "." not in record[5]
    int(record[5])


def test_schedule_override_backfills_sinr():
    con = synthesize_walker(ShellSpec(plane_count=1, sats_per_plane=1, altitude_km=550.0, inclination_deg=0.0))
    gs = GroundStation(gs_id="gs-sub", name="Sub", latitude_deg=0.0, longitude_deg=0.0)
    sched = capacity_schedule(
        con, [gs], RADIO, slot_duration_s=1.0, duration_s=1.0, capacity_override=lambda slot: 5e6
    )
    got_sinr, got_cap = sched.slots[0][("sat-000-000", "gs-sub")]
    assert got_cap == 5e6
    assert got_sinr == pytest.approx(2 ** (5e6 / RADIO.bandwidth_hz) - 1.0, rel=1e-12)


def test_schedule_horizon_error():
    con = synthesize_walker(ShellSpec(plane_count=1, sats_per_plane=1, altitude_km=550.0, inclination_deg=0.0))
    gs = GroundStation(gs_id="gs-sub", name="Sub", latitude_deg=0.0, longitude_deg=0.0)
    sched = capacity_schedule(con, [gs], RADIO, slot_duration_s=1.0, duration_s=5.0)
    assert sched.slot_index_for(4.999) == 4
    with pytest.raises(ValidationError):
        sched.slot_index_for(5.001)
