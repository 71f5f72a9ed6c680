"""Two-line element import/export under the circular-orbit approximation.

Only the fields the propagator consumes are honored: inclination, RAAN,
mean anomaly, and mean motion (which fixes the semi-major axis). The
argument-of-perigee column is folded into the phase angle, which is exact
in the circular limit; eccentricity and all drag terms are ignored on
import and written as zeros on export.
"""

from __future__ import annotations

import math

from .constants import MU_EARTH_KM3_S2
from .constellation import TWO_PI, Constellation, OrbitalElements
from .errors import ValidationError

__all__ = ["export_tle", "import_tle", "line_checksum"]

LINE_LENGTH = 69
SECONDS_PER_DAY = 86400.0


def line_checksum(body: str) -> int:
    """Modulo-10 checksum of a 68-char line body: digits count as their
    value, each '-' counts as 1, everything else as 0."""
    if len(body) != LINE_LENGTH - 1:
        raise ValidationError(f"checksum body must be {LINE_LENGTH - 1} chars, got {len(body)}")
    total = 0
    for ch in body:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


def _with_checksum(body: str) -> str:
    return body + str(line_checksum(body))


def _rev_per_day(semi_major_axis_km: float) -> float:
    n_rad_s = math.sqrt(MU_EARTH_KM3_S2 / semi_major_axis_km**3)
    return n_rad_s * SECONDS_PER_DAY / TWO_PI


def _semi_major_axis_km(rev_per_day: float) -> float:
    if rev_per_day <= 0:
        raise ValidationError(f"mean motion must be positive, got {rev_per_day}")
    n_rad_s = rev_per_day * TWO_PI / SECONDS_PER_DAY
    return (MU_EARTH_KM3_S2 / n_rad_s**2) ** (1.0 / 3.0)


def export_tle(constellation: Constellation) -> str:
    """Render the constellation as line-1/line-2 pairs, one pair per
    satellite, catalog numbers assigned in constellation order from 1."""
    out: list[str] = []
    for idx, el in enumerate(constellation.elements):
        num = idx + 1
        if num > 99999:
            raise ValidationError("catalog numbers above 99999 do not fit the line format")
        line1 = _with_checksum(
            f"1 {num:05d}U 00000A   00001.00000000  .00000000  00000-0  00000-0 0    0"
        )
        line2 = _with_checksum(
            "2 {num:05d} {inc:8.4f} {raan:8.4f} 0000000 {argp:8.4f} {ma:8.4f} {mm:11.8f}    0".format(
                num=num,
                inc=math.degrees(el.inclination_rad),
                raan=math.degrees(el.raan_rad),
                argp=0.0,
                ma=math.degrees(el.mean_anomaly_at_epoch_rad),
                mm=_rev_per_day(el.semi_major_axis_km),
            )
        )
        out.append(line1)
        out.append(line2)
    return "\n".join(out) + "\n"


def _check_line(raw: str, lineno: int, expect_first: str) -> str:
    line = raw.rstrip("\r\n")
    if len(line) != LINE_LENGTH:
        raise ValidationError(f"line {lineno}: expected {LINE_LENGTH} chars, got {len(line)}")
    if not line.startswith(expect_first + " "):
        raise ValidationError(f"line {lineno}: expected a line-{expect_first} record")
    if not line[-1].isdigit() or line_checksum(line[:-1]) != int(line[-1]):
        raise ValidationError(f"line {lineno}: checksum mismatch")
    return line


def _parse_float(field: str, lineno: int, what: str) -> float:
    try:
        return float(field.strip())
    except ValueError:
        raise ValidationError(f"line {lineno}: malformed {what} field {field!r}") from None


def import_tle(text: str) -> Constellation:
    """Parse concatenated TLE pairs; name lines between pairs are skipped.

    Raises ValidationError naming the 1-based line number for short lines,
    bad checksums, mismatched catalog numbers, or unparseable fields.
    """
    numbered = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    sat_ids: list[str] = []
    elements: list[OrbitalElements] = []
    i = 0
    while i < len(numbered):
        lineno, raw = numbered[i]
        if not raw.lstrip().startswith("1 "):
            i += 1  # name line
            continue
        line1 = _check_line(raw, lineno, "1")
        if i + 1 >= len(numbered):
            raise ValidationError(f"line {lineno}: line 1 without a matching line 2")
        lineno2, raw2 = numbered[i + 1]
        line2 = _check_line(raw2, lineno2, "2")
        num1, num2 = line1[2:7].strip(), line2[2:7].strip()
        if num1 != num2:
            raise ValidationError(f"line {lineno2}: catalog number {num2!r} does not match line 1 ({num1!r})")

        inc = math.radians(_parse_float(line2[8:16], lineno2, "inclination"))
        raan = math.radians(_parse_float(line2[17:25], lineno2, "RAAN"))
        argp = math.radians(_parse_float(line2[34:42], lineno2, "argument of perigee"))
        ma = math.radians(_parse_float(line2[43:51], lineno2, "mean anomaly"))
        rev_day = _parse_float(line2[52:63], lineno2, "mean motion")

        sat_ids.append(f"sat-{int(num1):05d}")
        elements.append(
            OrbitalElements(
                semi_major_axis_km=_semi_major_axis_km(rev_day),
                inclination_rad=inc % TWO_PI,
                raan_rad=raan % TWO_PI,
                mean_anomaly_at_epoch_rad=(argp + ma) % TWO_PI,
            )
        )
        i += 2

    if not elements:
        raise ValidationError("no element sets found")
    planes = _infer_planes(elements)
    if planes is None:
        return Constellation(sat_ids=tuple(sat_ids), elements=tuple(elements))
    plane_index, slot_index, plane_count, sats_per_plane = planes
    return Constellation(
        sat_ids=tuple(sat_ids),
        elements=tuple(elements),
        plane_count=plane_count,
        sats_per_plane=sats_per_plane,
        plane_index=plane_index,
        slot_index=slot_index,
    )


def _infer_planes(elements):
    """Recover Walker grid indices by grouping on RAAN and ordering each
    group by phase. Returns None when the groups are not rectangular."""
    groups: dict[float, list[int]] = {}
    for idx, el in enumerate(elements):
        groups.setdefault(round(el.raan_rad, 9), []).append(idx)
    sizes = {len(v) for v in groups.values()}
    if len(sizes) != 1 or len(groups) < 1:
        return None
    plane_index = [0] * len(elements)
    slot_index = [0] * len(elements)
    for p, raan in enumerate(sorted(groups)):
        members = sorted(groups[raan], key=lambda idx: elements[idx].mean_anomaly_at_epoch_rad)
        for s, idx in enumerate(members):
            plane_index[idx] = p
            slot_index[idx] = s
    return tuple(plane_index), tuple(slot_index), len(groups), sizes.pop()
