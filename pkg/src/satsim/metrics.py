"""Run metrics persistence: append-only ndjson, cursor reads, CSV export.

A RunLog is the durable side of one run's MetricsLog: every record the
engine emits is appended as one canonical JSON line (sorted keys, no
whitespace) so equal runs produce byte-identical files. Readers address
records two ways: by (kind, index range) for the metrics endpoints, and
by a flat cursor over the combined header+records sequence for the event
stream, which can block until more records arrive or the log closes.
"""

from __future__ import annotations

import csv
import json
import threading
from pathlib import Path

from .errors import ValidationError

__all__ = ["KINDS", "RunLog", "canonical_line"]

# Every stream kind the engine emits, in no particular order.
KINDS = ("topology_record", "path_record", "rtt_sample", "flow_rate_sample")

# Fixed CSV column order per kind; list-valued fields are joined with "|".
_CSV_COLUMNS = {
    "topology_record": ("slot_index", "t_s", "node_count", "link_count", "failed_link_count"),
    "path_record": ("slot_index", "t_s", "src", "dst", "hop_count", "total_distance_km", "theoretical_rtt_s", "hops"),
    "rtt_sample": ("launch_t_s", "src", "dst", "rtt_s", "theoretical_rtt_s", "hop_count", "timed_out", "path"),
    "flow_rate_sample": ("slot_index", "t_s", "src", "dst", "send_rate_bit_s", "cwnd_segments", "bottleneck_bit_s"),
}


def canonical_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


class RunLog:
    """Append-only record store for one run, optionally file-backed.

    Thread contract: one writer (the engine thread, via ``append``), any
    number of readers. Readers never block the writer beyond a list
    append under the condition lock.
    """

    def __init__(self, path: Path | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: list[dict] = []
        self._cond = threading.Condition()
        self._closed = False
        self._fh = self.path.open("w") if self.path is not None else None

    # -- writer side -------------------------------------------------------

    def append(self, record: dict) -> None:
        line = canonical_line(record)
        with self._cond:
            if self._closed:
                raise ValidationError("log is closed")
            if self._fh is not None:
                self._fh.write(line + "\n")
                self._fh.flush()
            self._entries.append(record)
            self._cond.notify_all()

    def close(self) -> None:
        with self._cond:
            if self._closed:
                return
            self._closed = True
            if self._fh is not None:
                self._fh.close()
                self._fh = None
            self._cond.notify_all()

    @property
    def closed(self) -> bool:
        with self._cond:
            return self._closed

    # -- reader side -------------------------------------------------------

    def __len__(self) -> int:
        with self._cond:
            return len(self._entries)

    @property
    def header(self) -> dict | None:
        with self._cond:
            first = self._entries[0] if self._entries else None
        if first is not None and first.get("kind") == "run_header":
            return first
        return None

    def of_kind(self, kind: str) -> list[dict]:
        if kind not in KINDS:
            raise ValidationError(f"unknown metric kind {kind!r} (known: {list(KINDS)})")
        with self._cond:
            return [r for r in self._entries if r.get("kind") == kind]

    def read(self, kind: str, start: int = 0, stop: int | None = None) -> list[dict]:
        """Records of one kind by index range; past-the-end reads are empty."""
        if start < 0 or (stop is not None and stop < 0):
            raise ValidationError("range indices must be >= 0")
        records = self.of_kind(kind)
        return records[start:stop]

    def entries_from(self, cursor: int) -> list[dict]:
        """Combined header+records sequence from a flat cursor."""
        if cursor < 0:
            raise ValidationError(f"cursor must be >= 0, got {cursor}")
        with self._cond:
            return self._entries[cursor:]

    def wait_beyond(self, cursor: int, timeout_s: float | None = None) -> list[dict]:
        """Block until the log grows past ``cursor`` or closes; returns the
        new entries (empty means closed or timed out)."""
        with self._cond:
            self._cond.wait_for(lambda: self._closed or len(self._entries) > cursor, timeout_s)
            return self._entries[cursor:]

    # -- import/export -----------------------------------------------------

    @classmethod
    def load(cls, path: Path) -> "RunLog":
        """Read a persisted ndjson log back into memory (no file handle)."""
        log = cls(path=None)
        with Path(path).open() as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    log._entries.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ValidationError(f"{path}:{lineno}: bad record: {exc.msg}") from exc
        log._closed = True
        return log

    def lines(self) -> list[str]:
        with self._cond:
            return [canonical_line(r) for r in self._entries]

    def write_csvs(self, out_dir: Path) -> dict[str, Path]:
        """One CSV per kind under ``out_dir``; returns {kind: path}.
        Kinds with no records still get a header-only file so downstream
        tooling never has to special-case an absent stream."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written: dict[str, Path] = {}
        for kind in KINDS:
            columns = _CSV_COLUMNS[kind]
            path = out_dir / f"{kind}s.csv"
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(columns)
                for record in self.of_kind(kind):
                    row = []
                    for col in columns:
                        value = record.get(col)
                        if isinstance(value, list):
                            value = "|".join(str(v) for v in value)
                        row.append(value)
                    writer.writerow(row)
            written[kind] = path
        return written
