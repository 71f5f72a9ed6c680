"""Run orchestration: one engine instance per run, each on its own thread.

A Run owns an isolated Emulator plus a file-backed RunLog under
``<out_dir>/runs/<run_id>/``. The manager never shares anything between
runs except the output directory. Interactive commands go through the
engine's own command queue; the manager only adds the thread hop and the
state checks the HTTP layer needs.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from pathlib import Path

from .engine import Emulator, SlotTransform
from .errors import ValidationError
from .metrics import KINDS, RunLog
from .phy import slot_count
from .scenario import Scenario

__all__ = ["Run", "RunManager", "UnknownRunError", "new_run_id"]

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


def new_run_id() -> str:
    """ULID-style id: 48-bit ms timestamp + 80 random bits, Crockford
    base32; lexicographic order is creation order."""
    value = (int(time.time() * 1000) << 80) | secrets.randbits(80)
    chars = []
    for _ in range(26):
        chars.append(_CROCKFORD[value & 31])
        value >>= 5
    return "".join(reversed(chars))


class UnknownRunError(KeyError):
    def __init__(self, run_id: str):
        super().__init__(run_id)
        self.run_id = run_id

    def __str__(self) -> str:
        return f"unknown run {self.run_id!r}"


class Run:
    """Handle for one run; state mirrors the emulator and only moves
    forward: pending -> running -> done | failed."""

    def __init__(self, run_id: str, scenario: Scenario, realtime_factor: float, run_dir: Path, log: RunLog):
        self.run_id = run_id
        self.scenario = scenario
        self.realtime_factor = realtime_factor
        self.run_dir = run_dir
        self.log = log
        self.emulator: Emulator | None = None
        self.error: str | None = None
        self._thread: threading.Thread | None = None

    @property
    def state(self) -> str:
        if self.error is not None:
            return "failed"
        if self.emulator is None:
            return "pending"
        return self.emulator.state

    @property
    def progress(self) -> tuple[int, int]:
        doc = self.scenario.doc
        total = slot_count(doc["duration_s"], doc["slot_duration_s"])
        if self.emulator is None:
            return (0, total)
        return self.emulator.progress

    def status(self) -> dict:
        completed, total = self.progress
        doc = self.scenario.doc
        return {
            "run_id": self.run_id,
            "state": self.state,
            "progress": {"completed_slots": completed, "total_slots": total},
            "scenario_name": self.scenario.name,
            "scenario_hash": self.scenario.scenario_hash,
            "seed": doc["seed"],
            "algorithm": doc["algorithm"],
            "relay_mode": doc["relay_mode"],
            "realtime_factor": self.realtime_factor,
            "record_counts": {kind: len(self.log.of_kind(kind)) for kind in KINDS},
            "error": self.error,
        }

    def wait(self, timeout_s: float | None = None) -> str:
        """Block until the run thread exits; returns the final state."""
        if self._thread is not None:
            self._thread.join(timeout_s)
        return self.state


class RunManager:
    """Owns every run of one gateway process."""

    def __init__(self, out_dir: str | Path = "out"):
        self.out_dir = Path(out_dir)
        self._runs: dict[str, Run] = {}
        self._lock = threading.Lock()

    def start(self, scenario: Scenario, realtime_factor: float = 0.0) -> Run:
        if realtime_factor < 0:
            raise ValidationError(f"realtime_factor must be >= 0, got {realtime_factor}")
        run_id = new_run_id()
        run_dir = self.out_dir / "runs" / run_id
        run_dir.mkdir(parents=True, exist_ok=False)
        # The normalized document, not the user's raw text: what actually ran.
        (run_dir / "scenario.json").write_text(json.dumps(scenario.doc, indent=2, sort_keys=True) + "\n")
        log = RunLog(run_dir / "metrics.ndjson")
        run = Run(run_id, scenario, realtime_factor, run_dir, log)
        with self._lock:
            self._runs[run_id] = run
        run._thread = threading.Thread(target=self._work, args=(run,), daemon=True, name=f"run-{run_id}")
        run._thread.start()
        return run

    def _work(self, run: Run) -> None:
        try:
            bundle = run.scenario.compile()
            run.emulator = Emulator(bundle, realtime_factor=run.realtime_factor, on_record=run.log.append)
            run.emulator.run()
        except BaseException as exc:  # a failed run must surface, not vanish
            run.error = f"{type(exc).__name__}: {exc}"
        finally:
            run.log.close()

    def get(self, run_id: str) -> Run:
        with self._lock:
            try:
                return self._runs[run_id]
            except KeyError:
                raise UnknownRunError(run_id) from None

    def list(self) -> list[Run]:
        with self._lock:
            return [self._runs[k] for k in sorted(self._runs)]

    def ping(self, run_id: str, src: str, dst: str, wait_timeout_s: float = 60.0) -> dict:
        """Interactive probe against a running run; blocks until the engine
        resolves it. Raises ValidationError when the run is not running."""
        run = self.get(run_id)
        emulator = run.emulator
        if emulator is None:
            raise ValidationError("run is pending, not running")
        pending = emulator.submit_ping(src, dst)
        try:
            sample = pending.wait(wait_timeout_s)
        except TimeoutError:
            # The run may have drained its heap after the command was queued.
            if run.state != "running":
                raise ValidationError(f"run finished before the probe was scheduled (state {run.state})") from None
            raise
        return sample.as_record()

    def inject(self, run_id: str, fail_isls: bool = False, capacity_scale: float = 1.0) -> dict:
        """What-if steering for a running run: applied from the next slot
        boundary until replaced."""
        run = self.get(run_id)
        emulator = run.emulator
        if emulator is None:
            raise ValidationError("run is pending, not running")
        transform = SlotTransform(fail_isls=fail_isls, capacity_scale=capacity_scale)
        emulator.submit_inject(transform)
        return {"fail_isls": transform.fail_isls, "capacity_scale": transform.capacity_scale}
