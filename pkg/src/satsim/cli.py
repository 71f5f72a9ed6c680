"""satsim command line.

    satsim synth     <scenario>   constellation as TLE text
    satsim capacity  <scenario>   per-slot downlink SINR/capacity records
    satsim topo      <scenario>   per-slot topology summary, or one slot's links
    satsim route     <scenario>   per-slot path comparison across algorithms
    satsim run       <scenario>   full emulation into an out-dir run directory
    satsim serve     [scenario]   HTTP gateway for the web console
    satsim export    [scenario]   CSVs from a stored run directory

<scenario> is a file path or a bundled scenario name. Every subcommand
takes --seed (replaces the scenario's seed, which also moves the derived
failure draw) and --out-dir (default ./out). Commands that emit a single
artifact write to stdout unless --out-dir is given explicitly.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import NoRouteError, ValidationError
from .metrics import RunLog
from .pathcomp import available_algorithms, get_algorithm, route
from .runs import RunManager
from .scenario import Scenario, bundled_scenario, bundled_scenarios, load_scenario
from .tle import export_tle
from .topology import build_snapshot

__all__ = ["main"]


def _resolve_scenario(ref: str, seed: int | None) -> Scenario:
    path = Path(ref)
    if path.exists():
        scenario = load_scenario(path)
    else:
        try:
            scenario = bundled_scenario(ref)
        except ValidationError:
            known = ", ".join(s.name for s in bundled_scenarios())
            raise ValidationError(f"{ref!r} is neither a scenario file nor a bundled name (bundled: {known})")
    if seed is not None:
        scenario = scenario.with_seed(seed)
    return scenario


def _emit(lines: list[str], out_path: Path | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text)
        print(f"wrote {out_path}")


def _slot_snapshot(bundle, k: int, memo: dict):
    return build_snapshot(
        k * bundle.slot_duration_s,
        bundle.constellation,
        list(bundle.ground_stations),
        bundle.schedule,
        bundle.isl_capacity_bit_s,
        bundle.elevation_mask_deg,
        failure_plan=bundle.failure_plan,
        include_isls=bundle.relay_mode == "isl",
        failure_memo=memo,
    )


def _default_pair(scenario: Scenario) -> tuple[str, str]:
    for entry in scenario.doc["workload"]:
        return entry["src"], entry["dst"]
    stations = scenario.doc["ground_stations"]
    if len(stations) < 2:
        raise ValidationError("scenario has fewer than two ground stations; pass --src/--dst")
    return stations[0]["gs_id"], stations[1]["gs_id"]


def _cmd_synth(args) -> int:
    scenario = _resolve_scenario(args.scenario, args.seed)
    bundle = scenario.compile()
    out = None if args.out_dir is None else Path(args.out_dir) / f"{scenario.name}.tle"
    _emit(export_tle(bundle.constellation).splitlines(), out)
    return 0


def _cmd_capacity(args) -> int:
    scenario = _resolve_scenario(args.scenario, args.seed)
    bundle = scenario.compile()
    out = None if args.out_dir is None else Path(args.out_dir) / f"{scenario.name}-capacity.csv"
    _emit(bundle.schedule.to_lines(), out)
    return 0


def _cmd_topo(args) -> int:
    scenario = _resolve_scenario(args.scenario, args.seed)
    bundle = scenario.compile()
    memo: dict = {}
    if args.slot is not None:
        # One slot in full: every link with its state.
        snap = _slot_snapshot(bundle, args.slot, memo)
        lines = ["link_id,kind,endpoint_a,endpoint_b,distance_km,delay_s,capacity_bit_s,failed"]
        for link in snap.links:
            lines.append(
                f"{link.link_id},{link.kind},{link.endpoint_a},{link.endpoint_b},"
                f"{link.distance_km!r},{link.delay_s!r},{link.capacity_bit_s!r},{link.failed}"
            )
        out = None if args.out_dir is None else Path(args.out_dir) / f"{scenario.name}-slot{args.slot:04d}-links.csv"
        _emit(lines, out)
        return 0
    lines = ["slot_index,t_s,node_count,link_count,failed_link_count"]
    for k in range(0, bundle.n_slots, args.every):
        snap = _slot_snapshot(bundle, k, memo)
        failed = sum(1 for link in snap.links if link.failed)
        lines.append(f"{k},{snap.t_s!r},{len(snap.nodes)},{len(snap.links)},{failed}")
    out = None if args.out_dir is None else Path(args.out_dir) / f"{scenario.name}-topology.csv"
    _emit(lines, out)
    return 0


def _cmd_route(args) -> int:
    scenario = _resolve_scenario(args.scenario, args.seed)
    bundle = scenario.compile()
    src, dst = (args.src, args.dst) if args.src and args.dst else _default_pair(scenario)
    algorithms = args.algorithm or list(available_algorithms())
    for name in algorithms:
        get_algorithm(name)  # fail fast on typos before any slot work
    memo: dict = {}
    lines = ["algorithm,slot_index,t_s,src,dst,hop_count,total_distance_km,theoretical_rtt_s,hops"]
    unreachable: dict[str, int] = {name: 0 for name in algorithms}
    for k in range(0, bundle.n_slots, args.every):
        snap = _slot_snapshot(bundle, k, memo)
        for name in algorithms:
            try:
                rec = route(snap, src, dst, algorithm=name)
            except NoRouteError:
                unreachable[name] += 1
                continue
            hops = "|".join(rec.hops)
            lines.append(
                f"{name},{k},{snap.t_s!r},{src},{dst},{len(rec.hops) - 1},"
                f"{rec.total_distance_km!r},{rec.theoretical_rtt_s!r},{hops}"
            )
    out = None if args.out_dir is None else Path(args.out_dir) / f"{scenario.name}-routes.csv"
    _emit(lines, out)
    for name, count in unreachable.items():
        if count:
            print(f"note: {name}: no route in {count} slot(s)", file=sys.stderr)
    return 0


def _cmd_run(args) -> int:
    scenario = _resolve_scenario(args.scenario, args.seed)
    manager = RunManager(out_dir=args.out_dir or "out")
    run = manager.start(scenario, realtime_factor=args.realtime_factor)
    print(f"run {run.run_id} ({scenario.name}, hash {scenario.scenario_hash[:12]})")
    state = run.wait()
    if state == "failed":
        print(f"error: {run.error}", file=sys.stderr)
        return 1
    written = run.log.write_csvs(run.run_dir)
    counts = ", ".join(f"{kind}={len(run.log.of_kind(kind))}" for kind in sorted(written))
    print(f"{state}: {counts}")
    print(f"wrote {run.run_dir}/metrics.ndjson and {len(written)} csv files")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    extra = ()
    if args.scenario is not None:
        extra = (_resolve_scenario(args.scenario, args.seed),)
    manager = RunManager(out_dir=args.out_dir or "out")
    app = create_app(manager, extra_scenarios=extra)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _find_run_dir(out_dir: Path, scenario: Scenario | None, run_id: str | None) -> Path:
    runs_root = out_dir / "runs"
    if run_id is not None:
        run_dir = runs_root / run_id
        if not run_dir.is_dir():
            raise ValidationError(f"no stored run {run_id!r} under {runs_root}")
        return run_dir
    if scenario is None:
        raise ValidationError("export needs a scenario (to match by hash) or --run-id")
    if not runs_root.is_dir():
        raise ValidationError(f"no runs directory at {runs_root}")
    # Run ids sort by creation time, so scan newest first for a hash match.
    for run_dir in sorted((p for p in runs_root.iterdir() if p.is_dir()), reverse=True):
        stored = run_dir / "scenario.json"
        if not stored.is_file():
            continue
        try:
            doc = json.loads(stored.read_text())
        except json.JSONDecodeError:
            continue
        # Stored docs are normalized, so dict equality is hash equality.
        if doc == scenario.doc:
            return run_dir
    raise ValidationError(f"no stored run matches scenario {scenario.name!r} (hash {scenario.scenario_hash[:12]})")


def _cmd_export(args) -> int:
    out_dir = Path(args.out_dir or "out")
    scenario = None
    if args.scenario is not None:
        scenario = _resolve_scenario(args.scenario, args.seed)
    run_dir = _find_run_dir(out_dir, scenario, args.run_id)
    log = RunLog.load(run_dir / "metrics.ndjson")
    written = log.write_csvs(run_dir)
    for kind in sorted(written):
        print(f"wrote {written[kind]} ({len(log.of_kind(kind))} records)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satsim", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, scenario_required: bool = True) -> None:
        if scenario_required:
            p.add_argument("scenario", help="scenario file path or bundled name")
        else:
            p.add_argument("scenario", nargs="?", default=None, help="scenario file path or bundled name")
        p.add_argument("--seed", type=int, default=None, help="replace the scenario seed")
        p.add_argument("--out-dir", default=None, help="write artifacts here instead of stdout")

    p = sub.add_parser("synth", help="synthesize the constellation, emit TLE")
    common(p)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("capacity", help="emit the per-slot downlink capacity schedule")
    common(p)
    p.set_defaults(fn=_cmd_capacity)

    p = sub.add_parser("topo", help="emit per-slot topology summaries or one slot's links")
    common(p)
    p.add_argument("--slot", type=int, default=None, help="emit the full link table for this slot")
    p.add_argument("--every", type=int, default=1, help="sample every Nth slot (summary mode)")
    p.set_defaults(fn=_cmd_topo)

    p = sub.add_parser("route", help="compare routing algorithms slot by slot")
    common(p)
    p.add_argument("--src", default=None, help="source station (default: first workload pair)")
    p.add_argument("--dst", default=None, help="destination station")
    p.add_argument("--algorithm", action="append", default=None, help="restrict to an algorithm (repeatable)")
    p.add_argument("--every", type=int, default=1, help="sample every Nth slot")
    p.set_defaults(fn=_cmd_route)

    p = sub.add_parser("run", help="run the full emulation")
    common(p)
    p.add_argument("--realtime-factor", type=float, default=0.0, help="simulated seconds per wall second (0 = as fast as possible)")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("serve", help="serve the HTTP gateway")
    common(p, scenario_required=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("export", help="re-export CSVs from a stored run")
    common(p, scenario_required=False)
    p.add_argument("--run-id", default=None, help="export this run instead of matching by scenario")
    p.set_defaults(fn=_cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
