"""Command-line interface: ``netga run|panel|sweep|compare|netstats``.

All randomness flows from one master seed, taken from ``--seed``, the config
file, or ``NETGA_SEED``, in that order. If none is given a fresh seed is
generated and printed. Every command writes its CSVs plus a ``manifest.json``
recording the resolved arguments and seed.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__, seeding
from .benchmarks import Function
from .engine import CONFIG_KEYS, GAConfig, SelectionVariant, parse_config_text, run
from .harness import (
    Axis,
    SweepSpec,
    compare,
    netstats_csv,
    network_stats,
    run_standard,
    run_topology_panel,
    sweep,
)
from .netgraph import InvalidTopology

log = logging.getLogger("netga")

DEFAULT_PANEL = "empty,complete,star,er:0.5,ba:25"


class UsageError(Exception):
    pass


class Outputs:
    """Collects output files and removes them all if the command fails."""

    def __init__(self, directory: Path):
        self.directory = directory
        self.written: list[Path] = []

    def write(self, name: str, text: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / name
        tmp = path.with_name(path.name + ".part")
        tmp.write_text(text, encoding="utf-8", newline="")
        self.written.append(path)
        os.replace(tmp, path)
        return path

    def rollback(self) -> None:
        for path in self.written:
            for p in (path, path.with_name(path.name + ".part")):
                p.unlink(missing_ok=True)


def _common(p: argparse.ArgumentParser, *, topology: bool = False, reps: bool = True) -> None:
    p.add_argument("--config", type=Path, help="key = value config file; flags override it")
    p.add_argument("--function", help="rastrigin | sphere | ackley")
    p.add_argument("--dimension", type=int)
    p.add_argument("--n", type=int, help="population size")
    p.add_argument("--rho", type=float, help="crossover rate")
    p.add_argument("--mu", type=float, help="per-gene mutation rate")
    p.add_argument("--tau", type=int, help="number of generations")
    p.add_argument("--selection-variant", choices=[v.value for v in SelectionVariant])
    p.add_argument("--seed", type=int, help="master seed (falls back to $NETGA_SEED)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--workers", type=int, default=1)
    if topology:
        p.add_argument("--topology", help="er:<p> | ba:<m> | complete | empty | star")
    if reps:
        p.add_argument("--reps", type=int, default=10, help="repetitions per grid value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netga", description="Networked genetic algorithm experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single GA run; writes trace.csv")
    _common(p, topology=True, reps=False)

    p = sub.add_parser("panel", help="averaged fitness traces for a list of topologies")
    _common(p)
    p.add_argument("--topologies", default=DEFAULT_PANEL, help=f"comma-separated (default {DEFAULT_PANEL})")

    p = sub.add_parser("sweep", help="ER p-sweep or BA m-sweep with snapshots and polynomial fits")
    _common(p)
    p.add_argument("--axis", choices=["p", "m"], required=True)

    p = sub.add_parser("compare", help="standard GA versus best ER/BA network table")
    _common(p)

    p = sub.add_parser("netstats", help="density, connectivity and path length over a topology grid")
    p.add_argument("--axis", choices=["p", "m"], required=True)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--workers", type=int, default=1)
    return parser


def resolve_seed(flag: int | None, config: dict[str, str]) -> tuple[int, bool]:
    """Return ``(seed, generated)``."""
    if flag is not None:
        return seeding.check_seed(flag), False
    if "seed" in config:
        return seeding.check_seed(int(config["seed"])), False
    env = os.environ.get("NETGA_SEED")
    if env:
        try:
            return seeding.check_seed(int(env)), False
        except ValueError as exc:
            raise UsageError(f"NETGA_SEED: {exc}") from None
    return seeding.fresh_seed(), True


def _merged(args: argparse.Namespace) -> dict[str, str]:
    values: dict[str, str] = {}
    if getattr(args, "config", None) is not None:
        try:
            values = parse_config_text(args.config.read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None and key != "seed":
            values[key] = str(flag)
    return values


def _ga_config(values: dict[str, str], seed: int) -> GAConfig:
    values = dict(values, seed=str(seed))
    values.setdefault("function", "sphere")
    try:
        return GAConfig.from_mapping(values)
    except (ValueError, InvalidTopology) as exc:
        raise UsageError(str(exc)) from None


def _sweep_spec(values: dict[str, str], axis: str, reps: int, seed: int) -> SweepSpec:
    base = _ga_config({k: v for k, v in values.items() if k != "topology"}, seed)
    try:
        return SweepSpec(
            function=base.objective.function,
            axis=axis,
            repetitions=reps,
            master_seed=seed,
            n=base.n,
            rho=base.rho,
            mu=base.mu,
            tau=base.tau,
            dimension=base.dimension,
            selection_variant=base.selection_variant,
        )
    except (ValueError, InvalidTopology) as exc:
        raise UsageError(str(exc)) from None


def _manifest(command: str, seed: int, generated: bool, resolved: dict) -> str:
    body = {
        "command": command,
        "seed": seed,
        "seed_generated": generated,
        "resolved": resolved,
        "version": __version__,
        "polynomial_fit": "order 4, least squares on grid means (repetition averages)",
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def cmd_run(args, out: Outputs) -> None:
    values = _merged(args)
    seed, generated = resolve_seed(args.seed, values)
    cfg = _ga_config(values, seed)
    trace = run(cfg)
    out.write("trace.csv", trace.to_csv())
    out.write("manifest.json", _manifest("run", seed, generated, cfg.as_dict()))
    print(f"seed={seed} final_mean={float(trace.mean_fitness[-1])!r} final_best={float(trace.best_fitness[-1])!r}")


def cmd_panel(args, out: Outputs) -> None:
    values = _merged(args)
    seed, generated = resolve_seed(args.seed, values)
    cfg = _ga_config({k: v for k, v in values.items() if k != "topology"}, seed)
    topologies = [t.strip() for t in args.topologies.split(",") if t.strip()]
    try:
        result = run_topology_panel(
            cfg.objective.function, topologies, args.reps, seed, workers=args.workers,
            n=cfg.n, rho=cfg.rho, mu=cfg.mu, tau=cfg.tau, dimension=cfg.dimension,
            selection_variant=cfg.selection_variant,
        )
    except (ValueError, InvalidTopology) as exc:
        raise UsageError(str(exc)) from None
    out.write("panel.csv", result.to_csv())
    resolved = dict(cfg.as_dict(), topologies=",".join(topologies), reps=args.reps)
    resolved.pop("topology")
    out.write("manifest.json", _manifest("panel", seed, generated, resolved))
    for label in result.traces:
        print(f"{label}: final mean fitness {result.final(label)!r}")
    print(f"seed={seed}")


def _sweep_resolved(spec: SweepSpec) -> dict:
    return {
        "function": spec.function.value,
        "axis": spec.axis.value,
        "reps": spec.repetitions,
        "n": spec.n,
        "rho": spec.rho,
        "mu": spec.mu,
        "tau": spec.tau,
        "dimension": spec.dimension,
        "selection_variant": spec.selection_variant.value,
        "snapshots": list(spec.snapshots),
        "grid": [spec.axis.format(v) for v in spec.grid],
    }


def cmd_sweep(args, out: Outputs) -> None:
    values = _merged(args)
    seed, generated = resolve_seed(args.seed, values)
    spec = _sweep_spec(values, args.axis, args.reps, seed)
    result = sweep(spec, workers=args.workers)
    stem = f"{spec.function.value}_{spec.axis.value}"
    out.write(f"sweep_{stem}.csv", result.to_csv())
    out.write(f"fits_{stem}.csv", result.fits_csv())
    out.write(f"manifest_sweep_{stem}.json", _manifest("sweep", seed, generated, _sweep_resolved(spec)))
    last = spec.snapshots[-1]
    best, arg = result.best(last)
    print(f"{len(result.records)} runs; best t={last} grid mean {best!r} at {spec.axis.value}={arg}; seed={seed}")


def cmd_compare(args, out: Outputs) -> None:
    values = _merged(args)
    seed, generated = resolve_seed(args.seed, values)
    functions = [Function.parse(values["function"])] if "function" in values else list(Function)
    table = None
    for fn in functions:
        vals = dict(values, function=fn.value)
        er = sweep(_sweep_spec(vals, "p", args.reps, seed), workers=args.workers)
        ba = sweep(_sweep_spec(vals, "m", args.reps, seed), workers=args.workers)
        standard = run_standard(er.spec, workers=args.workers)
        for result in (er, ba):
            stem = f"{fn.value}_{result.spec.axis.value}"
            out.write(f"sweep_{stem}.csv", result.to_csv())
            out.write(f"fits_{stem}.csv", result.fits_csv())
        part = compare(er, ba, standard)
        table = part if table is None else table + part
    assert table is not None
    out.write("comparison.csv", table.to_csv())
    text = table.render()
    out.write("comparison.txt", text)
    resolved = {k: v for k, v in _sweep_resolved(er.spec).items() if k not in ("axis", "grid", "function")}
    resolved["functions"] = [f.value for f in functions]
    out.write("manifest.json", _manifest("compare", seed, generated, resolved))
    print(text, end="")
    print(f"seed={seed}")


def cmd_netstats(args, out: Outputs) -> None:
    seed, generated = resolve_seed(args.seed, {})
    try:
        records = network_stats(args.axis, None, args.reps, seed, args.n, args.workers)
    except (ValueError, InvalidTopology) as exc:
        raise UsageError(str(exc)) from None
    out.write(f"netstats_{args.axis}.csv", netstats_csv(args.axis, records))
    grid = Axis(args.axis).default_grid(args.n)
    resolved = {"axis": args.axis, "n": args.n, "reps": args.reps, "grid": [Axis(args.axis).format(v) for v in grid]}
    out.write(f"manifest_netstats_{args.axis}.json", _manifest("netstats", seed, generated, resolved))
    print(f"{len(records)} graphs; seed={seed}")


COMMANDS = {
    "run": cmd_run,
    "panel": cmd_panel,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "netstats": cmd_netstats,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be >= 1")
    if getattr(args, "reps", 1) < 1:
        parser.error("--reps must be >= 1")
    out = Outputs(args.out)
    log.info("netga %s: writing to %s", args.command, args.out)
    try:
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        out.rollback()
        parser.print_usage(sys.stderr)
        print(f"netga {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        out.rollback()
        print(f"netga {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
