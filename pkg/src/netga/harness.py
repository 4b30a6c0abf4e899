"""Experiment harness: topology panels, parameter sweeps, polynomial fits and
the standard-GA versus best-network comparison.

Every run's seed is derived from a master seed and the run's coordinates
(experiment kind, grid index, repetition), so results are assembled by key
and do not depend on worker count or completion order.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from . import seeding
from .benchmarks import Function, ObjectiveSpec
from .engine import GAConfig, SelectionVariant, run
from .netgraph import (
    Kind,
    TopologySpec,
    average_shortest_path_length,
    density,
    generate,
    is_connected,
)

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# first spawn-key element of every derived run seed
KEY_ER = 0
KEY_BA = 1
KEY_STANDARD = 2
KEY_PANEL = 3

DEFAULT_SNAPSHOTS = (20, 50, 100)


class Axis(str, enum.Enum):
    P = "p"
    M = "m"

    @property
    def kind(self) -> Kind:
        return Kind.ERDOS_RENYI if self is Axis.P else Kind.BARABASI_ALBERT

    @property
    def key(self) -> int:
        return KEY_ER if self is Axis.P else KEY_BA

    def default_grid(self, n: int) -> tuple:
        if self is Axis.P:
            return tuple(i / 100 for i in range(101))
        return tuple(range(1, n))

    def format(self, value) -> str:
        return repr(float(value)) if self is Axis.P else str(int(value))


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """``list(map(fn, items))``, optionally spread over worker processes. Output order is input order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------- polyfit


def polyfit(xs, ys, order: int) -> np.ndarray:
    """Least-squares polynomial coefficients, constant term first.

    The abscissa is mapped affinely onto [-1, 1] before solving (by QR-based
    ``lstsq`` on the Vandermonde matrix) and the coefficients are mapped back
    to the raw axis.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-D arrays of equal length")
    if order < 0:
        raise ValueError("order must be non-negative")
    if xs.size < order + 1:
        raise ValueError(f"need at least {order + 1} points for an order-{order} fit, got {xs.size}")
    lo, hi = xs.min(), xs.max()
    if hi == lo:
        raise ValueError("degenerate design matrix: all abscissae are equal")
    centre = (hi + lo) / 2.0
    half = (hi - lo) / 2.0
    vander = np.vander((xs - centre) / half, order + 1, increasing=True)
    scaled, *_ = np.linalg.lstsq(vander, ys, rcond=None)
    # substitute u = (x - centre) / half back in
    shift = np.polynomial.Polynomial([-centre / half, 1.0 / half])
    raw = np.polynomial.Polynomial(scaled)(shift).coef
    out = np.zeros(order + 1)
    out[: raw.size] = raw
    return out


def polyval(coefs, xs) -> np.ndarray:
    return np.polynomial.polynomial.polyval(np.asarray(xs, dtype=np.float64), coefs)


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class SweepSpec:
    function: Function | str
    axis: Axis | str
    grid: tuple | None = None
    repetitions: int = 10
    snapshots: tuple[int, ...] = DEFAULT_SNAPSHOTS
    master_seed: int = 0
    n: int = 50
    rho: float = 0.7
    mu: float = 0.05
    tau: int = 100
    dimension: int = 2
    selection_variant: SelectionVariant | str = SelectionVariant.LINEAR

    def __post_init__(self) -> None:
        object.__setattr__(self, "function", Function.parse(self.function))
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "selection_variant", SelectionVariant(self.selection_variant))
        if self.grid is None:
            object.__setattr__(self, "grid", self.axis.default_grid(self.n))
        else:
            object.__setattr__(self, "grid", tuple(self.grid))
        if not self.grid:
            raise ValueError("sweep grid is empty")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        snaps = tuple(sorted(set(int(s) for s in self.snapshots)))
        if not snaps or snaps[0] < 0 or snaps[-1] > self.tau:
            raise ValueError(f"snapshots must lie in 0..tau={self.tau}, got {self.snapshots}")
        object.__setattr__(self, "snapshots", snaps)
        seeding.check_seed(self.master_seed)
        for value in self.grid:  # fail early on bad grid values
            self.topology(value)

    def topology(self, value) -> TopologySpec:
        return TopologySpec(self.axis.kind, self.n, value)

    def config(self, value, seed: int) -> GAConfig:
        return GAConfig(
            objective=ObjectiveSpec(self.function, self.dimension),
            topology=self.topology(value),
            n=self.n,
            rho=self.rho,
            mu=self.mu,
            tau=self.tau,
            seed=seed,
            selection_variant=self.selection_variant,
        )

    def seed_for(self, grid_index: int, repetition: int) -> int:
        return seeding.derive_seed(self.master_seed, self.axis.key, grid_index, repetition)

    def cells(self) -> list[tuple[int, int]]:
        return [(i, r) for i in range(len(self.grid)) for r in range(self.repetitions)]


@dataclass(frozen=True)
class SweepRecord:
    grid_index: int
    value: float | int
    repetition: int
    seed: int
    snapshots: tuple[float, ...]  # mean population fitness at each snapshot generation
    density: float
    connected: bool
    avg_path: float | None


def _sweep_cell(job: tuple[SweepSpec, int, int]) -> SweepRecord:
    spec, i, r = job
    seed = spec.seed_for(i, r)
    trace = run(spec.config(spec.grid[i], seed))
    g = trace.graph
    return SweepRecord(
        grid_index=i,
        value=spec.grid[i],
        repetition=r,
        seed=seed,
        snapshots=tuple(float(trace.mean_fitness[t]) for t in spec.snapshots),
        density=density(g),
        connected=is_connected(g),
        avg_path=average_shortest_path_length(g).value,
    )


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list[SweepRecord]
    grid_means: dict[int, np.ndarray] = field(default_factory=dict)
    fits: dict[int, np.ndarray] = field(default_factory=dict)
    fit_order: int = 4

    def __post_init__(self) -> None:
        self.records = sorted(self.records, key=lambda rec: (rec.grid_index, rec.repetition))
        if len(self.records) != len(self.spec.grid) * self.spec.repetitions:
            raise ValueError("record count does not match grid x repetitions")
        values = self.values()
        xs = np.asarray(self.spec.grid, dtype=np.float64)
        for s, t in enumerate(self.spec.snapshots):
            self.grid_means[t] = values[:, :, s].mean(axis=1)
            if len(xs) >= self.fit_order + 1:
                self.fits[t] = polyfit(xs, self.grid_means[t], self.fit_order)

    def values(self) -> np.ndarray:
        """Snapshot fitness as an array of shape ``(grid, repetitions, snapshots)``."""
        out = np.empty((len(self.spec.grid), self.spec.repetitions, len(self.spec.snapshots)))
        for rec in self.records:
            out[rec.grid_index, rec.repetition] = rec.snapshots
        return out

    def best(self, snapshot: int) -> tuple[float, float | int]:
        """Lowest grid mean at ``snapshot`` and the grid value where it occurs (first on ties)."""
        means = self.grid_means[snapshot]
        i = int(np.argmin(means))
        return float(means[i]), self.spec.grid[i]

    def to_csv(self) -> str:
        spec = self.spec
        header = ["function", "axis", "value", "repetition", "seed"]
        header += [f"t{t}" for t in spec.snapshots]
        header += ["density", "connected", "avg_path"]
        rows = (
            [spec.function.value, spec.axis.value, spec.axis.format(rec.value), rec.repetition, rec.seed]
            + [_fmt(v) for v in rec.snapshots]
            + [_fmt(rec.density), _fmt(rec.connected), _fmt(rec.avg_path)]
            for rec in self.records
        )
        return _csv(header, rows)

    def fits_csv(self) -> str:
        header = ["function", "axis", "snapshot"] + [f"c{k}" for k in range(self.fit_order + 1)]
        rows = (
            [self.spec.function.value, self.spec.axis.value, t] + [_fmt(c) for c in coefs]
            for t, coefs in self.fits.items()
        )
        return _csv(header, rows)


def sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    jobs = [(spec, i, r) for i, r in spec.cells()]
    log.info("sweep %s/%s: %d runs on %d worker(s)", spec.function.value, spec.axis.value, len(jobs), workers)
    return SweepResult(spec, parallel_map(_sweep_cell, jobs, workers))


# ---------------------------------------------------------------- standard GA baseline


@dataclass
class StandardResult:
    """Complete-network runs, the standard GA baseline."""

    spec: SweepSpec
    seeds: list[int]
    values: np.ndarray  # (repetitions, snapshots)

    def mean(self, snapshot: int) -> float:
        return float(self.values[:, self.spec.snapshots.index(snapshot)].mean())


def _standard_cell(job: tuple[SweepSpec, int]) -> tuple[int, list[float]]:
    spec, r = job
    seed = seeding.derive_seed(spec.master_seed, KEY_STANDARD, 0, r)
    cfg = GAConfig(
        objective=ObjectiveSpec(spec.function, spec.dimension),
        topology=TopologySpec(Kind.COMPLETE, spec.n),
        n=spec.n,
        rho=spec.rho,
        mu=spec.mu,
        tau=spec.tau,
        seed=seed,
        selection_variant=spec.selection_variant,
    )
    trace = run(cfg)
    return seed, [float(trace.mean_fitness[t]) for t in spec.snapshots]


def run_standard(spec: SweepSpec, workers: int = 1) -> StandardResult:
    """Run the complete-network GA with the same repetitions, snapshots and GA parameters as ``spec``."""
    out = parallel_map(_standard_cell, [(spec, r) for r in range(spec.repetitions)], workers)
    return StandardResult(spec, [s for s, _ in out], np.array([v for _, v in out]))


# ---------------------------------------------------------------- comparison table


@dataclass(frozen=True)
class ComparisonRow:
    function: Function
    snapshot: int
    standard: float
    er_best: float
    er_argmin: float
    ba_best: float
    ba_argmin: int

    @property
    def winner(self) -> str:
        cells = {"GA": self.standard, "ER*": self.er_best, "AB*": self.ba_best}
        return min(cells, key=cells.__getitem__)


@dataclass
class ComparisonTable:
    rows: list[ComparisonRow]

    def functions(self) -> list[Function]:
        return list(dict.fromkeys(row.function for row in self.rows))

    def snapshots(self) -> list[int]:
        return sorted({row.snapshot for row in self.rows})

    def cell(self, function, snapshot: int) -> ComparisonRow:
        function = Function.parse(function)
        for row in self.rows:
            if row.function is function and row.snapshot == snapshot:
                return row
        raise KeyError((function.value, snapshot))

    def __add__(self, other: "ComparisonTable") -> "ComparisonTable":
        return ComparisonTable(self.rows + other.rows)

    def to_csv(self) -> str:
        snaps = self.snapshots()
        header = ["function"]
        for t in snaps:
            header += [f"ga_t{t}", f"er_t{t}", f"ab_t{t}", f"er_argmin_t{t}", f"ab_argmin_t{t}", f"best_t{t}"]
        rows = []
        for fn in self.functions():
            row = [fn.value]
            for t in snaps:
                c = self.cell(fn, t)
                row += [_fmt(c.standard), _fmt(c.er_best), _fmt(c.ba_best),
                        Axis.P.format(c.er_argmin), Axis.M.format(c.ba_argmin), c.winner]
            rows.append(row)
        return _csv(header, rows)

    def render(self, digits: int = 3) -> str:
        """Plain-text table with one row per function; the best cell per snapshot is starred."""
        snaps = self.snapshots()
        width = digits + 6
        head = ["Function & Time".ljust(16)]
        sub = ["Network".ljust(16)]
        for t in snaps:
            head.append(f"t={t}".center(3 * width))
            sub.extend(name.rjust(width) for name in ("GA", "ER*", "AB*"))
        lines = ["".join(head), "".join(sub)]
        for fn in self.functions():
            parts = [fn.value.capitalize().ljust(16)]
            for t in snaps:
                c = self.cell(fn, t)
                for name, value in (("GA", c.standard), ("ER*", c.er_best), ("AB*", c.ba_best)):
                    mark = "*" if name == c.winner else " "
                    parts.append(f"{value:.{digits}f}{mark}".rjust(width))
            lines.append("".join(parts))
        argmins = [
            f"{fn.value} t={t}: p*={Axis.P.format(self.cell(fn, t).er_argmin)} "
            f"m*={Axis.M.format(self.cell(fn, t).ba_argmin)}"
            for fn in self.functions()
            for t in snaps
        ]
        return "\n".join(lines + [""] + argmins) + "\n"


def compare(er_result: SweepResult, ba_result: SweepResult, standard: StandardResult) -> ComparisonTable:
    fn = er_result.spec.function
    snaps = er_result.spec.snapshots
    for label, other in (("BA sweep", ba_result.spec), ("standard runs", standard.spec)):
        if other.snapshots != snaps:
            raise ValueError(f"{label} snapshots {other.snapshots} differ from ER sweep {snaps}")
        if other.function is not fn:
            raise ValueError(f"{label} is for {other.function.value}, ER sweep is for {fn.value}")
    if er_result.spec.axis is not Axis.P or ba_result.spec.axis is not Axis.M:
        raise ValueError("compare expects an ER (p) sweep and a BA (m) sweep")
    rows = []
    for t in snaps:
        er_best, er_arg = er_result.best(t)
        ba_best, ba_arg = ba_result.best(t)
        rows.append(ComparisonRow(fn, t, standard.mean(t), er_best, er_arg, ba_best, ba_arg))
    return ComparisonTable(rows)


# ---------------------------------------------------------------- topology panel


@dataclass
class PanelResult:
    function: Function
    topologies: list[TopologySpec]
    repetitions: int
    master_seed: int
    traces: dict[str, np.ndarray]  # topology label -> mean-fitness trace averaged over repetitions

    def final(self, topology: str | TopologySpec) -> float:
        return float(self.traces[str(topology)][-1])

    def to_csv(self) -> str:
        rows = (
            [self.function.value, label, t, _fmt(v)]
            for label, trace in self.traces.items()
            for t, v in enumerate(trace)
        )
        return _csv(["function", "topology", "t", "mean_fitness_avg"], rows)


def _panel_cell(job: tuple[GAConfig, int]) -> np.ndarray:
    cfg, _ = job
    return run(cfg).mean_fitness


def run_topology_panel(
    function: Function | str,
    topologies: Sequence[TopologySpec | str],
    repetitions: int = 10,
    master_seed: int = 0,
    *,
    workers: int = 1,
    **params,
) -> PanelResult:
    """Average the mean-fitness trace over ``repetitions`` runs for each topology.

    Repetition ``r`` uses the same run seed for every topology, so all
    topologies start from the same initial populations.
    """
    function = Function.parse(function)
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    n = params.get("n", 50)
    specs = [t if isinstance(t, TopologySpec) else TopologySpec.parse(t, n) for t in topologies]
    labels = [str(s) for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate topology in panel")
    dimension = params.pop("dimension", 2)
    seeds = [seeding.derive_seed(master_seed, KEY_PANEL, 0, r) for r in range(repetitions)]
    jobs = [
        (GAConfig(objective=ObjectiveSpec(function, dimension), topology=spec, seed=seed, **params), r)
        for spec in specs
        for r, seed in enumerate(seeds)
    ]
    traces = parallel_map(_panel_cell, jobs, workers)
    averaged = {
        label: np.mean(traces[k * repetitions : (k + 1) * repetitions], axis=0)
        for k, label in enumerate(labels)
    }
    return PanelResult(function, specs, repetitions, master_seed, averaged)


# ---------------------------------------------------------------- network statistics


@dataclass(frozen=True)
class NetStatsRecord:
    value: float | int
    repetition: int
    seed: int
    edges: int
    density: float
    connected: bool
    avg_path: float | None
    avg_path_partial: bool


def _netstats_cell(job: tuple[TopologySpec, int, int]) -> NetStatsRecord:
    spec, r, seed = job
    g = generate(spec, seeding.stream(seed, seeding.GRAPH))
    path = average_shortest_path_length(g)
    return NetStatsRecord(spec.param, r, seed, g.edge_count, density(g), is_connected(g), path.value, path.partial)


def network_stats(
    axis: Axis | str,
    grid: Sequence | None = None,
    repetitions: int = 10,
    master_seed: int = 0,
    n: int = 50,
    workers: int = 1,
) -> list[NetStatsRecord]:
    """Structural metrics of the networks a sweep would draw.

    Grid cell ``(i, r)`` uses the same derived seed as the fitness sweep, so
    the graphs are the very ones the GA runs on.
    """
    axis = Axis(axis)
    grid = axis.default_grid(n) if grid is None else tuple(grid)
    jobs = []
    for i, value in enumerate(grid):
        spec = TopologySpec(axis.kind, n, value)
        for r in range(repetitions):
            jobs.append((spec, r, seeding.derive_seed(master_seed, axis.key, i, r)))
    return parallel_map(_netstats_cell, jobs, workers)


def netstats_csv(axis: Axis | str, records: Sequence[NetStatsRecord]) -> str:
    axis = Axis(axis)
    header = ["axis", "value", "repetition", "seed", "edges", "density", "connected", "avg_path", "avg_path_partial"]
    rows = (
        [axis.value, axis.format(rec.value), rec.repetition, rec.seed, rec.edges,
         _fmt(rec.density), _fmt(rec.connected), _fmt(rec.avg_path), _fmt(rec.avg_path_partial)]
        for rec in records
    )
    return _csv(header, rows)
