"""The networked genetic algorithm.

Each generation runs ``n/2`` mating events. The first parent is drawn by
roulette selection over the whole population; its mate is drawn by roulette
over the first parent's graph neighbours only. A parent with no neighbours
produces two copies of itself. Children go through single-point crossover
and per-gene Gaussian mutation and replace the whole population.

Random draws per generation come from one stream in a fixed order: first
parent uniforms, mate uniforms, crossover coins, cut points, mutation
uniforms, mutation normals. Each block is drawn in full even when some
values go unused, so the stream position never depends on the data.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import seeding
from .benchmarks import Function, ObjectiveSpec, evaluate
from .netgraph import PopulationGraph, TopologySpec, generate, neighbors


class SelectionVariant(str, enum.Enum):
    LINEAR = "linear"
    SQUARED = "squared"


@dataclass(frozen=True)
class GAConfig:
    objective: ObjectiveSpec | Function | str = Function.SPHERE
    topology: TopologySpec | str = "complete"
    n: int = 50
    rho: float = 0.7
    mu: float = 0.05
    tau: int = 100
    seed: int = 0
    selection_variant: SelectionVariant | str = SelectionVariant.LINEAR

    def __post_init__(self) -> None:
        if self.n < 2 or self.n % 2:
            raise ValueError(f"population size must be even and >= 2, got {self.n}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")
        if self.tau < 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")
        if not isinstance(self.objective, ObjectiveSpec):
            object.__setattr__(self, "objective", ObjectiveSpec(Function.parse(self.objective)))
        if isinstance(self.topology, str):
            object.__setattr__(self, "topology", TopologySpec.parse(self.topology, self.n))
        elif self.topology.n != self.n:
            raise ValueError(f"topology is for n={self.topology.n}, config has n={self.n}")
        object.__setattr__(self, "selection_variant", SelectionVariant(self.selection_variant))
        object.__setattr__(self, "seed", seeding.check_seed(self.seed))

    @property
    def dimension(self) -> int:
        return self.objective.dimension

    def as_dict(self) -> dict[str, str]:
        return {
            "function": self.objective.function.value,
            "dimension": str(self.objective.dimension),
            "n": str(self.n),
            "rho": repr(float(self.rho)),
            "mu": repr(float(self.mu)),
            "tau": str(self.tau),
            "topology": str(self.topology),
            "seed": str(self.seed),
            "selection_variant": self.selection_variant.value,
        }

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.as_dict().items())

    @classmethod
    def from_mapping(cls, values: dict[str, object]) -> "GAConfig":
        unknown = set(values) - set(CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        defaults = cls()
        n = int(values.get("n", defaults.n))
        objective = ObjectiveSpec(
            Function.parse(str(values.get("function", defaults.objective.function.value))),
            int(values.get("dimension", defaults.objective.dimension)),
        )
        return cls(
            objective=objective,
            topology=TopologySpec.parse(str(values.get("topology", "complete")), n),
            n=n,
            rho=float(values.get("rho", defaults.rho)),
            mu=float(values.get("mu", defaults.mu)),
            tau=int(values.get("tau", defaults.tau)),
            seed=int(values.get("seed", defaults.seed)),
            selection_variant=str(values.get("selection_variant", defaults.selection_variant.value)),
        )

    @classmethod
    def from_text(cls, text: str) -> "GAConfig":
        return cls.from_mapping(parse_config_text(text))


CONFIG_KEYS = ("function", "dimension", "n", "rho", "mu", "tau", "topology", "seed", "selection_variant")


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


@dataclass
class Population:
    individuals: np.ndarray  # (n, d)
    fitness: np.ndarray  # (n,) raw objective values

    @classmethod
    def from_genomes(cls, objective: ObjectiveSpec, genomes) -> "Population":
        genomes = np.array(genomes, dtype=np.float64, ndmin=2)
        return cls(genomes, np.asarray(evaluate(objective, genomes), dtype=np.float64))

    @property
    def size(self) -> int:
        return self.individuals.shape[0]


def init_population(config: GAConfig, rng: np.random.Generator) -> Population:
    lo, hi = config.objective.bounds
    genomes = rng.uniform(lo, hi, size=(config.n, config.dimension))
    return Population.from_genomes(config.objective, genomes)


def fitness_transform(f):
    """Map a raw objective value (lower is better) to a selection score in (0, 1]."""
    out = 1.0 / (1.0 + np.asarray(f, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


def selection_weights(
    pop: Population,
    subset: Sequence[int] | None = None,
    variant: SelectionVariant | str = SelectionVariant.LINEAR,
) -> np.ndarray:
    """Roulette probabilities over ``subset`` (whole population if ``None``), in subset order."""
    idx = np.arange(pop.size) if subset is None else np.asarray(list(subset), dtype=np.intp)
    if idx.size == 0:
        raise ValueError("selection over an empty subset")
    score = fitness_transform(pop.fitness[idx])
    if SelectionVariant(variant) is SelectionVariant.SQUARED:
        score = score / np.sum(score * score)
    return score / np.sum(score)


def _roulette(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise roulette: for each row of ``weights`` pick an index using one uniform.

    Rows with zero total give ``-1``.
    """
    weights = np.atleast_2d(weights)
    cum = np.cumsum(weights, axis=1)
    total = cum[:, -1]
    pick = np.sum(cum <= (u * total)[:, None], axis=1)
    # guard against u * total rounding up to total
    last = weights.shape[1] - 1 - np.argmax(weights[:, ::-1] > 0, axis=1)
    pick = np.minimum(pick, last)
    return np.where(total > 0, pick, -1)


def select_first_parent(
    pop: Population,
    rng: np.random.Generator,
    variant: SelectionVariant | str = SelectionVariant.LINEAR,
) -> int:
    return int(_roulette(selection_weights(pop, variant=variant), np.array([rng.random()]))[0])


def _mate_weights(pop: Population, graph: PopulationGraph, firsts: np.ndarray, variant) -> np.ndarray:
    score = fitness_transform(pop.fitness)
    w = graph.adjacency[firsts] * score[None, :]
    if SelectionVariant(variant) is SelectionVariant.SQUARED:
        denom = np.sum(w * score[None, :], axis=1, keepdims=True)
        w = np.divide(w, denom, out=np.zeros_like(w), where=denom > 0)
    return w


def select_mates(
    pop: Population,
    graph: PopulationGraph,
    firsts: np.ndarray,
    u: np.ndarray,
    variant: SelectionVariant | str = SelectionVariant.LINEAR,
) -> np.ndarray:
    """Vectorised mate choice for several first parents; ``-1`` where a parent is isolated."""
    return _roulette(_mate_weights(pop, graph, np.asarray(firsts), variant), np.asarray(u))


def select_mate(
    pop: Population,
    graph: PopulationGraph,
    k: int,
    rng: np.random.Generator,
    variant: SelectionVariant | str = SelectionVariant.LINEAR,
) -> int | None:
    """Pick a mate for ``k`` among its neighbours, or ``None`` if ``k`` is isolated."""
    neighbors(graph, k)  # range check
    mate = int(select_mates(pop, graph, np.array([k]), np.array([rng.random()]), variant)[0])
    return None if mate < 0 else mate


def exchange_after(a: np.ndarray, b: np.ndarray, cut) -> tuple[np.ndarray, np.ndarray]:
    """Swap the genes at positions ``>= cut`` between paired rows of ``a`` and ``b``."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    tail = np.arange(a.shape[1])[None, :] >= np.reshape(cut, (-1, 1))
    return np.where(tail, b, a), np.where(tail, a, b)


def crossover_pairs(
    a: np.ndarray, b: np.ndarray, rho: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single-point crossover on paired rows.

    Each pair crosses with probability ``rho`` at a cut drawn uniformly from
    ``{0, ..., d}``; otherwise the children copy the parents. Returns the two
    child arrays and the boolean mask of pairs that crossed.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape:
        raise ValueError(f"parent shapes differ: {a.shape} vs {b.shape}")
    pairs, d = a.shape
    crossed = rng.random(pairs) < rho
    cuts = rng.integers(0, d + 1, size=pairs)
    cuts = np.where(crossed, cuts, d)
    c1, c2 = exchange_after(a, b, cuts)
    return c1, c2, crossed


def crossover(a, b, rho: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"crossover needs two genomes of equal length, got {a.shape} and {b.shape}")
    c1, c2, _ = crossover_pairs(a, b, rho, rng)
    return c1[0], c2[0]


def apply_mutation(x: np.ndarray, mask: np.ndarray, eps: np.ndarray, spec: ObjectiveSpec) -> np.ndarray:
    shifted = np.where(mask, x + eps, x)
    return np.clip(shifted, spec.lower_bound, spec.upper_bound)


def mutate_rows(x: np.ndarray, mu: float, spec: ObjectiveSpec, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    mask = rng.random(x.shape) < mu
    eps = rng.standard_normal(x.shape)
    return apply_mutation(x, mask, eps, spec)


def mutate(x, mu: float, spec: ObjectiveSpec, rng: np.random.Generator) -> np.ndarray:
    """Add N(0, 1) noise to each gene with probability ``mu``, then clamp to the domain."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (spec.dimension,):
        raise ValueError(f"genome must have length {spec.dimension}, got shape {x.shape}")
    return mutate_rows(x[None, :], mu, spec, rng)[0]


def step_generation(
    pop: Population, graph: PopulationGraph, config: GAConfig, rng: np.random.Generator
) -> Population:
    n = pop.size
    if n % 2 or n != graph.n:
        raise ValueError(f"population of {n} does not fit a graph of {graph.n} nodes in pairs")
    events = n // 2
    variant = config.selection_variant

    firsts = _roulette(selection_weights(pop, variant=variant), rng.random(events))
    mates = select_mates(pop, graph, firsts, rng.random(events), variant)
    isolated = mates < 0

    a = pop.individuals[firsts]
    b = pop.individuals[np.where(isolated, firsts, mates)]
    c1, c2, _ = crossover_pairs(a, b, config.rho, rng)
    c1[isolated] = a[isolated]
    c2[isolated] = a[isolated]

    children = np.empty_like(pop.individuals)
    children[0::2] = c1
    children[1::2] = c2
    children = mutate_rows(children, config.mu, config.objective, rng)
    return Population.from_genomes(config.objective, children)


@dataclass
class RunTrace:
    config: GAConfig
    graph: PopulationGraph
    mean_fitness: np.ndarray  # (tau + 1,)
    best_fitness: np.ndarray  # (tau + 1,)
    best_genomes: np.ndarray  # (tau + 1, d)
    final: Population = field(repr=False)

    @property
    def generations(self) -> np.ndarray:
        return np.arange(self.mean_fitness.size)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "mean_fitness", "best_fitness"])
        for t, mean, best in zip(self.generations, self.mean_fitness, self.best_fitness):
            w.writerow([int(t), repr(float(mean)), repr(float(best))])
        return buf.getvalue()


def run(config: GAConfig) -> RunTrace:
    graph = generate(config.topology, seeding.stream(config.seed, seeding.GRAPH))
    pop = init_population(config, seeding.stream(config.seed, seeding.INIT))
    rng = seeding.stream(config.seed, seeding.EVOLUTION)

    means = np.empty(config.tau + 1)
    bests = np.empty(config.tau + 1)
    best_genomes = np.empty((config.tau + 1, config.dimension))
    for t in range(config.tau + 1):
        if t:
            pop = step_generation(pop, graph, config, rng)
        i = int(np.argmin(pop.fitness))
        means[t] = pop.fitness.mean()
        bests[t] = pop.fitness[i]
        best_genomes[t] = pop.individuals[i]
    return RunTrace(config, graph, means, bests, best_genomes, pop)
