"""Networked genetic algorithm: a GA whose mating is restricted to a population network."""

__version__ = "0.1.0"

from .benchmarks import Function, ObjectiveSpec, clamp_to_domain, evaluate
from .engine import GAConfig, Population, RunTrace, SelectionVariant, run
from .netgraph import PopulationGraph, TopologySpec, generate

__all__ = [
    "Function",
    "GAConfig",
    "ObjectiveSpec",
    "Population",
    "PopulationGraph",
    "RunTrace",
    "SelectionVariant",
    "TopologySpec",
    "clamp_to_domain",
    "evaluate",
    "generate",
    "run",
]
