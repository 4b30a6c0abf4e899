"""Rastrigin, Sphere and Ackley test functions and their search domains.

All three have their global minimum ``f(0) = 0``. Functions operate on the
last axis, so a ``(d,)`` genome yields a float and an ``(n, d)`` population
yields an ``(n,)`` array.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = math.tau


class Function(str, enum.Enum):
    RASTRIGIN = "rastrigin"
    SPHERE = "sphere"
    ACKLEY = "ackley"

    @classmethod
    def parse(cls, value: "str | Function") -> "Function":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(f.value for f in cls)
            raise ValueError(f"unknown function {value!r} (expected one of {names})") from None


DEFAULT_BOUNDS: dict[Function, float] = {
    Function.RASTRIGIN: 5.12,
    Function.SPHERE: 5.12,
    Function.ACKLEY: 32.768,
}


class DimensionError(ValueError):
    """Raised when a genome's length does not match the objective dimension."""


@dataclass(frozen=True)
class ObjectiveSpec:
    function: Function
    dimension: int = 2
    lower_bound: float | None = None
    upper_bound: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "function", Function.parse(self.function))
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        half = DEFAULT_BOUNDS[self.function]
        if self.lower_bound is None:
            object.__setattr__(self, "lower_bound", -half)
        if self.upper_bound is None:
            object.__setattr__(self, "upper_bound", half)
        if not self.lower_bound < self.upper_bound:
            raise ValueError(
                f"lower_bound must be below upper_bound ({self.lower_bound} >= {self.upper_bound})"
            )

    @property
    def bounds(self) -> tuple[float, float]:
        return self.lower_bound, self.upper_bound  # type: ignore[return-value]


def _check_shape(spec: ObjectiveSpec, x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] != spec.dimension:
        raise DimensionError(
            f"{spec.function.value} expects genomes of length {spec.dimension}, got shape {arr.shape}"
        )
    return arr


def rastrigin(x: np.ndarray) -> np.ndarray:
    d = x.shape[-1]
    return 10.0 * d + np.sum(x * x - 10.0 * np.cos(TWO_PI * x), axis=-1)


def sphere(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=-1)


def ackley(x: np.ndarray) -> np.ndarray:
    d = x.shape[-1]
    r = np.sqrt(np.sum(x * x, axis=-1) / d)
    c = np.sum(np.cos(TWO_PI * x), axis=-1) / d
    return -20.0 * np.exp(-0.2 * r) - np.exp(c) + math.e + 20.0


_FUNCTIONS = {
    Function.RASTRIGIN: rastrigin,
    Function.SPHERE: sphere,
    Function.ACKLEY: ackley,
}


def evaluate(spec: ObjectiveSpec, x):
    """Evaluate the objective on one genome or a stack of genomes.

    Out-of-domain points are evaluated as-is; keeping genomes inside the
    domain is the engine's job.

    Raises:
        DimensionError: if the last axis of ``x`` is not ``spec.dimension``.
    """
    arr = _check_shape(spec, x)
    out = _FUNCTIONS[spec.function](arr)
    if arr.ndim == 1:
        return float(out)
    return out


def clamp_to_domain(spec: ObjectiveSpec, x) -> np.ndarray:
    arr = _check_shape(spec, x)
    return np.clip(arr, spec.lower_bound, spec.upper_bound)
