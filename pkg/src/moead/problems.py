"""Problem definitions, batch evaluation and the benchmark suite."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from moead.constraints import compute_violations


class NonFiniteObjectiveError(ValueError):
    def __init__(self, rows, message=None):
        self.rows = np.atleast_1d(rows)
        super().__init__(message or f"non-finite objective values in rows {self.rows.tolist()}")


@dataclass
class ProblemDefinition:
    """A multiobjective problem in its original variable space.

    ``objective_fn`` maps an ``(N, n_v)`` matrix to ``(N, n_f)``.
    ``constraint_fn``, when given, maps the same matrix to ``g`` or to a
    ``(g, h)`` pair of inequality (``g <= 0``) and equality (``h = 0``)
    values; ``eq_tolerance`` relaxes the equalities.
    """

    name: str
    n_v: int
    n_f: int
    xmin: np.ndarray
    xmax: np.ndarray
    objective_fn: Callable
    constraint_fn: Callable | None = None
    eq_tolerance: float = 0.0
    front: Callable | None = None  # n_points -> (M, n_f) samples of the true front

    def __post_init__(self):
        self.xmin = np.broadcast_to(np.asarray(self.xmin, dtype=float), (self.n_v,)).copy()
        self.xmax = np.broadcast_to(np.asarray(self.xmax, dtype=float), (self.n_v,)).copy()
        if self.n_v < 1:
            raise ValueError("n_v must be positive")
        if self.n_f < 2:
            raise ValueError("n_f must be at least 2")
        if not np.all(self.xmin < self.xmax):
            raise ValueError("xmin must be strictly below xmax in every coordinate")
        if self.eq_tolerance < 0:
            raise ValueError("eq_tolerance must be nonnegative")

    def decode(self, X_unit) -> np.ndarray:
        return self.xmin + np.asarray(X_unit, dtype=float) * (self.xmax - self.xmin)

    def encode(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.xmin) / (self.xmax - self.xmin)


def evaluate_batch(problem: ProblemDefinition, X_unit):
    """Decode unit-cube rows, evaluate them in one call, return ``(Y, V)``."""
    X_unit = np.asarray(X_unit, dtype=float).reshape(-1, problem.n_v)
    n = X_unit.shape[0]
    if n == 0:
        return np.empty((0, problem.n_f)), np.empty(0)
    X = problem.decode(X_unit)
    Y = np.asarray(problem.objective_fn(X), dtype=float)
    if Y.shape != (n, problem.n_f):
        raise ValueError(f"objective_fn of {problem.name!r} returned shape {Y.shape}, expected {(n, problem.n_f)}")
    bad = ~np.all(np.isfinite(Y), axis=1)
    if bad.any():
        raise NonFiniteObjectiveError(np.flatnonzero(bad))
    V = compute_violations(X, problem.constraint_fn, problem.eq_tolerance)
    return Y, V


class BatchEvaluator:
    """``evaluate_batch`` with a running evaluation counter."""

    def __init__(self, problem: ProblemDefinition):
        self.problem = problem
        self.count = 0

    def __call__(self, X_unit):
        Y, V = evaluate_batch(self.problem, X_unit)
        self.count += len(Y)
        return Y, V


# ------------------------------------------------------------- benchmarks

def sphere_rastrigin(X) -> np.ndarray:
    """Shifted sphere and shifted Rastrigin, shifts of ``0.1*i`` per coordinate."""
    X = np.atleast_2d(X)
    shift = 0.1 * np.arange(1, X.shape[1] + 1)
    s = X + shift
    r = X - shift
    sphere = np.sum(s**2, axis=1)
    rastrigin = np.sum(r**2 - 10.0 * np.cos(2.0 * np.pi * r) + 10.0, axis=1)
    return np.column_stack([sphere, rastrigin])


def zdt1(X) -> np.ndarray:
    X = np.atleast_2d(X)
    f1 = X[:, 0]
    g = 1.0 + 9.0 * X[:, 1:].sum(axis=1) / (X.shape[1] - 1)
    f2 = g * (1.0 - np.sqrt(f1 / g))
    return np.column_stack([f1, f2])


def dtlz2(X, n_f: int) -> np.ndarray:
    X = np.atleast_2d(X)
    g = np.sum((X[:, n_f - 1:] - 0.5) ** 2, axis=1)
    angles = X[:, : n_f - 1] * np.pi / 2.0
    cos, sin = np.cos(angles), np.sin(angles)
    F = np.empty((X.shape[0], n_f))
    for m in range(n_f):
        # m = 0 is the all-cosine objective
        f = np.prod(cos[:, : n_f - 1 - m], axis=1)
        if m > 0:
            f = f * sin[:, n_f - 1 - m]
        F[:, m] = (1.0 + g) * f
    return F


def zdt1_front(n_points: int = 1000) -> np.ndarray:
    f1 = np.linspace(0.0, 1.0, n_points)
    return np.column_stack([f1, 1.0 - np.sqrt(f1)])


def dtlz2_front(n_f: int, n_points: int = 1000) -> np.ndarray:
    """Points of the unit-sphere front from lattice directions.

    The lattice resolution is the largest ``h`` whose point count does
    not exceed ``n_points``.
    """
    from moead.decomposition import decompose_sld

    h = 1
    while math.comb(h + n_f, n_f - 1) <= n_points:
        h += 1
    D = decompose_sld(h, n_f)
    return D / np.linalg.norm(D, axis=1, keepdims=True)


def make_problem(name: str, n_v: int | None = None, n_f: int | None = None) -> ProblemDefinition:
    """Built-in benchmark by name: ``sphere-rastrigin``, ``zdt1`` or ``dtlz2``."""
    if name == "sphere-rastrigin":
        n_v = 30 if n_v is None else n_v
        if n_f not in (None, 2):
            raise ValueError("sphere-rastrigin has exactly 2 objectives")
        return ProblemDefinition(name, n_v, 2, -np.ones(n_v), np.ones(n_v), sphere_rastrigin)
    if name == "zdt1":
        n_v = 30 if n_v is None else n_v
        if n_f not in (None, 2):
            raise ValueError("zdt1 has exactly 2 objectives")
        if n_v < 2:
            raise ValueError("zdt1 needs n_v >= 2")
        return ProblemDefinition(name, n_v, 2, np.zeros(n_v), np.ones(n_v), zdt1, front=zdt1_front)
    if name == "dtlz2":
        n_f = 3 if n_f is None else n_f
        n_v = n_f + 9 if n_v is None else n_v
        if n_f < 2 or n_f > n_v:
            raise ValueError(f"dtlz2 needs 2 <= n_f <= n_v, got n_f={n_f}, n_v={n_v}")
        return ProblemDefinition(
            name, n_v, n_f, np.zeros(n_v), np.ones(n_v),
            lambda X: dtlz2(X, n_f), front=lambda n=1000: dtlz2_front(n_f, n),
        )
    raise ValueError(f"unknown problem {name!r}; expected sphere-rastrigin, zdt1 or dtlz2")


BUILTIN = {
    "sphere-rastrigin": lambda n_v=None, n_f=None: make_problem("sphere-rastrigin", n_v, n_f),
    "zdt1": lambda n_v=None, n_f=None: make_problem("zdt1", n_v, n_f),
    "dtlz2": lambda n_v=None, n_f=None: make_problem("dtlz2", n_v, n_f),
}
