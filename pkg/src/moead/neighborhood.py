"""Neighborhood tables and variation sampling probabilities."""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np


class Neighborhood(NamedTuple):
    define: Callable  # (W, X, T) -> B
    dynamic: bool  # recompute every iteration


def pairwise_distances(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    diff = P[:, None, :] - P[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def nearest_indices(points, T: int) -> np.ndarray:
    """Indices of the ``T`` nearest rows for every row.

    Each row lists itself first, then the others by increasing distance,
    ties broken by ascending index. Self-first matters once incumbents are
    duplicated: a zero-distance twin must not push a row out of its own
    neighborhood.
    """
    D = pairwise_distances(points)
    N = D.shape[0]
    if not 1 <= T <= N:
        raise ValueError(f"neighborhood size T={T} must lie in [1, {N}]")
    np.fill_diagonal(D, -1.0)
    return np.argsort(D, axis=1, kind="stable")[:, :T]


def assign_neighborhood_by_lambda(W, T: int) -> np.ndarray:
    return nearest_indices(W, T)


def assign_neighborhood_by_x(X, T: int) -> np.ndarray:
    return nearest_indices(X, T)


def sampling_probabilities(B, delta_p: float, N: int | None = None) -> np.ndarray:
    """Row-stochastic matrix: mass ``delta_p`` spread over ``b_i``, the rest outside."""
    B = np.asarray(B)
    n_rows, T = B.shape
    N = n_rows if N is None else N
    if not 0.0 <= delta_p <= 1.0:
        raise ValueError(f"delta_p must lie in [0, 1], got {delta_p}")
    if delta_p < 1.0 and T >= N:
        raise ValueError("delta_p < 1 needs T < N (no subproblems outside the neighborhood)")
    outside = (1.0 - delta_p) / (N - T) if T < N else 0.0
    P = np.full((n_rows, N), outside)
    np.put_along_axis(P, B, delta_p / T, axis=1)
    return P


BUILTIN = {
    "lambda": Neighborhood(lambda W, X, T: assign_neighborhood_by_lambda(W, T), dynamic=False),
    "x": Neighborhood(lambda W, X, T: assign_neighborhood_by_x(X, T), dynamic=True),
}
