"""Weight matrix generators: simplex lattice, multi-layer lattice, uniform design."""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence

import numpy as np

MAX_WEIGHTS = 1_000_000
MAX_UD_CANDIDATES = 2_000_000
# symmetric generators have mathematically equal CD2; differences below this
# relative size are summation noise and count as ties
CD2_TIE_RTOL = 1e-10


def _compositions(h: int, n_f: int):
    # all (c_1..c_nf) >= 0 with sum h, ascending lexicographic order
    if n_f == 1:
        yield (h,)
        return
    for first in range(h + 1):
        for rest in _compositions(h - first, n_f - 1):
            yield (first, *rest)


def decompose_sld(h: int, n_f: int, *, max_rows: int = MAX_WEIGHTS) -> np.ndarray:
    """Simplex-lattice design.

    Rows are every vector with entries in ``{0, 1/h, ..., 1}`` summing to one,
    in ascending lexicographic order. ``N = C(h + n_f - 1, n_f - 1)``.
    """
    if h < 1 or int(h) != h:
        raise ValueError(f"h must be a positive integer, got {h!r}")
    if n_f < 2:
        raise ValueError(f"n_f must be >= 2, got {n_f!r}")
    h = int(h)
    n = math.comb(h + n_f - 1, n_f - 1)
    if n > max_rows:
        raise ValueError(
            f"SLD with h={h}, n_f={n_f} yields {n} weight vectors (cap {max_rows}); "
            "use a smaller h or the multi-layer design (msld)"
        )
    W = np.array(list(_compositions(h, n_f)), dtype=float) / h
    return W


def decompose_msld(
    h: Sequence[int],
    n_f: int,
    tau: Sequence[float] | None = None,
    *,
    max_rows: int = MAX_WEIGHTS,
) -> np.ndarray:
    """Multiple-layer simplex-lattice design.

    Layer ``k`` is ``decompose_sld(h[k])`` contracted towards the simplex
    centroid by ``tau[k]``. When ``tau`` is omitted the ``k/K`` heuristic is
    used. Rows repeated across layers (the centroid, typically) are kept once.
    """
    h = list(np.atleast_1d(h).astype(int))
    K = len(h)
    if K == 0:
        raise ValueError("h must hold at least one layer")
    if tau is None:
        tau = [(k + 1) / K for k in range(K)]
    tau = [float(t) for t in np.atleast_1d(tau)]
    if len(tau) != K:
        raise ValueError(f"h and tau must have the same length ({K} != {len(tau)})")
    if any(not 0.0 < t <= 1.0 for t in tau):
        raise ValueError(f"tau values must lie in (0, 1], got {tau}")
    if len(set(tau)) != K:
        raise ValueError(f"tau values must be pairwise distinct, got {tau}")

    layers = [msld_layer(decompose_sld(hk, n_f, max_rows=max_rows), tk) for hk, tk in zip(h, tau)]
    W = np.vstack(layers)
    if W.shape[0] > max_rows:
        raise ValueError(f"MSLD yields {W.shape[0]} weight vectors (cap {max_rows})")
    return _drop_duplicate_rows(W)


def msld_layer(W: np.ndarray, tau: float) -> np.ndarray:
    n_f = W.shape[1]
    return tau * W + (1.0 - tau) / n_f


def _drop_duplicate_rows(W: np.ndarray, decimals: int = 12) -> np.ndarray:
    _, first = np.unique(np.round(W, decimals), axis=0, return_index=True)
    return W[np.sort(first)]


def coprimes(N: int) -> list[int]:
    """The set ``{h < N : gcd(h, N) = 1}`` in ascending order."""
    return [h for h in range(1, N) if math.gcd(h, N) == 1]


def cd2_discrepancy(U: np.ndarray) -> float:
    """Centered L2-discrepancy of a point set in the open unit cube.

    ``U`` is an ``(N, d)`` matrix with entries in ``(0, 1)``.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[None, :]
    if U.size == 0:
        raise ValueError("CD2 of an empty matrix is undefined")
    N, d = U.shape
    a = np.abs(U - 0.5)
    term1 = (13.0 / 12.0) ** d
    term2 = 2.0 / N * np.sum(np.prod(1.0 + (a - a**2) / 2.0, axis=1))
    pair = 1.0 + (a[:, None, :] + a[None, :, :]) / 2.0 - np.abs(U[:, None, :] - U[None, :, :]) / 2.0
    term3 = np.sum(np.prod(pair, axis=2)) / N**2
    return float(term1 - term2 + term3)


def glp_matrix(N: int, hvec: Sequence[int]) -> np.ndarray:
    """Good-lattice-point matrix ``u_ij = i*h_j mod N`` with values in ``1..N``."""
    i = np.arange(1, N + 1)[:, None]
    return (i * np.asarray(hvec)[None, :] - 1) % N + 1


def ud_candidates(N: int, n_f: int):
    """Ordered ``(n_f - 1)``-tuples of distinct coprimes of ``N``, enumeration order."""
    return itertools.permutations(coprimes(N), n_f - 1)


def select_ud_generator(N: int, n_f: int, *, max_candidates: int = MAX_UD_CANDIDATES) -> tuple[int, ...]:
    H = coprimes(N)
    d = n_f - 1
    if len(H) < d:
        raise ValueError(f"N={N} has only {len(H)} coprimes, need at least n_f-1={d}")
    count = math.perm(len(H), d)
    if count > max_candidates:
        raise ValueError(
            f"uniform design for N={N}, n_f={n_f} needs {count} CD2 evaluations "
            f"(cap {max_candidates}); lower N or use SLD"
        )
    best, best_val = None, math.inf
    for hvec in ud_candidates(N, n_f):
        val = cd2_discrepancy((glp_matrix(N, hvec) - 0.5) / N)
        if best is None or val < best_val - CD2_TIE_RTOL * abs(best_val):  # first candidate wins ties
            best, best_val = hvec, val
    return best


def ud_transform(Ubar: np.ndarray) -> np.ndarray:
    """Map points of the open unit cube (``n_f - 1`` columns) onto the simplex."""
    N, d = Ubar.shape
    n_f = d + 1
    expo = 1.0 / (n_f - np.arange(1, n_f))  # 1/(n_f - j), j = 1..n_f-1
    R = Ubar**expo
    W = np.empty((N, n_f))
    cum = np.ones(N)
    for j in range(d):
        W[:, j] = (1.0 - R[:, j]) * cum
        cum = cum * R[:, j]
    W[:, d] = cum
    return W


def decompose_uniform(N: int, n_f: int, *, max_candidates: int = MAX_UD_CANDIDATES) -> np.ndarray:
    """Uniform design: the lowest-CD2 good-lattice-point set, mapped to the simplex."""
    if N < 2 or int(N) != N:
        raise ValueError(f"N must be an integer >= 2, got {N!r}")
    if n_f < 2:
        raise ValueError(f"n_f must be >= 2, got {n_f!r}")
    N = int(N)
    hvec = select_ud_generator(N, n_f, max_candidates=max_candidates)
    Ubar = (glp_matrix(N, hvec) - 0.5) / N
    return ud_transform(Ubar)
