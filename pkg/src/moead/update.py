"""Update strategies: which candidates become next iteration's incumbents.

Every strategy is candidate-centric: candidate ``x'_k`` competes for the
subproblems in its replacement set ``R_k`` (its own neighborhood ``b_k``
for standard/restricted, the ``T_r`` subproblems around its best-fitting
subproblem for the best-subproblem strategy). Subproblem ``i`` then picks
from ``C_i = {x_i} U {x'_k : i in R_k}``. Since ``|R_k| = T`` a candidate can
claim at most ``T`` slots, which is what makes the restricted update with
``n_r >= T`` coincide with the standard one.

Strategies return ``choice``: ``-1`` keeps the incumbent, ``k >= 0`` takes
candidate ``k``.
"""

from __future__ import annotations

import numpy as np

from moead.constraints import score_none
from moead.neighborhood import nearest_indices


def eligibility(R, N_sub: int) -> np.ndarray:
    """``E[i, k]`` is true when subproblem ``i`` is in candidate ``k``'s set ``R[k]``."""
    R = np.asarray(R)
    n_cand = R.shape[0]
    E = np.zeros((N_sub, n_cand), dtype=bool)
    E[R, np.arange(n_cand)[:, None]] = True
    return E


def allocate(s_inc, s_cand, n_r: int | None = None) -> np.ndarray:
    """Assign candidates to subproblems, each candidate used at most ``n_r`` times.

    Without a cap every subproblem takes its best candidate if strictly
    better than the incumbent (lowest candidate index on ties). With a cap
    the slots go greedily to the largest score improvements, ties by
    subproblem then candidate index; a subproblem whose favorite is used
    up falls back to its next strictly improving candidate.
    """
    s_inc = np.asarray(s_inc, dtype=float)
    s_cand = np.asarray(s_cand, dtype=float)
    N_sub = len(s_inc)
    if n_r is None:
        best = np.argmin(s_cand, axis=1)
        better = s_cand[np.arange(N_sub), best] < s_inc
        return np.where(better, best, -1)
    if n_r < 1:
        raise ValueError("n_r must be a positive integer")
    gain = s_inc[:, None] - s_cand
    ii, kk = np.nonzero(gain > 0)
    order = np.lexsort((kk, ii, -gain[ii, kk]))
    choice = np.full(N_sub, -1)
    used = np.zeros(s_cand.shape[1], dtype=int)
    for i, k in zip(ii[order], kk[order]):
        if choice[i] < 0 and used[k] < n_r:
            choice[i] = k
            used[k] += 1
    return choice


def _scores(score, F, f_inc, E):
    if score is None:
        return score_none(F, f_inc, None, None, E)
    return score(E)


def update_standard(F, f_inc, B, score=None) -> np.ndarray:
    """Each subproblem keeps the best of its incumbent and the candidates reaching it.

    ``score(E)`` maps an eligibility mask to ``(s_inc, s_cand)``; by default
    the raw aggregation values are used.
    """
    E = eligibility(B, len(f_inc))
    return allocate(*_scores(score, F, f_inc, E))


def update_restricted(F, f_inc, B, score=None, n_r: int = 2) -> np.ndarray:
    E = eligibility(B, len(f_inc))
    return allocate(*_scores(score, F, f_inc, E), n_r=n_r)


def best_subproblems(F) -> np.ndarray:
    """Subproblem on which each candidate has its lowest aggregation value."""
    return np.argmin(np.asarray(F), axis=0)


def replacement_sets(F, W, T_r: int) -> np.ndarray:
    k = best_subproblems(F)
    nbrs = nearest_indices(W, T_r)
    return nbrs[k]


def update_best(F, f_inc, B, W, score=None, n_r: int = 2, T_r: int = 20) -> np.ndarray:
    """Best-subproblem replacement.

    Candidate ``k`` is matched to the subproblem where it scores best, and
    competes for the ``T_r`` subproblems nearest to that one (by weight
    distance) under the restricted rule.
    """
    N = len(f_inc)
    if not 1 <= T_r <= N:
        raise ValueError(f"T_r={T_r} must lie in [1, {N}]")
    E = eligibility(replacement_sets(F, W, T_r), N)
    return allocate(*_scores(score, F, f_inc, E), n_r=n_r)


def _standard(F, f_inc, B, W, score=None):
    return update_standard(F, f_inc, B, score)


def _restricted(F, f_inc, B, W, score=None, n_r=2):
    return update_restricted(F, f_inc, B, score, n_r)


def _best(F, f_inc, B, W, score=None, n_r=2, T_r=20):
    return update_best(F, f_inc, B, W, score, n_r, T_r)


BUILTIN = {"standard": _standard, "restricted": _restricted, "best": _best}


class Archive:
    """Best feasible point seen per subproblem."""

    def __init__(self, N: int, n_v: int, n_f: int):
        self.X = np.full((N, n_v), np.nan)
        self.Y = np.full((N, n_f), np.nan)
        self.filled = np.zeros(N, dtype=bool)
        self.utility = np.full(N, np.inf)

    def __len__(self) -> int:
        return int(self.filled.sum())


def archive_update(archive: Archive, X, Y, V, U) -> Archive:
    """Offer points ``X`` (objectives ``Y``, violations ``V``) to every slot.

    ``U[i, m]`` is the aggregation value of point ``m`` on subproblem ``i``.
    ``archive.utility`` must be current (the caller rescores stored points
    whenever the reference point moves). Only strict improvements replace.
    """
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    feasible = np.asarray(V) == 0
    if not feasible.any():
        return archive
    U = np.where(feasible[None, :], np.asarray(U, dtype=float), np.inf)
    m = np.argmin(U, axis=1)
    best = U[np.arange(U.shape[0]), m]
    take = best < archive.utility
    archive.X[take] = X[m[take]]
    archive.Y[take] = Y[m[take]]
    archive.utility[take] = best[take]
    archive.filled |= take
    return archive
