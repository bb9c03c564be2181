"""Constraint violation, penalty and violation-based ranking (VBR).

A constraint handler turns raw aggregation values into selection scores
for the update step. It receives

    F       (N_sub, N_cand) aggregation value of candidate k on subproblem i
    f_inc   (N_sub,) aggregation value of each incumbent on its subproblem
    v_cand, v_inc  total violations
    E       (N_sub, N_cand) bool, candidate k competes for subproblem i

and returns ``(s_inc, s_cand)`` where lower is better. Ineligible entries
of ``s_cand`` are ``+inf``.
"""

from __future__ import annotations

import numpy as np


def compute_violations(X_orig, constraint_fn=None, eq_tolerance: float = 0.0) -> np.ndarray:
    """Total violation ``sum max(g, 0) + sum max(|h| - eps, 0)`` per row."""
    X_orig = np.atleast_2d(np.asarray(X_orig, dtype=float))
    n = X_orig.shape[0]
    if constraint_fn is None or n == 0:
        return np.zeros(n)
    out = constraint_fn(X_orig)
    g, h = out if isinstance(out, tuple) else (out, None)
    v = np.zeros(n)
    for part, equality in ((g, False), (h, True)):
        if part is None:
            continue
        part = np.asarray(part, dtype=float).reshape(n, -1)
        if not np.all(np.isfinite(part)):
            raise ValueError("non-finite constraint values")
        if equality:
            part = np.abs(part) - eq_tolerance
        v += np.maximum(part, 0.0).sum(axis=1)
    return v


def penalized_aggregation(f_agg, v, beta_v: float):
    if beta_v <= 0:
        raise ValueError("beta_v must be positive")
    return np.asarray(f_agg, dtype=float) + beta_v * np.asarray(v, dtype=float)


def vt_threshold(v) -> float:
    """Violation threshold over one candidate set: ``fs / n**2 * sum(v)``."""
    v = np.asarray(v, dtype=float)
    n = len(v)
    fs = np.count_nonzero(v == 0)
    return fs / n**2 * v.sum()


def vbr_rank(f_agg, v, variant: str = "ts", *, rng=None, p_f: float = 0.4, eps_v: float | None = None) -> np.ndarray:
    """Ranks (1 = best) for one candidate set.

    Points that are feasible, or whose secondary criterion ``c(x)`` holds,
    are ranked first by aggregation value; the rest follow by violation.
    ``c(x)`` is always false for ``ts``, ``u < p_f`` for ``sr`` (one draw
    per point, in input order) and ``v <= eps_v`` for ``vt``. Ties keep
    input order.
    """
    f_agg = np.asarray(f_agg, dtype=float)
    v = np.asarray(v, dtype=float)
    n = len(f_agg)
    if variant == "ts":
        passes = np.zeros(n, dtype=bool)
    elif variant == "sr":
        if rng is None:
            raise ValueError("stochastic ranking needs a random generator")
        passes = rng.random(n) < p_f
    elif variant == "vt":
        thr = vt_threshold(v) if eps_v is None else eps_v
        passes = v <= thr
    else:
        raise ValueError(f"unknown VBR variant {variant!r}; expected ts, sr or vt")
    first = (v == 0) | passes
    idx = np.arange(n)
    head = idx[first][np.argsort(f_agg[first], kind="stable")]
    tail = idx[~first][np.argsort(v[~first], kind="stable")]
    ranks = np.empty(n, dtype=float)
    ranks[np.concatenate([head, tail])] = np.arange(1, n + 1)
    return ranks


# --------------------------------------------------------------- handlers

def _masked(F, E):
    return np.where(E, F, np.inf)


def score_none(F, f_inc, v_cand, v_inc, E, rng=None):
    return np.asarray(f_inc, dtype=float), _masked(F, E)


def score_penalty(F, f_inc, v_cand, v_inc, E, rng=None, beta_v: float = 1.0):
    s_inc = penalized_aggregation(f_inc, v_inc, beta_v)
    s_cand = penalized_aggregation(F, np.broadcast_to(v_cand, F.shape), beta_v)
    return s_inc, _masked(s_cand, E)


def score_vbr(F, f_inc, v_cand, v_inc, E, rng=None, type: str = "ts", p_f: float = 0.4):
    """VBR ranks computed independently inside each subproblem's candidate set.

    The set for subproblem ``i`` is its incumbent followed by the eligible
    candidates in ascending index order. For ``vt`` the threshold is taken
    over that same set. Draw order (``sr``): subproblem by subproblem.
    """
    N_sub, _ = F.shape
    s_inc = np.empty(N_sub)
    s_cand = np.full(F.shape, np.inf)
    v_cand = np.asarray(v_cand, dtype=float)
    for i in range(N_sub):
        ks = np.flatnonzero(E[i])
        f = np.concatenate([[f_inc[i]], F[i, ks]])
        v = np.concatenate([[v_inc[i]], v_cand[ks]])
        r = vbr_rank(f, v, type, rng=rng, p_f=p_f)
        s_inc[i] = r[0]
        s_cand[i, ks] = r[1:]
    return s_inc, s_cand


BUILTIN = {"none": score_none, "penalty": score_penalty, "vbr": score_vbr}
