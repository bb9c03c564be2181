"""Nondominance filtering, IGD, hypervolume and run summaries."""

from __future__ import annotations

import numpy as np

MC_SAMPLES = 1_000_000


def dominates(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated_mask(Y) -> np.ndarray:
    """True for rows no other row dominates; repeated rows keep their first copy."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n = Y.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    le = np.all(Y[:, None, :] <= Y[None, :, :], axis=2)
    lt = np.any(Y[:, None, :] < Y[None, :, :], axis=2)
    dominated = np.any(le & lt, axis=0)
    _, first = np.unique(Y, axis=0, return_index=True)
    unique = np.zeros(n, dtype=bool)
    unique[first] = True
    return ~dominated & unique


def nondominated_filter(Y) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return Y[nondominated_mask(Y)]


def igd(front, reference) -> float:
    """Mean distance from each reference point to its nearest front point."""
    front = np.atleast_2d(np.asarray(front, dtype=float))
    reference = np.atleast_2d(np.asarray(reference, dtype=float))
    if front.size == 0 or reference.size == 0:
        raise ValueError("IGD needs nonempty front and reference sets")
    if front.shape[1] != reference.shape[1]:
        raise ValueError("front and reference have different objective counts")
    d = np.sqrt(((reference[:, None, :] - front[None, :, :]) ** 2).sum(axis=2))
    return float(d.min(axis=1).mean())


def default_ref_point(front) -> np.ndarray:
    return np.atleast_2d(np.asarray(front, dtype=float)).max(axis=0)


def _hv2d(P, ref) -> float:
    P = P[np.lexsort((P[:, 1], P[:, 0]))]
    vol, best_f2 = 0.0, ref[1]
    xs = np.append(P[1:, 0], ref[0])
    for (f1, f2), nxt in zip(P, xs):
        best_f2 = min(best_f2, f2)
        vol += (nxt - f1) * (ref[1] - best_f2)
    return vol


def _hv_slice(P, ref) -> float:
    d = P.shape[1]
    if len(P) == 0:
        return 0.0
    if d == 1:
        return float(ref[0] - P[:, 0].min())
    if d == 2:
        return _hv2d(P, ref)
    P = P[np.argsort(P[:, -1], kind="stable")]
    vol = 0.0
    for i in range(len(P)):
        upper = P[i + 1, -1] if i + 1 < len(P) else ref[-1]
        height = upper - P[i, -1]
        if height > 0:
            vol += height * _hv_slice(nondominated_filter(P[: i + 1, :-1]), ref[:-1])
    return vol


def hv_monte_carlo(P, ref, n_samples: int = MC_SAMPLES, seed=0, chunk: int = 50_000):
    """Monte Carlo hypervolume: ``(estimate, standard error)``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    ref = np.asarray(ref, dtype=float)
    lo = P.min(axis=0)
    box = float(np.prod(ref - lo))
    if box == 0.0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        S = lo + rng.random((m, P.shape[1])) * (ref - lo)
        covered = np.zeros(m, dtype=bool)
        for p in P:
            covered |= np.all(S >= p, axis=1)
        hits += int(covered.sum())
        done += m
    frac = hits / n_samples
    return box * frac, box * np.sqrt(frac * (1.0 - frac) / n_samples)


def hypervolume(front, ref_point=None, *, seed=0, n_samples: int = MC_SAMPLES, return_error: bool = False):
    """Volume dominated by ``front`` and bounded by ``ref_point``.

    Exact for up to four objectives, Monte Carlo beyond. Without a
    reference point the componentwise maximum of the front is used, so the
    extreme points contribute no volume. With ``return_error`` a
    ``(value, stderr)`` pair is returned; stderr is 0 for exact values.
    """
    P = nondominated_filter(front)
    if P.size == 0:
        raise ValueError("hypervolume of an empty front")
    ref = default_ref_point(P) if ref_point is None else np.asarray(ref_point, dtype=float)
    if ref.shape != (P.shape[1],):
        raise ValueError(f"reference point has {ref.size} entries, front has {P.shape[1]} objectives")
    if np.any(P > ref):
        raise ValueError("reference point must be weakly dominated by every front point")
    if P.shape[1] <= 4:
        value, err = _hv_slice(P, ref), 0.0
    else:
        value, err = hv_monte_carlo(P, ref, n_samples, seed)
    return (value, err) if return_error else value


def summarize(result, ref_point=None, *, seed=None) -> dict:
    """Summary of a finished run over its feasible, nondominated points.

    Ideal and nadir are the componentwise min/max of that set; the nadir
    doubles as the default hypervolume reference point.
    """
    Y, V = result.Y, result.V
    N = len(Y)
    feasible = V == 0
    n_feas = int(feasible.sum())
    out = {
        "evaluations": int(result.eval_count),
        "iterations": int(result.iterations),
        "population_size": N,
        "feasible_count": n_feas,
        "feasible_pct": 100.0 * n_feas / N if N else 0.0,
    }
    if n_feas == 0:
        out.update(nondominated_count=0, nondominated_pct=0.0, ideal=None, nadir=None,
                   hv=None, hv_stderr=None, ref_point=None)
        return out
    front = nondominated_filter(Y[feasible])
    ref = default_ref_point(front) if ref_point is None else np.asarray(ref_point, dtype=float)
    seed = result.seed if seed is None else seed
    hv, err = hypervolume(front, ref, seed=0 if seed is None else seed, return_error=True)
    out.update(
        nondominated_count=len(front),
        nondominated_pct=100.0 * len(front) / N,
        ideal=front.min(axis=0).tolist(),
        nadir=front.max(axis=0).tolist(),
        hv=float(hv),
        hv_stderr=float(err),
        ref_point=ref.tolist(),
        ref_point_defaulted=ref_point is None,
    )
    return out


def format_summary(s: dict) -> str:
    def vec(v):
        return " ".join(f"{x:.6g}" for x in v) if v is not None else "-"

    lines = [
        "Summary of MOEA/D run",
        "#" + "=" * 36,
        f"Total function evaluations:  {s['evaluations']}",
        f"Total iterations:  {s['iterations']}",
        f"Population size:  {s['population_size']}",
        f"Feasible points found:  {s['feasible_count']} ({s['feasible_pct']:.3g}% of total)",
        f"Nondominated points found:  {s['nondominated_count']} ({s['nondominated_pct']:.3g}% of total)",
        f"Estimated ideal point:  {vec(s['ideal'])}",
        f"Estimated nadir point:  {vec(s['nadir'])}",
        f"Estimated HV:  {s['hv']:.7g}" if s["hv"] is not None else "Estimated HV:  -",
        f"Ref point used for HV:  {vec(s['ref_point'])}",
        "#" + "=" * 36,
    ]
    return "\n".join(lines)
