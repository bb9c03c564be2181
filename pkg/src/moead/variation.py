"""Variation stack and operators.

Operators work in the unit hypercube. Random draws inside an operator are
taken in a fixed order (documented per operator) so a run is reproducible
from its seed regardless of which components surround it.

Probability gates use strict ``u < p`` so that ``p = 0`` never fires and
``p = 1`` always fires.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

REPAIR_OPERATORS = frozenset({"truncate"})


@dataclass
class VariationContext:
    """Read-only view of the run handed to every variation operator.

    ``X``/``Y``/``V`` are the incumbents at the start of the iteration.
    ``utility(sub, Y, V)`` scores objective rows ``Y`` on subproblems
    ``sub`` with the run's current scalarization, scaling and penalty.
    ``evaluate(X_unit)`` costs real evaluations and returns ``(Y, V)``.
    """

    X: np.ndarray
    Y: np.ndarray
    V: np.ndarray
    W: np.ndarray
    B: np.ndarray
    P: np.ndarray
    rng: np.random.Generator
    t: int = 0
    utility: Callable | None = None
    evaluate: Callable | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.X.shape[0]

    def incumbent_utilities(self) -> np.ndarray:
        return self.utility(np.arange(self.N), self.Y, self.V)


def sample_indices(P, k: int, rng: np.random.Generator, *, allow_repeats: bool = True) -> np.ndarray:
    """Draw ``k`` mutually exclusive indices per row of ``P``.

    Rows with fewer than ``k`` nonzero entries fall back to sampling with
    replacement when ``allow_repeats``; otherwise they raise.
    """
    P = np.asarray(P)
    n_rows, N = P.shape
    out = np.empty((n_rows, k), dtype=int)
    for i in range(n_rows):
        p = P[i]
        if np.count_nonzero(p) >= k:
            out[i] = rng.choice(N, size=k, replace=False, p=p)
        elif allow_repeats:
            out[i] = rng.choice(N, size=k, replace=True, p=p)
        else:
            raise ValueError(f"row {i} can reach fewer than {k} distinct indices")
    return out


# ---------------------------------------------------------------- SBX

def sbx_beta(u, eta_x: float):
    u = np.asarray(u, dtype=float)
    e = 1.0 / (eta_x + 1.0)
    low = u <= 0.5
    return np.where(low, (2.0 * np.where(low, u, 0.5)) ** e,
                    (1.0 / (2.0 * (1.0 - np.where(low, 0.5, u)))) ** e)


def sbx(Xp, P, eta_x: float = 20.0, p_x: float = 1.0, *, rng: np.random.Generator) -> np.ndarray:
    """Simulated binary crossover, one child per subproblem.

    Draw order: parent pairs row by row, then ``u`` (N x n_v), then the
    per-row gate.
    """
    if eta_x <= 0:
        raise ValueError("eta_x must be positive")
    Xp = np.asarray(Xp, dtype=float)
    N, n_v = Xp.shape
    parents = sample_indices(P, 2, rng)
    beta = sbx_beta(rng.random((N, n_v)), eta_x)
    xa, xb = Xp[parents[:, 0]], Xp[parents[:, 1]]
    child = ((1.0 + beta) * xa + (1.0 - beta) * xb) / 2.0
    gate = rng.random(N) < p_x
    return np.where(gate[:, None], child, Xp)


# ---------------------------------------------------- polynomial mutation

def polymut_beta(u, x, eta_m: float):
    u = np.asarray(u, dtype=float)
    # out-of-box inputs (e.g. after differential mutation) use the nearest bound,
    # which keeps fractional powers of negative numbers out of the formula
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    e = eta_m + 1.0
    low = np.maximum(2.0 * u + (1.0 - 2.0 * u) * (1.0 - x) ** e, 0.0) ** (1.0 / e) - 1.0
    high = 1.0 - np.maximum(2.0 * (1.0 - u) + (2.0 * u - 1.0) * x**e, 0.0) ** (1.0 / e)
    return np.where(u <= 0.5, low, high)


def polynomial_mutation(Xp, eta_m: float = 20.0, p_m: float | None = None, *, rng: np.random.Generator):
    """Bounded polynomial mutation; ``p_m`` defaults to ``1/n_v``.

    Draw order: ``u`` (N x n_v), then the Bernoulli mask (N x n_v).
    """
    if eta_m <= 0:
        raise ValueError("eta_m must be positive")
    Xp = np.asarray(Xp, dtype=float)
    N, n_v = Xp.shape
    if p_m is None:
        p_m = 1.0 / n_v
    beta = polymut_beta(rng.random((N, n_v)), Xp, eta_m)
    mask = rng.random((N, n_v)) < p_m
    return Xp + mask * beta


# -------------------------------------------------- differential mutation

def wgi_weights(T: int) -> np.ndarray:
    w = np.log(T + 0.5) - np.log(np.arange(1, T + 1))
    return w / w.sum()


def differential_mutation(
    Xp,
    P,
    B=None,
    utilities=None,
    *,
    rng: np.random.Generator,
    phi: float | None = None,
    basis: str = "rand",
) -> np.ndarray:
    """``x_basis + phi * (x_a - x_b)`` for every subproblem.

    ``phi=None`` samples ``phi ~ U(0, 1]`` independently per subproblem.
    ``basis`` is ``rand`` (a third exclusive sample), ``mean`` (neighborhood
    mean) or ``wgi`` (log-weighted neighborhood point). For the last two
    ``utilities[i, k]`` is the aggregation value of neighbor ``B[i, k]`` on
    subproblem ``i``; neighbors are ranked best first.

    Draw order: index samples row by row, then ``phi`` (if random).
    """
    Xp = np.asarray(Xp, dtype=float)
    N = Xp.shape[0]
    if basis == "rand":
        if N < 3:
            raise ValueError("rand basis needs at least 3 subproblems")
        idx = sample_indices(P, 3, rng, allow_repeats=False)
        base = Xp[idx[:, 0]]
        a, b = idx[:, 1], idx[:, 2]
    elif basis in ("mean", "wgi"):
        if B is None or utilities is None:
            raise ValueError(f"{basis} basis needs the neighborhood table and utilities")
        B = np.asarray(B)
        order = np.argsort(np.asarray(utilities), axis=1, kind="stable")
        ranked = np.take_along_axis(B, order, axis=1)
        T = B.shape[1]
        w = np.full(T, 1.0 / T) if basis == "mean" else wgi_weights(T)
        base = np.einsum("k,ikj->ij", w, Xp[ranked])
        idx = sample_indices(P, 2, rng, allow_repeats=False)
        a, b = idx[:, 0], idx[:, 1]
    else:
        raise ValueError(f"unknown basis {basis!r}; expected rand, mean or wgi")
    if phi is None:
        phi_vec = 1.0 - rng.random(N)  # (0, 1]
    else:
        # phi = 0 is accepted and yields the basis point itself
        phi_vec = np.full(N, float(phi))
    return base + phi_vec[:, None] * (Xp[a] - Xp[b])


# ------------------------------------------------- binomial recombination

def binomial_recombination(Xp, X, rho: float = 0.9, *, rng: np.random.Generator) -> np.ndarray:
    """Coordinate-wise mix of candidates ``Xp`` with the untouched incumbents ``X``.

    A row that ends up identical to its incumbent takes coordinate ``k_i``
    from ``Xp``. Draw order: ``u`` (N x n_v), then ``k`` (N).
    """
    Xp = np.asarray(Xp, dtype=float)
    X = np.asarray(X, dtype=float)
    N, n_v = Xp.shape
    u = rng.random((N, n_v))
    k = rng.integers(0, n_v, size=N)
    out = np.where(u < rho, Xp, X)
    same = np.all(out == X, axis=1)
    rows = np.flatnonzero(same)
    out[rows, k[rows]] = Xp[rows, k[rows]]
    return out


# ------------------------------------------------------------- repair

def truncate(Xp) -> np.ndarray:
    return np.clip(Xp, 0.0, 1.0)


# ----------------------------------------------------- gaussian mutation

def gaussian_mutation(Xp, mean: float = 0.0, sd: float = 0.1, p: float = 0.1, *, rng: np.random.Generator):
    """Add ``N(mean, sd)`` noise to each entry with probability ``p``.

    Shipped as the worked example of a user-registered operator; it is not
    part of the built-in registry.
    """
    if sd < 0:
        raise ValueError("sd must be nonnegative")
    Xp = np.asarray(Xp, dtype=float)
    R = rng.normal(mean, sd, size=Xp.shape)
    R = R * (rng.random(Xp.shape) < p)
    return Xp + R


def gaussmut_component(Xp, ctx, mean=0.0, sd=0.1, p=0.1):
    return gaussian_mutation(Xp, mean, sd, p, rng=ctx.rng)


# --------------------------------------------------------- local search

def tpqa_point(xs, f, eps: float = 1e-6) -> np.ndarray:
    """Three-point quadratic approximation from candidate rows ``xs`` with values ``f``.

    The three best distinct rows are used (ties on value broken by the
    rows' lexicographic order so the result does not depend on input
    order). Coordinates where ``q < eps`` fall back to the best row.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    f = np.asarray(f, dtype=float)
    keys = tuple(xs[:, j] for j in range(xs.shape[1] - 1, -1, -1)) + (f,)
    order = np.lexsort(keys)
    xs, f = xs[order], f[order]
    _, first = np.unique(xs, axis=0, return_index=True)
    keep = np.sort(first)
    xs, f = xs[keep], f[keep]
    if len(xs) < 3:
        return xs[0].copy()
    x1, x2, x3 = xs[:3]
    f1, f2, f3 = f[:3]
    q = (x2 - x3) * f1 + (x3 - x1) * f2 + (x1 - x2) * f3
    num = (x2**2 - x3**2) * f1 + (x3**2 - x1**2) * f2 + (x1**2 - x2**2) * f3
    ok = q >= eps
    vertex = num / (2.0 * np.where(ok, q, 1.0))
    return np.where(ok, vertex, x1)


def local_search_tpqa(rows, Xp, ctx: VariationContext, eps: float = 1e-6) -> np.ndarray:
    """TPQA on each gated subproblem, using the incumbents of its neighborhood.

    Neighborhood utilities come from already evaluated incumbents, so no
    evaluations are spent here.
    """
    Xp = np.array(Xp, dtype=float)
    for i in np.flatnonzero(rows):
        nb = ctx.B[i]
        f = ctx.utility(np.full(len(nb), i), ctx.Y[nb], ctx.V[nb])
        Xp[i] = tpqa_point(ctx.X[nb], f, eps)
    return Xp


def local_search_dvls(rows, Xp, ctx: VariationContext) -> np.ndarray:
    """Differential vector local search on each gated subproblem.

    Two exclusive non-self neighbors give a direction; the incumbent moved
    by ``+phi`` and ``-phi`` (``phi ~ N(0.5, 0.1)``) costs two evaluations,
    and the best of the three points is kept. Trial points are truncated to
    the box before evaluation. Draw order per row: neighbor pair, then phi.
    """
    Xp = np.array(Xp, dtype=float)
    targets = np.flatnonzero(rows)
    chosen = []
    trials = []
    for i in targets:
        others = ctx.B[i][ctx.B[i] != i]
        if len(others) < 2:
            chosen.append(None)
            continue
        a, b = ctx.rng.choice(others, size=2, replace=False)
        phi = ctx.rng.normal(0.5, 0.1)
        step = phi * (Xp[a] - Xp[b])
        trials.append(truncate(np.vstack([ctx.X[i] + step, ctx.X[i] - step])))
        chosen.append(len(trials) - 1)
    if trials:
        Yt, Vt = ctx.evaluate(np.vstack(trials))
    for i, slot in zip(targets, chosen):
        if slot is None:
            Xp[i] = ctx.X[i]
            continue
        cand_x = np.vstack([ctx.X[i][None, :], trials[slot]])
        cand_y = np.vstack([ctx.Y[i][None, :], Yt[2 * slot: 2 * slot + 2]])
        cand_v = np.concatenate([[ctx.V[i]], Vt[2 * slot: 2 * slot + 2]])
        f = ctx.utility(np.full(3, i), cand_y, cand_v)
        Xp[i] = cand_x[int(np.argmin(f))]
    return Xp


def local_search_gate(ctx: VariationContext, tau_ls: int | None = None, gamma_ls: float | None = None) -> np.ndarray:
    """Rows where local search replaces the rest of the stack this iteration."""
    if (tau_ls is None) == (gamma_ls is None):
        raise ValueError("local search needs exactly one of tau_ls or gamma_ls")
    if tau_ls is not None:
        if tau_ls < 1:
            raise ValueError("tau_ls must be a positive integer")
        fire = ctx.t > 0 and ctx.t % int(tau_ls) == 0
        return np.full(ctx.N, fire)
    return ctx.rng.random(ctx.N) < gamma_ls


# ----------------------------------------------------- stack execution

def _sbx(Xp, ctx, eta_x=20.0, p_x=1.0):
    return sbx(Xp, ctx.P, eta_x, p_x, rng=ctx.rng)


def _polymut(Xp, ctx, eta_m=20.0, p_m=None):
    return polynomial_mutation(Xp, eta_m, p_m, rng=ctx.rng)


def _diffmut(Xp, ctx, phi=None, basis="rand"):
    utilities = None
    if basis in ("mean", "wgi"):
        Bm = ctx.B
        sub = np.repeat(np.arange(ctx.N)[:, None], Bm.shape[1], axis=1)
        utilities = ctx.utility(sub, ctx.Y[Bm], ctx.V[Bm])
    return differential_mutation(Xp, ctx.P, ctx.B, utilities, rng=ctx.rng, phi=phi, basis=basis)


def _binrec(Xp, ctx, rho=0.9):
    return binomial_recombination(Xp, ctx.X, rho, rng=ctx.rng)


def _truncate(Xp, ctx):
    return truncate(Xp)


BUILTIN = {
    "sbx": _sbx,
    "polymut": _polymut,
    "diffmut": _diffmut,
    "binrec": _binrec,
    "truncate": _truncate,
}
LOCALSEARCH = {"tpqa": local_search_tpqa, "dvls": local_search_dvls}


def _split(spec) -> tuple[str, dict]:
    spec = dict(spec)
    try:
        name = spec.pop("name")
    except KeyError:
        raise ValueError(f"variation entry without a name: {spec}") from None
    return name, spec


def apply_stack(stack: Sequence[dict], Xp, ctx: VariationContext, registry=None) -> np.ndarray:
    """Run the operators of ``stack`` in order on the candidate matrix ``Xp``.

    A ``localsearch`` entry (``{"name": "localsearch", "type": "tpqa" |
    "dvls", "tau_ls" | "gamma_ls": ..., ...}``) decides at the start of the
    stack which subproblems it takes over; those rows skip every other
    non-repair operator and are produced by the local search alone.
    """
    from moead.registry import default_registry

    reg = registry if registry is not None else default_registry()
    Xp = np.array(Xp, dtype=float)
    shape = Xp.shape
    entries = [_split(s) for s in stack]

    gates = {}
    for pos, (name, params) in enumerate(entries):
        if name == "localsearch":
            gates[pos] = local_search_gate(ctx, params.get("tau_ls"), params.get("gamma_ls"))
    bypass = np.zeros(shape[0], dtype=bool)
    for g in gates.values():
        bypass |= g

    for pos, (name, params) in enumerate(entries):
        if name == "localsearch":
            params = {k: v for k, v in params.items() if k not in ("tau_ls", "gamma_ls")}
            method = reg.get("localsearch", params.pop("type", "tpqa"))
            out = method(gates[pos], Xp, ctx, **params)
        else:
            op = reg.get("variation", name)
            out = np.asarray(op(Xp, ctx, **params), dtype=float)
            if bypass.any() and name not in REPAIR_OPERATORS:
                out = np.array(out)
                out[bypass] = Xp[bypass]
        if out.shape != shape:
            raise ValueError(f"variation operator {name!r} returned shape {out.shape}, expected {shape}")
        Xp = out
    return Xp
