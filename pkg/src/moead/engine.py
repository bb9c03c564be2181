"""The MOEA/D main loop assembled from registry components."""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np

from moead.neighborhood import sampling_probabilities
from moead.problems import BatchEvaluator, NonFiniteObjectiveError, ProblemDefinition
from moead.registry import ComponentError, Registry, default_registry
from moead.scalarization import update_reference_points
from moead.termination import check_stop
from moead.update import Archive, archive_update
from moead.variation import VariationContext, apply_stack


class ConfigError(ValueError):
    """Invalid algorithm configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class RunError(RuntimeError):
    pass


def _none():
    return {"name": "none"}


@dataclass
class AlgorithmConfig:
    """One component choice (name + parameters) per role.

    Components are plain dicts such as ``{"name": "sld", "h": 99}``;
    ``variation`` is an ordered list of them and ``stop`` a list of
    ``{"name": "max_iter", "value": 200}`` entries. ``archive=None`` turns
    the feasible-point archive on exactly when VBR is used.
    """

    decomposition: dict
    scalarization: dict
    neighborhood: dict
    variation: list
    update: dict
    stop: list
    scaling: dict = field(default_factory=_none)
    constraint: dict = field(default_factory=_none)
    archive: bool | None = None
    seed: int | None = None

    @classmethod
    def from_dict(cls, data: dict) -> AlgorithmConfig:
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, f"unknown algorithm key; expected one of {', '.join(sorted(known))}")
        required = {"decomposition", "scalarization", "neighborhood", "variation", "update", "stop"}
        missing = sorted(required - set(data))
        if missing:
            raise ConfigError(missing[0], "missing required component")
        return cls(**copy.deepcopy(data))

    def to_dict(self) -> dict:
        return {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}

    def with_overrides(self, **overrides) -> AlgorithmConfig:
        """Copy with whole components replaced (no deep merging)."""
        data = self.to_dict()
        for key, value in overrides.items():
            if key not in data:
                raise ConfigError(key, "unknown algorithm key")
            data[key] = copy.deepcopy(value)
        return AlgorithmConfig.from_dict(data)

    def use_archive(self) -> bool:
        if self.archive is None:
            return self.constraint.get("name") == "vbr"
        return bool(self.archive)

    def validate(self, registry: Registry | None = None, N: int | None = None) -> None:
        reg = registry if registry is not None else default_registry()
        single = ("decomposition", "scalarization", "scaling", "neighborhood", "update", "constraint")
        for role in single:
            spec = getattr(self, role)
            _resolve(reg, role, spec, role)
        if not isinstance(self.variation, list):
            raise ConfigError("variation", "must be a list of operator specs")
        for pos, spec in enumerate(self.variation):
            key = f"variation[{pos}]"
            if not isinstance(spec, dict) or "name" not in spec:
                raise ConfigError(key, "operator spec needs a name")
            if spec["name"] == "localsearch":
                _resolve(reg, "localsearch", {"name": spec.get("type", "tpqa")}, key + ".type")
                if ("tau_ls" in spec) == ("gamma_ls" in spec):
                    raise ConfigError(key, "local search needs exactly one of tau_ls or gamma_ls")
            else:
                _resolve(reg, "variation", spec, key)
        if not isinstance(self.stop, list) or not self.stop:
            raise ConfigError("stop", "at least one stop criterion is required")
        for pos, spec in enumerate(self.stop):
            _resolve(reg, "stop", spec, f"stop[{pos}]")
            if "value" not in spec or spec["value"] < 0:
                raise ConfigError(f"stop[{pos}].value", "needs a nonnegative threshold")
        dp = self.neighborhood.get("delta_p", 1.0)
        if not 0.0 <= dp <= 1.0:
            raise ConfigError("neighborhood.delta_p", f"must lie in [0, 1], got {dp}")
        if N is not None:
            T = self.neighborhood.get("T", 20)
            if not 1 <= T <= N:
                raise ConfigError("neighborhood.T", f"must lie in [1, N={N}], got {T}")
            if dp < 1.0 and T == N:
                raise ConfigError("neighborhood.delta_p", "must be 1 when T = N")
            for key in ("n_r", "T_r"):
                if key in self.update and not 1 <= self.update[key] <= N:
                    raise ConfigError(f"update.{key}", f"must lie in [1, N={N}], got {self.update[key]}")


def _resolve(reg: Registry, role: str, spec, key: str):
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError(key, "component spec needs a name")
    try:
        return reg.get(role, spec["name"])
    except ComponentError as err:
        raise ConfigError(key, str(err)) from None


def _params(spec: dict) -> dict:
    return {k: v for k, v in spec.items() if k != "name"}


@dataclass
class RunState:
    t: int
    X: np.ndarray
    Y: np.ndarray
    V: np.ndarray
    z_hat: np.ndarray
    z_tilde: np.ndarray
    eval_count: int
    rng: np.random.Generator
    archive: Archive | None = None
    start_time: float = 0.0


@dataclass
class RunResult:
    X: np.ndarray  # original variable space
    Y: np.ndarray
    V: np.ndarray
    X_unit: np.ndarray
    W: np.ndarray
    trace: list
    eval_count: int
    iterations: int
    stop_reason: str
    z_hat: np.ndarray
    z_tilde: np.ndarray
    seed: int | None
    problem: str
    archive: dict | None = None
    summary: dict | None = None


def initialize_population(n_v: int, N: int, rng) -> np.ndarray:
    """``N`` points drawn uniformly from the unit hypercube."""
    if N < 1:
        raise ValueError("N must be positive")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return rng.random((N, n_v))


class _Aggregator:
    """Scalarization plus optional objective scaling at the current reference points."""

    def __init__(self, W, fn, params, scaling, beta_v=None):
        self.W = W
        self.fn = fn
        self.params = params
        self.scaling = scaling
        self.beta_v = beta_v
        self.z_hat = self.z_tilde = None

    def set_reference(self, z_hat, z_tilde):
        self.z_hat, self.z_tilde = z_hat, z_tilde

    def value(self, W, Y):
        Ys, zh, zt = self.scaling(np.asarray(Y, dtype=float), self.z_hat, self.z_tilde)
        return self.fn(Ys, W, zh, zt, **self.params)

    def own(self, Y):
        return self.value(self.W, Y)

    def matrix(self, Y):
        """``F[i, k]``: point ``k`` on subproblem ``i``."""
        return self.value(self.W[:, None, :], np.asarray(Y)[None, :, :])

    def utility(self, sub, Y, V=None):
        f = self.value(self.W[np.asarray(sub)], Y)
        if self.beta_v is not None and V is not None:
            f = f + self.beta_v * np.asarray(V)
        return f


def build_weights(spec: dict, n_f: int, registry: Registry | None = None) -> np.ndarray:
    reg = registry if registry is not None else default_registry()
    W = np.asarray(_resolve(reg, "decomposition", spec, "decomposition")(n_f, **_params(spec)), dtype=float)
    if W.ndim != 2 or W.shape[1] != n_f:
        raise ConfigError("decomposition", f"produced shape {W.shape}, expected (N, {n_f})")
    return W


def run_moead(problem: ProblemDefinition, config, *, registry: Registry | None = None,
              summary: bool = True) -> RunResult:
    """Run one MOEA/D instance.

    Per iteration: (re)define neighborhoods, copy incumbents, apply the
    variation stack, evaluate candidates, refresh reference points, update
    incumbents, check stop criteria. Incumbents are never re-evaluated, so
    a run costs ``N`` evaluations at start plus ``N`` per iteration (plus
    any local-search trials).

    Random draws come from one generator seeded with ``config.seed``:
    initial population, then per iteration the variation stack in order,
    then the update/constraint step.
    """
    reg = registry if registry is not None else default_registry()
    if isinstance(config, dict):
        config = AlgorithmConfig.from_dict(config)
    config.validate(reg)
    rng = np.random.default_rng(config.seed)

    W = build_weights(config.decomposition, problem.n_f, reg)
    N = len(W)
    config.validate(reg, N)

    scal_fn = reg.get("scalarization", config.scalarization["name"])
    scaling_fn = reg.get("scaling", config.scaling["name"])
    nb = reg.get("neighborhood", config.neighborhood["name"])
    update_fn = reg.get("update", config.update["name"])
    constraint_fn = reg.get("constraint", config.constraint["name"])
    cparams = _params(config.constraint)
    beta_v = cparams.get("beta_v", 1.0) if config.constraint["name"] == "penalty" else None
    agg = _Aggregator(W, scal_fn, _params(config.scalarization), scaling_fn, beta_v)
    T = config.neighborhood.get("T", 20)
    delta_p = config.neighborhood.get("delta_p", 1.0)

    evaluator = BatchEvaluator(problem)
    state = RunState(t=0, X=None, Y=None, V=None, z_hat=None, z_tilde=None,
                     eval_count=0, rng=rng, start_time=time.process_time())
    pending = []  # objective rows evaluated outside the candidate matrix (local search)

    def evaluate(X_unit):
        try:
            Y, V = evaluator(X_unit)
        except NonFiniteObjectiveError as err:
            raise RunError(
                f"non-finite objective values for subproblem(s) {err.rows.tolist()} "
                f"at iteration {state.t} on problem {problem.name!r}"
            ) from err
        state.eval_count = evaluator.count
        return Y, V

    def evaluate_extra(X_unit):
        Y, V = evaluate(X_unit)
        pending.append(Y)
        return Y, V

    state.X = initialize_population(problem.n_v, N, rng)
    state.Y, state.V = evaluate(state.X)
    state.z_hat, state.z_tilde = update_reference_points(state.Y)
    agg.set_reference(state.z_hat, state.z_tilde)

    if config.use_archive():
        state.archive = archive_update(Archive(N, problem.n_v, problem.n_f),
                                       state.X, state.Y, state.V, agg.matrix(state.Y))

    trace = [_trace_row(state, agg)]
    B = P = None
    while (reason := check_stop(config.stop, state, reg)) is None:
        if B is None or nb.dynamic:
            B = np.asarray(nb.define(W, state.X, T))
            P = sampling_probabilities(B, delta_p, N)
        ctx = VariationContext(X=state.X, Y=state.Y, V=state.V, W=W, B=B, P=P, rng=rng,
                               t=state.t, utility=agg.utility, evaluate=evaluate_extra)
        Xp = apply_stack(config.variation, state.X.copy(), ctx, reg)
        Yp, Vp = evaluate(Xp)

        seen = np.vstack([Yp, *pending])
        pending.clear()
        state.z_hat, state.z_tilde = update_reference_points(seen, state.z_hat, np.vstack([state.Y, Yp]))
        agg.set_reference(state.z_hat, state.z_tilde)

        F = agg.matrix(Yp)
        f_inc = agg.own(state.Y)

        def score(E, F=F, f_inc=f_inc, Vp=Vp, V=state.V):
            return constraint_fn(F, f_inc, Vp, V, E, rng, **cparams)

        choice = np.asarray(update_fn(F, f_inc, B, W, score, **_params(config.update)))
        take = choice >= 0
        X_prev, Y_prev, V_prev = state.X, state.Y, state.V
        state.X, state.Y, state.V = X_prev.copy(), Y_prev.copy(), V_prev.copy()
        state.X[take] = Xp[choice[take]]
        state.Y[take] = Yp[choice[take]]
        state.V[take] = Vp[choice[take]]

        if state.archive is not None:
            arch = state.archive
            idx = np.flatnonzero(arch.filled)
            arch.utility[idx] = agg.value(W[idx], arch.Y[idx])
            pool_X = np.vstack([X_prev, Xp])
            pool_Y = np.vstack([Y_prev, Yp])
            archive_update(arch, pool_X, pool_Y, np.concatenate([V_prev, Vp]), agg.matrix(pool_Y))

        state.t += 1
        trace.append(_trace_row(state, agg))

    result = RunResult(
        X=problem.decode(state.X), Y=state.Y, V=state.V, X_unit=state.X, W=W, trace=trace,
        eval_count=state.eval_count, iterations=state.t, stop_reason=reason,
        z_hat=state.z_hat, z_tilde=state.z_tilde, seed=config.seed, problem=problem.name,
    )
    if state.archive is not None:
        a = state.archive
        result.archive = {
            "filled": a.filled.copy(),
            "X": problem.decode(a.X),
            "Y": a.Y.copy(),
            "utility": a.utility.copy(),
        }
    if summary:
        from moead.metrics import summarize

        result.summary = summarize(result)
    return result


def _trace_row(state: RunState, agg: _Aggregator) -> dict[str, Any]:
    return {
        "iteration": state.t,
        "evaluations": state.eval_count,
        "mean_utility": float(np.mean(agg.own(state.Y))),
        "z_hat": state.z_hat.tolist(),
        "z_tilde": state.z_tilde.tolist(),
    }
