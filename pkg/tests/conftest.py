import numpy as np
import pytest

from moead.decomposition import decompose_sld
from moead.neighborhood import assign_neighborhood_by_lambda, sampling_probabilities
from moead.variation import VariationContext


def make_context(N=10, n_v=4, T=4, seed=0, t=0, delta_p=1.0):
    """Small context on a two-objective quadratic with WT utilities at z = 0."""
    rng = np.random.default_rng(seed)
    W = decompose_sld(N - 1, 2)
    B = assign_neighborhood_by_lambda(W, T)
    P = sampling_probabilities(B, delta_p)
    X = rng.random((N, n_v))
    counter = {"evals": 0}

    def objectives(Xu):
        Xu = np.atleast_2d(Xu)
        return np.column_stack([np.sum(Xu**2, axis=1), np.sum((Xu - 1.0) ** 2, axis=1)])

    def evaluate(Xu):
        counter["evals"] += len(Xu)
        return objectives(Xu), np.zeros(len(Xu))

    def utility(sub, Y, V=None):
        return np.max(W[np.asarray(sub)] * np.asarray(Y), axis=-1)

    ctx = VariationContext(X=X, Y=objectives(X), V=np.zeros(N), W=W, B=B, P=P, rng=rng, t=t,
                           utility=utility, evaluate=evaluate)
    ctx.extra["counter"] = counter
    return ctx


@pytest.fixture
def ctx():
    return make_context()


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
