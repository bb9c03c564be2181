"""Registration of the built-in components."""

from __future__ import annotations

from moead import constraints, decomposition, neighborhood, problems, scalarization, termination, update, variation


def _sld(n_f, h):
    return decomposition.decompose_sld(h, n_f)


def _msld(n_f, h, tau=None):
    return decomposition.decompose_msld(h, n_f, tau)


def _uniform(n_f, N):
    return decomposition.decompose_uniform(N, n_f)


def load_builtins(reg) -> None:
    tables = {
        "decomposition": {"sld": _sld, "msld": _msld, "uniform": _uniform},
        "scalarization": scalarization.BUILTIN,
        "scaling": scalarization.SCALING,
        "neighborhood": neighborhood.BUILTIN,
        "variation": variation.BUILTIN,
        "localsearch": variation.LOCALSEARCH,
        "update": update.BUILTIN,
        "constraint": constraints.BUILTIN,
        "stop": termination.BUILTIN,
        "problem": problems.BUILTIN,
    }
    for role, table in tables.items():
        for name, fn in table.items():
            reg.register(role, name, fn)
