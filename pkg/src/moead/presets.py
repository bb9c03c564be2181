"""Named algorithm configurations."""

from __future__ import annotations

import copy

from moead.engine import AlgorithmConfig

PRESETS: dict[str, dict] = {
    "original": {
        "decomposition": {"name": "sld", "h": 99},
        "scalarization": {"name": "wt"},
        "scaling": {"name": "none"},
        "neighborhood": {"name": "lambda", "T": 20, "delta_p": 1.0},
        "variation": [
            {"name": "sbx", "eta_x": 20, "p_x": 1.0},
            {"name": "polymut", "eta_m": 20, "p_m": None},
            {"name": "truncate"},
        ],
        "update": {"name": "standard"},
        "constraint": {"name": "none"},
        "stop": [{"name": "max_iter", "value": 200}],
    },
    "moead-de": {
        "decomposition": {"name": "sld", "h": 99},
        "scalarization": {"name": "wt"},
        "scaling": {"name": "none"},
        "neighborhood": {"name": "lambda", "T": 20, "delta_p": 0.9},
        "variation": [
            {"name": "diffmut", "basis": "rand", "phi": None},
            {"name": "binrec", "rho": 0.9},
            {"name": "polymut", "eta_m": 20, "p_m": None},
            {"name": "truncate"},
        ],
        "update": {"name": "restricted", "n_r": 2},
        "constraint": {"name": "none"},
        "stop": [{"name": "max_iter", "value": 200}],
    },
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def preset(name: str, **overrides) -> AlgorithmConfig:
    """Fresh copy of a named configuration, optionally with components replaced.

    ``original`` uses 100 lattice weights (``h=99`` for two objectives),
    Tchebycheff aggregation, SBX plus polynomial mutation, the standard
    update and 200 iterations. ``moead-de`` swaps in differential mutation,
    binomial recombination, ``delta_p=0.9`` and the restricted update.
    """
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    cfg = AlgorithmConfig.from_dict(copy.deepcopy(PRESETS[name]))
    return cfg.with_overrides(**overrides) if overrides else cfg
