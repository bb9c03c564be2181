"""Stop criteria, checked once per iteration; any criterion met stops the run."""

from __future__ import annotations

import time


def stop_max_iter(state, value) -> bool:
    return state.t >= value


def stop_max_eval(state, value) -> bool:
    return state.eval_count >= value


def stop_max_time(state, value) -> bool:
    # process time, not wall clock
    return time.process_time() - state.start_time >= value


BUILTIN = {"max_iter": stop_max_iter, "max_eval": stop_max_eval, "max_time": stop_max_time}


def check_stop(criteria, state, registry=None) -> str | None:
    """Name of the first criterion met, or ``None`` to keep going.

    ``criteria`` is a list of ``{"name": ..., "value": ...}`` entries.
    """
    from moead.registry import default_registry

    reg = registry if registry is not None else default_registry()
    if not criteria:
        raise ValueError("at least one stop criterion is required")
    for crit in criteria:
        if reg.get("stop", crit["name"])(state, crit["value"]):
            return crit["name"]
    return None
