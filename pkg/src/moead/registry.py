"""Component registry keyed by (role, name).

Every swappable piece of the algorithm lives in one of the roles below.
The calling convention for each role is fixed so that user components can
be dropped in next to the built-in ones:

    decomposition   fn(n_f, **params) -> (N, n_f) weight matrix
    scalarization   fn(Y, W, z_hat, z_tilde, **params) -> utilities
    scaling         fn(Y, z_hat, z_tilde) -> (Y, z_hat, z_tilde)
    neighborhood    Neighborhood(define=fn(W, X, T) -> B, dynamic=bool)
    variation       fn(Xp, ctx, **params) -> Xp
    localsearch     fn(rows, Xp, ctx, **params) -> Xp
    update          fn(F, f_inc, B, W, score, **params) -> choice
    constraint      fn(F, f_inc, v_cand, v_inc, E, rng, **params) -> (s_inc, s_cand)
    stop            fn(state, value) -> bool
    problem         fn(n_v=None, n_f=None) -> ProblemDefinition
"""

from __future__ import annotations

from collections.abc import Callable
from typing import Any

ROLES = (
    "decomposition",
    "scalarization",
    "scaling",
    "neighborhood",
    "variation",
    "localsearch",
    "update",
    "constraint",
    "stop",
    "problem",
)


class ComponentError(LookupError):
    """Raised for unknown roles, unknown names and duplicate registrations."""


class Registry:
    def __init__(self, roles=ROLES):
        self._components: dict[str, dict[str, Any]] = {role: {} for role in roles}

    @classmethod
    def with_builtins(cls) -> Registry:
        from moead._builtin import load_builtins

        reg = cls()
        load_builtins(reg)
        return reg

    def _role(self, role: str) -> dict[str, Any]:
        try:
            return self._components[role]
        except KeyError:
            raise ComponentError(
                f"unknown role {role!r}; expected one of {', '.join(self._components)}"
            ) from None

    def register(self, role: str, name: str, factory: Any) -> tuple[str, str]:
        table = self._role(role)
        if name in table:
            raise ComponentError(f"component {name!r} already registered for role {role!r}")
        table[name] = factory
        return role, name

    def unregister(self, role: str, name: str) -> None:
        table = self._role(role)
        if name not in table:
            raise ComponentError(f"no component {name!r} for role {role!r}")
        del table[name]

    def get(self, role: str, name: str) -> Any:
        table = self._role(role)
        try:
            return table[name]
        except KeyError:
            raise ComponentError(
                f"no component {name!r} for role {role!r}; available: {', '.join(table)}"
            ) from None

    def names(self, role: str) -> list[str]:
        """Names in registration order (built-ins first, in their canonical order)."""
        return list(self._role(role))

    def roles(self) -> tuple[str, ...]:
        return tuple(self._components)

    def copy(self) -> Registry:
        new = Registry(self.roles())
        for role, table in self._components.items():
            new._components[role] = dict(table)
        return new


_default: Registry | None = None


def default_registry() -> Registry:
    global _default
    if _default is None:
        _default = Registry.with_builtins()
    return _default


def register_component(role: str, name: str, factory: Callable | None = None, *, registry: Registry | None = None):
    """Register ``factory`` under ``(role, name)``.

    Works as a plain call or, when ``factory`` is omitted, as a decorator::

        @register_component("variation", "gaussmut")
        def gaussmut(Xp, ctx, mean=0.0, sd=0.1, p=0.1): ...
    """
    reg = registry if registry is not None else default_registry()
    if factory is None:
        def decorator(fn):
            reg.register(role, name, fn)
            return fn

        return decorator
    return reg.register(role, name, factory)


def get_component(role: str, name: str, *, registry: Registry | None = None) -> Any:
    reg = registry if registry is not None else default_registry()
    return reg.get(role, name)


def list_components(role: str | None = None, *, registry: Registry | None = None):
    """Registered names for one role, or a ``{role: names}`` mapping for all roles."""
    reg = registry if registry is not None else default_registry()
    if role is None:
        return {r: reg.names(r) for r in reg.roles()}
    return reg.names(role)
