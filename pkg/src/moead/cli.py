"""Command-line harness: run declarative configs, list components, compute metrics.

Run configs are JSON::

    {
      "problem": {"name": "zdt1", "n_v": 30},
      "algorithm": {"preset": "original", "decomposition": {"name": "sld", "h": 8}},
      "output": {"directory": "out"},
      "seed": 42,
      "plugins": ["my_components"]
    }

Algorithm keys other than ``preset`` replace whole components of the
preset. ``plugins`` are modules imported before the run, so that they can
register extra components. A problem name of the form ``module:attr``
loads a user problem: either a ``ProblemDefinition`` or a factory called
with ``n_v`` and ``n_f``.

All CSV numbers are written with ``%.17g``, which round-trips doubles.
"""

from __future__ import annotations

import argparse
import csv
import importlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from moead.engine import AlgorithmConfig, ConfigError, RunResult, run_moead
from moead.metrics import hypervolume, igd, nondominated_filter, nondominated_mask
from moead.presets import preset, preset_names
from moead.problems import ProblemDefinition
from moead.registry import ComponentError, default_registry

OUTPUT_ENV = "MOEAD_OUTPUT_DIR"
NUM_FMT = "%.17g"
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as err:
        raise ConfigError("config", f"cannot read {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ConfigError("config", f"invalid JSON in {path}: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    known = {"problem", "algorithm", "output", "seed", "plugins"}
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown top-level key")
    return data


def build_problem(block, registry=None) -> ProblemDefinition:
    reg = registry if registry is not None else default_registry()
    if not isinstance(block, dict):
        raise ConfigError("problem", "must be an object")
    name = block.get("name")
    if not name:
        raise ConfigError("problem.name", "missing problem name")
    n_v, n_f = block.get("n_v"), block.get("n_f")
    if ":" in name:
        module, _, attr = name.partition(":")
        try:
            obj = getattr(importlib.import_module(module), attr)
        except (ImportError, AttributeError) as err:
            raise ConfigError("problem.name", f"cannot load {name!r}: {err}") from None
        problem = obj if isinstance(obj, ProblemDefinition) else obj(n_v=n_v, n_f=n_f)
    else:
        try:
            factory = reg.get("problem", name)
        except ComponentError as err:
            raise ConfigError("problem.name", str(err)) from None
        try:
            problem = factory(n_v=n_v, n_f=n_f)
        except ValueError as err:
            raise ConfigError("problem", str(err)) from None
    if "xmin" in block or "xmax" in block:
        try:
            problem = ProblemDefinition(
                problem.name, problem.n_v, problem.n_f,
                block.get("xmin", problem.xmin), block.get("xmax", problem.xmax),
                problem.objective_fn, problem.constraint_fn, problem.eq_tolerance, problem.front,
            )
        except ValueError as err:
            raise ConfigError("problem.xmin", str(err)) from None
    return problem


def build_algorithm(block, seed=None) -> AlgorithmConfig:
    if not isinstance(block, dict):
        raise ConfigError("algorithm", "must be an object")
    block = dict(block)
    name = block.pop("preset", None)
    if name is not None:
        try:
            cfg = preset(name)
        except ValueError as err:
            raise ConfigError("algorithm.preset", str(err)) from None
        cfg = cfg.with_overrides(**block)
    else:
        cfg = AlgorithmConfig.from_dict(block)
    if seed is not None:
        cfg = cfg.with_overrides(seed=seed)
    return cfg


def _header(prefix: str, n: int) -> str:
    return ",".join(f"{prefix}{j + 1}" for j in range(n))


def _write_matrix(path: Path, M, prefix: str) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    np.savetxt(path, M, fmt=NUM_FMT, delimiter=",", header=_header(prefix, M.shape[1]), comments="")


def write_outputs(result: RunResult, out: Path) -> None:
    """Write the run artifacts into ``out`` (created if needed)."""
    out.mkdir(parents=True, exist_ok=True)
    _write_matrix(out / "final_population.csv", result.X, "x")
    _write_matrix(out / "final_objectives.csv", result.Y, "f")
    feasible = result.V == 0
    front = nondominated_filter(result.Y[feasible]) if feasible.any() else np.empty((0, result.Y.shape[1]))
    _write_matrix(out / "front.csv", front.reshape(-1, result.Y.shape[1]), "f")
    n_f = result.Y.shape[1]
    with open(out / "trace.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "evaluations", "mean_utility"]
                        + [f"z_hat{j + 1}" for j in range(n_f)] + [f"z_tilde{j + 1}" for j in range(n_f)])
        for row in result.trace:
            nums = [row["mean_utility"], *row["z_hat"], *row["z_tilde"]]
            writer.writerow([row["iteration"], row["evaluations"]] + [NUM_FMT % v for v in nums])
    summary = dict(result.summary or {})
    summary.update(seed=result.seed, stop_reason=result.stop_reason, problem=result.problem)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_matrix(path) -> np.ndarray:
    """Numeric CSV; a non-numeric first row is treated as a header."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    for n, r in enumerate(rows):
        if len(r) != width:
            raise ValueError(f"{path}: row {n + 1} has {len(r)} columns, expected {width}")
    try:
        return np.array([[float(c) for c in r] for r in rows])
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None


def compute_metrics(front, reference=None, ref_point=None, seed: int = 0) -> dict:
    front = np.atleast_2d(front)
    nd = front[nondominated_mask(front)]
    defaulted = ref_point is None
    ref = nd.max(axis=0) if defaulted else np.asarray(ref_point, dtype=float)
    if ref.shape != (front.shape[1],):
        raise ValueError(f"reference point has {ref.size} entries, front has {front.shape[1]} objectives")
    hv, err = hypervolume(nd, ref, seed=seed, return_error=True)
    out = {
        "points": int(len(front)),
        "nondominated_count": int(len(nd)),
        "hv": float(hv),
        "hv_stderr": float(err),
        "ref_point": ref.tolist(),
        "ref_point_defaulted": defaulted,
    }
    if reference is not None:
        reference = np.atleast_2d(reference)
        if reference.shape[1] != front.shape[1]:
            raise ValueError(f"reference has {reference.shape[1]} columns, front has {front.shape[1]}")
        out["igd"] = igd(front, reference)
    return out


def cmd_run(args) -> int:
    try:
        data = load_config(args.config)
        for module in data.get("plugins", []):
            try:
                importlib.import_module(module)
            except ImportError as err:
                raise ConfigError("plugins", f"cannot import {module!r}: {err}") from None
        if "problem" not in data:
            raise ConfigError("problem", "missing problem block")
        problem = build_problem(data["problem"])
        seed = args.seed if args.seed is not None else data.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise ConfigError("seed", "must be an integer")
        config = build_algorithm(data.get("algorithm", {"preset": "original"}), seed)
        config.validate()
        out = args.out or data.get("output", {}).get("directory") or os.environ.get(OUTPUT_ENV) or "moead_output"
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_moead(problem, config)
        write_outputs(result, Path(out))
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as err:  # noqa: BLE001 - any runtime failure maps to exit 2
        print(f"run failed: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    from moead.metrics import format_summary

    print(format_summary(result.summary))
    print(f"outputs written to {out}")
    return 0


def cmd_list(args) -> int:
    reg = default_registry()
    roles = reg.roles()
    if args.role is not None and args.role not in (*roles, "preset"):
        print(f"unknown role {args.role!r}; expected one of {', '.join((*roles, 'preset'))}", file=sys.stderr)
        return EXIT_CONFIG
    if args.role == "preset":
        print("\n".join(preset_names()))
        return 0
    if args.role is not None:
        print("\n".join(reg.names(args.role)))
        return 0
    for role in roles:
        print(f"{role}: {', '.join(reg.names(role))}")
    print(f"preset: {', '.join(preset_names())}")
    return 0


def _ref_point(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_metrics(args) -> int:
    try:
        front = read_matrix(args.front)
        reference = read_matrix(args.reference) if args.reference else None
        result = compute_metrics(front, reference, args.ref_point, args.seed)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if result["ref_point_defaulted"]:
        print("reference point not provided: using the maximum in each dimension", file=sys.stderr)
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moead", description="Component-based MOEA/D runner.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a JSON config")
    p.add_argument("config", help="path to the run config (JSON)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help=f"output directory (default: config, then ${OUTPUT_ENV})")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("list", help="list registered components")
    p.add_argument("role", nargs="?", default=None, help="restrict to one role (or 'preset')")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("metrics", help="nondominated count, HV and IGD of a front CSV")
    p.add_argument("front", help="objective vectors, one per row")
    p.add_argument("--reference", default=None, help="reference front CSV for IGD")
    p.add_argument("--ref-point", type=_ref_point, default=None, help="HV reference point, e.g. 3,3")
    p.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo HV (n_f > 4)")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
