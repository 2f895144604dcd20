"""Experiment configuration: a strict JSON schema with precise errors.

Unknown keys are rejected with their full key path, required keys are
checked per task, and range constraints (the shift inside the central zone,
positive frequencies) are enforced at parse time.  parse -> serialize ->
parse is the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1

TASKS = ("adapt", "spectrum", "deflation", "observe", "oracle", "decompose", "build")
MODELS = ("xyz", "single_qubit")
OBSERVABLE_PRESETS = ("sum_z", "sum_zz")
DECOMPOSE_KINDS = ("diagonal", "shift", "asym", "symmetric", "observable")


class ConfigError(ValueError):
    """Configuration rejected; the message carries the key path."""


def _require(mapping: dict, key: str, path: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"{path}{key}: required key missing")
    return mapping[key]


def _check_unknown(mapping: dict, allowed: set[str], path: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"{path}{key}: unknown key")


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _as_triple(value, path: str) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{path}: expected three numbers")
    return tuple(_as_number(v, f"{path}[{i}]") for i, v in enumerate(value))


@dataclass(frozen=True)
class ReferenceSpec:
    """Initial-state descriptor: per-qubit labels or 'random'.

    aux = "zero" is the zone-zero computational state; an explicit label
    string (u/d/+/-) overrides it.  phys = "random" draws a Haar-like
    full-register state instead (aux part ignored).
    """

    phys: str
    aux: str = "zero"

    def validate(self, path: str) -> None:
        if self.phys != "random" and any(c not in "ud+-" for c in self.phys):
            raise ConfigError(f"{path}.phys: labels must be from u d + - or 'random'")
        if self.aux not in ("zero",) and any(c not in "ud+-" for c in self.aux):
            raise ConfigError(f"{path}.aux: labels must be from u d + - or 'zero'")


_ADAPT_KEYS = {
    "eps",
    "max_iterations",
    "inner_gtol",
    "inner_maxfun",
    "lam",
    "betas",
    "cert_tol",
    "batching",
}


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    model: str
    model_params: dict
    omega: float
    n_a: int
    reference: ReferenceSpec = ReferenceSpec(phys="")
    references: tuple[ReferenceSpec, ...] = ()
    pool_preset: str = "mixed_product"
    nearest_neighbor: bool = False
    adapt: dict = field(default_factory=dict)
    lambda_grid: tuple[float, ...] | None = None
    k_states: int = 1
    shift: float = 0.0
    times_count: int = 101
    periods: float = 1.0
    observables: tuple[str, ...] = ("sum_z", "sum_zz")
    trotter_steps: int = 2000
    trotter_order: int = 2
    decompose_kind: str = "shift"
    decompose_r: int = 1
    out: str | None = None
    seed: int = 0
    threads: int = 1

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "task": self.task,
            "model": self.model,
            "model_params": self.model_params,
            "omega": self.omega,
            "n_a": self.n_a,
            "reference": {"phys": self.reference.phys, "aux": self.reference.aux},
            "pool": {
                "preset": self.pool_preset,
                "nearest_neighbor": self.nearest_neighbor,
            },
            "adapt": self.adapt,
            "seed": self.seed,
            "threads": self.threads,
        }
        if self.references:
            payload["references"] = [
                {"phys": r.phys, "aux": r.aux} for r in self.references
            ]
        if self.lambda_grid is not None:
            payload["lambda_grid"] = list(self.lambda_grid)
        if self.task == "deflation":
            payload["k_states"] = self.k_states
            payload["shift"] = self.shift
        if self.task == "observe":
            payload["times"] = {"count": self.times_count, "periods": self.periods}
            payload["observables"] = list(self.observables)
        if self.task in ("observe", "oracle"):
            payload["trotter"] = {
                "steps_per_period": self.trotter_steps,
                "order": self.trotter_order,
            }
        if self.task == "decompose":
            payload["decompose"] = {
                "kind": self.decompose_kind,
                "r": self.decompose_r,
            }
        if self.out is not None:
            payload["out"] = self.out
        return json.dumps(payload, indent=2, sort_keys=True)


def _parse_model(raw: dict) -> tuple[str, dict]:
    model = _require(raw, "model", "")
    if model not in MODELS:
        raise ConfigError(f"model: unknown model {model!r}; choose from {MODELS}")
    params = dict(_require(raw, "model_params", ""))
    if model == "xyz":
        _check_unknown(
            params,
            {"L", "j_bar", "delta_j", "b_bar", "delta_b", "periodic"},
            "model_params.",
        )
        out = {
            "L": _as_int(_require(params, "L", "model_params."), "model_params.L"),
            "j_bar": _as_triple(params.get("j_bar", (0, 0, 0)), "model_params.j_bar"),
            "delta_j": _as_triple(
                params.get("delta_j", (0, 0, 0)), "model_params.delta_j"
            ),
            "b_bar": _as_number(params.get("b_bar", 0.0), "model_params.b_bar"),
            "delta_b": _as_number(params.get("delta_b", 0.0), "model_params.delta_b"),
            "periodic": bool(params.get("periodic", False)),
        }
        if out["L"] < 2:
            raise ConfigError("model_params.L: chain needs at least two sites")
        return model, out
    _check_unknown(params, {"d1", "d2", "d3"}, "model_params.")
    return model, {
        "d1": _as_number(params.get("d1", 0.0), "model_params.d1"),
        "d2": _as_number(params.get("d2", 0.0), "model_params.d2"),
        "d3": _as_number(params.get("d3", 0.0), "model_params.d3"),
    }


def _parse_reference(raw, path: str) -> ReferenceSpec:
    if isinstance(raw, str):
        ref = ReferenceSpec(phys=raw)
    elif isinstance(raw, dict):
        _check_unknown(raw, {"phys", "aux"}, f"{path}.")
        ref = ReferenceSpec(
            phys=_require(raw, "phys", f"{path}."), aux=raw.get("aux", "zero")
        )
    else:
        raise ConfigError(f"{path}: expected labels or an object")
    ref.validate(path)
    return ref


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment configuration."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"not valid JSON: {err}") from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    allowed = {
        "schema_version",
        "task",
        "model",
        "model_params",
        "omega",
        "n_a",
        "reference",
        "references",
        "pool",
        "adapt",
        "lambda_grid",
        "k_states",
        "shift",
        "times",
        "observables",
        "trotter",
        "decompose",
        "out",
        "seed",
        "threads",
    }
    _check_unknown(raw, allowed, "")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {version}")

    task = _require(raw, "task", "")
    if task not in TASKS:
        raise ConfigError(f"task: unknown task {task!r}; choose from {TASKS}")
    model, model_params = _parse_model(raw)
    omega = _as_number(_require(raw, "omega", ""), "omega")
    if omega <= 0:
        raise ConfigError("omega: frequency must be positive")
    n_a = _as_int(_require(raw, "n_a", ""), "n_a")
    if n_a < 1:
        raise ConfigError("n_a: need at least one auxiliary qubit")

    L = model_params["L"] if model == "xyz" else 1

    reference = ReferenceSpec(phys="d" * L)
    if "reference" in raw:
        reference = _parse_reference(raw["reference"], "reference")
    references = tuple(
        _parse_reference(r, f"references[{i}]")
        for i, r in enumerate(raw.get("references", []))
    )

    pool_raw = raw.get("pool", {})
    _check_unknown(pool_raw, {"preset", "nearest_neighbor"}, "pool.")
    pool_preset = pool_raw.get("preset", "mixed_product")
    from .adapt import POOL_PRESETS

    if pool_preset not in POOL_PRESETS:
        raise ConfigError(
            f"pool.preset: unknown preset {pool_preset!r}; "
            f"choose from {sorted(POOL_PRESETS)}"
        )

    adapt_raw = dict(raw.get("adapt", {}))
    _check_unknown(adapt_raw, _ADAPT_KEYS, "adapt.")
    if "lam" in adapt_raw:
        lam = _as_number(adapt_raw["lam"], "adapt.lam")
        if not (-omega / 2.0 < lam <= omega / 2.0):
            raise ConfigError(
                f"adapt.lam: shift {lam} outside the central zone "
                f"(-{omega / 2}, {omega / 2}]"
            )

    lambda_grid = None
    if raw.get("lambda_grid") is not None:
        grid = raw["lambda_grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError("lambda_grid: expected a nonempty list")
        values = tuple(
            _as_number(v, f"lambda_grid[{i}]") for i, v in enumerate(grid)
        )
        for i, v in enumerate(values):
            if not (-omega / 2.0 < v <= omega / 2.0):
                raise ConfigError(
                    f"lambda_grid[{i}]: value {v} outside the central zone"
                )
        lambda_grid = values

    k_states = _as_int(raw.get("k_states", 1), "k_states")
    if k_states < 1:
        raise ConfigError("k_states: need at least one state")
    shift = _as_number(raw.get("shift", 0.0), "shift")
    if task == "deflation" and not (-omega / 2.0 < shift < omega / 2.0):
        raise ConfigError(f"shift: {shift} outside the open central zone")

    times_raw = raw.get("times", {})
    _check_unknown(times_raw, {"count", "periods"}, "times.")
    times_count = _as_int(times_raw.get("count", 101), "times.count")
    periods = _as_number(times_raw.get("periods", 1.0), "times.periods")
    if times_count < 2:
        raise ConfigError("times.count: need at least two samples")

    observables = tuple(raw.get("observables", ["sum_z", "sum_zz"]))
    for i, name in enumerate(observables):
        if name not in OBSERVABLE_PRESETS:
            raise ConfigError(
                f"observables[{i}]: unknown observable {name!r}; "
                f"choose from {OBSERVABLE_PRESETS}"
            )

    trotter_raw = raw.get("trotter", {})
    _check_unknown(trotter_raw, {"steps_per_period", "order"}, "trotter.")
    trotter_steps = _as_int(trotter_raw.get("steps_per_period", 2000),
                            "trotter.steps_per_period")
    trotter_order = _as_int(trotter_raw.get("order", 2), "trotter.order")
    if trotter_steps < 1:
        raise ConfigError("trotter.steps_per_period: need at least one step")
    if trotter_order not in (1, 2):
        raise ConfigError("trotter.order: supported orders are 1 and 2")

    decompose_raw = raw.get("decompose", {})
    _check_unknown(decompose_raw, {"kind", "r"}, "decompose.")
    decompose_kind = decompose_raw.get("kind", "shift")
    if decompose_kind not in DECOMPOSE_KINDS:
        raise ConfigError(
            f"decompose.kind: unknown kind {decompose_kind!r}; "
            f"choose from {DECOMPOSE_KINDS}"
        )
    decompose_r = _as_int(decompose_raw.get("r", 1), "decompose.r")

    threads = _as_int(raw.get("threads", 1), "threads")
    if threads < 1:
        raise ConfigError("threads: need at least one worker")

    if task == "observe" and reference.phys == "":
        raise ConfigError("reference: required for the observe task")

    return ExperimentConfig(
        task=task,
        model=model,
        model_params=model_params,
        omega=omega,
        n_a=n_a,
        reference=reference,
        references=references,
        pool_preset=pool_preset,
        nearest_neighbor=bool(pool_raw.get("nearest_neighbor", False)),
        adapt=adapt_raw,
        lambda_grid=lambda_grid,
        k_states=k_states,
        shift=shift,
        times_count=times_count,
        periods=periods,
        observables=observables,
        trotter_steps=trotter_steps,
        trotter_order=trotter_order,
        decompose_kind=decompose_kind,
        decompose_r=decompose_r,
        out=raw.get("out"),
        seed=_as_int(raw.get("seed", 0), "seed"),
        threads=threads,
    )
