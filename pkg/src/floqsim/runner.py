"""Configuration-driven experiment runner.

Each run writes one self-describing JSON record plus flat CSV files for
spectra, traces and time series; records are written atomically and are
byte-identical for identical config + seed, apart from the timing block.
The reproduce entry point bundles the desk-scale parameter sets of the
published driven-XYZ study and emits comparison tables against the
Trotterized exact-diagonalization oracle.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .adapt import (
    AdaptConfig,
    AdaptResult,
    build_pool,
    default_lambda_grid,
    distinct_quasienergies,
    run_adapt,
    run_deflation,
    spectrum_sweep,
)
from .auxiliary import AuxSpec, a_asym, a_diagonal, a_observable, a_shift, a_symmetric
from .config import ExperimentConfig, ReferenceSpec, parse_config
from .drives import DriveSpec, XYZParams, driven_xyz, single_qubit_example
from .hamiltonian import ExtendedFloquetHamiltonian, build_extended
from .observables import expectation_in_time, floquet_state_at_zero
from .oracle import TrotterConfig, exact_quasienergies, trotter_states
from .pauli import PauliSum
from .statevector import StateVector, init_reference, random_reference

OUT_DIR_ENV = "FLOQSIM_OUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_ORACLE_LIMIT = 4


class TaskError(RuntimeError):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


@dataclass
class ResultRecord:
    """One run: config echo, task outputs, versions, timings, written files."""

    config: dict
    task: str
    results: dict
    timings: dict
    files: list[str]
    versions: dict

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "task": self.task,
            "results": self.results,
            "versions": self.versions,
            "timings": self.timings,
            "files": self.files,
        }
        return json.dumps(payload, indent=2, sort_keys=True, default=_json_default)


def _json_default(value):
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.bool_,)):
        return bool(value)
    raise TypeError(f"not JSON-serializable: {type(value)}")


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _csv_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def build_drive(config: ExperimentConfig) -> DriveSpec:
    if config.model == "xyz":
        p = config.model_params
        params = XYZParams(
            L=p["L"],
            j_bar=tuple(p["j_bar"]),
            delta_j=tuple(p["delta_j"]),
            b_bar=p["b_bar"],
            delta_b=p["delta_b"],
            periodic=p.get("periodic", False),
        )
        return driven_xyz(params, config.omega)
    p = config.model_params
    return single_qubit_example(p["d1"], p["d2"], p["d3"], config.omega)


def build_reference(
    ref: ReferenceSpec, h: ExtendedFloquetHamiltonian, seed: int
) -> StateVector:
    if ref.phys == "random":
        return random_reference(h.layout, seed)
    aux = None if ref.aux == "zero" else ref.aux
    return init_reference(h.layout, ref.phys, aux_state=aux)


def build_adapt_config(config: ExperimentConfig) -> AdaptConfig:
    kwargs = dict(config.adapt)
    if "betas" in kwargs and isinstance(kwargs["betas"], list):
        kwargs["betas"] = tuple(kwargs["betas"])
    return AdaptConfig(**kwargs)


def _observable_sum(name: str, L: int) -> PauliSum:
    terms = []
    if name == "sum_z":
        for j in range(L):
            terms.append(
                ("".join("Z" if q == j else "I" for q in range(L - 1, -1, -1)), 1.0)
            )
    elif name == "sum_zz":
        for j in range(L - 1):
            terms.append(
                (
                    "".join(
                        "Z" if q in (j, j + 1) else "I" for q in range(L - 1, -1, -1)
                    ),
                    1.0,
                )
            )
    else:
        raise TaskError(f"unknown observable {name}", EXIT_CONFIG)
    return PauliSum.from_terms(L, terms)


def _result_summary(result: AdaptResult) -> dict:
    return {
        "energy": result.energy,
        "cost": result.cost,
        "lam": result.lam,
        "certified": result.certified,
        "converged": result.converged,
        "iterations": result.iterations,
        "n_parameters": len(result.ansatz),
        "reference": result.reference_label,
    }


def _trace_rows(result: AdaptResult) -> list[tuple]:
    return [
        (rec.iteration, rec.cost, rec.gradient_max, " ".join(rec.selected))
        for rec in result.trace
    ]


def _resolve_out_dir(config: ExperimentConfig, out: str | None) -> Path:
    chosen = out or config.out or os.environ.get(OUT_DIR_ENV, "results")
    return Path(chosen)


# -- task implementations -----------------------------------------------------


def _task_adapt(config: ExperimentConfig, out_dir: Path, tag: str):
    drive = build_drive(config)
    h = build_extended(drive, config.n_a)
    pool = build_pool(config.pool_preset, h.layout, config.nearest_neighbor)
    reference = build_reference(config.reference, h, config.seed)
    result = run_adapt(h, pool, reference, build_adapt_config(config),
                       reference_label=config.reference.phys)
    trace_file = out_dir / f"{tag}_trace.csv"
    _write_csv(
        trace_file,
        ["iteration", "cost", "gradient_max", "selected"],
        _trace_rows(result),
    )
    results = {
        "run": _result_summary(result),
        "ansatz_labels": result.ansatz.labels,
        "angles": [float(t) for t in result.ansatz.thetas],
    }
    ok = result.converged or result.certified
    return results, [str(trace_file)], ok, result


def _sweep_references(config: ExperimentConfig, h) -> list[tuple[str, StateVector]]:
    refs = config.references if config.references else (config.reference,)
    out = []
    for i, ref in enumerate(refs):
        label = ref.phys if ref.aux == "zero" else f"{ref.aux}|{ref.phys}"
        out.append((label, build_reference(ref, h, config.seed + i)))
    return out


def _spectrum_worker(payload):
    config_text, lam, ref_index = payload
    config = parse_config(config_text)
    drive = build_drive(config)
    h = build_extended(drive, config.n_a)
    pool = build_pool(config.pool_preset, h.layout, config.nearest_neighbor)
    refs = _sweep_references(config, h)
    label, reference = refs[ref_index]
    adapt_config = replace(build_adapt_config(config), lam=float(lam))
    result = run_adapt(h, pool, reference, adapt_config, reference_label=label)
    return lam, label, _result_summary(result)


def _task_spectrum(config: ExperimentConfig, out_dir: Path, tag: str):
    drive = build_drive(config)
    h = build_extended(drive, config.n_a)
    grid = (
        np.asarray(config.lambda_grid)
        if config.lambda_grid is not None
        else default_lambda_grid(h.layout.L, h.omega)
    )
    refs = _sweep_references(config, h)
    rows = []
    if config.threads > 1:
        payloads = [
            (config.to_json(), float(lam), i)
            for i in range(len(refs))
            for lam in grid
        ]
        with ProcessPoolExecutor(max_workers=config.threads) as pool_exec:
            for lam, label, summary in pool_exec.map(_spectrum_worker, payloads):
                rows.append((lam, label, summary))
    else:
        pool = build_pool(config.pool_preset, h.layout, config.nearest_neighbor)
        entries = spectrum_sweep(h, pool, refs, build_adapt_config(config), grid)
        rows = [(e.lam, e.reference_label, _result_summary(e.result)) for e in entries]

    csv_rows = [
        (
            lam,
            label,
            s["energy"],
            s["cost"],
            s["certified"],
            s["converged"],
            s["iterations"],
        )
        for lam, label, s in rows
    ]
    sweep_file = out_dir / f"{tag}_sweep.csv"
    _write_csv(
        sweep_file,
        ["lambda", "reference", "energy", "cost", "certified", "converged",
         "iterations"],
        csv_rows,
    )
    # fold certified energies into the central zone and merge
    omega = h.omega
    tol = build_adapt_config(config).dedup_tol_factor * omega
    folded = sorted(
        omega / 2.0 - (omega / 2.0 - s["energy"]) % omega
        for _, _, s in rows
        if s["certified"]
    )
    merged: list[float] = []
    for v in folded:
        if not merged or v - merged[-1] > tol:
            merged.append(v)
    results = {
        "runs": [
            {"lam": lam, "reference": label, **s} for lam, label, s in rows
        ],
        "distinct_quasienergies": merged,
        "expected_count": 2**h.layout.L,
        "missing_count": max(0, 2**h.layout.L - len(merged)),
    }
    ok = any(s["certified"] for _, _, s in rows)
    return results, [str(sweep_file)], ok, None


def _task_deflation(config: ExperimentConfig, out_dir: Path, tag: str):
    drive = build_drive(config)
    h = build_extended(drive, config.n_a)
    pool = build_pool(config.pool_preset, h.layout, config.nearest_neighbor)
    reference = build_reference(config.reference, h, config.seed)
    results_list = run_deflation(
        h, pool, reference, build_adapt_config(config), config.k_states, config.shift
    )
    rows = [
        (
            i,
            r.energy,
            r.cost,
            r.certified,
            r.converged,
            r.iterations,
        )
        for i, r in enumerate(results_list)
    ]
    states_file = out_dir / f"{tag}_deflation.csv"
    _write_csv(
        states_file,
        ["state_index", "energy", "cost", "certified", "converged", "iterations"],
        rows,
    )
    results = {
        "runs": [_result_summary(r) for r in results_list],
        "shift": config.shift,
    }
    ok = any(r.certified for r in results_list)
    return results, [str(states_file)], ok, None


def _task_observe(config: ExperimentConfig, out_dir: Path, tag: str):
    drive = build_drive(config)
    h = build_extended(drive, config.n_a)
    pool = build_pool(config.pool_preset, h.layout, config.nearest_neighbor)
    reference = build_reference(config.reference, h, config.seed)
    result = run_adapt(h, pool, reference, build_adapt_config(config),
                       reference_label=config.reference.phys)

    period = drive.period
    times = np.linspace(0.0, config.periods * period, config.times_count)
    trotter_config = TrotterConfig(config.trotter_steps, config.trotter_order)
    psi0 = floquet_state_at_zero(result.state)

    files = []
    summaries = {}
    L = h.layout.L
    observables = {name: _observable_sum(name, L) for name in config.observables}
    dense_ops = {}
    from .pauli import to_dense

    for name, op in observables.items():
        dense_ops[name] = to_dense(op)

    floquet_rows, trotter_rows = [], []
    max_diff = {name: 0.0 for name in observables}
    evolved = trotter_states(drive, psi0, times, trotter_config)
    for t, psi_t in zip(times, evolved):
        for name, op in observables.items():
            via_floquet = expectation_in_time(result.state, op, h.omega, float(t))
            via_trotter = float((psi_t.conj() @ dense_ops[name] @ psi_t).real)
            floquet_rows.append((t / period, via_floquet, name, "floquet"))
            trotter_rows.append((t / period, via_trotter, name, "trotter"))
            max_diff[name] = max(max_diff[name], abs(via_floquet - via_trotter))

    header = ["t_over_T", "value", "observable", "method"]
    floquet_file = out_dir / f"{tag}_floquet.csv"
    trotter_file = out_dir / f"{tag}_trotter.csv"
    _write_csv(floquet_file, header, floquet_rows)
    _write_csv(trotter_file, header, trotter_rows)
    files += [str(floquet_file), str(trotter_file)]
    summaries = {
        "run": _result_summary(result),
        "max_abs_difference": max_diff,
        "times_count": config.times_count,
    }
    return summaries, files, result.certified, result


def _task_oracle(config: ExperimentConfig, out_dir: Path, tag: str):
    drive = build_drive(config)
    trotter_config = TrotterConfig(config.trotter_steps, config.trotter_order)
    try:
        eps, _ = exact_quasienergies(drive, trotter_config)
    except ValueError as err:
        raise TaskError(str(err), EXIT_ORACLE_LIMIT) from err
    rows = [(i, e, e / config.omega) for i, e in enumerate(eps)]
    table_file = out_dir / f"{tag}_quasienergies.csv"
    _write_csv(table_file, ["index", "epsilon", "epsilon_over_omega"], rows)
    results = {"quasienergies": [float(e) for e in eps]}
    return results, [str(table_file)], True, None


def _task_decompose(config: ExperimentConfig, out_dir: Path, tag: str):
    spec = AuxSpec(config.n_a)
    kind = config.decompose_kind
    try:
        if kind == "diagonal":
            op = a_diagonal(spec)
        elif kind == "shift":
            op = a_shift(config.decompose_r, spec)
        elif kind == "asym":
            op = a_asym(config.decompose_r, spec)
        elif kind == "symmetric":
            op = a_symmetric(config.decompose_r, spec)
        else:
            op = a_observable(config.n_a)
    except ValueError as err:
        raise TaskError(str(err), EXIT_CONFIG) from err
    lines = op.to_lines()
    out_file = out_dir / f"{tag}_decomposition.txt"
    header = f"# kind={kind} r={config.decompose_r} n_a={config.n_a}\n"
    _atomic_write(out_file, header + lines + "\n")
    results = {"kind": kind, "r": config.decompose_r, "terms": len(op),
               "lines": lines.splitlines()}
    return results, [str(out_file)], True, None


def _task_build(config: ExperimentConfig, out_dir: Path, tag: str):
    drive = build_drive(config)
    h = build_extended(drive, config.n_a)
    header = (
        f"# extended floquet hamiltonian\n"
        f"# n_a={config.n_a} L={h.layout.L} omega={config.omega!r}\n"
    )
    out_file = out_dir / f"{tag}_hamiltonian.txt"
    _atomic_write(out_file, header + h.op.to_lines() + "\n")
    results = {"terms": len(h.op), "width": h.op.width}
    return results, [str(out_file)], True, None


_TASKS = {
    "adapt": _task_adapt,
    "spectrum": _task_spectrum,
    "deflation": _task_deflation,
    "observe": _task_observe,
    "oracle": _task_oracle,
    "decompose": _task_decompose,
    "build": _task_build,
}


def run(config: ExperimentConfig, out: str | None = None, tag: str | None = None):
    """Dispatch a parsed configuration; returns (record, exit_code)."""
    out_dir = _resolve_out_dir(config, out)
    tag = tag or config.task
    started = time.time()
    results, files, ok, _ = _TASKS[config.task](config, out_dir, tag)
    record = ResultRecord(
        config=json.loads(config.to_json()),
        task=config.task,
        results=results,
        timings={"wall_seconds": time.time() - started},
        files=files,
        versions={
            "floqsim": __version__,
            "numpy": np.__version__,
            "record_schema": 1,
        },
    )
    record_file = out_dir / f"{tag}_record.json"
    _atomic_write(record_file, record.to_json() + "\n")
    return record, EXIT_OK if ok else EXIT_NOT_CONVERGED


# -- bundled figure reproductions ------------------------------------------------


def _xyz_config(**overrides) -> dict:
    base = {
        "task": "adapt",
        "model": "xyz",
        "model_params": {
            "L": 3,
            "j_bar": [3.7, 2.8, 3.9],
            "delta_j": [0.0, 0.0, 0.0],
            "b_bar": 2.9,
            "delta_b": 2.7,
        },
        "omega": 5.0,
        "n_a": 4,
        "reference": {"phys": "ddd"},
        "adapt": {"max_iterations": 40},
    }
    base.update(overrides)
    return base


def figure_configs(figure_id: str) -> list[tuple[str, dict]]:
    """Named desk-scale configurations mirroring the published panels."""
    if figure_id == "fig2":
        return [
            (f"fig2_na{n_a}", _xyz_config(n_a=n_a))
            for n_a in (2, 3, 4, 5)
        ]
    if figure_id == "fig3":
        out = []
        for panel, omega, n_a in (("a", 5.0, 4), ("b", 50.0, 3)):
            for dbz in (0.5, 1.5, 2.5):
                out.append(
                    (
                        f"fig3{panel}_dbz{dbz}",
                        _xyz_config(
                            model_params={
                                "L": 4,
                                "j_bar": [3.7, 2.8, 3.9],
                                "delta_j": [0.0, 0.0, 0.0],
                                "b_bar": 2.9,
                                "delta_b": dbz,
                            },
                            omega=omega,
                            n_a=n_a,
                            reference={"phys": "++++"},
                            adapt={"max_iterations": 300},
                        ),
                    )
                )
        return out
    if figure_id == "fig4":
        return [
            (
                "fig4_sweep",
                _xyz_config(
                    task="spectrum",
                    model_params={
                        "L": 3,
                        "j_bar": [3.7, 2.8, 3.9],
                        "delta_j": [1.9, 1.1, 1.2],
                        "b_bar": 2.9,
                        "delta_b": 2.7,
                    },
                    references=[{"phys": "+++"}, {"phys": "ddd"}],
                    adapt={"max_iterations": 200},
                ),
            )
        ]
    if figure_id == "fig5":
        return [
            (
                "fig5_observe",
                _xyz_config(
                    task="observe",
                    model_params={
                        "L": 4,
                        "j_bar": [3.7, 2.8, 3.9],
                        "delta_j": [1.9, 1.1, 1.2],
                        "b_bar": 2.9,
                        "delta_b": 2.7,
                    },
                    n_a=4,
                    reference={"phys": "++++"},
                    adapt={"max_iterations": 300},
                    times={"count": 101, "periods": 1.0},
                ),
            )
        ]
    if figure_id == "figD1":
        return [
            (
                "figD1_deflation",
                _xyz_config(
                    task="deflation",
                    model_params={
                        "L": 3,
                        "j_bar": [3.7, 2.8, 3.9],
                        "delta_j": [1.9, 1.1, 1.2],
                        "b_bar": 2.9,
                        "delta_b": 2.7,
                    },
                    reference={"aux": "++++", "phys": "+++"},
                    pool={"preset": "two_local_total"},
                    adapt={"max_iterations": 200, "batching": True},
                    k_states=9,
                    shift=0.6,
                ),
            )
        ]
    raise TaskError(f"unknown figure id {figure_id!r}", EXIT_CONFIG)


def _oracle_comparison(config: ExperimentConfig, energies: list[float]):
    """Match certified energies to the exact quasienergies; relative errors."""
    drive = build_drive(config)
    eps, _ = exact_quasienergies(
        drive, TrotterConfig(config.trotter_steps, config.trotter_order)
    )
    rows = []
    omega = config.omega
    for e in energies:
        folded = omega / 2.0 - (omega / 2.0 - e) % omega
        nearest = eps[np.argmin(np.abs(eps - folded))]
        rel = abs(folded - nearest) / abs(nearest) if nearest != 0 else float("inf")
        rows.append((e, folded, float(nearest), abs(folded - nearest), rel))
    return eps, rows


def reproduce(
    figure_id: str, out: str | None = None, threads: int = 1
) -> list[ResultRecord]:
    """Run the bundled configurations for one figure and write comparisons."""
    records = []
    out_dir = Path(out or os.environ.get(OUT_DIR_ENV, "results")) / figure_id
    comparison_rows = []
    for tag, raw in figure_configs(figure_id):
        raw = dict(raw)
        raw["threads"] = threads
        config = parse_config(json.dumps(raw))
        record, _ = run(config, out=str(out_dir), tag=tag)
        records.append(record)

        if config.task == "adapt":
            summary = record.results["run"]
            if summary["certified"]:
                _, rows = _oracle_comparison(config, [summary["energy"]])
                for row in rows:
                    comparison_rows.append((tag, *row))
        elif config.task == "spectrum":
            found = record.results["distinct_quasienergies"]
            eps, rows = _oracle_comparison(config, found)
            for row in rows:
                comparison_rows.append((tag, *row))
            comparison_rows.append(
                (f"{tag}_missing", float("nan"), float("nan"), float("nan"),
                 float("nan"), record.results["missing_count"])
            )
        elif config.task == "deflation":
            energies = [
                r["energy"] for r in record.results["runs"] if r["certified"]
            ]
            _, rows = _oracle_comparison(config, energies)
            for row in rows:
                comparison_rows.append((tag, *row))

    if comparison_rows:
        _write_csv(
            out_dir / "comparison.csv",
            ["run", "energy", "folded", "exact", "abs_error", "rel_error"],
            comparison_rows,
        )
    return records
