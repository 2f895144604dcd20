"""Adaptive eigenstate preparation on the shifted-squared cost.

The loop grows an ansatz one pool generator at a time: the generator with
the largest commutator gradient i<[O, M]> is appended with angle zero, all
angles are re-optimized by a quasi-Newton local search with exact
reverse-mode gradients, and the loop stops when every pool gradient falls
below the threshold or the iteration cap is hit.  A result is certified as
an eigenstate when |<H_F> - lam| agrees with sqrt(<(H_F - lam)^2>).

Sweeping lam over a grid extracts the central-zone quasienergy spectrum;
the deflation variant instead keeps lam fixed and penalizes overlap with
previously found states through projector terms added to the cost.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .hamiltonian import ExtendedFloquetHamiltonian, RegisterLayout
from .pauli import PauliString, PauliSum, _fwht
from .statevector import (
    Ansatz,
    CompiledPauliSum,
    StateVector,
    _indices,
    _sign_vector,
    _string_exp_inplace,
    compiled,
)

_I_POW = (1 + 0j, 1j, -1 + 0j, -1j)


# -- operator pools ------------------------------------------------------------


@dataclass(frozen=True)
class OperatorPool:
    """Labelled Hermitian generators on the full register."""

    labels: tuple[str, ...]
    generators: tuple[PauliSum, ...]

    def __post_init__(self):
        for label, gen in zip(self.labels, self.generators):
            if not gen or not gen.is_hermitian:
                raise ValueError(f"pool operator {label} must be Hermitian and nonzero")

    def __len__(self) -> int:
        return len(self.generators)


def _aux_strings(layout: RegisterLayout):
    """All nonidentity strings supported on the auxiliary register."""
    for x in range(layout.aux_dim):
        for z in range(layout.aux_dim):
            if x or z:
                yield x << layout.L, z << layout.L


def _two_local_strings(qubits: Sequence[int], width: int):
    """P_a P_b over qubit pairs, P in {X, Y, Z}, identity elsewhere."""
    masks = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
    for a, b in itertools.combinations(qubits, 2):
        for la, lb in itertools.product("XYZ", repeat=2):
            xa, za = masks[la]
            xb, zb = masks[lb]
            yield (xa << a) | (xb << b), (za << a) | (zb << b)


def _phys_pairs(layout: RegisterLayout, nearest_neighbor: bool):
    if nearest_neighbor:
        return [(j, j + 1) for j in range(layout.L - 1)]
    return list(itertools.combinations(range(layout.L), 2))


def _pool_from_keys(width: int, keys) -> OperatorPool:
    labels, gens = [], []
    for x, z in keys:
        string = PauliString(x, z, width)
        labels.append(string.letters)
        gens.append(PauliSum(width, {(x, z): 1.0}))
    return OperatorPool(labels=tuple(labels), generators=tuple(gens))


def build_mixed_pool(
    layout: RegisterLayout, nearest_neighbor: bool = False
) -> OperatorPool:
    """Auxiliary-register strings plus two-local physical strings (disjoint union)."""
    if layout.L < 2:
        raise ValueError("the two-local physical family needs at least two qubits")
    keys = list(_aux_strings(layout))
    masks = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
    for a, b in _phys_pairs(layout, nearest_neighbor):
        for la, lb in itertools.product("XYZ", repeat=2):
            xa, za = masks[la]
            xb, zb = masks[lb]
            keys.append(((xa << a) | (xb << b), (za << a) | (zb << b)))
    return _pool_from_keys(layout.total, keys)


def build_mixed_product_pool(
    layout: RegisterLayout, nearest_neighbor: bool = False
) -> OperatorPool:
    """Products of auxiliary strings with two-local physical strings.

    Every generator is (aux Pauli) x (two-local XYZ or identity); this is the
    pool that can entangle the two registers and is the default for
    eigenstate preparation runs.
    """
    if layout.L < 2:
        raise ValueError("the two-local physical family needs at least two qubits")
    phys_keys = [(0, 0)]
    masks = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
    for a, b in _phys_pairs(layout, nearest_neighbor):
        for la, lb in itertools.product("XYZ", repeat=2):
            xa, za = masks[la]
            xb, zb = masks[lb]
            phys_keys.append(((xa << a) | (xb << b), (za << a) | (zb << b)))
    keys = []
    for xa in range(layout.aux_dim):
        for za in range(layout.aux_dim):
            for xp, zp in phys_keys:
                x = (xa << layout.L) | xp
                z = (za << layout.L) | zp
                if x or z:
                    keys.append((x, z))
    return _pool_from_keys(layout.total, keys)


def build_two_local_total_pool(layout: RegisterLayout) -> OperatorPool:
    """Two-local XYZ strings over all register qubits (auxiliary included)."""
    if layout.total < 2:
        raise ValueError("need at least two qubits in total")
    return _pool_from_keys(
        layout.total, _two_local_strings(range(layout.total), layout.total)
    )


POOL_PRESETS = {
    "mixed": build_mixed_pool,
    "mixed_product": build_mixed_product_pool,
    "two_local_total": lambda layout, nearest_neighbor=False: build_two_local_total_pool(
        layout
    ),
}


def build_pool(
    preset: str, layout: RegisterLayout, nearest_neighbor: bool = False
) -> OperatorPool:
    try:
        builder = POOL_PRESETS[preset]
    except KeyError:
        raise ValueError(
            f"unknown pool preset {preset!r}; choose from {sorted(POOL_PRESETS)}"
        ) from None
    return builder(layout, nearest_neighbor=nearest_neighbor)


# -- cost operator --------------------------------------------------------------


class CostOperator:
    """Applies M = (H - lam)^2 (+ optional projector penalties) to amplitudes.

    With a materialized H^2 the application is H^2 psi - 2 lam H psi +
    lam^2 psi; otherwise H is applied twice (the term-count fallback).
    Projectors contribute beta <state|psi> |state>.
    """

    def __init__(
        self,
        h_compiled: CompiledPauliSum,
        lam: float,
        h2_compiled: CompiledPauliSum | None = None,
        projectors: Sequence[tuple[float, np.ndarray]] = (),
    ):
        self.h = h_compiled
        self.h2 = h2_compiled
        self.lam = float(lam)
        self.projectors = [(float(b), np.asarray(v)) for b, v in projectors]

    @classmethod
    def from_sum(cls, op: PauliSum) -> "CostOperator":
        """Wrap an already-shifted, already-squared Hermitian sum."""
        if not op.is_hermitian:
            raise ValueError("cost operator must be Hermitian")
        return cls(h_compiled=None, lam=0.0, h2_compiled=compiled(op))

    def deflated(self, states: Sequence[np.ndarray], betas: Sequence[float]):
        return CostOperator(
            self.h,
            self.lam,
            self.h2,
            list(self.projectors) + list(zip(betas, states)),
        )

    def base_apply(self, amps: np.ndarray) -> np.ndarray:
        """(H - lam)^2 amps without projector penalties."""
        lam = self.lam
        if self.h2 is not None:
            out = self.h2.apply(amps)
            if lam != 0.0:
                out -= (2.0 * lam) * self.h.apply(amps)
                out += (lam * lam) * amps
            return out
        tmp = self.h.apply(amps)
        if lam != 0.0:
            tmp -= lam * amps
        out = self.h.apply(tmp)
        if lam != 0.0:
            out -= lam * tmp
        return out

    def apply(self, amps: np.ndarray) -> np.ndarray:
        out = self.base_apply(amps)
        for beta, state in self.projectors:
            out += beta * np.vdot(state, amps) * state
        return out

    def expectation(self, amps: np.ndarray) -> float:
        return float(np.vdot(amps, self.apply(amps)).real)

    def base_expectation(self, amps: np.ndarray) -> float:
        return float(np.vdot(amps, self.base_apply(amps)).real)


def make_cost(
    h: ExtendedFloquetHamiltonian,
    lam: float,
    h_squared: PauliSum | None = None,
    projectors: Sequence[tuple[float, np.ndarray]] = (),
    materialize: bool = True,
) -> CostOperator:
    h2c = None
    if materialize:
        if h_squared is None:
            h_squared = h.op @ h.op
        h2c = compiled(h_squared)
    return CostOperator(compiled(h.op), lam, h2c, projectors)


def _as_cost(cost_op) -> CostOperator:
    if isinstance(cost_op, PauliSum):
        return CostOperator.from_sum(cost_op)
    return cost_op


# -- gradients -------------------------------------------------------------------


def pool_gradients(state: StateVector, cost_op, pool: OperatorPool) -> np.ndarray:
    """g_l = i <[O_l, M]> = -2 Im <psi|O_l|M psi>, one entry per pool operator."""
    cost = _as_cost(cost_op)
    phi = cost.apply(state.amps)
    out = np.empty(len(pool))
    for l, gen in enumerate(pool.generators):
        if gen.width != state.layout.total:
            raise ValueError(
                f"pool operator width {gen.width} != register width "
                f"{state.layout.total}"
            )
        out[l] = -2.0 * np.vdot(state.amps, compiled(gen).apply(phi)).imag
    return out


def deflation_gradients(
    state: StateVector,
    cost_op,
    pool: OperatorPool,
    prior_states: Sequence[StateVector],
    betas: Sequence[float],
) -> np.ndarray:
    """Pool gradients of the overlap-penalized cost, by the explicit formula.

    The correction per operator is 2 sum_i beta_i (Re x_i Im y_i -
    Im x_i Re y_i) with x_i = <Psi_i|psi> and y_i = <Psi_i|O_l|psi>.
    """
    cost = _as_cost(cost_op)
    base = np.empty(len(pool))
    phi = cost.base_apply(state.amps)
    for l, gen in enumerate(pool.generators):
        base[l] = -2.0 * np.vdot(state.amps, compiled(gen).apply(phi)).imag
    if not prior_states:
        return base
    corrections = np.zeros(len(pool))
    for prior, beta in zip(prior_states, betas):
        x = np.vdot(prior.amps, state.amps)
        for l, gen in enumerate(pool.generators):
            y = np.vdot(prior.amps, compiled(gen).apply(state.amps))
            corrections[l] += (
                2.0 * beta * (x.real * y.imag - x.imag * y.real)
            )
    return base + corrections


class PoolGradientKernel:
    """Batched pool gradients via a Walsh-Hadamard transform per X mask.

    For single-string pools, <psi|O|phi> for every Z mask sharing one X mask
    is a single transform of conj(psi[c ^ x]) * phi[c]; the full pool costs
    a handful of array passes per call instead of one pass per operator.
    """

    def __init__(self, pool: OperatorPool, dim: int):
        self.dim = dim
        self.n = len(pool)
        entries = []  # (x, z, weight, pool_index)
        for l, gen in enumerate(pool.generators):
            ((x, z), c), = gen.terms.items()
            weight = c.real * _I_POW[(x & z).bit_count() & 3]
            entries.append((x, z, weight, l))
        xs = sorted({x for x, _, _, _ in entries})
        self.perms = np.empty((len(xs), dim), dtype=np.int64)
        idx = _indices(dim)
        row_of = {}
        for row, x in enumerate(xs):
            self.perms[row] = idx ^ x
            row_of[x] = row
        self.rows = np.array([row_of[x] for x, _, _, _ in entries])
        self.zs = np.array([z for _, z, _, _ in entries])
        self.weights = np.array([w for _, _, w, _ in entries], dtype=complex)
        self.order = np.array([l for _, _, _, l in entries])

    def gradients(self, psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
        mat = psi.conj()[self.perms] * phi[None, :]
        transformed = _fwht(mat)
        vals = self.weights * transformed[self.rows, self.zs]
        out = np.empty(self.n)
        out[self.order] = -2.0 * vals.imag
        return out


def _pool_is_single_string(pool: OperatorPool) -> bool:
    return all(len(gen) == 1 for gen in pool.generators)


# -- ansatz kernel ----------------------------------------------------------------


class AnsatzKernel:
    """Sequential exponentials with reverse-mode cost gradients.

    Single-string generators run through the compiled sweeps in _kernels;
    ansätze containing multi-term generators fall back to the statevector
    module's generic exponential path.
    """

    def __init__(self, reference: np.ndarray):
        self.reference = np.asarray(reference, dtype=complex)
        self.dim = self.reference.size
        self.strings: list[tuple[int, int, float] | None] = []
        self.generics: list[PauliSum | None] = []
        self._xs: list[int] = []
        self._ws: list[complex] = []
        self._cs: list[float] = []
        self._sgn_rows: list[np.ndarray] = []
        self._stacked = None

    def __len__(self) -> int:
        return len(self.strings)

    @property
    def all_strings(self) -> bool:
        return all(entry is not None for entry in self.strings)

    def append(self, generator: PauliSum) -> None:
        self._stacked = None
        if len(generator) == 1:
            ((x, z), c), = generator.terms.items()
            self.strings.append((x, z, c.real))
            self.generics.append(None)
            self._xs.append(x)
            self._ws.append(_I_POW[(x & z).bit_count() & 3])
            self._cs.append(c.real)
            self._sgn_rows.append(_sign_vector(z, self.dim).astype(np.int8))
        else:
            self.strings.append(None)
            self.generics.append(generator)

    def _arrays(self):
        if self._stacked is None:
            self._stacked = (
                np.asarray(self._xs, dtype=np.int64),
                np.asarray(self._ws, dtype=complex),
                np.stack(self._sgn_rows) if self._sgn_rows else np.zeros((0, self.dim), np.int8),
                np.asarray(self._cs, dtype=float),
            )
        return self._stacked

    # -- generic-generator fallback helpers --

    def _apply_exp_k(self, amps: np.ndarray, k: int, theta: float) -> np.ndarray:
        if self.strings[k] is not None:
            x, z, c = self.strings[k]
            _string_exp_inplace(amps, x, z, c, theta)
            return amps
        from .statevector import _multi_term_exp, _terms_mutually_commute

        gen = self.generics[k]
        if _terms_mutually_commute(gen):
            for (x, z), c in gen.terms.items():
                _string_exp_inplace(amps, x, z, c.real, theta)
            return amps
        return _multi_term_exp(amps, gen, theta)

    def _apply_gen_k(self, amps: np.ndarray, k: int) -> np.ndarray:
        if self.strings[k] is not None:
            x, z, c = self.strings[k]
            w = c * _I_POW[(x & z).bit_count() & 3]
            scaled = w * _sign_vector(z, self.dim) * amps
            return scaled if x == 0 else scaled[_indices(self.dim) ^ x]
        return compiled(self.generics[k]).apply(amps)

    def prepare(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        amps = self.reference.copy()
        if self.all_strings:
            xs, ws, sgns, cs = self._arrays()
            _kernels.prepare_inplace(amps, xs, ws, sgns, cs, thetas)
            return amps
        for k, theta in enumerate(thetas):
            amps = self._apply_exp_k(amps, k, float(theta))
        return amps

    def value_and_grad(self, thetas: np.ndarray, cost: CostOperator):
        """Cost and its exact gradient at the given angles.

        The backward pass walks psi and chi = M psi together through the
        inverse exponentials; d cost / d theta_k = 2 Im <chi_k|G_k|psi_k>.
        """
        thetas = np.asarray(thetas, dtype=float)
        psi = self.prepare(thetas)
        chi = cost.apply(psi)
        value = float(np.vdot(psi, chi).real)
        grads = np.empty(len(thetas))
        if self.all_strings:
            xs, ws, sgns, cs = self._arrays()
            _kernels.backward_gradients(psi, chi, xs, ws, sgns, cs, thetas, grads)
            return value, grads
        psi = psi.copy()
        for k in range(len(thetas) - 1, -1, -1):
            grads[k] = 2.0 * np.vdot(chi, self._apply_gen_k(psi, k)).imag
            theta = -float(thetas[k])
            psi = self._apply_exp_k(psi, k, theta)
            chi = self._apply_exp_k(chi, k, theta)
        return value, grads


# -- configuration and results -----------------------------------------------------


@dataclass(frozen=True)
class AdaptConfig:
    """Loop thresholds and run options.

    eps is the pool-gradient stopping threshold; cert_tol defaults to
    1e-6 * omega^2 when unset.  betas are deflation weights (scalar or one
    per prior state), defaulting to omega^2.
    """

    eps: float = 1e-6
    max_iterations: int = 300
    inner_gtol: float = 1e-10
    inner_maxfun: int = 20000
    lam: float = 0.0
    betas: float | tuple[float, ...] | None = None
    tie_break: str = "lowest_index"
    cert_tol: float | None = None
    materialize_products_limit: int = 2_000_000
    batching: bool = False
    dedup_tol_factor: float = 1e-4

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("gradient threshold must be positive")
        if self.tie_break != "lowest_index":
            raise ValueError(f"unknown tie-break rule {self.tie_break!r}")
        if self.betas is not None:
            betas = (
                (self.betas,) if isinstance(self.betas, (int, float)) else self.betas
            )
            if any(b <= 0 for b in betas):
                raise ValueError("deflation weights must be positive")

    def resolve_cert_tol(self, omega: float) -> float:
        return self.cert_tol if self.cert_tol is not None else 1e-6 * omega**2


@dataclass
class IterationRecord:
    iteration: int
    cost: float
    gradient_max: float
    selected: tuple[str, ...]


@dataclass
class AdaptResult:
    """Converged (or capped) adaptive run with its certification verdict."""

    ansatz: Ansatz
    state: StateVector
    cost: float
    energy: float
    lam: float
    certified: bool
    converged: bool
    trace: list[IterationRecord]
    reference_label: str = ""

    @property
    def iterations(self) -> int:
        """Completed loop iterations (operator count can differ when batching)."""
        return len(self.trace) - 1


# -- the loop ----------------------------------------------------------------------


def vqe_optimize(ansatz: Ansatz, cost_op, config: AdaptConfig):
    """Quasi-Newton re-optimization of all ansatz angles.

    Returns (angles, cost, converged); the returned point is never worse
    than the starting one.
    """
    cost = _as_cost(cost_op)
    kernel = AnsatzKernel(ansatz.reference.amps)
    for gen in ansatz.generators:
        kernel.append(gen)
    thetas0 = np.asarray(ansatz.thetas, dtype=float)
    return _optimize_kernel(kernel, thetas0, cost, config)


def _optimize_kernel(
    kernel: AnsatzKernel, thetas0: np.ndarray, cost: CostOperator, config: AdaptConfig
):
    if thetas0.size == 0:
        return thetas0, float(np.vdot(kernel.reference, cost.apply(kernel.reference)).real), True
    start_value, _ = kernel.value_and_grad(thetas0, cost)
    res = minimize(
        kernel.value_and_grad,
        thetas0,
        args=(cost,),
        jac=True,
        method="L-BFGS-B",
        options={
            "ftol": 1e-16,
            "gtol": config.inner_gtol,
            "maxfun": config.inner_maxfun,
            "maxiter": config.inner_maxfun,
        },
    )
    if res.fun <= start_value:
        return np.asarray(res.x, dtype=float), float(res.fun), bool(res.success)
    return thetas0, float(start_value), False


def _select_operators(
    gradients: np.ndarray, pool: OperatorPool, config: AdaptConfig, eps: float
) -> list[int]:
    """Largest-gradient index; with batching, a greedy disjoint-support batch."""
    best = int(np.argmax(np.abs(gradients)))
    if not config.batching:
        return [best]
    picked = [best]
    support = pool.generators[best].terms
    covered = 0
    for (x, z) in support:
        covered |= x | z
    order = np.argsort(-np.abs(gradients))
    for l in order:
        l = int(l)
        if l == best or abs(gradients[l]) < eps:
            continue
        mask = 0
        for (x, z) in pool.generators[l].terms:
            mask |= x | z
        if mask & covered:
            continue
        picked.append(l)
        covered |= mask
    return picked


def run_adapt(
    h: ExtendedFloquetHamiltonian,
    pool: OperatorPool,
    reference: StateVector,
    config: AdaptConfig,
    *,
    h_squared: PauliSum | None = None,
    prior_states: Sequence[StateVector] = (),
    betas: Sequence[float] = (),
    reference_label: str = "",
) -> AdaptResult:
    """Grow and optimize an ansatz against <(H_F - lam)^2>.

    prior_states/betas add deflation projectors to the optimized cost; the
    reported cost and the certification test always use the projector-free
    shifted-squared expectation.
    """
    lam = config.lam
    materialize = len(h.op) ** 2 <= config.materialize_products_limit
    cost = make_cost(
        h,
        lam,
        h_squared=h_squared,
        projectors=[(b, s.amps) for b, s in zip(betas, prior_states)],
        materialize=materialize,
    )
    hf = compiled(h.op)

    kernel = AnsatzKernel(reference.amps)
    thetas = np.zeros(0)
    labels: list[str] = []
    generators: list[PauliSum] = []
    trace: list[IterationRecord] = []

    fast_grad = (
        PoolGradientKernel(pool, h.layout.dim)
        if _pool_is_single_string(pool)
        else None
    )

    psi = reference.amps
    converged = False
    selected: tuple[str, ...] = ()
    for iteration in range(config.max_iterations + 1):
        phi = cost.apply(psi)
        current = float(np.vdot(psi, phi).real)
        if fast_grad is not None:
            grads = fast_grad.gradients(psi, phi)
        else:
            grads = np.array(
                [
                    -2.0 * np.vdot(psi, compiled(gen).apply(phi)).imag
                    for gen in pool.generators
                ]
            )
        gmax = float(np.max(np.abs(grads)))
        trace.append(IterationRecord(iteration, current, gmax, selected))
        if gmax < config.eps:
            converged = True
            break
        if iteration == config.max_iterations:
            break
        picks = _select_operators(grads, pool, config, config.eps)
        selected = tuple(pool.labels[l] for l in picks)
        for l in picks:
            kernel.append(pool.generators[l])
            generators.append(pool.generators[l])
            labels.append(pool.labels[l])
        thetas = np.concatenate([thetas, np.zeros(len(picks))])
        thetas, _, _ = _optimize_kernel(kernel, thetas, cost, config)
        psi = kernel.prepare(thetas)

    state = StateVector(psi, h.layout)
    base_cost = cost.base_expectation(psi)
    if base_cost < -1e-9 * max(1.0, h.omega**2):
        raise RuntimeError(f"shifted-squared expectation came out negative: {base_cost}")
    base_cost = max(base_cost, 0.0)
    energy = float(np.vdot(psi, hf.apply(psi)).real)
    cert_tol = config.resolve_cert_tol(h.omega)
    certified = abs(abs(energy - lam) - np.sqrt(max(base_cost, 0.0))) <= cert_tol
    ansatz = Ansatz(
        reference=reference,
        generators=generators,
        thetas=list(map(float, thetas)),
        labels=labels,
    )
    return AdaptResult(
        ansatz=ansatz,
        state=state,
        cost=base_cost,
        energy=energy,
        lam=lam,
        certified=certified,
        converged=converged,
        trace=trace,
        reference_label=reference_label,
    )


# -- spectrum extraction -------------------------------------------------------------


def default_lambda_grid(L: int, omega: float) -> np.ndarray:
    """lam_j = (j - 2^{L+1}) Omega / 2^{L+2}, j = 1 .. 2^{L+2} - 1."""
    j = np.arange(1, 2 ** (L + 2))
    return (j - 2 ** (L + 1)) * omega / 2 ** (L + 2)


@dataclass
class SweepEntry:
    lam: float
    reference_label: str
    result: AdaptResult


def spectrum_sweep(
    h: ExtendedFloquetHamiltonian,
    pool: OperatorPool,
    references: Sequence[tuple[str, StateVector]],
    config: AdaptConfig,
    lambda_grid: Sequence[float] | None = None,
) -> list[SweepEntry]:
    """One adaptive run per (lambda, reference) over the central zone."""
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(h.layout.L, h.omega)
    for lam in lambda_grid:
        if not (-h.omega / 2.0 < lam <= h.omega / 2.0):
            raise ValueError(f"shift {lam} outside the central zone")
    h_squared = None
    if len(h.op) ** 2 <= config.materialize_products_limit:
        h_squared = h.op @ h.op
    entries = []
    for label, reference in references:
        for lam in lambda_grid:
            result = run_adapt(
                h,
                pool,
                reference,
                replace(config, lam=float(lam)),
                h_squared=h_squared,
                reference_label=label,
            )
            entries.append(SweepEntry(float(lam), label, result))
    return entries


def distinct_quasienergies(
    entries: Sequence[SweepEntry], omega: float, tol: float | None = None
) -> np.ndarray:
    """Certified quasienergies folded into the central zone, deduplicated.

    Runs may certify an eigenstate from a neighbouring zone copy; its energy
    is the central value shifted by a multiple of omega, so folding before
    merging loses nothing.
    """
    if tol is None:
        tol = 1e-4 * omega
    folded = [
        omega / 2.0 - (omega / 2.0 - e.result.energy) % omega
        for e in entries
        if e.result.certified
    ]
    merged: list[float] = []
    for v in sorted(folded):
        if not merged or v - merged[-1] > tol:
            merged.append(v)
    return np.asarray(merged)


def run_deflation(
    h: ExtendedFloquetHamiltonian,
    pool: OperatorPool,
    reference: StateVector,
    config: AdaptConfig,
    k_states: int,
    shift: float,
) -> list[AdaptResult]:
    """Sequentially collect k states of (H_F - shift)^2 with overlap penalties."""
    if not (-h.omega / 2.0 < shift < h.omega / 2.0):
        raise ValueError(f"shift {shift} outside the central zone")
    if config.betas is None:
        betas = [h.omega**2] * k_states
    elif isinstance(config.betas, (int, float)):
        betas = [float(config.betas)] * k_states
    else:
        betas = [float(b) for b in config.betas]
        if len(betas) < k_states - 1:
            raise ValueError(
                f"need at least {k_states - 1} deflation weights, got {len(betas)}"
            )
    h_squared = None
    if len(h.op) ** 2 <= config.materialize_products_limit:
        h_squared = h.op @ h.op
    cfg = replace(config, lam=float(shift))
    results: list[AdaptResult] = []
    for i in range(k_states):
        result = run_adapt(
            h,
            pool,
            reference,
            cfg,
            h_squared=h_squared,
            prior_states=[r.state for r in results],
            betas=betas[: len(results)],
        )
        results.append(result)
    return results
