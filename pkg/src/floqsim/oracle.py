"""Ground-truth engine: Trotterized evolution and exact quasienergies.

The Floquet unitary U(T) is built as an ordered product of exact
exponentials of the sampled Hamiltonian, so every factor is unitary and the
only error is the time discretization.  Quasienergies come from the
eigenphases of U(T) mapped through epsilon = -phi / T and folded into
(-Omega/2, Omega/2]; the branch of the matrix logarithm is therefore fixed
eigenphase-wise, never through a dense log routine.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, schur

from .drives import DriveSpec
from .hamiltonian import ExtendedFloquetHamiltonian
from .pauli import PauliSum, to_dense

TROTTER_QUBIT_LIMIT = 10
EXTENDED_QUBIT_LIMIT = 12


@dataclass(frozen=True)
class TrotterConfig:
    steps_per_period: int = 2000
    order: int = 2

    def __post_init__(self):
        if self.steps_per_period < 1:
            raise ValueError("need at least one step per period")
        if self.order not in (1, 2):
            raise ValueError(f"supported orders are 1 and 2, got {self.order}")


def hamiltonian_at(drive: DriveSpec, t: float) -> PauliSum:
    """Instantaneous Hamiltonian sum_r e^{i r Omega t} H^(r)."""
    total = PauliSum.zero(drive.L)
    for r, op in drive.modes.items():
        total = total + cmath.exp(1j * r * drive.omega * t) * op
    return total


def _dense_hamiltonian_at(drive: DriveSpec, dense_modes, t: float) -> np.ndarray:
    out = np.zeros_like(dense_modes[0][1])
    for r, mat in dense_modes:
        out = out + cmath.exp(1j * r * drive.omega * t) * mat
    return out


def trotter_propagator(
    drive: DriveSpec, t_final: float, config: TrotterConfig = TrotterConfig()
) -> np.ndarray:
    """U(t_final) as an ordered product of exact short-time exponentials.

    Order 1 samples the Hamiltonian at the left endpoint of each step,
    order 2 at the midpoint.
    """
    if drive.L > TROTTER_QUBIT_LIMIT:
        raise ValueError(
            f"dense propagation limited to {TROTTER_QUBIT_LIMIT} physical "
            f"qubits, got {drive.L}"
        )
    dim = 1 << drive.L
    if t_final == 0.0:
        return np.eye(dim, dtype=complex)
    n_steps = max(1, round(config.steps_per_period * abs(t_final) / drive.period))
    dt = t_final / n_steps
    dense_modes = [(r, to_dense(op)) for r, op in drive.modes.items()]
    u = np.eye(dim, dtype=complex)
    offset = 0.5 if config.order == 2 else 0.0
    for k in range(n_steps):
        h = _dense_hamiltonian_at(drive, dense_modes, (k + offset) * dt)
        evals, vecs = eigh(h)
        u = (vecs * np.exp(-1j * evals * dt)) @ vecs.conj().T @ u
    return u


def floquet_unitary(
    drive: DriveSpec, config: TrotterConfig = TrotterConfig()
) -> np.ndarray:
    return trotter_propagator(drive, drive.period, config)


def trotter_states(
    drive: DriveSpec,
    psi0: np.ndarray,
    times: np.ndarray,
    config: TrotterConfig = TrotterConfig(),
) -> np.ndarray:
    """psi(t) on an increasing time grid by one incremental propagation.

    Snapshots are taken while stepping once from 0 to max(times) with the
    configured resolution, so a dense grid costs the same as a single
    propagation to the final time.  Grid times are rounded to the nearest
    step; steps_per_period should comfortably oversample the grid.
    """
    if drive.L > TROTTER_QUBIT_LIMIT:
        raise ValueError(
            f"dense propagation limited to {TROTTER_QUBIT_LIMIT} physical "
            f"qubits, got {drive.L}"
        )
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return np.zeros((0, psi0.size), dtype=complex)
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be nonnegative and nondecreasing")
    dt = drive.period / config.steps_per_period
    marks = np.rint(times / dt).astype(int)
    dense_modes = [(r, to_dense(op)) for r, op in drive.modes.items()]
    offset = 0.5 if config.order == 2 else 0.0
    out = np.empty((times.size, psi0.size), dtype=complex)
    psi = np.asarray(psi0, dtype=complex).copy()
    step = 0
    for i, mark in enumerate(marks):
        while step < mark:
            h = _dense_hamiltonian_at(drive, dense_modes, (step + offset) * dt)
            evals, vecs = eigh(h)
            psi = vecs @ (np.exp(-1j * evals * dt) * (vecs.conj().T @ psi))
            step += 1
        out[i] = psi
    return out


def fold_quasienergy(value, omega: float):
    """Fold energies into the central zone (-Omega/2, Omega/2]."""
    return omega / 2.0 - np.mod(omega / 2.0 - np.asarray(value), omega)


def exact_quasienergies(
    drive: DriveSpec, config: TrotterConfig = TrotterConfig()
) -> tuple[np.ndarray, np.ndarray]:
    """Sorted central-zone quasienergies of U(T) and matching eigenvectors.

    Returns (epsilons, vectors) with vectors[:, k] the Floquet state at
    t = 0 for epsilons[k].  Degenerate eigenphases come back as an arbitrary
    orthonormal basis of their subspace (Schur form of the unitary).
    """
    u_f = floquet_unitary(drive, config)
    t_mat, q_mat = schur(u_f, output="complex")
    phases = np.angle(np.diag(t_mat))
    eps = fold_quasienergy(-phases / drive.period, drive.omega)
    order = np.argsort(eps)
    return eps[order], q_mat[:, order]


def dense_extended_spectrum(
    h: ExtendedFloquetHamiltonian,
) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of the dense extended Hamiltonian (cross-check)."""
    if h.layout.total > EXTENDED_QUBIT_LIMIT:
        raise ValueError(
            f"dense diagonalization limited to {EXTENDED_QUBIT_LIMIT} qubits, "
            f"got {h.layout.total}"
        )
    return eigh(to_dense(h.op))


def central_zone(values: np.ndarray, omega: float) -> np.ndarray:
    """Entries lying in the central zone (-Omega/2, Omega/2], sorted."""
    values = np.asarray(values)
    picked = values[(values > -omega / 2.0) & (values <= omega / 2.0)]
    return np.sort(picked)
