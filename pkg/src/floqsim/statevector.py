"""Dense statevector simulation over the auxiliary (x) physical register.

Amplitudes live in a flat complex array indexed by aux_index * 2^L +
phys_index.  Operators are applied string-wise through their X/Z bitmasks;
no operator matrix is ever materialized.  For repeated use a PauliSum is
compiled once into per-X-mask weight vectors: all strings sharing an X mask
combine into a single diagonal weight, so applying the sum costs one
scaled permutation per distinct X mask instead of one pass per string.

Norms are asserted, never silently restored: renormalization would mask
bugs in the unitary paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np
from scipy.linalg import eigh

from .hamiltonian import RegisterLayout
from .pauli import DENSE_QUBIT_LIMIT, PauliSum, to_dense

NORM_TOL = 1e-10

_I_POW = (1 + 0j, 1j, -1 + 0j, -1j)

_QUBIT_STATES = {
    "u": np.array([1.0, 0.0], dtype=complex),
    "d": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
}

_ARANGE_CACHE: dict[int, np.ndarray] = {}


def _indices(dim: int) -> np.ndarray:
    arr = _ARANGE_CACHE.get(dim)
    if arr is None:
        arr = np.arange(dim, dtype=np.int64)
        _ARANGE_CACHE[dim] = arr
    return arr


def _sign_vector(z: int, dim: int) -> np.ndarray:
    """(-1)^{popcount(c & z)} over all basis indices c."""
    if z == 0:
        return np.ones(dim)
    return 1.0 - 2.0 * (np.bitwise_count(_indices(dim) & z) & 1)


@dataclass
class StateVector:
    """Normalized amplitudes over the full register."""

    amps: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (self.layout.dim,):
            raise ValueError(
                f"amplitude count {self.amps.shape} does not match register "
                f"dimension {self.layout.dim}"
            )
        self.assert_normalized()

    def assert_normalized(self, tol: float = NORM_TOL) -> None:
        norm = np.linalg.norm(self.amps)
        if abs(norm - 1.0) > tol:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {tol}")

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy(), self.layout)

    def zone_slices(self) -> np.ndarray:
        """Amplitudes reshaped to (aux_dim, phys_dim): one row per zone."""
        return self.amps.reshape(self.layout.aux_dim, self.layout.phys_dim)


def product_state(labels: str) -> np.ndarray:
    """Product-state amplitudes from per-qubit labels, leftmost = highest qubit."""
    amps = np.array([1.0 + 0.0j])
    for label in labels:
        try:
            amps = np.kron(amps, _QUBIT_STATES[label])
        except KeyError:
            raise ValueError(
                f"unsupported single-qubit label {label!r}; use one of u d + -"
            ) from None
    return amps


def init_reference(
    layout: RegisterLayout, phys_state: str, aux_state: str | None = None
) -> StateVector:
    """Reference state |0>_aux (x) |phys>.

    The default auxiliary state is the zero-zone computational state
    (up, down, ..., down) annihilated by the zone-number operator; an
    explicit per-qubit label string overrides it.
    """
    if len(phys_state) != layout.L:
        raise ValueError(
            f"need {layout.L} physical labels, got {len(phys_state)}"
        )
    phys = product_state(phys_state)
    if aux_state is None:
        aux = np.zeros(layout.aux_dim, dtype=complex)
        aux[layout.aux_spec.zone_index_zero] = 1.0
    else:
        if len(aux_state) != layout.n_a:
            raise ValueError(
                f"need {layout.n_a} auxiliary labels, got {len(aux_state)}"
            )
        aux = product_state(aux_state)
    return StateVector(np.kron(aux, phys), layout)


def random_reference(layout: RegisterLayout, seed: int) -> StateVector:
    """Haar-ish random full-register state (Gaussian amplitudes, normalized)."""
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return StateVector(amps / np.linalg.norm(amps), layout)


# -- compiled operator application -------------------------------------------


class CompiledPauliSum:
    """Per-X-mask compilation of a PauliSum for fast repeated application."""

    def __init__(self, op: PauliSum, dim: int | None = None):
        self.width = op.width
        self.dim = dim if dim is not None else (1 << op.width)
        groups: dict[int, np.ndarray] = {}
        for (x, z), c in op.terms.items():
            w = c * _I_POW[(x & z).bit_count() & 3]
            vec = groups.get(x)
            if vec is None:
                vec = np.zeros(self.dim, dtype=complex)
                groups[x] = vec
            vec += w * _sign_vector(z, self.dim)
        self.groups = sorted(groups.items())
        self.is_hermitian = op.is_hermitian

    def apply(self, amps: np.ndarray) -> np.ndarray:
        """Matrix-free operator application."""
        out = np.zeros_like(amps)
        idx = _indices(self.dim)
        for x, weights in self.groups:
            scaled = weights * amps
            if x == 0:
                out += scaled
            else:
                out += scaled[idx ^ x]
        return out

    def expectation(self, amps: np.ndarray) -> complex:
        return np.vdot(amps, self.apply(amps))


def compiled(op: PauliSum) -> CompiledPauliSum:
    """Compile with caching on the (immutable) sum."""
    if op._compiled is None:
        op._compiled = CompiledPauliSum(op)
    return op._compiled


def apply_sum(state: StateVector, op: PauliSum) -> np.ndarray:
    if op.width != state.layout.total:
        raise ValueError(
            f"operator width {op.width} != register width {state.layout.total}"
        )
    return compiled(op).apply(state.amps)


def expectation(state: StateVector, op: PauliSum) -> float:
    """Real expectation value of a Hermitian operator."""
    if not op.is_hermitian:
        raise ValueError("expectation requires a Hermitian operator")
    value = np.vdot(state.amps, apply_sum(state, op))
    scale = max(1.0, abs(value))
    if abs(value.imag) > 1e-10 * scale:
        raise ValueError(f"imaginary residue {value.imag} exceeds tolerance")
    return float(value.real)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.layout != b.layout:
        raise ValueError(f"layouts differ: {a.layout} vs {b.layout}")
    return complex(np.vdot(a.amps, b.amps))


# -- exponentials --------------------------------------------------------------


def _string_exp_inplace(
    amps: np.ndarray, x: int, z: int, coeff: float, theta: float
) -> None:
    """In-place exp(-i theta c P) for one Hermitian string: cos - i sin P."""
    alpha = coeff * theta
    if alpha == 0.0:
        return
    c, s = cos(alpha), sin(alpha)
    dim = amps.size
    w = _I_POW[(x & z).bit_count() & 3]
    signs = _sign_vector(z, dim)
    if x == 0:
        amps *= c - 1j * s * w * signs
        return
    idx = _indices(dim)
    p_amps = (w * signs * amps)[idx ^ x]
    amps *= c
    amps -= 1j * s * p_amps


def _multi_term_exp(amps: np.ndarray, generator: PauliSum, theta: float) -> np.ndarray:
    """Dense-eigendecomposition fallback for non-commuting generators."""
    if generator.width > DENSE_QUBIT_LIMIT:
        raise ValueError(
            "dense exponential fallback not available beyond "
            f"{DENSE_QUBIT_LIMIT} qubits"
        )
    evals, vecs = eigh(to_dense(generator))
    phases = np.exp(-1j * theta * evals)
    return vecs @ (phases * (vecs.conj().T @ amps))


def _terms_mutually_commute(generator: PauliSum) -> bool:
    keys = list(generator.terms)
    for i, (x1, z1) in enumerate(keys):
        for x2, z2 in keys[i + 1 :]:
            if ((x1 & z2).bit_count() + (z1 & x2).bit_count()) % 2:
                return False
    return True


def apply_exp(
    state: StateVector,
    generator: PauliSum,
    theta: float,
    allow_dense_fallback: bool = True,
) -> StateVector:
    """exp(-i theta G)|state> for a Hermitian generator G.

    Single strings use the closed form; multi-string generators factorize
    exactly when their terms mutually commute, otherwise the dense
    eigendecomposition fallback is used (or rejected when disabled).
    """
    if generator.width != state.layout.total:
        raise ValueError(
            f"generator width {generator.width} != register width "
            f"{state.layout.total}"
        )
    if not generator.is_hermitian:
        raise ValueError("generator must be Hermitian")
    amps = state.amps.copy()
    if len(generator) <= 1 or _terms_mutually_commute(generator):
        for (x, z), c in generator.terms.items():
            _string_exp_inplace(amps, x, z, c.real, theta)
    elif allow_dense_fallback:
        amps = _multi_term_exp(amps, generator, theta)
    else:
        raise ValueError(
            "generator terms do not commute and the dense fallback is disabled"
        )
    out = StateVector(amps, state.layout)
    out.assert_normalized()
    return out


@dataclass
class Ansatz:
    """Ordered (generator, angle) pairs applied left to right to a reference."""

    reference: StateVector
    generators: list[PauliSum]
    thetas: list[float]
    labels: list[str]

    @classmethod
    def empty(cls, reference: StateVector) -> "Ansatz":
        return cls(reference=reference, generators=[], thetas=[], labels=[])

    def __len__(self) -> int:
        return len(self.generators)

    def appended(self, generator: PauliSum, label: str, theta: float = 0.0) -> "Ansatz":
        return Ansatz(
            reference=self.reference,
            generators=self.generators + [generator],
            thetas=self.thetas + [theta],
            labels=self.labels + [label],
        )

    def with_thetas(self, thetas) -> "Ansatz":
        thetas = list(map(float, thetas))
        if len(thetas) != len(self.generators):
            raise ValueError(
                f"{len(self.generators)} generators but {len(thetas)} angles"
            )
        return Ansatz(
            reference=self.reference,
            generators=self.generators,
            thetas=thetas,
            labels=self.labels,
        )

    def prepare(self) -> StateVector:
        state = self.reference
        for generator, theta in zip(self.generators, self.thetas):
            state = apply_exp(state, generator, theta)
        return state
