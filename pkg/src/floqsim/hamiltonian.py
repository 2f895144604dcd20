"""Assembly of the block-structured extended Floquet Hamiltonian.

The full register is auxiliary (x) physical with the auxiliary qubits on the
high-order side: basis index of |aux> (x) |phys> is aux_index * 2^L +
phys_index.  The assembled operator is

    I (x) H^(0)  +  Omega * A_d (x) I  +  sum_r (A^(r) - A_asy^(r)) (x) H^(r),

which block-decouples the top zone |N_c + 1> from the remaining
(2 N_c + 1)-zone block.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .auxiliary import AuxSpec, a_diagonal, a_symmetric
from .drives import DriveSpec
from .pauli import PauliSum, tensor


@dataclass(frozen=True)
class RegisterLayout:
    """Sizes and bit layout of the auxiliary and physical registers."""

    n_a: int
    L: int

    def __post_init__(self):
        if self.n_a < 1:
            raise ValueError(f"need at least one auxiliary qubit, got {self.n_a}")
        if self.L < 1:
            raise ValueError(f"need at least one physical qubit, got {self.L}")

    @property
    def total(self) -> int:
        return self.n_a + self.L

    @property
    def dim(self) -> int:
        return 1 << self.total

    @property
    def phys_dim(self) -> int:
        return 1 << self.L

    @property
    def aux_dim(self) -> int:
        return 1 << self.n_a

    @property
    def aux_spec(self) -> AuxSpec:
        return AuxSpec(self.n_a)

    def basis_index(self, aux_index: int, phys_index: int) -> int:
        return aux_index * self.phys_dim + phys_index


@dataclass(frozen=True)
class ExtendedFloquetHamiltonian:
    """Hermitian full-register Pauli sum plus the metadata it was built from."""

    op: PauliSum
    layout: RegisterLayout
    omega: float
    drive: DriveSpec

    @property
    def identity(self) -> PauliSum:
        return PauliSum.identity(self.layout.total)


def build_extended(drive: DriveSpec, n_a: int) -> ExtendedFloquetHamiltonian:
    """Assemble the extended Floquet Hamiltonian for a Hermitian drive."""
    if n_a < 1:
        raise ValueError(f"need at least one auxiliary qubit, got {n_a}")
    layout = RegisterLayout(n_a=n_a, L=drive.L)
    spec = layout.aux_spec
    if drive.max_mode > spec.n_c + 1:
        raise ValueError(
            f"drive mode |r| = {drive.max_mode} exceeds the truncation reach "
            f"N_c + 1 = {spec.n_c + 1} of {n_a} auxiliary qubits"
        )
    if 2 * drive.max_mode >= 2**n_a:
        warnings.warn(
            f"only {n_a} auxiliary qubits for modes up to |r| = {drive.max_mode}; "
            "expect visible truncation error",
            stacklevel=2,
        )

    aux_identity = PauliSum.identity(n_a)
    phys_identity = PauliSum.identity(drive.L)
    op = tensor(aux_identity, drive.mode(0))
    op = op + drive.omega * tensor(a_diagonal(spec), phys_identity)
    for r in drive.fourier_indices:
        op = op + tensor(a_symmetric(r, spec), drive.mode(r))

    if not op.is_hermitian:
        raise ValueError("assembled extended Hamiltonian is not Hermitian")
    return ExtendedFloquetHamiltonian(
        op=op, layout=layout, omega=drive.omega, drive=drive
    )


def shifted_squared(h: ExtendedFloquetHamiltonian, lam: float) -> PauliSum:
    """The cost observable (H_F - lam I)^2, materialized as one Pauli sum.

    Term count grows quadratically in the terms of H_F; fine at desk scale.
    The statevector engine offers an equivalent two-pass evaluation for
    larger operators.
    """
    shifted = h.op + PauliSum.identity(h.layout.total, -lam)
    return shifted @ shifted
