"""Concrete time-periodic drives as Fourier-mode maps.

A drive H(t) = sum_r e^{i r Omega t} H^(r) is stored as the mapping
r -> PauliSum on the physical register.  Hermiticity of H(t) requires
H^(-r) = adjoint(H^(r)), which is validated at construction.  All energies
are in units of the characteristic coupling J0 = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .pauli import PauliSum

_HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class DriveSpec:
    """Fourier modes of a time-periodic Hamiltonian on L physical qubits."""

    modes: Mapping[int, PauliSum]
    omega: float
    L: int

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"drive frequency must be positive, got {self.omega}")
        object.__setattr__(self, "modes", dict(self.modes))
        for r, op in self.modes.items():
            if op.width != self.L:
                raise ValueError(
                    f"mode {r} acts on {op.width} qubits, register has {self.L}"
                )
        for r in self.modes:
            partner = self.modes.get(-r)
            if partner is None or not partner.approx_equal(
                self.modes[r].adjoint(), tol=_HERMITICITY_TOL
            ):
                raise ValueError(f"drive is not Hermitian: mode {-r} != mode {r}^dag")

    @property
    def fourier_indices(self) -> tuple[int, ...]:
        """The nonzero mode indices, sorted."""
        return tuple(sorted(r for r in self.modes if r != 0))

    @property
    def max_mode(self) -> int:
        return max((abs(r) for r in self.fourier_indices), default=0)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def mode(self, r: int) -> PauliSum:
        return self.modes.get(r, PauliSum.zero(self.L))


@dataclass(frozen=True)
class XYZParams:
    """Open XYZ chain with cosine-driven couplings and z-field.

    Couplings J_mu(t) = j_bar[mu] + delta_j[mu] cos(Omega t) act on nearest
    neighbours; the field B_z(t) = b_bar + delta_b cos(Omega t) acts on every
    site.
    """

    L: int
    j_bar: tuple[float, float, float] = (0.0, 0.0, 0.0)
    delta_j: tuple[float, float, float] = (0.0, 0.0, 0.0)
    b_bar: float = 0.0
    delta_b: float = 0.0
    periodic: bool = False

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"chain needs at least two sites, got L={self.L}")


def _xyz_sum(
    L: int, jx: float, jy: float, jz: float, bz: float, periodic: bool
) -> PauliSum:
    terms: list[tuple[str, complex]] = []
    bonds = L if periodic else L - 1
    for j in range(bonds):
        k = (j + 1) % L
        for letter, coupling in (("X", jx), ("Y", jy), ("Z", jz)):
            if coupling == 0.0:
                continue
            letters = "".join(
                letter if q in (j, k) else "I" for q in range(L - 1, -1, -1)
            )
            terms.append((letters, coupling))
    if bz != 0.0:
        for j in range(L):
            letters = "".join("Z" if q == j else "I" for q in range(L - 1, -1, -1))
            terms.append((letters, bz))
    return PauliSum.from_terms(L, terms)


def driven_xyz(params: XYZParams, omega: float) -> DriveSpec:
    """Drive of the cosine-modulated XYZ chain: modes 0 and (when driven) +-1."""
    modes = {
        0: _xyz_sum(
            params.L, *params.j_bar, params.b_bar, params.periodic
        )
    }
    half_amp = _xyz_sum(
        params.L,
        params.delta_j[0] / 2.0,
        params.delta_j[1] / 2.0,
        params.delta_j[2] / 2.0,
        params.delta_b / 2.0,
        params.periodic,
    )
    if half_amp:
        modes[1] = half_amp
        modes[-1] = half_amp
    return DriveSpec(modes=modes, omega=omega, L=params.L)


def single_qubit_example(
    d1: float, d2: float, d3: float, omega: float
) -> DriveSpec:
    """One-qubit drive d1 X + 2 d2 Y cos(Omega t) + 2 d3 Z sin(2 Omega t)."""
    modes: dict[int, PauliSum] = {}
    if d1 != 0.0:
        modes[0] = PauliSum.from_string("X", d1)
    if d2 != 0.0:
        modes[1] = PauliSum.from_string("Y", d2)
        modes[-1] = PauliSum.from_string("Y", d2)
    if d3 != 0.0:
        modes[2] = PauliSum.from_string("Z", -1j * d3)
        modes[-2] = PauliSum.from_string("Z", 1j * d3)
    if 0 not in modes:
        modes[0] = PauliSum.zero(1)
    return DriveSpec(modes=modes, omega=omega, L=1)
