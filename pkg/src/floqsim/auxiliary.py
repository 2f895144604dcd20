"""Closed-form Pauli decompositions of the auxiliary-register matrices.

The auxiliary register of ``n_a`` qubits encodes the 2^{n_a} = 2(N_c + 1)
Fourier-zone labels -N_c, ..., N_c + 1, with |n> at standard-basis index
N_c + n; in the computational basis |-N_c> is the all-up state.  All
operators here are built directly as sparse Pauli sums:

* ``a_diagonal``  -- diag(-N_c, ..., N_c + 1), exactly n_a + 1 strings.
* ``a_shift(r)``  -- the zone-shift sum |n+r><n|, assembled from ladder
  factors (X -+ iY)/2 and, for |r| > 1, repeated products of the unit shift.
* ``a_asym(r)``   -- the single matrix element connecting the decoupled
  top zone, from the bit pattern of |r| with 0 -> (I - Z)/2 and
  1 -> (X - iY)/2 (r > 0) or (X + iY)/2 (r < 0).
* ``a_observable`` -- (I + X)^{x n_a}, the all-ones matrix.

``pauli_count`` evaluates the string-count recurrence for a_shift without
building the full-width operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .pauli import PauliSum, tensor

_P_PLUS = PauliSum.from_terms(1, [("X", 0.5), ("Y", 0.5j)])
_P_MINUS = PauliSum.from_terms(1, [("X", 0.5), ("Y", -0.5j)])
_Z_MINUS = PauliSum.from_terms(1, [("I", 0.5), ("Z", -0.5)])
_ONE = PauliSum.identity(0)


@dataclass(frozen=True)
class AuxSpec:
    """Auxiliary register size and the zone cutoff it implies."""

    n_a: int

    def __post_init__(self):
        if self.n_a < 1:
            raise ValueError(f"need at least one auxiliary qubit, got {self.n_a}")

    @property
    def n_c(self) -> int:
        return 2 ** (self.n_a - 1) - 1

    @property
    def dim(self) -> int:
        return 2**self.n_a

    @property
    def zone_index_zero(self) -> int:
        """Standard-basis index of the zero zone |0> (computational up,down,...,down)."""
        return self.n_c

    def zone_range(self) -> range:
        return range(-self.n_c, self.n_c + 2)


def a_diagonal(spec: AuxSpec) -> PauliSum:
    """Zone-number operator: sum_j (-2^{j-1}) Z_(j) + I/2."""
    terms: list[tuple[str, complex]] = [("I" * spec.n_a, 0.5)]
    for j in range(spec.n_a):
        letters = "".join(
            "Z" if q == j else "I" for q in range(spec.n_a - 1, -1, -1)
        )
        terms.append((letters, -(2.0 ** (j - 1))))
    return PauliSum.from_terms(spec.n_a, terms)


@lru_cache(maxsize=None)
def _unit_shift(n_a: int) -> PauliSum:
    """Shift up by one zone: sum_k I^k x P- x (P+)^(n_a-k-1)."""
    total = PauliSum.zero(n_a)
    for k in range(n_a):
        term = PauliSum.identity(k)
        term = tensor(term, _P_MINUS)
        for _ in range(n_a - k - 1):
            term = tensor(term, _P_PLUS)
        total = total + term
    return total


def _check_shift_range(r: int, spec: AuxSpec) -> None:
    if r == 0:
        raise ValueError("zone shift must be nonzero")
    if abs(r) > 2 * spec.n_c + 1:
        raise ValueError(
            f"|r| = {abs(r)} exceeds the largest zone shift {2 * spec.n_c + 1}"
        )


@lru_cache(maxsize=None)
def _shift_power(size: int, n_a: int) -> PauliSum:
    if size == 1:
        return _unit_shift(n_a)
    return _shift_power(size - 1, n_a) @ _unit_shift(n_a)


def a_shift(r: int, spec: AuxSpec) -> PauliSum:
    """Zone-shift operator sum |n+r><n| via |r|-fold products of the unit shift."""
    _check_shift_range(r, spec)
    out = _shift_power(abs(r), spec.n_a)
    if r < 0:
        out = out.adjoint()
    return out


def a_asym(r: int, spec: AuxSpec) -> PauliSum:
    """Coupling into the decoupled top zone: |N_c+1><N_c+1-r| (r > 0) or its adjoint."""
    if r == 0:
        raise ValueError("asymmetric correction is defined for nonzero shifts only")
    if abs(r) > spec.n_c + 1:
        raise ValueError(
            f"|r| = {abs(r)} exceeds the top-zone reach {spec.n_c + 1}"
        )
    ladder = _P_MINUS if r > 0 else _P_PLUS
    out = _ONE
    for q in range(spec.n_a - 1, -1, -1):
        bit = (abs(r) >> q) & 1
        out = tensor(out, ladder if bit else _Z_MINUS)
    return out


def a_symmetric(r: int, spec: AuxSpec) -> PauliSum:
    """Zone shift with the top-zone coupling removed: a_shift - a_asym."""
    return a_shift(r, spec) - a_asym(r, spec)


def a_observable(n_a: int) -> PauliSum:
    """(I + X)^{x n_a}: every {I, X} string with unit coefficient (all-ones matrix)."""
    if n_a < 1:
        raise ValueError(f"need at least one auxiliary qubit, got {n_a}")
    return PauliSum(n_a, {(x, 0): 1.0 for x in range(2**n_a)})


def pauli_count(r: int, spec: AuxSpec) -> int:
    """String count of a_shift(r) from the block recurrence.

    Splitting the register at k0 = ceil(log2 |r|), the shift decomposes into
    a within-block part and a carry part whose high-qubit ladder expansion
    contributes 2^{n_a-k0+1} - 2 strings per within-block wrap string; both
    block operators live on k0 qubits only.
    """
    _check_shift_range(r, spec)
    size = abs(r)
    k0 = max(0, math.ceil(math.log2(size)))
    if k0 >= spec.n_a:
        return len(a_shift(size, spec))
    carry_strings = 2 ** (spec.n_a - k0 + 1) - 2
    if size == 2**k0:
        # within-block part vanishes and the wrap operator is the identity
        return carry_strings
    block = AuxSpec(k0)
    n_within = len(a_shift(size, block))
    n_wrap = len(a_shift(2**k0 - size, block))
    return n_within + n_wrap * carry_strings
