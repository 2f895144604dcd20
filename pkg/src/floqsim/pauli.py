"""Exact algebra of Pauli strings and weighted Pauli sums on a qubit register.

A Pauli string on ``width`` qubits is encoded by two bitmasks ``(x, z)``:
bit ``j`` of ``x``/``z`` selects the X/Z part on qubit ``j``.  Letter-wise

    (0, 0) -> I,   (1, 0) -> X,   (1, 1) -> Y,   (0, 1) -> Z,

with the canonical operator ``P(x, z) = i**popcount(x & z) * X^x Z^z``, so
every encoded string is exactly the Hermitian tensor product of its letters
(the ``i`` power absorbs the Y = iXZ factors).  Qubit 0 is the
least-significant bit and the rightmost tensor factor: the letter string
"XZY" puts X on qubit 2, Z on qubit 1 and Y on qubit 0.

A :class:`PauliSum` is a complex-weighted collection of strings of one
common width, kept in simplified form: coefficients with magnitude below
``SIMPLIFY_EPS`` are dropped whenever sums are combined.  Dense matrices are
produced only for small registers (``DENSE_QUBIT_LIMIT``) and serve as test
oracles, never as the simulation path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

SIMPLIFY_EPS = 1e-14
DENSE_QUBIT_LIMIT = 12

_I_POW = (1 + 0j, 1j, -1 + 0j, -1j)
_LETTER_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


class WidthMismatchError(ValueError):
    """Raised when operands act on registers of different widths."""


@dataclass(frozen=True)
class PauliString:
    """A single Pauli string, encoded as X/Z bitmasks over ``width`` qubits."""

    x: int
    z: int
    width: int

    @classmethod
    def from_letters(cls, letters: str) -> "PauliString":
        x = z = 0
        for i, letter in enumerate(letters):
            try:
                xbit, zbit = _LETTER_TO_XZ[letter]
            except KeyError:
                raise ValueError(f"unknown Pauli letter {letter!r}") from None
            qubit = len(letters) - 1 - i
            x |= xbit << qubit
            z |= zbit << qubit
        return cls(x, z, len(letters))

    @property
    def letters(self) -> str:
        return "".join(
            _XZ_TO_LETTER[(self.x >> q) & 1, (self.z >> q) & 1]
            for q in range(self.width - 1, -1, -1)
        )

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def support(self) -> int:
        """Bitmask of qubits on which the string acts nontrivially."""
        return self.x | self.z

    def __str__(self) -> str:
        return self.letters


def _phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent of i in P(x1,z1)·P(x2,z2) = i^g · P(x1^x2, z1^z2), mod 4."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    g = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (z1 & x2).bit_count()
    )
    return g & 3


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product of two strings as (phase, string) with phase in {1, i, -1, -i}."""
    if a.width != b.width:
        raise WidthMismatchError(f"widths differ: {a.width} != {b.width}")
    g = _phase_exponent(a.x, a.z, b.x, b.z)
    return _I_POW[g], PauliString(a.x ^ b.x, a.z ^ b.z, a.width)


def strings_commute(a: PauliString, b: PauliString) -> bool:
    """Symplectic commutation test: strings commute iff the product is even."""
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


class PauliSum:
    """Weighted sum of Pauli strings over a fixed register, always simplified.

    Values are immutable after construction; all operations return new sums.
    """

    __slots__ = ("_terms", "_width", "_hermitian", "_compiled")

    def __init__(
        self,
        width: int,
        terms: Mapping[tuple[int, int], complex] | None = None,
        *,
        _clean: bool = True,
    ):
        if width < 0:
            raise ValueError("width must be nonnegative")
        self._width = width
        if terms is None:
            self._terms: dict[tuple[int, int], complex] = {}
        elif _clean:
            self._terms = {
                key: complex(c) for key, c in terms.items() if abs(c) >= SIMPLIFY_EPS
            }
        else:
            self._terms = dict(terms)
        self._hermitian: bool | None = None
        self._compiled = None  # lazily filled by the statevector engine

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, width: int) -> "PauliSum":
        return cls(width)

    @classmethod
    def identity(cls, width: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(width, {(0, 0): coeff})

    @classmethod
    def from_string(cls, string: PauliString | str, coeff: complex = 1.0) -> "PauliSum":
        if isinstance(string, str):
            string = PauliString.from_letters(string)
        return cls(string.width, {(string.x, string.z): coeff})

    @classmethod
    def from_terms(
        cls, width: int, terms: Iterable[tuple[str | PauliString, complex]]
    ) -> "PauliSum":
        acc: dict[tuple[int, int], complex] = {}
        for string, coeff in terms:
            if isinstance(string, str):
                string = PauliString.from_letters(string)
            if string.width != width:
                raise WidthMismatchError(
                    f"term width {string.width} != sum width {width}"
                )
            key = (string.x, string.z)
            acc[key] = acc.get(key, 0.0) + complex(coeff)
        return cls(width, acc)

    # -- basic queries -------------------------------------------------------

    @property
    def width(self) -> int:
        return self._width

    @property
    def terms(self) -> Mapping[tuple[int, int], complex]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), c in self._terms.items():
            yield PauliString(x, z, self._width), c

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, string: PauliString | str) -> complex:
        if isinstance(string, str):
            string = PauliString.from_letters(string)
        return self._terms.get((string.x, string.z), 0.0 + 0.0j)

    @property
    def is_hermitian(self) -> bool:
        """True when every coefficient is real (strings are Hermitian)."""
        if self._hermitian is None:
            if self._terms:
                scale = max(1.0, max(abs(c) for c in self._terms.values()))
            else:
                scale = 1.0
            self._hermitian = all(
                abs(c.imag) <= 1e-12 * scale for c in self._terms.values()
            )
        return self._hermitian

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    # -- algebra -------------------------------------------------------------

    def _require_same_width(self, other: "PauliSum") -> None:
        if self._width != other._width:
            raise WidthMismatchError(
                f"widths differ: {self._width} != {other._width}"
            )

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._require_same_width(other)
        acc = dict(self._terms)
        for key, c in other._terms.items():
            acc[key] = acc.get(key, 0.0) + c
        return PauliSum(self._width, acc)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "PauliSum":
        scalar = complex(scalar)
        return PauliSum(
            self._width, {key: c * scalar for key, c in self._terms.items()}
        )

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product; merged and simplified."""
        self._require_same_width(other)
        acc: dict[tuple[int, int], complex] = {}
        for (x1, z1), c1 in self._terms.items():
            for (x2, z2), c2 in other._terms.items():
                g = _phase_exponent(x1, z1, x2, z2)
                key = (x1 ^ x2, z1 ^ z2)
                acc[key] = acc.get(key, 0.0) + c1 * c2 * _I_POW[g]
        return PauliSum(self._width, acc)

    def adjoint(self) -> "PauliSum":
        """Conjugate transpose: coefficients conjugated, strings unchanged."""
        return PauliSum(
            self._width,
            {key: c.conjugate() for key, c in self._terms.items()},
            _clean=False,
        )

    def approx_equal(self, other: "PauliSum", tol: float = 1e-12) -> bool:
        if self._width != other._width:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(
            abs(self._terms.get(k, 0.0) - other._terms.get(k, 0.0)) <= tol
            for k in keys
        )

    # -- serialization -------------------------------------------------------

    def to_lines(self) -> str:
        """One term per line: "coeff_re coeff_im letters"."""
        lines = []
        for string, c in sorted(self.items(), key=lambda it: (it[0].z, it[0].x)):
            lines.append(f"{c.real!r} {c.imag!r} {string.letters}")
        return "\n".join(lines)

    @classmethod
    def from_lines(cls, text: str, width: int | None = None) -> "PauliSum":
        terms = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            re_part, im_part, letters = line.split()
            terms.append((letters, complex(float(re_part), float(im_part))))
        if width is None:
            if not terms:
                raise ValueError("cannot infer width from an empty term list")
            width = len(terms[0][0])
        return cls.from_terms(width, terms)

    def __repr__(self) -> str:
        return f"PauliSum(width={self._width}, terms={len(self._terms)})"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """ab - ba."""
    return a @ b - b @ a


def anticommutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """ab + ba."""
    return a @ b + b @ a


def tensor(aux: PauliSum, phys: PauliSum) -> PauliSum:
    """Tensor product with ``aux`` on the high-order (leftmost) qubits."""
    shift = phys.width
    width = aux.width + phys.width
    acc: dict[tuple[int, int], complex] = {}
    for (xa, za), ca in aux.terms.items():
        for (xp, zp), cp in phys.terms.items():
            key = ((xa << shift) | xp, (za << shift) | zp)
            acc[key] = acc.get(key, 0.0) + ca * cp
    return PauliSum(width, acc)


def _check_dense_width(width: int, limit: int) -> None:
    if width > limit:
        raise ValueError(
            f"dense conversion limited to {limit} qubits, got {width}"
        )


def to_dense(a: PauliSum, limit: int = DENSE_QUBIT_LIMIT) -> np.ndarray:
    """Entrywise-exact dense matrix of a PauliSum (test oracle only)."""
    _check_dense_width(a.width, limit)
    dim = 1 << a.width
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for (x, z), c in a.terms.items():
        w = c * _I_POW[(x & z).bit_count() & 3]
        signs = 1.0 - 2.0 * (np.bitwise_count(cols & z) & 1)
        out[cols ^ x, cols] += w * signs
    return out


def string_to_dense(s: PauliString) -> np.ndarray:
    return to_dense(PauliSum.from_string(s))


def _fwht(a: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the last axis, natural order:
    out[..., z] = sum_c (-1)^popcount(c & z) a[..., c]."""
    a = np.array(a, dtype=complex)
    shape = a.shape
    n = shape[-1]
    h = 1
    while h < n:
        a = a.reshape(-1, 2 * h)
        left = a[:, :h].copy()
        right = a[:, h:].copy()
        a[:, :h] = left + right
        a[:, h:] = left - right
        h *= 2
    return a.reshape(shape)


def trace_decompose(m: np.ndarray, limit: int = DENSE_QUBIT_LIMIT) -> PauliSum:
    """Full trace-based decomposition d_j = Tr[m P_j] / 2^n over all strings.

    Exponentially expensive by construction; kept as the exactness oracle
    for the structured decompositions elsewhere in the package.
    """
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    if m.shape != (dim, dim) or dim & (dim - 1):
        raise ValueError(f"matrix must be square with power-of-2 size, got {m.shape}")
    width = dim.bit_length() - 1
    _check_dense_width(width, limit)
    idx = np.arange(dim)
    acc: dict[tuple[int, int], complex] = {}
    for x in range(dim):
        diag = m[idx, idx ^ x]
        coeffs = _fwht(diag) / dim
        for z in np.nonzero(np.abs(coeffs) >= SIMPLIFY_EPS)[0]:
            z = int(z)
            w = _I_POW[(x & z).bit_count() & 3]
            acc[(x, z)] = w * coeffs[z]
    return PauliSum(width, acc)
