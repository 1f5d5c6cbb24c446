"""Exact arithmetic over prime fields GF(p) and dense matrices over them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np


class FieldMismatch(ValueError):
    """Operands live over different prime fields."""


class DimensionMismatch(ValueError):
    """Matrix shapes are incompatible for the requested operation."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Prime field GF(p).  Only primes up to 2**16 are accepted."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not (2 <= self.p <= 1 << 16):
            raise ValueError(f"characteristic out of range: {self.p!r}")
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)


class MatrixGF:
    """Immutable dense matrix over GF(p); entries are residues in [0, p)."""

    __slots__ = ("field", "rows", "cols", "_a", "_hash")

    def __init__(self, field: FieldSpec, rows: Iterable[Iterable[int]]):
        a = np.array([[int(x) for x in r] for r in rows], dtype=np.int64)
        if a.ndim != 2 or a.size == 0:
            raise DimensionMismatch("matrix needs at least one row and column")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", a.shape[0])
        object.__setattr__(self, "cols", a.shape[1])
        a %= field.p
        a.setflags(write=False)
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *_):  # pragma: no cover - guard
        raise AttributeError("MatrixGF is immutable")

    @classmethod
    def from_array(cls, field: FieldSpec, a: np.ndarray) -> "MatrixGF":
        return cls(field, a.tolist())

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "MatrixGF":
        return cls.from_array(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "MatrixGF":
        return cls.from_array(field, np.zeros((rows, cols), dtype=np.int64))

    def array(self) -> np.ndarray:
        """Read-only numpy view of the entries."""
        return self._a

    def tolists(self) -> list[list[int]]:
        return self._a.tolist()

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self._a.reshape(-1))

    def transpose(self) -> "MatrixGF":
        return MatrixGF.from_array(self.field, self._a.T)

    def is_identity(self) -> bool:
        return self.rows == self.cols and bool(
            np.array_equal(self._a, np.eye(self.rows, dtype=np.int64))
        )

    def is_zero(self) -> bool:
        return not self._a.any()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MatrixGF)
            and self.field == other.field
            and self._a.shape == other._a.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.field, self._a.shape, self.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"MatrixGF(p={self.field.p}, {self.tolists()})"

    def __add__(self, other: "MatrixGF") -> "MatrixGF":
        _check_same_field(self, other)
        if self._a.shape != other._a.shape:
            raise DimensionMismatch("addition needs equal shapes")
        return MatrixGF.from_array(self.field, (self._a + other._a) % self.field.p)

    def __sub__(self, other: "MatrixGF") -> "MatrixGF":
        _check_same_field(self, other)
        if self._a.shape != other._a.shape:
            raise DimensionMismatch("subtraction needs equal shapes")
        return MatrixGF.from_array(self.field, (self._a - other._a) % self.field.p)

    def __matmul__(self, other: "MatrixGF") -> "MatrixGF":
        return mat_mul(self, other)


def _check_same_field(a: MatrixGF, b: MatrixGF) -> None:
    if a.field != b.field:
        raise FieldMismatch(f"GF({a.field.p}) vs GF({b.field.p})")


def mat_mul(a: MatrixGF, b: MatrixGF) -> MatrixGF:
    """Exact product mod p."""
    _check_same_field(a, b)
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    return MatrixGF.from_array(a.field, (a.array() @ b.array()) % a.field.p)


def _rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p); returns (rref, pivot columns).

    Pivoting picks the first nonzero entry in each column, so the result is
    deterministic for a given input.
    """
    m = a % p
    m = m.copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        for j in range(rows):
            if j != r and m[j, c]:
                m[j] = (m[j] - m[j, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: MatrixGF) -> int:
    _, pivots = _rref(a.array(), a.field.p)
    return len(pivots)


def mat_inv(a: MatrixGF) -> Optional[MatrixGF]:
    """Inverse when full rank, else None."""
    if a.rows != a.cols:
        raise DimensionMismatch("inverse needs a square matrix")
    n = a.rows
    aug = np.concatenate([a.array(), np.eye(n, dtype=np.int64)], axis=1)
    r, pivots = _rref(aug, a.field.p)
    if pivots[:n] != list(range(n)):
        return None
    return MatrixGF.from_array(a.field, r[:, n:])


def solve_right(a: MatrixGF, b: MatrixGF) -> Optional[MatrixGF]:
    """One X with a @ X == b, or None if inconsistent.

    Underdetermined systems return the particular solution with every free
    variable set to zero, so repeated runs give identical witnesses.
    """
    _check_same_field(a, b)
    if a.rows != b.rows:
        raise DimensionMismatch("solve_right needs matching row counts")
    p = a.field.p
    aug = np.concatenate([a.array(), b.array()], axis=1)
    r, pivots = _rref(aug, p)
    if any(c >= a.cols for c in pivots):
        return None
    x = np.zeros((a.cols, b.cols), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = r[i, a.cols:]
    return MatrixGF.from_array(a.field, x)


def solve_right_arrays(a: np.ndarray, b: np.ndarray, p: int) -> Optional[np.ndarray]:
    """solve_right on raw arrays; used by the solver's inner loop."""
    aug = np.concatenate([a, b], axis=1) % p
    r, pivots = _rref(aug, p)
    ncols = a.shape[1]
    if any(c >= ncols for c in pivots):
        return None
    x = np.zeros((ncols, b.shape[1]), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = r[i, ncols:]
    return x
