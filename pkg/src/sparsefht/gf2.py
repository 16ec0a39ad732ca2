"""Bit-packed linear algebra over GF(2).

Binary vectors of length ``n`` are stored as Python ints (or integer numpy
arrays) with bit ``t`` holding component ``t``; bit 0 is the least significant
component.  Matrices keep one packed int per row.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_BITS = 63


class SingularMatrixError(ValueError):
    """Raised when a GF(2) matrix has no inverse."""


def _check_width(n: int) -> None:
    if not 1 <= n <= MAX_BITS:
        raise ValueError(f"bit width must be in [1, {MAX_BITS}], got {n}")


def _fits(v: int, n: int) -> bool:
    return 0 <= v < (1 << n)


def parity(v):
    """Parity of the set bits of ``v`` (int or integer array)."""
    if isinstance(v, np.ndarray):
        return (np.bitwise_count(v) & 1).astype(np.uint8)
    return int(v).bit_count() & 1


def gf2_inner_product(u, v, n: int | None = None):
    """Inner product over GF(2): parity of ``u & v``.

    Works elementwise on integer arrays.  If ``n`` is given, scalar operands
    wider than ``n`` bits are rejected.
    """
    if n is not None and not isinstance(u, np.ndarray) and not isinstance(v, np.ndarray):
        if not (_fits(int(u), n) and _fits(int(v), n)):
            raise ValueError(f"operands must be {n}-bit vectors")
    return parity(u & v)


def bits_to_int(bits: Iterable[int]) -> int:
    """Pack a 0/1 sequence, first element as bit 0."""
    out = 0
    for t, bit in enumerate(bits):
        if bit not in (0, 1):
            raise ValueError(f"not a bit: {bit!r}")
        out |= bit << t
    return out


def int_to_bits(v: int, n: int) -> list[int]:
    return [(v >> t) & 1 for t in range(n)]


@dataclass(frozen=True)
class GF2Matrix:
    """Dense ``n_rows x n_cols`` matrix over GF(2) with bit-packed rows."""

    n_rows: int
    n_cols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1 or self.n_cols > MAX_BITS:
            raise ValueError(f"bad shape {self.n_rows}x{self.n_cols}")
        rows = tuple(int(r) for r in self.rows)
        if len(rows) != self.n_rows:
            raise ValueError(f"expected {self.n_rows} rows, got {len(rows)}")
        if any(not _fits(r, self.n_cols) for r in rows):
            raise ValueError(f"row wider than {self.n_cols} bits")
        object.__setattr__(self, "rows", rows)

    # constructors

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls(n, n, tuple(1 << t for t in range(n)))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "GF2Matrix":
        return cls(n_rows, n_cols, (0,) * n_rows)

    @classmethod
    def from_columns(cls, columns: Sequence[int], n_rows: int) -> "GF2Matrix":
        """Build from packed column vectors (column ``j`` is ``columns[j]``)."""
        rows = [0] * n_rows
        for j, col in enumerate(columns):
            if not _fits(int(col), n_rows):
                raise ValueError(f"column {j} wider than {n_rows} bits")
            for t in range(n_rows):
                if (col >> t) & 1:
                    rows[t] |= 1 << j
        return cls(n_rows, len(columns), tuple(rows))

    @classmethod
    def from_array(cls, a) -> "GF2Matrix":
        a = np.asarray(a, dtype=np.int64) % 2
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls(a.shape[0], a.shape[1], tuple(bits_to_int(r) for r in a.tolist()))

    # views

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def column(self, j: int) -> int:
        out = 0
        for t, r in enumerate(self.rows):
            out |= ((r >> j) & 1) << t
        return out

    def columns(self) -> list[int]:
        return [self.column(j) for j in range(self.n_cols)]

    def to_array(self) -> np.ndarray:
        return np.array([int_to_bits(r, self.n_cols) for r in self.rows], dtype=np.uint8)

    def transpose(self) -> "GF2Matrix":
        return GF2Matrix(self.n_cols, self.n_rows, tuple(self.columns()))

    @property
    def T(self) -> "GF2Matrix":
        return self.transpose()

    # arithmetic

    def matvec(self, v):
        """``M v``; ``v`` may be an int or an integer numpy array of vectors."""
        if isinstance(v, np.ndarray):
            out = np.zeros(v.shape, dtype=np.int64)
            for t, r in enumerate(self.rows):
                out |= parity(v & r).astype(np.int64) << t
            return out
        if not _fits(int(v), self.n_cols):
            raise ValueError(f"vector wider than {self.n_cols} bits")
        out = 0
        for t, r in enumerate(self.rows):
            out |= parity(r & v) << t
        return out

    def __matmul__(self, other):
        if isinstance(other, GF2Matrix):
            return mat_mul(self, other)
        return self.matvec(other)

    def is_invertible(self) -> bool:
        return self.n_rows == self.n_cols and rank(self) == self.n_rows

    def inverse(self) -> "GF2Matrix":
        return mat_inverse(self)

    # text format: "n_rows n_cols" header, then one 0/1 row per line, LSB first

    def to_text(self) -> str:
        lines = [f"{self.n_rows} {self.n_cols}"]
        lines += ["".join(str(b) for b in int_to_bits(r, self.n_cols)) for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GF2Matrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        return cls._from_lines(lines)[0]

    @classmethod
    def _from_lines(cls, lines: list[str]) -> tuple["GF2Matrix", list[str]]:
        """Parse one matrix from the head of ``lines``; return it and the rest."""
        if not lines:
            raise ValueError("missing matrix header")
        try:
            n_rows, n_cols = (int(t) for t in lines[0].split())
        except ValueError as exc:
            raise ValueError(f"bad matrix header {lines[0]!r}") from exc
        body = lines[1 : 1 + n_rows]
        if len(body) != n_rows:
            raise ValueError(f"expected {n_rows} matrix rows, got {len(body)}")
        rows = []
        for ln in body:
            if len(ln) != n_cols or set(ln) - {"0", "1"}:
                raise ValueError(f"bad matrix row {ln!r}")
            rows.append(bits_to_int(int(c) for c in ln))
        return cls(n_rows, n_cols, tuple(rows)), lines[1 + n_rows :]


def mat_vec_mul(m: GF2Matrix, v):
    return m.matvec(v)


def mat_mul(a: GF2Matrix, b: GF2Matrix) -> GF2Matrix:
    if a.n_cols != b.n_rows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    # row t of AB is the XOR of the rows of B picked out by row t of A
    rows = []
    for ra in a.rows:
        acc = 0
        s = 0
        while ra:
            if ra & 1:
                acc ^= b.rows[s]
            ra >>= 1
            s += 1
        rows.append(acc)
    return GF2Matrix(a.n_rows, b.n_cols, tuple(rows))


def rank(m: GF2Matrix) -> int:
    rows = list(m.rows)
    r = 0
    for col in range(m.n_cols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        r += 1
    return r


def mat_inverse(m: GF2Matrix) -> GF2Matrix:
    """Gauss-Jordan inverse; raises :class:`SingularMatrixError` if rank < n."""
    if m.n_rows != m.n_cols:
        raise ValueError(f"matrix must be square, got {m.shape}")
    n = m.n_rows
    left = list(m.rows)
    right = [1 << t for t in range(n)]
    for col in range(n):
        bit = 1 << col
        pivot = next((i for i in range(col, n) if left[i] & bit), None)
        if pivot is None:
            raise SingularMatrixError(f"matrix is singular (no pivot in column {col})")
        left[col], left[pivot] = left[pivot], left[col]
        right[col], right[pivot] = right[pivot], right[col]
        for i in range(n):
            if i != col and left[i] & bit:
                left[i] ^= left[col]
                right[i] ^= right[col]
    return GF2Matrix(n, n, tuple(right))


def circular_shift_matrix(n: int, s: int) -> GF2Matrix:
    """Identity with its columns rotated left by ``s``: column ``j`` is ``e_{(j+s) mod n}``."""
    _check_width(n)
    if not 0 <= s < n:
        raise ValueError(f"shift must be in [0, {n}), got {s}")
    return GF2Matrix.from_columns([1 << ((j + s) % n) for j in range(n)], n)


def selection_matrix(n: int, positions: Sequence[int]) -> GF2Matrix:
    """Permutation matrix whose last ``len(positions)`` columns are ``e_p`` for ``p`` in order.

    The leading columns are the unused unit vectors in increasing order.  With
    this matrix as ``Sigma`` the hash ``Psi_b^T Sigma^T`` reads exactly the
    bits ``positions`` of an index.
    """
    _check_width(n)
    positions = [int(p) for p in positions]
    if len(set(positions)) != len(positions) or any(not 0 <= p < n for p in positions):
        raise ValueError(f"positions must be distinct bits of an {n}-bit index")
    rest = [t for t in range(n) if t not in set(positions)]
    return GF2Matrix.from_columns([1 << t for t in rest + positions], n)


def random_invertible(n: int, rng: np.random.Generator) -> GF2Matrix:
    """Uniform draw from GL(n, F2) by rejection sampling uniform bit matrices."""
    _check_width(n)
    while True:
        rows = tuple(int(r) for r in rng.integers(0, 1 << n, size=n, dtype=np.uint64))
        m = GF2Matrix(n, n, rows)
        if rank(m) == n:
            return m


def gl_order(n: int) -> int:
    """``|GL(n, F2)| = prod_{i<n} (2^n - 2^i)``."""
    out = 1
    for i in range(n):
        out *= (1 << n) - (1 << i)
    return out
