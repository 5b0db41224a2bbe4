"""Exact GF(2) vectors and matrices on packed integers.

A :class:`BitVec` packs its bits into a Python ``int`` (bit ``i`` of the int is
position ``i``), so XOR, popcount and support are word-parallel. A
:class:`BitMatrix` is a tuple of row vectors. Both are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class RankError(ValueError):
    """A full-row-rank matrix was required."""


@dataclass(frozen=True)
class BitVec:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits beyond position {self.n - 1} are set")

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        if not 0 <= i < n:
            raise IndexError(i)
        return cls(n, 1 << i)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        value = 0
        n = 0
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise ValueError(f"not a bit: {b!r}")
            value |= int(b) << i
            n = i + 1
        return cls(n, value)

    @classmethod
    def from_str(cls, text: str) -> "BitVec":
        """Parse ``'0110'``; the leftmost character is position 0."""
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise ValueError(f"bad bit string {text!r}")
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> "BitVec":
        value = 0
        for i in support:
            if not 0 <= i < n:
                raise IndexError(i)
            value |= 1 << i
        return cls(n, value)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __iter__(self):
        return (self[i] for i in range(self.n))

    def __xor__(self, other: "BitVec") -> "BitVec":
        if other.n != self.n:
            raise DimensionError(f"length {self.n} vs {other.n}")
        return BitVec(self.n, self.bits ^ other.bits)

    __add__ = __xor__

    def dot(self, other: "BitVec") -> int:
        if other.n != self.n:
            raise DimensionError(f"length {self.n} vs {other.n}")
        return (self.bits & other.bits).bit_count() & 1

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @property
    def support(self) -> list[int]:
        out = []
        b = self.bits
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return out

    def any(self) -> bool:
        return self.bits != 0

    def slice(self, start: int, stop: int) -> "BitVec":
        if not 0 <= start <= stop <= self.n:
            raise IndexError((start, stop))
        return BitVec(stop - start, (self.bits >> start) & ((1 << (stop - start)) - 1))

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec(self.n + other.n, self.bits | (other.bits << self.n))

    def to_str(self) -> str:
        return "".join(str(b) for b in self)

    def hex(self) -> str:
        """Hex of the packed integer, zero-padded to ``ceil(n / 4)`` digits."""
        width = max(1, (self.n + 3) // 4)
        return format(self.bits, f"0{width}x")

    def __repr__(self) -> str:
        return f"BitVec('{self.to_str()}')"


def concat_all(parts: Sequence[BitVec]) -> BitVec:
    out = BitVec(0)
    for p in parts:
        out = out.concat(p)
    return out


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    rows: tuple[BitVec, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise DimensionError(f"expected {self.nrows} rows, got {len(self.rows)}")
        for row in self.rows:
            if row.n != self.ncols:
                raise DimensionError(f"row of length {row.n} in a {self.ncols}-column matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec], ncols: Optional[int] = None) -> "BitMatrix":
        rows = tuple(rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for an empty matrix")
            ncols = rows[0].n
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        return cls.from_rows([BitVec.from_bits(r) for r in rows])

    @classmethod
    def from_columns(cls, cols: Sequence[BitVec], nrows: Optional[int] = None) -> "BitMatrix":
        cols = list(cols)
        if nrows is None:
            if not cols:
                raise ValueError("nrows is required when there are no columns")
            nrows = cols[0].n
        for c in cols:
            if c.n != nrows:
                raise DimensionError(f"column of length {c.n}, expected {nrows}")
        return cls.from_column_ints([c.bits for c in cols], nrows)

    @classmethod
    def from_column_ints(cls, cols: Sequence[int], nrows: int) -> "BitMatrix":
        """Columns packed as ints, bit ``i`` being row ``i``."""
        rows = []
        for i in range(nrows):
            value = 0
            for j, c in enumerate(cols):
                value |= ((int(c) >> i) & 1) << j
            rows.append(BitVec(len(cols), value))
        return cls(nrows, len(cols), tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(BitVec.unit(n, i) for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, tuple(BitVec(ncols) for _ in range(nrows)))

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        """One row per line of '0'/'1' characters; blank lines and '#' comments skipped."""
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise ValueError("no matrix rows found")
        rows = [BitVec.from_str(ln) for ln in lines]
        return cls.from_rows(rows)

    def to_text(self) -> str:
        return "".join(row.to_str() + "\n" for row in self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> BitVec:
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        value = 0
        for i, row in enumerate(self.rows):
            value |= ((row.bits >> j) & 1) << i
        return BitVec(self.nrows, value)

    def column_ints(self) -> list[int]:
        return [self.col(j).bits for j in range(self.ncols)]

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix.from_rows([self.col(j) for j in range(self.ncols)], self.nrows)

    def permute_columns(self, perm: Sequence[int]) -> "BitMatrix":
        """Column ``k`` of the result is column ``perm[k]`` of self."""
        return BitMatrix.from_column_ints([self.column_ints()[p] for p in perm], self.nrows)

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.nrows != self.nrows:
            raise DimensionError("row counts differ")
        return BitMatrix.from_rows(
            [a.concat(b) for a, b in zip(self.rows, other.rows)], self.ncols + other.ncols
        )

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.ncols != self.ncols:
            raise DimensionError("column counts differ")
        return BitMatrix.from_rows(self.rows + other.rows, self.ncols)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"{self.shape} @ {other.shape}")
        cols = [mat_vec_mul(self, other.col(j)) for j in range(other.ncols)]
        return BitMatrix.from_columns(cols, self.nrows)


def mat_vec_mul(H: BitMatrix, y: BitVec) -> BitVec:
    """Syndrome ``H y^T``: XOR of the columns selected by ``y``."""
    if y.n != H.ncols:
        raise DimensionError(f"vector of length {y.n} against {H.ncols} columns")
    value = 0
    for i, row in enumerate(H.rows):
        value |= ((row.bits & y.bits).bit_count() & 1) << i
    return BitVec(H.nrows, value)


def _column_basis(cols: Sequence[int]) -> dict[int, tuple[int, int]]:
    """Echelon basis of the column span: pivot bit -> (vector, combination mask)."""
    basis: dict[int, tuple[int, int]] = {}
    for j, c in enumerate(cols):
        v, combo = c, 1 << j
        while v:
            p = v.bit_length() - 1
            if p not in basis:
                basis[p] = (v, combo)
                break
            bv, bc = basis[p]
            v ^= bv
            combo ^= bc
    return basis


def rank(M: BitMatrix) -> int:
    return len(_column_basis(M.column_ints()))


def solve_any(H: BitMatrix, s: BitVec) -> Optional[BitVec]:
    """Some ``y`` with ``H y^T = s``, or ``None`` when ``s`` is outside the column span."""
    if s.n != H.nrows:
        raise DimensionError(f"syndrome of length {s.n} against {H.nrows} rows")
    basis = _column_basis(H.column_ints())
    v, combo = s.bits, 0
    while v:
        p = v.bit_length() - 1
        if p not in basis:
            return None
        bv, bc = basis[p]
        v ^= bv
        combo ^= bc
    return BitVec(H.ncols, combo)


def rref(M: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form and its pivot columns."""
    rows = [r.bits for r in M.rows]
    pivots = []
    top = 0
    for j in range(M.ncols):
        bit = 1 << j
        pivot = next((i for i in range(top, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[top], rows[pivot] = rows[pivot], rows[top]
        for i in range(len(rows)):
            if i != top and rows[i] & bit:
                rows[i] ^= rows[top]
        pivots.append(j)
        top += 1
        if top == len(rows):
            break
    return BitMatrix.from_rows([BitVec(M.ncols, r) for r in rows], M.ncols), pivots


def systematic_form(H: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Column-permuted row reduction ``[I_r | A]`` of a full-row-rank ``H``.

    Returns ``(Hs, perm)`` where column ``k`` of ``Hs`` comes from column
    ``perm[k]`` of ``H``.
    """
    reduced, pivots = rref(H)
    if len(pivots) != H.nrows:
        raise RankError(f"rank {len(pivots)} < {H.nrows} rows")
    rest = [j for j in range(H.ncols) if j not in set(pivots)]
    perm = pivots + rest
    return reduced.permute_columns(perm), perm


def unpermute_columns(M: BitMatrix, perm: Sequence[int]) -> BitMatrix:
    """Inverse of :meth:`BitMatrix.permute_columns` for the same ``perm``."""
    cols = [0] * M.ncols
    for k, p in enumerate(perm):
        cols[p] = M.col(k).bits
    return BitMatrix.from_column_ints(cols, M.nrows)


def same_row_space(A: BitMatrix, B: BitMatrix) -> bool:
    if A.ncols != B.ncols:
        return False
    ra = rank(A)
    return ra == rank(B) and rank(A.vstack(B)) == ra
