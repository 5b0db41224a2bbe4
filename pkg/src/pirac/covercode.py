"""Linear covering codes used to compress linear-combination queries.

A server holding ``r`` strings ``x_1..x_r`` stores instead the ``ℓ`` symbols
``z_i = x · h_i`` for the columns ``h_i`` of a parity-check matrix. Any
combination ``x · s`` is then the XOR of the symbols on the support of the
coset leader of ``s``, so at most ``radius`` symbols are read per query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .gf2core import BitMatrix, BitVec, DimensionError, RankError, rank

TABLE_LIMIT = 24
TAU_GUARD = 10**9
SEARCH_BATCH = 4096


class TableLimitError(ValueError):
    pass


class FeasibilityError(ValueError):
    """A brute-force enumeration would exceed its declared work bound."""


class CodeFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CoveringCode:
    H: BitMatrix
    radius: int
    leaders: np.ndarray = field(repr=False)
    leader_weights: np.ndarray = field(repr=False)

    @property
    def r(self) -> int:
        return self.H.nrows

    @property
    def length(self) -> int:
        return self.H.ncols

    def leader(self, s: BitVec) -> BitVec:
        if s.n != self.r:
            raise DimensionError(f"syndrome of length {s.n}, code has r={self.r}")
        return BitVec(self.length, int(self.leaders[s.bits]))

    def coset_weight(self, s: BitVec) -> int:
        return int(self.leader_weights[s.bits])

    def to_text(self) -> str:
        return f"{self.r} {self.length} {self.radius}\n" + self.H.to_text()


def _column_array(H: BitMatrix) -> np.ndarray:
    return np.array(H.column_ints(), dtype=np.int64)


def build_code(H: BitMatrix) -> CoveringCode:
    if H.nrows > TABLE_LIMIT:
        raise TableLimitError(f"r={H.nrows} exceeds TABLE_LIMIT={TABLE_LIMIT}")
    if H.ncols > kernels.MAX_MASK_BITS:
        raise TableLimitError(f"length {H.ncols} exceeds {kernels.MAX_MASK_BITS} columns")
    if rank(H) != H.nrows:
        raise RankError(f"parity-check matrix has rank {rank(H)} < {H.nrows} rows")
    leaders, weights = kernels.leader_table(_column_array(H), H.nrows)
    return CoveringCode(H, int(weights.max()), leaders, weights)


def covering_radius(H: BitMatrix) -> int:
    """Radius by BFS on the syndrome graph; independent of the leader table."""
    dist = kernels.coset_weights(_column_array(H), H.nrows, H.ncols + 1)
    if (dist < 0).any():
        raise RankError("columns do not span the syndrome space")
    return int(dist.max())


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def hamming_parity(m: int) -> BitMatrix:
    """``m × (2^m - 1)``; column ``j`` is ``j+1`` in binary, row 0 the most significant bit."""
    if m < 2:
        raise ValueError("Hamming codes need m >= 2")
    cols = []
    for v in range(1, 1 << m):
        cols.append(sum(((v >> (m - 1 - i)) & 1) << i for i in range(m)))
    return BitMatrix.from_column_ints(cols, m)


def extended_hamming_parity(m: int) -> BitMatrix:
    if m < 2:
        raise ValueError("Hamming codes need m >= 2")
    base = hamming_parity(m).hstack(BitMatrix.zeros(m, 1))
    ones = BitVec(base.ncols, (1 << base.ncols) - 1)
    return base.vstack(BitMatrix.from_rows([ones]))


def sum_augmented_identity(r: int) -> BitMatrix:
    """``[I_r | 1]``: the plain strings plus their total sum."""
    if r < 1:
        raise ValueError("r must be >= 1")
    ones = BitMatrix.from_columns([BitVec(r, (1 << r) - 1)])
    return BitMatrix.identity(r).hstack(ones)


def identity_code(r: int) -> CoveringCode:
    return build_code(BitMatrix.identity(r))


def direct_sum(A: CoveringCode, B: CoveringCode) -> CoveringCode:
    if A.r + B.r > TABLE_LIMIT:
        raise TableLimitError(f"r={A.r + B.r} exceeds TABLE_LIMIT={TABLE_LIMIT}")
    top = A.H.hstack(BitMatrix.zeros(A.r, B.length))
    bottom = BitMatrix.zeros(B.r, A.length).hstack(B.H)
    return build_code(top.vstack(bottom))


# ---------------------------------------------------------------------------
# randomized search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    code: Optional[CoveringCode]
    attempts: int


def sphere_bound_ok(length: int, r: int, R: int) -> bool:
    """Necessary condition: balls of radius R in the syndrome space cover 2^r points."""
    return sum(math.comb(length, i) for i in range(R + 1)) >= (1 << r)


def search_codes(length: int, r: int, R: int, budget: int, seed: int = 0) -> SearchResult:
    """Sample ``[I_r | A]`` with uniform ``A`` until one has covering radius <= R."""
    if not 0 < r < length:
        raise ValueError("need 0 < r < length")
    if r > TABLE_LIMIT:
        raise TableLimitError(f"r={r} exceeds TABLE_LIMIT={TABLE_LIMIT}")
    if length > kernels.MAX_MASK_BITS:
        raise TableLimitError(f"length {length} exceeds {kernels.MAX_MASK_BITS} columns")
    if R < 0 or not sphere_bound_ok(length, r, R):
        return SearchResult(None, 0)
    rng = np.random.default_rng(seed)
    k = length - r
    done = 0
    while done < budget:
        batch = min(SEARCH_BATCH, budget - done)
        extra = rng.integers(0, 1 << r, size=(batch, k), dtype=np.int64)
        hit = kernels.first_covering(extra, r, R)
        if hit >= 0:
            cols = [1 << i for i in range(r)] + [int(c) for c in extra[hit]]
            code = build_code(BitMatrix.from_column_ints(cols, r))
            return SearchResult(code, done + int(hit) + 1)
        done += batch
    return SearchResult(None, done)


def random_search(length: int, r: int, R: int, budget: int, seed: int = 0) -> Optional[CoveringCode]:
    return search_codes(length, r, R, budget, seed).code


# ---------------------------------------------------------------------------
# generalized (tau-) coset weights
# ---------------------------------------------------------------------------


def _in_span(vectors: Sequence[int], target: int) -> bool:
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            p = v.bit_length() - 1
            if p not in basis:
                basis[p] = v
                break
            v ^= basis[p]
    while target:
        p = target.bit_length() - 1
        if p not in basis:
            return False
        target ^= basis[p]
    return True


def coset_weight(H: BitMatrix, syndromes: Sequence[BitVec]) -> int:
    """Fewest columns of ``H`` whose span contains every given syndrome."""
    if not syndromes:
        raise ValueError("need at least one syndrome")
    for s in syndromes:
        if s.n != H.nrows:
            raise DimensionError(f"syndrome of length {s.n} against {H.nrows} rows")
    if len({s.bits for s in syndromes}) != len(syndromes):
        raise ValueError("syndromes must be distinct")
    cols = H.column_ints()
    targets = [s.bits for s in syndromes]
    if not all(_in_span(cols, t) for t in targets):
        raise RankError("a syndrome lies outside the column span of H")
    for k in range(H.ncols + 1):
        for subset in combinations(cols, k):
            if all(_in_span(subset, t) for t in targets):
                return k
    raise AssertionError("unreachable")  # pragma: no cover


def tau_work(H: BitMatrix, tau: int) -> int:
    """Declared work bound C(2^r, tau) * C(ℓ, <= r) for :func:`max_tau_coset_weight`."""
    r, n = H.nrows, H.ncols
    return math.comb(1 << r, tau) * sum(math.comb(n, k) for k in range(min(r, n) + 1))


def _span_table(H: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Every distinct span of column subsets, with the fewest columns producing it.

    Built level by level: the spans of size-k subsets are the spans of size-(k-1)
    subsets extended by one more column.
    """
    size = 1 << H.nrows
    cols = H.column_ints()
    ids = np.arange(size, dtype=np.int64)
    start = np.zeros(size, dtype=bool)
    start[0] = True
    seen = {start.tobytes(): 0}
    spans = [start]
    ks = [0]
    level = [start]
    for k in range(1, H.nrows + 1):
        nxt = []
        for mem in level:
            for c in cols:
                grown = mem | mem[ids ^ c]
                key = grown.tobytes()
                if key not in seen:
                    seen[key] = k
                    spans.append(grown)
                    ks.append(k)
                    nxt.append(grown)
        level = nxt
        if not level:
            break
    return np.array(spans), np.array(ks, dtype=np.int64)


def max_tau_coset_weight(H: BitMatrix, tau: int) -> int:
    """Largest tau-coset weight over all sets of ``tau`` distinct syndromes."""
    if tau < 1 or tau > (1 << H.nrows):
        raise ValueError(f"tau must be in [1, 2^{H.nrows}]")
    if H.nrows > TABLE_LIMIT:
        raise TableLimitError(f"r={H.nrows} exceeds TABLE_LIMIT={TABLE_LIMIT}")
    work = tau_work(H, tau)
    if work > TAU_GUARD:
        raise FeasibilityError(f"enumeration needs {work} span tests > {TAU_GUARD}")
    if rank(H) != H.nrows:
        raise RankError("parity-check matrix must have full row rank")
    member, ks = _span_table(H)
    return int(kernels.max_tau(member, ks, tau))


# ---------------------------------------------------------------------------
# encoded storage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EncodedStorage:
    code: CoveringCode
    symbol_len: int
    symbols: tuple[BitVec, ...]

    def __post_init__(self):
        if len(self.symbols) != self.code.length:
            raise DimensionError("one symbol per code column is required")
        for z in self.symbols:
            if z.n != self.symbol_len:
                raise DimensionError("symbol length mismatch")


def encode_strings(strings: Sequence[BitVec], code: CoveringCode) -> EncodedStorage:
    """Store ``z_i = Σ_j h_i[j] x_j`` for the ``r`` equal-length strings ``x_j``."""
    if len(strings) != code.r:
        raise DimensionError(f"{len(strings)} strings for a code with r={code.r}")
    t = strings[0].n if strings else 0
    symbols = []
    for h in code.H.column_ints():
        acc = 0
        j = 0
        while h:
            if h & 1:
                acc ^= strings[j].bits
            h >>= 1
            j += 1
        symbols.append(BitVec(t, acc))
    return EncodedStorage(code, t, tuple(symbols))


def encode_storage(x: BitMatrix, code: CoveringCode) -> EncodedStorage:
    """Encode the ``t × r`` source matrix whose columns are the strings."""
    if x.ncols != code.r:
        raise DimensionError(f"source has {x.ncols} columns, code has r={code.r}")
    return encode_strings([x.col(j) for j in range(x.ncols)], code)


def answer_query(storage: EncodedStorage, s: BitVec) -> tuple[BitVec, frozenset[int]]:
    """Compute ``x · s`` from the stored symbols, reporting which symbols were read."""
    y = storage.code.leader(s)
    accessed = frozenset(y.support)
    acc = 0
    for i in accessed:
        acc ^= storage.symbols[i].bits
    return BitVec(storage.symbol_len, acc), accessed


# ---------------------------------------------------------------------------
# text import / export
# ---------------------------------------------------------------------------


def code_to_text(code: CoveringCode) -> str:
    return code.to_text()


def code_from_text(text: str) -> CoveringCode:
    """Parse ``"r ℓ radius"`` then matrix rows; the radius claim is re-verified."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise CodeFormatError("empty code file")
    try:
        r, n, radius = (int(v) for v in lines[0].split())
    except ValueError as exc:
        raise CodeFormatError(f"bad header {lines[0]!r}; expected 'r length radius'") from exc
    H = BitMatrix.from_text("\n".join(lines[1:])) if r else BitMatrix.zeros(0, n)
    if H.shape != (r, n):
        raise CodeFormatError(f"header says {r}x{n}, matrix is {H.nrows}x{H.ncols}")
    code = build_code(H)
    if code.radius != radius:
        raise CodeFormatError(f"claimed radius {radius}, verified radius {code.radius}")
    return code


def load_code(path) -> CoveringCode:
    return code_from_text(Path(path).read_text())


def save_code(code: CoveringCode, path) -> None:
    Path(path).write_text(code.to_text())


def load_matrix(path) -> BitMatrix:
    return BitMatrix.from_text(Path(path).read_text())
