"""Storage designs for restricted-pattern queries.

A pattern query picks at most one substring from each file. Substring ``j``
(1-based) of file ``m`` (1-based) sits at bit ``(m-1)*s + (j-1)`` of a mask over
the ``M*s`` substrings; a stored combination is such a mask.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .covercode import CoveringCode, FeasibilityError, build_code
from .gf2core import BitMatrix

VERIFY_GUARD = 10**8

Pair = tuple[int, int]


@dataclass(frozen=True)
class RestrictedDesign:
    M: int
    s: int
    stored: tuple[frozenset[Pair], ...]
    R: int

    def __post_init__(self):
        for combo in self.stored:
            if not combo:
                raise ValueError("empty stored combination")
            files = [m for m, _ in combo]
            if len(set(files)) != len(files):
                raise ValueError(f"{sorted(combo)} uses a file twice")
            for m, j in combo:
                if not (1 <= m <= self.M and 1 <= j <= self.s):
                    raise ValueError(f"substring ({m}, {j}) out of range")

    @classmethod
    def from_pairs(cls, M: int, s: int, stored: Iterable[Iterable[Pair]], R: int) -> "RestrictedDesign":
        return cls(M, s, tuple(frozenset(c) for c in stored), R)

    @property
    def width(self) -> int:
        return self.M * self.s

    def mask(self, combo: Iterable[Pair]) -> int:
        return sum(1 << ((m - 1) * self.s + (j - 1)) for m, j in combo)

    @property
    def masks(self) -> list[int]:
        return [self.mask(c) for c in self.stored]

    def without(self, combo: Iterable[Pair]) -> "RestrictedDesign":
        target = frozenset(combo)
        return RestrictedDesign(self.M, self.s, tuple(c for c in self.stored if c != target), self.R)


def pattern_queries(M: int, s: int) -> list[int]:
    """All (s+1)^M pattern masks, each file contributing one substring or none."""
    out = []
    for choice in itertools.product(range(s + 1), repeat=M):
        out.append(sum(1 << (m * s + j - 1) for m, j in enumerate(choice) if j))
    return out


def singletons(M: int, s: int) -> list[frozenset[Pair]]:
    return [frozenset({(m, j)}) for m in range(1, M + 1) for j in range(1, s + 1)]


def identity_design(M: int, s: int, R: Optional[int] = None) -> RestrictedDesign:
    return RestrictedDesign(M, s, tuple(singletons(M, s)), M if R is None else R)


def eleven_combination_design() -> RestrictedDesign:
    """Eleven combinations for M=3 files of 2 substrings: every pattern query in <= 2 reads."""
    pairs = [[(1, 1), (2, 2)], [(2, 1), (3, 2)], [(3, 1), (1, 2)]]
    triples = [[(1, 1), (2, 1), (3, 1)], [(1, 2), (2, 2), (3, 2)]]
    stored = [list(c) for c in singletons(3, 2)] + pairs + triples
    return RestrictedDesign.from_pairs(3, 2, stored, R=2)


def _reach(masks: list[int], depth: int) -> dict[int, int]:
    """XOR of at most ``depth`` distinct stored masks -> fewest masks needed."""
    best = {0: 0}
    for k in range(1, depth + 1):
        for subset in itertools.combinations(masks, k):
            v = 0
            for x in subset:
                v ^= x
            if v not in best:
                best[v] = k
    return best


def _verify_work(d: RestrictedDesign) -> int:
    n = len(d.stored)
    return (d.s + 1) ** d.M + sum(math.comb(n, k) for k in range(d.R + 1))


def verify_restricted_design(d: RestrictedDesign) -> tuple[bool, int]:
    """Whether every pattern query is a sum of at most ``R`` stored combinations.

    Returns ``(ok, worst)`` where ``worst`` is the largest, over pattern queries, of
    the fewest stored combinations summing to the query.
    """
    work = _verify_work(d)
    if work > VERIFY_GUARD:
        raise FeasibilityError(f"verification needs {work} checks > {VERIFY_GUARD}")
    queries = pattern_queries(d.M, d.s)
    reach = _reach(d.masks, d.R)
    missing = [q for q in queries if q not in reach]
    if not missing:
        return True, max(reach[q] for q in queries)
    if d.width > 24:
        raise FeasibilityError("exact count of uncoverable queries needs width <= 24")
    dist = kernels.coset_weights(np.array(d.masks, dtype=np.int64), d.width, len(d.masks))
    worst = max(int(dist[q]) if dist[q] >= 0 else math.inf for q in missing)
    return False, worst


def design_code(d: RestrictedDesign) -> CoveringCode:
    """Covering-code backend whose columns are the stored combinations.

    The leader of a pattern query is a fewest-reads way to answer it, so a server
    using this backend answers the B-E-P queries within the design's bound.
    """
    H = BitMatrix.from_column_ints(d.masks, d.width)
    return build_code(H)


def _candidates(M: int, s: int) -> list[frozenset[Pair]]:
    out = []
    for choice in itertools.product(range(s + 1), repeat=M):
        combo = frozenset((m + 1, j) for m, j in enumerate(choice) if j)
        if len(combo) >= 2:
            out.append(combo)
    return out


def greedy_restricted_design(M: int, s: int, R: int, budget: int, seed: int = 0) -> Optional[RestrictedDesign]:
    """Grow a design from the singletons, each step adding the combination that
    makes the most still-uncovered pattern queries reachable within ``R`` reads."""
    if R < 1:
        return None
    design = identity_design(M, s, R)
    work = _verify_work(design) + len(_candidates(M, s)) * (s + 1) ** M
    if work > VERIFY_GUARD:
        raise FeasibilityError(f"search needs about {work} checks > {VERIFY_GUARD}")
    queries = pattern_queries(M, s)
    pool = _candidates(M, s)
    random.Random(seed).shuffle(pool)
    stored = list(design.stored)
    for _ in range(budget + 1):
        masks = [design.mask(c) for c in stored]
        reach_r = _reach(masks, R)
        uncovered = [q for q in queries if q not in reach_r]
        if not uncovered:
            found = RestrictedDesign(M, s, tuple(stored), R)
            ok, _ = verify_restricted_design(found)
            assert ok
            return found
        reach_less = _reach(masks, R - 1)
        best, best_gain = None, 0
        for c in pool:
            if c in stored:
                continue
            cm = design.mask(c)
            gain = sum(1 for u in uncovered if (u ^ cm) in reach_less)
            if gain > best_gain:
                best, best_gain = c, gain
        if best is None:
            return None
        stored.append(best)
    return None
