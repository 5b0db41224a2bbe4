"""Sphere-covering tradeoff and achievable (rate, access, storage) tuples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Optional, Union

import numpy as np

Number = Union[float, Fraction]

SMALL_CASE_NOTE = (
    "N=3 K=2 eps=1: Delta=3*f(2)~0.660 per query; counting 6 queries at 0.22ML each "
    "gives 1.32 instead, and this table reports the per-query value"
)


@dataclass(frozen=True)
class SystemParams:
    N: int
    M: int
    L: int
    eps: float
    pi: Optional[float] = None

    def __post_init__(self):
        if self.N < 2 or self.M < 1 or self.L < 1:
            raise ValueError("need N >= 2, M >= 1, L >= 1")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.pi is not None and not 0 <= self.pi <= self.eps:
            raise ValueError("storage for PIR must satisfy 0 <= pi <= eps")

    @property
    def storage_overhead(self) -> float:
        return self.eps * self.N


@dataclass(frozen=True)
class AchievableTuple:
    omega: Fraction
    delta: float
    eps: float
    N: Optional[int] = None
    M: Optional[int] = None
    L: Optional[int] = None
    K: Optional[int] = None
    delta_prime: Optional[Fraction] = None

    def __post_init__(self):
        if not 0 < self.omega <= 1:
            raise ValueError(f"rate {self.omega} outside (0, 1]")
        if self.delta < 0 or self.eps <= 0:
            raise ValueError("need delta >= 0 and eps > 0")


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def entropy_inverse(c: float, tol: float = 1e-12) -> float:
    """The x in [0, 1/2] with H(x) = c, by bisection."""
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"entropy value {c} outside [0, 1]")
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if binary_entropy(mid) <= c:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def f_of_beta(beta: float) -> float:
    """Normalized covering radius α = β·H⁻¹(1/β) for storage ``βr`` over ``r`` strings."""
    if beta < 1:
        raise ValueError(f"beta={beta} < 1")
    return beta * entropy_inverse(1.0 / beta)


def tajeddine_tuple(N: int, K: int, eps: float, with_gcd: bool = True) -> AchievableTuple:
    if not 1 <= K < N:
        raise ValueError("need 1 <= K < N")
    if eps * K < 1:
        raise ValueError(f"eps={eps} below the PIR storage 1/K")
    plain = Fraction(N, K)
    covered = N * f_of_beta(K * eps)
    if with_gcd:
        covered /= math.gcd(K, N - K)
    return AchievableTuple(
        omega=Fraction(N - K, N),
        delta=min(covered, float(plain)),
        eps=eps,
        N=N,
        K=K,
        delta_prime=plain,
    )


def tajeddine_table(N: int, eps: float, with_gcd: bool) -> list[AchievableTuple]:
    if N < 2 or eps < 1:
        raise ValueError("need N >= 2 and eps >= 1")
    return [tajeddine_tuple(N, K, eps, with_gcd) for K in range(1, N)]


def gcd_improved_rows(N: int, eps: float) -> list[AchievableTuple]:
    """Rows where splitting by lcm(K, N-K) helps, i.e. gcd(K, N-K) > 1."""
    return [t for t in tajeddine_table(N, eps, True) if math.gcd(t.K, N - t.K) > 1]


def memory_sharing_tuple(N: int, p: int, q: int, eps: float) -> AchievableTuple:
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise ValueError("p/q must be a reduced positive fraction")
    share = Fraction(p, q)
    if share < Fraction(1, N) or share > eps:
        raise ValueError("need 1/N <= p/q <= eps")
    servers = N * share
    lo, hi = math.floor(servers), math.ceil(servers)
    if lo < 2:
        raise ValueError(f"floor(Np/q)={lo}: every subscheme needs at least 2 servers")
    eta = servers - lo
    download = (1 - eta) * Fraction(lo, lo - 1)
    if eta:
        download += eta * Fraction(hi, hi - 1)
    return AchievableTuple(
        omega=1 / download,
        delta=float(servers) * f_of_beta(eps / float(share)),
        eps=eps,
        N=N,
    )


def curve_samples(beta_min: float, beta_max: float, steps: int) -> list[tuple[float, float]]:
    if not 1 <= beta_min < beta_max or steps < 2:
        raise ValueError("need 1 <= beta_min < beta_max and steps >= 2")
    return [(float(b), f_of_beta(float(b))) for b in np.linspace(beta_min, beta_max, steps)]


def round_half_up(x: Number, places: int = 3) -> str:
    q = Decimal(1).scaleb(-places)
    if isinstance(x, Fraction):
        d = Decimal(x.numerator) / Decimal(x.denominator)
    else:
        d = Decimal(repr(float(x)))
    return str(d.quantize(q, rounding=ROUND_HALF_UP))
