"""Executable PIR schemes with exact access accounting.

Every scheme takes its randomness as an explicit argument, so a run is a pure
function of (database, desired file, randomness, server storage). Servers keep
their strings through a covering-code backend and log which stored symbols
each query touches.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .covercode import (
    CoveringCode,
    EncodedStorage,
    FeasibilityError,
    answer_query,
    build_code,
    encode_strings,
    sum_augmented_identity,
)
from .gf2core import BitMatrix, BitVec, DimensionError, concat_all

AUDIT_LIMIT = 1 << 20
SCHEMES = ("two-server", "replicated", "mds32", "bep")


@dataclass(frozen=True)
class Database:
    M: int
    L: int
    files: tuple[BitVec, ...]

    def __post_init__(self):
        if len(self.files) != self.M:
            raise DimensionError(f"{len(self.files)} files, expected {self.M}")
        if any(x.n != self.L for x in self.files):
            raise DimensionError(f"every file must have {self.L} bits")

    @classmethod
    def random(cls, M: int, L: int, seed: int = 0) -> "Database":
        rng = np.random.default_rng(seed)
        bits = rng.integers(0, 2, size=(M, L))
        return cls(M, L, tuple(BitVec.from_bits(row.tolist()) for row in bits))

    @classmethod
    def from_bytes(cls, data: bytes, M: int, L: int) -> "Database":
        """Bit ``i`` of the stream is bit ``i % 8`` of byte ``i // 8``; file m is bits [mL, (m+1)L)."""
        if len(data) * 8 < M * L:
            raise DimensionError(f"{len(data) * 8} bits available, {M * L} needed")
        value = int.from_bytes(data, "little")
        mask = (1 << L) - 1
        return cls(M, L, tuple(BitVec(L, (value >> (m * L)) & mask) for m in range(M)))

    def file(self, f: int) -> BitVec:
        return self.files[f - 1]

    def split(self, parts: int) -> list[list[BitVec]]:
        """``out[m][j]`` is substring ``j+1`` of file ``m+1``."""
        if self.L % parts:
            raise DimensionError(f"L={self.L} is not divisible into {parts} substrings")
        w = self.L // parts
        return [[x.slice(j * w, (j + 1) * w) for j in range(parts)] for x in self.files]


@dataclass(frozen=True)
class AccessLog:
    accessed: tuple[frozenset[int], ...]
    symbol_len: int

    @property
    def sum_count(self) -> int:
        return sum(len(a) for a in self.accessed)

    @property
    def union(self) -> frozenset[int]:
        return frozenset().union(*self.accessed)

    @property
    def union_count(self) -> int:
        return len(self.union)


@dataclass(frozen=True)
class Transcript:
    scheme: str
    N: int
    M: int
    L: int
    f: int
    randomness: dict
    received: tuple  # what each server is sent, as it sees it
    queries: tuple[tuple[BitVec, ...], ...]  # coefficient vectors over each server's strings
    responses: tuple[tuple[BitVec, ...], ...]
    logs: tuple[AccessLog, ...]
    reconstructed: BitVec

    @property
    def download_bits(self) -> int:
        return sum(r.n for rows in self.responses for r in rows)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.L, self.download_bits)

    def to_dict(self) -> dict:
        report = access_report(self)
        return {
            "scheme": self.scheme,
            "N": self.N,
            "M": self.M,
            "L": self.L,
            "f": self.f,
            "servers": [
                {
                    "queries": [q.hex() for q in qs],
                    "responses": [r.hex() for r in rs],
                    "accessed": [sorted(a) for a in log.accessed],
                }
                for qs, rs, log in zip(self.queries, self.responses, self.logs)
            ],
            "reconstructed": self.reconstructed.hex(),
            "delta_sum": float(report.delta_sum),
            "delta_union": float(report.delta_union),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# server side
# ---------------------------------------------------------------------------


def _storage(strings: Sequence[BitVec], code: Optional[CoveringCode]) -> EncodedStorage:
    if code is None:
        code = build_code(BitMatrix.identity(len(strings)))
    return encode_strings(list(strings), code)


def _serve(storage: EncodedStorage, coeffs: Sequence[BitVec]):
    answers = [answer_query(storage, s) for s in coeffs]
    return (
        tuple(v for v, _ in answers),
        AccessLog(tuple(a for _, a in answers), storage.symbol_len),
    )


def _check_f(f: int, M: int):
    if not 1 <= f <= M:
        raise ValueError(f"file index {f} outside 1..{M}")


def _as_list(codes, n):
    if codes is None or isinstance(codes, CoveringCode):
        return [codes] * n
    codes = list(codes)
    if len(codes) != n:
        raise DimensionError(f"{len(codes)} backends for {n} servers")
    return codes


# ---------------------------------------------------------------------------
# two servers, whole files
# ---------------------------------------------------------------------------


def two_server_queries(M: int, f: int, a: BitVec) -> tuple[BitVec, BitVec]:
    if a.n != M:
        raise DimensionError(f"a has length {a.n}, expected {M}")
    _check_f(f, M)
    return a, a ^ BitVec.unit(M, f - 1)


def two_server_storages(db: Database, augmented: bool = False, code: Optional[CoveringCode] = None):
    if code is None and augmented:
        code = build_code(sum_augmented_identity(db.M))
    s = _storage(db.files, code)
    return [s, s]


def scheme_two_server(
    db: Database,
    f: int,
    a: BitVec,
    augmented: bool = False,
    storages: Optional[Sequence[EncodedStorage]] = None,
) -> Transcript:
    q1, q2 = two_server_queries(db.M, f, a)
    if storages is None:
        storages = two_server_storages(db, augmented)
    r1, log1 = _serve(storages[0], [q1])
    r2, log2 = _serve(storages[1], [q2])
    return Transcript(
        "two-server", 2, db.M, db.L, f, {"a": a},
        received=(q1, q2),
        queries=((q1,), (q2,)),
        responses=(r1, r2),
        logs=(log1, log2),
        reconstructed=r1[0] ^ r2[0],
    )


# ---------------------------------------------------------------------------
# N replicated servers, N-1 substrings per file
# ---------------------------------------------------------------------------


def replicated_queries(N: int, M: int, f: int, v: BitVec) -> list[BitVec]:
    r = (N - 1) * M
    if v.n != r:
        raise DimensionError(f"v has length {v.n}, expected {r}")
    _check_f(f, M)
    out = [v ^ BitVec.unit(r, (f - 1) * (N - 1) + n - 1) for n in range(1, N)]
    out.append(v)
    return out


def replicated_storages(N: int, db: Database, code=None):
    strings = [x for parts in db.split(N - 1) for x in parts]
    return [_storage(strings, c) for c in _as_list(code, N)]


def scheme_replicated(
    N: int,
    db: Database,
    f: int,
    v: BitVec,
    code=None,
    storages: Optional[Sequence[EncodedStorage]] = None,
) -> Transcript:
    if N < 2:
        raise ValueError("need N >= 2")
    qs = replicated_queries(N, db.M, f, v)
    if storages is None:
        storages = replicated_storages(N, db, code)
    served = [_serve(st, [q]) for st, q in zip(storages, qs)]
    mask = served[-1][0][0]
    pieces = [served[n][0][0] ^ mask for n in range(N - 1)]
    return Transcript(
        "replicated", N, db.M, db.L, f, {"v": v},
        received=tuple(qs),
        queries=tuple((q,) for q in qs),
        responses=tuple(r for r, _ in served),
        logs=tuple(log for _, log in served),
        reconstructed=concat_all(pieces),
    )


# ---------------------------------------------------------------------------
# (3,2)-MDS storage: x_1 | x_2 | x_1 + x_2, two queries per server
# ---------------------------------------------------------------------------


def mds32_queries(M: int, f: int, a: BitVec, b: BitVec) -> list[tuple[BitVec, BitVec]]:
    if a.n != M or b.n != M:
        raise DimensionError(f"a and b must have length {M}")
    _check_f(f, M)
    e = BitVec.unit(M, f - 1)
    return [(a ^ e, b), (a, b ^ e), (a, b)]


def mds32_storages(db: Database, code=None):
    halves = db.split(2)
    first = [h[0] for h in halves]
    second = [h[1] for h in halves]
    coded = [h[0] ^ h[1] for h in halves]
    return [_storage(s, c) for s, c in zip((first, second, coded), _as_list(code, 3))]


def scheme_mds32(
    db: Database,
    f: int,
    a: BitVec,
    b: BitVec,
    code=None,
    storages: Optional[Sequence[EncodedStorage]] = None,
) -> Transcript:
    qs = mds32_queries(db.M, f, a, b)
    if storages is None:
        storages = mds32_storages(db, code)
    served = [_serve(st, q) for st, q in zip(storages, qs)]
    (i1, i2), (ii1, ii2), (iii1, iii2) = (r for r, _ in served)
    # Σa·x_1 = III row 1 - II row 1;  Σb·x_2 = III row 2 - I row 2
    part1 = i1 ^ (iii1 ^ ii1)
    part2 = ii2 ^ (iii2 ^ i2)
    return Transcript(
        "mds32", 3, db.M, db.L, f, {"a": a, "b": b},
        received=tuple(qs),
        queries=tuple(qs),
        responses=tuple(r for r, _ in served),
        logs=tuple(log for _, log in served),
        reconstructed=part1.concat(part2),
    )


# ---------------------------------------------------------------------------
# B-E-P: shifts in Z_N, at most one substring per file in every query
# ---------------------------------------------------------------------------


def bep_received(N: int, M: int, f: int, z: Sequence[int]) -> list[tuple[int, ...]]:
    if len(z) != M:
        raise DimensionError(f"z has {len(z)} entries, expected {M}")
    if any(not 0 <= zi < N for zi in z):
        raise ValueError(f"z entries must lie in Z_{N}")
    _check_f(f, M)
    out = []
    for n in range(1, N + 1):
        b = list(z)
        b[f - 1] = (z[f - 1] + n) % N
        out.append(tuple(b))
    return out


def bep_coefficients(N: int, b: Sequence[int]) -> BitVec:
    """Pattern vector over the (N-1)M substrings; index 0 means the zero substring."""
    r = (N - 1) * len(b)
    support = [m * (N - 1) + j - 1 for m, j in enumerate(b) if j]
    return BitVec.from_support(r, support)


def bep_storages(N: int, db: Database, code=None):
    return replicated_storages(N, db, code)


def scheme_bep(
    N: int,
    db: Database,
    f: int,
    z: Sequence[int],
    code=None,
    storages: Optional[Sequence[EncodedStorage]] = None,
) -> Transcript:
    if N < 2:
        raise ValueError("need N >= 2")
    received = bep_received(N, db.M, f, z)
    coeffs = [bep_coefficients(N, b) for b in received]
    if storages is None:
        storages = bep_storages(N, db, code)
    served = [_serve(st, [q]) for st, q in zip(storages, coeffs)]
    responses = [r[0] for r, _ in served]
    mask_server = next(n for n, b in enumerate(received) if b[f - 1] == 0)
    mask = responses[mask_server]
    pieces: list[Optional[BitVec]] = [None] * (N - 1)
    for n, b in enumerate(received):
        if n != mask_server:
            pieces[b[f - 1] - 1] = responses[n] ^ mask
    return Transcript(
        "bep", N, db.M, db.L, f, {"z": tuple(z)},
        received=tuple(received),
        queries=tuple((q,) for q in coeffs),
        responses=tuple(r for r, _ in served),
        logs=tuple(log for _, log in served),
        reconstructed=concat_all(pieces),
    )


# ---------------------------------------------------------------------------
# uniform driver: randomness spaces, storages, runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchemeInfo:
    name: str
    servers: Callable[[int], int]
    strings_per_server: Callable[[int, int], int]
    space_size: Callable[[int, int], int]
    enumerate: Callable[[int, int], Iterator[dict]]
    sample: Callable[[int, int, np.random.Generator], dict]
    received: Callable[[int, int, int, dict], list]


def _bits_space(n):
    return (BitVec(n, v) for v in range(1 << n))


def _rand_bits(n, rng):
    return BitVec.from_bits(rng.integers(0, 2, size=n).tolist()) if n else BitVec(0)


SCHEME_INFO = {
    "two-server": SchemeInfo(
        "two-server",
        servers=lambda N: 2,
        strings_per_server=lambda N, M: M,
        space_size=lambda N, M: 1 << M,
        enumerate=lambda N, M: ({"a": a} for a in _bits_space(M)),
        sample=lambda N, M, rng: {"a": _rand_bits(M, rng)},
        received=lambda N, M, f, rnd: list(two_server_queries(M, f, rnd["a"])),
    ),
    "replicated": SchemeInfo(
        "replicated",
        servers=lambda N: N,
        strings_per_server=lambda N, M: (N - 1) * M,
        space_size=lambda N, M: 1 << ((N - 1) * M),
        enumerate=lambda N, M: ({"v": v} for v in _bits_space((N - 1) * M)),
        sample=lambda N, M, rng: {"v": _rand_bits((N - 1) * M, rng)},
        received=lambda N, M, f, rnd: replicated_queries(N, M, f, rnd["v"]),
    ),
    "mds32": SchemeInfo(
        "mds32",
        servers=lambda N: 3,
        strings_per_server=lambda N, M: M,
        space_size=lambda N, M: 1 << (2 * M),
        enumerate=lambda N, M: (
            {"a": a, "b": b} for a in _bits_space(M) for b in _bits_space(M)
        ),
        sample=lambda N, M, rng: {"a": _rand_bits(M, rng), "b": _rand_bits(M, rng)},
        received=lambda N, M, f, rnd: mds32_queries(M, f, rnd["a"], rnd["b"]),
    ),
    "bep": SchemeInfo(
        "bep",
        servers=lambda N: N,
        strings_per_server=lambda N, M: (N - 1) * M,
        space_size=lambda N, M: N**M,
        enumerate=lambda N, M: (
            {"z": z} for z in itertools.product(range(N), repeat=M)
        ),
        sample=lambda N, M, rng: {"z": tuple(int(v) for v in rng.integers(0, N, size=M))},
        received=lambda N, M, f, rnd: bep_received(N, M, f, rnd["z"]),
    ),
}


def scheme_info(scheme: str) -> SchemeInfo:
    try:
        return SCHEME_INFO[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}") from None


def effective_n(scheme: str, N: int) -> int:
    return scheme_info(scheme).servers(N)


def make_storages(scheme: str, N: int, db: Database, code=None) -> list[EncodedStorage]:
    """Encode every server's strings once so repeated runs can share them."""
    if scheme == "two-server":
        return two_server_storages(db, code=code)
    if scheme == "replicated":
        return replicated_storages(N, db, code)
    if scheme == "mds32":
        return mds32_storages(db, code)
    if scheme == "bep":
        return bep_storages(N, db, code)
    raise ValueError(f"unknown scheme {scheme!r}")


def run_scheme(scheme: str, N: int, db: Database, f: int, randomness: dict, storages) -> Transcript:
    if scheme == "two-server":
        return scheme_two_server(db, f, randomness["a"], storages=storages)
    if scheme == "replicated":
        return scheme_replicated(N, db, f, randomness["v"], storages=storages)
    if scheme == "mds32":
        return scheme_mds32(db, f, randomness["a"], randomness["b"], storages=storages)
    if scheme == "bep":
        return scheme_bep(N, db, f, randomness["z"], storages=storages)
    raise ValueError(f"unknown scheme {scheme!r}")


def declared_rate(scheme: str, N: int) -> Fraction:
    return {
        "two-server": Fraction(1, 2),
        "replicated": Fraction(N - 1, N),
        "mds32": Fraction(1, 3),
        "bep": Fraction(N - 1, N),
    }[scheme]


# ---------------------------------------------------------------------------
# privacy and access accounting
# ---------------------------------------------------------------------------


def _hashable(q):
    if isinstance(q, BitVec):
        return (q.n, q.bits)
    if isinstance(q, tuple):
        return tuple(_hashable(x) for x in q)
    return q


def privacy_audit(scheme: str, N: int, M: int, L: Optional[int] = None) -> Fraction:
    """Largest total-variation distance, over servers and pairs of desired files,
    between the distributions of what a server receives under uniform randomness."""
    info = scheme_info(scheme)
    size = info.space_size(N, M)
    if size > AUDIT_LIMIT:
        raise FeasibilityError(f"randomness space {size} > {AUDIT_LIMIT}")
    n_servers = info.servers(N)
    per_f = []
    for f in range(1, M + 1):
        counts = [Counter() for _ in range(n_servers)]
        for rnd in info.enumerate(N, M):
            for n, q in enumerate(info.received(N, M, f, rnd)):
                counts[n][_hashable(q)] += 1
        per_f.append(counts)
    worst = Fraction(0)
    for f1, f2 in itertools.combinations(range(M), 2):
        for n in range(n_servers):
            c1, c2 = per_f[f1][n], per_f[f2][n]
            diff = sum(abs(c1[k] - c2[k]) for k in set(c1) | set(c2))
            worst = max(worst, Fraction(diff, 2 * size))
    return worst


@dataclass(frozen=True)
class ServerAccess:
    sum_count: int
    union_count: int
    sum_bits: int
    union_bits: int
    delta_sum: Fraction
    delta_union: Fraction


@dataclass(frozen=True)
class AccessReport:
    servers: tuple[ServerAccess, ...]
    delta_sum: Fraction
    delta_union: Fraction
    max_query_access: int


def access_report(t: Transcript) -> AccessReport:
    """Per-server access in symbols, bits and units of ML bits."""
    ml = t.M * t.L
    rows = []
    for log in t.logs:
        sb = log.sum_count * log.symbol_len
        ub = log.union_count * log.symbol_len
        rows.append(
            ServerAccess(log.sum_count, log.union_count, sb, ub, Fraction(sb, ml), Fraction(ub, ml))
        )
    worst = max((len(a) for log in t.logs for a in log.accessed), default=0)
    return AccessReport(
        tuple(rows),
        sum((r.delta_sum for r in rows), Fraction(0)),
        sum((r.delta_union for r in rows), Fraction(0)),
        worst,
    )


@dataclass
class TrialSummary:
    scheme: str
    N: int
    M: int
    L: int
    runs: int = 0
    correct: int = 0
    exhaustive: bool = False
    worst_query_access: int = 0
    worst_server_sum: int = 0
    worst_server_union: int = 0
    worst_delta_sum: Fraction = Fraction(0)
    worst_delta_union: Fraction = Fraction(0)
    total_delta_sum: Fraction = Fraction(0)
    total_delta_union: Fraction = Fraction(0)
    rates: set = field(default_factory=set)
    privacy_tv: Optional[Fraction] = None

    def add(self, t: Transcript, expected: BitVec):
        rep = access_report(t)
        self.runs += 1
        self.correct += t.reconstructed == expected
        self.worst_query_access = max(self.worst_query_access, rep.max_query_access)
        self.worst_server_sum = max(self.worst_server_sum, max(s.sum_count for s in rep.servers))
        self.worst_server_union = max(self.worst_server_union, max(s.union_count for s in rep.servers))
        self.worst_delta_sum = max(self.worst_delta_sum, rep.delta_sum)
        self.worst_delta_union = max(self.worst_delta_union, rep.delta_union)
        self.total_delta_sum += rep.delta_sum
        self.total_delta_union += rep.delta_union
        self.rates.add(t.rate)

    def to_dict(self) -> dict:
        n = max(self.runs, 1)
        return {
            "scheme": self.scheme,
            "N": self.N,
            "M": self.M,
            "L": self.L,
            "runs": self.runs,
            "correct": self.correct,
            "exhaustive": self.exhaustive,
            "rate": ";".join(str(r) for r in sorted(self.rates)),
            "worst_query_access": self.worst_query_access,
            "worst_server_access_sum": self.worst_server_sum,
            "worst_server_access_union": self.worst_server_union,
            "worst_delta_sum": float(self.worst_delta_sum),
            "worst_delta_union": float(self.worst_delta_union),
            "mean_delta_sum": float(self.total_delta_sum / n),
            "mean_delta_union": float(self.total_delta_union / n),
            "privacy_tv": None if self.privacy_tv is None else float(self.privacy_tv),
        }


def run_trials(
    scheme: str,
    N: int,
    db: Database,
    code=None,
    trials: int = 100,
    seed: int = 0,
    exhaustive_limit: int = 1 << 16,
) -> TrialSummary:
    """Exhaustive over the randomness (and every f) when the space is small, else seeded draws."""
    info = scheme_info(scheme)
    storages = make_storages(scheme, N, db, code)
    n_servers = info.servers(N)
    summary = TrialSummary(scheme, n_servers, db.M, db.L)
    size = info.space_size(N, db.M)
    if size <= exhaustive_limit:
        summary.exhaustive = True
        for f in range(1, db.M + 1):
            for rnd in info.enumerate(N, db.M):
                summary.add(run_scheme(scheme, N, db, f, rnd, storages), db.file(f))
        if size <= AUDIT_LIMIT:
            summary.privacy_tv = privacy_audit(scheme, N, db.M, db.L)
    else:
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            f = int(rng.integers(1, db.M + 1))
            rnd = info.sample(N, db.M, rng)
            summary.add(run_scheme(scheme, N, db, f, rnd, storages), db.file(f))
    return summary


def mds_query_shape_access(
    N: int, K: int, M: int, code: Optional[CoveringCode], trials: int, seed: int = 0
) -> dict:
    """Access measured on the query shape of an (N, K)-MDS scheme.

    Each server receives ``K`` uniform coefficient vectors over ``r = M(N-K)``
    strings. Only the access pattern is modelled, not retrieval.
    """
    if not 1 <= K < N:
        raise ValueError("need 1 <= K < N")
    r = M * (N - K)
    if code is None:
        code = build_code(BitMatrix.identity(r))
    if code.r != r:
        raise DimensionError(f"backend has r={code.r}, scheme needs r={r}")
    rng = np.random.default_rng(seed)
    worst_sum = worst_union = 0
    total_sum = total_union = 0
    for _ in range(trials):
        for _server in range(N):
            sets = [
                frozenset(code.leader(BitVec(r, int(s))).support)
                for s in rng.integers(0, 1 << r, size=K)
            ]
            s_count = sum(len(a) for a in sets)
            u_count = len(frozenset().union(*sets))
            worst_sum, worst_union = max(worst_sum, s_count), max(worst_union, u_count)
            total_sum += s_count
            total_union += u_count
    n = max(trials * N, 1)
    return {
        "r": r,
        "length": code.length,
        "radius": code.radius,
        "worst_server_sum": worst_sum,
        "worst_server_union": worst_union,
        "mean_server_sum": total_sum / n,
        "mean_server_union": total_union / n,
    }
