"""Exit criteria, one test per criterion, each at its pinned tolerance and time budget."""

import itertools
import logging
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from pirac import kernels
from pirac.bounds import binary_entropy, curve_samples, entropy_inverse, f_of_beta
from pirac.cli import main
from pirac.covercode import (
    answer_query,
    build_code,
    encode_storage,
    extended_hamming_parity,
    hamming_parity,
    max_tau_coset_weight,
    search_codes,
    sum_augmented_identity,
    tau_work,
    TAU_GUARD,
)
from pirac.designs import eleven_combination_design, verify_restricted_design
from pirac.gf2core import BitVec, mat_vec_mul
from pirac.pirsim import (
    Database,
    privacy_audit,
    scheme_bep,
    scheme_mds32,
    scheme_replicated,
    scheme_two_server,
)

from conftest import random_full_rank, random_matrix

log = logging.getLogger(__name__)

TABLE1 = [5.000, 2.201, 1.845, 1.668, 1.556, 1.477, 1.418, 1.250, 1.111]
TABLE2 = {2: 1.100, 4: 0.834, 5: 0.311, 6: 0.739, 8: 0.685}
SLACK = 0.002


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    """JIT-compile every kernel before any timed region."""
    cols = np.array([1, 2, 3], dtype=np.int64)
    kernels.leader_table(cols, 2)
    kernels.coset_weights(cols, 2, 3)
    kernels.first_covering(np.zeros((1, 1), dtype=np.int64), 2, 1)
    kernels.max_tau(np.ones((1, 4), dtype=bool), np.zeros(1, dtype=np.int64), 2)


def read_table(path):
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]


@pytest.mark.acceptance(1, "table 1: Delta within 0.002, Omega and Delta' exact, < 1 s")
def test_criterion_1_table1(tmp_path):
    from pirac.bounds import tajeddine_table

    t0 = time.perf_counter()
    assert main(["tables", "--n", "10", "--eps", "1", "--out", str(tmp_path)]) == 0
    rows = tajeddine_table(10, 1, with_gcd=False)
    elapsed = time.perf_counter() - t0
    csv_rows = read_table(tmp_path / "table1.csv")
    assert [int(r["K"]) for r in csv_rows] == list(range(1, 10))
    for row, t, want in zip(csv_rows, rows, TABLE1):
        assert abs(float(row["Delta"]) - want) <= SLACK
        assert abs(t.delta - want) <= SLACK
        assert t.omega == Fraction(10 - t.K, 10)
        assert t.delta_prime == Fraction(10, t.K)
    assert elapsed < 1.0


@pytest.mark.acceptance(2, "table 2: gcd-improved Delta within 0.002, < 1 s")
def test_criterion_2_table2(tmp_path):
    t0 = time.perf_counter()
    assert main(["tables", "--n", "10", "--eps", "1", "--out", str(tmp_path)]) == 0
    elapsed = time.perf_counter() - t0
    rows = {int(r["K"]): float(r["Delta"]) for r in read_table(tmp_path / "table2.csv")}
    assert sorted(rows) == sorted(TABLE2)
    for k, want in TABLE2.items():
        assert abs(rows[k] - want) <= SLACK
    assert elapsed < 1.0


@pytest.mark.acceptance(3, "tau-coset weights: Hamming = tau, extended = tau+1, <= n-k on 50 codes, < 2 min")
def test_criterion_3_coset_weight_theorems():
    t0 = time.perf_counter()
    checked = 0
    for m in (2, 3, 4):
        H = hamming_parity(m)
        for tau in range(1, m + 1):
            if tau_work(H, tau) > TAU_GUARD:
                break
            assert max_tau_coset_weight(H, tau) == tau
            checked += 1
    assert checked == 2 + 3 + 4
    for tau in (1, 2, 3):
        assert max_tau_coset_weight(extended_hamming_parity(3), tau) == tau + 1
    rng = random.Random(3)
    for _ in range(50):
        r = rng.randint(1, 4)
        H = random_full_rank(rng, r, rng.randint(r, 10))
        for tau in range(1, min(3, 1 << r) + 1):
            assert max_tau_coset_weight(H, tau) <= H.nrows
    assert time.perf_counter() - t0 < 120


@pytest.mark.acceptance(4, "storage engine: Hamming reads <= 1 and exact; sum-augmented worst = 2, < 1 s")
def test_criterion_4_storage_engine():
    t0 = time.perf_counter()
    rng = random.Random(4)
    x = random_matrix(rng, 8, 3)
    storage = encode_storage(x, build_code(hamming_parity(3)))
    for v in range(8):
        s = BitVec(3, v)
        value, accessed = answer_query(storage, s)
        assert len(accessed) <= 1
        assert value == mat_vec_mul(x, s)
    x4 = random_matrix(rng, 8, 4)
    storage4 = encode_storage(x4, build_code(sum_augmented_identity(4)))
    worst = 0
    for v in range(16):
        s = BitVec(4, v)
        value, accessed = answer_query(storage4, s)
        assert value == mat_vec_mul(x4, s)
        worst = max(worst, len(accessed))
    assert worst == 2
    assert time.perf_counter() - t0 < 1.0


def _bits(n):
    return [BitVec(n, v) for v in range(1 << n)]


@pytest.mark.acceptance(5, "exhaustive reconstruction for all four schemes on 5 databases, < 10 s")
def test_criterion_5_scheme_correctness():
    t0 = time.perf_counter()
    runs = ok = 0
    for seed in range(5):
        db3 = Database.random(3, 4, seed=seed)
        db2 = Database.random(2, 4, seed=100 + seed)
        for f in (1, 2, 3):
            for a in _bits(3):
                ok += scheme_two_server(db3, f, a).reconstructed == db3.file(f)
                runs += 1
            for a, b in itertools.product(_bits(3), repeat=2):
                ok += scheme_mds32(db3, f, a, b).reconstructed == db3.file(f)
                runs += 1
        for f in (1, 2):
            for v in _bits(4):
                ok += scheme_replicated(3, db2, f, v).reconstructed == db2.file(f)
                runs += 1
            for z in itertools.product(range(3), repeat=2):
                ok += scheme_bep(3, db2, f, z).reconstructed == db2.file(f)
                runs += 1
    assert runs == 5 * (24 + 192 + 32 + 18)
    assert ok == runs
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.acceptance(6, "privacy audit exactly 0 for all four schemes")
def test_criterion_6_privacy():
    assert privacy_audit("two-server", 2, 3) == 0
    assert privacy_audit("replicated", 3, 2) == 0
    assert privacy_audit("mds32", 3, 3) == 0
    assert privacy_audit("bep", 3, 2) == 0


@pytest.mark.acceptance(7, "11-combination design: worst 2 over 27 queries; dropping a combination breaks it, < 1 s")
def test_criterion_7_example3():
    t0 = time.perf_counter()
    d = eleven_combination_design()
    assert len(d.stored) == 11
    assert verify_restricted_design(d) == (True, 2)
    broken = [c for c in d.stored if len(c) > 1 and not verify_restricted_design(d.without(c))[0]]
    assert len(broken) >= 1
    assert frozenset({(1, 1), (2, 2)}) in broken
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.acceptance(8, "entropy inverse round trip 1e-9 on 1000 points; f(1) = 0.5; curve decreasing on [1, 10]")
def test_criterion_8_numerics():
    for c in np.linspace(0.0, 1.0, 1000):
        assert abs(binary_entropy(entropy_inverse(float(c))) - c) <= 1e-9
    assert abs(f_of_beta(1.0) - 0.5) <= 1e-9
    alphas = [a for _, a in curve_samples(1.0, 10.0, 1000)]
    assert all(a > b for a, b in zip(alphas, alphas[1:]))


@pytest.mark.acceptance(9, "best effort: random search for a length-13, r=6, radius-2 code (reported only)")
def test_criterion_9_search_best_effort(tmp_path, capsys):
    out = tmp_path / "code13.txt"
    t0 = time.perf_counter()
    assert main(["search", "--length", "13", "--r", "6", "--radius", "2", "--budget", "1000000",
                 "--out", str(out)]) == 0
    res = search_codes(13, 6, 2, 10**6, seed=0)
    elapsed = time.perf_counter() - t0
    with capsys.disabled():
        if res.code is not None:
            print(f"\n  length-13 radius-2 code found after {res.attempts} attempts ({elapsed:.2f} s)")
        else:
            print(f"\n  no length-13 radius-2 code in {res.attempts} attempts ({elapsed:.2f} s)")
    if res.code is not None:
        assert res.code.radius <= 2 and res.code.length == 13
