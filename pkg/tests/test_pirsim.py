import itertools
import json
from dataclasses import replace
from fractions import Fraction

import pytest

from pirac import pirsim
from pirac.covercode import (
    FeasibilityError,
    build_code,
    direct_sum,
    hamming_parity,
    sum_augmented_identity,
)
from pirac.designs import design_code, eleven_combination_design
from pirac.gf2core import BitMatrix, BitVec, DimensionError
from pirac.pirsim import (
    Database,
    access_report,
    mds_query_shape_access,
    privacy_audit,
    replicated_queries,
    run_trials,
    scheme_bep,
    scheme_mds32,
    scheme_replicated,
    scheme_two_server,
    two_server_queries,
)


def all_bits(n):
    return [BitVec(n, v) for v in range(1 << n)]


# --- database ---------------------------------------------------------------


def test_database_from_bytes_bit_order():
    db = Database.from_bytes(bytes([0b00000001, 0b10000000]), M=2, L=8)
    assert db.files[0].support == [0]
    assert db.files[1].support == [7]
    with pytest.raises(DimensionError):
        Database.from_bytes(b"\x00", M=2, L=8)


def test_database_random_is_seeded():
    assert Database.random(3, 10, seed=4) == Database.random(3, 10, seed=4)
    assert Database.random(3, 10, seed=4) != Database.random(3, 10, seed=5)


def test_split_rejects_indivisible():
    with pytest.raises(DimensionError):
        Database.random(2, 5).split(2)


# --- two servers -------------------------------------------------------------


def test_two_server_zero_query():
    db = Database.random(3, 6, seed=1)
    t = scheme_two_server(db, 2, BitVec(3))
    assert t.responses[0][0] == BitVec(6)
    assert t.reconstructed == db.file(2)


def test_two_server_identity_access_is_weight():
    db = Database.random(4, 4, seed=2)
    for a in all_bits(4):
        t = scheme_two_server(db, 1, a)
        assert t.logs[0].sum_count == a.weight


def test_two_server_augmented_halves_access():
    db = Database.random(4, 4, seed=3)
    worst = 0
    for a in all_bits(4):
        for f in range(1, 5):
            t = scheme_two_server(db, f, a, augmented=True)
            assert t.reconstructed == db.file(f)
            worst = max(worst, *(log.sum_count for log in t.logs))
    assert worst == 2 == db.M // 2


def test_two_server_rate():
    t = scheme_two_server(Database.random(3, 8), 1, BitVec(3, 5))
    assert t.rate == Fraction(1, 2) == pirsim.declared_rate("two-server", 2)


# --- replicated --------------------------------------------------------------


def test_replicated_n2_matches_two_server_pattern():
    for f in (1, 2, 3):
        for v in all_bits(3):
            rep = replicated_queries(2, 3, f, v)
            two = two_server_queries(3, f, v)
            assert sorted((q.bits for q in rep)) == sorted((q.bits for q in two))


def test_replicated_exhaustive_n3_m2():
    for seed in range(3):
        db = Database.random(2, 6, seed=seed)
        for f in (1, 2):
            for v in all_bits(4):
                t = scheme_replicated(3, db, f, v)
                assert t.reconstructed == db.file(f)
                assert t.rate == Fraction(2, 3)


def test_replicated_with_sum_augmented_backend():
    db = Database.random(2, 6, seed=9)
    code = build_code(sum_augmented_identity(4))
    assert code.radius == 2
    for f in (1, 2):
        for v in all_bits(4):
            t = scheme_replicated(3, db, f, v, code=code)
            assert t.reconstructed == db.file(f)
            assert access_report(t).max_query_access <= 2


def test_replicated_divisibility():
    with pytest.raises(DimensionError):
        scheme_replicated(3, Database.random(2, 5), 1, BitVec(4))


# --- (3,2) MDS -------------------------------------------------------------------


def test_mds32_zero_randomness():
    db = Database.random(3, 4, seed=0)
    t = scheme_mds32(db, 2, BitVec(3), BitVec(3))
    assert t.responses[0][0] == db.file(2).slice(0, 2)


def test_mds32_exhaustive():
    runs = 0
    for seed in range(3):
        db = Database.random(3, 2, seed=seed)
        for f in (1, 2, 3):
            for a, b in itertools.product(all_bits(3), repeat=2):
                t = scheme_mds32(db, f, a, b)
                assert t.reconstructed == db.file(f)
                assert t.rate == Fraction(1, 3)
                runs += 1
    assert runs == 576


def test_mds32_covering_backend_access_bound():
    block = build_code(sum_augmented_identity(3))
    code = direct_sum(block, block)
    assert (code.r, code.radius) == (6, 4)
    db = Database.random(6, 4, seed=1)
    draws = itertools.islice(itertools.product(all_bits(6), repeat=2), 0, None, 37)
    for a, b in draws:
        t = scheme_mds32(db, 4, a, b, code=code)
        assert t.reconstructed == db.file(4)
        assert access_report(t).max_query_access <= 4


def test_mds32_union_vs_sum_identity_backend():
    db = Database.random(4, 4, seed=5)
    a, b = BitVec.from_str("1101"), BitVec.from_str("0111")
    t = scheme_mds32(db, 1, a, b)
    rep = access_report(t)
    for log, srv in zip(t.logs, rep.servers):
        sets = log.accessed
        assert srv.union_count == len(sets[0] | sets[1]) <= srv.sum_count
    # server III reads supp(a) and supp(b), which overlap
    assert rep.servers[2].union_count < rep.servers[2].sum_count
    assert rep.delta_union < rep.delta_sum


# --- B-E-P ---------------------------------------------------------------------


def test_bep_all_zero_shift():
    db = Database.random(1, 4, seed=2)
    t = scheme_bep(3, db, 1, [0])
    assert t.received == ((1,), (2,), (0,))
    assert t.responses[2][0] == BitVec(2)
    halves = db.split(2)[0]
    assert t.responses[0][0] == halves[0] and t.responses[1][0] == halves[1]
    assert t.reconstructed == db.file(1)


def test_bep_exhaustive_n3_m2():
    runs = 0
    for seed in range(5):
        db = Database.random(2, 4, seed=seed)
        for f in (1, 2):
            for z in itertools.product(range(3), repeat=2):
                t = scheme_bep(3, db, f, z)
                assert t.reconstructed == db.file(f)
                assert t.rate == Fraction(2, 3)
                runs += 1
    assert runs == 90


def test_bep_queries_respect_pattern():
    for z in itertools.product(range(4), repeat=3):
        for b in pirsim.bep_received(4, 3, 2, z):
            q = pirsim.bep_coefficients(4, b)
            for m in range(3):
                assert q.slice(3 * m, 3 * m + 3).weight <= 1


def test_bep_example3_backend_two_reads():
    code = design_code(eleven_combination_design())
    db = Database.random(3, 6, seed=8)
    for f in (1, 2, 3):
        for z in itertools.product(range(3), repeat=3):
            t = scheme_bep(3, db, f, z, code=code)
            assert t.reconstructed == db.file(f)
            assert access_report(t).max_query_access <= 2


def test_bep_larger_n():
    db = Database.random(3, 12, seed=4)
    for z in itertools.product(range(5), repeat=3):
        t = scheme_bep(5, db, 3, z)
        assert t.reconstructed == db.file(3)
        assert t.rate == Fraction(4, 5)


# --- privacy ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "scheme, N, M",
    [("replicated", 3, 2), ("bep", 3, 2), ("two-server", 2, 3), ("mds32", 3, 3), ("bep", 4, 3)],
)
def test_privacy_exact_zero(scheme, N, M):
    assert privacy_audit(scheme, N, M) == 0


def test_privacy_audit_detects_leak(monkeypatch):
    leaky = replace(
        pirsim.SCHEME_INFO["two-server"],
        received=lambda N, M, f, rnd: [BitVec.unit(M, f - 1), rnd["a"]],
    )
    monkeypatch.setitem(pirsim.SCHEME_INFO, "two-server", leaky)
    assert privacy_audit("two-server", 2, 3) == 1


def test_privacy_audit_guard():
    with pytest.raises(FeasibilityError):
        privacy_audit("replicated", 3, 11)


# --- accounting ------------------------------------------------------------------


def test_single_query_union_equals_sum():
    db = Database.random(2, 4, seed=3)
    t = scheme_replicated(3, db, 1, BitVec.from_str("1011"))
    rep = access_report(t)
    assert rep.delta_union == rep.delta_sum


def test_delta_bookkeeping_identity():
    db = Database.random(3, 4, seed=7)
    t = scheme_mds32(db, 3, BitVec.from_str("110"), BitVec.from_str("011"))
    rep = access_report(t)
    total = sum(len(a) * log.symbol_len for log in t.logs for a in log.accessed)
    assert rep.delta_sum == Fraction(total, db.M * db.L)


def test_transcript_json():
    db = Database.random(2, 4, seed=3)
    t = scheme_bep(3, db, 2, (1, 2))
    data = json.loads(t.to_json())
    assert data["scheme"] == "bep" and data["f"] == 2
    assert len(data["servers"]) == 3
    assert data["reconstructed"] == db.file(2).hex()
    assert data["delta_union"] <= data["delta_sum"]


def test_run_trials_sampled_and_deterministic():
    db = Database.random(10, 4, seed=1)
    a = run_trials("replicated", 3, db, trials=25, seed=3)
    b = run_trials("replicated", 3, db, trials=25, seed=3)
    assert not a.exhaustive and a.runs == a.correct == 25
    assert a.to_dict() == b.to_dict()


def test_mds_query_shape():
    code = build_code(hamming_parity(3))
    out = mds_query_shape_access(N=4, K=1, M=1, code=code, trials=20, seed=0)
    assert out["worst_server_sum"] <= code.radius
    out = mds_query_shape_access(N=5, K=2, M=1, code=code, trials=50, seed=0)
    assert out["worst_server_union"] <= out["worst_server_sum"] <= 2 * code.radius
    with pytest.raises(DimensionError):
        mds_query_shape_access(N=5, K=3, M=1, code=code, trials=1)
