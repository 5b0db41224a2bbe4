import random

import pytest

from pirac.gf2core import BitMatrix, BitVec


def naive_mat_vec(H: BitMatrix, y: BitVec) -> BitVec:
    out = []
    for i in range(H.nrows):
        acc = 0
        for j in range(H.ncols):
            acc ^= H[i, j] & y[j]
        out.append(acc)
    return BitVec.from_bits(out) if out else BitVec(0)


def random_matrix(rng: random.Random, rows: int, cols: int) -> BitMatrix:
    return BitMatrix.from_rows([BitVec(cols, rng.getrandbits(cols)) for _ in range(rows)], cols)


def random_full_rank(rng: random.Random, rows: int, cols: int) -> BitMatrix:
    from pirac.gf2core import rank

    while True:
        H = random_matrix(rng, rows, cols)
        if rank(H) == rows:
            return H


@pytest.fixture
def rng():
    return random.Random(20240601)


# --- acceptance reporting ----------------------------------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[number] = (title, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome = _ACCEPTANCE[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {number}. {title}")
