import time

import pytest

from charmod.io import load_corpus

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict = {}
SUITE_LIMIT = 300.0
_START = {}


def pytest_sessionstart(session):
    _START["t"] = time.perf_counter()


@pytest.fixture(scope="session")
def corpus():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_corpus(name)
        return cache[name]

    return get


def cell_where(K, dim, pred=lambda c: True):
    """Ids of cells of the given dimension whose vertices all satisfy ``pred``."""
    return [c.id for c in K.ordered if c.dim == dim and all(pred(v) for v in c.vertices)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - _START.get("t", time.perf_counter())
    if 10 in ACCEPTANCE:
        # the whole-suite time limit can only be judged once everything has run
        ok, detail = ACCEPTANCE[10]
        ok = ok and elapsed < SUITE_LIMIT
        ACCEPTANCE[10] = (ok, f"{detail}; full suite {elapsed:.1f}s (limit {SUITE_LIMIT:.0f}s)")
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
