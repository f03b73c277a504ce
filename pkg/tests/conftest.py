"""Shared fixtures.

Every TrapezoidalMap created during a test is remembered, and on teardown
each one is checked for L <= D. This makes the bound hold for every DAG the
suite builds, not just the ones a test looks at.
"""
import os

import pytest
from hypothesis import HealthCheck, settings

import oracles
from traprix.pathlen import max_search_path_length
from traprix.trapmap import TrapezoidalMap

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_original_init = TrapezoidalMap.__init__
PENDING_LIMIT = 8
CHECKED = {"maps": 0}


def _check(dag):
    L, _ = max_search_path_length(dag)
    assert L <= dag.D, f"L={L} exceeds D={dag.D} on a map with {len(dag.segments)} segments"
    CHECKED["maps"] += 1


def _recording_init(self, *args, **kwargs):
    _original_init(self, *args, **kwargs)
    pending = oracles.BUILT_MAPS
    if len(pending) >= PENDING_LIMIT:
        # bound memory in tests that build many large maps
        _check(pending.pop(0))
    pending.append(self)


TrapezoidalMap.__init__ = _recording_init



@pytest.fixture(autouse=True)
def check_path_bound_on_every_map():
    oracles.BUILT_MAPS.clear()
    yield
    maps = list(oracles.BUILT_MAPS)
    oracles.BUILT_MAPS.clear()
    for dag in maps:
        _check(dag)


def pytest_terminal_summary(terminalreporter):
    results = oracles.ACCEPTANCE_RESULTS
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(results):
        ok, detail = results[cid]
        terminalreporter.write_line(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    terminalreporter.write_line(f"L <= D checked on {CHECKED['maps']} maps built by the suite")
