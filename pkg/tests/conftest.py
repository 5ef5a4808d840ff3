import functools

import pytest

from sandwichkit.category import build_category
from sandwichkit.frame import RegularFrame, is_sandwich_regular
from sandwichkit.green import green_category
from sandwichkit.sandwich import SandwichSemigroup

# the suite exercised by the exhaustive checks: every (i, j) and every a in S_ji
CATALOG = [("partialmap", (2, 2)), ("fullmap", (2, 3)), ("injpartial", (2, 2)), ("matf2", (2, 2))]


@functools.lru_cache(maxsize=None)
def category(kind, sizes):
    c = build_category(kind, list(sizes))
    return c, green_category(c)


def sandwiches(kind, sizes):
    c, amb = category(kind, tuple(sizes))
    for i in range(c.n_objects):
        for j in range(c.n_objects):
            for a in c.hom_range(j, i):
                yield SandwichSemigroup(c, i, j, a, ambient=amb)


@functools.lru_cache(maxsize=None)
def catalog_sandwiches():
    return [sw for kind, sizes in CATALOG for sw in sandwiches(kind, sizes)]


@functools.lru_cache(maxsize=None)
def catalog_frames():
    return [RegularFrame(sw) for sw in catalog_sandwiches() if is_sandwich_regular(sw)]


def instance_id(sw):
    c = sw.category
    return f"{c.kind}{list(c.sizes)}-S{sw.i}{sw.j}-a{''.join(map(str, sw.a.payload))}"


@pytest.fixture(scope="session")
def pt22():
    return category("partialmap", (2, 2))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
