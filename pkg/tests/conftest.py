import numpy as np
import pytest

from thincloak.geometry import TubeGeometry, build_tube_surface, sphere_surface
from thincloak.numerics import DirectionGrid


@pytest.fixture(scope="session")
def sphere():
    """Unit sphere, 1944 nodes."""
    return sphere_surface(m=2, order=9)


@pytest.fixture(scope="session")
def small_sphere():
    """Unit sphere, 384 nodes."""
    return sphere_surface(m=1, order=8)


@pytest.fixture(scope="session")
def tube02():
    return build_tube_surface(TubeGeometry(delta=0.2))


@pytest.fixture(scope="session")
def grid():
    return DirectionGrid.product(12, 24)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# ------------------------------------------------- acceptance bookkeeping

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one part of an acceptance criterion: (criterion, part, ok, detail)."""
    table = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(criterion, part, ok, detail):
        table.setdefault(criterion, []).append((part, bool(ok), detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(_ACCEPTANCE, None)
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(table):
        parts = table[criterion]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"{criterion} {status}")
        for part, ok, detail in parts:
            terminalreporter.write_line(f"    [{'pass' if ok else 'FAIL'}] {part}: {detail}")
