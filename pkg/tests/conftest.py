import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gfsc import _backend

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture(params=_backend.AVAILABLE)
def backend(request):
    return request.param


@pytest.fixture
def k4_graph():
    from gfsc import SparseGraph

    u, v = np.triu_indices(4, 1)
    return SparseGraph.from_edges(4, u, v)


@pytest.fixture
def two_cliques():
    """Two disjoint K_m cliques as a function of m."""
    from gfsc import SparseGraph

    def make(m):
        u, v = np.triu_indices(m, 1)
        return SparseGraph.from_edges(2 * m, np.concatenate([u, u + m]),
                                      np.concatenate([v, v + m]))
    return make


@pytest.fixture
def acceptance():
    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
