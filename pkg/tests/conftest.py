import numpy as np
import pytest

from locscape.grid import GridShape, ScalarField


def random_field(shape, seed, lo=-1.0, hi=1.0):
    rng = np.random.default_rng(seed)
    return ScalarField(shape, rng.uniform(lo, hi, (shape.n, shape.n)))


def fourier_mode(shape, k, l):
    """cos(xi_k x + eta_l y), a real eigenfunction of every symbol here."""
    x = np.arange(shape.n)
    phase = 2 * np.pi * (k * x[:, None] + l * x[None, :]) / shape.n
    return ScalarField(shape, np.cos(phase))


@pytest.fixture(params=["domain", "lattice"])
def convention(request):
    return request.param


@pytest.fixture
def shape16(convention):
    return GridShape(16, convention)


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def verdict():
    """Record one acceptance line; it is echoed now and again in the terminal summary."""

    def record(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line, flush=True)
        return ok

    return record


def pytest_collection_modifyitems(items):
    for item in items:
        if getattr(getattr(item, "obj", None), "is_hypothesis_test", False):
            item.add_marker(pytest.mark.invariant)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: s.split(":")[0]):
            terminalreporter.write_line(line)
