import numpy as np
import pytest

from precspec import ProblemConfig, build_structured_mesh


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit2():
    return build_structured_mesh((0, 1, 0, 1), 2, 2)


def random_smooth_pair(rng):
    """Random positive trigonometric/exponential coefficients k and g."""
    a, b, c, d = rng.uniform(0.2, 1.5, 4)
    e, f = rng.uniform(0.1, 0.8, 2)
    k = f"(2+{e:.3f}*sin({a:.3f}*x+{b:.3f}*y))*exp({f:.3f}*x*y)"
    g = f"1+{rng.uniform(0.1, 3):.3f}*exp(-{c:.3f}*(x^2+{d:.3f}*y^2))"
    return k, g


def random_config(rng, **kw):
    k, g = random_smooth_pair(rng)
    base = dict(rect=(-1, 1, -1, 1), nx=int(rng.integers(4, 17)), ny=int(rng.integers(4, 17)),
                k=k, g=g, bc=str(rng.choice(["dirichlet", "neumann"])),
                quadrature=str(rng.choice(["centroid", "midpoint3"])))
    base.update(kw)
    return ProblemConfig(**base)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def _report(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
