import math

import numpy as np
import pytest

THETA = 3 * math.pi / 7
GAMMA = math.cos(THETA) / 2


def power_series_j(n: int, x: float, terms: int = 80) -> float:
    """Truncated ascending series for J_n at real x, summed in extended precision."""
    import mpmath

    with mpmath.workdps(40):
        half = mpmath.mpf(x) / 2
        total = mpmath.mpf(0)
        for j in range(terms):
            total += (-1) ** j * half ** (2 * j + n) / (mpmath.factorial(j) * mpmath.factorial(j + n))
        return float(total)


def outer_front(positions, rho):
    """Position right of the main positive-side peak where density falls to half of it."""
    mask = positions > 0
    x, r = positions[mask], rho[mask]
    peak = int(np.argmax(r))
    below = np.flatnonzero(r[peak:] < 0.5 * r[peak])
    return float(x[peak + below[0]])


def local_maxima(rho, floor=1e-12):
    r = rho[rho > floor * rho.max()]
    return int(np.sum((r[1:-1] > r[:-2]) & (r[1:-1] > r[2:])))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# one line per acceptance criterion, echoed after the run so they survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda text: text[5:]):
            terminalreporter.write_line(line)
