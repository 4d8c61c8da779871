import numpy as np
import pytest

from pwcycles.fields import AffineField
from pwcycles.system import PiecewiseSystem

CLASS_PIECES = {
    "ConstantCenter": ("constant", "center"),
    "ConstantSaddle": ("constant", "saddle"),
    "SaddleCenter": ("saddle", "center"),
    "CenterSaddle": ("center", "saddle"),
    "SaddleSaddle": ("saddle", "saddle"),
}


def random_piece(rng, kind, lo=-5.0, hi=5.0):
    """Uniform coefficients in [lo, hi], rejected until the piece has the wanted type."""
    while True:
        e0, e1, e2, f0, f1 = rng.uniform(lo, hi, 5)
        if kind == "constant":
            if e0 or f0:
                return AffineField(e0, 0.0, 0.0, f0, 0.0, 0.0)
            continue
        det = -e1 * e1 - e2 * f1
        if (kind == "center" and det > 0) or (kind == "saddle" and det < 0):
            return AffineField.divergence_free(e0, e1, e2, f0, f1)


def random_system(rng, class_name, conic=None):
    inner, outer = CLASS_PIECES[class_name]
    kw = {} if conic is None else {"conic": conic}
    return PiecewiseSystem(random_piece(rng, inner), random_piece(rng, outer), **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- acceptance summary ----------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
