import math

import numpy as np
import pytest
from scipy.integrate import quad

from core.errors import GridError, ResolutionError
from effpot.landau import SquareGrid, gamma_landau, landau_projection_apply, v_upper_from_landau
from effpot.potentials import v_upper

B_2D = 4.0


@pytest.fixture(scope="module")
def square():
    return SquareGrid(10.0 / math.sqrt(B_2D), 161)


def test_gamma_is_normalized():
    B = 3.0
    value, _ = quad(lambda r: 2.0 * math.pi * r * gamma_landau(B, r) ** 2, 0.0, math.inf)
    assert value == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("B,x", [(1e6, 0.0), (1e6, 1e-3), (1e6, 0.1), (2.0, 0.5), (1e20, 1e-9)])
def test_gaussian_average_matches_closed_form(B, x):
    assert v_upper_from_landau(B, x) == pytest.approx(v_upper(B, x), rel=1e-8)


def test_projection_is_idempotent(square):
    x1, x2 = square.mesh()
    rng = np.random.default_rng(11)
    f = np.zeros((square.n, square.n))
    for _ in range(3):
        c1, c2 = rng.uniform(-1.0, 1.0, size=2) / math.sqrt(2.0 * B_2D)
        f += rng.uniform(0.5, 1.0) * np.exp(-0.5 * B_2D * ((x1 - c1) ** 2 + (x2 - c2) ** 2))
    once = landau_projection_apply(B_2D, f, square)
    twice = landau_projection_apply(B_2D, once, square)
    assert np.linalg.norm(twice - once) / np.linalg.norm(once) <= 1e-8


def test_centered_ground_state_is_fixed(square):
    x1, x2 = square.mesh()
    g = np.exp(-0.25 * B_2D * (x1 ** 2 + x2 ** 2))
    projected = landau_projection_apply(B_2D, g, square)
    assert np.linalg.norm(projected - g) / np.linalg.norm(g) <= 1e-6


def test_projection_rejects_coarse_or_mismatched_input(square):
    coarse = SquareGrid(square.half_width, 81)
    with pytest.raises(ResolutionError):
        landau_projection_apply(B_2D, np.zeros((81, 81)), coarse)
    with pytest.raises(GridError):
        landau_projection_apply(B_2D, np.zeros((5, 5)), square)
    with pytest.raises(GridError):
        SquareGrid(1.0, 2)
