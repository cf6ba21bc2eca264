import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.errors import DegenerateFunctionError, GridError
from core.functional import (
    DeltaAtom,
    FunctionalSpec,
    delta_well_spec,
    energy,
    pekar_spec,
    scaled_pekar_spec,
    toeplitz_apply,
)
from core.grid import (
    GridFn,
    dirichlet_energy,
    dirichlet_norm,
    inner,
    l2_norm,
    make_grid,
    max_norm,
    midpoint_derivative,
    normalize,
)
from core.params import ModelParams


@pytest.fixture(scope="module")
def grid():
    return make_grid(10.0, 2001)


def test_grid_has_exact_origin_and_symmetry(grid):
    x = grid.nodes
    assert x[grid.origin_index] == 0.0
    assert np.array_equal(x, -x[::-1])
    assert grid.spacing == pytest.approx(0.01)


def test_grid_rejects_even_or_tiny(grid):
    with pytest.raises(GridError):
        make_grid(1.0, 10)
    with pytest.raises(GridError):
        make_grid(-1.0, 11)
    with pytest.raises(GridError):
        make_grid(1.0, 1)


def test_nodes_are_read_only(grid):
    with pytest.raises(ValueError):
        grid.nodes[0] = 1.0


def test_trapezoid_weights_sum_to_length(grid):
    assert grid.weights.sum() == pytest.approx(20.0, rel=1e-14)


def test_snap_reports_distance(grid):
    index, distance = grid.snap(0.0123)
    assert index == grid.origin_index + 1
    assert distance == pytest.approx(0.0023)
    with pytest.raises(GridError):
        grid.index_of(0.0123)
    with pytest.raises(GridError):
        grid.snap(11.0)


def test_refine_and_coarsen_keep_origin():
    g = make_grid(5.0, 101)
    fine = g.refine()
    assert fine.n == 201
    assert fine.coarsen() == g
    with pytest.raises(GridError):
        make_grid(5.0, 103).coarsen()


def test_gridfn_rejects_non_finite(grid):
    values = np.zeros(grid.n)
    values[3] = np.nan
    with pytest.raises(ValueError):
        GridFn(grid, values)


def test_gridfn_arithmetic_requires_same_grid(grid):
    f = GridFn.zeros(grid)
    other = GridFn.zeros(make_grid(10.0, 2003))
    with pytest.raises(GridError):
        f + other


def test_normalize_gaussian(grid):
    f = normalize(GridFn.from_function(grid, lambda x: np.exp(-x * x)))
    assert l2_norm(f) == pytest.approx(1.0, abs=1e-14)
    assert inner(f, f) == pytest.approx(1.0, abs=1e-14)
    assert max_norm(f) == pytest.approx(f.at_origin())


def test_normalize_zero_function_fails(grid):
    with pytest.raises(DegenerateFunctionError):
        normalize(GridFn.zeros(grid))


def test_dirichlet_energy_of_gaussian(grid):
    # ∫|(e^{−x²/2})′|² = √π/2
    f = GridFn.from_function(grid, lambda x: np.exp(-0.5 * x * x))
    assert dirichlet_energy(f) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-4)
    assert dirichlet_norm(f) ** 2 == pytest.approx(dirichlet_energy(f))


def test_alternating_mode_has_kinetic_energy():
    grid = make_grid(1.0, 11)
    f = GridFn(grid, (-1.0) ** np.arange(grid.n))
    assert np.all(np.abs(midpoint_derivative(f)) == pytest.approx(2.0 / grid.spacing))
    assert dirichlet_energy(f) == pytest.approx(4.0 * (grid.n - 1) / grid.spacing)


def test_energy_split_sums_in_order(grid):
    p = ModelParams(alpha=1.0, beta=1.0)
    f = normalize(GridFn.from_function(grid, lambda x: np.exp(-np.abs(x))))
    split = energy(f, pekar_spec(p, grid))
    assert split.total == split.kinetic + split.quartic + split.delta + split.external + split.convolution
    assert split.delta == pytest.approx(-f.at_origin() ** 2)
    assert split.to_dict()["total"] == split.total


def test_delta_well_exact_state_energy_close_to_closed_form():
    beta = 1.0
    g = make_grid(80.0, 16385)
    f = normalize(GridFn.from_function(g, lambda x: np.sqrt(beta / 2) * np.exp(-beta * np.abs(x) / 2)))
    assert energy(f, delta_well_spec(beta, g)).total == pytest.approx(-0.25, rel=1e-4)


def test_scaled_spec_scales_energy_by_mu_squared():
    p = ModelParams(alpha=1.0, beta=1.0)
    mu = 3.0
    g = make_grid(20.0, 4001)
    f = normalize(GridFn.from_function(g, lambda x: np.exp(-np.abs(x))))
    dilated = normalize(GridFn.from_function(g, lambda x: np.exp(-mu * np.abs(x))))
    e_base = energy(f, pekar_spec(p, g)).total
    e_scaled = energy(dilated, scaled_pekar_spec(p, g, mu)).total
    assert e_scaled == pytest.approx(mu * mu * e_base, rel=1e-3)


def test_off_grid_atom_is_rejected(grid):
    with pytest.raises(GridError):
        FunctionalSpec(grid=grid, delta_atoms=(DeltaAtom(0.005, 1.0),))


def test_kernel_row_shape_checked(grid):
    with pytest.raises(GridError):
        FunctionalSpec(grid=grid, kernel_row=np.ones(5))


@pytest.mark.parametrize("n", [7, 64, 301])
def test_toeplitz_fft_matches_direct(n):
    rng = np.random.default_rng(n)
    row = np.exp(-np.arange(n) / 10.0)
    u = rng.normal(size=n)
    direct = toeplitz_apply(row, u, method="direct")
    fft = toeplitz_apply(row, u, method="fft")
    assert np.allclose(direct, fft, rtol=1e-12, atol=1e-12)


def test_toeplitz_unknown_method():
    with pytest.raises(ValueError):
        toeplitz_apply(np.ones(3), np.ones(3), method="magic")


def test_model_params_bounds():
    with pytest.raises(ValidationError):
        ModelParams(alpha=-1.0)
    with pytest.raises(ValidationError):
        ModelParams(beta=0.0)
    with pytest.raises(ValidationError):
        ModelParams(field=1.0)
    with pytest.raises(ValidationError):
        ModelParams(gamma=1.0)
    p = ModelParams(alpha=1.0, beta=1.0)
    assert p.decay_rate == 0.75
    assert p.default_half_width() == pytest.approx(40.0 / 0.75)


def test_kinetic_energy_is_quadratically_homogeneous(grid):
    spec = FunctionalSpec(grid=grid)
    f = GridFn.from_function(grid, lambda x: np.exp(-x * x))
    assert energy(3.0 * f, spec).total == pytest.approx(9.0 * energy(f, spec).total, rel=1e-14)
