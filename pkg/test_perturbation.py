import math

import numpy as np
import pytest

from asymptotics import GridPolicy, trial_state
from closedform import pekar_energy_closed, phi0
from core.errors import CoercivityError
from core.functional import DeltaAtom, pekar_spec
from core.grid import GridFn, make_grid
from core.params import ModelParams
from effpot.potentials import mu_field
from perturbation import (
    PerturbPotential,
    atom_potential,
    classical_minimizer,
    coercivity_bound,
    concavity_defects,
    constant_potential,
    density_l1_distance,
    density_pairing,
    derivative_check,
    e_eps,
    e_eps_with_state,
    gaussian_potential,
    grid_pairing,
    pairing_target,
    perturbed_spec,
)
from solver.diagnostics import decay_grid
from solver.gradient_flow import minimize

UNIT = ModelParams(alpha=1.0, beta=1.0)


@pytest.fixture(scope="module")
def small_grid():
    return decay_grid(UNIT.decay_rate, 2049)


def test_potential_validation_and_norms():
    with pytest.raises(ValueError):
        PerturbPotential(atoms=((math.nan, 1.0),))
    W = PerturbPotential(atoms=((0.0, 1.0), (1.0, -2.0)))
    assert W.total_variation == 3.0
    assert isinstance(W.atoms[0], DeltaAtom)
    assert PerturbPotential().is_zero
    assert gaussian_potential(amplitude=-3.0).sup_norm(make_grid(5.0, 11)) == 3.0


def test_sample_gridfn_part_with_scale():
    grid = make_grid(4.0, 81)
    source = GridFn.from_function(grid, lambda x: np.exp(-x * x))
    W = PerturbPotential(bounded_part=source)
    assert np.array_equal(W.sample(grid), source.values)
    scaled = W.sample(grid, scale=2.0)
    assert scaled[grid.origin_index] == pytest.approx(1.0)
    assert scaled[-1] == 0.0
    assert W.sup_norm(grid) == pytest.approx(1.0)


def test_zero_eps_and_zero_potential_give_base_functional(small_grid):
    base = pekar_spec(UNIT, small_grid)
    for spec in (perturbed_spec(0.0, gaussian_potential(), UNIT, small_grid),
                 perturbed_spec(0.3, PerturbPotential(), UNIT, small_grid)):
        assert spec.delta_atoms == base.delta_atoms
        assert spec.potential is None


def test_perturbed_spec_layout(small_grid):
    off_node = 0.3 * small_grid.spacing
    spec = perturbed_spec(0.5, atom_potential(off_node, 2.0), UNIT, small_grid)
    assert spec.delta_atoms[0] == DeltaAtom(0.0, 1.0)
    assert spec.delta_atoms[1].weight == 1.0
    assert spec.delta_atoms[1].location == 0.0

    spec = perturbed_spec(0.2, gaussian_potential(), UNIT, small_grid)
    assert spec.potential_sign == -1
    assert spec.potential.at_origin() == pytest.approx(0.2)


def test_coercivity_guard():
    grid = make_grid(20.0, 2001)
    assert coercivity_bound(0.1, atom_potential(), UNIT, grid) == pytest.approx(-(1.6 ** 2))
    perturbed_spec(0.1, atom_potential(), UNIT, grid)
    with pytest.raises(CoercivityError):
        perturbed_spec(100.0, atom_potential(), UNIT, grid)


@pytest.mark.parametrize("eps", [-0.5, -0.25, 0.1, 1.0])
def test_atom_at_origin_shifts_beta(eps):
    value = e_eps(eps, atom_potential(), UNIT, decay_grid(UNIT.decay_rate, 8193))
    assert value == pytest.approx(pekar_energy_closed(UNIT.with_beta(1.0 + eps)), rel=1e-4)


def test_constant_potential_shifts_energy(small_grid):
    c, eps = 2.0, 0.3
    base = e_eps(0.0, constant_potential(c), UNIT, small_grid)
    shifted = e_eps(eps, constant_potential(c), UNIT, small_grid)
    assert shifted == pytest.approx(base - eps * c, abs=1e-8)


def test_pairing_targets():
    assert pairing_target(atom_potential(), UNIT) == pytest.approx(5.0 / 8.0, abs=1e-14)
    assert pairing_target(constant_potential(2.0), UNIT) == pytest.approx(2.0, rel=1e-9)
    grid = make_grid(60.0, 60001)
    dens = phi0(UNIT, grid.nodes) ** 2
    direct = float(np.dot(grid.weights, np.exp(-grid.nodes ** 2) * dens))
    assert pairing_target(gaussian_potential(), UNIT) == pytest.approx(direct, rel=1e-5)


def test_concavity_in_eps():
    defects = concavity_defects([-0.05, 0.0, 0.05], 0.05, gaussian_potential(), UNIT)
    assert max(defects) <= 1e-8


def test_one_sided_secants_bracket_discrete_derivative(small_grid):
    report = derivative_check(atom_potential(), UNIT, small_grid, eps_ladder=(1e-1, 1e-2, 1e-3))
    assert report.target == pytest.approx(-0.625, abs=1e-12)
    assert report.discrete_target == pytest.approx(report.target, rel=1e-2)
    for left, right in zip(report.left, report.right):
        assert left >= report.discrete_target - 1e-7
        assert right <= report.discrete_target + 1e-7
    assert report.observed_order >= 0.9
    assert report.closed_form_gap is not None
    assert len(report.two_sided) == 3


@pytest.mark.parametrize("potential", [atom_potential(), gaussian_potential()])
def test_secants_sit_in_sandwich_for_both_signs(potential, small_grid):
    report = derivative_check(potential, UNIT, small_grid, eps_ladder=(1e-1, 1e-2))
    assert report.sandwich_violations() == 0
    tol = 1e-8
    for i, eps in enumerate(report.eps):
        assert report.right_discrete[i] == report.right[i]
        assert report.right_lower[i] - tol <= report.right[i] <= report.discrete_target + tol
        assert report.discrete_target - tol <= report.left[i] <= report.left_upper[i] + tol
        assert report.right_lower[i] < report.left_upper[i]


def test_perturbed_state_pairs_with_potential(small_grid):
    eps = 0.1
    W = gaussian_potential()
    state = e_eps_with_state(eps, W, UNIT, small_grid)
    assert state.energy.total == e_eps(eps, W, UNIT, small_grid)
    base = minimize(pekar_spec(UNIT, small_grid)).minimizer
    assert grid_pairing(W, state.minimizer) >= grid_pairing(W, base) - 1e-10


def test_derivative_check_needs_alpha():
    with pytest.raises(ValueError):
        derivative_check(atom_potential(), ModelParams(alpha=0.0, beta=1.0))


def test_density_pairing_on_trial_state():
    B = 1e6
    grid = GridPolicy().grid_for(B)
    f = trial_state(B, UNIT, grid)
    s = mu_field(B)
    assert density_pairing(B, atom_potential(), UNIT, minimizer=f) == pytest.approx(f.at_origin() ** 2 / s)
    assert density_pairing(B, gaussian_potential(), UNIT, minimizer=f) == pytest.approx(
        pairing_target(gaussian_potential(), UNIT), abs=1e-3)
    assert density_l1_distance(B, UNIT, f) <= 2e-4


@pytest.mark.slow
def test_derivative_identity_atom_extrapolated():
    report = derivative_check(atom_potential(), UNIT, extrapolate=True)
    assert report.observed_order >= 0.9
    assert report.closed_form_gap <= 1e-6


@pytest.mark.slow
def test_derivative_identity_gaussian_extrapolated():
    report = derivative_check(gaussian_potential(), UNIT, extrapolate=True)
    assert report.observed_order >= 0.9
    assert all(r <= report.target + 1e-6 for r in report.right)


@pytest.mark.slow
def test_classical_density_approaches_limit():
    policy = GridPolicy()
    distances = [density_l1_distance(B, UNIT, classical_minimizer(B, UNIT, policy, None))
                 for B in (1e6, 1e12)]
    assert distances[1] < distances[0]


def test_zero_eps_uses_unperturbed_path(small_grid):
    assert e_eps(0.0, gaussian_potential(), UNIT, small_grid) == minimize(pekar_spec(UNIT, small_grid)).energy.total
