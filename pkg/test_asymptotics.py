import math

import numpy as np
import pytest

from asymptotics import (
    GridPolicy,
    LadderModel,
    LadderPoint,
    LadderSpec,
    classical_1d_spec,
    energy_law,
    expansion_terms,
    extraction_bracket,
    fit_expansion,
    hydrogenic_correction,
    hydrogenic_expansion,
    ladder_energies,
    perturbed_upper_bound,
    trial_state,
    trial_upper_bound,
    upper_law,
)
from cli.defaults import STANDARD_LADDER
from closedform import pekar_energy_closed
from core.errors import FitError, ResolutionError
from core.functional import pekar_spec
from core.grid import l2_norm, make_grid
from core.params import ModelParams
from effpot.bounds import hydrogen_lower_bound
from effpot.potentials import mu_field
from solver.diagnostics import decay_grid
from solver.gradient_flow import minimize

UNIT = ModelParams(alpha=1.0, beta=1.0)


def test_grid_policy_scales_with_mu():
    grid = GridPolicy(scale=40.0, n=1025).grid_for(1e9)
    assert grid.half_width == pytest.approx(40.0 / mu_field(1e9))
    assert grid.n == 1025


def test_ladder_spec_validation():
    with pytest.raises(ValueError):
        LadderSpec(fields=(1e9, 1e6), model=LadderModel.POLARON, params=UNIT)
    with pytest.raises(ValueError):
        LadderSpec(fields=(10.0,), model=LadderModel.POLARON, params=UNIT)
    spec = LadderSpec(fields=(1e6, 1e9), model=LadderModel.HYDROGENIC, params=UNIT)
    p = spec.params_for(1e6)
    assert p.alpha == 0.0 and p.beta == 1.0 and p.field == 1e6


def test_classical_spec_requires_resolution():
    with pytest.raises(ResolutionError):
        classical_1d_spec(1e6, UNIT, make_grid(4.0, 33))


def test_classical_spec_shape():
    B = 1e6
    grid = GridPolicy(n=1025).grid_for(B)
    spec = classical_1d_spec(B, UNIT, grid)
    assert spec.potential_sign == -1
    assert spec.kernel_row is not None and spec.kernel_row.shape == (grid.n,)
    hydrogenic = classical_1d_spec(B, ModelParams(alpha=0.0, beta=1.0), grid)
    assert hydrogenic.kernel_row is None
    pointwise = classical_1d_spec(B, UNIT, grid, cell_average=False)
    assert pointwise.potential.at_origin() > spec.potential.at_origin()


def test_trial_state_and_bracket():
    B = 1e6
    grid = GridPolicy().grid_for(B)
    f = trial_state(B, UNIT, grid)
    assert l2_norm(f) == pytest.approx(1.0, abs=1e-12)
    bound = trial_upper_bound(B, UNIT, grid)
    assert bound.leading == pytest.approx(mu_field(B) ** 2 * pekar_energy_closed(UNIT))
    assert bound.bracket == pytest.approx(extraction_bracket(B, UNIT, f))
    assert abs(bound.value - bound.leading) <= bound.bracket
    assert bound.upper == bound.leading + bound.bracket


def test_failed_point_is_recorded_not_raised():
    spec = LadderSpec(fields=(1e6,), model=LadderModel.POLARON, params=UNIT,
                      grid_policy=GridPolicy(n=65))
    (point,) = ladder_energies(spec, workers=1)
    assert not point.ok
    assert math.isnan(point.e_eff)
    assert point.error


def test_fit_recovers_exact_coefficients():
    a, b, c = -0.4, 1.6, 0.3
    points = []
    for B in STANDARD_LADDER:
        ln = math.log(B)
        points.append((B, a * ln * ln + b * ln * math.log(ln) + c * ln))
    fit = fit_expansion(points)
    assert fit.a == pytest.approx(a, rel=1e-8)
    assert fit.b == pytest.approx(b, rel=1e-8)
    assert fit.c == pytest.approx(c, rel=1e-7)
    assert fit.residual < 1e-8


def test_fit_on_hydrogenic_expansion():
    points = [(B, hydrogenic_correction(B, 1.0)) for B in STANDARD_LADDER]
    fit = fit_expansion(points)
    assert abs(fit.a + 0.25) / 0.25 <= 0.03


def test_hydrogenic_correction_survives_large_fields():
    correction = hydrogenic_correction(1e36, 1.0)
    assert math.isfinite(correction)
    assert correction < -1000.0
    assert correction == pytest.approx(math.fsum(expansion_terms(1e36, 1.0)[1:]))
    assert hydrogenic_correction(1e6, 1.0) == pytest.approx(hydrogenic_expansion(1e6, 1.0) - 1e6,
                                                           rel=1e-9)
    assert hydrogenic_correction(1e36, 0.0) == 0.0


def test_fit_errors():
    with pytest.raises(FitError):
        fit_expansion([(1e6, -1.0), (1e9, -2.0), (1e12, -3.0)])
    with pytest.raises(FitError):
        fit_expansion([(10.0, -1.0), (1e9, -2.0), (1e12, -3.0), (1e18, -4.0)])
    with pytest.raises(FitError):
        fit_expansion([(1e9, -2.0)] * 4)


def test_fit_skips_failed_points():
    failed = LadderPoint(B=1e6, e_eff=math.nan, ok=False, error="x")
    good = [LadderPoint(B=B, e_eff=-math.log(B) ** 2, ok=True) for B in STANDARD_LADDER[1:4]]
    with pytest.raises(FitError):
        fit_expansion([failed, *good])


@pytest.mark.parametrize("B", [1e12, 1e18, 1e24, 1e36])
def test_expansion_terms_decrease_for_large_fields(B):
    mags = [abs(t) for t in expansion_terms(B, 1.0)[1:]]
    assert all(x > y for x, y in zip(mags, mags[1:]))


def test_expansion_terms_not_ordered_at_moderate_field():
    mags = [abs(t) for t in expansion_terms(1e6, 1.0)[1:]]
    assert not all(x > y for x, y in zip(mags, mags[1:]))


def test_hydrogenic_expansion_edge_cases():
    assert hydrogenic_expansion(1e9, 0.0) == 1e9
    assert hydrogenic_expansion(1e9, 2.0) == pytest.approx(math.fsum(expansion_terms(1e9, 2.0)))
    with pytest.raises(ValueError):
        expansion_terms(10.0, 1.0)


def test_energy_laws():
    B = 1e12
    ln = math.log(B)
    e0 = pekar_energy_closed(UNIT)
    assert energy_law(B, UNIT) == pytest.approx(B + e0 * ln * ln)
    assert upper_law(B, UNIT) - energy_law(B, UNIT) == pytest.approx(-4.0 * e0 * ln * math.log(ln), rel=1e-3)


@pytest.mark.slow
def test_polaron_point_sits_in_sandwich():
    spec = LadderSpec(fields=(1e6,), model=LadderModel.POLARON, params=UNIT)
    (point,) = ladder_energies(spec, workers=1)
    assert point.ok
    assert point.e_eff <= point.trial.value + 1e-9 * abs(point.e_eff)
    bracket = extraction_bracket(point.B, UNIT, point.report.minimizer)
    assert abs(point.e_eff - point.mu ** 2 * pekar_energy_closed(UNIT)) <= bracket


@pytest.mark.slow
def test_hydrogen_point_between_bounds():
    B = 1e12
    spec = LadderSpec(fields=(B,), model=LadderModel.HYDROGENIC, params=UNIT)
    (point,) = ladder_energies(spec, workers=1)
    assert point.ok
    assert hydrogen_lower_bound(B, 1.0).value <= point.e_eff <= point.trial.value + 1e-9 * abs(point.e_eff)


@pytest.mark.slow
def test_ladder_is_deterministic_across_workers():
    spec = LadderSpec(fields=(1e9, 1e12, 1e18), model=LadderModel.HYDROGENIC, params=UNIT)
    serial = [pt.e_eff for pt in ladder_energies(spec, workers=1)]
    pooled = [pt.e_eff for pt in ladder_energies(spec, workers=3)]
    assert serial == pooled
    assert np.all(np.isfinite(serial))


@pytest.mark.slow
@pytest.mark.parametrize("model,target", [
    (LadderModel.POLARON, pekar_energy_closed(UNIT)),
    (LadderModel.HYDROGENIC, -0.25),
])
def test_ladder_fit_leading_coefficient(model, target):
    spec = LadderSpec(fields=STANDARD_LADDER, model=model, params=UNIT)
    points = ladder_energies(spec)
    fit = fit_expansion(points)
    assert abs(fit.a - target) / abs(target) <= 0.03


@pytest.fixture(scope="module")
def pekar_state():
    grid = decay_grid(UNIT.decay_rate, 2049)
    spec = pekar_spec(UNIT, grid)
    return spec, minimize(spec).minimizer


@pytest.mark.parametrize("B", STANDARD_LADDER)
def test_perturbed_bound_pieces(B, pekar_state):
    spec, phi = pekar_state
    bound = perturbed_upper_bound(B, UNIT, spec, phi)
    lnln = math.log(math.log(B))
    assert abs(bound.g_tilde) <= 2.0 * abs(lnln) + 1.0
    assert math.isfinite(bound.bracket) and bound.bracket > 0
    assert bound.upper > bound.scaled_energy
    assert bound.scaled_energy == pytest.approx(math.log(B) ** 2 * pekar_energy_closed(UNIT), rel=2e-3)


def test_perturbed_bound_uses_perturbed_functional(pekar_state):
    _, phi = pekar_state
    grid = phi.grid
    plain = perturbed_upper_bound(1e12, UNIT, pekar_spec(UNIT, grid), phi)
    stronger = perturbed_upper_bound(1e12, UNIT.with_beta(1.5), pekar_spec(UNIT.with_beta(1.5), grid), phi)
    assert stronger.scaled_energy < plain.scaled_energy
    assert stronger.bracket > plain.bracket
    with pytest.raises(ValueError):
        perturbed_upper_bound(1.0, UNIT, pekar_spec(UNIT, grid), phi)


@pytest.fixture(scope="module")
def polaron_ladder():
    spec = LadderSpec(fields=STANDARD_LADDER, model=LadderModel.POLARON, params=UNIT)
    return ladder_energies(spec)


@pytest.mark.slow
def test_polaron_ratio_approaches_pekar_energy_monotonically(polaron_ladder):
    e0 = pekar_energy_closed(UNIT)
    gaps = [abs(pt.e_eff / pt.mu ** 2 - e0) for pt in polaron_ladder]
    assert all(pt.ok for pt in polaron_ladder)
    assert all(b <= a + 1e-6 for a, b in zip(gaps, gaps[1:]))


@pytest.mark.slow
def test_ladder_energies_below_perturbed_bound(polaron_ladder, pekar_state):
    spec, phi = pekar_state
    for pt in polaron_ladder:
        assert pt.e_eff <= perturbed_upper_bound(pt.B, UNIT, spec, phi).upper
