import pytest

import solver.gradient_flow as gradient_flow
from validation.suite import (
    FULL_CHECKS,
    QUICK_CHECKS,
    CheckResult,
    SuiteReport,
    run_suite,
    sweep_grid,
)


def test_check_names_are_unique():
    names = [name for name, _ in QUICK_CHECKS + FULL_CHECKS]
    assert len(names) == len(set(names))


def test_report_first_failure_ignores_skipped():
    report = SuiteReport(quick=True, checks=[
        CheckResult(name="a", passed=True),
        CheckResult(name="b", passed=False),
        CheckResult(name="c", passed=False, skipped=True),
    ])
    assert report.first_failure == "b"
    assert not report.passed
    document = report.to_dict()
    assert document["total"] == 3
    assert document["first_failure"] == "b"


@pytest.mark.parametrize("L", [1.0, 0.05, 0.0217])
def test_sweep_grid_resolves_window(L):
    grid = sweep_grid(L)
    assert grid.spacing <= L / 8.0
    assert grid.coarsen().spacing > L / 8.0 or grid.n == 1025
    assert ((grid.n - 1) & (grid.n - 2)) == 0


def test_flipped_atom_gradient_is_caught_first_by_jump_check(monkeypatch):
    original = gradient_flow._atom_gradient
    monkeypatch.setattr(gradient_flow, "_atom_gradient",
                        lambda values, spec: -original(values, spec))
    report = run_suite(quick=True)
    assert report.first_failure == "el_jump_minimizer"
    skipped = [c.name for c in report.checks if c.skipped]
    assert skipped[0] == "gradient_fd_check"


def test_quick_suite_passes():
    report = run_suite(quick=True)
    assert report.passed, report.first_failure
    assert len(report.checks) == len(QUICK_CHECKS)


def test_quick_mode_stays_on_small_grids():
    names = {name for name, _ in QUICK_CHECKS}
    for heavy in ("pekar_solve", "delta_well_solve", "binding_inequality",
                  "perturb_atom_closed_form", "hydrogen_sandwich", "polaron_sandwich"):
        assert heavy not in names
        assert heavy in {name for name, _ in FULL_CHECKS}
