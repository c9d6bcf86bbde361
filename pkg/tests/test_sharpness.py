import logging
import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from thermoporo_splitting.conditions import condition_report
from thermoporo_splitting.errors import OutOfRangeError, SingularMatrixError
from thermoporo_splitting.experiments import final_time_error
from thermoporo_splitting.experiments import sharpness as sharpness_module
from thermoporo_splitting.problems import toy_problem
from thermoporo_splitting.steppers import SchemeConfig, run
from thermoporo_splitting.experiments import (
    CellClass,
    classify,
    sharpness_sweep,
    sweep_axis,
    sweep_cell,
    sweep_grid,
)
from thermoporo_splitting.steppers import SchemeId


def test_sweep_axis_uses_cell_midpoints():
    assert_allclose(sweep_axis(0.0, 1.0, 4), [0.125, 0.375, 0.625, 0.875])
    with pytest.raises(OutOfRangeError):
        sweep_axis(0.0, 1.0, 0)


def test_sweep_grid_stays_inside_ranges():
    alphas, ctildes = sweep_grid(3, 5)
    assert alphas.shape == (3,) and ctildes.shape == (5,)
    assert 0.0 < alphas.min() and alphas.max() < 0.64
    assert 0.5 < ctildes.min() and ctildes.max() < 5.5


@pytest.mark.parametrize(
    "guaranteed, e_T, diverged, expected",
    [
        (True, 1e-4, False, CellClass.GUARANTEED),
        (False, 1e-4, False, CellClass.CONVERGED),
        (True, 1e-2, False, CellClass.DIVERGED),
        (False, 1e-4, True, CellClass.DIVERGED),
        (False, math.inf, False, CellClass.DIVERGED),
    ],
)
def test_classify(guaranteed, e_T, diverged, expected):
    assert classify(0.5, guaranteed, e_T, diverged) is expected


def test_weakly_coupled_cell_is_guaranteed():
    cell = sweep_cell(0.2, 2.0, SchemeId.SEMI_EXPLICIT_HALF)
    assert cell.omega == pytest.approx(0.48)
    assert cell.e_T < 1e-2
    assert cell.classification is CellClass.GUARANTEED
    assert cell.as_row()["class"] == "guaranteed"


def test_strongly_coupled_cell_diverges():
    cell = sweep_cell(0.62, 0.656, SchemeId.SEMI_EXPLICIT_FULL)
    assert cell.omega > 1
    assert math.isinf(cell.e_T)
    assert cell.classification is CellClass.DIVERGED


def test_unsupported_scheme():
    with pytest.raises(OutOfRangeError):
        sweep_cell(0.2, 2.0, SchemeId.IMPLICIT_EULER)


def test_sweep_order_independent_of_workers():
    alphas, ctildes = np.array([0.1, 0.5]), np.array([1.0, 4.0])
    options = dict(tau=0.1 / 64, reference_tau=0.1 / 128)
    serial = sharpness_sweep(alphas, ctildes, SchemeId.SEMI_EXPLICIT_HALF, **options)
    parallel = sharpness_sweep(alphas, ctildes, SchemeId.SEMI_EXPLICIT_HALF, workers=4, **options)
    assert [(c.alpha, c.c0_tilde) for c in serial] == [(0.1, 1.0), (0.1, 4.0), (0.5, 1.0), (0.5, 4.0)]
    assert [c.as_row() for c in serial] == [c.as_row() for c in parallel]


@pytest.mark.slow
def test_conditions_are_sufficient_on_full_grid():
    alphas, ctildes = sweep_grid(16, 16)
    half = sharpness_sweep(alphas, ctildes, SchemeId.SEMI_EXPLICIT_HALF, workers=4)
    assert len(half) == 256
    for cell in half:
        if cell.omega <= 1.0:
            assert cell.classification is CellClass.GUARANTEED, cell

    full = sharpness_sweep(alphas, ctildes, SchemeId.SEMI_EXPLICIT_FULL, workers=4)
    diverged = [cell for cell in full if cell.classification is CellClass.DIVERGED]
    assert diverged
    assert max(cell.alpha for cell in diverged) > 0.5


def test_failing_cell_becomes_diverged_row(monkeypatch):
    def broken_run(*args, **kwargs):
        raise SingularMatrixError("矩阵数值奇异")

    monkeypatch.setattr(sharpness_module, "run", broken_run)
    cell = sweep_cell(0.2, 2.0, SchemeId.SEMI_EXPLICIT_HALF)
    assert cell.classification is CellClass.DIVERGED
    assert math.isinf(cell.e_T)
    assert cell.as_row()["class"] == "diverged"


def test_guaranteed_cell_that_fails_is_flagged(monkeypatch, caplog):
    class Report:
        e_T = 0.5

    monkeypatch.setattr(sharpness_module, "final_time_error", lambda *args: Report())
    with caplog.at_level(logging.WARNING, logger="thermoporo_splitting.experiments.sharpness"):
        cell = sweep_cell(0.2, 2.0, SchemeId.SEMI_EXPLICIT_HALF)
    assert cell.guaranteed
    assert cell.classification is CellClass.DIVERGED
    assert cell.violation
    assert any("未收敛" in r.getMessage() for r in caplog.records)


def test_regular_cells_are_not_violations():
    half = sweep_cell(0.2, 2.0, SchemeId.SEMI_EXPLICIT_HALF)
    full = sweep_cell(0.62, 0.656, SchemeId.SEMI_EXPLICIT_FULL)
    assert half.guaranteed and not half.violation
    assert not full.guaranteed and not full.violation


def test_fully_decoupled_converges_when_guaranteed():
    # ĉ₀ = 0.1 使 min(c_d², c_d̃²) = 0.81 > C_a·ĉ₀ ≈ 0.583，ω_FD = 1.72/2 = 0.86
    system, data = toy_problem(0.3, 2.0)
    system = replace(system, C_hat=np.array([[0.1]]), params=replace(system.params, c0_hat=0.1))
    report = condition_report(system, "spectral")
    assert report.fd_precondition
    assert report.omega_fd == pytest.approx(0.86)
    assert report.fd_guaranteed

    traj = run(system, data, SchemeConfig(scheme=SchemeId.SEMI_EXPLICIT_FULL, tau=0.1 / 256))
    ref = run(system, data, SchemeConfig(scheme=SchemeId.IMPLICIT_EULER, tau=0.1 / 512))
    assert not traj.diverged
    assert final_time_error(ref.final, traj.final, system).e_T < 1e-2
