import csv
import io
import json

import numpy as np
import pytest

from gvbs.building_block import StandardFormParams
from gvbs.entanglement import min_pt_symplectic_eigenvalue, threshold_s_k
from gvbs.errors import DomainError, NumericalError, ValidationError
from gvbs.phase_space import (
    CovarianceMatrix,
    apply,
    local_symplectic,
    single_mode_symplectic,
    two_mode_squeezed_cm,
)
from gvbs.protocols import (
    CLASSICAL_FIDELITY,
    TeleportResource,
    grid_from_config,
    optimal_fidelity,
    optimize_fidelity_numeric,
    telecloning_grid,
    teleport_fidelity,
)
from gvbs.valence_bond import GvbsSpec, build_gvbs, distance_reduction


def test_vacuum_resource_hits_classical_bound():
    assert teleport_fidelity(np.eye(4)) == CLASSICAL_FIDELITY


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.0, 4.0])
def test_tmss_fidelity_closed_form(r):
    np.testing.assert_allclose(teleport_fidelity(two_mode_squeezed_cm(r)), 1 / (1 + np.exp(-2 * r)), rtol=1e-12)


def test_fidelity_limits():
    assert teleport_fidelity(two_mode_squeezed_cm(8.0)) > 1 - 1e-6
    assert optimal_fidelity(1.0) == 0.5
    assert optimal_fidelity(1e-12) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        optimal_fidelity(0.0)


def test_optimal_matches_raw_on_tmss():
    r = 0.7
    nu = min_pt_symplectic_eigenvalue(two_mode_squeezed_cm(r))
    np.testing.assert_allclose(optimal_fidelity(nu), teleport_fidelity(two_mode_squeezed_cm(r)), rtol=1e-12)


def test_resource_validation():
    with pytest.raises(ValidationError):
        TeleportResource(np.eye(6))
    with pytest.raises(ValidationError):
        TeleportResource(np.eye(4), np.eye(4))
    with pytest.raises(ValidationError):
        TeleportResource(0.5 * np.eye(4)).check_physical()
    # corrupted data can drive det Sigma to zero
    bad = CovarianceMatrix(np.diag([-1.0, -1.0, -1.0, -1.0]))
    with pytest.raises(NumericalError):
        teleport_fidelity(bad)


def test_squeezed_input_changes_fidelity():
    res = TeleportResource(two_mode_squeezed_cm(0.5), CovarianceMatrix(np.diag([2.0, 0.5])))
    assert teleport_fidelity(res) != teleport_fidelity(two_mode_squeezed_cm(0.5))


def test_optimizer_on_tmss_has_no_gain():
    out = optimize_fidelity_numeric(two_mode_squeezed_cm(0.6))
    assert abs(out.gain) < 1e-8
    assert out.evaluations <= 10_000


def test_optimizer_recovers_rotated_tmss():
    r = 0.6
    loc = local_symplectic([single_mode_symplectic(0.3, 0.4, -1.1), single_mode_symplectic(2.0, -0.2, 0.5)])
    scrambled = apply(loc, two_mode_squeezed_cm(r))
    out = optimize_fidelity_numeric(scrambled)
    assert out.raw_fidelity < out.fidelity
    assert abs(out.fidelity - 1 / (1 + np.exp(-2 * r))) < 1e-4


def test_optimizer_matches_optimal_formula_on_gvbs():
    red = distance_reduction(build_gvbs(GvbsSpec(6, StandardFormParams(2.0, 3.0))), 1)
    out = optimize_fidelity_numeric(red)
    assert abs(out.fidelity - optimal_fidelity(min_pt_symplectic_eigenvalue(red))) < 1e-4


def test_grid_raw_and_optimal():
    xs, ss = [1.5, 2.0, 3.0], [1.0, 2.0, 3.0, 5.0]
    raw = telecloning_grid(6, 1, xs, ss, "raw")
    opt = telecloning_grid(6, 1, xs, ss, "optimal")
    assert raw.values().shape == (3, 4)
    ok = np.isfinite(raw.values())
    # s = 1 is below s_min for every x here
    assert not ok[:, 0].any() and ok[:, 1:].all()
    assert np.all(opt.values()[ok] >= raw.values()[ok] - 1e-12)
    np.testing.assert_array_equal(opt.nu_values()[ok], raw.nu_values()[ok])
    for p in raw.points:
        if p.nonclassical:
            assert p.entangled
    assert "PhysicalityError" in raw.points[0].error


def test_optimal_grid_tracks_threshold():
    x = 2.0
    s3 = threshold_s_k(x, 3, 6).s_k
    grid = telecloning_grid(6, 3, [x], [s3 - 0.05, s3 + 0.05])
    below, above = grid.points
    assert not below.nonclassical and above.nonclassical


def test_grid_equal_fidelities_in_symmetric_limit():
    f = [telecloning_grid(6, k, [2.0], [1e3]).points[0].fidelity for k in (1, 2, 3)]
    assert max(f) - min(f) < 1e-3


def test_grid_kernel_agrees_with_scalar_routes():
    grid = telecloning_grid(6, 2, [2.0], [3.0], "raw")
    red = distance_reduction(build_gvbs(GvbsSpec(6, StandardFormParams(2.0, 3.0))), 2)
    np.testing.assert_allclose(grid.points[0].fidelity, teleport_fidelity(red), rtol=1e-12)
    np.testing.assert_allclose(grid.points[0].nu_minus, min_pt_symplectic_eigenvalue(red), rtol=1e-10)


def test_grid_validation():
    with pytest.raises(ValidationError):
        telecloning_grid(6, 1, [2.0], [3.0], "best")
    with pytest.raises(ValidationError):
        telecloning_grid(6, 4, [2.0], [3.0])


def test_grid_csv_and_json():
    grid = telecloning_grid(4, 2, [2.0, 2.5], [3.0], "optimal")
    rows = list(csv.reader(io.StringIO(grid.to_csv())))
    assert rows[0][:6] == ["x", "s", "k", "fidelity", "nu_minus", "nonclassical"]
    assert [float(r[0]) for r in rows[1:]] == [2.0, 2.5]
    assert float(rows[1][3]) == grid.points[0].fidelity
    meta = json.loads(grid.to_json())
    assert meta["mode"] == "optimal" and meta["bond"] == "epr" and len(meta["points"]) == 2


def test_grid_from_config():
    cfg = {"n_sites": 6, "k": 2, "x": {"min": 1.5, "max": 2.5, "steps": 3}, "s": {"min": 2, "max": 4, "steps": 2}, "bond": "r=3"}
    grid = grid_from_config(cfg)
    assert grid.mode == "optimal" and grid.bond == "r=3.0"
    assert grid.x_axis == [1.5, 2.0, 2.5] and len(grid.points) == 6
    with pytest.raises(ValidationError):
        grid_from_config({"n_sites": 6})
    with pytest.raises(ValidationError):
        grid_from_config({**cfg, "x": {"min": 1, "max": 2, "steps": 0}})
