import csv
import io
import json

import numpy as np
import pytest

from gvbs.building_block import StandardFormParams, s_min
from gvbs.entanglement import (
    PartitionedState,
    distance_nu_minus,
    eof_from_nu,
    eof_symmetric,
    is_separable,
    log_negativity,
    min_pt_symplectic_eigenvalue,
    pt_spectrum,
    s2_polynomial,
    s2_polynomial_coefficients,
    s2_polynomial_root,
    threshold_curve,
    threshold_s_k,
)
from gvbs.errors import DomainError, PartitionError, SymmetryError
from gvbs.phase_space import direct_sum, two_mode_squeezed_cm
from gvbs.valence_bond import FiniteBond


def test_partitioned_state_validation():
    g = two_mode_squeezed_cm(0.3)
    assert PartitionedState(g, (1,)).part_b == (0,)
    for bad in ((), (0, 1), (2,)):
        with pytest.raises(PartitionError):
            PartitionedState(g, bad)


def test_product_state_is_separable():
    prod = direct_sum(np.diag([2.0, 2.0]), np.eye(2))
    assert min_pt_symplectic_eigenvalue(prod) >= 1.0
    assert is_separable(prod)
    assert log_negativity(prod) == 0.0


def test_tmss_nu_minus_and_log_negativity():
    np.testing.assert_allclose(min_pt_symplectic_eigenvalue(two_mode_squeezed_cm(0.5)), np.exp(-1), rtol=1e-12)
    np.testing.assert_allclose(min_pt_symplectic_eigenvalue(two_mode_squeezed_cm(0.5)), 0.367879, atol=1e-6)
    for r in (0.1, 0.5, 1.7):
        np.testing.assert_allclose(log_negativity(two_mode_squeezed_cm(r)), 2 * r / np.log(2), rtol=1e-10)


def test_multimode_partition():
    # tmss on modes (0,1) plus a vacuum: cutting mode 2 off sees no entanglement
    g = direct_sum(two_mode_squeezed_cm(0.6), np.eye(2))
    assert is_separable(PartitionedState(g, (2,)))
    np.testing.assert_allclose(pt_spectrum(PartitionedState(g, (0,)))[0], np.exp(-1.2), rtol=1e-10)


def test_eof_values():
    assert eof_from_nu(1.0) == 0.0
    assert eof_from_nu(3.0) == 0.0
    # tmss: E_F = cosh^2 r log2 cosh^2 r - sinh^2 r log2 sinh^2 r
    r = 0.8
    c2, s2 = np.cosh(r) ** 2, np.sinh(r) ** 2
    np.testing.assert_allclose(eof_symmetric(two_mode_squeezed_cm(r)), c2 * np.log2(c2) - s2 * np.log2(s2), rtol=1e-12)
    nus = np.linspace(0.05, 0.99, 20)
    assert np.all(np.diff([eof_from_nu(v) for v in nus]) < 0)
    with pytest.raises(DomainError):
        eof_from_nu(0.0)


def test_eof_rejects_asymmetric_states():
    with pytest.raises(SymmetryError):
        eof_symmetric(direct_sum(np.diag([2.0, 2.0]), np.eye(2)))
    with pytest.raises(SymmetryError):
        eof_symmetric(np.eye(6))


def test_threshold_k1_is_s_min():
    for x in (1.3, 2.0, 3.5):
        res = threshold_s_k(x, 1, 6)
        assert res.at_boundary
        assert res.s_k == s_min(x)


def test_threshold_s3_equals_x():
    for x in (1.5, 2.5):
        res = threshold_s_k(x, 3, 6)
        assert abs(res.s_k - x) < 1e-6
        assert abs(res.residual) < 1e-9
        assert not res.at_boundary


def test_threshold_s2_matches_polynomial():
    root = s2_polynomial_root(2.0)
    assert abs(s2_polynomial(root, 2.0)) < 1e-8
    assert abs(threshold_s_k(2.0, 2, 6).s_k - root) < 1e-6


def test_threshold_separates_entangled_from_separable():
    x = 2.0
    s2 = threshold_s_k(x, 2, 6).s_k
    assert distance_nu_minus(x, s2 - 1e-3, 2, 6) > 1.0
    assert distance_nu_minus(x, s2 + 1e-3, 2, 6) < 1.0


def test_threshold_domain_errors():
    with pytest.raises(DomainError):
        threshold_s_k(1.0, 2, 6)
    with pytest.raises(DomainError):
        threshold_s_k(2.0, 4, 6)
    with pytest.raises(DomainError):
        threshold_s_k(2.0, 0, 6)


def test_thresholds_rise_for_weaker_bonds():
    assert threshold_s_k(2.0, 2, 6, FiniteBond(1.0)).s_k > threshold_s_k(2.0, 2, 6).s_k


def test_polynomial_coefficients_shape():
    c = s2_polynomial_coefficients(2.0)
    assert c.shape == (5,) and c[0] == 72.0
    with pytest.raises(DomainError):
        s2_polynomial_root(1.0)


def test_log_negativity_monotone_in_s_for_input_pair():
    from gvbs.building_block import standard_form_cm
    from gvbs.phase_space import reduced_cm

    en = [log_negativity(reduced_cm(standard_form_cm(StandardFormParams(2.0, s)), [0, 1])) for s in np.linspace(1.5, 8, 30)]
    assert np.all(np.diff(en) >= -1e-12)


def test_threshold_curve_csv_and_json():
    curve = threshold_curve(1, 6, [1.0, 1.5, 2.0])
    rows = list(csv.reader(io.StringIO(curve.to_csv({"closed_form": [np.nan, 1.25, 1.5]}))))
    assert rows[0] == ["x", "s_k", "residual", "iterations", "closed_form", "reason"]
    # x = 1 is outside the threshold domain: NaN row plus a reason
    assert rows[1][1] == "nan" and rows[1][-1].startswith("DomainError")
    assert float(rows[2][1]) == 1.25 and rows[2][-1] == ""
    assert rows[3][1] == "1.5"
    data = json.loads(curve.to_json())
    assert data["bond"] == "epr" and len(data["samples"]) == 3


def test_threshold_curve_17_digits():
    curve = threshold_curve(3, 6, [1.7])
    row = curve.to_csv().splitlines()[1].split(",")
    assert float(row[1]) == curve.samples[0].s_k
    assert row[1] == f"{curve.samples[0].s_k:.17g}"
