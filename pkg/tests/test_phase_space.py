import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvbs.errors import DimensionError, NumericalError, PartitionError, SymmetryError
from gvbs.phase_space import (
    CovarianceMatrix,
    SymplecticTransform,
    apply,
    beam_splitter,
    direct_sum,
    is_physical,
    is_pure,
    local_symplectic,
    partial_transpose,
    permute_modes,
    purity,
    random_symplectic,
    reduced_cm,
    single_mode_symplectic,
    symplectic_form,
    symplectic_spectrum,
    twin_beam,
    two_mode_squeezed_cm,
    two_mode_squeezer,
)


def tmss(r):
    return apply(twin_beam(r), CovarianceMatrix.vacuum(2))


def test_symplectic_form_properties():
    om = symplectic_form(3)
    np.testing.assert_array_equal(om, -om.T)
    np.testing.assert_array_equal(om @ om, -np.eye(6))


def test_covariance_matrix_rejects_bad_shapes_and_asymmetry():
    with pytest.raises(DimensionError):
        CovarianceMatrix(np.eye(3))
    with pytest.raises(DimensionError):
        CovarianceMatrix(np.ones((2, 4)))
    with pytest.raises(SymmetryError):
        CovarianceMatrix([[1.0, 0.1], [0.0, 1.0]])
    with pytest.raises(NumericalError):
        CovarianceMatrix([[np.nan, 0.0], [0.0, 1.0]])


def test_covariance_matrix_is_read_only_and_round_trips():
    g = tmss(0.3)
    with pytest.raises(ValueError):
        g.data[0, 0] = 5.0
    back = CovarianceMatrix.from_dict(g.to_dict())
    np.testing.assert_array_equal(back.data, g.data)


def test_two_mode_squeezer_examples():
    np.testing.assert_array_equal(np.asarray(two_mode_squeezer(0.0)), np.eye(4))
    e = np.e
    np.testing.assert_allclose(np.asarray(two_mode_squeezer(1.0)), np.diag([e, 1 / e, 1 / e, e]), rtol=1e-15)
    s = np.asarray(two_mode_squeezer(0.7))
    om = symplectic_form(2)
    np.testing.assert_allclose(s @ om @ s.T, om, atol=1e-10)


def test_gate_mode_validation():
    with pytest.raises(IndexError):
        two_mode_squeezer(1.0, (0, 0))
    with pytest.raises(IndexError):
        beam_splitter(0.3, (0, 5), n_modes=3)
    with pytest.raises(IndexError):
        twin_beam(0.3, (-1, 1), n_modes=2)


def test_gate_embedding_acts_on_target_modes_only():
    s = np.asarray(two_mode_squeezer(0.4, (0, 2), n_modes=3))
    np.testing.assert_array_equal(s[2:4, 2:4], np.eye(2))
    np.testing.assert_allclose(s[0, 0], np.exp(0.4))
    np.testing.assert_allclose(s[4, 4], np.exp(-0.4))


def test_beam_splitter_examples():
    np.testing.assert_allclose(np.asarray(beam_splitter(0.0)), np.diag([1.0, 1.0, -1.0, -1.0]), atol=0)
    b = np.asarray(beam_splitter(np.pi / 4))
    # transmittivity cos^2(theta) = 1/2
    np.testing.assert_allclose(b[0, 0] ** 2, 0.5)
    np.testing.assert_allclose(b @ b.T, np.eye(4), atol=1e-15)
    out = apply(beam_splitter(0.37), CovarianceMatrix.vacuum(2))
    np.testing.assert_allclose(out.data, np.eye(4), atol=1e-15)


def test_twin_beam_gives_two_mode_squeezed_state():
    g = tmss(0.5)
    np.testing.assert_allclose(g.data, two_mode_squeezed_cm(0.5).data, atol=1e-14)
    np.testing.assert_allclose(g.data[0, 0], 1.543081, atol=1e-6)
    np.testing.assert_allclose(abs(g.data[0, 2]), 1.175201, atol=1e-6)
    np.testing.assert_allclose(tmss(0.0).data, np.eye(4), atol=1e-15)


def test_symplectic_transform_checks_and_composes():
    with pytest.raises(NumericalError):
        SymplecticTransform(np.diag([2.0, 1.0]))
    a, b = twin_beam(0.2), beam_splitter(0.4)
    np.testing.assert_allclose(np.asarray(a @ b), np.asarray(a) @ np.asarray(b))
    assert abs(np.linalg.det(np.asarray(a @ b)) - 1.0) < 1e-8


def test_apply_examples():
    g = tmss(0.4)
    np.testing.assert_allclose(apply(SymplecticTransform(np.eye(4)), g).data, g.data)
    with pytest.raises(DimensionError):
        apply(twin_beam(0.3), CovarianceMatrix.vacuum(3))
    out = apply(random_symplectic(2, np.random.default_rng(0)), g)
    assert abs(np.linalg.det(out.data) - 1.0) < 1e-8


def test_symplectic_spectrum_examples():
    np.testing.assert_allclose(symplectic_spectrum(np.eye(6)), np.ones(3), atol=1e-12)
    np.testing.assert_allclose(symplectic_spectrum(tmss(1.3)), [1.0, 1.0], atol=1e-10)
    np.testing.assert_allclose(symplectic_spectrum(np.diag([3.0, 3.0])), [3.0], atol=1e-12)
    np.testing.assert_allclose(symplectic_spectrum(np.diag([1.0, 4.0, 9.0, 1.0])), [2.0, 3.0], atol=1e-12)


def test_partial_transpose_examples():
    g = tmss(0.5)
    np.testing.assert_array_equal(partial_transpose(partial_transpose(g, [1]), [1]).data, g.data)
    np.testing.assert_allclose(symplectic_spectrum(partial_transpose(g, [1])), [np.exp(-1), np.exp(1)], rtol=1e-12)
    np.testing.assert_allclose(symplectic_spectrum(partial_transpose(g, [1])), [0.3679, 2.7183], atol=1e-4)
    prod = direct_sum(np.diag([2.0, 2.0]), np.diag([3.0, 3.0]))
    np.testing.assert_allclose(symplectic_spectrum(partial_transpose(prod, [0])), symplectic_spectrum(prod))


def test_partial_transpose_rejects_bad_partitions():
    g = tmss(0.2)
    for bad in ([], [0, 1], [2], [0, 0]):
        with pytest.raises(PartitionError):
            partial_transpose(g, bad)


def test_is_physical_examples():
    ok, margin = is_physical(np.eye(4))
    assert ok and abs(margin) < 1e-12
    ok, margin = is_physical(np.diag([0.5, 0.5]))
    assert not ok
    np.testing.assert_allclose(margin, -0.5)


def test_purity_examples():
    assert purity(np.eye(2)) == 1.0
    np.testing.assert_allclose(purity(tmss(0.8)), 1.0, rtol=1e-10)
    np.testing.assert_allclose(purity(np.diag([2.0, 2.0])), 0.5)
    assert is_pure(tmss(0.8)) and not is_pure(np.diag([2.0, 2.0]))
    with pytest.raises(NumericalError):
        purity(np.diag([0.5, 0.5]))


def test_reduced_cm_examples():
    r = 0.35
    g = tmss(r)
    np.testing.assert_array_equal(reduced_cm(g, [0, 1]).data, g.data)
    np.testing.assert_allclose(reduced_cm(g, [1]).data, np.cosh(2 * r) * np.eye(2), atol=1e-14)
    with pytest.raises(IndexError):
        reduced_cm(g, [0, 0])
    with pytest.raises(IndexError):
        reduced_cm(g, [3])


def test_permute_modes_swaps_blocks():
    g = direct_sum(np.diag([2.0, 2.0]), np.diag([3.0, 3.0]))
    np.testing.assert_array_equal(permute_modes(g, [1, 0]).data, np.diag([3.0, 3.0, 2.0, 2.0]))
    with pytest.raises(IndexError):
        permute_modes(g, [0, 0])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_random_symplectic_is_symplectic(n, seed):
    s = np.asarray(random_symplectic(n, np.random.default_rng(seed)))
    om = symplectic_form(n)
    np.testing.assert_allclose(s @ om @ s.T, om, atol=1e-9 * max(1.0, np.max(np.abs(s)) ** 2))


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0.0, 2.0),
    st.lists(st.floats(-np.pi, np.pi), min_size=6, max_size=6),
    st.lists(st.floats(-0.8, 0.8), min_size=2, max_size=2),
)
def test_pt_spectrum_invariant_under_local_symplectics(r, angles, squeezes):
    g = tmss(r)
    loc = local_symplectic(
        [
            single_mode_symplectic(angles[0], squeezes[0], angles[1]),
            single_mode_symplectic(angles[2], squeezes[1], angles[3]),
        ]
    )
    moved = apply(loc, g)
    np.testing.assert_allclose(
        symplectic_spectrum(partial_transpose(moved, [1])),
        [np.exp(-2 * r), np.exp(2 * r)],
        rtol=1e-8,
    )


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 2.5), st.integers(0, 2**32 - 1), st.floats(1.0, 3.0))
def test_two_mode_closed_form_matches_diagonalisation(r, seed, thermal):
    # a thermal-ish mixed state scrambled by a random Gaussian unitary
    g = apply(random_symplectic(2, np.random.default_rng(seed)), direct_sum(thermal * np.eye(2), two_mode_squeezed_cm(r).data[:2, :2]))
    g = partial_transpose(g, [1])
    padded = direct_sum(g, np.eye(2))  # three modes: goes through the eigenvalue route
    general = np.sort(np.append(symplectic_spectrum(g), 1.0))
    np.testing.assert_allclose(general, symplectic_spectrum(padded), rtol=1e-8)
