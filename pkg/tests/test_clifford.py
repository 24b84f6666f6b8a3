from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistgeom.clifford import (absorb_gamma, euclid_lorentz_truth_table, euclidean_gammas,
                                gamma_suite, grading_product_sign, hodge_kappa, levi_civita_sign,
                                lorentz_gammas, real_structure_dim4, real_structure_residuals,
                                rho_adjoint_matrix, spin_rep)
from twistgeom.errors import IdentityViolation


def _inversions(p):
    return sum(p[i] > p[j] for i in range(len(p)) for j in range(i + 1, len(p)))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_clifford_relations_hold_independently(m):
    rep = euclidean_gammas(m)
    g = rep.gammas
    assert len(g) == 2 * m and g[0].shape == (2 ** m, 2 ** m)
    for a, b in itertools.product(range(2 * m), repeat=2):
        np.testing.assert_allclose(g[a] @ g[b] + g[b] @ g[a], 2 * (a == b) * np.eye(2 ** m), atol=1e-14)
    np.testing.assert_allclose(rep.grading, np.diag([1] * 2 ** (m - 1) + [-1] * 2 ** (m - 1)))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_gamma_suite_below_tolerance(m):
    assert max(gamma_suite(euclidean_gammas(m)).values()) <= 1e-12


def test_m_zero_rejected():
    with pytest.raises(ValueError):
        euclidean_gammas(0)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_product_sign_is_minus_one(m):
    assert grading_product_sign(euclidean_gammas(m)) == -1


@given(st.permutations(list(range(5))))
def test_levi_civita_matches_inversion_parity(p):
    assert levi_civita_sign(p) == (-1) ** _inversions(p)


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4).filter(lambda x: len(set(x)) < 4))
def test_levi_civita_vanishes_on_repeats(idx):
    assert levi_civita_sign(idx) == 0


def test_levi_civita_range_check():
    with pytest.raises(ValueError):
        levi_civita_sign([0, 4, 1, 2])


@pytest.mark.parametrize("m,kappa", [(1, 1), (2, -1j), (3, -1)])
def test_hodge_kappa_pinned(m, kappa):
    assert abs(hodge_kappa(euclidean_gammas(m)) - kappa) < 1e-14


@pytest.mark.parametrize("m", [1, 2])
def test_absorption_every_index(m):
    rep = euclidean_gammas(m)
    for a in range(rep.n):
        lhs, rhs = absorb_gamma(rep, a)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12
    with pytest.raises(ValueError):
        absorb_gamma(rep, rep.n)


def test_real_structure_ko_dimension_four(rep):
    J = real_structure_dim4(rep)
    assert J.ko_signs == (-1, 1, 1)
    assert max(real_structure_residuals(rep, J).values()) <= 1e-12
    U = J.matrix
    # J^2 = -1 as an antilinear map
    psi = np.array([1 + 2j, -0.5j, 0.3, 2.0])
    assert np.allclose(J.apply(J.apply(psi)), -psi)
    assert np.allclose(U @ U.conj(), -np.eye(4))


def test_real_structure_wrong_sign_is_detected(rep):
    J = real_structure_dim4(rep)
    bad = type(J)(J.matrix, (1, 1, 1))
    assert real_structure_residuals(rep, bad)["J_square"] > 1


def test_truth_table_pattern():
    table = euclid_lorentz_truth_table(lorentz_gammas())
    expected = np.array([[a == 0 or (b != 0 and b != a) for b in range(4)] for a in range(4)])
    assert np.array_equal(table, expected)
    # only gamma^0 maps every lorentzian gamma to its rho-adjoint
    assert [bool(table[a].all()) for a in range(4)] == [True, False, False, False]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1.5, 1.5), min_size=6, max_size=6))
def test_spin_rep_is_rho_unitary_and_block_diagonal(params):
    L = lorentz_gammas()
    t = np.zeros((4, 4))
    t[np.triu_indices(4, 1)] = params
    t = t - t.T
    S = spin_rep(L, t)
    assert np.max(np.abs(rho_adjoint_matrix(L.base, S) @ S - np.eye(4))) <= 1e-11 * max(1, np.abs(S).max() ** 2)
    assert np.max(np.abs(S[:2, 2:])) <= 1e-12 and np.max(np.abs(S[2:, :2])) <= 1e-12


def test_spin_rep_rejects_bad_shape():
    with pytest.raises(ValueError):
        spin_rep(lorentz_gammas(), np.zeros(6))


def test_identity_violation_message():
    err = IdentityViolation("thing", 2e-3, 1e-12)
    assert "2.000e-03" in str(err) and err.tol == 1e-12
    assert math.isclose(err.max_dev, 2e-3)
