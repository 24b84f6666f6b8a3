from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistgeom.geometry import TorusGrid, flat_frame, hodge_dual, one_form, random_band_limited, vielbein_from_metric
from twistgeom.torsion import (LIFT_ONEFORM_FACTOR, ConnectionField, christoffel, classify_contorsion,
                               contorsion, contorsion_from_flat, covariant_gamma_residual,
                               lift_from_oneform, oneform_from_torsion, random_contorsion, spin_dirac,
                               spin_lift, torsion_from_oneform, torsion_tensor)
from twistgeom.twist import dirac_with_torsion, operator_deviation, random_spinors

SMALL = TorusGrid(4, 4, 2 * math.pi)


def _warped(grid, amp=0.3):
    g = np.zeros((4, 4) + grid.shape)
    for mu in range(4):
        g[mu, mu] = 1.0
    g[0, 0] = (1 + amp * np.sin(grid.coord(1))) ** 2
    return g


def test_christoffel_of_warped_metric_oracle():
    grid = TorusGrid(4, 16, 2 * math.pi)
    x1 = grid.coord(1)
    a = 1 + 0.3 * np.sin(x1)
    da = 0.3 * np.cos(x1)
    G = christoffel(grid, _warped(grid)).symbols
    np.testing.assert_allclose(G[0, 0, 1], np.broadcast_to(da / a, grid.shape), atol=1e-12)
    np.testing.assert_allclose(G[0, 1, 0], np.broadcast_to(da / a, grid.shape), atol=1e-12)
    np.testing.assert_allclose(G[1, 0, 0], np.broadcast_to(-a * da, grid.shape), atol=1e-12)
    mask = np.ones((4, 4, 4), bool)
    mask[0, 0, 1] = mask[0, 1, 0] = mask[1, 0, 0] = False
    assert np.max(np.abs(G[mask])) <= 1e-12
    assert np.max(np.abs(torsion_tensor(ConnectionField(grid, G)))) <= 1e-14


@pytest.mark.parametrize("kind,expect", [
    ("threeform", (True, True, True)),
    ("orthogonal", (True, False, False)),
    ("geodesic", (False, True, False)),
    ("symmetric", (False, False, False)),
    ("generic", (False, False, False)),
])
def test_classification_by_construction(kind, expect, rng):
    c = classify_contorsion(random_contorsion(SMALL, rng, kind))
    assert (c.orthogonal, c.geodesic_preserving, c.totally_antisymmetric) == expect
    assert c.consistent()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31), st.sampled_from(["generic", "threeform", "orthogonal", "geodesic", "symmetric"]),
       st.sampled_from([0.0, 1e-14, 1e-10]))
def test_classification_equivalence_under_perturbation(seed, kind, eps):
    rng = np.random.default_rng(seed)
    K = random_contorsion(SMALL, rng, kind)
    Kf = K.K_flat + eps * rng.normal(size=K.K_flat.shape)
    assert classify_contorsion(contorsion_from_flat(SMALL, Kf)).consistent()


def test_tiny_perturbation_keeps_antisymmetry_flag(rng):
    K = random_contorsion(SMALL, rng, "threeform")
    assert classify_contorsion(contorsion_from_flat(SMALL, K.K_flat + 1e-14)).totally_antisymmetric
    assert not classify_contorsion(contorsion_from_flat(SMALL, K.K_flat + 1e-10)).totally_antisymmetric


def test_unknown_kind(rng):
    with pytest.raises(ValueError):
        random_contorsion(SMALL, rng, "twisted")


def test_contorsion_index_lowering(rng):
    g = vielbein_from_metric(SMALL, np.diag([2.0, 1.0, 3.0, 1.0])).metric
    K = contorsion_from_flat(SMALL, rng.normal(size=(4, 4, 4, 1, 1, 1, 1)), g)
    assert K.consistency() <= 1e-14
    assert np.allclose(K.K[2], K.K_flat[2] / 3)


def test_lift_is_covariant_for_threeform(rep, grid8, rng):
    K = random_contorsion(grid8, rng, "threeform")
    conn = ConnectionField(grid8, K.K)
    assert covariant_gamma_residual(spin_lift(K, rep), conn, rep, flat_frame(grid8)) <= 1e-12


def test_lift_of_threeform_has_closed_form(rep, rng):
    K = random_contorsion(SMALL, rng, "threeform")
    om = spin_lift(K, rep).omega
    g = rep.gammas
    for mu in range(4):
        ref = sum(-0.25 * K.K_flat[nu, lam, mu, 0, 0, 0, 0] * g[nu] @ g[lam]
                  for nu in range(4) for lam in range(4))
        assert np.max(np.abs(om[mu][..., 0, 0, 0, 0] - ref)) <= 1e-13


def test_lift_rejects_non_orthogonal(rep, rng):
    with pytest.raises(ValueError):
        spin_lift(random_contorsion(SMALL, rng, "symmetric"), rep)


def test_levi_civita_lift_on_curved_metric(rep):
    # the vielbein is not band limited; 16 points per axis resolve it
    grid = TorusGrid(4, 16, 2 * math.pi)
    g = _warped(grid, 0.05)
    fr = vielbein_from_metric(grid, g)
    lc = christoffel(grid, g)
    res = covariant_gamma_residual(spin_lift(contorsion(lc, g), rep, fr), lc, rep, fr)
    assert res <= 1e-10


def test_oneform_round_trip_sign(grid8, rng):
    w = np.real(random_band_limited(grid8, rng, 4, max_mode=2))
    K = torsion_from_oneform(one_form(grid8, w))
    assert classify_contorsion(K).totally_antisymmetric
    assert np.max(np.abs(oneform_from_torsion(K).components - w)) <= 1e-12


def test_oneform_torsion_oracle(grid8):
    # omega = dx^0 gives K_flat = -*dx^0; in this normalisation that is K_123 = -1/6
    K = torsion_from_oneform(one_form(grid8, [1.0, 0, 0, 0]))
    assert abs(K.K_flat[1, 2, 3].item() + 1 / 6) < 1e-15
    assert abs(K.K_flat[2, 1, 3].item() - 1 / 6) < 1e-15


def test_lifted_dirac_matches_twisted_operator(rep, grid8, rng):
    w = np.real(random_band_limited(grid8, rng, 4, max_mode=2))
    K = torsion_from_oneform(one_form(grid8, w))
    mstar = -hodge_dual(K.as_threeform()).components.real
    fields = random_spinors(grid8, 4, 3, rng)
    lifted = lift_from_oneform(w, rep, grid8)
    assert operator_deviation(lifted, dirac_with_torsion(LIFT_ONEFORM_FACTOR * mstar, rep, grid8), fields) <= 1e-10
    # -*K_flat is -omega, so the lift is the twisted operator at -omega/4
    assert operator_deviation(lifted, dirac_with_torsion(-w / 4, rep, grid8), fields) <= 1e-10
    assert operator_deviation(lifted, dirac_with_torsion(-w, rep, grid8), fields) > 1e-2


def test_spin_dirac_of_zero_is_free(rep, grid8, rng):
    K = contorsion_from_flat(grid8, np.zeros((4, 4, 4) + grid8.const_shape))
    D = spin_dirac(spin_lift(K, rep), rep)
    psi = random_spinors(grid8, 4, 1, rng)[0]
    assert np.max(np.abs(D.order_part(0).apply(psi))) <= 1e-14


def test_oneform_torsion_needs_dimension_four():
    g2 = TorusGrid(2, 4, 1.0)
    with pytest.raises(ValueError):
        torsion_from_oneform(one_form(g2, [1.0, 0.0]))
    with pytest.raises(TypeError):
        torsion_from_oneform(np.zeros(4))
