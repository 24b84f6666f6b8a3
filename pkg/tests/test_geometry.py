from __future__ import annotations

import csv
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from twistgeom.errors import EvaluationError, ExpressionError
from twistgeom.geometry import (DifferentialForm, TorusGrid, codifferential, derivative, export_csv,
                                exterior_derivative, flat_frame, form_inner, hodge_dual, index_tuples,
                                integrate, one_form, parse_field_expr, random_band_limited,
                                vielbein_from_metric, volume_form, zero_form)


def _form(grid, k, rng, max_mode=2):
    comps = np.real(random_band_limited(grid, rng, len(index_tuples(grid.n, k)), max_mode=max_mode))
    return DifferentialForm(grid, k, comps)


# ------------------------------------------------------------------ grid

def test_grid_geometry():
    g = TorusGrid(4, 8, 2 * math.pi)
    assert g.shape == (8,) * 4
    assert math.isclose(g.volume, (2 * math.pi) ** 4)
    assert math.isclose(g.cell_volume * g.npoints, g.volume)


@pytest.mark.parametrize("mode,tol", [("spectral", 1e-12), ("fd2", 0.2)])
def test_derivative_of_trig(mode, tol):
    g = TorusGrid(2, 16, 2 * math.pi, mode)
    x, y = g.coord(0), g.coord(1)
    f = np.sin(2 * x) * np.cos(y)
    assert np.max(np.abs(derivative(f, 0, g) - 2 * np.cos(2 * x) * np.cos(y))) <= tol


def test_fd2_is_second_order():
    errs = []
    for N in (32, 64):
        g = TorusGrid(1, N, 2 * math.pi, "fd2")
        x = g.coord(0)
        errs.append(np.max(np.abs(derivative(np.sin(x), 0, g) - np.cos(x))))
    assert abs(math.log2(errs[0] / errs[1]) - 2) < 0.02


def test_integral_of_constant_is_volume():
    g = TorusGrid(4, 4, 3.0)
    assert abs(integrate((g, np.ones(g.shape))) - 81.0) < 1e-12


def test_band_limited_fields_are_resolved(rng):
    g = TorusGrid(4, 8, 2 * math.pi)
    f = random_band_limited(g, rng, 2, max_mode=2)
    assert f.shape == (2,) + g.shape
    assert np.max(np.abs(np.fft.fftn(f[0])[4])) < 1e-10  # Nyquist plane empty


# ----------------------------------------------------------------- forms

@pytest.mark.parametrize("k", [0, 1, 2])
def test_d_squared_zero(k, grid8, rng):
    w = _form(grid8, k, rng)
    assert exterior_derivative(exterior_derivative(w)).max_abs() <= 1e-10


@pytest.mark.parametrize("k", range(5))
def test_star_star_sign(k, rng):
    g = TorusGrid(4, 4, 2 * math.pi)
    w = _form(g, k, rng, max_mode=1)
    diff = hodge_dual(hodge_dual(w)) - w * (-1) ** (k * (4 - k))
    assert diff.max_abs() <= 1e-12


@pytest.mark.parametrize("k", [1, 2, 3])
def test_codifferential_is_adjoint_of_d(k, grid8, rng):
    a = _form(grid8, k - 1, rng)
    b = _form(grid8, k, rng)
    lhs = form_inner(exterior_derivative(a), b)
    rhs = form_inner(a, codifferential(b))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
    assert abs(lhs) > 1e-3


def test_d_of_coordinate_function_matches_oracle(grid8):
    x1 = grid8.coord(1)
    # broadcast input: constant along axes 0, 2 and 3
    df = exterior_derivative(zero_form(grid8, np.sin(x1)))
    np.testing.assert_allclose(df.component((1,)), np.cos(x1) * np.ones(grid8.shape), atol=1e-12)
    assert np.max(np.abs(df.component((0,)))) <= 1e-12


def test_volume_form_star_of_one(grid8):
    vol = volume_form(grid8)
    star1 = hodge_dual(zero_form(grid8, np.ones(grid8.shape)))
    assert (star1 - vol).max_abs() <= 1e-14


def test_one_form_component_sign_under_reordering(grid8):
    w = _form(TorusGrid(4, 4, 2 * math.pi), 2, np.random.default_rng(1), max_mode=1)
    assert np.allclose(w.component((1, 0)), -w.component((0, 1)))
    assert np.allclose(w.component((1, 1)), 0)


def test_form_degree_validation(grid8):
    with pytest.raises(ValueError):
        DifferentialForm(grid8, 1, np.zeros((3,) + grid8.shape))


# ----------------------------------------------------------- expressions

def test_parser_oracle_values():
    e = parse_field_expr("sin(x0)*cos(x1) + 2^-1")
    assert abs(e.at([0.3, 1.1, 0, 0]) - (math.sin(0.3) * math.cos(1.1) + 0.5)) < 1e-15
    assert parse_field_expr("-2^2").at([0]) == -4
    assert parse_field_expr("2^3^2").at([0]) == 512
    assert parse_field_expr("i*i + pi").at([0]) == pytest.approx(math.pi - 1)
    assert parse_field_expr("1.5e-3j").at([0]) == 1.5e-3j


@pytest.mark.parametrize("src,col", [("sin(x0", 4), ("x0 +* 2", 5), ("foo(x1)", 1),
                                     ("x0.real", 1), ("y + 1", 1), ("1 + __import__('os')", 5)])
def test_parser_errors_carry_position(src, col):
    with pytest.raises(ExpressionError) as exc:
        parse_field_expr(src)
    assert exc.value.line == 1 and exc.value.column == col


def test_division_by_zero_is_lazy():
    e = parse_field_expr("1/(2-2)")
    with pytest.raises(EvaluationError):
        e.at([0.0])


def test_non_finite_grid_values_rejected(grid8):
    with pytest.raises(EvaluationError):
        parse_field_expr("ln(abs(sin(x0)))").on_grid(grid8)


def test_missing_coordinate():
    with pytest.raises(EvaluationError):
        parse_field_expr("x3").at([0.0, 1.0])


_atoms = st.sampled_from(["x0", "x1", "x2", "pi", "i", "2", "0.5", "3e-1"])


@st.composite
def _expressions(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(_atoms)
    kind = draw(st.sampled_from(["bin", "call", "neg", "pow"]))
    if kind == "bin":
        op = draw(st.sampled_from(["+", "-", "*"]))
        return f"({draw(_expressions(depth - 1))}) {op} {draw(_expressions(depth - 1))}"
    if kind == "call":
        fn = draw(st.sampled_from(["sin", "cos", "exp", "abs"]))
        return f"{fn}({draw(_expressions(depth - 1))})"
    if kind == "pow":
        return f"({draw(_expressions(depth - 1))})^2"
    return f"-{draw(_expressions(depth - 1))}"


@settings(max_examples=60, deadline=None)
@given(_expressions())
def test_pretty_print_round_trip(src):
    e = parse_field_expr(src)
    e2 = parse_field_expr(e.pretty())
    pts = np.random.default_rng(0).uniform(0, 2 * math.pi, size=(100, 3))
    for p in pts:
        a, b = e.at(p), e2.at(p)
        assume(np.isfinite(a))
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


# ---------------------------------------------------------------- frames

def test_vielbein_reconstructs_metric(grid8):
    g = np.zeros((4, 4) + grid8.shape)
    for mu in range(4):
        g[mu, mu] = 1.0
    g[0, 0] = (1 + 0.3 * np.sin(grid8.coord(1))) ** 2
    g[1, 2] = g[2, 1] = 0.2 * np.cos(grid8.coord(0))
    fr = vielbein_from_metric(grid8, g)
    assert max(fr.residuals().values()) <= 1e-12
    assert not fr.is_flat_identity
    assert flat_frame(grid8).is_flat_identity


def test_vielbein_rejects_asymmetric(grid8):
    g = np.eye(4)
    g[0, 1] = 0.5
    with pytest.raises(ValueError):
        vielbein_from_metric(grid8, g)


def test_star_on_curved_diagonal_metric():
    # conformally flat in 2d: star of a 1-form is metric independent
    g2 = TorusGrid(2, 8, 2 * math.pi)
    s = 1.5 ** 2
    fr = vielbein_from_metric(g2, np.diag([s, s]))
    w = one_form(g2, np.array([np.ones(g2.shape), np.zeros(g2.shape)]))
    assert (hodge_dual(w, fr) - hodge_dual(w)).max_abs() <= 1e-12


def test_export_csv(tmp_path):
    g = TorusGrid(2, 4, 1.0)
    path = export_csv(tmp_path / "f.csv", g, {"f": np.arange(16.0).reshape(4, 4)})
    rows = list(csv.reader(open(path)))
    assert len(rows) == 17
    assert rows[0] == ["index", "x0", "x1", "f_re", "f_im"]
    assert float(rows[6][3]) == 5.0
