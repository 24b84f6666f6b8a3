"""Exterior calculus on a 4-torus: d^2 = 0, ** sign, and the adjoint pairing of d and delta."""

from __future__ import annotations

import math

import numpy as np

from twistgeom.geometry import (DifferentialForm, TorusGrid, codifferential, exterior_derivative, form_inner,
                                hodge_dual, index_tuples, parse_field_expr, random_band_limited)

grid = TorusGrid(4, 8, 2 * math.pi)
rng = np.random.default_rng(0)


def random_form(k):
    return DifferentialForm(grid, k, np.real(random_band_limited(grid, rng, len(index_tuples(4, k)))))


a, b = random_form(1), random_form(2)
print("|d d a|          =", exterior_derivative(exterior_derivative(a)).max_abs())
print("|** b - b|       =", (hodge_dual(hodge_dual(b)) - b).max_abs())
print("<da,b> - <a,db>  =", abs(form_inner(exterior_derivative(a), b) - form_inner(a, codifferential(b))))

expr = parse_field_expr("exp(-x2/3) * ln(2 + cos(x3))")
print("parsed:", expr.pretty(), "at (0,0,1,0):", expr.at([0, 0, 1, 0]))
