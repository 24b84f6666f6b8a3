"""Fermionic action: closed forms, antisymmetry and the change of signature."""

from __future__ import annotations

import math

import numpy as np

from twistgeom.action import (FermionicConfig, compare_closed_form, eigen_projection, signature_classify,
                              symmetry_ratio)
from twistgeom.clifford import euclidean_gammas, real_structure_dim4
from twistgeom.geometry import TorusGrid, random_band_limited

rep = euclidean_gammas(2)
J = real_structure_dim4(rep)
grid = TorusGrid(4, 8, 2 * math.pi)
rng = np.random.default_rng(2)
f = np.real(random_band_limited(grid, rng, 4, max_mode=1))

for a in range(4):
    xi, zeta = (random_band_limited(grid, rng, 2, max_mode=1) for _ in range(2))
    c = compare_closed_form(a, f, xi, zeta, rep, grid, J)
    sig = signature_classify([a], [1, 0.5, -0.3, 0.7], grid, rng).signature
    print(f"R = gamma^{a}: closed form relative dev {c.relative_deviation:.1e}, signature {sig}")

cfg = FermionicConfig.build([0, 1, 2], f, rep, grid, J)
p, q = (eigen_projection(cfg.R, random_band_limited(grid, rng, 4, max_mode=1)) for _ in range(2))
print("A(p, q) / A(q, p) for R = gamma^0 gamma^1 gamma^2:", np.round(symmetry_ratio(p, q, cfg), 12))
