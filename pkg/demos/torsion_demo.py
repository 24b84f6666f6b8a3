"""Classify random contorsions and lift a torsion 3-form to spinors."""

from __future__ import annotations

import math

import numpy as np

from twistgeom.clifford import euclidean_gammas
from twistgeom.geometry import TorusGrid, flat_frame, one_form
from twistgeom.torsion import (ConnectionField, classify_contorsion, covariant_gamma_residual,
                               oneform_from_torsion, random_contorsion, spin_lift, torsion_from_oneform)

rng = np.random.default_rng(1)
grid = TorusGrid(4, 4, 2 * math.pi)
for kind in ("generic", "orthogonal", "geodesic", "threeform"):
    c = classify_contorsion(random_contorsion(grid, rng, kind))
    print(f"{kind:<10} orthogonal={c.orthogonal!s:<5} geodesic={c.geodesic_preserving!s:<5} "
          f"antisymmetric={c.totally_antisymmetric}")

rep = euclidean_gammas(2)
K = random_contorsion(grid, rng, "threeform")
res = covariant_gamma_residual(spin_lift(K, rep), ConnectionField(grid, K.K), rep, flat_frame(grid))
print("spin lift covariance residual:", res)

w = one_form(grid, [0.3, -1.0, 0.0, 2.0])
print("star K_flat returns the 1-form:", oneform_from_torsion(torsion_from_oneform(w)).components[:, 0, 0, 0, 0].real)
