"""Heat coefficients for constant torsion against a fit of the Fourier heat trace."""

from __future__ import annotations

import math

import numpy as np

from twistgeom.action import fourier_spectral_action, heat_coefficients
from twistgeom.clifford import euclidean_gammas
from twistgeom.geometry import TorusGrid

rep = euclidean_gammas(2)
f = [1.0, 0.0, 0.0, 0.0]
hc = heat_coefficients(f, TorusGrid(4, 4, 2 * math.pi), rep, a4=True)
print(f"heat: a0 = {hc.a0.real:.4f}, a2 = {hc.a2.real:.4f}, flat a4 = {hc.a4.real:.4f}")

fs = fourier_spectral_action(f, np.linspace(4, 8, 6), 24, rep)
print(f"fit:  a0 = {fs.a0_fit:.4f}, a2 = {fs.a2_fit:.4f}  (condition {fs.condition_number:.3g}, "
      f"{fs.modes} modes)")
