"""Vielbeins built from metric fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IdentityViolation
from .grid import TorusGrid

FRAME_TOL = 1e-12


def _to_last(a: np.ndarray) -> np.ndarray:
    """Move the two leading matrix axes to the end."""
    return np.moveaxis(np.moveaxis(a, 0, -1), 0, -1)


def _to_first(a: np.ndarray) -> np.ndarray:
    return np.moveaxis(np.moveaxis(a, -1, 0), -1, 0)


@dataclass(frozen=True)
class Vielbein:
    """Frame fields ``e[a, mu]`` = e^a_mu, ``inverse[mu, a]`` = e^mu_a, ``metric[mu, nu]``.

    Arrays have trailing grid axes (size 1 when constant).
    """

    grid: TorusGrid
    e: np.ndarray
    inverse: np.ndarray
    metric: np.ndarray

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def inverse_metric(self) -> np.ndarray:
        return _to_first(np.linalg.inv(_to_last(self.metric)))

    @property
    def sqrt_det(self) -> np.ndarray:
        return np.sqrt(np.abs(np.linalg.det(_to_last(self.metric))))

    @property
    def is_flat_identity(self) -> bool:
        return self.metric.shape[2:] == self.grid.const_shape and np.array_equal(self.metric[(slice(None), slice(None)) + (0,) * self.n], np.eye(self.n))

    def residuals(self) -> dict[str, float]:
        n = self.n
        dual = np.einsum("am...,mb...->ab...", self.e, self.inverse)
        eye = np.eye(n).reshape((n, n) + (1,) * n)
        recon = np.einsum("am...,an...->mn...", self.e, self.e)
        return {"duality": float(np.max(np.abs(dual - eye))),
                "metric": float(np.max(np.abs(recon - self.metric)))}


def flat_frame(grid: TorusGrid) -> Vielbein:
    eye = np.eye(grid.n).reshape((grid.n, grid.n) + grid.const_shape)
    return Vielbein(grid, eye.copy(), eye.copy(), eye.copy())


def vielbein_from_metric(grid: TorusGrid, g) -> Vielbein:
    """Cholesky vielbein: g = L L^T and e^a_mu = L[mu, a]."""
    g = np.asarray(g, dtype=float)
    n = grid.n
    if g.shape == (n, n):
        g = g.reshape((n, n) + grid.const_shape)
    if g.shape[:2] != (n, n):
        raise ValueError("metric must have leading shape (n, n)")
    gl = _to_last(g)
    if np.max(np.abs(gl - np.swapaxes(gl, -1, -2))) > FRAME_TOL * max(1.0, np.max(np.abs(gl))):
        raise ValueError("metric is not symmetric")
    eig = np.linalg.eigvalsh(gl)
    if np.any(eig[..., 0] <= 0):
        bad = np.unravel_index(np.argmin(eig[..., 0]), eig.shape[:-1])
        raise ValueError(f"metric not positive definite at grid point {tuple(int(i) for i in bad)}")
    L = np.linalg.cholesky(gl)
    e = _to_first(np.swapaxes(L, -1, -2))
    inv = _to_first(np.linalg.inv(np.swapaxes(L, -1, -2)))
    frame = Vielbein(grid, e, inv, g)
    worst = max(frame.residuals().values())
    if worst > FRAME_TOL * max(1.0, float(np.max(np.abs(g)))):
        raise IdentityViolation("vielbein reconstruction", worst, FRAME_TOL)
    return frame
