"""Affine connections, contorsion, torsion tensors and their lift to spinors.

Index conventions (coordinate basis):

* ``Gamma[lam, mu, nu]`` = Gamma^lam_{mu nu} with nabla_mu d_nu = Gamma^lam_{mu nu} d_lam;
* ``K[lam, mu, nu]`` = K^lam_{mu nu}, the difference with the Levi-Civita symbols;
* ``K_flat[lam, mu, nu]`` = g_{lam rho} K^rho_{mu nu}.

All arrays carry trailing grid axes (size 1 when constant).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .clifford import GammaRep
from .geometry.forms import DifferentialForm, hodge_dual, index_tuples, local_gammas, one_form
from .geometry.frame import Vielbein, flat_frame
from .geometry.grid import TorusGrid, derivative
from .twist.operator import SpinorOperator

CLASSIFY_TOL = 1e-12

# Measured: spin_dirac(spin_lift(K)) equals the twisted operator -i gamma^mu d_mu
# - i w_mu gamma^mu Gamma with w = LIFT_ONEFORM_FACTOR * (-*K_flat) in dimension 4.
LIFT_ONEFORM_FACTOR = 0.25


def _metric_of(grid: TorusGrid, metric) -> np.ndarray:
    if metric is None:
        return flat_frame(grid).metric
    if isinstance(metric, Vielbein):
        return metric.metric
    g = np.asarray(metric, dtype=float)
    if g.shape == (grid.n, grid.n):
        g = g.reshape(g.shape + grid.const_shape)
    return g


def _inverse(g: np.ndarray) -> np.ndarray:
    moved = np.moveaxis(np.moveaxis(g, 0, -1), 0, -1)
    det = np.linalg.det(moved)
    if np.min(np.abs(det)) < 1e-14:
        raise ValueError("metric is singular")
    inv = np.linalg.inv(moved)
    return np.moveaxis(np.moveaxis(inv, -1, 0), -1, 0)


@dataclass(frozen=True)
class ConnectionField:
    grid: TorusGrid
    symbols: np.ndarray  # Gamma^lam_{mu nu}

    def __post_init__(self):
        s = np.asarray(self.symbols, dtype=float)
        n = self.grid.n
        if s.shape[:3] != (n, n, n):
            raise ValueError("connection symbols must have leading shape (n, n, n)")
        if not np.all(np.isfinite(s)):
            raise ValueError("connection symbols must be finite")
        object.__setattr__(self, "symbols", s)


@dataclass(frozen=True)
class Contorsion:
    grid: TorusGrid
    K: np.ndarray        # K^lam_{mu nu}
    K_flat: np.ndarray   # K_{lam mu nu}
    metric: np.ndarray

    def consistency(self) -> float:
        """max |K_{lam mu nu} - g_{lam rho} K^rho_{mu nu}|."""
        lowered = np.einsum("lr...,rmn...->lmn...", self.metric, self.K)
        return float(np.max(np.abs(lowered - self.K_flat)))

    def as_threeform(self) -> DifferentialForm:
        """K_flat read as the coefficients of a 3-form (meaningful when totally antisymmetric)."""
        comps = [self.K_flat[I] for I in index_tuples(self.grid.n, 3)]
        shape = np.broadcast_shapes(*(c.shape for c in comps))
        return DifferentialForm(self.grid, 3, np.array([np.broadcast_to(c, shape) for c in comps]))


@dataclass(frozen=True)
class SpinConnection:
    grid: TorusGrid
    omega: np.ndarray  # omega_mu, shape (n, d, d, *grid)


def christoffel(grid: TorusGrid, metric=None, mode: str | None = None) -> ConnectionField:
    """Levi-Civita symbols 1/2 g^{lam rho}(d_mu g_{rho nu} + d_nu g_{rho mu} - d_rho g_{mu nu})."""
    g = _metric_of(grid, metric)
    ginv = _inverse(g)
    n = grid.n
    dg = np.array([np.real(derivative(g, mu, grid, mode)) for mu in range(n)])  # dg[s, mu, nu]
    lower = 0.5 * (np.einsum("mrn...->rmn...", dg) + np.einsum("nrm...->rmn...", dg) - dg)
    return ConnectionField(grid, np.einsum("lr...,rmn...->lmn...", ginv, lower))


def contorsion(conn: ConnectionField, metric=None, mode: str | None = None) -> Contorsion:
    g = _metric_of(conn.grid, metric)
    K = conn.symbols - christoffel(conn.grid, g, mode).symbols
    return Contorsion(conn.grid, K, np.einsum("lr...,rmn...->lmn...", g, K), g)


def contorsion_from_flat(grid: TorusGrid, K_flat, metric=None) -> Contorsion:
    g = _metric_of(grid, metric)
    K_flat = np.asarray(K_flat, dtype=float)
    return Contorsion(grid, np.einsum("lr...,rmn...->lmn...", _inverse(g), K_flat), K_flat, g)


def torsion_tensor(conn: ConnectionField) -> np.ndarray:
    """T^lam_{mu nu} = Gamma^lam_{mu nu} - Gamma^lam_{nu mu}."""
    return conn.symbols - np.swapaxes(conn.symbols, 1, 2)


@dataclass(frozen=True)
class ContorsionClass:
    orthogonal: bool
    geodesic_preserving: bool
    totally_antisymmetric: bool
    deviations: dict

    def consistent(self) -> bool:
        return (self.orthogonal and self.geodesic_preserving) == self.totally_antisymmetric


def classify_contorsion(K: Contorsion, tol: float = CLASSIFY_TOL) -> ContorsionClass:
    """Flags from pair antisymmetries of K_flat (slots 1-3) and K (slots 2-3).

    Tolerances scale with max(1, |K|). Total antisymmetry means every pair swap
    of K_flat is within tolerance.
    """
    Kf, Ku = K.K_flat, K.K
    scale = max(1.0, float(np.max(np.abs(Kf))), float(np.max(np.abs(Ku))))
    dev = {
        "skew_13": float(np.max(np.abs(Kf + np.einsum("lmn...->nml...", Kf)))),
        "skew_23_upper": float(np.max(np.abs(Ku + np.swapaxes(Ku, 1, 2)))),
        "skew_12": float(np.max(np.abs(Kf + np.swapaxes(Kf, 0, 1)))),
        "skew_23": float(np.max(np.abs(Kf + np.swapaxes(Kf, 1, 2)))),
    }
    t = tol * scale
    orth = dev["skew_13"] <= t
    geo = dev["skew_23_upper"] <= t
    total = dev["skew_12"] <= t and dev["skew_13"] <= t and dev["skew_23"] <= t
    return ContorsionClass(orth, geo, total, dev)


def spin_lift(obj, rep: GammaRep, frame: Vielbein | None = None, mode: str | None = None,
              tol: float = CLASSIFY_TOL) -> SpinConnection:
    """omega_mu = 1/4 (Gamma^rho_{mu nu} g_{rho lam} - g_ab e^b_lam d_mu e^a_nu) gamma^lam gamma^nu.

    The gamma order is the one making the lift covariant,
    [d_mu + omega_mu, gamma^nu] = -Gamma^nu_{mu lam} gamma^lam
    (see :func:`covariant_gamma_residual`). For a totally antisymmetric K on the
    flat metric this is omega_mu = -1/4 K_{nu lam mu} gamma^nu gamma^lam.

    Accepts a Contorsion (added to the Levi-Civita symbols of ``frame``) or a
    ConnectionField; the connection must be orthogonal.
    """
    grid = obj.grid
    frame = frame or flat_frame(grid)
    g = frame.metric
    levi = christoffel(grid, g, mode).symbols
    if isinstance(obj, Contorsion):
        conn = ConnectionField(grid, levi + obj.K)
        K = obj
    else:
        conn = obj
        K = contorsion(conn, g, mode)
    flags = classify_contorsion(K, tol)
    if not flags.orthogonal:
        raise ValueError(f"connection is not orthogonal (deviation {flags.deviations['skew_13']:.3e})")
    n = grid.n
    coeff = np.einsum("rmn...,rl...->mnl...", conn.symbols, g)
    de = np.array([np.real(derivative(frame.e, mu, grid, mode)) for mu in range(n)])  # [mu, a, nu]
    coeff = coeff - np.einsum("al...,man...->mnl...", frame.e, de)
    gam = local_gammas(rep, frame)
    pair = np.einsum("nij...,ljk...->nlik...", gam, gam)
    omega = 0.25 * np.einsum("mnl...,lnik...->mik...", coeff, pair)
    return SpinConnection(grid, omega)


def spin_dirac(conn: SpinConnection, rep: GammaRep, frame: Vielbein | None = None) -> SpinorOperator:
    """-i gamma^mu (d_mu + omega_mu)."""
    grid = conn.grid
    gam = local_gammas(rep, frame)
    terms = [(-1j * gam[mu], (mu,)) for mu in range(grid.n)]
    bounded = -1j * np.einsum("mij...,mjk...->ik...", gam, conn.omega)
    terms.append((bounded, ()))
    return SpinorOperator(grid, rep.dim, tuple(terms)).canonical()


def contorsion_from_threeform(form: DifferentialForm, frame: Vielbein | None = None) -> Contorsion:
    """Totally antisymmetric K_flat whose entries are the 3-form coefficients."""
    if form.degree != 3:
        raise ValueError("expected a 3-form")
    grid = form.grid
    n = grid.n
    Kf = np.zeros((n, n, n) + form.components.shape[1:])
    for idx in itertools.permutations(range(n), 3):
        Kf[idx] = np.real(form.component(idx))
    return contorsion_from_flat(grid, Kf, frame)


def torsion_from_oneform(omega, frame: Vielbein | None = None) -> Contorsion:
    """Contorsion with K_flat = -*omega (dimension 4 only)."""
    if not isinstance(omega, DifferentialForm):
        raise TypeError("omega must be a DifferentialForm")
    if omega.n != 4 or omega.degree != 1:
        raise ValueError("torsion from a 1-form is defined in dimension 4")
    return contorsion_from_threeform(-hodge_dual(omega, frame), frame)


def oneform_from_torsion(K: Contorsion, frame: Vielbein | None = None) -> DifferentialForm:
    """Inverse of :func:`torsion_from_oneform`: *K_flat (since ** = -1 on 3-forms in dimension 4)."""
    return hodge_dual(K.as_threeform(), frame)


def covariant_gamma_residual(conn: SpinConnection, connection: ConnectionField, rep: GammaRep,
                             frame: Vielbein, mode: str | None = None) -> float:
    """max |d_mu gamma^nu + [omega_mu, gamma^nu] + Gamma^nu_{mu lam} gamma^lam| (zero for the lift)."""
    grid = conn.grid
    gam = local_gammas(rep, frame)
    worst = 0.0
    for mu in range(grid.n):
        w = conn.omega[mu]
        for nu in range(grid.n):
            term = derivative(gam[nu], mu, grid, mode)
            term = term + np.einsum("ij...,jk...->ik...", w, gam[nu]) - np.einsum("ij...,jk...->ik...", gam[nu], w)
            term = term + np.einsum("l...,lij...->ij...", connection.symbols[nu, mu], gam)
            worst = max(worst, float(np.max(np.abs(term))))
    return worst


def random_contorsion(grid: TorusGrid, rng: np.random.Generator, kind: str = "generic",
                      scale: float = 1.0) -> Contorsion:
    """Constant random contorsion on the flat metric.

    ``kind``: generic, threeform, orthogonal (skew in slots 1-3), geodesic
    (skew in slots 2-3), symmetric (symmetric in slots 2-3).
    """
    n = grid.n
    A = scale * rng.normal(size=(n, n, n))
    if kind == "threeform":
        A = sum(_parity(p) * np.transpose(A, p) for p in itertools.permutations(range(3))) / 6
    elif kind == "orthogonal":
        A = 0.5 * (A - np.einsum("lmn->nml", A))
    elif kind == "geodesic":
        A = 0.5 * (A - np.swapaxes(A, 1, 2))
    elif kind == "symmetric":
        A = 0.5 * (A + np.swapaxes(A, 1, 2))
    elif kind != "generic":
        raise ValueError(f"unknown contorsion kind {kind!r}")
    return contorsion_from_flat(grid, A.reshape(A.shape + grid.const_shape))


def _parity(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def lift_from_oneform(f, rep: GammaRep, grid: TorusGrid) -> SpinorOperator:
    """Dirac operator of the spin lift of the torsion generated by the 1-form f (flat frame)."""
    return spin_dirac(spin_lift(torsion_from_oneform(one_form(grid, f)), rep), rep)


__all__ = [
    "ConnectionField", "Contorsion", "ContorsionClass", "SpinConnection", "christoffel", "contorsion",
    "contorsion_from_flat", "torsion_tensor", "classify_contorsion", "spin_lift", "spin_dirac",
    "contorsion_from_threeform", "torsion_from_oneform", "oneform_from_torsion",
    "covariant_gamma_residual", "random_contorsion", "lift_from_oneform", "LIFT_ONEFORM_FACTOR",
]
