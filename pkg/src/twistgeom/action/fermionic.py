"""Fermionic bilinear <J phi, R D psi> for odd gamma products R, its closed forms, and Lorentz checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..clifford import (ALGEBRAIC_TOL, GammaRep, LorentzGammaRep, RealStructure, euclid_lorentz_truth_table,
                        rho_adjoint_matrix, spin_rep, weyl_blocks)
from ..errors import IdentityViolation
from ..geometry.grid import TorusGrid, derivative, inner
from ..twist.operator import SpinorOperator
from ..twist.triple import RMatrix, dirac_with_torsion, r_matrix

CLOSED_FORM_TOL = 1e-8


@dataclass(frozen=True)
class FermionicConfig:
    R: RMatrix
    D: SpinorOperator
    J: RealStructure
    rep: GammaRep

    @property
    def alpha(self) -> complex:
        return self.R.alpha

    @property
    def grid(self) -> TorusGrid:
        return self.D.grid

    @classmethod
    def build(cls, indices, f, rep: GammaRep, grid: TorusGrid, J: RealStructure) -> "FermionicConfig":
        """R = product of gammas at ``indices``, D = twisted Dirac operator with 1-form f."""
        return cls(r_matrix(indices, rep), dirac_with_torsion(f, rep, grid), J, rep)


def _apply_const(M: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.einsum("ij,j...->i...", M, values)


def eigenspinor(a: int, alpha: complex, phi: np.ndarray, rep: GammaRep) -> np.ndarray:
    """(phi, alpha^{-1} sigma~^a phi), an eigenvector of gamma^a with eigenvalue alpha (= +-1)."""
    if rep.m != 2:
        raise ValueError("eigenspinors are built for dimension 4")
    if not 0 <= a < 4:
        raise ValueError("gamma index out of range")
    if alpha not in (1, -1):
        raise ValueError("a single gamma has eigenvalues +-1")
    _, sigma_t = weyl_blocks()
    phi = np.asarray(phi, dtype=complex)
    psi = np.concatenate([phi, _apply_const(sigma_t[a] / alpha, phi)])
    dev = float(np.max(np.abs(_apply_const(rep.gammas[a], psi) - alpha * psi)))
    if dev > ALGEBRAIC_TOL * max(1.0, float(np.max(np.abs(psi)))):
        raise IdentityViolation("eigenspinor relation", dev, ALGEBRAIC_TOL)
    return psi


def eigen_projection(R: RMatrix, psi: np.ndarray) -> np.ndarray:
    """Project onto the alpha-eigenspace of R: (1 + R/alpha)/2 (valid since R^2 = alpha^2)."""
    P = 0.5 * (np.eye(R.matrix.shape[0]) + R.matrix / R.alpha)
    return _apply_const(P, psi)


def fermionic_form(phi: np.ndarray, psi: np.ndarray, cfg: FermionicConfig) -> complex:
    """A(phi, psi) = integral of <J phi, R D psi>."""
    return inner(cfg.J.apply(phi), _apply_const(cfg.R.matrix, cfg.D(psi)), cfg.grid)


def symmetry_ratio(phi: np.ndarray, psi: np.ndarray, cfg: FermionicConfig) -> complex:
    """A(phi, psi) / A(psi, phi)."""
    return fermionic_form(phi, psi, cfg) / fermionic_form(psi, phi, cfg)


# ------------------------------------------------------------ closed forms

def weyl_operator(a: int, f, grid: TorusGrid) -> SpinorOperator:
    """2x2 operator O_a with A = 2 int xi^T sigma_2 O_a zeta.

    a = 0:  i f_0 - sum_j sigma_j d_j;
    a != 0: sigma_a (d_0 + i sum_{j != a} sigma_j d_j + i sigma_a f_a).
    """
    from ..clifford import pauli

    s = pauli()
    f = np.asarray(f)
    if f.ndim == 1:
        f = f.reshape((4,) + grid.const_shape)
    one = np.eye(2).reshape((2, 2) + grid.const_shape)

    def const(M):
        return np.asarray(M, dtype=complex).reshape((2, 2) + grid.const_shape)

    if a == 0:
        terms = [(1j * f[0][None, None] * one, ())]
        terms += [(-const(s[j - 1]), (j,)) for j in (1, 2, 3)]
    else:
        sa = const(s[a - 1])
        terms = [(sa, (0,))]
        terms += [(1j * const(s[a - 1] @ s[j - 1]), (j,)) for j in (1, 2, 3) if j != a]
        terms.append((1j * f[a][None, None] * one, ()))  # sigma_a sigma_a = 1
    return SpinorOperator(grid, 2, tuple(terms)).canonical()


def fermionic_closed_form(a: int, f, zeta: np.ndarray, grid: TorusGrid, xi: np.ndarray | None = None) -> complex:
    """2 int xi^T sigma_2 O_a zeta (polarized in xi; xi = zeta gives the diagonal value)."""
    from ..clifford import pauli

    xi = zeta if xi is None else xi
    O = weyl_operator(a, f, grid)
    return 2 * complex(np.sum(xi * _apply_const(pauli()[1], O(zeta))) * grid.cell_volume)


@dataclass(frozen=True)
class ClosedFormComparison:
    a: int
    bilinear: complex
    closed: complex
    relative_deviation: float


def compare_closed_form(a: int, f, xi: np.ndarray, zeta: np.ndarray, rep: GammaRep, grid: TorusGrid,
                        J: RealStructure, tol: float = CLOSED_FORM_TOL) -> ClosedFormComparison:
    """Bilinear on (eigenspinor(xi), eigenspinor(zeta)) with R = gamma^a versus the closed form."""
    cfg = FermionicConfig.build([a], f, rep, grid, J)
    phi = eigenspinor(a, 1, xi, rep)
    psi = eigenspinor(a, 1, zeta, rep)
    bil = fermionic_form(phi, psi, cfg)
    closed = fermionic_closed_form(a, f, zeta, grid, xi)
    rel = abs(bil - closed) / max(abs(bil), abs(closed), 1e-300)
    if rel > tol:
        raise IdentityViolation(f"fermionic closed form a={a}", rel, tol)
    return ClosedFormComparison(a, bil, closed, float(rel))


def reduction_matrices(a: int) -> tuple[np.ndarray, np.ndarray]:
    """(D^{mu a}, F^{mu a}) for mu = 0..3, with sigma^2 = -i sigma_2 the Weyl block of gamma^2."""
    sigma, sigma_t = weyl_blocks()
    s2 = sigma[2]
    D = np.array([s2 @ sigma[mu] @ sigma_t[a] - sigma_t[a].T @ s2 @ sigma_t[mu] for mu in range(4)])
    F = np.array([s2 @ sigma[mu] @ sigma_t[a] + sigma_t[a].T @ s2 @ sigma_t[mu] for mu in range(4)])
    return D, F


def reduction_residuals(a: int) -> dict[str, float]:
    """Compare D^{mu a} and F^{mu a} with their reduced forms."""
    sigma, st = weyl_blocks()
    s2 = sigma[2]
    D, F = reduction_matrices(a)
    zero = np.zeros((2, 2))
    if a == 0:
        D_red = [zero] + [-2 * s2 @ st[0] @ st[mu] for mu in (1, 2, 3)]
        F_red = [2 * s2 @ st[0] @ st[0]] + [zero] * 3
    else:
        D_red = [2 * s2 @ st[a] @ st[mu] if mu != a else zero for mu in range(4)]
        F_red = [-2 * s2 @ st[a] @ st[a] if mu == a else zero for mu in range(4)]
    return {"D": float(np.max(np.abs(D - np.array(D_red)))), "F": float(np.max(np.abs(F - np.array(F_red))))}


# ------------------------------------------------------- signature change

@dataclass(frozen=True)
class SignatureResult:
    signature: str
    replaced_axis: int
    symbol_square: complex
    witness_residual: float


def _symbol_square(coeffs: list[np.ndarray]) -> complex:
    """s^2 for spatial first-order coefficients c_j = s sigma_j (from (n.c)^2 = s^2 |n|^2)."""
    n = np.array([0.3, -0.5, 0.8])
    nc = sum(n[j] * coeffs[j] for j in range(3))
    sq = nc @ nc / float(n @ n)
    if np.max(np.abs(sq - sq[0, 0] * np.eye(2))) > ALGEBRAIC_TOL:
        raise IdentityViolation("spatial symbol is not scalar", float(np.max(np.abs(sq))), ALGEBRAIC_TOL)
    return complex(sq[0, 0])


def signature_classify(indices, f, grid: TorusGrid, rng: np.random.Generator | None = None) -> SignatureResult:
    """Decide whether R = gamma^a turns the closed-form operator into a lorentzian Weyl operator.

    a = 0: on zeta = exp(i f_0 x_0) xi(x_1, x_2, x_3) (f_0 an integer on the 2pi torus) the
    operator equals d_0 - sum_j sigma_j d_j. a != 0: on zeta = exp(f_a x_a) xi (non periodic,
    so derivatives are taken analytically) it equals d_0 + i sum_j sigma_j d_j. The signature
    follows from the square of the spatial symbol: +1 lorentzian, -1 euclidean.
    """
    from ..clifford import pauli

    idx = [int(i) for i in np.atleast_1d(indices)]
    if len(idx) != 1:
        raise ValueError("signature classification needs R to be a single gamma matrix")
    a = idx[0]
    if not 0 <= a < 4 or grid.n != 4:
        raise ValueError("signature classification is defined for dimension 4")
    rng = rng or np.random.default_rng(0)
    s = pauli()
    f = np.asarray(f, dtype=float).reshape(4)
    from ..geometry.grid import random_band_limited

    xi = random_band_limited(grid, rng, 2, max_mode=1)
    if a == 0:
        if abs(f[0] - round(f[0])) > 0 or grid.L != 2 * np.pi:
            raise ValueError("f_0 must be an integer for a periodic plane wave")
        xi = np.broadcast_to(xi[(slice(None), slice(0, 1)) + (slice(None),) * 3], xi.shape)
        zeta = np.exp(1j * f[0] * grid.coord(0)) * xi
        lhs = weyl_operator(0, f, grid)(zeta)
        coeffs = [-s[j] for j in range(3)]
        target = derivative(zeta, 0, grid) + sum(_apply_const(coeffs[j], derivative(zeta, j + 1, grid))
                                                 for j in range(3))
    else:
        xi = np.broadcast_to(xi[(slice(None),) + tuple(slice(0, 1) if mu == a else slice(None)
                                                         for mu in range(4))], xi.shape)
        growth = np.exp(f[a] * grid.coord(a))
        zeta = growth * xi

        def dz(mu):  # analytic derivative of exp(f_a x_a) xi
            return growth * derivative(xi, mu, grid) + (f[a] * zeta if mu == a else 0)

        sa = s[a - 1]
        lhs = _apply_const(sa, dz(0) + sum(_apply_const(1j * s[j - 1], dz(j)) for j in (1, 2, 3) if j != a)
                           + 1j * f[a] * _apply_const(sa, zeta))
        coeffs = [1j * s[j] for j in range(3)]
        target = _apply_const(sa, dz(0) + sum(_apply_const(coeffs[j - 1], dz(j)) for j in (1, 2, 3)))
    residual = float(np.max(np.abs(lhs - target)) / max(1.0, float(np.max(np.abs(zeta)))))
    sq = _symbol_square(coeffs)
    signature = "lorentzian" if abs(sq - 1) <= ALGEBRAIC_TOL else "euclidean" if abs(sq + 1) <= ALGEBRAIC_TOL \
        else "undetermined"
    return SignatureResult(signature, a, sq, residual)


# ------------------------------------------------------------- Lorentz

@dataclass(frozen=True)
class LorentzInvariance:
    residual: float           # J -> S J S^{-1}
    literal_residual: float   # J -> S J S, as a diagnostic
    value: complex


def lorentz_invariance(phi: np.ndarray, psi: np.ndarray, cfg: FermionicConfig, S: np.ndarray) -> LorentzInvariance:
    """Compare A(phi, psi) with the action after D -> S D S^{-1}, spinors -> S spinors, J transformed."""
    Sinv = np.linalg.inv(S)
    D2 = cfg.D.conjugate_by(S, Sinv)
    U = cfg.J.matrix
    before = fermionic_form(phi, psi, cfg)
    out = []
    for Jm in (S @ U @ np.conj(Sinv), S @ U @ np.conj(S)):
        J2 = RealStructure(Jm, cfg.J.ko_signs)
        cfg2 = FermionicConfig(cfg.R, D2, J2, cfg.rep)
        out.append(fermionic_form(_apply_const(S, phi), _apply_const(S, psi), cfg2))
    scale = max(1.0, abs(before))
    return LorentzInvariance(abs(out[0] - before) / scale, abs(out[1] - before) / scale, before)


def random_lorentz_parameters(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Antisymmetric real t_{ab}."""
    A = scale * rng.normal(size=(4, 4))
    return A - A.T


def lorentz_suite(rep: LorentzGammaRep, samples: int = 50, seed: int = 0) -> dict:
    """rho-unitarity of spin_rep, the euclidean/lorentzian truth table, and the non-Lorentz witness."""
    rng = np.random.default_rng(seed)
    base = rep.base
    one = np.eye(4)
    worst = 0.0
    for _ in range(samples):
        S = spin_rep(rep, random_lorentz_parameters(rng))
        Sp = rho_adjoint_matrix(base, S)
        worst = max(worst, float(np.max(np.abs(Sp @ S - one))), float(np.max(np.abs(S @ Sp - one))))
    table = euclid_lorentz_truth_table(rep)
    expected = np.array([[a == 0 or (b != 0 and b != a) for b in range(4)] for a in range(4)])
    full_rows = [bool(np.all(table[a])) for a in range(4)]
    t_rot = np.zeros((4, 4))
    t_rot[1, 2], t_rot[2, 1] = 0.7, -0.7
    t_boost = np.zeros((4, 4))
    t_boost[0, 1], t_boost[1, 0] = 0.3, -0.3
    rot, boost = spin_rep(rep, t_rot), spin_rep(rep, t_boost)

    def rho_unitary_dev(M):
        Mp = rho_adjoint_matrix(base, M)
        return max(float(np.max(np.abs(Mp @ M - one))), float(np.max(np.abs(M @ Mp - one))))

    def unitary_dev(M):
        return float(np.max(np.abs(M.conj().T @ M - one)))

    # block-antidiagonal rho-unitary: alpha = delta = 0 and gamma = beta unitary
    beta = _random_unitary(rng, 2)
    zero = np.zeros((2, 2))
    anti = np.block([[zero, beta], [beta, zero]])
    mismatched = np.block([[zero, beta], [_random_unitary(rng, 2), zero]])
    return {
        "samples": samples,
        "rho_unitarity_max_dev": worst,
        "truth_table": table.tolist(),
        "truth_table_ok": bool(np.array_equal(table, expected)),
        "all_b_iff_a0": full_rows == [True, False, False, False],
        "rotation_unitary_dev": unitary_dev(rot),
        "rotation_rho_unitary_dev": rho_unitary_dev(rot),
        "boost_selfadjoint_dev": float(np.max(np.abs(boost - boost.conj().T))),
        "boost_rho_unitary_dev": rho_unitary_dev(boost),
        "boost_unitary_dev": unitary_dev(boost),
        "antidiagonal_rho_unitary_dev": rho_unitary_dev(anti),
        "antidiagonal_identity_rho_unitary_dev": rho_unitary_dev(np.block([[zero, np.eye(2)], [np.eye(2), zero]])),
        "antidiagonal_diag_blocks": float(np.max(np.abs(anti[:2, :2])) + np.max(np.abs(anti[2:, 2:]))),
        "antidiagonal_offdiag_blocks": float(np.max(np.abs(anti[:2, 2:])) + np.max(np.abs(anti[2:, :2]))),
        "spin_rep_offdiag_blocks": float(np.max(np.abs(boost[:2, 2:])) + np.max(np.abs(rot[:2, 2:]))),
        "independent_blocks_rho_unitary_dev": rho_unitary_dev(mismatched),
    }


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))
