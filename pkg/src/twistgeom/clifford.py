"""Euclidean and lorentzian Dirac matrices, grading, real structure, spin representation.

Gamma indices run over 0 ... 2m-1. The chiral grading is always
``diag(1, -1)`` with blocks of size ``2**(m-1)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import IdentityViolation

ALGEBRAIC_TOL = 1e-12


def pauli() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the three Pauli matrices (sigma_1, sigma_2, sigma_3)."""
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    return s1, s2, s3


def weyl_blocks() -> tuple[list[np.ndarray], list[np.ndarray]]:
    """The 2x2 blocks sigma^a = (1, -i sigma_j) and tilde-sigma^a = (1, i sigma_j)."""
    one = np.eye(2, dtype=complex)
    s = pauli()
    sigma = [one] + [-1j * p for p in s]
    sigma_t = [one] + [1j * p for p in s]
    return sigma, sigma_t


def _offdiag(upper: np.ndarray, lower: np.ndarray) -> np.ndarray:
    z = np.zeros_like(upper)
    return np.block([[z, upper], [lower, z]])


@dataclass(frozen=True)
class GammaRep:
    """The 2m euclidean Dirac matrices of size 2^m and the chiral grading."""

    m: int
    gammas: tuple[np.ndarray, ...]
    grading: np.ndarray

    @property
    def n(self) -> int:
        return 2 * self.m

    @property
    def dim(self) -> int:
        return 2 ** self.m

    def product(self, indices) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex)
        for a in indices:
            out = out @ self.gammas[a]
        return out


def euclidean_gammas(m: int) -> GammaRep:
    """Chiral euclidean gammas in dimension 2m.

    m=1 and m=2 use explicit off-diagonal blocks; larger m is built by
    iterating ``sigma_1 (x) G``, ``sigma_1 (x) grading``, ``sigma_2 (x) 1``.
    """
    if m < 1:
        raise ValueError("m must be a positive integer (m=0 carries no spinors)")
    if m == 1:
        one = np.ones((1, 1), dtype=complex)
        gammas = [_offdiag(one, one), _offdiag(-1j * one, 1j * one)]
    elif m == 2:
        sigma, sigma_t = weyl_blocks()
        gammas = [_offdiag(sigma[a], sigma_t[a]) for a in range(4)]
    else:
        prev = euclidean_gammas(m - 1)
        s1, s2, _ = pauli()
        gammas = [np.kron(s1, g) for g in prev.gammas]
        gammas.append(np.kron(s1, prev.grading))
        gammas.append(np.kron(s2, np.eye(prev.dim)))
    half = 2 ** (m - 1)
    grading = np.diag(np.r_[np.ones(half), -np.ones(half)]).astype(complex)
    rep = GammaRep(m, tuple(np.asarray(g, dtype=complex) for g in gammas), grading)
    dev = max(gamma_suite(rep, include_absorption=False).values())
    if dev > ALGEBRAIC_TOL:
        raise IdentityViolation(f"gamma invariants (m={m})", dev, ALGEBRAIC_TOL)
    return rep


def levi_civita_sign(indices) -> int:
    """Sign of the permutation ``indices`` of (0, ..., n-1); 0 on repeats."""
    idx = list(indices)
    n = len(idx)
    if any(i < 0 or i >= n for i in idx):
        raise ValueError(f"index out of range 0..{n - 1}: {idx}")
    if len(set(idx)) < n:
        return 0
    sign = 1
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = idx[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def grading_product_sign(rep: GammaRep) -> int:
    """Measure s with  -(-i)^m gamma^0 ... gamma^{2m-1} = s * grading."""
    prod = -((-1j) ** rep.m) * rep.product(range(rep.n))
    for s in (1, -1):
        if np.max(np.abs(prod - s * rep.grading)) <= ALGEBRAIC_TOL:
            return s
    raise IdentityViolation("product formula is not +-grading", float(np.max(np.abs(prod))), ALGEBRAIC_TOL)


def absorption_prefactor(rep: GammaRep) -> complex:
    """Constant C with gamma^a Gamma = C * sum_{all tuples} eps_{a b...} gamma^b ...

    Fixed by the measured product-formula sign; the ratio to the
    ``-(-i)^m/(2m)!`` normalization is ``s * 2m``.
    """
    s = grading_product_sign(rep)
    return s * (-((-1j) ** rep.m)) / math.factorial(rep.n - 1)


def reference_absorption_prefactor(m: int) -> complex:
    return -((-1j) ** m) / math.factorial(2 * m)


def hodge_kappa(rep: GammaRep) -> complex:
    """Pinned kappa_m with  i gamma^mu f_mu Gamma = kappa_m c(*omega_f)."""
    return 1j * absorption_prefactor(rep) * math.factorial(rep.n - 1)


def epsilon_contraction(rep: GammaRep, a: int) -> np.ndarray:
    """Brute-force sum over all (2m-1)-tuples of eps_{a b1 ...} gamma^{b1} ... ."""
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for rest in itertools.permutations([b for b in range(rep.n) if b != a]):
        out += levi_civita_sign((a,) + rest) * rep.product(rest)
    return out


def absorb_gamma(rep: GammaRep, a: int, tol: float = ALGEBRAIC_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(gamma^a Gamma, C * eps-contracted product)`` and assert they agree."""
    if not 0 <= a < rep.n:
        raise ValueError(f"gamma index {a} out of range")
    lhs = rep.gammas[a] @ rep.grading
    rhs = absorption_prefactor(rep) * epsilon_contraction(rep, a)
    dev = float(np.max(np.abs(lhs - rhs)))
    if dev > tol:
        raise IdentityViolation(f"gamma absorption a={a}", dev, tol)
    return lhs, rhs


def trace_identities(rep: GammaRep) -> dict[str, float]:
    """Max deviations of the grading trace identities and the four-gamma trace.

    Tr(Gamma gamma^a gamma^b) = 0 only holds for m >= 2 and is skipped at m = 1.
    """
    g, G, n = rep.gammas, rep.grading, rep.n
    dev1 = max(abs(np.trace(G @ g[a])) for a in range(n))
    dev2 = max(abs(np.trace(G @ g[a] @ g[b])) for a in range(n) for b in range(n))
    dev3 = max(abs(np.trace(G @ g[a] @ g[b] @ g[c])) for a in range(n) for b in range(n) for c in range(n))
    d = np.eye(n)
    dev4 = 0.0
    for a, b, c, e in itertools.product(range(n), repeat=4):
        expected = rep.dim * (d[a, b] * d[c, e] + d[a, e] * d[b, c] - d[a, c] * d[b, e])
        dev4 = max(dev4, abs(np.trace(g[a] @ g[b] @ g[c] @ g[e]) - expected))
    out = {"tr_grading_g": float(dev1), "tr_grading_ggg": float(dev3), "tr_gggg": float(dev4)}
    if rep.m >= 2:
        # in dimension 2 the grading is proportional to gamma^0 gamma^1
        out["tr_grading_gg"] = float(dev2)
    return out


def gamma_suite(rep: GammaRep, include_absorption: bool = True) -> dict[str, float]:
    """All gamma-algebra residuals for ``rep`` (each should be <= 1e-12)."""
    g, G, one = rep.gammas, rep.grading, np.eye(rep.dim)
    out: dict[str, float] = {}
    out["anticommutator"] = max(
        float(np.max(np.abs(g[a] @ g[b] + g[b] @ g[a] - 2 * (a == b) * one)))
        for a in range(rep.n) for b in range(rep.n))
    out["selfadjoint"] = max(float(np.max(np.abs(x - x.conj().T))) for x in g)
    out["unitary"] = max(float(np.max(np.abs(x @ x.conj().T - one))) for x in g)
    out["grading_selfadjoint"] = float(np.max(np.abs(G - G.conj().T)))
    out["grading_square"] = float(np.max(np.abs(G @ G - one)))
    out["grading_anticommutes"] = max(float(np.max(np.abs(G @ x + x @ G))) for x in g)
    half = rep.dim // 2
    chiral = np.diag(np.r_[np.ones(half), -np.ones(half)])
    out["grading_chiral"] = float(np.max(np.abs(G - chiral)))
    if include_absorption:
        out["absorption"] = 0.0
        for a in range(rep.n):
            lhs, rhs = absorb_gamma(rep, a, tol=np.inf)
            out["absorption"] = max(out["absorption"], float(np.max(np.abs(lhs - rhs))))
        out["absorption_square"] = max(
            float(np.max(np.abs((x @ G) @ (x @ G) + one))) for x in g)
        out.update(trace_identities(rep))
    return out


@dataclass(frozen=True)
class LorentzGammaRep:
    """Lorentzian gammas gamma_L^0 = gamma^0, gamma_L^j = i gamma^j and generators T^{ab}."""

    base: GammaRep
    gammas: tuple[np.ndarray, ...] = field(init=False)
    generators: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.base.m != 2:
            raise ValueError("lorentzian gammas are defined for m=2")
        gl = tuple(self.base.gammas[0:1]) + tuple(1j * x for x in self.base.gammas[1:])
        T = np.zeros((4, 4, 4, 4), dtype=complex)
        for a in range(4):
            for b in range(4):
                T[a, b] = -0.25j * (gl[a] @ gl[b] - gl[b] @ gl[a])
        object.__setattr__(self, "gammas", gl)
        object.__setattr__(self, "generators", T)


def lorentz_gammas(rep: GammaRep | None = None) -> LorentzGammaRep:
    return LorentzGammaRep(rep if rep is not None else euclidean_gammas(2))


def lorentz_generator(rep: LorentzGammaRep, a: int, b: int) -> np.ndarray:
    return rep.generators[a, b]


def spin_rep(rep: LorentzGammaRep, t) -> np.ndarray:
    """exp((i/2) t_ab T^{ab}), summed over all ordered pairs (a, b)."""
    t = np.asarray(t, dtype=float)
    if t.shape != (4, 4):
        raise ValueError("t must be a 4x4 real array")
    X = 0.5j * np.einsum("ab,abij->ij", t, rep.generators)
    return expm(X)


def rho_adjoint_matrix(rep: GammaRep, M: np.ndarray) -> np.ndarray:
    """M^+ = gamma^0 M^dagger gamma^0."""
    g0 = rep.gammas[0]
    return g0 @ M.conj().T @ g0


def euclid_lorentz_truth_table(rep: LorentzGammaRep) -> np.ndarray:
    """Boolean table [a, b]: gamma^a (gamma_L^b)^dagger gamma^a == gamma_L^b."""
    g = rep.base.gammas
    table = np.zeros((4, 4), dtype=bool)
    for a in range(4):
        for b in range(4):
            lhs = g[a] @ rep.gammas[b].conj().T @ g[a]
            table[a, b] = bool(np.max(np.abs(lhs - rep.gammas[b])) <= ALGEBRAIC_TOL)
    return table


@dataclass(frozen=True)
class RealStructure:
    """Antilinear J psi = U conj(psi) with KO signs (eps, eps', eps'')."""

    matrix: np.ndarray
    ko_signs: tuple[int, int, int]
    antilinear: bool = True

    def apply(self, values: np.ndarray) -> np.ndarray:
        return np.einsum("ij,j...->i...", self.matrix, np.conj(values))

    def inverse_matrix(self) -> np.ndarray:
        """Matrix V with J^{-1} psi = V conj(psi)."""
        return np.conj(np.linalg.inv(self.matrix))


def real_structure_dim4(rep: GammaRep) -> RealStructure:
    """J = i gamma^0 gamma^2 followed by complex conjugation (KO-dimension 4)."""
    if rep.m != 2:
        raise ValueError("the explicit real structure is defined for m=2")
    U = 1j * rep.gammas[0] @ rep.gammas[2]
    J = RealStructure(U, (-1, 1, 1))
    devs = real_structure_residuals(rep, J)
    worst = max(devs.values())
    if worst > ALGEBRAIC_TOL:
        raise IdentityViolation("real structure relations", worst, ALGEBRAIC_TOL)
    return J


def real_structure_residuals(rep: GammaRep, J: RealStructure) -> dict[str, float]:
    """Residuals of J^2 = eps, J gamma = -gamma J, J Gamma = eps'' Gamma J, unitarity.

    J D = eps' D J holds for D = -i gamma^mu d_mu iff conj(U) relation
    U conj(-i gamma) = eps' (-i gamma) U, which is checked here at the matrix level.
    """
    U = J.matrix
    eps, eps1, eps2 = J.ko_signs
    one = np.eye(rep.dim)
    out = {
        "J_unitary": float(np.max(np.abs(U @ U.conj().T - one))),
        "J_square": float(np.max(np.abs(U @ U.conj() - eps * one))),
        "J_gamma_anticommute": max(float(np.max(np.abs(U @ g.conj() + g @ U))) for g in rep.gammas),
        "J_grading": float(np.max(np.abs(U @ rep.grading.conj() - eps2 * rep.grading @ U))),
        "J_dirac_symbol": max(float(np.max(np.abs(U @ np.conj(-1j * g) - eps1 * (-1j * g) @ U)))
                              for g in rep.gammas),
    }
    return out
