"""Minimal twist of the flat-torus spectral triple.

Algebra elements are pairs ``a = (f, g)`` acting as ``diag(f 1, g 1)`` on
chiral spinors; the flip ``rho(f, g) = (g, f)`` is implemented on operators by
conjugation with gamma^0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..clifford import GammaRep, RealStructure
from ..errors import IdentityViolation
from ..geometry.forms import clifford_action, hodge_dual, local_gammas, one_form
from ..geometry.frame import Vielbein
from ..geometry.grid import TorusGrid, derivative, inner
from .operator import SpinorOperator, operator_deviation, random_spinors

ALGEBRAIC_TOL = 1e-12
DERIVATIVE_TOL = 1e-10
NONVANISHING = 1e-8


# ---------------------------------------------------------------- elements

@dataclass(frozen=True)
class TwistedElement:
    """a = (f, g) in C(M) (x) C^2; f and g are arrays over the grid (or scalars)."""

    grid: TorusGrid
    f: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        for name in ("f", "g"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if v.ndim == 0:
                v = v.reshape(self.grid.const_shape)
            if not np.all(np.isfinite(v)):
                raise ValueError(f"component {name} has non-finite values")
            object.__setattr__(self, name, v)

    def star(self) -> "TwistedElement":
        return TwistedElement(self.grid, np.conj(self.f), np.conj(self.g))

    def __mul__(self, other: "TwistedElement") -> "TwistedElement":
        return TwistedElement(self.grid, self.f * other.f, self.g * other.g)

    def inverse(self) -> "TwistedElement":
        if min(np.min(np.abs(self.f)), np.min(np.abs(self.g))) < NONVANISHING:
            raise ValueError("element is not invertible on the grid")
        return TwistedElement(self.grid, 1 / self.f, 1 / self.g)

    def is_unitary(self, tol: float = ALGEBRAIC_TOL) -> bool:
        return bool(max(np.max(np.abs(np.abs(self.f) - 1)), np.max(np.abs(np.abs(self.g) - 1))) <= tol)


def flip(a: TwistedElement) -> TwistedElement:
    return TwistedElement(a.grid, a.g, a.f)


def rho_unitary_from(h: np.ndarray, grid: TorusGrid) -> TwistedElement:
    """u_h = (h, 1/conj(h)) for a nowhere-vanishing h."""
    h = np.asarray(h, dtype=complex)
    if np.min(np.abs(h)) < NONVANISHING:
        raise ValueError(f"h vanishes on the grid (min |h| = {np.min(np.abs(h)):.3e} < {NONVANISHING})")
    return TwistedElement(grid, h, 1 / np.conj(h))


def chiral_diag(rep: GammaRep, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Matrix field diag(f 1, g 1) of shape (d, d, *grid)."""
    half = rep.dim // 2
    f, g = np.asarray(f, dtype=complex), np.asarray(g, dtype=complex)
    shape = np.broadcast_shapes(f.shape, g.shape)
    M = np.zeros((rep.dim, rep.dim) + shape, dtype=complex)
    for i in range(half):
        M[i, i] = f
        M[half + i, half + i] = g
    return M


def represent(a: TwistedElement, rep: GammaRep) -> SpinorOperator:
    return SpinorOperator.multiplication(a.grid, chiral_diag(rep, a.f, a.g))


def rho_conj(O: SpinorOperator, rep: GammaRep) -> SpinorOperator:
    """rho(O) = gamma^0 O gamma^0."""
    g0 = rep.gammas[0]
    return O.conjugate_by(g0, g0)


def rho_adjoint(O: SpinorOperator, rep: GammaRep) -> SpinorOperator:
    """O^+ = rho(O)^dagger."""
    return rho_conj(O, rep).adjoint()


def adjoint_with_product(O: SpinorOperator, R: np.ndarray) -> SpinorOperator:
    """Adjoint for the product <., R .>: R^{-1} O^dagger R."""
    return O.adjoint().conjugate_by(np.linalg.inv(R), R)


def twisted_product(psi: np.ndarray, phi: np.ndarray, R: SpinorOperator) -> complex:
    """(psi, phi)_R = <psi, R phi>."""
    return inner(psi, R(phi), R.grid)


def twisted_commutator(D: SpinorOperator, a: TwistedElement, rep: GammaRep,
                       tol: float = ALGEBRAIC_TOL) -> SpinorOperator:
    """[D, a]_rho = D pi(a) - pi(rho(a)) D; the derivative part must cancel."""
    result = D @ represent(a, rep) - represent(flip(a), rep) @ D
    scale = max(1.0, D.max_coefficient() * max(np.max(np.abs(a.f)), np.max(np.abs(a.g))))
    leftover = max((float(np.max(np.abs(M))) for M, al in result.terms if al), default=0.0)
    if leftover > tol * scale:
        raise IdentityViolation("twisted commutator keeps derivative terms", leftover, tol * scale)
    return result.order_part(0)


@dataclass(frozen=True)
class RhoUnitaryCheck:
    ok: bool
    max_dev: float

    def __bool__(self) -> bool:
        return self.ok


def is_rho_unitary(a: TwistedElement, tol: float = ALGEBRAIC_TOL) -> RhoUnitaryCheck:
    """conj(g) = 1/f pointwise, with f nowhere zero."""
    if np.min(np.abs(a.f)) < NONVANISHING:
        return RhoUnitaryCheck(False, float("inf"))
    dev = float(np.max(np.abs(np.conj(a.g) * a.f - 1)))
    return RhoUnitaryCheck(dev <= tol, dev)


def is_rho_unitary_operator(O: SpinorOperator, rep: GammaRep, fields, tol: float = DERIVATIVE_TOL) -> RhoUnitaryCheck:
    """O^+ O = O O^+ = 1 tested on a battery of spinor fields."""
    Op = rho_adjoint(O, rep)
    one = SpinorOperator.identity(O.grid, O.dim)
    dev = max(operator_deviation(Op @ O, one, fields), operator_deviation(O @ Op, one, fields))
    return RhoUnitaryCheck(dev <= tol, dev)


# ---------------------------------------------------------- real structure

def real_structure_operator(J: RealStructure, grid: TorusGrid) -> SpinorOperator:
    return SpinorOperator.multiplication(grid, J.matrix, antilinear=True)


def real_structure_inverse(J: RealStructure, grid: TorusGrid) -> SpinorOperator:
    return SpinorOperator.multiplication(grid, J.inverse_matrix(), antilinear=True)


def conjugate_by_J(O: SpinorOperator, J: RealStructure) -> SpinorOperator:
    """J O J^{-1}."""
    return real_structure_operator(J, O.grid) @ O @ real_structure_inverse(J, O.grid)


def adjoint_action(a: TwistedElement, J: RealStructure, rep: GammaRep) -> SpinorOperator:
    """Ad(a) = pi(a) J pi(a) J^{-1}."""
    pa = represent(a, rep)
    return pa @ conjugate_by_J(pa, J)


# ----------------------------------------------------------- Dirac operators

def dirac_free(rep: GammaRep, grid: TorusGrid, frame: Vielbein | None = None) -> SpinorOperator:
    """-i gamma^mu d_mu with coordinate gammas of ``frame`` (flat by default)."""
    gam = local_gammas(rep, frame)
    return SpinorOperator(grid, rep.dim, tuple((-1j * gam[mu], (mu,)) for mu in range(rep.n))).canonical()


def _oneform_array(f, grid: TorusGrid) -> np.ndarray:
    f = np.asarray(f)
    if f.ndim == 1:
        f = f.reshape((grid.n,) + grid.const_shape)
    return f


def torsion_matrix(f, rep: GammaRep, grid: TorusGrid) -> np.ndarray:
    """Matrix field -i f_mu gamma^mu Gamma."""
    f = _oneform_array(f, grid)
    gam = local_gammas(rep, None)
    G = rep.grading
    M = sum(f[mu][None, None] * np.einsum("ij...,jk->ik...", gam[mu], G) for mu in range(rep.n))
    return -1j * M


def dirac_with_torsion(f, rep: GammaRep, grid: TorusGrid) -> SpinorOperator:
    """-i gamma^mu d_mu - i f_mu gamma^mu Gamma for real components f_mu."""
    f = _oneform_array(f, grid)
    if np.iscomplexobj(f) and np.max(np.abs(np.imag(f))) > 0:
        raise ValueError("torsion 1-form components must be real")
    f = np.real(f)
    return dirac_free(rep, grid) + SpinorOperator.multiplication(grid, torsion_matrix(f, rep, grid))


def hodge_identity_check(f, rep: GammaRep, grid: TorusGrid, frame: Vielbein | None = None,
                         tol: float = DERIVATIVE_TOL) -> dict:
    """Compare i gamma^mu f_mu Gamma with kappa_m c(*omega_f) pointwise."""
    from ..clifford import hodge_kappa

    f = _oneform_array(f, grid)
    lhs = -torsion_matrix(f, rep, grid)
    kappa = hodge_kappa(rep)
    rhs = kappa * clifford_action(hodge_dual(one_form(grid, f), frame), rep, frame)
    dev = float(np.max(np.abs(lhs - rhs)))
    reference = (-1j) ** (rep.m + 1) / (2 * rep.m)
    if dev > tol:
        raise IdentityViolation("Hodge identification", dev, tol)
    return {"m": rep.m, "max_dev": dev, "kappa": kappa, "reference_kappa": reference, "ratio_to_reference": kappa / reference}


# ------------------------------------------------------- twisted 1-forms

@dataclass(frozen=True)
class TwistedOneForm:
    """-i gamma^mu diag(phi_mu, chi_mu); phi, chi have shape (n, *grid)."""

    grid: TorusGrid
    phi: np.ndarray
    chi: np.ndarray

    def operator(self, rep: GammaRep) -> SpinorOperator:
        gam = local_gammas(rep, None)
        M = sum(-1j * np.einsum("ij...,jk...->ik...", gam[mu], chiral_diag(rep, self.phi[mu], self.chi[mu]))
                for mu in range(rep.n))
        return SpinorOperator.multiplication(self.grid, M)

    @classmethod
    def from_operator(cls, O: SpinorOperator, rep: GammaRep, tol: float = ALGEBRAIC_TOL) -> "TwistedOneForm":
        """Recover (phi, chi) from a bounded operator; raises if it is not of that shape."""
        if rep.m != 2:
            raise ValueError("twisted 1-form extraction is implemented for dimension 4")
        if O.order(tol * max(1.0, O.max_coefficient())) > 0:
            raise IdentityViolation("twisted 1-form has derivative terms", O.max_coefficient(), tol)
        M = O.coefficient(())
        half = rep.dim // 2
        upper = M[:half, half:]
        lower = M[half:, :half]
        # gamma^mu diag(p, q) = [[0, U_mu q], [L_mu p, 0]], basis orthogonal for Tr(X^dagger Y)
        phi, chi = [], []
        for mu in range(rep.n):
            Umu = rep.gammas[mu][:half, half:]
            Lmu = rep.gammas[mu][half:, :half]
            chi.append(np.einsum("ij,ij...->...", np.conj(Umu), upper) / (-1j * half))
            phi.append(np.einsum("ij,ij...->...", np.conj(Lmu), lower) / (-1j * half))
        shape = M.shape[2:]
        out = cls(O.grid, np.array([np.broadcast_to(p, shape) for p in phi]),
                  np.array([np.broadcast_to(c, shape) for c in chi]))
        residual = float(np.max(np.abs(out.operator(rep).coefficient(()) - M)))
        if residual > tol * max(1.0, float(np.max(np.abs(M)))):
            raise IdentityViolation("operator is not of twisted 1-form shape", residual, tol)
        return out

    @classmethod
    def from_pairs(cls, pairs, D: SpinorOperator, rep: GammaRep) -> "TwistedOneForm":
        """sum_i a_i [D, b_i]_rho."""
        total = None
        for a, b in pairs:
            term = represent(a, rep) @ twisted_commutator(D, b, rep)
            total = term if total is None else total + term
        return cls.from_operator(total, rep)


@dataclass(frozen=True)
class FluctuationResult:
    operator: SpinorOperator
    f: np.ndarray
    selfadjoint: bool
    structure_residual: float


def twisted_fluctuation(D: SpinorOperator, A: TwistedOneForm, J: RealStructure, rep: GammaRep,
                        tol: float = ALGEBRAIC_TOL) -> FluctuationResult:
    """D + A + eps' J A J^{-1}, with the -i f_mu gamma^mu Gamma structure extracted."""
    eps1 = J.ko_signs[1]
    Aop = A.operator(rep)
    B = Aop + eps1 * conjugate_by_J(Aop, J)
    form = TwistedOneForm.from_operator(B, rep, tol)
    scale = max(1.0, float(np.max(np.abs(form.phi))))
    # selfadjoint iff chi = -phi and phi real
    structure = float(np.max(np.abs(form.chi + form.phi)))
    imag = float(np.max(np.abs(np.imag(form.phi))))
    selfadjoint = max(structure, imag) <= tol * scale
    return FluctuationResult(D + B, np.real(form.phi), selfadjoint, max(structure, imag))


# ------------------------------------------------- torsion by group action

@dataclass(frozen=True)
class TorsionGeneration:
    operator: SpinorOperator
    omega: np.ndarray
    direct: SpinorOperator
    residual: float


def log_modulus_gradient(h: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Components of d ln|h|^2."""
    lg = np.log(np.abs(h) ** 2)
    return np.array([np.real(derivative(lg, mu, grid)) for mu in range(grid.n)])


def generate_torsion(h: np.ndarray, rep: GammaRep, grid: TorusGrid, J: RealStructure,
                     fields=None, tol: float = DERIVATIVE_TOL, seed: int = 0) -> TorsionGeneration:
    """Ad(u_h) dirac Ad(u_h)^dagger versus dirac - i gamma^mu d_mu(ln|h|^2) Gamma."""
    u = rho_unitary_from(h, grid)
    Ad = adjoint_action(u, J, rep)
    direct = Ad @ dirac_free(rep, grid) @ Ad.adjoint()
    omega = log_modulus_gradient(np.asarray(h), grid)
    closed = dirac_with_torsion(omega, rep, grid)
    if fields is None:
        fields = random_spinors(grid, rep.dim, 3, np.random.default_rng(seed))
    residual = operator_deviation(direct, closed, fields)
    if residual > tol:
        raise IdentityViolation("torsion generation closed form", residual, tol)
    return TorsionGeneration(closed, omega, direct, residual)


def compose_torsion(omega_f: np.ndarray, h2: np.ndarray, rep: GammaRep, grid: TorusGrid, J: RealStructure,
                    fields=None, tol: float = DERIVATIVE_TOL, seed: int = 0) -> np.ndarray:
    """Return omega_f + d ln|h2|^2 after checking it against the direct conjugation."""
    omega_f = _oneform_array(omega_f, grid)
    u = rho_unitary_from(h2, grid)
    Ad = adjoint_action(u, J, rep)
    Adt = Ad.adjoint()
    if fields is None:
        fields = random_spinors(grid, rep.dim, 3, np.random.default_rng(seed))
    bounded = SpinorOperator.multiplication(grid, torsion_matrix(omega_f, rep, grid))
    kept = operator_deviation(Ad @ bounded @ Adt, bounded, fields)
    if kept > tol:
        raise IdentityViolation("existing torsion term not invariant", kept, tol)
    omega = omega_f + log_modulus_gradient(np.asarray(h2), grid)
    direct = Ad @ dirac_with_torsion(omega_f, rep, grid) @ Adt
    dev = operator_deviation(direct, dirac_with_torsion(omega, rep, grid), fields)
    if dev > tol:
        raise IdentityViolation("torsion composition", dev, tol)
    return np.real(omega)


def coexact_torsion(f: np.ndarray, grid: TorusGrid):
    """Contorsion with K^flat = delta(f nu) (= - * d f)."""
    from ..geometry.forms import codifferential, volume_form
    from ..torsion import contorsion_from_threeform

    f = np.asarray(f)
    if np.iscomplexobj(f) and np.max(np.abs(np.imag(f))) > 0:
        raise ValueError("f must be real")
    fnu = volume_form(grid) * np.real(f)
    return contorsion_from_threeform(codifferential(fnu))


# -------------------------------------------------------------- R matrices

@dataclass(frozen=True)
class RMatrix:
    indices: tuple[int, ...]
    matrix: np.ndarray
    l: int
    alpha: complex


def r_matrix(indices, rep: GammaRep, seed: int = 0) -> RMatrix:
    idx = tuple(int(i) for i in indices)
    k = len(idx)
    if k % 2 == 0:
        raise ValueError("R must be a product of an odd number of gammas")
    if len(set(idx)) != k or list(idx) != sorted(idx):
        raise ValueError("R indices must be strictly increasing and distinct")
    if k > rep.n or any(i < 0 or i >= rep.n for i in idx):
        raise ValueError("R index out of range")
    R = rep.product(idx)
    l = (k - 1) // 2
    one = np.eye(rep.dim)
    checks = {
        "unitary": np.max(np.abs(R @ R.conj().T - one)),
        "anticommutes_grading": np.max(np.abs(R @ rep.grading + rep.grading @ R)),
        "dagger_sign": np.max(np.abs(R.conj().T - (-1) ** l * R)),
    }
    rng = np.random.default_rng(seed)
    f, g = rng.normal(size=2) + 1j * rng.normal(size=2)
    half = rep.dim // 2
    pa = np.diag(np.r_[np.full(half, f), np.full(half, g)])
    pra = np.diag(np.r_[np.full(half, g), np.full(half, f)])
    checks["implements_flip"] = np.max(np.abs(R @ pa @ R.conj().T - pra))
    worst = max(checks, key=checks.get)
    if checks[worst] > ALGEBRAIC_TOL:
        raise IdentityViolation(f"R matrix property {worst}", float(checks[worst]), ALGEBRAIC_TOL)
    return RMatrix(idx, R, l, 1.0 if l % 2 == 0 else 1j)


def build_R(indices, rep: GammaRep, grid: TorusGrid) -> SpinorOperator:
    return SpinorOperator.multiplication(grid, r_matrix(indices, rep).matrix)


# ------------------------------------------------------------ gauge action

def gauge_transform(A: TwistedOneForm, u: TwistedElement, D: SpinorOperator, J: RealStructure,
                    rep: GammaRep, fields=None, tol: float = ALGEBRAIC_TOL, seed: int = 0):
    """A^u = rho(u)[D, u*]_rho + rho(u) A u*; returns (A^u, D_{A^u}).

    Asserts D_{A^u} = Ad(rho(u)) D_A Ad(u)^{-1} on a spinor battery.
    """
    if not u.is_unitary():
        raise ValueError("gauge transformations require a unitary element")
    pru = represent(flip(u), rep)
    ustar = u.star()
    Au_op = pru @ twisted_commutator(D, ustar, rep) + pru @ A.operator(rep) @ represent(ustar, rep)
    Au = TwistedOneForm.from_operator(Au_op, rep, tol=DERIVATIVE_TOL)
    D_A = twisted_fluctuation(D, A, J, rep).operator
    D_Au = twisted_fluctuation(D, Au, J, rep).operator
    uinv = u.inverse()
    Ad_inv = conjugate_by_J(represent(uinv, rep), J) @ represent(uinv, rep)
    conj = adjoint_action(flip(u), J, rep) @ D_A @ Ad_inv
    if fields is None:
        fields = random_spinors(D.grid, rep.dim, 3, np.random.default_rng(seed))
    dev = operator_deviation(D_Au, conj, fields)
    if dev > DERIVATIVE_TOL:
        raise IdentityViolation("gauge transform vs conjugate action", dev, DERIVATIVE_TOL)
    return Au, D_Au


# --------------------------------------------------- non-entangled actions

@dataclass(frozen=True)
class NonEntangled:
    form_plus: bool
    form_dagger: bool
    factorization: tuple[TwistedElement, TwistedElement] | None
    plus_coefficient_dev: float
    dagger_coefficient_dev: float


def nonentangled_classify(a: TwistedElement, rep: GammaRep, J: RealStructure,
                          tol: float = 1e-10) -> NonEntangled:
    """Decide when Ad(a) D Ad(a)^+ and Ad(a) D Ad(a)^dagger keep D's leading symbol."""
    grid = a.grid
    plus_pred = bool(max(np.max(np.abs(np.abs(a.f) - 1)), np.max(np.abs(np.abs(a.g) - 1))) <= tol)
    dag_pred = bool(np.max(np.abs(np.abs(a.f * a.g) - 1)) <= tol)
    D = dirac_free(rep, grid)
    Ad = adjoint_action(a, J, rep)
    lead = D.order_part(1)

    def lead_dev(op: SpinorOperator) -> float:
        return max(float(np.max(np.abs(op.coefficient((mu,)) - lead.coefficient((mu,)))))
                   for mu in range(grid.n))

    plus_dev = lead_dev(Ad @ D @ rho_adjoint(Ad, rep))
    dag_dev = lead_dev(Ad @ D @ Ad.adjoint())
    if (plus_dev <= tol) != plus_pred or (dag_dev <= tol) != dag_pred:
        raise IdentityViolation("non-entangled predicate disagrees with direct assembly",
                                max(plus_dev, dag_dev), tol)
    fact = None
    if dag_pred:
        r = np.abs(a.f)
        u = TwistedElement(grid, a.f / r, a.g / np.abs(a.g))
        ur = TwistedElement(grid, r, 1 / r)
        fact = (u, ur)
    return NonEntangled(plus_pred, dag_pred, fact, plus_dev, dag_dev)


# ------------------------------------------------------ axiom residuals

def order_zero_residual(a: TwistedElement, b: TwistedElement, J: RealStructure, rep: GammaRep) -> float:
    """[pi(a), J pi(b)* J^{-1}] coefficient size."""
    pa = represent(a, rep)
    Y = conjugate_by_J(represent(b, rep).adjoint(), J)
    return (pa @ Y - Y @ pa).max_coefficient()


def first_order_residual(a: TwistedElement, b: TwistedElement, J: RealStructure, rep: GammaRep) -> float:
    """[[D, a]_rho, J b* J^{-1}]_rho with rho acting by gamma^0 conjugation."""
    D = dirac_free(rep, a.grid)
    X = twisted_commutator(D, a, rep)
    Y = conjugate_by_J(represent(b.star(), rep), J)
    return (X @ Y - rho_conj(Y, rep) @ X).max_coefficient()
