"""Differential forms on the torus.

A k-form is ``omega = sum over all index tuples of omega_{mu1..muk} dx^mu1 ^ ... ^ dx^muk``
with a totally antisymmetric coefficient array; only the coefficients on
strictly increasing tuples are stored. With this convention the Hodge dual
is ``(*omega)_{J} = sqrt|g| / (n-k)! * sum_I eps_{I J} omega^{I}`` summed over
all tuples I, and ``** = (-1)^{k(n-k)}`` in euclidean signature.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..clifford import GammaRep, levi_civita_sign
from .frame import Vielbein
from .grid import TorusGrid, derivative


@lru_cache(maxsize=None)
def index_tuples(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def _positions(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {t: i for i, t in enumerate(index_tuples(n, k))}


def _perm_sign(seq) -> int:
    """Parity of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class DifferentialForm:
    grid: TorusGrid
    degree: int
    components: np.ndarray

    def __post_init__(self):
        n, k = self.grid.n, self.degree
        if not 0 <= k <= n + 1:
            raise ValueError(f"degree {k} out of range for dimension {n}")
        count = len(index_tuples(n, k)) if k <= n else 0
        comps = np.asarray(self.components, dtype=complex)
        if comps.shape[0] != count or comps.ndim != n + 1:
            raise ValueError(f"components must have shape ({count}, grid...)")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def tuples(self) -> tuple[tuple[int, ...], ...]:
        return index_tuples(self.n, self.degree)

    def component(self, indices) -> np.ndarray:
        """Coefficient for an arbitrary index tuple, with antisymmetry signs."""
        indices = tuple(indices)
        if len(indices) != self.degree:
            raise ValueError("wrong number of indices")
        s = _perm_sign(indices)
        if s == 0:
            return np.zeros(self.components.shape[1:], dtype=complex)
        return s * self.components[_positions(self.n, self.degree)[tuple(sorted(indices))]]

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        return DifferentialForm(self.grid, self.degree, self.components + other.components)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return DifferentialForm(self.grid, self.degree, self.components - other.components)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(self.grid, self.degree, -self.components)

    def __mul__(self, c) -> "DifferentialForm":
        return DifferentialForm(self.grid, self.degree, self.components * c)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0


def zero_form(grid: TorusGrid, values) -> DifferentialForm:
    v = np.asarray(values, dtype=complex)
    if v.ndim == 0:
        v = v.reshape(grid.const_shape)
    return DifferentialForm(grid, 0, v[None])


def one_form(grid: TorusGrid, f) -> DifferentialForm:
    """1-form f_mu dx^mu from an array of shape (n,) or (n, *grid)."""
    f = np.asarray(f, dtype=complex)
    if f.ndim == 1:
        f = f.reshape((grid.n,) + grid.const_shape)
    return DifferentialForm(grid, 1, f)


def volume_form(grid: TorusGrid, frame: Vielbein | None = None) -> DifferentialForm:
    """Riemannian volume form; its single stored coefficient is sqrt|g| / n!."""
    w = np.ones(grid.const_shape) if frame is None else frame.sqrt_det
    return DifferentialForm(grid, grid.n, (w / math.factorial(grid.n))[None])


def _raised(omega: DifferentialForm, frame: Vielbein | None) -> np.ndarray:
    """Components omega^I on sorted tuples (indices raised with g^{mu nu})."""
    if frame is None or frame.is_flat_identity or omega.degree == 0:
        return omega.components
    ginv = frame.inverse_metric
    tuples = omega.tuples
    out = np.zeros(omega.components.shape[:1] + np.broadcast_shapes(
        omega.components.shape[1:], ginv.shape[2:]), dtype=complex)
    for i, I in enumerate(tuples):
        for j, Jt in enumerate(tuples):
            sub = ginv[np.ix_(I, Jt)]
            minor = np.linalg.det(np.moveaxis(np.moveaxis(sub, 0, -1), 0, -1))
            out[i] = out[i] + minor * omega.components[j]
    return out


def hodge_dual(omega: DifferentialForm, frame: Vielbein | None = None) -> DifferentialForm:
    n, k = omega.n, omega.degree
    if k > n:
        raise ValueError("degree out of range")
    raised = _raised(omega, frame)
    weight = 1.0 if frame is None else frame.sqrt_det
    pos = _positions(n, k)
    coef = math.factorial(k) / math.factorial(n - k)
    comps = []
    for J in index_tuples(n, n - k):
        I = tuple(sorted(set(range(n)) - set(J)))
        comps.append(coef * levi_civita_sign(I + J) * raised[pos[I]] * weight)
    shape = np.broadcast_shapes(*(c.shape for c in comps)) if comps else omega.components.shape[1:]
    return DifferentialForm(omega.grid, n - k, np.array([np.broadcast_to(c, shape) for c in comps]))


def exterior_derivative(omega: DifferentialForm, mode: str | None = None) -> DifferentialForm:
    """(d omega)_J = 1/(k+1) sum_i (-1)^i d_{j_i} omega_{J without j_i}."""
    n, k, grid = omega.n, omega.degree, omega.grid
    if k >= n:
        return DifferentialForm(grid, k + 1, np.zeros((0,) + grid.shape))
    pos = _positions(n, k)
    out = []
    for J in index_tuples(n, k + 1):
        acc = np.zeros(grid.shape, dtype=complex)
        for i, j in enumerate(J):
            rest = J[:i] + J[i + 1:]
            acc = acc + (-1) ** i * derivative(omega.components[pos[rest]], j, grid, mode)
        out.append(acc / (k + 1))
    return DifferentialForm(grid, k + 1, np.array(out))


def codifferential(omega: DifferentialForm, frame: Vielbein | None = None,
                   mode: str | None = None) -> DifferentialForm:
    """delta = - * d * ."""
    return -hodge_dual(exterior_derivative(hodge_dual(omega, frame), mode), frame)


def form_inner(alpha: DifferentialForm, beta: DifferentialForm) -> complex:
    """Flat L2 pairing in the averaged-component convention: (k!)^2 sum_I conj(a_I) b_I.

    The weight makes ``codifferential`` the formal adjoint of ``exterior_derivative``.
    """
    if alpha.degree != beta.degree:
        raise ValueError("forms of different degree")
    grid = alpha.grid
    w = math.factorial(alpha.degree) ** 2
    dens = np.sum(np.conj(alpha.components) * beta.components, axis=0)
    return complex(w * np.sum(np.broadcast_to(dens, grid.shape)) * grid.cell_volume)


def local_gammas(rep: GammaRep, frame: Vielbein | None = None) -> np.ndarray:
    """Coordinate gammas gamma^mu = e^mu_a gamma^a, shape (n, d, d, *grid-or-1)."""
    g = np.array(rep.gammas)
    n = rep.n
    if frame is None:
        return g.reshape(g.shape + (1,) * n)
    return np.einsum("ma...,aij->mij...", frame.inverse, g)


def matmul_fields(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.einsum("ij...,jk...->ik...", A, B)


def clifford_action(omega: DifferentialForm, rep: GammaRep, frame: Vielbein | None = None) -> np.ndarray:
    """c(omega) = sum over all tuples of omega_{mu..} gamma^mu ..., as a matrix field."""
    n, k = omega.n, omega.degree
    gam = local_gammas(rep, frame)
    d = rep.dim
    eye = np.eye(d).reshape((d, d) + (1,) * n)
    total = None
    for idx, I in enumerate(omega.tuples):
        anti = None
        for perm in itertools.permutations(I):
            prod = eye
            for mu in perm:
                prod = matmul_fields(prod, gam[mu])
            term = _perm_sign(perm) * prod
            anti = term if anti is None else anti + term
        if anti is None:
            anti = eye
        contrib = anti * omega.components[idx][None, None]
        total = contrib if total is None else total + contrib
    if total is None:
        total = np.zeros((d, d) + (1,) * n, dtype=complex)
    return total
