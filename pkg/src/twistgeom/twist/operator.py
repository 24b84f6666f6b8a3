"""Symbolic spinor operators: finite sums of matrix fields times partial derivatives.

An operator is ``O psi = sum_t M_t d^{alpha_t} psi`` (or ``conj(psi)`` in place of
``psi`` when it is antilinear). Matrix fields have shape ``(d, d, *grid)`` or
``(d, d, 1, ..., 1)`` when constant. Multi-indices are sorted tuples of axes.
Composition and adjoints expand products with the Leibniz rule.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..geometry.grid import SpinorField, TorusGrid, derivative_multi, is_constant

Term = tuple[np.ndarray, tuple[int, ...]]


def _mm(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.einsum("ij...,jk...->ik...", A, B)


def _mv(A: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("ij...,j...->i...", A, v)


def _dagger(A: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(A, 0, 1))


def _leibniz_splits(alpha: tuple[int, ...]):
    """Yield (derivatives on the coefficient, derivatives left on the field)."""
    for mask in itertools.product((0, 1), repeat=len(alpha)):
        on_coef = tuple(a for a, b in zip(alpha, mask) if b)
        on_field = tuple(a for a, b in zip(alpha, mask) if not b)
        yield on_coef, on_field


@dataclass(frozen=True)
class SpinorOperator:
    grid: TorusGrid
    dim: int
    terms: tuple[Term, ...]
    antilinear: bool = False

    # construction -------------------------------------------------------
    @classmethod
    def multiplication(cls, grid: TorusGrid, M, antilinear: bool = False) -> "SpinorOperator":
        M = np.asarray(M, dtype=complex)
        if M.ndim == 2:
            M = M.reshape(M.shape + grid.const_shape)
        return cls(grid, M.shape[0], ((M, ()),), antilinear)

    @classmethod
    def identity(cls, grid: TorusGrid, dim: int) -> "SpinorOperator":
        return cls.multiplication(grid, np.eye(dim))

    @classmethod
    def zero(cls, grid: TorusGrid, dim: int) -> "SpinorOperator":
        return cls(grid, dim, ())

    # application --------------------------------------------------------
    def apply(self, psi) -> np.ndarray:
        values = psi.values if isinstance(psi, SpinorField) else np.asarray(psi, dtype=complex)
        src = np.conj(values) if self.antilinear else values
        cache: dict[tuple[int, ...], np.ndarray] = {}
        out = np.zeros(values.shape, dtype=complex)
        for M, alpha in self.terms:
            if alpha not in cache:
                cache[alpha] = derivative_multi(src, alpha, self.grid)
            out = out + _mv(M, cache[alpha])
        return out

    __call__ = apply

    # algebra ------------------------------------------------------------
    def _check(self, other: "SpinorOperator"):
        if other.grid != self.grid or other.dim != self.dim:
            raise ValueError("operators live on different grids or spinor dimensions")

    def __add__(self, other: "SpinorOperator") -> "SpinorOperator":
        self._check(other)
        if self.antilinear != other.antilinear:
            if not self.terms:
                return other
            if not other.terms:
                return self
            raise ValueError("cannot add a linear and an antilinear operator")
        return SpinorOperator(self.grid, self.dim, self.terms + other.terms, self.antilinear).canonical()

    def __neg__(self) -> "SpinorOperator":
        return SpinorOperator(self.grid, self.dim, tuple((-M, a) for M, a in self.terms), self.antilinear)

    def __sub__(self, other: "SpinorOperator") -> "SpinorOperator":
        return self + (-other)

    def __mul__(self, c) -> "SpinorOperator":
        """Left multiplication by a complex scalar."""
        return SpinorOperator(self.grid, self.dim, tuple((c * M, a) for M, a in self.terms), self.antilinear)

    __rmul__ = __mul__

    def __matmul__(self, other: "SpinorOperator") -> "SpinorOperator":
        return self.compose(other)

    def compose(self, other: "SpinorOperator") -> "SpinorOperator":
        """self o other, expanded to canonical form."""
        self._check(other)
        out: list[Term] = []
        for M, alpha in self.terms:
            for N, beta in other.terms:
                if self.antilinear:
                    N = np.conj(N)
                for on_coef, on_field in _leibniz_splits(alpha):
                    if on_coef and is_constant(N, self.grid):
                        continue
                    dN = derivative_multi(N, on_coef, self.grid) if on_coef else N
                    out.append((_mm(M, dN), tuple(sorted(on_field + beta))))
        return SpinorOperator(self.grid, self.dim, tuple(out),
                              self.antilinear != other.antilinear).canonical()

    def adjoint(self) -> "SpinorOperator":
        """L2 adjoint via integration by parts (exact for spectral derivatives).

        (M d^a)^dagger = (-1)^|a| d^a o M^dagger; for an antilinear term
        M d^a conj, the adjoint is (-1)^|a| d^a o M^T o conj.
        """
        out: list[Term] = []
        for M, alpha in self.terms:
            Md = np.swapaxes(M, 0, 1) if self.antilinear else _dagger(M)
            sign = (-1) ** len(alpha)
            for on_coef, on_field in _leibniz_splits(alpha):
                if on_coef and is_constant(Md, self.grid):
                    continue
                dM = derivative_multi(Md, on_coef, self.grid) if on_coef else Md
                out.append((sign * dM, tuple(sorted(on_field))))
        return SpinorOperator(self.grid, self.dim, tuple(out), self.antilinear).canonical()

    def conjugate_by(self, left: np.ndarray, right: np.ndarray) -> "SpinorOperator":
        """left o self o right for constant matrices ``left`` and ``right``."""
        L = SpinorOperator.multiplication(self.grid, left)
        R = SpinorOperator.multiplication(self.grid, right)
        return L @ self @ R

    # canonical form and inspection --------------------------------------
    def canonical(self) -> "SpinorOperator":
        """Merge terms with equal multi-index; constant-ness is preserved where possible."""
        merged: dict[tuple[int, ...], np.ndarray] = {}
        for M, alpha in self.terms:
            if alpha in merged:
                merged[alpha] = merged[alpha] + M
            else:
                merged[alpha] = M
        keys = sorted(merged, key=lambda a: (len(a), a))
        return SpinorOperator(self.grid, self.dim, tuple((merged[a], a) for a in keys), self.antilinear)

    def coefficient(self, alpha: tuple[int, ...]) -> np.ndarray:
        alpha = tuple(sorted(alpha))
        total = np.zeros((self.dim, self.dim) + self.grid.const_shape, dtype=complex)
        for M, a in self.terms:
            if a == alpha:
                total = total + M
        return total

    def order(self, tol: float = 0.0) -> int:
        """Highest derivative order whose coefficient exceeds ``tol`` somewhere."""
        orders = [len(a) for M, a in self.terms if np.max(np.abs(M)) > tol]
        return max(orders) if orders else -1

    def order_part(self, k: int) -> "SpinorOperator":
        return SpinorOperator(self.grid, self.dim, tuple(t for t in self.terms if len(t[1]) == k),
                              self.antilinear)

    def max_coefficient(self) -> float:
        return max((float(np.max(np.abs(M))) for M, _ in self.terms), default=0.0)

    def summary(self) -> dict:
        """JSON-friendly description: matrix-field hashes, multi-indices, antilinearity."""
        terms = []
        for M, alpha in self.canonical().terms:
            rounded = np.round(np.ascontiguousarray(M), 12) + 0.0
            digest = hashlib.sha256(rounded.tobytes()).hexdigest()[:16]
            terms.append({"derivative": list(alpha), "order": len(alpha),
                          "constant": is_constant(M, self.grid), "matrix_sha256": digest})
        return {"dim": self.dim, "antilinear": self.antilinear, "terms": terms}


def random_spinors(grid: TorusGrid, dim: int, count: int, rng: np.random.Generator,
                   max_mode: int = 2) -> list[np.ndarray]:
    from ..geometry.grid import random_band_limited

    return [random_band_limited(grid, rng, dim, max_mode) for _ in range(count)]


def operator_deviation(A: SpinorOperator, B: SpinorOperator, fields) -> float:
    """max over the battery of max |A psi - B psi| (both must share linearity)."""
    if A.antilinear != B.antilinear:
        raise ValueError("comparing a linear with an antilinear operator")
    return max(float(np.max(np.abs(A(psi) - B(psi)))) for psi in fields)


def structural_deviation(A: SpinorOperator, B: SpinorOperator) -> float:
    """Max entrywise difference between canonical coefficient fields."""
    diff = (A - B)
    return diff.max_coefficient()


def sum_operators(ops) -> SpinorOperator:
    ops = list(ops)
    total = ops[0]
    for op in ops[1:]:
        total = total + op
    return total


def group_terms(terms) -> dict[int, list]:
    by_order: dict[int, list] = defaultdict(list)
    for M, alpha in terms:
        by_order[len(alpha)].append((M, alpha))
    return dict(by_order)
