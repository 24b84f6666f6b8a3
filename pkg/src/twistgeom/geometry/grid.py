"""Periodic flat torus grids, scalar and spinor fields, derivatives and quadrature.

Field arrays keep their component axes first and the ``n`` grid axes last.
Constant fields may use size-1 grid axes; numpy broadcasting does the rest.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

DERIVATIVE_MODES = ("spectral", "fd2")


@dataclass(frozen=True)
class TorusGrid:
    """A uniform periodic grid on the flat torus [0, L)^n.

    ``derivative`` selects the default scheme used by :func:`derivative`:
    ``"spectral"`` (FFT) or ``"fd2"`` (second-order central differences).
    """

    n: int
    N: int
    L: float = 2 * math.pi
    derivative: str = "spectral"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if self.N < 4:
            raise ValueError("points_per_axis must be >= 4")
        if self.L <= 0:
            raise ValueError("period must be positive")
        if self.derivative not in DERIVATIVE_MODES:
            raise ValueError(f"derivative mode must be one of {DERIVATIVE_MODES}")

    @property
    def spacing(self) -> float:
        return self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def npoints(self) -> int:
        return self.N ** self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.n

    @property
    def volume(self) -> float:
        return self.L ** self.n

    @property
    def const_shape(self) -> tuple[int, ...]:
        return (1,) * self.n

    @cached_property
    def axis_coords(self) -> np.ndarray:
        return np.arange(self.N) * self.spacing

    def coord(self, mu: int) -> np.ndarray:
        """Coordinate x^mu as a broadcastable array (size N along axis mu only)."""
        shape = [1] * self.n
        shape[mu] = self.N
        return self.axis_coords.reshape(shape)

    def coords(self) -> list[np.ndarray]:
        return [np.broadcast_to(self.coord(mu), self.shape) for mu in range(self.n)]

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers with the Nyquist mode set to zero (odd derivative)."""
        k = np.fft.fftfreq(self.N, d=1.0 / self.N) * (2 * math.pi / self.L)
        if self.N % 2 == 0:
            k[self.N // 2] = 0.0
        return k

    def with_derivative(self, mode: str) -> "TorusGrid":
        return TorusGrid(self.n, self.N, self.L, mode)


def is_constant(values: np.ndarray, grid: TorusGrid) -> bool:
    """True when all grid axes of ``values`` have size 1."""
    return values.ndim >= grid.n and all(s == 1 for s in values.shape[values.ndim - grid.n:])


def derivative(values: np.ndarray, mu: int, grid: TorusGrid, mode: str | None = None) -> np.ndarray:
    """Partial derivative along grid axis ``mu`` of an array with trailing grid axes."""
    mode = mode or grid.derivative
    if is_constant(values, grid):
        return np.zeros_like(values, dtype=complex)
    axis = values.ndim - grid.n + mu
    if values.shape[axis] == 1:
        # broadcast along mu, so constant in that direction
        return np.zeros(values.shape, dtype=complex)
    if mode == "spectral":
        shape = [1] * values.ndim
        shape[axis] = grid.N
        k = grid.wavenumbers.reshape(shape)
        return np.fft.ifft(1j * k * np.fft.fft(values, axis=axis), axis=axis)
    if mode == "fd2":
        return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2 * grid.spacing)
    raise ValueError(f"unknown derivative mode {mode!r}")


def derivative_multi(values: np.ndarray, alpha: tuple[int, ...], grid: TorusGrid,
                     mode: str | None = None) -> np.ndarray:
    out = values
    for mu in alpha:
        out = derivative(out, mu, grid, mode)
    return out


@dataclass(frozen=True)
class ScalarField:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        v = np.broadcast_to(v, self.grid.shape) if v.shape != self.grid.shape else v
        if not np.all(np.isfinite(v)):
            raise ValueError("scalar field has non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SpinorField:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape[1:] != self.grid.shape:
            raise ValueError(f"spinor values must have shape (d, {self.grid.shape})")
        if not np.all(np.isfinite(v)):
            raise ValueError("spinor field has non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))


def partial(field, mu: int, mode: str | None = None):
    """Derivative of a ScalarField, SpinorField or DifferentialForm along axis ``mu``."""
    from .forms import DifferentialForm

    if isinstance(field, ScalarField):
        return ScalarField(field.grid, derivative(field.values, mu, field.grid, mode))
    if isinstance(field, SpinorField):
        return SpinorField(field.grid, derivative(field.values, mu, field.grid, mode))
    if isinstance(field, DifferentialForm):
        return DifferentialForm(field.grid, field.degree,
                                derivative(field.components, mu, field.grid, mode))
    raise TypeError(f"cannot differentiate {type(field).__name__}")


def integrate(field, frame=None) -> complex:
    """Riemann sum  sum_p f(p) sqrt(det g(p)) Delta^n."""
    if isinstance(field, ScalarField):
        grid, values = field.grid, field.values
    else:
        grid, values = field
    weight = 1.0 if frame is None else frame.sqrt_det
    total = np.sum(np.broadcast_to(values * weight, grid.shape))
    return complex(total * grid.cell_volume)


def inner(psi: np.ndarray, phi: np.ndarray, grid: TorusGrid) -> complex:
    """L2 product <psi, phi>, antilinear in the first slot."""
    return complex(np.sum(np.conj(psi) * phi) * grid.cell_volume)


def random_band_limited(grid: TorusGrid, rng: np.random.Generator, components: int = 1,
                        max_mode: int = 2, real: bool = False) -> np.ndarray:
    """Random field with Fourier modes |k_mu| <= max_mode, scaled to max modulus 1."""
    if 2 * max_mode >= grid.N:
        raise ValueError("max_mode must stay below the Nyquist index")
    spec = np.zeros((components,) + grid.shape, dtype=complex)
    ks = list(range(-max_mode, max_mode + 1))
    idx = np.ix_(*([np.arange(components)] + [np.array(ks) % grid.N] * grid.n))
    block = rng.normal(size=(components,) + (len(ks),) * grid.n) \
        + 1j * rng.normal(size=(components,) + (len(ks),) * grid.n)
    spec[idx] = block
    axes = tuple(range(1, grid.n + 1))
    vals = np.fft.ifftn(spec, axes=axes)
    if real:
        vals = vals.real.astype(complex)
    vals /= np.max(np.abs(vals))
    return vals


def export_csv(path: str | Path, grid: TorusGrid, columns: dict[str, np.ndarray]) -> Path:
    """Write a CSV with point index, coordinates and one (re, im) pair per column."""
    path = Path(path)
    flat = {name: np.broadcast_to(np.asarray(v), grid.shape).reshape(-1) for name, v in columns.items()}
    coords = [c.reshape(-1) for c in grid.coords()]
    header = ["index"] + [f"x{mu}" for mu in range(grid.n)]
    for name in flat:
        header += [f"{name}_re", f"{name}_im"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for p in range(grid.npoints):
            row = [p] + [f"{c[p]:.17g}" for c in coords]
            for v in flat.values():
                row += [f"{v[p].real:.17g}", f"{v[p].imag:.17g}"]
            w.writerow(row)
    return path
