"""Periodic grids, sampled fields and the flat binary field format."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = ["Grid", "TimeGrid", "GridField", "write_field", "read_field"]

_HEADER = struct.Struct("<IId")     # N, M as u32; L as f64


@dataclass(frozen=True)
class Grid:
    """Uniform grid on the torus [-L, L)^N with M points per axis."""

    N: int
    M: int
    L: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.M < 8 or self.M & (self.M - 1):
            raise ValueError(f"M = {self.M} must be a power of two, at least 8")
        if not self.L > 0:
            raise ValueError("L must be positive")
        object.__setattr__(self, "L", float(self.L))

    @property
    def shape(self) -> tuple:
        return (self.M,) * self.N

    @property
    def dx(self) -> float:
        return 2 * self.L / self.M

    @property
    def cell(self) -> float:
        return self.dx ** self.N

    @property
    def nyquist(self) -> float:
        return np.pi / self.dx

    @cached_property
    def x_axis(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.M)

    @cached_property
    def xi_axis(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.M, d=self.dx)

    @cached_property
    def x(self) -> tuple:
        return tuple(np.meshgrid(*([self.x_axis] * self.N), indexing="ij"))

    @cached_property
    def xi(self) -> tuple:
        return tuple(np.meshgrid(*([self.xi_axis] * self.N), indexing="ij"))

    @cached_property
    def r2(self) -> np.ndarray:
        return sum(c * c for c in self.x)

    @cached_property
    def xi2(self) -> np.ndarray:
        return sum(k * k for k in self.xi)

    def symbol(self, mu: int) -> np.ndarray:
        """|xi|^4 - mu |xi|^2, the dispersion relation."""
        return self.xi2 * self.xi2 - mu * self.xi2

    def fft(self, u: np.ndarray) -> np.ndarray:
        axes = tuple(range(u.ndim - self.N, u.ndim))
        return np.fft.fftn(u, axes=axes)

    def ifft(self, u: np.ndarray) -> np.ndarray:
        axes = tuple(range(u.ndim - self.N, u.ndim))
        return np.fft.ifftn(u, axes=axes)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.N, self.M * factor, self.L)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time samples t_n = t0 + n dt, n = 0..nt-1."""

    nt: int
    dt: float
    t0: float = 0.0

    @property
    def span(self) -> float:
        return self.nt * self.dt

    @cached_property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nt)

    @cached_property
    def tau_axis(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.nt, d=self.dt)

    @property
    def nyquist(self) -> float:
        return np.pi / self.dt


class GridField:
    """Complex samples of one function on a Grid."""

    __slots__ = ("grid", "samples")

    def __init__(self, grid: Grid, samples):
        samples = np.asarray(samples, dtype=complex)
        if samples.shape != grid.shape:
            raise ValueError(f"samples of shape {samples.shape} do not fit grid {grid.shape}")
        self.grid = grid
        self.samples = samples

    @classmethod
    def from_function(cls, grid: Grid, f) -> "GridField":
        return cls(grid, f(*grid.x))

    @classmethod
    def zeros(cls, grid: Grid) -> "GridField":
        return cls(grid, np.zeros(grid.shape, complex))

    @property
    def N(self) -> int:
        return self.grid.N

    @property
    def M(self) -> int:
        return self.grid.M

    @property
    def L(self) -> float:
        return self.grid.L

    def spectrum(self) -> np.ndarray:
        return self.grid.fft(self.samples)

    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.grid.cell))

    def boundary_max(self) -> float:
        """Largest |u| on the outermost shell of grid points."""
        u = np.abs(self.samples)
        out = 0.0
        for ax in range(self.N):
            out = max(out, float(np.take(u, 0, axis=ax).max()), float(np.take(u, -1, axis=ax).max()))
        return out

    def __add__(self, other: "GridField") -> "GridField":
        return GridField(self.grid, self.samples + other.samples)

    def __mul__(self, c) -> "GridField":
        return GridField(self.grid, self.samples * c)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"GridField(N={self.N}, M={self.M}, L={self.L})"


def write_field(path, field: GridField) -> None:
    g = field.grid
    body = np.ascontiguousarray(field.samples, dtype="<c16").view("<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(g.N, g.M, g.L))
        fh.write(body.tobytes())


def read_field(path) -> GridField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    N, M, L = _HEADER.unpack_from(raw)
    grid = Grid(N, M, L)
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if data.size != 2 * M ** N:
        raise ValueError(f"{path}: expected {2 * M ** N} doubles, found {data.size}")
    samples = (data[0::2] + 1j * data[1::2]).reshape(grid.shape)
    return GridField(grid, samples)
