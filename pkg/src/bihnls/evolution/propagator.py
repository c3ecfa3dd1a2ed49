"""Free flow, Duhamel integral and the conserved quantities on a periodic grid.

Sign conventions: with lambda(xi) = |xi|^4 - mu |xi|^2 the free flow is
U(t) = exp(i t lambda) on the Fourier side, and the equation
i u_t + (Delta^2 + mu Delta) u + F = 0 reads u_t = i (Delta^2 + mu Delta) u + i F,
so u(t) = U(t) phi + i G[F](t) with G[F](t) = int_0^t U(t - s) F(s) ds.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..grid import Grid, GridField

__all__ = [
    "free_propagate", "free_evolution", "duhamel", "duhamel_constant_forcing",
    "mass", "kinetic_energy", "hs_norm", "homogeneous_norm", "lattice_zeta",
]


def free_propagate(field: GridField, t: float, mu: int) -> GridField:
    """U(t) field, exact on the grid."""
    g = field.grid
    phase = np.exp(1j * t * g.symbol(mu))
    return GridField(g, g.ifft(phase * g.fft(field.samples)))


def free_evolution(field: GridField, times: np.ndarray, mu: int) -> np.ndarray:
    """Samples of U(t) field at every t in ``times``, time along axis 0."""
    g = field.grid
    spec = g.fft(field.samples)
    lam = g.symbol(mu)
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size,) + g.shape, dtype=complex)
    for n, t in enumerate(times):
        out[n] = g.ifft(np.exp(1j * t * lam) * spec)
    return out


def _product_weights(z: np.ndarray) -> tuple:
    """Exact weights of int_0^1 e^{z(1-u)} [(1-u) a + u b] du for a and b."""
    small = np.abs(z) < 1e-2
    zs = np.where(small, 1.0, z)
    ez = np.exp(zs)
    w_prev = np.where(small, 0.5 + z / 3 + z * z / 8 + z ** 3 / 30,
                      (zs * ez - ez + 1) / (zs * zs))
    w_cur = np.where(small, 0.5 + z / 6 + z * z / 24 + z ** 3 / 120,
                     (ez - 1 - zs) / (zs * zs))
    return w_prev, w_cur


SCHEMES = ("product", "trapezoid")


def duhamel(forcing: np.ndarray, mu: int, T: float, grid: Grid, scheme: str = "product") -> np.ndarray:
    """G[F](t_n) on the uniform grid t_n = n T / (nt - 1); second order in dt.

    ``product`` interpolates F linearly on each step and integrates the
    propagator exactly against it, so stiff modes with dt |xi|^4 >> 1 stay
    accurate.  ``trapezoid`` is the plain rule G_n = E G_{n-1} + dt/2 (E F_{n-1} + F_n)
    with E = U(dt) exact.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    forcing = np.asarray(forcing, dtype=complex)
    nt = forcing.shape[0]
    out = np.zeros_like(forcing)
    if nt < 2:
        return out
    dt = T / (nt - 1)
    z = 1j * dt * grid.symbol(mu)
    step = np.exp(z)
    if scheme == "product":
        w_prev, w_cur = _product_weights(z)
        w_prev, w_cur = dt * w_prev, dt * w_cur
    else:
        w_prev, w_cur = 0.5 * dt * step, 0.5 * dt
    acc = np.zeros(grid.shape, dtype=complex)
    prev = grid.fft(forcing[0])
    for n in range(1, nt):
        cur = grid.fft(forcing[n])
        acc = step * acc + w_prev * prev + w_cur * cur
        out[n] = grid.ifft(acc)
        prev = cur
    return out


def duhamel_constant_forcing(forcing: GridField, times: np.ndarray, mu: int) -> np.ndarray:
    """Closed form of G[F](t) for F independent of time, frequency by frequency."""
    g = forcing.grid
    lam = g.symbol(mu)
    spec = g.fft(forcing.samples)
    out = np.empty((len(times),) + g.shape, dtype=complex)
    small = np.abs(lam) < 1e-300
    safe = np.where(small, 1.0, lam)
    for n, t in enumerate(times):
        w = np.where(small, t, np.expm1(1j * t * safe) / (1j * safe))
        out[n] = g.ifft(w * spec)
    return out


def mass(field: GridField) -> float:
    """Integral of |u|^2."""
    return float(np.sum(np.abs(field.samples) ** 2) * field.grid.cell)


def _parseval(field: GridField, weight: np.ndarray) -> float:
    g = field.grid
    spec = np.abs(g.fft(field.samples)) ** 2
    return float(np.sum(weight * spec) * g.cell / spec.size)


def kinetic_energy(field: GridField, mu: int) -> float:
    """Integral of (|Delta u|^2 - mu |grad u|^2) / 2, spectrally."""
    k2 = field.grid.xi2
    return 0.5 * _parseval(field, k2 * k2 - mu * k2)


def hs_norm(field: GridField, s) -> float:
    """Inhomogeneous Sobolev norm with weight (1 + |xi|^2)^s."""
    return math.sqrt(_parseval(field, (1.0 + field.grid.xi2) ** float(s)))


@lru_cache(maxsize=64)
def lattice_zeta(N: int, s: float) -> float:
    """Analytic continuation of sum over nonzero k in Z^N of |k|^{2s}.

    Only N = 1, 2 have closed forms: 2 zeta(-2s) and 4 zeta(-s) beta(-s).
    """
    import mpmath
    if N == 1:
        return float(2 * mpmath.zeta(-2 * s))
    if N == 2:
        return float(4 * mpmath.zeta(-s) * mpmath.dirichlet(-s, [0, 1, 0, -1]))
    raise ValueError("closed form only for N = 1, 2")


def homogeneous_norm(field: GridField, s, pad: int | None = None, correct: bool = True) -> float:
    """Homogeneous Sobolev norm of a field that decays inside the box.

    The field is zero-extended by ``pad`` per axis to refine the frequency
    lattice.  The weight |xi|^{2s} is not smooth at 0, so the lattice sum
    carries an error h^{N+2s} Z_N(-s) |u_hat(0)|^2 / (2 pi)^N to leading order;
    with ``correct`` it is subtracted (N = 1, 2).
    """
    s = float(s)
    g = field.grid
    N = g.N
    if s <= -N / 2:
        raise ValueError("homogeneous norm needs s > -N/2 for data with nonzero mean")
    if pad is None:
        pad = {1: 8, 2: 4, 3: 2}.get(N, 1)
    M = g.M * pad
    big = np.zeros((M,) * N, dtype=complex)
    lo = (M - g.M) // 2
    big[(slice(lo, lo + g.M),) * N] = field.samples
    h = 2 * math.pi / (M * g.dx)
    axes1 = 2 * math.pi * np.fft.fftfreq(M, d=g.dx)
    k2 = sum(a * a for a in np.meshgrid(*([axes1] * N), indexing="ij", sparse=True))
    uhat = np.fft.fftn(big) * g.cell
    dens = np.abs(uhat) ** 2
    weight = np.where(k2 > 0, k2, 1.0) ** s
    weight = np.where(k2 > 0, weight, 1.0 if s == 0 else 0.0)
    total = float(np.sum(weight * dens)) * (h / (2 * math.pi)) ** N
    if correct and N in (1, 2) and s != 0:
        total -= lattice_zeta(N, s) * h ** (N + 2 * s) * float(dens.flat[0]) / (2 * math.pi) ** N
    return math.sqrt(max(total, 0.0))
