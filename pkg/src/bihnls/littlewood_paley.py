"""Dyadic frequency partitions, Besov norms and the K_j kernel on periodic grids.

The bump is the usual exp(-1/t) gluing.  ``cap`` is 1 on [0, 1] and 0 from 2 on,
and the dyadic block is phi(x) = cap(x) - cap(2x), supported in [1/2, 2].  The
low-frequency piece psi = cap is the closed form of the sum over k <= 0, so the
bank telescopes: psi(a) + sum_{k=1..K} phi(a / 2^k) = cap(a / 2^K).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .errors import GridTooCoarse, PartitionMismatch, ResonanceUnresolved, SupportNotCovered
from .exponents import ExtRational, as_ext, as_fraction, inv
from .grid import Grid, GridField, TimeGrid

__all__ = [
    "smooth_step", "cap", "profile", "DyadicPartition", "build_dyadic_partition",
    "lp_norm", "besov_norm_spatial", "besov_norm_modified", "besov_norm_temporal",
    "temporal_besov_parts", "mixed_norm", "chi_hat", "kernel_Kj", "kernel_lattice",
    "KernelResult",
]

Exponent = Union[ExtRational, Fraction, int, str, float]


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def cap(x):
    """Smooth even cutoff: 1 for |x| <= 1, 0 for |x| >= 2."""
    # 1 - smooth_step(t) = smooth_step(1 - t) keeps the tail accurate near |x| = 2
    return smooth_step(2.0 - np.abs(x))


def profile(x):
    """Dyadic bump cap(x) - cap(2x), supported in 1/2 <= |x| <= 2.

    Evaluated piecewise so that neither edge loses its tail to cancellation.
    """
    a = np.abs(np.asarray(x, dtype=float))
    return np.where(a <= 1.0, smooth_step(2.0 * a - 1.0), smooth_step(2.0 - a))


def _expo(p: Exponent) -> float:
    """Exponent as a float, with inf for the point at infinity."""
    if isinstance(p, float):
        return p
    e = as_ext(p)
    return math.inf if e.is_inf else float(e.fraction())


def lp_norm(values: np.ndarray, p: Exponent, cell: float = 1.0, axes=None) -> np.ndarray:
    """Quadrature L^p norm over ``axes`` (all axes by default)."""
    p = _expo(p)
    a = np.abs(values)
    if p == math.inf:
        return a.max(axis=axes)
    return (np.sum(a ** p, axis=axes) * cell) ** (1.0 / p)


def _lq_sum(terms, q: float) -> float:
    terms = np.asarray(terms, dtype=float)
    if terms.size == 0:
        return 0.0
    if q == math.inf:
        return float(terms.max())
    return float(np.sum(terms ** q) ** (1.0 / q))


# ---------------------------------------------------------------- partitions

FLAVORS = ("standard", "modified", "temporal")


@dataclass(frozen=True, eq=False)
class DyadicPartition:
    """Multiplier bank psi, phi_1..phi_kmax on a frequency lattice.

    ``argument`` holds the lattice quantity the bumps are evaluated at:
    |xi|, |xi|^4 - mu |xi|^2 or |tau| depending on the flavor.
    """

    flavor: str
    mu: int
    shape: tuple
    argument: np.ndarray
    psi: np.ndarray
    phi: tuple
    k_max: int
    geometry: object

    def total(self) -> np.ndarray:
        return self.psi + sum(self.phi)

    def deviation(self) -> float:
        """Largest |psi + sum phi_k - 1| over the lattice."""
        return float(np.abs(self.total() - 1.0).max())

    def block(self, k: int) -> np.ndarray:
        """Multiplier of block k (k = 0 is psi)."""
        return self.psi if k == 0 else self.phi[k - 1]

    def check_matches(self, shape, flavor=None, mu=None) -> None:
        if tuple(shape) != self.shape:
            raise PartitionMismatch(f"partition built for {self.shape}, field has {tuple(shape)}")
        if flavor is not None and flavor != self.flavor:
            raise PartitionMismatch(f"expected a {flavor} partition, got {self.flavor}")
        if mu is not None and mu != self.mu:
            raise PartitionMismatch(f"partition built for mu={self.mu}, asked for mu={mu}")


def build_dyadic_partition(geometry: Union[Grid, TimeGrid], flavor: str = "standard",
                           mu: int = 0) -> DyadicPartition:
    """Build the bank for a spatial Grid (standard, modified) or a TimeGrid (temporal)."""
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    if flavor == "temporal":
        if not isinstance(geometry, TimeGrid):
            raise ValueError("temporal flavor needs a TimeGrid")
        arg = np.abs(geometry.tau_axis)
        shape = (geometry.nt,)
    else:
        if not isinstance(geometry, Grid):
            raise ValueError(f"{flavor} flavor needs a Grid")
        shape = geometry.shape
        if flavor == "standard":
            arg = np.sqrt(geometry.xi2)
        else:
            if mu not in (0, -1):
                raise ValueError("mu must be 0 or -1")
            arg = geometry.symbol(mu)
    top = float(arg.max())
    k_max = max(1, math.ceil(math.log2(top))) if top > 0 else 1
    while 2.0 ** k_max < top:
        k_max += 1
    if k_max < 3:
        raise GridTooCoarse(f"k_max = {k_max} < 3: the lattice resolves arguments only up to {top:.3g}")
    psi = cap(arg)
    phi = tuple(profile(arg / 2.0 ** k) for k in range(1, k_max + 1))
    return DyadicPartition(flavor, mu if flavor == "modified" else 0, shape, arg, psi, phi, k_max, geometry)


# ---------------------------------------------------------------- Besov norms

def _besov(field: GridField, s, p, q, part: DyadicPartition, step: float) -> float:
    grid = field.grid
    p, q = _expo(p), _expo(q)
    spec = field.spectrum()
    low = float(lp_norm(grid.ifft(part.psi * spec), p, grid.cell))
    s = float(s)
    terms = [2.0 ** (s * k * step) * float(lp_norm(grid.ifft(m * spec), p, grid.cell))
             for k, m in enumerate(part.phi, start=1)]
    return low + _lq_sum(terms, q)


def besov_norm_spatial(field: GridField, s, p, q, partition: DyadicPartition) -> float:
    """Inhomogeneous B^s_{p,q} norm from the standard bank."""
    partition.check_matches(field.grid.shape, "standard")
    return _besov(field, s, p, q, partition, 1.0)


def besov_norm_modified(field: GridField, s, p, q, mu: int, partition: DyadicPartition) -> float:
    """B^s_{p,q} norm with blocks cut along the dispersion symbol and weights 2^{sj/4}."""
    partition.check_matches(field.grid.shape, "modified", mu)
    return _besov(field, s, p, q, partition, 0.25)


# ---------------------------------------------------------------- time direction

def _default_vnorm(cell: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    def vnorm(u: np.ndarray) -> np.ndarray:
        axes = tuple(range(1, u.ndim))
        if not axes:
            return np.abs(u)
        return np.sqrt(np.sum(np.abs(u) ** 2, axis=axes) * cell)
    return vnorm


@dataclass(frozen=True)
class TemporalBesovParts:
    lq: float
    seminorm: float
    shells: tuple       # (tau, tau^{-theta} ||u - u(. - tau)||) per shift
    boundary: float     # part of the seminorm from pairs with a sample outside the support

    @property
    def total(self) -> float:
        return self.lq + self.seminorm


def temporal_besov_parts(series: np.ndarray, dt: float, theta, q,
                         vnorm: Optional[Callable] = None, decay_tol: float = 1e-8) -> TemporalBesovParts:
    """Pieces of the temporal B^theta_{q,q}(V) norm of samples u(t_n) taken ``dt`` apart.

    ``series`` has time along axis 0; ``vnorm`` maps it to per-time V-norms
    (spatial L^2 with unit cell by default).  The series is extended by zero
    outside the sampled window, so it must decay at both ends.
    """
    theta = float(theta)
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    q = _expo(q)
    vnorm = vnorm or _default_vnorm()
    series = np.asarray(series)
    nt = series.shape[0]
    norms = np.asarray(vnorm(series), dtype=float)
    peak = float(norms.max())
    if peak > 0 and max(norms[0], norms[-1]) > decay_tol * peak:
        raise SupportNotCovered(
            f"series does not decay at the window ends: {max(norms[0], norms[-1]) / peak:.2e} of its peak")

    def lq_time(values: np.ndarray) -> float:
        return float(lp_norm(values, q, dt))

    lq = lq_time(norms)
    # jumps at the edges of the support count as boundary, differences inside it do not
    inside = norms > decay_tol * peak
    span = nt * dt
    m_max = max(0, int(math.floor(math.log2(span / dt))) - 1)
    shells, contrib, edge = [], [], []
    for m in range(m_max + 1):
        tau = span / 2.0 ** m
        shift = int(round(tau / dt))
        if shift < 1 or shift >= nt:
            continue
        tau = shift * dt
        pad = np.zeros((shift,) + series.shape[1:], dtype=series.dtype)
        ext = np.concatenate([pad, series, pad])
        diff = ext[shift:] - ext[:-shift]
        dn = np.asarray(vnorm(diff), dtype=float)
        both = inside[shift:] & inside[:-shift]
        interior = np.asarray(vnorm(series[shift:] - series[:-shift]), dtype=float) * both
        # both signs of tau give the same value under zero extension
        for sign in (1, -1):
            val = tau ** (-theta) * lq_time(dn)
            shells.append((sign * tau, val))
            contrib.append(val)
            edge.append(max(0.0, val - tau ** (-theta) * lq_time(interior)))
    w = math.log(2.0)
    if q == math.inf:
        semi = max(contrib, default=0.0)
        bnd = max(edge, default=0.0)
    else:
        semi = (sum(c ** q for c in contrib) * w) ** (1.0 / q)
        bnd = (sum(c ** q for c in edge) * w) ** (1.0 / q)
    return TemporalBesovParts(lq, semi, tuple(shells), bnd)


def besov_norm_temporal(series: np.ndarray, dt: float, theta, q,
                        vnorm: Optional[Callable] = None) -> float:
    """||u||_{L^q V} plus the dyadic-quadrature difference seminorm of order theta."""
    return temporal_besov_parts(series, dt, theta, q, vnorm).total


def mixed_norm(samples: np.ndarray, dt: float, cell: float, q, r) -> float:
    """L^q_t L^r_x norm of spacetime samples (time along axis 0)."""
    samples = np.asarray(samples)
    axes = tuple(range(1, samples.ndim))
    per_t = lp_norm(samples, r, cell, axes=axes)
    return float(lp_norm(per_t, q, dt))


# ---------------------------------------------------------------- kernel K_j

def chi_hat(tau, j: int):
    """Sum of the homogeneous blocks j-2..j+2 at |tau|; equals 1 on [2^{j-2}, 2^{j+2}]."""
    a = np.abs(np.asarray(tau, dtype=float))
    return cap(a / 2.0 ** (j + 2)) - cap(a / 2.0 ** (j - 3))


def kernel_lattice(j: int, span_units: float = 256.0, resolve: int = 5) -> TimeGrid:
    """Time lattice scaled to block j: Nyquist 2^{j+resolve}, span ``span_units`` * 2^{-j}."""
    dt = math.pi / 2.0 ** (j + resolve)
    nt = 1 << max(3, math.ceil(math.log2(span_units * 2.0 ** -j / dt)))
    return TimeGrid(nt, dt, -nt * dt / 2)


@dataclass(frozen=True)
class KernelResult:
    j: int
    samples: np.ndarray     # (nt, *grid.shape), time axis centred on t = 0
    tgrid: TimeGrid
    grid: Grid
    norm: float
    min_gap: float          # smallest |tau - lambda| on the retained set

    def __iter__(self):
        yield self.samples
        yield self.norm


def kernel_Kj(j: int, s, mu: int, grid: Grid, q, r, tgrid: Optional[TimeGrid] = None,
              check_scaling: bool = True) -> KernelResult:
    """Spacetime kernel of the inhomogeneous block estimate, and its L^q_t L^r_x norm.

    The multiplier phi(lambda / 2^j)(1 - chi_j(tau)) / (i (tau - lambda)), with
    lambda = |xi|^4 - mu |xi|^2, is inverted on the tau x xi lattice.
    """
    if j < 1:
        raise ValueError("j must be at least 1")
    if mu not in (0, -1):
        raise ValueError("mu must be 0 or -1")
    sf = float(s)
    if not 0 < sf < 4:
        raise ValueError("s must lie in (0, 4)")
    if check_scaling:
        lhs = 4 * inv(q) - grid.N * (1 - inv(r))
        same = abs(float(lhs) - sf) < 1e-12 if isinstance(s, float) else lhs == as_fraction(s)
        if not same:
            raise ValueError(f"4/q - N(1 - 1/r) = {lhs} differs from s = {s}")
    tgrid = tgrid or kernel_lattice(j)
    lam = grid.symbol(mu)
    lam_top = float(lam.max())
    if 2.0 ** (j + 1) > lam_top:
        raise ResonanceUnresolved(
            f"block j={j} needs |xi|^4 - mu|xi|^2 up to {2.0 ** (j + 1):g}; the grid reaches {lam_top:.4g}")
    if 2.0 ** (j + 3) > tgrid.nyquist:
        raise ResonanceUnresolved(
            f"cutoff chi_{j} reaches |tau| = {2.0 ** (j + 3):g}; time Nyquist is {tgrid.nyquist:.4g}")
    tau = tgrid.tau_axis.reshape((-1,) + (1,) * grid.N)
    space = profile(lam / 2.0 ** j)[None]
    cut = 1.0 - chi_hat(tau, j)
    active = (space != 0) & (cut != 0)
    gap = np.abs(tau - lam[None])
    min_gap = float(gap[active].min()) if active.any() else math.inf
    if min_gap < 2.0 ** (j - 2) * (1 - 1e-12):
        raise ResonanceUnresolved(f"|tau - lambda| drops to {min_gap:.3g} < 2^{j - 2} on the retained set")
    denom = np.where(active, 1j * (tau - lam[None]), 1.0)
    mult = np.where(active, space * cut / denom, 0.0)
    axes = tuple(range(mult.ndim))
    # (2 pi)^{-(N+1)} integral over the lattice = ifftn / (dt dx^N), up to the phase of t0
    k = np.fft.ifftn(mult, axes=axes) / (tgrid.dt * grid.cell)
    k = np.fft.fftshift(k, axes=(0,))
    k = np.fft.fftshift(k, axes=tuple(range(1, k.ndim)))
    norm = mixed_norm(k, tgrid.dt, grid.cell, q, r)
    return KernelResult(j, k, tgrid, grid, norm, min_gap)
