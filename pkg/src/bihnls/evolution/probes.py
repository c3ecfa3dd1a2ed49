"""Empirical probes: scaling symmetry, Strichartz quotients, the CKN-type constant."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ..errors import AliasRisk, HypothesisViolated, InvalidParams
from ..exponents import LebesguePair, ProblemParams, as_fraction, is_biharmonic_admissible
from ..grid import Grid, GridField
from ..lemmas import CKNExponents, ckn_exponents
from ..littlewood_paley import lp_norm, mixed_norm
from .potential import PotentialField, nonlinearity_for, realize_potential
from .propagator import duhamel, free_evolution, homogeneous_norm, mass

__all__ = [
    "random_field", "scaling_exponent", "scaling_transform", "scaling_check",
    "StrichartzReport", "strichartz_probe", "strichartz_probe_pairs", "CKNReport", "ckn_sides", "ckn_probe",
]


def random_field(grid: Grid, rng: np.random.Generator, bumps: int = 3) -> GridField:
    """Sum of a few complex Gaussians placed and sized relative to the box.

    Centres stay within L/4 and widths within [L/24, L/10], so the field is
    below 1e-8 at the boundary and resolved for M >= 64.
    """
    L = grid.L
    u = np.zeros(grid.shape, dtype=complex)
    for _ in range(bumps):
        c = rng.uniform(-L / 4, L / 4, grid.N)
        w = rng.uniform(L / 24, L / 10)
        amp = rng.normal() + 1j * rng.normal()
        r2 = sum((x - ci) ** 2 for x, ci in zip(grid.x, c))
        u += amp * np.exp(-r2 / (2 * w * w))
    return GridField(grid, u)


# ---------------------------------------------------------------- scaling

def scaling_exponent(N: int, s, alpha, b) -> Fraction:
    """s - N/2 + (4 - b)/alpha, the power of k picked up by the homogeneous norm."""
    return as_fraction(s) - Fraction(N, 2) + (4 - as_fraction(b)) / as_fraction(alpha)


def _axis_eval(M: int, dx: float, L: float, y: np.ndarray) -> np.ndarray:
    """Matrix mapping DFT coefficients to trigonometric-interpolant values at y."""
    xi = 2 * math.pi * np.fft.fftfreq(M, d=dx)
    E = np.exp(1j * np.outer(y + L, xi)) / M
    E[np.abs(y) >= L] = 0.0
    if M % 2 == 0:
        # split the Nyquist mode evenly between +/- so the interpolant stays real for real data
        E[:, M // 2] = np.cos(math.pi / dx * (y + L)) / M * (np.abs(y) < L)
    return E


def scaling_transform(field: GridField, k, alpha, b, tail_tol: float = 1e-8) -> GridField:
    """phi_k(x) = k^{(4-b)/alpha} phi(k x), evaluated from the trigonometric interpolant.

    Points with |k x| >= L are set to zero (the field is taken to vanish outside
    the box).  AliasRisk is raised when the dilated field would not be resolved.
    """
    kf = float(as_fraction(k) if not isinstance(k, float) else k)
    if kf <= 0:
        raise ValueError("k must be positive")
    g = field.grid
    amp = kf ** float((4 - as_fraction(b)) / as_fraction(alpha))
    if kf == 1.0:
        return GridField(g, field.samples * amp)
    spec = g.fft(field.samples)
    power = np.abs(spec) ** 2
    total = power.sum()
    if total == 0:
        return GridField(g, field.samples.copy())
    if kf > 1:
        band = g.nyquist / kf
        outside = np.zeros(g.shape, dtype=bool)
        for kk in g.xi:
            outside |= np.abs(kk) > band
        frac = power[outside].sum() / total
        if frac > tail_tol ** 2:
            raise AliasRisk(f"{frac:.2e} of the spectrum lies above nyquist/k = {band:.4g}")
    else:
        outside = np.zeros(g.shape, dtype=bool)
        for x in g.x:
            outside |= np.abs(x) >= kf * g.L
        dens = np.abs(field.samples) ** 2
        frac = dens[outside].sum() / dens.sum()
        if frac > tail_tol ** 2:
            raise AliasRisk(f"{frac:.2e} of the mass leaves the box after dilation by k = {kf}")
    y = kf * g.x_axis
    E = _axis_eval(g.M, g.dx, g.L, y)
    out = spec
    for ax in range(g.N):
        out = np.moveaxis(np.tensordot(E, out, axes=([1], [ax])), 0, ax)
    return GridField(g, amp * out)


def scaling_check(field: GridField, k, params: ProblemParams, s) -> float:
    """Ratio of homogeneous norms of phi_k and phi at order s."""
    b = params.b if params.b is not None else 0
    scaled = scaling_transform(field, k, params.alpha, b)
    return homogeneous_norm(scaled, s) / homogeneous_norm(field, s)


# ---------------------------------------------------------------- Strichartz

@dataclass(frozen=True)
class StrichartzReport:
    pair: LebesguePair
    trials: int
    homogeneous: float          # max ||U(t) phi||_{L^q L^r} / ||phi||_2
    inhomogeneous: float        # max ||G F||_{L^q L^r} / ||F||_{L^1 L^2} (nan when skipped)
    quotients: tuple

    def to_dict(self) -> dict:
        return {"pair": str(self.pair), "trials": self.trials, "homogeneous": self.homogeneous,
                "inhomogeneous": self.inhomogeneous}


def strichartz_probe(N: int, mu: int, pair: LebesguePair, trials: int, grid: Grid, T: float = 1.0,
                     nt: int = 129, seed: int = 0, inhomogeneous: bool = True) -> StrichartzReport:
    """Largest observed Strichartz quotients over seeded random data and forcings."""
    return strichartz_probe_pairs(N, mu, [pair], trials, grid, T, nt, seed, inhomogeneous)[0]


def strichartz_probe_pairs(N: int, mu: int, pairs, trials: int, grid: Grid, T: float = 1.0,
                           nt: int = 129, seed: int = 0, inhomogeneous: bool = True) -> list:
    """Strichartz quotients for several pairs measured on the same random data.

    Data and forcings come from separate streams of ``seed``, so the data seen
    by a given trial does not depend on ``inhomogeneous`` or on the pair list.
    """
    pairs = [p if isinstance(p, LebesguePair) else LebesguePair.parse(str(p)) for p in pairs]
    if grid.N != N:
        raise ValueError("grid dimension differs from N")
    for pair in pairs:
        if not is_biharmonic_admissible(pair, N):
            raise HypothesisViolated(f"pair {pair} is not admissible in dimension {N}", "admissible pair")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    data_seq, force_seq = np.random.SeedSequence(seed).spawn(2)
    rng, frng = np.random.default_rng(data_seq), np.random.default_rng(force_seq)
    times = np.linspace(0.0, T, nt)
    dt = times[1] - times[0]
    hom = [[] for _ in pairs]
    inh = [[] for _ in pairs]
    for _ in range(trials):
        phi = random_field(grid, rng)
        u = free_evolution(phi, times, mu)
        m = math.sqrt(mass(phi))
        for k, (q, r) in enumerate(pairs):
            hom[k].append(mixed_norm(u, dt, grid.cell, q, r) / m)
        if not inhomogeneous:
            continue
        v = random_field(grid, frng).samples
        a = np.exp(-((times - frng.uniform(0, T)) / (0.25 * T)) ** 2) * np.exp(1j * frng.uniform(-8, 8) * times)
        F = a.reshape((-1,) + (1,) * N) * v[None]
        G = duhamel(F, mu, T, grid)
        base = mixed_norm(F, dt, grid.cell, 1, 2)
        for k, (q, r) in enumerate(pairs):
            inh[k].append(mixed_norm(G, dt, grid.cell, q, r) / base)
    return [StrichartzReport(p, trials, max(h), max(i) if i else math.nan, tuple(h))
            for p, h, i in zip(pairs, hom, inh)]


# ---------------------------------------------------------------- CKN

@dataclass(frozen=True)
class CKNReport:
    constant: float
    exponents: CKNExponents
    ratios: tuple
    trials: int

    def to_dict(self) -> dict:
        return {"constant": self.constant, "exponents": [str(e) for e in self.exponents],
                "trials": self.trials}


def ckn_sides(u: GridField, params: ProblemParams, potential: PotentialField,
              ex: Optional[CKNExponents] = None) -> tuple:
    """(integral of |K f(u) u|, two-term right side) for one field."""
    ex = ex or ckn_exponents(params)
    g = u.grid
    f = nonlinearity_for(params)
    lhs = float(np.sum(np.abs(potential.shape * f(u.samples) * u.samples)) * g.cell)
    spec = np.abs(g.fft(u.samples)) ** 2
    lap = math.sqrt(float(np.sum(g.xi2 ** 2 * spec)) * g.cell / spec.size)
    l2 = math.sqrt(mass(u))
    e1, e2, e3, e4 = (float(e) for e in ex)
    rhs = lap ** e1 * l2 ** e2 + lap ** e3 * l2 ** e4
    return lhs, rhs


def ckn_probe(params: ProblemParams, trials: int, grid: Grid, seed: int = 0,
              potential: Optional[PotentialField] = None) -> CKNReport:
    """Largest observed ratio of the two sides over seeded random fields."""
    ex = ckn_exponents(params)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    potential = potential or realize_potential(params, grid)
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(trials):
        u = random_field(grid, rng)
        lhs, rhs = ckn_sides(u, params, potential, ex)
        if rhs > 0:
            ratios.append(lhs / rhs)
    return CKNReport(max(ratios, default=0.0), ex, tuple(ratios), trials)
