"""Potentials K(x) realized on a grid, and power-type nonlinearities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from ..errors import InvalidParams
from ..exponents import Constant, PowerLaw, ProblemParams, Split
from ..grid import Grid, GridField
from ..littlewood_paley import lp_norm

__all__ = [
    "PotentialField", "realize_potential", "PowerNonlinearity", "nonlinearity_for",
    "apply_nonlinearity", "lipschitz_fit", "LipschitzFit",
]


@dataclass(frozen=True, eq=False)
class PotentialField:
    """K = K1 + K2 on a grid; K1 bounded, K2 in L^1 and L^beta.

    ``lam`` is kept apart from the shape: K = lam * (K1 + K2) / lam, so the
    nonlinearity can carry the coupling constant without counting it twice.
    """

    grid: Grid
    K1: np.ndarray
    K2: np.ndarray
    delta: float
    lam: complex

    @property
    def K(self) -> np.ndarray:
        return self.K1 + self.K2

    @property
    def shape(self) -> np.ndarray:
        """K / lam (the geometric profile), or K itself when lam = 0."""
        return self.K if self.lam == 0 else self.K / self.lam

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.K.imag) <= 1e-14 * (1 + np.abs(self.K.real))))

    def norm_K2(self, p) -> float:
        return float(lp_norm(self.K2, p, self.grid.cell))

    def norm_K1_inf(self) -> float:
        return float(np.abs(self.K1).max())


def _part(spec: dict, grid: Grid, delta: float) -> np.ndarray:
    kind = spec.get("kind", "constant")
    if kind in ("zero", "none"):
        return np.zeros(grid.shape)
    if kind == "constant":
        return np.full(grid.shape, float(spec.get("value", 0.0)))
    if kind == "gaussian":
        w = float(spec.get("width", 1.0))
        return float(spec.get("amp", 1.0)) * np.exp(-grid.r2 / (2 * w * w))
    if kind == "powerlaw":
        b = float(Fraction(str(spec["b"])))
        prof = float(spec.get("amp", 1.0)) * (grid.r2 + delta * delta) ** (-b / 2)
        rad = spec.get("radius")
        return prof if rad is None else prof * (grid.r2 <= float(rad) ** 2)
    if kind == "bump":
        w = float(spec.get("width", 1.0))
        r = np.sqrt(grid.r2) / w
        return float(spec.get("amp", 1.0)) * np.where(r < 1, np.exp(-1 / np.maximum(1 - r * r, 1e-300)), 0.0)
    raise InvalidParams(f"unknown potential part kind {kind!r}", "potential part kind")


def realize_potential(spec, grid: Grid, delta: Optional[float] = None) -> PotentialField:
    """Sample a PowerLaw, Split or Constant potential on ``grid``.

    The power law is regularized to lam (|x|^2 + delta^2)^{-b/2}, delta one grid
    spacing by default, and cut at |x| = 1 into K2 (inside) and K1 (outside).
    """
    delta = grid.dx if delta is None else float(delta)
    if isinstance(spec, ProblemParams):
        spec = spec.potential
    if isinstance(spec, PowerLaw):
        top = min(Fraction(grid.N, 2), Fraction(4))
        if not (0 < spec.b < top):
            raise InvalidParams(f"b = {spec.b} outside (0, {top})", "0 < b < min(N/2, 4)")
        K = spec.lam * (grid.r2 + delta * delta) ** (-float(spec.b) / 2)
        inside = grid.r2 <= 1.0
        return PotentialField(grid, np.where(inside, 0, K), np.where(inside, K, 0), delta, spec.lam)
    if isinstance(spec, Constant):
        return PotentialField(grid, np.full(grid.shape, spec.lam, complex), np.zeros(grid.shape, complex),
                              delta, spec.lam)
    if isinstance(spec, Split):
        K1 = spec.lam * _part(spec.bounded_part, grid, delta)
        K2 = spec.lam * _part(spec.integrable_part, grid, delta)
        return PotentialField(grid, K1.astype(complex), K2.astype(complex), delta, spec.lam)
    raise InvalidParams(f"cannot realize potential {spec!r}", "potential kind")


class PowerNonlinearity:
    """f(u) = lam |u|^alpha u, with primitive G(z) = lam |z|^{alpha+2} / (alpha+2)."""

    def __init__(self, alpha, lam: complex = 1.0):
        self.alpha = float(alpha)
        self.lam = complex(lam)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        return self.lam * np.abs(u) ** self.alpha * u

    def G(self, u: np.ndarray) -> np.ndarray:
        if self.lam.imag != 0:
            raise ValueError("primitive needs a real coupling")
        return self.lam.real * np.abs(u) ** (self.alpha + 2) / (self.alpha + 2)

    def __repr__(self) -> str:
        return f"PowerNonlinearity(alpha={self.alpha}, lam={self.lam})"


def nonlinearity_for(params: ProblemParams) -> Callable:
    """The nonlinearity a solve uses: the plug-in if given, else lam |u|^alpha u."""
    if params.nonlinearity is not None:
        return params.nonlinearity
    return PowerNonlinearity(params.alpha, params.lam)


def apply_nonlinearity(field: GridField, params: ProblemParams) -> GridField:
    f = nonlinearity_for(params)
    return GridField(field.grid, f(field.samples))


@dataclass(frozen=True)
class LipschitzFit:
    constant: float
    half_constant: float    # fit from the first half of the pairs only
    pairs: int

    @property
    def stable(self) -> bool:
        return self.constant <= 1.1 * self.half_constant


def lipschitz_fit(f: Callable, alpha, pairs: int = 10_000, seed: int = 0) -> LipschitzFit:
    """Largest |f(u) - f(v)| / ((|u|^alpha + |v|^alpha)|u - v|) over random complex pairs."""
    rng = np.random.default_rng(seed)
    a = float(alpha)

    def draw(n):
        mag = 10.0 ** rng.uniform(-3, 3, n)
        return mag * np.exp(2j * math.pi * rng.random(n))

    u, v = draw(pairs), draw(pairs)
    # half the pairs are near-diagonal, where the bound is tightest
    near = rng.random(pairs) < 0.5
    v = np.where(near, u * (1 + 10.0 ** rng.uniform(-6, -1, pairs) * np.exp(2j * math.pi * rng.random(pairs))), v)
    den = (np.abs(u) ** a + np.abs(v) ** a) * np.abs(u - v)
    ratio = np.abs(f(u) - f(v)) / den
    return LipschitzFit(float(ratio.max()), float(ratio[: pairs // 2].max()), pairs)
