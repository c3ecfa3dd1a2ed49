"""Picard iteration for the time-truncated equation and the monitors around it."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import EnergyUndefined, HypothesisViolated
from ..exponents import ProblemParams
from ..grid import Grid, GridField
from ..lemmas import CKNExponents, GWPClass, ckn_exponents, classify_gwp, gwp_threshold
from ..littlewood_paley import cap
from .potential import PotentialField, nonlinearity_for, realize_potential
from .propagator import duhamel, free_evolution, hs_norm, kinetic_energy, mass

__all__ = [
    "SolveStatus", "IterationRecord", "SolveTrace", "SolveResult", "chi", "picard_solve",
    "energy", "potential_energy", "max_contractive_T", "AprioriReport", "apriori_bound",
    "series_hs", "series_mass", "series_energy",
]


class SolveStatus(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    NORM_BLOWUP = "norm_blowup"


def chi(t, T: float):
    """Time cutoff chi(t / T): 1 on [-T, T], 0 outside (-2T, 2T)."""
    return cap(np.asarray(t, dtype=float) / T)


# ---------------------------------------------------------------- energy

def _primitive(params: ProblemParams) -> Callable:
    f = nonlinearity_for(params)
    G = getattr(f, "G", None)
    if G is None:
        raise EnergyUndefined("the nonlinearity has no primitive G")
    if complex(getattr(f, "lam", params.lam)).imag != 0:
        raise EnergyUndefined("energy needs a real coupling constant")
    return G


def potential_energy(field: GridField, params: ProblemParams, potential: PotentialField) -> float:
    """Integral of K G(u), with the coupling carried by G."""
    if not potential.is_real:
        raise EnergyUndefined("energy needs a real potential")
    G = _primitive(params)
    return float(np.sum(potential.shape.real * G(field.samples)) * field.grid.cell)


def energy(field: GridField, params: ProblemParams, potential: Optional[PotentialField] = None) -> float:
    """Kinetic part plus potential part of the conserved energy."""
    potential = potential or realize_potential(params, field.grid)
    return kinetic_energy(field, params.mu) + potential_energy(field, params, potential)


def series_mass(u: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(1, u.ndim))
    return np.sum(np.abs(u) ** 2, axis=axes) * grid.cell


def _series_parseval(u: np.ndarray, grid: Grid, weight: np.ndarray) -> np.ndarray:
    axes = tuple(range(1, u.ndim))
    spec = np.abs(grid.fft(u)) ** 2
    return np.sum(weight[None] * spec, axis=axes) * grid.cell / grid.M ** grid.N


def series_hs(u: np.ndarray, grid: Grid, s) -> np.ndarray:
    return np.sqrt(_series_parseval(u, grid, (1.0 + grid.xi2) ** float(s)))


def series_energy(u: np.ndarray, grid: Grid, params: ProblemParams, potential: PotentialField) -> np.ndarray:
    if not potential.is_real:
        raise EnergyUndefined("energy needs a real potential")
    G = _primitive(params)
    k2 = grid.xi2
    kin = 0.5 * _series_parseval(u, grid, k2 * k2 - params.mu * k2)
    axes = tuple(range(1, u.ndim))
    pot = np.sum(potential.shape.real[None] * G(u), axis=axes) * grid.cell
    return kin + pot


# ---------------------------------------------------------------- traces

@dataclass(frozen=True)
class IterationRecord:
    index: int
    change: float             # sup_t L^2 distance to the previous iterate
    factor: Optional[float]   # change / previous change
    hs_max: float             # sup_t H^s norm of the new iterate


@dataclass
class SolveTrace:
    times: np.ndarray
    mass: np.ndarray
    energy: Optional[np.ndarray]
    hs: np.ndarray
    besov: dict = field(default_factory=dict)
    iterations: list = field(default_factory=list)
    status: SolveStatus = SolveStatus.CONVERGED
    last_finite_hs: float = 0.0
    residual: float = math.nan

    @property
    def contraction_factors(self) -> list:
        return [r.factor for r in self.iterations if r.factor is not None]

    @property
    def n_iter(self) -> int:
        return len(self.iterations)

    def mass_drift(self) -> float:
        m0 = self.mass[0]
        return float(np.abs(self.mass - m0).max() / m0) if m0 else 0.0

    def energy_drift(self) -> Optional[float]:
        if self.energy is None:
            return None
        e0 = self.energy[0]
        scale = abs(e0) if e0 else 1.0
        return float(np.abs(self.energy - e0).max() / scale)

    def rows(self):
        names = sorted(self.besov)
        yield ["t", "mass", "energy", "Hs"] + names
        for n, t in enumerate(self.times):
            e = "" if self.energy is None else repr(float(self.energy[n]))
            yield [repr(float(t)), repr(float(self.mass[n])), e, repr(float(self.hs[n]))] + \
                [repr(float(self.besov[k][n])) for k in names]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerows(self.rows())

    def summary(self) -> dict:
        return {
            "status": self.status.value,
            "iterations": self.n_iter,
            "contraction_factors": self.contraction_factors,
            "changes": [r.change for r in self.iterations],
            "hs_max_per_iterate": [r.hs_max for r in self.iterations],
            "mass_drift": self.mass_drift(),
            "energy_drift": self.energy_drift(),
            "residual": self.residual,
            "last_finite_hs": self.last_finite_hs,
        }


@dataclass
class SolveResult:
    trace: SolveTrace
    solution: np.ndarray      # (nt, *grid.shape)
    grid: Grid
    free: np.ndarray

    @property
    def status(self) -> SolveStatus:
        return self.trace.status

    def snapshot(self, n: int = -1) -> GridField:
        return GridField(self.grid, self.solution[n])


# ---------------------------------------------------------------- Picard

def _time_grid(T: float, dt: Optional[float], nt: Optional[int]) -> np.ndarray:
    if T <= 0:
        raise ValueError("T must be positive")
    if nt is None:
        if dt is None:
            raise ValueError("give dt or nt")
        nt = int(round(T / dt)) + 1
    if nt < 2:
        raise ValueError("need at least two time samples")
    return np.linspace(0.0, T, nt)


def picard_solve(phi: GridField, params: ProblemParams, T: float, *, dt: Optional[float] = None,
                 nt: Optional[int] = None, chi_T: Optional[float] = None, tol: float = 1e-10,
                 max_iter: int = 100, potential: Optional[PotentialField] = None, s=None,
                 blowup_factor: float = 1e6, besov: Optional[dict] = None) -> SolveResult:
    """Fixed point of u = U(t) phi + i G[chi_T K f(u)] on [0, T].

    Iterates from U(t) phi until the sup-in-time L^2 change drops below ``tol``.
    ``chi_T`` is the cutoff scale (default T, so chi = 1 on the whole run).
    ``besov`` maps a column name to a callable GridField -> float evaluated per
    time on the final iterate.
    """
    grid = phi.grid
    times = _time_grid(T, dt, nt)
    s = params.s if s is None else s
    chi_T = T if chi_T is None else chi_T
    potential = potential or realize_potential(params, grid)
    f = nonlinearity_for(params)
    cut = chi(times, chi_T).reshape((-1,) + (1,) * grid.N)
    weight = cut * potential.shape[None]
    free = free_evolution(phi, times, params.mu)
    limit = blowup_factor * hs_norm(phi, s)

    def step(u):
        return free + 1j * duhamel(weight * f(u), params.mu, T, grid)

    u = free
    records = []
    status = SolveStatus.MAX_ITER
    last_hs = float(series_hs(u, grid, s).max())
    prev_change = None
    for it in range(1, max_iter + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            new = step(u)
        hs = series_hs(new, grid, s) if np.all(np.isfinite(new)) else None
        hs_max = math.inf if hs is None else float(hs.max())
        change = float(np.sqrt(series_mass(new - u, grid).max())) if hs is not None else math.inf
        factor = change / prev_change if prev_change else None
        records.append(IterationRecord(it, change, factor, hs_max))
        if hs is None or hs_max > limit or not math.isfinite(change):
            status = SolveStatus.NORM_BLOWUP
            break
        u, last_hs, prev_change = new, hs_max, change
        if change < tol:
            status = SolveStatus.CONVERGED
            break
    with np.errstate(over="ignore", invalid="ignore"):
        residual = float(np.sqrt(series_mass(u - step(u), grid).max()))
    try:
        en = series_energy(u, grid, params, potential)
    except EnergyUndefined:
        en = None
    cols = {}
    for name, fn in (besov or {}).items():
        cols[name] = np.array([fn(GridField(grid, u[n])) for n in range(len(times))])
    trace = SolveTrace(times, series_mass(u, grid), en, series_hs(u, grid, s), cols, records,
                       status, last_hs, residual)
    return SolveResult(trace, u, grid, free)


def max_contractive_T(phi: GridField, params: ProblemParams, T_values: Sequence[float], *,
                      dt: float, tol: float = 1e-10, max_iter: int = 60, bound: float = 0.5, **kw):
    """Largest tested T whose run converges with every contraction factor below ``bound``."""
    best, table = None, []
    for T in sorted(T_values):
        res = picard_solve(phi, params, T, dt=dt, tol=tol, max_iter=max_iter, **kw)
        facs = res.trace.contraction_factors
        ok = res.status is SolveStatus.CONVERGED and all(c < bound for c in facs)
        table.append((T, res.status.value, max(facs, default=0.0), ok))
        if ok:
            best = T
    return best, table


# ---------------------------------------------------------------- a priori bound

@dataclass(frozen=True)
class AprioriReport:
    gwp_class: GWPClass
    energy: float
    mass: float
    ckn_constant: float
    exponents: CKNExponents
    coefficient: float            # what multiplies ||Delta u||^2 after absorption
    bound: float                  # bound on sup_t ||Delta u(t)||^2 (inf if unusable)
    smallness_threshold: Optional[float] = None   # (1/(2C))^{1/alpha}, critical case only
    smallness_met: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "gwp_class": self.gwp_class.value, "energy": self.energy, "mass": self.mass,
            "ckn_constant": self.ckn_constant, "exponents": [str(e) for e in self.exponents],
            "coefficient": self.coefficient, "bound": self.bound,
            "smallness_threshold": self.smallness_threshold, "smallness_met": self.smallness_met,
        }


def _young_rest(coef: float, e: float) -> float:
    """R with coef * y^e <= y^2 / 4 + R for all y >= 0, 0 < e < 2 (sharp Young split)."""
    if coef <= 0:
        return 0.0
    p = 2.0 / e
    pc = 2.0 / (2.0 - e)
    delta = (p / 4.0) ** (1.0 / p)
    return (coef / delta) ** pc / pc


def apriori_bound(params: ProblemParams, phi: GridField, potential: Optional[PotentialField] = None,
                  ckn_constant: Optional[float] = None, trials: int = 64, seed: int = 0) -> AprioriReport:
    """Bound on ||Delta u(t)||^2 from energy and mass conservation plus the CKN estimate.

    With y = ||Delta u||, m = ||phi||_2 and C the fitted CKN constant,
    y^2 <= 2E + |mu| m y + c (y^{e1} m^{e2} + y^{e3} m^{e4}), c = 2C/(alpha+2)
    for the power nonlinearity; every sub-quadratic term is absorbed by Young's
    inequality into y^2/4.
    """
    cls = classify_gwp(params)
    if cls is GWPClass.LOCAL_ONLY:
        raise HypothesisViolated(
            f"alpha = {params.alpha} exceeds 8/N - 2/beta = {gwp_threshold(params)}", "alpha <= 8/N - 2/beta")
    ex = ckn_exponents(params)
    potential = potential or realize_potential(params, phi.grid)
    if ckn_constant is None:
        from .probes import ckn_probe
        ckn_constant = ckn_probe(params, trials, phi.grid, seed=seed, potential=potential).constant
    E = energy(phi, params, potential)
    m = math.sqrt(mass(phi))
    f = nonlinearity_for(params)
    c = 2 * ckn_constant / (params.alpha + 2) if hasattr(f, "G") else 2 * ckn_constant
    c = float(c)
    kappa, rest = 1.0, 2 * E
    if params.mu:
        kappa -= 0.25
        rest += (abs(params.mu) * m) ** 2
    threshold = met = None
    for e, k in ((ex.e1, ex.e2), (ex.e3, ex.e4)):
        coef = c * m ** float(k)
        if coef == 0:
            continue
        if e == 2:
            kappa -= coef
        elif 0 < e < 2:
            kappa -= 0.25
            rest += _young_rest(coef, float(e))
        else:
            raise HypothesisViolated(f"CKN power {e} of the Laplacian norm exceeds 2", "exponent <= 2")
    if cls is GWPClass.GLOBAL_SMALL_DATA:
        threshold = (1 / (2 * ckn_constant)) ** (1 / float(params.alpha)) if ckn_constant > 0 else math.inf
        met = kappa > 0
    bound = rest / kappa if kappa > 0 else math.inf
    return AprioriReport(cls, E, m * m, float(ckn_constant), ex, kappa, bound, threshold, met)
