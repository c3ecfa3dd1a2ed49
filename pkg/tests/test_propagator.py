import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bihnls.evolution import (
    duhamel, duhamel_constant_forcing, free_evolution, free_propagate, homogeneous_norm, hs_norm,
    kinetic_energy, mass, random_field,
)
from bihnls.evolution.propagator import lattice_zeta
from bihnls.grid import Grid, GridField
from oracles import duhamel_mode, gaussian_hdot_norm

G1 = Grid(1, 128, 8.0)
G2 = Grid(2, 32, 8.0)


def gaussian(grid, sigma=1.0):
    return GridField.from_function(grid, lambda *x: np.exp(-sum(c * c for c in x) / (2 * sigma ** 2)))


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


# ---------------------------------------------------------------- free flow

@pytest.mark.parametrize("grid", [G1, G2])
@pytest.mark.parametrize("mu", [0, -1])
def test_identity_at_zero(grid, mu, rng):
    phi = random_field(grid, rng)
    assert _rel(free_propagate(phi, 0.0, mu).samples, phi.samples) <= 1e-12


@given(st.integers(0, 10 ** 6), st.sampled_from([0.1, 1.0, 10.0]), st.sampled_from([0, -1]),
       st.sampled_from([G1, G2]))
def test_unitary(seed, t, mu, grid):
    phi = random_field(grid, np.random.default_rng(seed))
    m0 = mass(phi)
    assert abs(mass(free_propagate(phi, t, mu)) - m0) <= 1e-12 * m0


@given(st.integers(0, 10 ** 6), st.floats(-3, 3), st.floats(-3, 3), st.sampled_from([0, -1]))
def test_group_law(seed, t1, t2, mu):
    phi = random_field(G1, np.random.default_rng(seed))
    a = free_propagate(free_propagate(phi, t2, mu), t1, mu).samples
    b = free_propagate(phi, t1 + t2, mu).samples
    assert _rel(a, b) <= 1e-12


def test_free_evolution_matches_steps(rng):
    phi = random_field(G1, rng)
    times = np.array([0.0, 0.3, 1.1])
    u = free_evolution(phi, times, -1)
    for n, t in enumerate(times):
        assert _rel(u[n], free_propagate(phi, t, -1).samples) <= 1e-13


def test_free_flow_solves_equation():
    # i u_t + (Delta^2 + mu Delta) u = 0 for a single mode: u = e^{i t (k^4 - mu k^2)} e^{ikx}
    g = Grid(1, 64, math.pi)
    k, mu, t = 3, -1, 0.7
    phi = GridField.from_function(g, lambda x: np.exp(1j * k * x))
    u = free_propagate(phi, t, mu).samples
    assert _rel(u, np.exp(1j * t * (k ** 4 - mu * k ** 2)) * phi.samples) <= 1e-12


def test_kinetic_energy_conserved(rng):
    phi = random_field(G2, rng)
    e0 = kinetic_energy(phi, -1)
    for t in (0.1, 1.0, 10.0):
        assert abs(kinetic_energy(free_propagate(phi, t, -1), -1) - e0) <= 1e-10 * abs(e0)


# ---------------------------------------------------------------- Duhamel

def _oracle(v, grid, mu, omega, times):
    lam = grid.symbol(mu)
    vhat = np.fft.fftn(v)
    return np.stack([np.fft.ifftn(duhamel_mode(vhat, lam, omega, t)) for t in times])


def test_duhamel_zero_forcing():
    F = np.zeros((17,) + G1.shape, complex)
    assert np.all(duhamel(F, 0, 1.0, G1) == 0)


@pytest.mark.parametrize("scheme,nt,tol", [("product", 11, 1e-12), ("trapezoid", 321, 1e-6)])
def test_duhamel_constant_forcing(scheme, nt, tol):
    # smooth forcing: the plain trapezoid is only accurate where dt |xi|^4 stays small
    g = Grid(1, 64, 8.0)
    v = gaussian(g, 1.5).samples
    T = 1.0
    times = np.linspace(0, T, nt)
    F = np.broadcast_to(v, (nt,) + g.shape)
    got = duhamel(F, 0, T, g, scheme=scheme)
    assert _rel(got, _oracle(v, g, 0, 0.0, times)) <= tol


def test_constant_forcing_closed_form_agrees():
    g = Grid(1, 64, 4.0)
    v = gaussian(g, 0.8)
    times = np.linspace(0, 2, 9)
    assert _rel(duhamel_constant_forcing(v, times, -1), _oracle(v.samples, g, -1, 0.0, times)) <= 1e-12


@pytest.mark.parametrize("scheme", ["product", "trapezoid"])
@pytest.mark.parametrize("mu", [0, -1])
def test_duhamel_second_order(scheme, mu):
    g = Grid(1, 64, 4.0)
    v = gaussian(g, 0.8).samples
    omega, T = 5.0, 1.0
    errs = []
    for nt in (41, 81, 161, 321):
        times = np.linspace(0, T, nt)
        F = np.exp(1j * omega * times)[:, None] * v[None]
        errs.append(_rel(duhamel(F, mu, T, g, scheme=scheme), _oracle(v, g, mu, omega, times)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 1.8
    assert errs[-1] < 1e-4


def test_duhamel_unknown_scheme():
    with pytest.raises(ValueError):
        duhamel(np.zeros((3,) + G1.shape), 0, 1.0, G1, scheme="euler")


# ---------------------------------------------------------------- Sobolev norms

@pytest.mark.parametrize("N,M,L", [(1, 256, 16.0), (2, 128, 12.0)])
@pytest.mark.parametrize("s", [0.25, 0.5, 1.0, 1.5, 2.0])
def test_homogeneous_norm_gaussian(N, M, L, s):
    g = Grid(N, M, L)
    got = homogeneous_norm(gaussian(g), s)
    assert abs(got / gaussian_hdot_norm(N, s) - 1) < 1e-6


def test_homogeneous_norm_wider_gaussian():
    g = Grid(1, 512, 32.0)
    for s in (0.5, 1.25):
        got = homogeneous_norm(gaussian(g, 2.0), s)
        assert abs(got / gaussian_hdot_norm(1, s, sigma=2.0) - 1) < 1e-6


def test_homogeneous_correction_matters():
    # at small s the lattice misses the |xi|^{2s} cusp at 0 without the zeta correction
    g = Grid(1, 256, 16.0)
    exact = gaussian_hdot_norm(1, 0.25)
    raw = homogeneous_norm(gaussian(g), 0.25, correct=False)
    fixed = homogeneous_norm(gaussian(g), 0.25)
    assert abs(fixed / exact - 1) < abs(raw / exact - 1) / 10


def test_lattice_zeta_values():
    # sum over nonzero integers of |k|^{2s} continues to 2 zeta(-2s); zeta(-2) = 0
    assert lattice_zeta(1, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert lattice_zeta(1, 0.5) == pytest.approx(2 * -1 / 12)
    with pytest.raises(ValueError):
        lattice_zeta(3, 0.5)


@pytest.mark.parametrize("N,M,L", [(1, 256, 16.0), (2, 64, 8.0)])
def test_hs_norm_gaussian(N, M, L):
    g = Grid(N, M, L)
    u = gaussian(g)
    expect = math.sqrt(gaussian_hdot_norm(N, 0) ** 2 + gaussian_hdot_norm(N, 1) ** 2)
    assert hs_norm(u, 1) == pytest.approx(expect, rel=1e-10)
    assert hs_norm(u, 0) == pytest.approx(math.sqrt(mass(u)), rel=1e-12)


def test_mass_of_gaussian():
    assert mass(gaussian(Grid(1, 256, 16.0))) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
