import math
from fractions import Fraction as F

import numpy as np
import pytest

from bihnls.errors import AliasRisk, HypothesisViolated, InvalidParams
from bihnls.evolution import (
    ckn_probe, ckn_sides, random_field, realize_potential, scaling_check, scaling_exponent,
    scaling_transform, strichartz_probe,
)
from bihnls.exponents import LebesguePair, ProblemParams, PowerLaw, scaling_index
from bihnls.grid import Grid, GridField
from oracles import gaussian_hdot_norm

G1 = Grid(1, 1024, 32.0)
G2 = Grid(2, 256, 16.0)
WIDTH = 2.0

# (N, alpha, b) tuples for the scaling identity
TUPLES = [(1, F(8), F(1, 4)), (1, F(16), F(3, 8)), (2, F(3), F(1, 2))]


def gaussian(grid, sigma=WIDTH):
    return GridField(grid, np.exp(-grid.r2 / (2 * sigma ** 2)))


def _params(N, alpha, b, s=1):
    return ProblemParams(N, s, alpha, 0, PowerLaw(1, b))


# ---------------------------------------------------------------- scaling

def test_scaling_exponent_matches_critical_index():
    for N, alpha, b in TUPLES:
        assert scaling_exponent(N, scaling_index(N, alpha, b), alpha, b) == 0


@pytest.mark.parametrize("N,alpha,b", TUPLES)
@pytest.mark.parametrize("k", [2, 4])
def test_scaling_at_critical_index(N, alpha, b, k):
    g = G1 if N == 1 else G2
    sc = scaling_index(N, alpha, b)
    assert abs(scaling_check(gaussian(g), k, _params(N, alpha, b), sc) - 1) < 1e-4


@pytest.mark.parametrize("N,alpha,b", TUPLES)
@pytest.mark.parametrize("k", [2, 4])
@pytest.mark.parametrize("s", [F(1, 2), F(1), F(3, 2)])
def test_scaling_general_s(N, alpha, b, k, s):
    g = G1 if N == 1 else G2
    got = scaling_check(gaussian(g), k, _params(N, alpha, b), s)
    # closed form: phi_k is a Gaussian of amplitude k^{(4-b)/alpha} and width sigma / k
    a = float(k) ** float((4 - b) / alpha)
    oracle = gaussian_hdot_norm(N, float(s), WIDTH / k, a) / gaussian_hdot_norm(N, float(s), WIDTH)
    assert abs(got / oracle - 1) < 1e-4
    assert abs(got / float(k) ** float(scaling_exponent(N, s, alpha, b)) - 1) < 1e-4


def test_scaling_transform_pointwise():
    phi = gaussian(G1)
    out = scaling_transform(phi, 2, 8, F(1, 4))
    expect = 2 ** (15 / 32) * np.exp(-(2 * G1.x_axis) ** 2 / (2 * WIDTH ** 2))
    assert np.max(np.abs(out.samples - expect)) < 1e-10


def test_scaling_k_one_identity():
    phi = random_field(G1, np.random.default_rng(3))
    out = scaling_transform(phi, 1, 8, F(1, 4))
    assert np.array_equal(out.samples, phi.samples)


def test_scaling_dilation_below_one():
    g = Grid(1, 512, 32.0)
    got = scaling_check(gaussian(g, 1.0), F(1, 2), _params(1, F(8), F(1, 4)), 1)
    assert abs(got / 0.5 ** float(scaling_exponent(1, 1, 8, F(1, 4))) - 1) < 1e-4


def test_alias_risk():
    coarse = Grid(1, 64, 16.0)
    with pytest.raises(AliasRisk):
        scaling_transform(gaussian(coarse, 0.5), 4, 8, F(1, 4))
    wide = Grid(1, 256, 8.0)
    with pytest.raises(AliasRisk):
        scaling_transform(gaussian(wide, 2.0), F(1, 4), 8, F(1, 4))


def test_scaling_rejects_nonpositive_k():
    with pytest.raises(ValueError):
        scaling_transform(gaussian(G1), 0, 8, F(1, 4))


# ---------------------------------------------------------------- Strichartz

@pytest.mark.parametrize("N,M,L", [(1, 128, 16.0), (2, 32, 8.0)])
@pytest.mark.parametrize("mu", [0, -1])
def test_strichartz_energy_pair(N, M, L, mu):
    rep = strichartz_probe(N, mu, LebesguePair.parse("inf,2"), 10, Grid(N, M, L))
    assert all(abs(q - 1) <= 1e-8 for q in rep.quotients)


def test_strichartz_inadmissible_rejected():
    with pytest.raises((HypothesisViolated, InvalidParams)):
        strichartz_probe(2, 0, LebesguePair.parse("2,inf"), 10, Grid(2, 32, 8.0))
    # 2N/(N-4) is negative for N = 2: rejected when the pair is formed
    with pytest.raises((HypothesisViolated, InvalidParams, ValueError)):
        strichartz_probe(2, 0, LebesguePair(F(2), F(2 * 2, 2 - 4)), 10, Grid(2, 32, 8.0))


def test_strichartz_deterministic():
    g = Grid(1, 128, 16.0)
    a = strichartz_probe(1, 0, LebesguePair.parse("8,inf"), 5, g, seed=9)
    b = strichartz_probe(1, 0, LebesguePair.parse("8,inf"), 5, g, seed=9)
    assert a == b


def test_strichartz_nonendpoint_stable():
    pair = LebesguePair.parse("8,inf")
    small = strichartz_probe(1, 0, pair, 25, Grid(1, 128, 16.0)).homogeneous
    big = strichartz_probe(1, 0, pair, 50, Grid(1, 256, 16.0)).homogeneous
    assert 0 < big < 2 * small
    assert math.isfinite(strichartz_probe(1, 0, pair, 5, Grid(1, 128, 16.0)).inhomogeneous)


# ---------------------------------------------------------------- CKN

CKN_PARAMS = ProblemParams(2, 2, 1, 0, PowerLaw(1, F(1, 2)))


def test_ckn_homogeneity():
    g = Grid(2, 64, 8.0)
    pot = realize_potential(CKN_PARAMS, g)
    u = random_field(g, np.random.default_rng(5))
    l1, r1 = ckn_sides(u, CKN_PARAMS, pot)
    l2, r2 = ckn_sides(GridField(g, 2 * u.samples), CKN_PARAMS, pot)
    assert abs(l2 / l1 / 2 ** 3 - 1) <= 1e-8
    assert abs(r2 / r1 / 2 ** 3 - 1) <= 1e-8


def test_ckn_zero_field_skipped():
    g = Grid(2, 32, 8.0)
    pot = realize_potential(CKN_PARAMS, g)
    assert ckn_sides(GridField.zeros(g), CKN_PARAMS, pot) == (0.0, 0.0)


def test_ckn_constant_stable():
    a = ckn_probe(CKN_PARAMS, 16, Grid(2, 64, 8.0)).constant
    b = ckn_probe(CKN_PARAMS, 16, Grid(2, 128, 8.0)).constant
    assert 0 < a < math.inf and 0.5 < b / a < 2


def test_ckn_rejects_bad_trials():
    with pytest.raises(ValueError):
        ckn_probe(CKN_PARAMS, 0, Grid(2, 32, 8.0))
