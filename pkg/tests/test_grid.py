import struct

import numpy as np
import pytest

from bihnls.grid import Grid, GridField, TimeGrid, read_field, write_field


@pytest.mark.parametrize("M", [4, 12, 100])
def test_grid_rejects_bad_M(M):
    with pytest.raises(ValueError):
        Grid(1, M, 1.0)


def test_grid_geometry():
    g = Grid(2, 16, 4.0)
    assert g.shape == (16, 16)
    assert g.dx == 0.5
    assert g.cell == 0.25
    assert g.x_axis[0] == -4.0 and g.x_axis[-1] == 3.5
    assert np.isclose(g.nyquist, 2 * np.pi)
    assert np.isclose(np.abs(g.xi_axis).max(), g.nyquist)


def test_symbol_sign():
    g = Grid(1, 32, 3.0)
    assert np.all(g.symbol(-1) >= 0)
    assert np.allclose(g.symbol(0), g.xi2 ** 2)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_fft_round_trip(N, rng):
    g = Grid(N, 16, 2.0)
    u = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    back = g.ifft(g.fft(u))
    assert np.max(np.abs(back - u)) <= 1e-12 * np.max(np.abs(u))


def test_fft_acts_on_trailing_axes(rng):
    g = Grid(1, 16, 2.0)
    u = rng.normal(size=(5, 16))
    assert np.allclose(g.fft(u), np.fft.fft(u, axis=1))


def test_time_grid():
    tg = TimeGrid(8, 0.25, -1.0)
    assert tg.span == 2.0
    assert tg.t[0] == -1.0 and tg.t[-1] == 0.75
    assert np.isclose(tg.nyquist, 4 * np.pi)


def test_field_shape_checked():
    with pytest.raises(ValueError):
        GridField(Grid(1, 8, 1.0), np.zeros(9))


def test_field_l2_and_boundary():
    g = Grid(1, 512, 10.0)
    u = GridField.from_function(g, lambda x: np.exp(-x ** 2 / 2))
    assert abs(u.l2() - np.pi ** 0.25) < 1e-12
    assert u.boundary_max() < 1e-8
    assert (2 * u + u).l2() == pytest.approx(3 * u.l2())


@pytest.mark.parametrize("N,M", [(1, 32), (2, 8), (3, 8)])
def test_binary_round_trip(tmp_path, N, M, rng):
    g = Grid(N, M, 2.5)
    u = GridField(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    path = tmp_path / "f.bin"
    write_field(path, u)
    raw = path.read_bytes()
    assert len(raw) == 16 + 16 * M ** N
    assert struct.unpack_from("<IId", raw) == (N, M, 2.5)
    v = read_field(path)
    assert v.grid == g
    assert np.array_equal(v.samples, u.samples)


def test_binary_layout_interleaved(tmp_path):
    g = Grid(1, 8, 1.0)
    u = GridField(g, np.arange(8) + 10j * np.arange(8))
    write_field(tmp_path / "f.bin", u)
    body = np.frombuffer((tmp_path / "f.bin").read_bytes()[16:], "<f8")
    assert body[2] == 1.0 and body[3] == 10.0


def test_truncated_file_rejected(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(struct.pack("<IId", 1, 8, 1.0) + b"\0" * 16)
    with pytest.raises(ValueError):
        read_field(p)
