import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blochnls import Lattice, PeriodicCoefficients, sample_coefficients, sample_on_box
from blochnls.cell import freq_range
from blochnls.errors import AliasError, RealityError


def brute_force_samples(pc, P):
    """Direct double-sum evaluation of the Fourier series on the cell grid."""
    x = 2 * np.pi * np.arange(P) / P
    grids = np.meshgrid(*([x] * pc.dim), indexing="ij")
    out = np.zeros((P,) * pc.dim, dtype=complex)
    N = pc.truncation
    for m in itertools.product(range(-N, N + 1), repeat=pc.dim):
        phase = sum(mj * g for mj, g in zip(m, grids))
        out += pc.coeff(m) * np.exp(1j * phase)
    return out.real


def random_hermitian(dim, N, seed):
    rng = np.random.default_rng(seed)
    shape = (2 * N + 1,) * dim
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    c = 0.5 * (c + np.conj(c[(slice(None, None, -1),) * dim]))
    return PeriodicCoefficients(dim, N, c)


def test_freq_range_even_odd():
    assert list(freq_range(4)) == [-1, 0, 1, 2]
    assert list(freq_range(5)) == [-2, -1, 0, 1, 2]


def test_lattice_geometry():
    lat = Lattice(2, 8, (3, 5))
    assert lat.box_points == (24, 40)
    assert np.allclose(lat.box_lengths, (6 * np.pi, 10 * np.pi))
    assert lat.dx * lat.cell_points == pytest.approx(2 * np.pi)
    for M, ks in zip(lat.num_cells, lat.k_axes()):
        assert len(ks) == M
        assert np.all(ks > -0.5) and np.all(ks <= 0.5)


def test_lattice_validation():
    with pytest.raises(ValueError):
        Lattice(2, 3, (1, 1))
    with pytest.raises(ValueError):
        Lattice(1, 8, (0,))
    with pytest.raises(ValueError):
        Lattice(3, 8, (1, 1, 1))


def test_cosprod_matches_product_of_cosines():
    pc = PeriodicCoefficients.cosprod(2, 1.0)
    lat = Lattice(2, 16)
    vals = sample_coefficients(pc, lat)
    x = lat.cell_axes()[0]
    exact = np.cos(x)[:, None] * np.cos(x)[None, :]
    assert np.max(np.abs(vals - exact)) < 1e-14


def test_offset_shifts_range():
    sigma = PeriodicCoefficients.cosprod(2, 1.0) + (-2.0)
    vals = sample_coefficients(sigma, Lattice(2, 16))
    assert vals.min() == pytest.approx(-3.0)
    assert vals.max() == pytest.approx(-1.0)


def test_random_coefficients_match_brute_force_sum():
    pc = random_hermitian(1, 3, seed=7)
    vals = sample_coefficients(pc, Lattice(1, 16))
    assert np.max(np.abs(vals - brute_force_samples(pc, 16))) < 1e-12


def test_alias_guard():
    pc = random_hermitian(1, 4, seed=0)
    with pytest.raises(AliasError):
        sample_coefficients(pc, Lattice(1, 8))


def test_reality_guard():
    c = np.zeros(3, dtype=complex)
    c[2] = 1.0  # m=+1 without the conjugate partner
    with pytest.raises(RealityError):
        PeriodicCoefficients(1, 1, c)


def test_from_modes_fills_conjugates():
    pc = PeriodicCoefficients.from_modes(2, 2, {(1, 2): 0.5 + 0.25j, (0, 0): 1.0})
    assert pc.coeff((-1, -2)) == pytest.approx(0.5 - 0.25j)
    assert pc.coeff((0, 0)) == pytest.approx(1.0)
    assert pc.coeff((2, 2)) == 0.0


def test_scaling_and_offset_algebra():
    pc = 3.0 * PeriodicCoefficients.cosprod(1, 1.0)
    vals = sample_coefficients(pc + 1.0, Lattice(1, 16))
    x = 2 * np.pi * np.arange(16) / 16
    assert np.allclose(vals, 3 * np.cos(x) + 1, atol=1e-13)


def test_sample_on_box_tiles_cell():
    pc = PeriodicCoefficients.cosprod(1, 1.0)
    lat = Lattice(1, 8, (3,))
    box = sample_on_box(pc, lat)
    cell = sample_coefficients(pc, lat)
    assert box.shape == (24,)
    assert np.array_equal(box, np.tile(cell, 3))


@settings(max_examples=25, deadline=None)
@given(
    dim=st.integers(1, 2),
    N=st.integers(0, 3),
    P=st.integers(8, 20),
    seed=st.integers(0, 10_000),
)
def test_sampling_roundtrips_through_fft(dim, N, P, seed):
    pc = random_hermitian(dim, N, seed)
    vals = sample_coefficients(pc, Lattice(dim, P))
    spec = np.fft.fftn(vals) / P**dim
    for m in itertools.product(range(-N, N + 1), repeat=dim):
        recovered = spec[tuple(mj % P for mj in m)]
        assert abs(recovered - pc.coeff(m)) < 1e-10
