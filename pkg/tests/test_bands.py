import itertools

import numpy as np
import pytest

from blochnls import (
    BlochOperatorSpec,
    Lattice,
    PeriodicCoefficients,
    assemble_operator,
    band_gradient,
    band_hessian,
    band_structure,
    check_asymptotics,
    check_nonresonance,
    k_path,
    solve_bands,
)
from blochnls.bands import (
    band_values,
    hellmann_feynman_gradient,
    omega_values,
    reduce_wavenumber,
)
from blochnls.errors import ResonanceError
from tests.test_cell import random_hermitian

K0 = np.array([0.4, 0.0])


def test_reduce_wavenumber():
    k, shift = reduce_wavenumber([1.2, -0.5])
    assert np.allclose(k, [0.2, 0.5])
    assert list(shift) == [1, -1]
    k, _ = reduce_wavenumber([0.5])
    assert k[0] == pytest.approx(0.5)


def test_free_operator_is_diagonal():
    spec = BlochOperatorSpec(1, PeriodicCoefficients.constant(1, 2.5), truncation=3)
    A, B = assemble_operator(spec, [0.3])
    assert B is None
    ms = spec.modes[:, 0]
    assert np.allclose(np.diag(A), (0.3 + ms) ** 2 + 2.5)
    assert np.max(np.abs(A - np.diag(np.diag(A)))) < 1e-14


def test_coscos_couples_diagonal_neighbors(coscos):
    spec = BlochOperatorSpec(2, coscos, truncation=2)
    A, _ = assemble_operator(spec, [0.0, 0.0])
    ms = spec.modes
    dm = ms[:, None, :] - ms[None, :, :]
    corner = np.all(np.abs(dm) == 1, axis=-1)
    off_diag = ~np.eye(len(ms), dtype=bool)
    assert np.allclose(A[corner], 0.25)
    assert np.max(np.abs(A[off_diag & ~corner])) < 1e-12


def test_matrix_matches_quadrature_oracle():
    # entrywise <L(k) e^{im'x}, e^{imx}> / (2pi) for the reformulated
    # operator -|grad+ik|^2 + (chi2/chi1) with weight (1/chi1)
    rng = np.random.default_rng(4)
    chi2 = random_hermitian(1, 2, seed=40)
    chi1 = PeriodicCoefficients.from_modes(1, 1, {(0,): 2.0, (1,): 0.3 + 0.1j})
    spec = BlochOperatorSpec(1, chi2, chi1=chi1, truncation=2)
    k = np.array([0.17])
    A, B = assemble_operator(spec, k)
    P = 512
    x = 2 * np.pi * np.arange(P) / P
    from blochnls import sample_coefficients

    lat = Lattice(1, P)
    c1 = sample_coefficients(chi1, lat)
    c2 = sample_coefficients(chi2, lat)
    ms = spec.modes[:, 0]
    for i, m in enumerate(ms):
        for j, mp in enumerate(ms):
            phase = np.exp(1j * (mp - m) * x)
            a_ij = np.mean(((k[0] + mp) ** 2 + c2 / c1) * phase)
            b_ij = np.mean(phase / c1)
            assert abs(A[i, j] - a_ij) < 1e-10
            assert abs(B[i, j] - b_ij) < 1e-10


def test_free_band_is_one_over_2pi():
    spec = BlochOperatorSpec(1, PeriodicCoefficients.constant(1, 1.0), truncation=4)
    mode = solve_bands(spec, [0.0], 1)[0]
    assert mode.lam == pytest.approx(1.0, abs=1e-12)
    p = mode.on_cell(Lattice(1, 16))
    assert np.allclose(p, 1 / np.sqrt(2 * np.pi))


def test_band4_value(op_spec):
    lam = band_values(op_spec, K0, 4)
    assert lam[3] == pytest.approx(2.075, abs=0.005)


def test_eigen_residual_and_orthonormality(op_spec):
    modes = solve_bands(op_spec, K0, 6)
    A, B = assemble_operator(op_spec, K0)
    C = np.column_stack([m.coeffs for m in modes])
    resid = A @ C - C * [m.lam for m in modes]
    for i, m in enumerate(modes):
        assert np.linalg.norm(resid[:, i]) <= 1e-8 * (1 + abs(m.lam)) * np.linalg.norm(
            C[:, i]
        )
    gram = (2 * np.pi) ** 2 * (C.conj().T @ C)  # B = identity here
    assert np.max(np.abs(gram - np.eye(6))) < 1e-9


def test_mass_orthonormality_with_chi1():
    chi2 = PeriodicCoefficients.cosprod(1, 0.5) + 2.0
    chi1 = PeriodicCoefficients.cosprod(1, 0.3) + 1.5
    spec = BlochOperatorSpec(1, chi2, chi1=chi1, truncation=6, kind="wave")
    modes = solve_bands(spec, [0.2], 4)
    A, B = assemble_operator(spec, [0.2])
    C = np.column_stack([m.coeffs for m in modes])
    gram = (2 * np.pi) * (C.conj().T @ B @ C)
    assert np.max(np.abs(gram - np.eye(4))) < 1e-9
    assert all(m.norm_convention == "L2_chi1" for m in modes)


def test_truncation_refinement_oracle():
    V = 0.01 * random_hermitian(1, 2, seed=12)  # smooth, small potential
    lo = band_values(BlochOperatorSpec(1, V, truncation=2), [0.3], 3)
    hi = band_values(BlochOperatorSpec(1, V, truncation=4), [0.3], 3)
    assert np.max(np.abs(lo - hi)) < 1e-4


def test_truncation_convergence_is_spectral(coscos):
    k = np.array([0.4, 0.0])
    errs = []
    ref = band_values(
        BlochOperatorSpec(2, coscos, truncation=16, sublattice_parity=1), k, 6
    )
    for N in (2, 4, 6):
        lam = band_values(
            BlochOperatorSpec(2, coscos, truncation=N, sublattice_parity=1), k, 6
        )
        errs.append(np.max(np.abs(lam - ref)) + 1e-16)
    # spectral decay, down to the roundoff floor
    assert errs[1] < max(errs[0] / 10, 1e-12)
    assert errs[2] < max(errs[1] / 10, 1e-12)


def test_band_periodicity(op_spec):
    for k in ([0.1, 0.2], [0.4, 0.0]):
        lam = band_values(op_spec, k, 6)
        lam_shift = band_values(op_spec, np.add(k, (1, 0)), 6)
        assert np.max(np.abs(lam - lam_shift)) < 1e-8


def test_free_1d_band_structure_matches_folding():
    spec = BlochOperatorSpec(1, PeriodicCoefficients.constant(1, 0.0), truncation=8)
    ks = np.linspace(-0.4, 0.5, 10)[:, None]
    table = band_structure(spec, ks, 5)
    for i, k in enumerate(ks[:, 0]):
        folded = np.sort([(k + m) ** 2 for m in range(-8, 9)])[:5]
        assert np.max(np.abs(table.bands[i] - folded)) < 1e-10


def test_k_path_corners():
    ks, s, ticks = k_path("GXMG", 2, points_per_segment=10)
    assert np.allclose(ks[0], [0, 0]) and np.allclose(ks[-1], [0, 0])
    assert [lbl for _, lbl in ticks] == ["G", "X", "M", "G"]
    assert np.all(np.diff(s) > 0)
    with pytest.raises(ValueError):
        k_path("GQ", 2)


def test_gradient_free_case():
    spec = BlochOperatorSpec(2, PeriodicCoefficients.constant(2, 1.0), truncation=3)
    k0 = [0.15, -0.2]
    g = band_gradient(spec, k0, 1)
    H = band_hessian(spec, k0, 1)
    assert np.allclose(g, np.multiply(2.0, k0), atol=1e-8)
    assert np.allclose(H, 2 * np.eye(2), atol=1e-6)


def test_gradient_vanishes_at_symmetry_point(coscos):
    spec = BlochOperatorSpec(2, coscos, truncation=8)
    g = band_gradient(spec, [0.0, 0.0], 1)
    assert np.max(np.abs(g)) < 1e-8


def test_gradient_values_and_hf_crosscheck(op_spec):
    g = band_gradient(op_spec, K0, 4)
    assert g[0] == pytest.approx(2.5083, abs=0.005)
    assert g[1] == pytest.approx(0.0, abs=0.005)
    ghf = hellmann_feynman_gradient(op_spec, K0, 4)
    assert np.max(np.abs(g - ghf)) <= 1e-6 * max(1.0, np.max(np.abs(g)))


def test_hessian_value_and_symmetry(op_spec):
    H = band_hessian(op_spec, K0, 4)
    half = 0.5 * H
    assert half[0, 0] == pytest.approx(1.5854, abs=0.02)
    assert half[1, 1] == pytest.approx(1.5854, abs=0.02)
    assert abs(half[0, 1]) <= 0.02 and abs(half[1, 0]) <= 0.02
    assert np.max(np.abs(H - H.T)) <= 1e-6 * np.max(np.abs(H))


def test_wave_kind_takes_square_roots():
    chi2 = PeriodicCoefficients.constant(1, 1.0)
    spec = BlochOperatorSpec(1, chi2, truncation=6, kind="wave")
    om = omega_values(spec, [0.1], 3)
    lam = band_values(spec, [0.1], 3)
    assert np.allclose(om, np.sqrt(lam))


def test_asymptotics_free_1d():
    spec = BlochOperatorSpec(1, PeriodicCoefficients.constant(1, 0.0), truncation=40)
    C1, C2 = check_asymptotics(spec, [0.0], 40)
    # folded free bands: lambda_n ~ (n/2)^2, so lambda_n/n^2 -> 1/4
    lam = band_values(spec, [0.0], 40)
    assert lam[-1] / 40**2 == pytest.approx(0.25, rel=0.1)
    assert C1 <= C2


def test_asymptotics_coscos_bounded(op_spec):
    full = BlochOperatorSpec(2, op_spec.chi2, truncation=12)
    C1, C2 = check_asymptotics(full, K0, 40)
    assert 0 < C1 <= C2
    assert C2 / C1 < 10


def test_asymptotics_approach_free_constants_for_small_potential():
    free = check_asymptotics(
        BlochOperatorSpec(1, PeriodicCoefficients.constant(1, 0.0), truncation=30),
        [0.25],
        30,
    )
    devs = []
    for amp in (1.0, 0.1):
        spec = BlochOperatorSpec(1, PeriodicCoefficients.cosprod(1, amp), truncation=30)
        C1, C2 = check_asymptotics(spec, [0.25], 30)
        devs.append(abs(C1 - free[0]) + abs(C2 - free[1]))
    assert devs[1] < devs[0] / 10


def brute_force_margin(k0, n0, n_scan):
    """Independent enumeration for chi1=chi2=1 (d=1): omega = sqrt((k+m)^2+1)
    folded into bands by sorting at each reduced wavenumber."""

    def omegas(k):
        k = (k + 0.5) % 1.0 - 0.5
        k = 0.5 if k == -0.5 else k
        vals = np.sort((k + np.arange(-200, 201)) ** 2 + 1.0)[:n_scan]
        return np.sqrt(vals)

    om0 = omegas(k0)[n0 - 1]
    best = np.inf
    for j in (1, -1, 3, -3):
        om = omegas(j * k0)
        for sign in (1, -1):
            for n in range(1, n_scan + 1):
                if (sign * n, j) in ((n0, 1), (-n0, -1)):
                    continue
                best = min(best, abs(j * om0 - sign * om[n - 1]))
    return best


def test_nonresonance_matches_enumeration_oracle():
    spec = BlochOperatorSpec(
        1, PeriodicCoefficients.constant(1, 1.0), truncation=80, kind="wave"
    )
    result = check_nonresonance(spec, [0.1], 1, n_scan=64)
    assert abs(result.margin - brute_force_margin(0.1, 1, 64)) < 1e-10


def test_nonresonance_excludes_carrier_pair():
    # the carrier pair would give distance 0; a positive margin proves it
    # was skipped
    spec = BlochOperatorSpec(
        1, PeriodicCoefficients.constant(1, 1.0), truncation=80, kind="wave"
    )
    result = check_nonresonance(spec, [0.1], 1, n_scan=64)
    assert result.margin > 1e-8
    assert result.argmin not in ((1, 1), (-1, -1))


def test_nonresonance_rejects_schrodinger_kind(op_spec):
    with pytest.raises(ValueError):
        check_nonresonance(op_spec, K0, 4)


def test_parity_restriction_rejects_coupling_potentials():
    V = PeriodicCoefficients.from_modes(2, 1, {(1, 0): 0.5})  # odd mode sum
    spec = BlochOperatorSpec(2, V, truncation=4, sublattice_parity=1)
    with pytest.raises(ValueError):
        assemble_operator(spec, [0.0, 0.0])


def test_parity_sector_is_subspectrum(coscos):
    # sector eigenvalues must appear in the full spectrum
    k = [0.4, 0.0]
    full = band_values(BlochOperatorSpec(2, coscos, truncation=10), k, 12)
    odd = band_values(
        BlochOperatorSpec(2, coscos, truncation=10, sublattice_parity=1), k, 4
    )
    for lam in odd:
        assert np.min(np.abs(full - lam)) < 1e-8
