import numpy as np
import pytest

from blochnls import (
    BlochOperatorSpec,
    PeriodicCoefficients,
    effective_params,
    solve_bands,
    townes_shoot,
)

K0 = np.array([0.4, 0.0])
N0 = 4


@pytest.fixture(scope="session")
def coscos():
    return PeriodicCoefficients.cosprod(2, 1.0)


@pytest.fixture(scope="session")
def sigma_example(coscos):
    return coscos + (-2.0)


@pytest.fixture(scope="session")
def op_spec(coscos):
    return BlochOperatorSpec(2, coscos, truncation=12, sublattice_parity=1)


@pytest.fixture(scope="session")
def carrier_mode(op_spec):
    return solve_bands(op_spec, K0, N0, check_simple_at=N0)[N0 - 1]


@pytest.fixture(scope="session")
def params_example(op_spec, sigma_example):
    return effective_params(op_spec, K0, N0, sigma_example)


@pytest.fixture(scope="session")
def canonical_profile():
    return townes_shoot(2)


@pytest.fixture(scope="session")
def scaled_profile(params_example):
    return townes_shoot(2, alpha=params_example.alpha, nu=params_example.nu, r_max=60.0)
