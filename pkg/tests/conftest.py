import pytest

from cantorlab.measure import DEFAULT_SPEC, build_atoms, wick_constants


@pytest.fixture(scope="session")
def spec():
    return DEFAULT_SPEC


@pytest.fixture(scope="session")
def atoms_native(spec):
    return build_atoms(spec, "native")


@pytest.fixture(scope="session")
def atoms_tilde(spec):
    return build_atoms(spec, "nu_tilde")


@pytest.fixture(scope="session")
def atoms_tilde_prime(spec):
    return build_atoms(spec, "nu_tilde_prime")


@pytest.fixture(scope="session")
def wick_1e6(spec):
    return wick_constants(spec, 10**6)
