import numpy as np
import pytest

from nfradar import Scenario, reference_scenario


@pytest.fixture(scope="session")
def ref_sc():
    return reference_scenario()


@pytest.fixture(scope="session")
def ref_sc_10ghz():
    # same array and plate, carrier dropped to where the exact integral
    # is cheap enough to run for every pair
    return reference_scenario(carrier_freq=10e9)


@pytest.fixture(scope="session")
def ref_sc_5ghz():
    # 5 GHz keeps R = 2 m scenarios above the validity floor only with a
    # relaxed gate (2 m is about 33 wavelengths there)
    return reference_scenario(carrier_freq=5e9, min_range_wavelengths=30.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260819)


def make_scenario(**kw) -> Scenario:
    return reference_scenario(**kw)
