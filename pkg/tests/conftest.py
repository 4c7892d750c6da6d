import random

import pytest
from mpmath import mp

from oscillator_channel.model import OscillatorParams, case_study_params, derive_frame


def random_frame(rng, precision_bits=256):
    """A strongly coupled, well-conditioned frame with O(1) parameters."""
    while True:
        params = OscillatorParams(
            m_x=str(round(rng.uniform(0.5, 2), 6)), m_y=str(round(rng.uniform(0.5, 2), 6)),
            omega_x_bare=str(round(rng.uniform(1, 2), 6)), omega_y_bare=str(round(rng.uniform(2.5, 4), 6)),
            k=str(round(rng.uniform(0.2, 1.5), 6)), precision_bits=precision_bits,
        )
        try:
            return derive_frame(params)
        except ArithmeticError:
            continue


@pytest.fixture(autouse=True)
def _precision():
    with mp.workprec(256):
        yield


@pytest.fixture(scope="session")
def case_frame():
    return derive_frame(case_study_params())


@pytest.fixture(scope="session")
def identity_frame():
    return derive_frame(OscillatorParams("1e-6", "1e-6", "1e6", "1e7", 0))


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def case_pipeline():
    from oscillator_channel.cli import build_pipeline, parse_config

    return build_pipeline(parse_config(""))


@pytest.fixture(scope="session")
def identity_pipeline():
    from oscillator_channel.cli import build_pipeline, parse_config

    return build_pipeline(parse_config("k = 0\nm_y = 1e-6\nN_prime = none"))
