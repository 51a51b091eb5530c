import math

import numpy as np
import pytest

from pulseforge import PrepareSpec, SystemParams, synthesize_preparation

# Zeeman splitting used by the worked examples: 2*pi x 0.5 GHz
REF_DELTA = math.pi * 1e9


@pytest.fixture
def ref_params():
    return SystemParams(delta=REF_DELTA)


@pytest.fixture
def ref_prep_schedule(ref_params):
    """Preparation of (b2, b3) = (1/2, e^{i pi/2} sqrt(3)/2) from |1>."""
    spec = PrepareSpec(b2=0.5, b3=0.5j * math.sqrt(3.0))
    return synthesize_preparation(spec, ref_params)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_unit_state(rng, n=4):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)
