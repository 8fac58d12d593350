import os
from math import gcd
from functools import lru_cache

import hypothesis
import numpy as np
import pytest

import gf_core
from spectra_settings import SpectraSettings

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=25, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))

# defaults only; independent of config.ini and the environment
TEST_SETTINGS = SpectraSettings()


@lru_cache(maxsize=None)
def cached_field(p: int, n: int) -> gf_core.FieldSpec:
    return gf_core.build_field(p, n, settings=TEST_SETTINGS)


@pytest.fixture
def field():
    return cached_field


@pytest.fixture
def settings():
    return TEST_SETTINGS


PRIMES = (2, 3, 5, 7, 11, 13)


def family_grid(max_order: int, all_s: bool = False, m_max: int = 4):
    """
    Applicable (p, m, s) with p^{2m} <= max_order. Spectra depend on s only
    through t = gcd(s, p^m+1), so by default s = t stands in for its class.
    """
    for p in PRIMES:
        for m in range(1, m_max + 1):
            q = p ** m
            if q * q > max_order:
                break
            if all_s:
                choices = range(1, q + 1)
            else:
                choices = [t for t in range(1, q + 1) if (q + 1) % t == 0]
            for s in choices:
                t = gcd(s, q + 1)
                if (q + 1) > 3 * t:
                    yield p, m, s


def grid_id(case) -> str:
    return "p{}-m{}-s{}".format(*case)
