import math

import numpy as np
import pytest

from cglwaves.continuation import continue_branch
from cglwaves.domain import make_domain
from cglwaves.eigen import eigenpairs
from cglwaves.params import Params


def bessel_j0(z):
    """Power series for J0, the independent oracle for the radial tests."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    term = np.ones_like(z)
    for m in range(1, 60):
        out += term
        term = -term * (z / 2.0) ** 2 / m**2
    return out


def bessel_j0_first_root():
    """First positive zero of J0 by bisection on the series."""
    lo, hi = 2.0, 3.0
    flo = bessel_j0(np.array([lo]))[0]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fmid = bessel_j0(np.array([mid]))[0]
        if flo * fmid <= 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


@pytest.fixture(scope="session")
def default_params():
    return Params(0.3, -0.2)


@pytest.fixture(scope="session")
def box64():
    return make_domain("box", 1, [math.pi], 64)


@pytest.fixture(scope="session")
def box64_pair(box64):
    return eigenpairs(box64, 2)[0]


@pytest.fixture(scope="session")
def branch64(box64, box64_pair, default_params):
    """Shared branch on the 64-node box, alpha up to 0.5 in steps of 0.025."""
    grid = [round(i * 0.025, 6) for i in range(21)]
    return continue_branch(box64, default_params, box64_pair, grid)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
