"""Shared fixtures: the operator specs exercised across the suite."""

from pathlib import Path

import numpy as np
import pytest

from kolmo import KernelContext, heat_spec, kolmogorov_spec, load_spec, make_spec

SPEC_DIR = Path(__file__).resolve().parents[1] / "specs"


@pytest.fixture(scope="session")
def kspec():
    """Classical kinetic operator, B = B_0, alpha = (1, 3), Q = 4."""
    return kolmogorov_spec()


@pytest.fixture(scope="session")
def kctx(kspec):
    return KernelContext(kspec)


@pytest.fixture(scope="session")
def kinetic():
    """Same block shape with the opposite subdiagonal sign."""
    return load_spec(SPEC_DIR / "kinetic.json")


@pytest.fixture(scope="session")
def drifted():
    """Non-principal drift (diagonal entry on top of the subdiagonal)."""
    return load_spec(SPEC_DIR / "kinetic_drifted.json")


@pytest.fixture(scope="session")
def heat():
    return heat_spec(1)


@pytest.fixture(scope="session")
def kappa2():
    """Three-level principal drift: alpha = (1, 3, 5), Q = 9."""
    B = np.zeros((3, 3))
    B[1, 0] = 1.0
    B[2, 1] = -2.0
    return make_spec(np.eye(1), B, (1, 1, 1))
