from __future__ import annotations

import math

import numpy as np
import pytest

from dodiff.errors import QuadratureNonconvergence
from dodiff.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, integrate


def test_rule_weights():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # Kronrod rule is exact for degree 31
    assert KRONROD_WEIGHTS @ NODES**30 == pytest.approx(2.0 / 31.0, rel=1e-14)


def test_vector_components_reach_own_tolerance():
    # components spanning many orders of magnitude
    scales = np.array([1.0, 1e-8, 1e-16])

    def f(x):
        return np.exp(-x)[:, None] * scales[None, :]

    res = integrate(f, [0.0, 1.0, 5.0], rel_tol=1e-12, abs_tol=1e-300)
    exact = (1 - math.exp(-5.0)) * scales
    np.testing.assert_allclose(res.value, exact, rtol=1e-12)
    assert np.all(res.error <= 1e-12 * exact)


def test_endpoint_singularity():
    res = integrate(lambda x: (1.0 / np.sqrt(x))[:, None], [0.0, 1.0], rel_tol=1e-10)
    assert res.value[0] == pytest.approx(2.0, rel=1e-9)


def test_budget_exceeded():
    with pytest.raises(QuadratureNonconvergence):
        integrate(lambda x: np.sin(1.0 / x)[:, None] / x[:, None], [1e-9, 1.0], max_intervals=20)


def test_bad_breakpoints():
    with pytest.raises(ValueError):
        integrate(lambda x: x[:, None], [1.0, 0.0])
