from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special

from dodiff import oracle
from dodiff.dparam import DeltaMixture, UniformBand
from dodiff.errors import ContourFailure, GridTooCoarse
from dodiff.spectral import KernelCurve, SpectralContext, kernel_curve


def test_ml_special_orders():
    assert oracle.mittag_leffler(1.0, -2.0) == pytest.approx(math.exp(-2.0), rel=1e-15)
    assert oracle.mittag_leffler(0.5, -3.0) == pytest.approx(special.erfcx(3.0), rel=1e-15)
    assert oracle.mittag_leffler(0.3, 0.0) == 1.0


@pytest.mark.parametrize("mu", [0.25, 0.3, 0.75, 0.9])
@pytest.mark.parametrize("x", [-0.5, -2.0, -4.5])
def test_ml_series_matches_integral(mu, x):
    s = oracle.ml_series(mu, x)
    i, e = oracle.ml_integral(mu, x)
    assert s == pytest.approx(i, rel=1e-12)
    assert e < 1e-10 * abs(i)


def test_ml_half_via_general_paths():
    # the erfcx shortcut is independent of both general evaluators
    for x in (-0.7, -3.0):
        assert oracle.ml_series(0.5, x) == pytest.approx(special.erfcx(-x), rel=1e-13)
    assert oracle.ml_integral(0.5, -20.0)[0] == pytest.approx(special.erfcx(20.0), rel=1e-11)


def test_ml_small_order_falls_back_to_integral():
    # the series would need millions of terms here
    v = oracle.mittag_leffler(0.1, -4.0)
    assert v == pytest.approx(oracle.ml_integral(0.1, -4.0)[0], rel=1e-14)
    assert 0 < v < 1


def test_ml_large_argument_asymptotics():
    # E_mu(-y) ~ y**-1 / Gamma(1 - mu)
    mu, y = 0.6, 1e6
    assert oracle.mittag_leffler(mu, -y) == pytest.approx(1 / (y * math.gamma(1 - mu)), rel=1e-5)


def test_ml_domain():
    with pytest.raises(ValueError):
        oracle.mittag_leffler(1.5, -1.0)
    with pytest.raises(ValueError):
        oracle.mittag_leffler(0.5, 1.0)


def test_si_ci():
    assert oracle.si(1.0) == pytest.approx(0.9460830703671830, rel=1e-15)
    assert oracle.ci(1.0) == pytest.approx(0.3374039229009681, rel=1e-15)
    assert oracle.si(np.inf) == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_talbot_elementary(t):
    assert oracle.laplace_invert(lambda s: 1 / (s + 1), t) == pytest.approx(math.exp(-t), rel=1e-9)
    assert oracle.laplace_invert(lambda s: 1 / np.sqrt(s), t) == pytest.approx(1 / math.sqrt(math.pi * t), rel=1e-9)


def test_talbot_budget():
    with pytest.raises(ContourFailure):
        oracle.laplace_invert(lambda s: 1 / (s + 1), 50.0, budget=1e-20)


def test_talbot_vs_single_order():
    b = oracle.relaxation_transform(DeltaMixture(((1.0, 0.75),)), math.pi)
    for t in (0.1, 1.0):
        ref = oracle.mittag_leffler(0.75, -(math.pi**2) * t**0.75)
        assert oracle.laplace_invert(b, t) == pytest.approx(ref, rel=1e-8)


def test_graded_grid():
    g = oracle.graded_grid(2.0, 4)
    np.testing.assert_allclose(g, [0, 0.125, 0.5, 1.125, 2.0])


def test_residual_exact_exponential():
    # the classical relaxation satisfies B' + kappa**2 B = 0
    C = DeltaMixture(((1.0, 1.0),))
    t = oracle.graded_grid(0.2, 2000)
    curve = KernelCurve(t, np.exp(-(math.pi**2) * t), np.zeros_like(t))
    assert oracle.caputo_residual(C, math.pi, curve) < 1e-5


def test_residual_detects_wrong_kernel():
    C = UniformBand(0.2, 0.8)
    t = oracle.graded_grid(1.0, 1000)
    good = kernel_curve(SpectralContext(C, math.pi), t)
    bad = KernelCurve(t, good.values ** 1.1, good.abs_err_estimates)
    assert oracle.caputo_residual(C, math.pi, good) < 1e-3
    assert oracle.caputo_residual(C, math.pi, bad) > 1e-2


def test_residual_converges():
    C = DeltaMixture(((1.0, 0.5),))
    res = []
    for n in (250, 1000):
        t = oracle.graded_grid(1.0, n)
        res.append(oracle.caputo_residual(C, math.pi, kernel_curve(SpectralContext(C, math.pi), t)))
    assert res[1] < res[0] / 3


def test_residual_grid_too_coarse():
    C = DeltaMixture(((1.0, 0.5),))
    t = oracle.graded_grid(1.0, 40)
    with pytest.raises(GridTooCoarse):
        oracle.caputo_residual(C, math.pi, kernel_curve(SpectralContext(C, math.pi), t), tol=1e-8)
