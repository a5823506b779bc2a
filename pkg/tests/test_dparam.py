from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dodiff.dparam import (
    DeltaMixture,
    TabulatedDensity,
    UniformBand,
    eval_g,
    eval_h,
    eval_phi,
    moments,
    sin_moment,
)
from dodiff.errors import (
    EmptySupport,
    NegativeWeight,
    NormalizationViolation,
    SupportOutOfRange,
)


def _quad_phi(density, a, b, r, theta=math.pi):
    # the cosine part can vanish, so the absolute tolerance follows int C r**mu
    scale = integrate.quad(lambda m: density(m) * r**m, a, b)[0]

    def part(trig):
        return integrate.quad(
            lambda m: density(m) * r**m * trig(m * theta), a, b,
            epsabs=1e-14 * scale, epsrel=1e-13, limit=200,
        )[0]

    return part(math.cos), part(math.sin)


def test_band_h_at_one():
    # antiderivative of sin(pi nu) over [0.2, 0.8], divided by the width
    C = UniformBand(0.2, 0.8)
    expected = (math.cos(0.2 * math.pi) - math.cos(0.8 * math.pi)) / (0.6 * math.pi)
    assert eval_h(C, 1.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.8583936913341398, rel=1e-14)
    # symmetric band about 1/2 has zero cosine moment at r = 1
    assert eval_g(C, 1.0, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_single_order_phi():
    C = DeltaMixture(((2.0, 0.5),))
    r = np.array([1e-3, 0.5, 4.0, 1e5])
    phi = eval_phi(C, r)
    np.testing.assert_allclose(phi.imag, 2.0 * np.sqrt(r), rtol=1e-14)
    assert np.all(np.abs(phi.real) <= 1e-14 * np.sqrt(r))


def test_phi_at_zero():
    assert eval_h(UniformBand(0.2, 0.8), 0.0) == 0.0
    assert eval_g(UniformBand(0.2, 0.8), 0.0, math.pi) == pytest.approx(math.pi**2)


@pytest.mark.parametrize("r", [1e-6, 1e-3, 0.9999999, 1.0, 1.0000001, 3.7, 1e3, 1e6])
def test_tabulated_matches_quadrature(r):
    C = TabulatedDensity((0.1, 0.3, 0.5, 0.7, 0.9), (0.0, 1.0, 2.0, 1.0, 0.0))
    re, im = 0.0, 0.0
    for a, b in zip(C.nodes[:-1], C.nodes[1:]):
        pr, pi = _quad_phi(C.density, a, b, r)
        re += pr
        im += pi
    scale = integrate.quad(lambda m: C.density(m) * r**m, 0.1, 0.9, points=[0.3, 0.5, 0.7])[0]
    phi = eval_phi(C, r)
    assert abs(phi.real - re) <= 1e-12 * scale
    assert abs(phi.imag - im) <= 1e-12 * scale


def test_moments_band():
    C = UniformBand(0.2, 0.8, weight=3.0)
    M, Ct, Ch = moments(C)
    assert Ct == pytest.approx(3.0)
    assert M == pytest.approx(3.0 * 0.8583936913341398, rel=1e-13)
    assert Ch == pytest.approx(math.sqrt(9.0 / 0.6), rel=1e-13)


def test_moments_delta_has_no_l2_norm():
    M, Ct, Ch = moments(DeltaMixture(((0.5, 0.3), (0.5, 0.7))))
    assert Ch is None
    assert Ct == pytest.approx(1.0)
    assert M == pytest.approx(0.5 * math.sin(0.3 * math.pi) + 0.5 * math.sin(0.7 * math.pi))


def test_classical_dispatch_flags():
    assert DeltaMixture(((2.0, 1.0),)).classical_weight == 2.0
    assert DeltaMixture(((1.0, 1.0), (0.5, 0.5))).classical_weight is None
    assert UniformBand(0.5, 1.0).classical_weight is None


@pytest.mark.parametrize(
    "make, err",
    [
        (lambda: DeltaMixture(((-1.0, 0.5),)), NegativeWeight),
        (lambda: DeltaMixture(((1.0, 0.0),)), SupportOutOfRange),
        (lambda: DeltaMixture(((1.0, 1.2),)), SupportOutOfRange),
        (lambda: DeltaMixture(()), EmptySupport),
        (lambda: DeltaMixture(((0.0, 0.5),)), EmptySupport),
        (lambda: UniformBand(0.7, 0.3), SupportOutOfRange),
        (lambda: UniformBand(0.0, 0.3), SupportOutOfRange),
        (lambda: UniformBand(0.2, 0.8, weight=-1.0), NegativeWeight),
        (lambda: TabulatedDensity((0.1, 0.5), (1.0, -1.0)), NegativeWeight),
        (lambda: TabulatedDensity((0.5, 0.1), (1.0, 1.0)), SupportOutOfRange),
        (lambda: TabulatedDensity((0.1, 0.5), (0.0, 0.0)), EmptySupport),
        (lambda: UniformBand(0.2, 0.8, weight=2.0, normalized=True), NormalizationViolation),
    ],
)
def test_invalid_parameters(make, err):
    with pytest.raises(err):
        make()


def test_normalized_accepts_unit_mass():
    UniformBand(0.2, 0.8, normalized=True)
    DeltaMixture(((0.25, 0.3), (0.75, 0.9)), normalized=True)


def test_pole_free_grid(suite):
    thetas = np.linspace(0, math.pi, 61)[1:-1]
    r = np.logspace(-4, 4, 81)
    for C in suite:
        for th in thetas:
            assert np.all(sin_moment(C, r, th) > 0)


# --- properties ------------------------------------------------------------------

orders = st.floats(min_value=0.05, max_value=0.95)
weights = st.floats(min_value=0.01, max_value=10.0)
radii = st.floats(min_value=1e-6, max_value=1e6)


@st.composite
def bands_st(draw):
    a = draw(st.floats(min_value=0.01, max_value=0.9))
    b = draw(st.floats(min_value=a + 0.02, max_value=1.0))
    return UniformBand(a, b, draw(weights))


@st.composite
def params_st(draw):
    kind = draw(st.sampled_from(["delta", "band", "tab"]))
    if kind == "delta":
        comps = draw(st.lists(st.tuples(weights, orders), min_size=1, max_size=3))
        return DeltaMixture(tuple(comps))
    if kind == "band":
        return draw(bands_st())
    nodes = sorted(set(draw(st.lists(orders, min_size=2, max_size=5, unique=True))))
    if len(nodes) < 2 or min(np.diff(nodes)) < 1e-3:
        nodes = [0.2, 0.6]
    vals = draw(st.lists(weights, min_size=len(nodes), max_size=len(nodes)))
    return TabulatedDensity(tuple(nodes), tuple(vals))


@settings(max_examples=60, deadline=None)
@given(params_st(), radii, st.floats(min_value=0.1, max_value=50.0))
def test_scaling(C, r, c):
    assert eval_h(C.scaled(c), r) == pytest.approx(c * eval_h(C, r), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(params_st(), radii, st.floats(min_value=1.0001, max_value=100.0))
def test_h_positive_and_nondecreasing(C, r, factor):
    h1 = eval_h(C, r)
    h2 = eval_h(C, r * factor)
    assert h1 > 0
    assert h2 >= h1 * (1 - 1e-13)


@settings(max_examples=60, deadline=None)
@given(params_st(), radii, st.floats(min_value=1e-3, max_value=math.pi - 1e-3))
def test_sin_moment_positive(C, r, theta):
    assert sin_moment(C, r, theta) > 0


@settings(max_examples=40, deadline=None)
@given(bands_st(), radii)
def test_band_closed_form_vs_quadrature(C, r):
    d = C.weight / (C.nu2 - C.nu1)
    re, im = _quad_phi(lambda m: d, C.nu1, C.nu2, r)
    scale = d * integrate.quad(lambda m: r**m, C.nu1, C.nu2)[0]
    phi = eval_phi(C, r)
    assert abs(phi.imag - im) <= 1e-10 * scale
    assert abs(phi.real - re) <= 1e-10 * scale
