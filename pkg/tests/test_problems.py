from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from dodiff.dparam import DeltaMixture, UniformBand
from dodiff.errors import AliasWarning, EndpointMismatch, ProblemError
from dodiff.problems import (
    ClosedForm,
    Coefficients,
    ProblemSpec,
    Samples,
    fourier_coefficients,
    green_function,
    solve,
)
from dodiff.spectral import kernel_batch

X = np.linspace(0.0, 1.0, 101)
T = np.array([0.0, 0.01, 0.1, 1.0, 10.0])


@pytest.mark.parametrize("boundary", ["dirichlet", "neumann"])
def test_parabola_coefficients(boundary):
    # closed forms against projection of samples
    xs = np.linspace(0, 1, 4001)
    a = fourier_coefficients(ClosedForm("parabola"), boundary, 20)
    b = fourier_coefficients(Samples(tuple(xs), tuple(xs * (1 - xs))), boundary, 20)
    np.testing.assert_allclose(a, b, atol=1e-12)
    if boundary == "dirichlet":
        assert a[1] == pytest.approx(8 / math.pi**3) and a[2] == 0.0
    else:
        assert a[0] == pytest.approx(1 / 6) and a[2] == pytest.approx(-1 / math.pi**2)


def test_mode_coefficients():
    a = fourier_coefficients(ClosedForm("sine_mode", k=3), "dirichlet", 8)
    assert a[3] == 1.0 and np.count_nonzero(a) == 1
    a = fourier_coefficients(ClosedForm("cosine_mode", k=0), "neumann", 8)
    assert a[0] == 1.0 and np.count_nonzero(a) == 1
    a = fourier_coefficients(Coefficients((9.0, 1.0, 2.0)), "dirichlet", 4)
    np.testing.assert_array_equal(a, [0.0, 1.0, 2.0, 0.0, 0.0])


def test_endpoint_mismatch():
    with pytest.raises(EndpointMismatch):
        fourier_coefficients(ClosedForm("cosine_mode", k=1), "dirichlet", 8)
    xs = np.linspace(0, 1, 11)
    with pytest.raises(EndpointMismatch):
        fourier_coefficients(Samples(tuple(xs), tuple(np.ones(11))), "dirichlet", 8)


def test_dirichlet_single_mode(band):
    sol = solve(band, ProblemSpec("dirichlet", ClosedForm("sine_mode", k=1), modes=8), X, T)
    B, _ = kernel_batch(band, [math.pi], T)
    np.testing.assert_allclose(sol.u, B[0][:, None] * np.sin(math.pi * X)[None, :], atol=1e-13)
    assert sol.u[0, 50] == pytest.approx(1.0, abs=1e-12)
    assert np.all(sol.u[:, [0, -1]] == 0.0)


def test_dirichlet_decay_and_truncation(band):
    s64 = solve(band, ProblemSpec("dirichlet", ClosedForm("parabola"), modes=64), X, T)
    s128 = solve(band, ProblemSpec("dirichlet", ClosedForm("parabola"), modes=128), X, T)
    assert np.all(np.max(np.abs(s64.u - s128.u), axis=1) < s64.truncation_error)
    sup = np.max(np.abs(s64.u), axis=1)
    assert np.all(np.diff(sup) < 0)
    late = solve(band, ProblemSpec("dirichlet", ClosedForm("parabola")), X, [1.0, 1e3])
    assert np.all(np.abs(late.u[1, 1:-1]) < np.abs(late.u[0, 1:-1]))


def test_neumann_constant_and_decay(band):
    sol = solve(band, ProblemSpec("neumann", ClosedForm("cosine_mode", k=0)), X, T)
    assert np.all(sol.u == 1.0)
    s64 = solve(band, ProblemSpec("neumann", ClosedForm("parabola"), modes=64), X, T)
    s128 = solve(band, ProblemSpec("neumann", ClosedForm("parabola"), modes=128), X, T)
    assert np.all(np.max(np.abs(s64.u - s128.u), axis=1) < s64.truncation_error)
    dev = np.max(np.abs(s64.u - 1 / 6), axis=1)
    assert np.all(np.diff(dev) < 0)
    # mean value is preserved
    mean = integrate.simpson(s64.u, x=X, axis=1)
    np.testing.assert_allclose(mean, 1 / 6, atol=1e-12)


def test_linearity(band):
    f1 = ClosedForm("parabola")
    c1 = fourier_coefficients(f1, "dirichlet", 64)
    c2 = fourier_coefficients(ClosedForm("sine_mode", k=2), "dirichlet", 64)
    u1 = solve(band, ProblemSpec("dirichlet", f1), X, T).u
    u2 = solve(band, ProblemSpec("dirichlet", ClosedForm("sine_mode", k=2)), X, T).u
    u12 = solve(band, ProblemSpec("dirichlet", Coefficients(tuple(c1 + c2))), X, T).u
    np.testing.assert_allclose(u12, u1 + u2, atol=1e-12)


def test_cauchy_heat():
    w, c, t = 0.1, 0.3, 0.1
    x = np.linspace(-5, 5, 1001)
    sol = solve(DeltaMixture(((1.0, 1.0),)), ProblemSpec("cauchy", ClosedForm("gaussian", center=c, width=w)), x, [0.0, t])
    ref = w / math.sqrt(w * w + 2 * t) * np.exp(-((x - c) ** 2) / (2 * (w * w + 2 * t)))
    assert np.max(np.abs(sol.u[1] - ref)) < 1e-10
    assert np.max(np.abs(sol.u[0] - np.exp(-((x - c) ** 2) / (2 * w * w)))) < 1e-10


def test_cauchy_mass_and_samples():
    x = np.linspace(-20, 20, 4001)
    t = [0.0, 0.1, 1.0]
    g = ClosedForm("gaussian", center=0.0, width=0.2)
    C = UniformBand(0.3, 0.7)
    sol = solve(C, ProblemSpec("cauchy", g, half_width=20.0), x, t)
    mass = integrate.trapezoid(sol.u, x, axis=1)
    np.testing.assert_allclose(mass, 0.2 * math.sqrt(2 * math.pi), rtol=1e-4)
    # sampled initial data reproduces the analytic transform route
    xs = np.linspace(-3, 3, 1201)
    samp = Samples(tuple(xs), tuple(g(xs)))
    alt = solve(C, ProblemSpec("cauchy", samp, half_width=20.0), x, t)
    assert np.max(np.abs(alt.u - sol.u)) < 1e-6


def test_cauchy_alias_warning():
    with pytest.warns(AliasWarning):
        solve(UniformBand(0.3, 0.7), ProblemSpec("cauchy", ClosedForm("gaussian", width=1.0), half_width=2.0), [0.0], [0.1])


def test_cauchy_rejects_periodic_data():
    with pytest.raises(ProblemError):
        solve(UniformBand(0.3, 0.7), ProblemSpec("cauchy", ClosedForm("parabola")), [0.0], [0.1])


def test_green_function_routes_agree():
    C = DeltaMixture(((1.0, 0.5),))
    dx = 0.01
    x = np.arange(-3, 3 + dx / 2, dx)
    G = green_function(C, x, 0.1)
    assert np.max(np.abs(G - G[::-1])) < 1e-10
    assert G[np.argmin(np.abs(x))] == pytest.approx(0.0, abs=1e-12)
    d2 = -(G[2:] - 2 * G[1:-1] + G[:-2]) / dx**2
    assert d2.min() >= -1e-8
    xm = x[1:-1]
    w, c = 0.1, 0.3
    xs = np.linspace(-1, 1.5, 26)
    conv = np.array([np.sum(np.exp(-((xx - xm - c) ** 2) / (2 * w * w)) * d2) * dx / math.pi for xx in xs])
    sol = solve(C, ProblemSpec("cauchy", ClosedForm("gaussian", center=c, width=w)), xs, [0.1])
    assert np.max(np.abs(conv - sol.u[0])) < 5e-4


def test_problem_spec_validation():
    with pytest.raises(ProblemError):
        ProblemSpec("robin", ClosedForm("parabola"))
    with pytest.raises(ProblemError):
        ProblemSpec("dirichlet", ClosedForm("parabola"), modes=0)
    with pytest.raises(ProblemError):
        Samples((0.0, 1.0), (0.0, 0.0))
