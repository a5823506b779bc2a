"""Independent reference machinery for checking the spectral kernel.

Nothing here touches :mod:`dodiff.spectral` or its quadrature: the
Mittag-Leffler function uses an arbitrary-precision power series and a
QUADPACK integral, the Laplace inverse is a fixed-Talbot contour sum, and the
time-domain check discretizes the Caputo derivative directly.
"""

from __future__ import annotations

import math
from typing import Callable

import mpmath
import numpy as np
from scipy import integrate, special

from dodiff.dparam import DeltaMixture, DiffusionParameter
from dodiff.errors import ContourFailure, ConvergenceFailure, GridTooCoarse

__all__ = [
    "mittag_leffler",
    "ml_series",
    "ml_integral",
    "erfcx",
    "si",
    "ci",
    "laplace_invert",
    "relaxation_transform",
    "graded_grid",
    "caputo_residual",
]

SERIES_LIMIT = 5.0
# beyond this many terms the series hands over to the integral
SERIES_MAX_TERMS = 12000


def ml_series(mu: float, x: float, max_terms: int = SERIES_MAX_TERMS) -> float:
    """``sum_k x**k / Gamma(mu k + 1)`` summed in extended precision.

    For small ``mu`` the terms grow enormously before they decay (at
    ``mu = 1/4``, ``x = -5`` the largest is near 1e600), so double precision
    loses everything to cancellation; the working precision is raised to
    cover the largest term.
    """
    if x == 0:
        return 1.0
    ax = abs(x)
    lx = math.log(ax)
    # locate the largest term and the point where terms fall below 1e-40
    peak = 0.0
    k = 0
    while True:
        k += 1
        lt = k * lx - math.lgamma(mu * k + 1.0)
        peak = max(peak, lt)
        if lt < peak and lt < -40 * math.log(10):
            break
        if k >= max_terms:
            raise ConvergenceFailure(
                f"Mittag-Leffler series did not converge in {max_terms} terms",
                achieved_bound=math.exp(min(lt, 700.0)),
            )
    n_terms = k
    digits = int(peak / math.log(10)) + 30
    with mpmath.workprec(int(digits * 3.33) + 16):
        xm = mpmath.mpf(x)
        m = mpmath.mpf(mu)
        total = mpmath.mpf(0)
        for j in range(n_terms + 1):
            total += xm**j / mpmath.gamma(m * j + 1)
        return float(total)


def ml_integral(mu: float, x: float) -> tuple[float, float]:
    """Real-axis integral representation of ``E_mu(x)`` for ``x < 0``, ``0 < mu < 1``.

    With ``y = -x`` and ``v = u**mu`` substituted into the Laplace-type
    representation of ``E_mu(-t**mu)``:

        E_mu(-y) = sin(mu pi)/(mu pi) * int_0^inf exp(-v**(1/mu)) y
                   / (v**2 + 2 y cos(mu pi) v + y**2) dv

    Returns ``(value, error_estimate)``.
    """
    y = -x
    c = math.cos(mu * math.pi)
    p = 1.0 / mu

    def f(v: float) -> float:
        return math.exp(-(v**p)) * y / (v * v + 2.0 * y * c * v + y * y)

    # exp(-v**p) < 1e-300 beyond this point
    vmax = 700.0**mu
    pts = sorted({min(y, vmax / 2), 1.0})
    pieces = [0.0, *[p_ for p_ in pts if 0 < p_ < vmax], vmax]
    total = 0.0
    err = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        val, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
        err += e
    pref = math.sin(mu * math.pi) / (mu * math.pi)
    return pref * total, pref * err


def mittag_leffler(mu: float, x: float) -> float:
    """One-parameter Mittag-Leffler function ``E_mu(x)`` on ``x <= 0``.

    ``mu = 1`` is ``exp(x)`` and ``mu = 1/2`` is ``erfcx(-x)``.  Otherwise the
    power series is used for ``|x| <= 5`` and the integral representation
    beyond, or wherever the series would need more than
    ``SERIES_MAX_TERMS`` terms (small ``mu``).
    """
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu must lie in (0, 1], got {mu}")
    if x > 0:
        raise ValueError("only the negative real axis is supported")
    if x == 0:
        return 1.0
    if mu == 1.0:
        return math.exp(x)
    if mu == 0.5:
        return float(special.erfcx(-x))
    if -x <= SERIES_LIMIT:
        try:
            return ml_series(mu, x)
        except ConvergenceFailure:
            pass
    val, err = ml_integral(mu, x)
    if not err <= 1e-10 * abs(val):
        raise ConvergenceFailure(
            f"Mittag-Leffler integral error {err:.2e} too large", achieved_bound=err
        )
    return val


def erfcx(x):
    """Scaled complementary error function ``exp(x**2) erfc(x)``."""
    return special.erfcx(x)


def si(x):
    """Sine integral ``int_0^x sin(u)/u du``."""
    return special.sici(x)[0]


def ci(x):
    """Cosine integral ``gamma + ln x + int_0^x (cos u - 1)/u du`` (``x > 0``)."""
    return special.sici(x)[1]


def laplace_invert(
    transform: Callable[[np.ndarray], np.ndarray],
    t: float,
    degree: int = 32,
    budget: float = 1e-7,
) -> float:
    """Fixed-Talbot inverse Laplace transform.

    The Bromwich line is deformed onto the contour
    ``s(theta) = r theta (cot theta + i)``, ``r = 2 degree / (5 t)``, which
    wraps around the negative real axis; transforms whose only singularities
    lie on that axis (branch cut or poles) are handled.

    Parameters
    ----------
    transform
        Vectorized over complex ``s``; must use the principal branch.
    t
        Positive time.
    degree
        Number of contour nodes.  Double precision saturates near 32.
    budget
        Largest tolerated relative roundoff implied by cancellation between
        contour terms; exceeding it raises :class:`ContourFailure`.
    """
    if not t > 0:
        raise ValueError("laplace_invert needs t > 0")
    M = int(degree)
    r = 2.0 * M / (5.0 * t)
    theta = np.pi * np.arange(1, M) / M
    cot = 1.0 / np.tan(theta)
    s = r * theta * (cot + 1j)
    sigma = theta + (theta * cot - 1.0) * cot
    fs = np.asarray(transform(s), dtype=complex)
    f0 = complex(np.asarray(transform(np.array([r + 0j])), dtype=complex)[0])
    terms = np.empty(M)
    terms[0] = 0.5 * (np.exp(r * t) * f0).real
    terms[1:] = (np.exp(t * s) * fs * (1.0 + 1j * sigma)).real
    value = r / M * math.fsum(terms)
    if not math.isfinite(value):
        raise ContourFailure("non-finite contour sum")
    scale = r / M * float(np.max(np.abs(terms)))
    if value != 0 and np.finfo(float).eps * scale / abs(value) > budget:
        raise ContourFailure(
            f"cancellation on the contour exceeds budget ({scale / abs(value):.2e})"
        )
    return value


def _nu_rule(C: DiffusionParameter, n: int = 48) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes/weights in nu that integrate smooth functions against C."""
    if isinstance(C, DeltaMixture):
        comps = C._active
        return np.array([nu for _, nu in comps]), np.array([w for w, _ in comps])
    x, w = np.polynomial.legendre.leggauss(n)
    if hasattr(C, "nodes"):
        edges = np.asarray(C.nodes)
    else:
        edges = np.array(C.support)
    nus = []
    wts = []
    for a, b in zip(edges[:-1], edges[1:]):
        nu = 0.5 * (a + b) + 0.5 * (b - a) * x
        nus.append(nu)
        wts.append(0.5 * (b - a) * w * C.density(nu))
    return np.concatenate(nus), np.concatenate(wts)


def relaxation_transform(C: DiffusionParameter, kappa: float) -> Callable[[np.ndarray], np.ndarray]:
    """Laplace transform of the mode relaxation function,

        b(s) = int C(nu) s**(nu-1) dnu / (int C(mu) s**mu dmu + kappa**2),

    with the order integrals done by Gauss-Legendre in ``nu``.
    """
    nu, w = _nu_rule(C, 64)
    k2 = float(kappa) ** 2

    def b(s):
        s = np.asarray(s, dtype=complex)
        logs = np.log(s)
        psi = np.exp(np.multiply.outer(logs, nu)) @ w
        return psi / (s * (psi + k2))

    return b


def graded_grid(T: float, n: int, power: float = 2.0) -> np.ndarray:
    """``t_j = T (j/n)**power`` for ``j = 0..n``; clusters points near zero."""
    j = np.arange(n + 1)
    return T * (j / n) ** power


def _l1_derivative(nodes, vals, points, nu: float) -> np.ndarray:
    """Caputo derivative of order ``nu`` of the piecewise-linear interpolant
    through ``(nodes, vals)``, evaluated exactly at ``points``."""
    slopes = np.diff(vals) / np.diff(nodes)
    left = points[:, None] - nodes[None, :-1]
    right = points[:, None] - nodes[None, 1:]
    if nu == 1.0:
        A = ((left > 0) & (right <= 0)).astype(float)
        return A @ slopes
    e = 1.0 - nu
    A = np.where(left > 0, np.abs(left) ** e, 0.0) - np.where(right > 0, np.abs(right) ** e, 0.0)
    return (A @ slopes) / math.gamma(2.0 - nu)


def _operator(C, nodes, vals, points):
    nu, w = _nu_rule(C, 24)
    out = np.zeros(points.size)
    for n_, w_ in zip(nu, w):
        out += w_ * _l1_derivative(nodes, vals, points, float(n_))
    return out


def caputo_residual(
    C: DiffusionParameter,
    kappa: float,
    curve,
    tol: float | None = None,
    t_start: float | None = None,
) -> float:
    """Max relative residual of ``int C D^nu B dnu + kappa**2 B = 0``.

    Even-indexed samples of ``curve`` are the L1 interpolation nodes; the
    residual is evaluated at the odd-indexed samples, where ``B`` is known
    exactly, using the exact Caputo derivative of the interpolant.  The curve
    must start at ``t = 0`` with ``B = 1``.

    ``B`` behaves like ``1 - c t**nu_min`` near zero, and at the first few
    nodes the L1 truncation error stays O(1) under any refinement.  The
    maximum is therefore taken over ``t >= t_start``, by default 1% of the
    sampled window.

    When ``tol`` is given, the L1 error is estimated by repeating the
    evaluation on every second node; an estimate above ``tol`` raises
    :class:`GridTooCoarse`.
    """
    times = np.asarray(curve.times, dtype=float)
    vals = np.asarray(curve.values, dtype=float)
    if times.size < 5 or times[0] != 0.0:
        raise ValueError("curve must start at t = 0 and have at least 5 samples")
    if abs(vals[0] - 1.0) > 1e-6:
        raise ValueError("curve must satisfy B(0) = 1")
    nodes, nvals = times[0::2], vals[0::2]
    points, pvals = times[1::2], vals[1::2]
    # checkpoints beyond the last node cannot be reached by the interpolant
    if t_start is None:
        t_start = 0.01 * times[-1]
    inside = (points < nodes[-1]) & (points >= t_start)
    if not np.any(inside):
        raise ValueError("no checkpoints after t_start")
    points, pvals = points[inside], pvals[inside]
    k2 = float(kappa) ** 2
    op = _operator(C, nodes, nvals, points)
    rel = np.abs(op + k2 * pvals) / (k2 * np.abs(pvals))
    if tol is not None:
        cn, cv = nodes[0::2], nvals[0::2]
        sub = points < cn[-1]
        coarse = _operator(C, cn, cv, points[sub])
        est = float(np.max(np.abs(op[sub] - coarse) / (k2 * np.abs(pvals[sub]))))
        if est > tol:
            raise GridTooCoarse(
                f"L1 error estimate {est:.2e} exceeds tolerance {tol:.2e}", estimate=est
            )
    return float(np.max(rel))
