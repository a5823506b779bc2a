"""Envelopes and comparisons for the central time integral

    I(t) = int_0^inf exp(-r t)/r * h(r) / (g(r)**2 + h(r)**2) dr = pi B(t) / kappa**2.

* :func:`find_m` -- global minimum ``m`` of ``g**2 + h**2``;
* :func:`upper_bound` -- ``(C_tilde/m) J(t) + (M/m) exp(-t)/t``;
* :func:`lower_bound` -- ``M int exp(-r(t+1)) / (Omega**2 r**2 + omega**4) dr``
  in closed form through Si/Ci, or by direct quadrature;
* :func:`compare_decay` -- which of two parameters relaxes more slowly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate
from scipy.optimize import minimize_scalar

from dodiff import oracle
from dodiff.dparam import DiffusionParameter, eval_phi
from dodiff.errors import DeltaUnsupported, DomainError
from dodiff.spectral import QuadratureSpec, kernel_batch

__all__ = [
    "BoundsReport",
    "CompareVerdict",
    "central_integral",
    "find_m",
    "upper_bound",
    "lower_bound",
    "j_integral",
    "j_series",
    "bounds_report",
    "compare_decay",
    "sufficient_condition",
]


def central_integral(C: DiffusionParameter, kappa: float, t, q: QuadratureSpec | None = None):
    """``I(t)``; scalar ``t`` gives ``(value, err)``, an array gives two arrays."""
    scalar = np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    v, e = kernel_batch(C, [kappa], times, q)
    scale = math.pi / kappa**2
    if scalar:
        return float(scale * v[0, 0]), float(scale * e[0, 0])
    return scale * v[0], scale * e[0]


def _denominator(C: DiffusionParameter, kappa: float, r) -> np.ndarray:
    phi = eval_phi(C, r)
    return (phi.real + kappa**2) ** 2 + phi.imag**2


def find_m(C: DiffusionParameter, kappa: float, n_scan: int = 1601) -> tuple[float, float]:
    """Global minimum of ``g(r)**2 + h(r)**2`` over ``r >= 0`` and its location.

    A log-spaced scan over ``[1e-8, 1e8]`` brackets the minimum, which is then
    polished by golden-section search in ``log r``.  The value at ``r = 0`` is
    ``kappa**4``, so ``m <= kappa**4`` always.
    """
    k4 = float(kappa) ** 4
    logs = np.linspace(math.log(1e-8), math.log(1e8), n_scan)
    vals = _denominator(C, kappa, np.exp(logs))
    i = int(np.argmin(vals))
    best_L, best = logs[i], float(vals[i])
    if 0 < i < n_scan - 1:

        def obj(L: float) -> float:
            return float(_denominator(C, kappa, math.exp(L)))

        res = minimize_scalar(
            obj, bracket=(logs[i - 1], logs[i], logs[i + 1]), method="golden",
            options={"xtol": 1e-12},
        )
        if res.fun < best:
            best_L, best = float(res.x), float(res.fun)
    if k4 <= best:
        return k4, 0.0
    return best, math.exp(best_L)


def j_integral(t: float) -> float:
    """``J(t) = int_0^1 exp(-r t) (r - ln r) / sqrt(r) dr`` via ``r = z**2``."""

    def f(z: float) -> float:
        if z == 0.0:
            return 0.0
        return 2.0 * math.exp(-z * z * t) * (z * z - 2.0 * math.log(z))

    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def j_series(t: float, terms: int = 60) -> float:
    """Power series of ``J(t)``; alternating, only usable for small ``t``."""
    parts = []
    c = 1.0
    for k in range(terms):
        if k:
            c *= -t / k
        parts.append(c * (k * k + 2 * k + 1.75) / ((k + 1.5) * (k + 0.5) ** 2))
    return math.fsum(parts)


def upper_bound(C: DiffusionParameter, kappa: float, t: float, m: float | None = None) -> float:
    """Upper envelope of ``I(t)`` for ``t > 0``."""
    if not t > 0:
        raise DomainError("the upper bound diverges at t <= 0")
    if m is None:
        m, _ = find_m(C, kappa)
    mom = C.moments
    return mom.C_tilde / m * j_integral(t) + mom.M / m * math.exp(-t) / t


def _lower_constants(C: DiffusionParameter, kappa: float) -> tuple[float, float, float]:
    mom = C.moments
    if mom.C_hat is None:
        raise DeltaUnsupported(
            "the lower bound needs a square-integrable density (C_hat undefined)"
        )
    ch = mom.C_hat
    Omega = math.sqrt(ch * ch / 3.0 + ch * kappa**2)
    omega_sq = ch + kappa**2
    return mom.M, Omega, omega_sq


def lower_bound(
    C: DiffusionParameter,
    kappa: float,
    t: float,
    method: Literal["quadrature", "closed"] = "quadrature",
) -> float:
    """Lower envelope ``M int_0^inf exp(-r p) / (Omega**2 r**2 + omega**4) dr``, ``p = t + 1``.

    ``method="closed"`` uses ``(M / (Omega**2 a)) [cos(ap)(pi/2 - Si(ap))
    + sin(ap) Ci(ap)]`` with ``a = omega**2 / Omega``.
    """
    if t < 0:
        raise DomainError("lower bound defined for t >= 0")
    M, Omega, omega_sq = _lower_constants(C, kappa)
    p = t + 1.0
    if method == "closed":
        a = omega_sq / Omega
        x = a * p
        bracket = math.cos(x) * (0.5 * math.pi - oracle.si(x)) + math.sin(x) * oracle.ci(x)
        return M / (Omega**2 * a) * bracket
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    o2 = Omega * Omega
    w4 = omega_sq * omega_sq
    val, _ = integrate.quad(
        lambda r: math.exp(-r * p) / (o2 * r * r + w4),
        0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200,
    )
    return M * val


@dataclass(frozen=True)
class BoundsReport:
    kappa: float
    m: float
    r0: float
    Omega: float | None
    omega_sq: float | None
    times: np.ndarray
    central: np.ndarray
    central_err: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def bounds_report(
    C: DiffusionParameter, kappa: float, times, q: QuadratureSpec | None = None
) -> BoundsReport:
    """Evaluate ``I``, both envelopes and the bound constants on a time grid.

    ``upper`` is NaN at ``t = 0``; ``lower`` is NaN for point-mass parameters.
    """
    times = np.asarray(times, dtype=float)
    I, Ierr = central_integral(C, kappa, times, q)
    m, r0 = find_m(C, kappa)
    upper = np.array([upper_bound(C, kappa, t, m) if t > 0 else np.nan for t in times])
    if C.moments.C_hat is None:
        Omega = omega_sq = None
        lower = np.full(times.shape, np.nan)
    else:
        _, Omega, omega_sq = _lower_constants(C, kappa)
        lower = np.array([lower_bound(C, kappa, t) for t in times])
    return BoundsReport(kappa, m, r0, Omega, omega_sq, times, I, Ierr, lower, upper)


@dataclass(frozen=True)
class CompareVerdict:
    holds_for_all_sampled_t: bool
    times: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    pointwise_margin: np.ndarray
    margin_err: np.ndarray
    sufficient_condition_holds: bool


def sufficient_condition(
    C1: DiffusionParameter,
    C2: DiffusionParameter,
    kappa: float,
    r_grid=None,
) -> bool:
    """Pointwise test ``h1/(g1**2+h1**2) > h2/(g2**2+h2**2)`` on a log r-grid."""
    if r_grid is None:
        r_grid = np.logspace(-6, 6, 200)
    r = np.asarray(r_grid, dtype=float)
    p1, p2 = eval_phi(C1, r), eval_phi(C2, r)
    q1 = p1.imag / ((p1.real + kappa**2) ** 2 + p1.imag**2)
    q2 = p2.imag / ((p2.real + kappa**2) ** 2 + p2.imag**2)
    return bool(np.all(q1 > q2))


def compare_decay(
    C1: DiffusionParameter,
    C2: DiffusionParameter,
    kappa: float,
    t_grid,
    q: QuadratureSpec | None = None,
    r_grid=None,
) -> CompareVerdict:
    """Does ``C1`` relax more slowly than ``C2``, i.e. ``I1(t) > I2(t)``?"""
    times = np.asarray(t_grid, dtype=float)
    I1, e1 = central_integral(C1, kappa, times, q)
    I2, e2 = central_integral(C2, kappa, times, q)
    margin = I1 - I2
    return CompareVerdict(
        holds_for_all_sampled_t=bool(np.all(margin > 0)),
        times=times,
        I1=I1,
        I2=I2,
        pointwise_margin=margin,
        margin_err=e1 + e2,
        sufficient_condition_holds=sufficient_condition(C1, C2, kappa, r_grid),
    )
