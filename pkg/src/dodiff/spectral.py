"""Time kernel B(t) of the distributed-order relaxation equation.

For a mode with squared wavenumber ``kappa**2`` the time dependence solves

    int_0^1 C(nu) D_t^nu B dnu + kappa**2 B = 0,   B(0) = 1,

and has the branch-cut representation

    B(t) = int_0^inf exp(-r t) rho(r) dr,
    rho(r) = (1/pi) (kappa**2 / r) h(r) / (g(r)**2 + h(r)**2).

The integral is evaluated in ``L = log r``, where ``rho(r) dr`` becomes
``(kappa**2/pi) h / (g**2 + h**2) dL``.  That integrand decays like
``exp(nu_min L)`` as ``L -> -inf`` and like ``exp(-nu_max L)`` as
``L -> +inf``; both tails are mapped onto ``(0, 1]`` by
``z = exp(+-nu L)`` which makes them smooth, so ``t = 0`` needs no special
treatment.  The middle is split at the points where ``|Phi(r)| = kappa**2``
and ``r t = 1`` before adaptive Gauss-Kronrod refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from dodiff import quadrature
from dodiff.dparam import DeltaMixture, DiffusionParameter, Moments, eval_phi
from dodiff.errors import DegenerateSupport

__all__ = [
    "QuadratureSpec",
    "SpectralContext",
    "KernelCurve",
    "kernel_density",
    "kernel",
    "kernel_curve",
    "kernel_batch",
]


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    split_point: float = 1.0
    max_subdivisions: int = 6000

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if not self.split_point > 0:
            raise ValueError("split_point must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class SpectralContext:
    """A diffusion parameter paired with one mode ``kappa`` (n*pi or lambda)."""

    C: DiffusionParameter
    kappa: float
    fast_path: bool = False

    def __post_init__(self) -> None:
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be positive and finite, got {self.kappa}")

    @property
    def moments(self) -> Moments:
        return self.C.moments


@dataclass(frozen=True)
class KernelCurve:
    times: np.ndarray
    values: np.ndarray
    abs_err_estimates: np.ndarray
    kappa: float | None = None

    def __len__(self) -> int:
        return len(self.times)


class KernelValue(NamedTuple):
    value: float
    err_estimate: float


def kernel_density(ctx: SpectralContext, r):
    """Spectral density ``rho(r)``; scalar or array ``r > 0``."""
    if ctx.C.classical_weight is not None:
        raise DegenerateSupport(
            "C is a pure point mass at order 1; the spectrum is a single atom"
        )
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("kernel_density needs r > 0")
    phi = eval_phi(ctx.C, r)
    h = phi.imag
    g = phi.real + ctx.kappa**2
    out = ctx.kappa**2 / (math.pi * r) * _ratio(h, g)
    return float(out) if out.ndim == 0 else out


def _ratio(h: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``h / (g**2 + h**2)`` without overflow; zero where both are huge."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        s = np.maximum(np.abs(g), np.abs(h))
        hs = h / s
        gs = g / s
        out = hs / (s * (gs * gs + hs * hs))
    return np.where(np.isfinite(out), out, 0.0)


def _log_crossing(C: DiffusionParameter, kappa: float) -> float:
    """``L`` with ``int C(mu) exp(mu L) dmu = kappa**2`` (monotone in ``L``)."""
    target = 2.0 * math.log(kappa)

    def f(L: float) -> float:
        val = C.phi_log(np.array([L]), 0.0).real[0]
        return math.log(val) - target if val > 0 else -np.inf

    lo, hi = -10.0, 10.0
    while f(lo) > 0:
        lo *= 2.0
    while f(hi) < 0:
        hi *= 2.0
    return brentq(f, lo, hi, xtol=1e-6)


class _Layout:
    """Piecewise map from the integration variable ``u`` to ``L = log r``.

    ``u`` in ``(0, 1]`` is the lower tail, ``[1, 1 + W]`` the middle
    ``[La, Lb]`` and ``[1 + W, 2 + W)`` the upper tail.
    """

    def __init__(self, nu_min: float, nu_max: float, La: float, Lb: float) -> None:
        self.nu_min = nu_min
        self.nu_max = nu_max
        self.La = La
        self.Lb = Lb
        self.W = Lb - La

    def to_log(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(L, dL/du)``."""
        L = np.empty_like(u)
        jac = np.empty_like(u)
        lower = u < 1.0
        upper = u > 1.0 + self.W
        mid = ~(lower | upper)
        z = u[lower]
        L[lower] = self.La + np.log(z) / self.nu_min
        jac[lower] = 1.0 / (self.nu_min * z)
        L[mid] = self.La + (u[mid] - 1.0)
        jac[mid] = 1.0
        z = 2.0 + self.W - u[upper]
        L[upper] = self.Lb - np.log(z) / self.nu_max
        jac[upper] = 1.0 / (self.nu_max * z)
        return L, jac

    def breakpoints(self, interior_logs) -> np.ndarray:
        pts = [0.0, 1.0, 1.0 + self.W, 2.0 + self.W]
        pts += [1.0 + (x - self.La) for x in interior_logs if self.La < x < self.Lb]
        pts = np.unique(np.asarray(pts))
        # drop near-duplicates but keep the structural points
        keep = [pts[0]]
        for p in pts[1:]:
            if p - keep[-1] > 0.2 or p in (1.0, 1.0 + self.W, 2.0 + self.W):
                keep.append(p)
        return np.unique(np.asarray(keep))


def _interior_logs(L_kappa: np.ndarray, times: np.ndarray, split: float) -> list[float]:
    marks = list(L_kappa)
    marks += list(-np.log(times[times > 0]))
    marks.append(math.log(split))
    marks = np.unique(np.round(np.asarray(marks), 1))
    # cap the number of seeds when many distinct times are requested
    if marks.size > 80:
        marks = np.unique(np.round(marks))
        if marks.size > 80:
            marks = np.linspace(marks[0], marks[-1], 80)
    lo, hi = marks[0], marks[-1]
    grid = np.arange(lo, hi, 3.0)
    return sorted(set(marks.tolist()) | set(grid.tolist()))


def kernel_batch(
    C: DiffusionParameter,
    kappas,
    times,
    q: QuadratureSpec | None = None,
    fast_path: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``B_kappa(t)`` for every ``kappa`` in ``kappas`` and ``t`` in ``times``.

    Returns ``(values, errors)`` of shape ``(len(kappas), len(times))``.
    ``kappa == 0`` rows are identically one (the constant mode).
    """
    q = q or QuadratureSpec()
    kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or not np.all(np.isfinite(times)):
        raise ValueError("times must be finite and nonnegative")
    if np.any(kappas < 0) or not np.all(np.isfinite(kappas)):
        raise ValueError("kappas must be finite and nonnegative")

    values = np.ones((kappas.size, times.size))
    errors = np.zeros((kappas.size, times.size))
    active = kappas > 0
    if not np.any(active):
        return values, errors
    ks = kappas[active]

    w1 = C.classical_weight
    if w1 is not None:
        # C = w delta(nu - 1): classical relaxation exp(-kappa^2 t / w)
        values[active] = np.exp(-np.outer(ks**2, times) / w1)
        return values, errors

    if fast_path and isinstance(C, DeltaMixture) and len(C._active) == 1:
        from dodiff.oracle import mittag_leffler

        w, mu = C._active[0]
        for i, k in zip(np.flatnonzero(active), ks):
            values[i] = [mittag_leffler(mu, -(k**2) / w * t**mu) for t in times]
        return values, errors

    nu_min, nu_max = C.support
    L_kappa = np.array([_log_crossing(C, k) for k in np.unique(ks)])
    seeds = _interior_logs(L_kappa, times, q.split_point)
    layout = _Layout(nu_min, nu_max, seeds[0] - 2.0, seeds[-1] + 3.0)
    k2 = ks**2
    pos_t = times > 0

    def integrand(u: np.ndarray) -> np.ndarray:
        L, jac = layout.to_log(u)
        phi = C.phi_log(L)
        h = phi.imag
        ratio = _ratio(h[:, None], phi.real[:, None] + k2[None, :])
        with np.errstate(over="ignore"):
            r = np.exp(L)
        decay = np.ones((L.size, times.size))
        decay[:, pos_t] = np.exp(-np.outer(r, times[pos_t]))
        out = (k2[None, :] / math.pi) * ratio * jac[:, None]
        return (out[:, :, None] * decay[:, None, :]).reshape(L.size, -1)

    res = quadrature.integrate(
        integrand,
        layout.breakpoints(seeds),
        rel_tol=q.rel_tol,
        abs_tol=q.abs_tol,
        max_intervals=q.max_subdivisions,
    )
    values[active] = res.value.reshape(ks.size, times.size)
    errors[active] = res.error.reshape(ks.size, times.size)
    return values, errors


def kernel(ctx: SpectralContext, t: float, q: QuadratureSpec | None = None) -> KernelValue:
    """``B(t)`` with its quadrature error estimate."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    v, e = kernel_batch(ctx.C, [ctx.kappa], [t], q, fast_path=ctx.fast_path)
    return KernelValue(float(v[0, 0]), float(e[0, 0]))


def kernel_curve(ctx: SpectralContext, times, q: QuadratureSpec | None = None) -> KernelCurve:
    """``B`` on a sorted nonnegative time grid, sharing one adaptive partition."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted")
    v, e = kernel_batch(ctx.C, [ctx.kappa], times, q, fast_path=ctx.fast_path)
    return KernelCurve(times, v[0], e[0], ctx.kappa)
