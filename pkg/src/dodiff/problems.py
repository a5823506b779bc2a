"""Space-time solutions on the unit interval and on the line.

Each spatial mode ``phi_n`` with eigenvalue ``kappa_n**2`` relaxes as
``B_{kappa_n}(t)`` (see :mod:`dodiff.spectral`):

* Dirichlet: ``u = sum_{n>=1} a_n B_{n pi}(t) sin(n pi x)``;
* Neumann:   ``u = a_0 + sum_{n>=1} a_n B_{n pi}(t) cos(n pi x)``;
* Cauchy:    ``U(lambda, t) = F(lambda) B_lambda(t)``, inverted by a cosine
  transform over ``lambda >= 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from scipy.integrate import simpson, trapezoid

from dodiff.dparam import DiffusionParameter
from dodiff.errors import AliasWarning, EndpointMismatch, ProblemError
from dodiff.spectral import QuadratureSpec, kernel_batch

__all__ = [
    "ClosedForm",
    "Coefficients",
    "Samples",
    "ProblemSpec",
    "SolutionField",
    "fourier_coefficients",
    "solve",
    "solve_dirichlet",
    "solve_neumann",
    "solve_cauchy",
    "green_function",
]

Boundary = Literal["dirichlet", "neumann", "cauchy"]
ENDPOINT_TOL = 1e-8
DEFAULT_MODES = 64


@dataclass(frozen=True)
class ClosedForm:
    """Tagged initial profile.

    ``sine_mode``/``cosine_mode`` use ``k``; ``gaussian`` is
    ``exp(-(x - center)**2 / (2 width**2))``; ``parabola`` is ``x (1 - x)``.
    """

    tag: Literal["sine_mode", "cosine_mode", "parabola", "gaussian"]
    k: int = 1
    center: float = 0.0
    width: float = 0.1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.tag == "sine_mode":
            return np.sin(self.k * np.pi * x)
        if self.tag == "cosine_mode":
            return np.cos(self.k * np.pi * x)
        if self.tag == "parabola":
            return x * (1.0 - x)
        if self.tag == "gaussian":
            return np.exp(-0.5 * ((x - self.center) / self.width) ** 2)
        raise ProblemError(f"unknown closed-form tag {self.tag!r}")


@dataclass(frozen=True)
class Coefficients:
    """Fourier coefficients; index 0 is ``a_0`` (ignored for sine series)."""

    values: tuple[float, ...]


@dataclass(frozen=True)
class Samples:
    x: tuple[float, ...]
    f: tuple[float, ...]

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        if x.size != len(self.f) or x.size < 3:
            raise ProblemError("samples need matching x/f arrays of length >= 3")
        if np.any(np.diff(x) <= 0):
            raise ProblemError("sample abscissae must be strictly increasing")


InitialCondition = Union[ClosedForm, Coefficients, Samples]


@dataclass(frozen=True)
class ProblemSpec:
    """Boundary type, initial data and discretization controls.

    ``modes`` is the series cutoff ``N``; ``half_width`` is ``L`` of the
    truncated line ``[-L, L]`` used by the Cauchy problem.
    """

    boundary: Boundary
    initial: InitialCondition
    modes: int = DEFAULT_MODES
    half_width: float = 5.0

    def __post_init__(self) -> None:
        if self.boundary not in ("dirichlet", "neumann", "cauchy"):
            raise ProblemError(f"unknown boundary type {self.boundary!r}")
        if self.modes < 1:
            raise ProblemError("mode cutoff must be >= 1")
        if not self.half_width > 0:
            raise ProblemError("half_width must be positive")


@dataclass(frozen=True)
class SolutionField:
    x: np.ndarray
    t: np.ndarray
    u: np.ndarray  # shape (len(t), len(x))
    truncation_error: np.ndarray  # per t
    quadrature_error: np.ndarray  # per t


# --- coefficients -----------------------------------------------------------

_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


def _project(f, boundary: Boundary, N: int) -> np.ndarray:
    """``a_n`` of a callable on [0, 1] by composite Gauss-Legendre."""
    panels = max(64, 2 * N)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    x = (0.5 * (edges[1:] + edges[:-1])[:, None] + half * _GL16_X[None, :]).ravel()
    w = np.tile(half * _GL16_W, panels)
    fx = f(x) * w
    n = np.arange(N + 1)
    if boundary == "dirichlet":
        a = 2.0 * np.sin(np.pi * np.outer(n, x)) @ fx
        a[0] = 0.0
    else:
        a = 2.0 * np.cos(np.pi * np.outer(n, x)) @ fx
        a[0] *= 0.5
    return a


def _check_endpoints(f0: float, f1: float) -> None:
    if abs(f0) > ENDPOINT_TOL or abs(f1) > ENDPOINT_TOL:
        raise EndpointMismatch(
            f"Dirichlet data must vanish at x = 0 and x = 1 (got {f0:.3g}, {f1:.3g})"
        )


def fourier_coefficients(initial: InitialCondition, boundary: Boundary, N: int) -> np.ndarray:
    """Coefficients ``a_0..a_N`` as an array indexed by ``n``.

    Sine series (Dirichlet) have ``a_0 = 0`` by convention.
    """
    if boundary not in ("dirichlet", "neumann"):
        raise ProblemError("Fourier series coefficients apply to dirichlet/neumann only")
    n = np.arange(N + 1)
    a = np.zeros(N + 1)

    if isinstance(initial, Coefficients):
        vals = np.asarray(initial.values, dtype=float)[: N + 1]
        a[: vals.size] = vals
        if boundary == "dirichlet":
            a[0] = 0.0
        return a

    if isinstance(initial, Samples):
        x = np.asarray(initial.x, dtype=float)
        f = np.asarray(initial.f, dtype=float)
        if abs(x[0]) > 1e-12 or abs(x[-1] - 1.0) > 1e-12:
            raise ProblemError("samples must span exactly [0, 1]")
        if boundary == "dirichlet":
            _check_endpoints(f[0], f[-1])
            basis = np.sin(np.pi * np.outer(n, x))
        else:
            basis = np.cos(np.pi * np.outer(n, x))
        a = 2.0 * simpson(basis * f[None, :], x=x, axis=1)
        if boundary == "dirichlet":
            a[0] = 0.0
        else:
            a[0] *= 0.5
        return a

    tag = initial.tag
    if boundary == "dirichlet":
        _check_endpoints(float(initial(0.0)), float(initial(1.0)))
        if tag == "sine_mode" and 1 <= initial.k <= N:
            a[initial.k] = 1.0
            return a
        if tag == "parabola":
            odd = n % 2 == 1
            a[odd] = 8.0 / (n[odd] ** 3 * np.pi**3)
            return a
    else:
        if tag == "cosine_mode" and 0 <= initial.k <= N:
            a[initial.k] = 1.0
            return a
        if tag == "parabola":
            a[0] = 1.0 / 6.0
            even = (n % 2 == 0) & (n > 0)
            a[even] = -4.0 / (n[even] ** 2 * np.pi**2)
            return a
    return _project(initial, boundary, N)


# --- series problems -----------------------------------------------------------


def _tail_estimate(terms: np.ndarray, N: int) -> float:
    """Extrapolated ``sum_{n>N} |a_n| B_n`` from a power-law fit of the last half."""
    n = np.arange(terms.size)
    sel = (n >= max(1, N // 2)) & (terms > 1e-300)
    if not np.any(sel):
        return 0.0
    if np.count_nonzero(sel) < 3:
        return float(terms[sel].max())
    slope, icpt = np.polyfit(np.log(n[sel]), np.log(terms[sel]), 1)
    p = -slope
    c = math.exp(icpt)
    if p <= 1.05:
        # too slow to extrapolate; report the last-half sum as a pessimistic proxy
        return float(terms[sel].sum())
    return c * N ** (1.0 - p) / (p - 1.0)


def _solve_series(C, spec: ProblemSpec, x, t, q, basis_fn) -> SolutionField:
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    N = spec.modes
    a = fourier_coefficients(spec.initial, spec.boundary, N)
    n = np.arange(N + 1)
    need = (np.abs(a) > 0) | (n >= N - 1)
    need[0] = False
    modes = n[need]
    B = np.zeros((N + 1, t.size))
    Berr = np.zeros((N + 1, t.size))
    B[0] = 1.0
    if modes.size:
        vals, errs = kernel_batch(C, modes * np.pi, t, q)
        B[modes] = vals
        Berr[modes] = errs
    basis = basis_fn(np.outer(n, x))  # (N+1, nx)
    coeff = a[:, None] * B  # (N+1, nt)
    u = coeff.T @ basis
    quad_err = (np.abs(a)[:, None] * Berr).sum(axis=0)
    trunc = np.array([_tail_estimate(np.abs(coeff[:, j]), N) for j in range(t.size)])
    return SolutionField(x, t, u, trunc, quad_err)


def _sinpi(z: np.ndarray) -> np.ndarray:
    """``sin(pi z)``, exactly zero at integers."""
    r = z - 2.0 * np.round(0.5 * z)  # in [-1, 1]
    r = np.where(r > 0.5, 1.0 - r, np.where(r < -0.5, -1.0 - r, r))
    return np.sin(np.pi * r)


def _cospi(z: np.ndarray) -> np.ndarray:
    """``cos(pi z)``, exactly zero at half-integers."""
    return _sinpi(z + 0.5)


def solve_dirichlet(C: DiffusionParameter, spec: ProblemSpec, x, t, q: QuadratureSpec | None = None) -> SolutionField:
    """Sine-series solution with ``u(0, t) = u(1, t) = 0``."""
    if spec.boundary != "dirichlet":
        raise ProblemError("solve_dirichlet needs a dirichlet problem")
    return _solve_series(C, spec, x, t, q, _sinpi)


def solve_neumann(C: DiffusionParameter, spec: ProblemSpec, x, t, q: QuadratureSpec | None = None) -> SolutionField:
    """Cosine-series solution; the ``n = 0`` mode is carried unchanged."""
    if spec.boundary != "neumann":
        raise ProblemError("solve_neumann needs a neumann problem")
    return _solve_series(C, spec, x, t, q, _cospi)


# --- Cauchy problem ----------------------------------------------------------------


def _initial_on_line(initial: InitialCondition):
    """Return ``(f, F)``: the profile and its Fourier transform ``int f e^{-i lam x} dx``."""
    if isinstance(initial, ClosedForm) and initial.tag == "gaussian":
        c, w = initial.center, initial.width

        def F(lam):
            lam = np.asarray(lam, dtype=float)
            return w * math.sqrt(2.0 * math.pi) * np.exp(-0.5 * (w * lam) ** 2 - 1j * lam * c)

        return initial, F
    if isinstance(initial, Samples):
        xs = np.asarray(initial.x, dtype=float)
        fs = np.asarray(initial.f, dtype=float)

        def f(x):
            return np.interp(x, xs, fs, left=0.0, right=0.0)

        def F(lam):
            # trapezoid: spectrally accurate for decaying data well below Nyquist
            lam = np.atleast_1d(np.asarray(lam, dtype=float))
            return trapezoid(fs[None, :] * np.exp(-1j * np.outer(lam, xs)), x=xs, axis=1)

        return f, F
    raise ProblemError("the Cauchy problem needs a gaussian or sampled initial profile")


def _cauchy_lambda_grid(initial: InitialCondition, F, L: float) -> np.ndarray:
    """Uniform ``lambda`` grid on ``[0, Lambda]`` with ``|F(Lambda)| < 1e-10 |F(0)|``."""
    dlam = math.pi / (2.0 * L)
    F0 = abs(complex(np.atleast_1d(F(0.0))[0]))
    if isinstance(initial, ClosedForm):
        lam_max = math.sqrt(2.0 * math.log(1e10)) / initial.width
    else:
        xs = np.asarray(initial.x, dtype=float)
        # beyond half the Nyquist frequency the sampled transform is aliased
        band = 0.5 * math.pi / float(np.max(np.diff(xs)))
        probe = np.arange(0.0, band, dlam)
        mags = np.abs(F(probe))
        big = np.flatnonzero(mags >= 1e-10 * F0)
        lam_max = probe[big[-1]] + dlam if big.size else dlam
        if big.size and big[-1] == probe.size - 1:
            warnings.warn(
                f"sampled data not resolved: spectrum still at {mags[-1] / F0:.1e} of its peak "
                f"at lambda = {probe[-1]:.3g}; truncating there",
                AliasWarning,
                stacklevel=3,
            )
    count = int(math.ceil(lam_max / dlam)) + 1
    return dlam * np.arange(count)


def solve_cauchy(C: DiffusionParameter, spec: ProblemSpec, x, t, q: QuadratureSpec | None = None) -> SolutionField:
    """Solution on the line by spectral inversion of ``F(lambda) B_lambda(t)``.

    ``u(x, t) = (1/pi) int_0^inf Re[F(lambda) e^{i lambda x}] B_lambda(t) dlambda``,
    discretized by the trapezoidal rule on a uniform grid (spectrally
    accurate for this smooth, even integrand).  The grid spacing
    ``pi / (2L)`` keeps periodic images ``4L`` apart.
    """
    if spec.boundary != "cauchy":
        raise ProblemError("solve_cauchy needs a cauchy problem")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    L = spec.half_width
    f, F = _initial_on_line(spec.initial)
    edge = max(abs(float(f(-L))), abs(float(f(L))))
    peak = float(np.max(np.abs(f(np.linspace(-L, L, 2001)))))
    if edge > 1e-8 * peak:
        warnings.warn(
            f"initial data not negligible at +-{L} ({edge:.2e}); expect aliasing",
            AliasWarning,
            stacklevel=2,
        )
    lam = _cauchy_lambda_grid(spec.initial, F, L)
    dlam = lam[1] - lam[0] if lam.size > 1 else 1.0
    B, Berr = kernel_batch(C, lam, t, q)  # lam[0] = 0 gives B = 1
    Flam = F(lam)
    w = np.full(lam.size, dlam)
    w[0] *= 0.5
    phase = Flam[:, None] * np.exp(1j * np.outer(lam, x))  # (nlam, nx)
    u = (B * w[:, None]).T @ phase.real / math.pi
    quad_err = (np.abs(Flam) * w) @ Berr / math.pi
    trunc = np.full(t.size, 1e-10 * abs(Flam[0]) * lam[-1] / math.pi)
    return SolutionField(x, t, u, trunc, quad_err)


def solve(C: DiffusionParameter, spec: ProblemSpec, x, t, q: QuadratureSpec | None = None) -> SolutionField:
    """Dispatch on ``spec.boundary``."""
    return {
        "dirichlet": solve_dirichlet,
        "neumann": solve_neumann,
        "cauchy": solve_cauchy,
    }[spec.boundary](C, spec, x, t, q)


# --- Green's function --------------------------------------------------------------


def green_function(
    C: DiffusionParameter,
    x_grid,
    t: float,
    q: QuadratureSpec | None = None,
    rel_tol: float = 1e-6,
) -> np.ndarray:
    """Regularized Green's function on the line.

    The formal cosine integral of ``I_lambda(t) = pi B_lambda(t) / lambda**2``
    diverges at ``lambda = 0``; subtracting its (x-independent, infinite)
    value at ``x = 0`` gives

        G(x, t) = int_0^inf B_lambda(t) (cos(lambda x) - 1) / lambda**2 dlambda,

    which is even in ``x`` with ``G(0, t) = 0`` and the same second
    derivative.  The fundamental solution is ``-(1/pi) d^2G/dx^2``, so
    ``u = -(1/pi) f * G_xx``; :func:`solve_cauchy` is the faster route to the
    same field.

    The outer integral uses 10-point Gauss panels no wider than a quarter
    period of ``cos(lambda max|x|)``, extended until the ``lambda**-4`` tail
    falls below ``rel_tol``.  This is a double improper integral; expect
    about ``rel_tol`` relative accuracy, not the kernel's.
    """
    if not t > 0:
        raise ValueError("green_function needs t > 0")
    x = np.asarray(x_grid, dtype=float)
    q = q or QuadratureSpec(rel_tol=max(1e-10, rel_tol * 1e-2))
    xmax = max(float(np.max(np.abs(x))), 1e-3)
    width = min(0.5 * math.pi / xmax, 1.0)
    gx, gw = np.polynomial.legendre.leggauss(10)

    def panel_nodes(a: float, b: float):
        half = 0.5 * (b - a)
        return 0.5 * (a + b) + half * gx, half * gw

    total = np.zeros(x.size)
    start = 0.0
    block = 64
    while True:
        edges = start + width * np.arange(block + 1)
        nodes, wts = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            nd, wt = panel_nodes(a, b)
            nodes.append(nd)
            wts.append(wt)
        lam = np.concatenate(nodes)
        w = np.concatenate(wts)
        B, _ = kernel_batch(C, lam, [t], q)
        B = B[:, 0]
        kern = np.empty((lam.size, x.size))
        small = lam * xmax < 1e-4
        lx = np.outer(lam, x)
        kern[~small] = (np.cos(lx[~small]) - 1.0) / lam[~small, None] ** 2
        kern[small] = -0.5 * x[None, :] ** 2 * (1.0 - lx[small] ** 2 / 12.0)
        total += (B * w) @ kern
        start = edges[-1]
        # tail of int B/lambda**2 beyond start, assuming B ~ lambda**-2
        b_end = float(kernel_batch(C, [start], [t], q)[0][0, 0])
        tail = 2.0 * b_end / (3.0 * start)
        scale = max(float(np.max(np.abs(total))), 1e-300)
        if tail < rel_tol * scale:
            return total
        block *= 2
