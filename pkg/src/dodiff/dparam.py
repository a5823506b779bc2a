"""Diffusion parameter C(nu): representations, moments and spectral functions.

A diffusion parameter is a nonnegative measure on the derivative orders
``0 < nu <= 1``.  Three concrete forms are supported:

* :class:`DeltaMixture` -- finitely many point masses,
* :class:`UniformBand` -- constant density on ``[nu1, nu2]``,
* :class:`TabulatedDensity` -- piecewise-linear density through nodes.

Everything downstream is built on the complex moment

.. math::

    \\Phi(r, \\theta) = \\int_0^1 C(\\mu) r^\\mu e^{i\\mu\\theta} d\\mu,

whose value at ``theta = pi`` gives ``h(r) = Im Phi`` and
``g(r) = Re Phi + kappa**2``.  Values of ``C`` are treated as dimensionless
numbers; physically they carry units of time**nu / length**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Union

import numpy as np

from dodiff.errors import (
    EmptySupport,
    InvalidDiffusionParameter,
    NegativeWeight,
    NormalizationViolation,
    SupportOutOfRange,
)

__all__ = [
    "DeltaMixture",
    "UniformBand",
    "TabulatedDensity",
    "DiffusionParameter",
    "Moments",
    "validate",
    "moments",
    "eval_h",
    "eval_g",
    "eval_phi",
    "sin_moment",
]

NORMALIZATION_TOL = 1e-12

# 15-point Gauss-Legendre rule on [-1, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)
# largest |z| * panel width for which a 15-point rule integrates exp(mu z) to
# machine precision
_PANEL_BUDGET = 6.0


class Moments(NamedTuple):
    """Scalar functionals of ``C``.

    ``M`` is the sine moment, ``C_tilde`` the total mass and ``C_hat`` the
    L2 norm of the density (``None`` for point masses).
    """

    M: float
    C_tilde: float
    C_hat: float | None


def _log_r(r: np.ndarray) -> np.ndarray:
    """Natural log of positive ``r``, using log1p close to one."""
    out = np.empty_like(r)
    near = np.abs(r - 1.0) < 0.5
    out[near] = np.log1p(r[near] - 1.0)
    out[~near] = np.log(r[~near])
    return out


class _Base:
    """Shared behaviour for the three parameter forms."""

    normalized: bool

    def __post_init__(self) -> None:
        validate(self)

    # subclasses implement these
    def _phi(self, logr: np.ndarray, theta: float) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def _compute_moments(self) -> Moments:  # pragma: no cover
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:  # pragma: no cover
        """``(nu_min, nu_max)`` of the orders carrying positive mass."""
        raise NotImplementedError

    @property
    def is_density(self) -> bool:
        return True

    @property
    def fractional_mass(self) -> bool:
        """True when some mass sits strictly inside (0, 1)."""
        return self.support[0] < 1.0

    @property
    def classical_weight(self) -> float | None:
        """Weight ``w`` when ``C = w * delta(nu - 1)`` exactly, else ``None``."""
        return None

    @cached_property
    def moments(self) -> Moments:
        return self._compute_moments()

    def phi_log(self, logr, theta: float = math.pi) -> np.ndarray:
        """Complex moment evaluated at ``r = exp(logr)``."""
        logr = np.asarray(logr, dtype=float)
        return self._phi(np.atleast_1d(logr), float(theta)).reshape(logr.shape)


@dataclass(frozen=True)
class DeltaMixture(_Base):
    """``C(nu) = sum_i w_i delta(nu - nu_i)`` with ``0 < nu_i <= 1``."""

    components: tuple[tuple[float, float], ...]
    normalized: bool = False

    def __post_init__(self) -> None:
        comps = tuple((float(w), float(nu)) for w, nu in self.components)
        object.__setattr__(self, "components", comps)
        super().__post_init__()

    @property
    def _active(self) -> list[tuple[float, float]]:
        return [(w, nu) for w, nu in self.components if w > 0]

    @property
    def support(self) -> tuple[float, float]:
        orders = [nu for _, nu in self._active]
        return min(orders), max(orders)

    @property
    def is_density(self) -> bool:
        return False

    @property
    def classical_weight(self) -> float | None:
        active = self._active
        if all(nu == 1.0 for _, nu in active):
            return sum(w for w, _ in active)
        return None

    def _phi(self, logr, theta):
        z = logr + 1j * theta
        out = np.zeros(logr.shape, dtype=complex)
        for w, nu in self._active:
            out += w * np.exp(nu * z)
        return out

    def _compute_moments(self) -> Moments:
        active = self._active
        M = sum(w * math.sin(math.pi * nu) for w, nu in active)
        C_tilde = sum(w for w, _ in active)
        return Moments(M, C_tilde, None)

    def scaled(self, c: float) -> DeltaMixture:
        return DeltaMixture(tuple((c * w, nu) for w, nu in self.components))


@dataclass(frozen=True)
class UniformBand(_Base):
    """Density ``weight / (nu2 - nu1)`` on ``[nu1, nu2]``."""

    nu1: float
    nu2: float
    weight: float = 1.0
    normalized: bool = False

    @property
    def density_value(self) -> float:
        return self.weight / (self.nu2 - self.nu1)

    @property
    def support(self) -> tuple[float, float]:
        return self.nu1, self.nu2

    def density(self, nu) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        return np.where((nu >= self.nu1) & (nu <= self.nu2), self.density_value, 0.0)

    def _phi(self, logr, theta):
        # int_{nu1}^{nu2} exp(nu z) dnu = (exp(nu2 z) - exp(nu1 z)) / z
        z = logr + 1j * theta
        width = self.nu2 - self.nu1
        out = np.empty(z.shape, dtype=complex)
        small = np.abs(width * z) < 0.25
        zb = z[~small]
        out[~small] = (np.exp(self.nu2 * zb) - np.exp(self.nu1 * zb)) / zb
        if np.any(small):
            zs = z[small]
            # exp(nu1 z) * (exp(w z) - 1) / z via its Taylor series
            term = np.full(zs.shape, width, dtype=complex)
            acc = term.copy()
            for k in range(1, 30):
                term = term * (width * zs) / (k + 1)
                acc += term
            out[small] = np.exp(self.nu1 * zs) * acc
        return self.density_value * out

    def _compute_moments(self) -> Moments:
        d = self.density_value
        M = d * (math.cos(math.pi * self.nu1) - math.cos(math.pi * self.nu2)) / math.pi
        C_hat = self.weight / math.sqrt(self.nu2 - self.nu1)
        return Moments(M, self.weight, C_hat)

    def scaled(self, c: float) -> UniformBand:
        return UniformBand(self.nu1, self.nu2, c * self.weight)


@dataclass(frozen=True)
class TabulatedDensity(_Base):
    """Piecewise-linear density through ``(nodes[i], values[i])``, zero outside."""

    nodes: tuple[float, ...]
    values: tuple[float, ...]
    normalized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(float(x) for x in self.nodes))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        super().__post_init__()

    @cached_property
    def _segments(self) -> list[tuple[float, float, float, float]]:
        """Segments ``(a, b, C(a), C(b))`` carrying positive mass."""
        x, v = self.nodes, self.values
        return [
            (x[i], x[i + 1], v[i], v[i + 1])
            for i in range(len(x) - 1)
            if v[i] > 0 or v[i + 1] > 0
        ]

    @property
    def support(self) -> tuple[float, float]:
        segs = self._segments
        return segs[0][0], segs[-1][1]

    def density(self, nu) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        return np.interp(nu, self.nodes, self.values, left=0.0, right=0.0)

    def _phi(self, logr, theta):
        z = logr + 1j * theta
        absz = np.abs(z)
        out = np.zeros(z.shape, dtype=complex)
        for a, b, ca, cb in self._segments:
            panels = np.maximum(1, np.ceil(absz * (b - a) / _PANEL_BUDGET)).astype(int)
            for m in np.unique(panels):
                sel = panels == m
                zs = z[sel][:, None]
                edges = np.linspace(a, b, m + 1)
                half = 0.5 * (edges[1:] - edges[:-1])
                mid = 0.5 * (edges[1:] + edges[:-1])
                nu = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
                wts = (half[:, None] * _GL_W[None, :]).ravel()
                dens = ca + (cb - ca) * (nu - a) / (b - a)
                out[sel] += np.exp(zs * nu[None, :]) @ (wts * dens)
        return out

    def _compute_moments(self) -> Moments:
        M = 0.0
        C_tilde = 0.0
        sq = 0.0
        for a, b, ca, cb in self._segments:
            w = b - a
            C_tilde += 0.5 * w * (ca + cb)
            sq += w * (ca * ca + ca * cb + cb * cb) / 3.0
            nu = 0.5 * (a + b) + 0.5 * w * _GL_X
            dens = ca + (cb - ca) * (nu - a) / w
            M += 0.5 * w * float(np.sum(_GL_W * dens * np.sin(np.pi * nu)))
        return Moments(M, C_tilde, math.sqrt(sq))

    def scaled(self, c: float) -> TabulatedDensity:
        return TabulatedDensity(self.nodes, tuple(c * v for v in self.values))


DiffusionParameter = Union[DeltaMixture, UniformBand, TabulatedDensity]


def validate(C: DiffusionParameter) -> None:
    """Check the invariants of ``C``; raise the matching error on failure."""
    if isinstance(C, DeltaMixture):
        if len(C.components) == 0:
            raise EmptySupport("delta mixture has no components")
        for w, nu in C.components:
            if not (math.isfinite(w) and math.isfinite(nu)):
                raise InvalidDiffusionParameter(f"non-finite component ({w}, {nu})")
            if w < 0:
                raise NegativeWeight(f"negative weight {w} at order {nu}")
            if not 0.0 < nu <= 1.0:
                raise SupportOutOfRange(f"order {nu} outside (0, 1]")
        if not any(w > 0 for w, _ in C.components):
            raise EmptySupport("all delta weights are zero")
    elif isinstance(C, UniformBand):
        if not (math.isfinite(C.nu1) and math.isfinite(C.nu2) and math.isfinite(C.weight)):
            raise InvalidDiffusionParameter("non-finite band parameters")
        if C.weight < 0:
            raise NegativeWeight(f"negative band weight {C.weight}")
        if not 0.0 < C.nu1 < C.nu2 <= 1.0:
            raise SupportOutOfRange(
                f"band [{C.nu1}, {C.nu2}] must satisfy 0 < nu1 < nu2 <= 1"
            )
        if C.weight == 0:
            raise EmptySupport("band weight is zero")
    elif isinstance(C, TabulatedDensity):
        x = np.asarray(C.nodes, dtype=float)
        v = np.asarray(C.values, dtype=float)
        if x.size < 2 or x.size != v.size:
            raise InvalidDiffusionParameter(
                "tabulated density needs matching node/value arrays of length >= 2"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise InvalidDiffusionParameter("non-finite tabulated entries")
        if np.any(v < 0):
            raise NegativeWeight("tabulated density has negative values")
        if np.any(np.diff(x) <= 0):
            raise SupportOutOfRange("tabulated nodes must be strictly increasing")
        if x[0] <= 0.0 or x[-1] >= 1.0:
            raise SupportOutOfRange("tabulated nodes must lie inside (0, 1)")
        if not np.any(v > 0):
            raise EmptySupport("tabulated density is identically zero")
    else:
        raise TypeError(f"not a diffusion parameter: {type(C).__name__}")

    if C.normalized:
        total = C.moments.C_tilde
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NormalizationViolation(f"integral of C is {total!r}, expected 1")


def moments(C: DiffusionParameter) -> Moments:
    return C.moments


def eval_phi(C: DiffusionParameter, r, theta: float = math.pi) -> np.ndarray:
    """``int C(mu) r**mu exp(i mu theta) dmu`` for ``r >= 0``."""
    r = np.asarray(r, dtype=float)
    flat = np.atleast_1d(r).ravel()
    out = np.zeros(flat.shape, dtype=complex)
    pos = flat > 0
    if np.any(pos):
        out[pos] = C._phi(_log_r(flat[pos]), float(theta))
    return out.reshape(r.shape)


def eval_h(C: DiffusionParameter, r):
    """``h(r) = int C(mu) r**mu sin(pi mu) dmu``.  Scalar in, scalar out."""
    out = eval_phi(C, r).imag
    return float(out) if np.ndim(out) == 0 else out


def eval_g(C: DiffusionParameter, r, eigenvalue_sqrt: float):
    """``g(r) = int C(mu) r**mu cos(pi mu) dmu + kappa**2``."""
    out = eval_phi(C, r).real + float(eigenvalue_sqrt) ** 2
    return float(out) if np.ndim(out) == 0 else out


def sin_moment(C: DiffusionParameter, r, theta: float):
    """``int C(mu) r**mu sin(mu theta) dmu`` -- the imaginary part of the
    pole equation at ``s = r exp(i theta)``."""
    out = eval_phi(C, r, theta).imag
    return float(out) if np.ndim(out) == 0 else out
