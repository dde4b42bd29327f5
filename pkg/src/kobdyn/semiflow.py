"""One-parameter semigroups of holomorphic self-maps.

Closed-form families (hyperbolic disc group, diagonal rotations, Siegel
dilations) evaluate exactly up to rounding; generator-driven semigroups are
integrated with an adaptive Dormand-Prince pair at local tolerance 1e-11.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._numerics import dopri5
from .errors import DimensionError
from .holomap import FlowMap, siegel_flow

CLOSED_FORM_TOL = 1e-12
INTEGRATED_TOL = 1e-7
ODE_TOL = 1e-11

__all__ = [
    "VectorField",
    "BerksonPorta",
    "generator_value",
    "Semigroup",
    "DiscHyperbolic",
    "BallRotation",
    "SiegelDilation",
    "GeneratorODE",
    "evaluate_t",
    "time_slice",
    "SemigroupReport",
    "check_semigroup_property",
    "max_deviation",
    "continuity_modulus",
]


@dataclass(frozen=True, eq=False)
class VectorField:
    """Explicit holomorphic vector field ``G`` on the ball of C^dim.

    ``func`` must accept arrays of shape ``(..., dim)``.
    """

    func: Callable
    dim: int

    def __call__(self, z):
        return np.asarray(self.func(np.asarray(z, dtype=complex)), dtype=complex)


@dataclass(frozen=True, eq=False)
class BerksonPorta:
    """Disc generator ``G(z) = (z - tau)(conj(tau) z - 1) p(z)``.

    ``coeffs`` lists the coefficients of the polynomial ``p`` from the
    constant term upwards; ``Re p >= 0`` on the disc makes ``tau`` the
    attracting point of ``dz/dt = G(z)``.
    """

    tau: complex
    coeffs: tuple
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if abs(abs(self.tau) - 1.0) > 1e-12:
            raise ValueError("Berkson-Porta point must lie on the unit circle")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        p = np.polynomial.polynomial.polyval(z, self.coeffs)
        return (z - self.tau) * (np.conj(self.tau) * z - 1.0) * p


def generator_value(g, z):
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if z.shape[-1] != g.dim:
        raise DimensionError("generator acts on C^%d" % g.dim)
    return g(z)


class Semigroup:
    """Common interface: ``flow(t, z)`` is the raw evaluator (negative ``t``
    allowed for groups), ``evaluate_t`` enforces ``t >= 0``."""

    dim: int
    closed_form = True
    is_group = True

    def flow(self, t, z):
        raise NotImplementedError

    def evaluate_t(self, t, z):
        if t < 0:
            raise ValueError("semigroup time must be non-negative, got %r" % t)
        z = np.asarray(z, dtype=complex)
        if z.ndim == 0:
            z = z.reshape(1)
        if z.shape[-1] != self.dim:
            raise DimensionError("semigroup acts on C^%d" % self.dim)
        if t == 0:
            return z.copy()
        return self.flow(t, z)

    def time_slice(self, t):
        return FlowMap(self, float(t))

    @property
    def tolerance(self):
        return CLOSED_FORM_TOL if self.closed_form else INTEGRATED_TOL


@dataclass(frozen=True, eq=False)
class DiscHyperbolic(Semigroup):
    """``phi_t = C^-1(e^{lam t} C(z))`` with the Cayley map ``C(z) = (1+z)/(1-z)``.

    Expanded as ``((E-1) + (E+1) z) / ((E+1) + (E-1) z)``; generator
    ``lam (1 - z^2) / 2``.
    """

    lam: float
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("DiscHyperbolic needs lam > 0")

    def flow(self, t, z):
        em1 = math.expm1(self.lam * t)
        z = np.asarray(z, dtype=complex)
        return (em1 + (em1 + 2.0) * z) / ((em1 + 2.0) + em1 * z)


@dataclass(frozen=True, eq=False)
class BallRotation(Semigroup):
    """``phi_t(z) = (e^{2 pi i theta_j t} z_j)_j``."""

    thetas: tuple

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(x) for x in np.atleast_1d(self.thetas)))

    @property
    def dim(self):
        return len(self.thetas)

    def flow(self, t, z):
        return np.asarray(z, dtype=complex) * np.exp(2j * np.pi * np.asarray(self.thetas) * t)


@dataclass(frozen=True, eq=False)
class SiegelDilation(Semigroup):
    """Dilations ``(w1, w2) -> (e^t w1, e^{t/2} w2)`` of the Siegel half-space
    carried to the ball of C^2 by the Cayley transform."""

    dim: int = field(default=2, init=False)

    def flow(self, t, z):
        return siegel_flow(t, z)


@dataclass(frozen=True, eq=False)
class GeneratorODE(Semigroup):
    """Semigroup obtained by integrating ``dz/dt = G(z)``.

    Integration is adaptive with local tolerance 1e-11, at most 10^6 steps
    per unit time, and raises ``NotSemiComplete`` when a trajectory leaves
    the closed ball by more than 1e-10.
    """

    generator: object
    closed_form = False
    is_group = False

    @property
    def dim(self):
        return self.generator.dim

    def flow(self, t, z):
        return dopri5(self.generator, z, t, rtol=ODE_TOL, atol=ODE_TOL)


def evaluate_t(s, t, z):
    return s.evaluate_t(t, z)


def time_slice(s, t):
    """The map ``phi_t`` as a map object usable by every other module."""
    return s.time_slice(t)


@dataclass(frozen=True)
class SemigroupReport:
    max_residual: float
    threshold: float
    passed: bool
    worst: tuple = ()


def check_semigroup_property(s, t_grid, z_samples, threshold=None):
    """Max over the grid of ``|phi_{s+t}(z) - phi_s(phi_t(z))|``."""
    t_grid = [float(t) for t in t_grid]
    z = np.asarray(z_samples, dtype=complex)
    if not t_grid or z.size == 0:
        raise ValueError("grids must be non-empty")
    if z.ndim == 1:
        z = z[:, None] if s.dim == 1 else z[None, :]
    threshold = s.tolerance if threshold is None else threshold
    worst, where = 0.0, ()
    for a in t_grid:
        za = s.evaluate_t(a, z)
        for b in t_grid:
            lhs = s.evaluate_t(a + b, z)
            rhs = s.evaluate_t(b, za)
            r = float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))
            if r > worst:
                worst, where = r, (a, b)
    return SemigroupReport(worst, threshold, worst < threshold, where)


def max_deviation(s, reference, t_grid, z_samples):
    """Largest distance between two semigroups sampled on a grid."""
    z = np.asarray(z_samples, dtype=complex)
    return max(float(np.max(np.linalg.norm(s.evaluate_t(t, z) - reference.evaluate_t(t, z), axis=-1)))
               for t in t_grid)


def continuity_modulus(s, t, delta, z_samples):
    z = np.asarray(z_samples, dtype=complex)
    return float(np.max(np.linalg.norm(s.evaluate_t(t + delta, z) - s.evaluate_t(t, z), axis=-1)))
