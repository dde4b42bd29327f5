"""Holomorphic self-maps of the disc and of the ball, and their dynamics.

Every map is an immutable object that evaluates on complex arrays of shape
``(..., N)`` (raw evaluation, usable on the closed ball where the formula
extends). ``evaluate`` is the checked single-point entry point.

Construction validates the self-map property on 200 quasi-random interior
points; that is a sampling test, not a proof, and opaque ``Custom`` maps
are only as trustworthy as the sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import ballgeo as bg
from ._numerics import ball_samples, complex_jacobian
from .errors import DimensionError, HypothesisViolation, IntegrityError, Undetermined

N_VALIDATION = 200
BOUNDARY_PROXIMITY = 1e-6
COMMON_LIMIT = 1e-5
INTERIOR_CONVERGENCE = 1e-10
CLOSE_RETURN = 1e-4

__all__ = [
    "HoloMap",
    "BallAutomorphism",
    "DiscMoebius",
    "Diagonal",
    "SliceRotation",
    "SiegelMap",
    "FlowMap",
    "Composite",
    "Custom",
    "identity",
    "siegel_flow",
    "evaluate",
    "compose",
    "iterate",
    "MapClass",
    "classify_map",
    "interior_fixed_point",
    "RetractionResult",
    "limit_retraction",
]


class HoloMap:
    """Base class. Subclasses define ``dim``, ``__call__`` and optionally
    ``raw_inverse`` (a closed-form inverse formula, not necessarily a
    self-map of the ball)."""

    dim: int

    def __call__(self, z):
        raise NotImplementedError

    def raw_inverse(self, z):
        return None

    @property
    def invertible(self):
        return False

    def validate(self):
        z = ball_samples(N_VALIDATION, self.dim, max_radius=0.99, seed=7)
        with np.errstate(all="ignore"):
            w = self(z)
        norms = np.linalg.norm(w, axis=-1)
        bad = ~(norms < 1.0)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise IntegrityError("%s is not a self-map: |f(z)| = %r at z = %s"
                                 % (type(self).__name__, norms[i], z[i]))


@dataclass(frozen=True, eq=False)
class BallAutomorphism(HoloMap):
    """``z -> U phi_a(z)`` with ``phi_a`` the involution swapping 0 and a."""

    a: np.ndarray
    unitary: np.ndarray | None = None

    def __post_init__(self):
        a = bg.cpoint(self.a)
        object.__setattr__(self, "a", a)
        u = np.eye(a.size, dtype=complex) if self.unitary is None else np.array(self.unitary, dtype=complex)
        if u.shape != (a.size, a.size) or not np.allclose(u.conj().T @ u, np.eye(a.size), atol=1e-12):
            raise ValueError("unitary factor must be a %dx%d unitary matrix" % (a.size, a.size))
        u.flags.writeable = False
        object.__setattr__(self, "unitary", u)
        self.validate()

    @property
    def dim(self):
        return self.a.size

    def __call__(self, z):
        return bg.involution(self.a, z) @ self.unitary.T

    def raw_inverse(self, z):
        return bg.involution(self.a, np.asarray(z) @ self.unitary.conj())

    @property
    def invertible(self):
        return True


@dataclass(frozen=True, eq=False)
class DiscMoebius(HoloMap):
    """``z -> (a z + b) / (c z + d)`` on the unit disc."""

    a: complex
    b: complex
    c: complex
    d: complex
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Moebius coefficients")
        self.validate()
        theta = 2 * np.pi * np.arange(64) / 64
        edge = np.abs(self(np.exp(1j * theta)[:, None]))
        if np.max(edge) > 1.0 + 1e-12:
            raise IntegrityError("Moebius map does not preserve the closed disc (max %.3e)"
                                 % np.max(edge))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def raw_inverse(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.d * z - self.b) / (-self.c * z + self.a)

    @property
    def invertible(self):
        theta = 2 * np.pi * np.arange(64) / 64
        return bool(np.max(np.abs(np.abs(self(np.exp(1j * theta))) - 1.0)) < 1e-12)


@dataclass(frozen=True, eq=False)
class Diagonal(HoloMap):
    """``z -> (mu_1 z_1, ..., mu_N z_N)`` with ``|mu_j| <= 1``."""

    mu: tuple

    def __post_init__(self):
        mu = np.array(self.mu, dtype=complex).reshape(-1)
        if np.any(np.abs(mu) > 1.0 + 1e-15):
            raise IntegrityError("diagonal multipliers must satisfy |mu| <= 1")
        mu.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        self.validate()

    @property
    def dim(self):
        return self.mu.size

    def __call__(self, z):
        return np.asarray(z, dtype=complex) * self.mu

    def raw_inverse(self, z):
        if np.any(self.mu == 0):
            return None
        return np.asarray(z, dtype=complex) / self.mu

    @property
    def invertible(self):
        return bool(np.all(np.abs(np.abs(self.mu) - 1.0) < 1e-15))


def identity(dim):
    return Diagonal(tuple([1.0] * dim))


@dataclass(frozen=True, eq=False)
class SliceRotation(HoloMap):
    """``(z, w) -> (e^{2 pi i theta} z, w (w + a) / (1 + a w))`` on the ball of C^2."""

    theta: float
    a: float
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise ValueError("SliceRotation needs 0 < a < 1")
        self.validate()

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != 2:
            raise DimensionError("SliceRotation acts on C^2")
        w = z[..., 1]
        out = np.empty_like(z)
        out[..., 0] = np.exp(2j * np.pi * self.theta) * z[..., 0]
        out[..., 1] = w * (w + self.a) / (1.0 + self.a * w)
        return out


def siegel_flow(t, z):
    """Cayley conjugate of the Siegel dilation ``(w1, w2) -> (e^t w1, e^{t/2} w2)``.

    Written without passing through the unbounded model, so it stays
    accurate near ``(1, 0)``:
    ``z1' = (E(1+z1) - (1-z1)) / D``, ``z2' = 2 sqrt(E) z2 / D`` with
    ``E = e^t`` and ``D = E(1+z1) + (1-z1)``.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != 2:
        raise DimensionError("the Siegel dilation acts on C^2")
    e = math.exp(t)
    z1, z2 = z[..., 0], z[..., 1]
    den = e * (1.0 + z1) + (1.0 - z1)
    out = np.empty_like(z)
    out[..., 0] = (e * (1.0 + z1) - (1.0 - z1)) / den
    out[..., 1] = 2.0 * math.exp(0.5 * t) * z2 / den
    return out


@dataclass(frozen=True, eq=False)
class SiegelMap(HoloMap):
    """Time-``t`` map of the Siegel dilation flow on the ball of C^2."""

    t: float
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        self.validate()

    def __call__(self, z):
        return siegel_flow(self.t, z)

    def raw_inverse(self, z):
        return siegel_flow(-self.t, z)

    @property
    def invertible(self):
        return True


@dataclass(frozen=True, eq=False)
class FlowMap(HoloMap):
    """Time-``t`` map of a semigroup (any object with ``evaluate_t``/``dim``)."""

    semigroup: object
    t: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("flow time must be non-negative")
        self.validate()

    @property
    def dim(self):
        return self.semigroup.dim

    def __call__(self, z):
        return self.semigroup.evaluate_t(self.t, z)

    def raw_inverse(self, z):
        if getattr(self.semigroup, "is_group", False):
            return self.semigroup.flow(-self.t, z)
        return None

    @property
    def invertible(self):
        return getattr(self.semigroup, "is_group", False)


@dataclass(frozen=True, eq=False)
class Composite(HoloMap):
    """Composition applying ``maps[0]`` first, then ``maps[1]``, and so on."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("empty composite")
        if len({m.dim for m in maps}) != 1:
            raise DimensionError("composite of maps with different dimensions")
        object.__setattr__(self, "maps", maps)

    @property
    def dim(self):
        return self.maps[0].dim

    def __call__(self, z):
        for m in self.maps:
            z = m(z)
        return z

    def raw_inverse(self, z):
        for m in reversed(self.maps):
            z = m.raw_inverse(z)
            if z is None:
                return None
        return z

    @property
    def invertible(self):
        return all(m.invertible for m in self.maps)


@dataclass(frozen=True, eq=False)
class Custom(HoloMap):
    """User-supplied vectorised evaluator acting on arrays of shape ``(..., dim)``."""

    func: Callable
    dim: int
    name: str = "custom"

    def __post_init__(self):
        self.validate()

    def __call__(self, z):
        return np.asarray(self.func(np.asarray(z, dtype=complex)), dtype=complex)


def _as_point(f, z):
    z = bg.cpoint(z)
    if z.size != f.dim:
        raise DimensionError("map acts on C^%d, point has %d coordinates" % (f.dim, z.size))
    return z


def evaluate(f, z):
    z = _as_point(f, z)
    w = np.asarray(f(z), dtype=complex)
    if not np.linalg.norm(w) < 1.0:
        raise IntegrityError("%s sent %s outside the ball (norm %r)"
                             % (type(f).__name__, z, np.linalg.norm(w)))
    return w


def compose(f, g):
    """The map ``z -> f(g(z))``."""
    if f.dim != g.dim:
        raise DimensionError("cannot compose maps of C^%d and C^%d" % (f.dim, g.dim))
    return Composite((g, f))


def iterate(f, z, n):
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    orbit = [_as_point(f, z)]
    for _ in range(n):
        orbit.append(np.asarray(f(orbit[-1]), dtype=complex))
    return orbit


@dataclass(frozen=True, eq=False)
class MapClass:
    """Outcome of the Denjoy-Wolff trichotomy.

    ``kind`` is ``"RotationalElliptic"``, ``"StronglyElliptic"`` (with
    ``fixed_point``) or ``"NonElliptic"`` (with ``tau``).
    """

    kind: str
    fixed_point: np.ndarray | None = None
    tau: np.ndarray | None = None
    iterations: int = 0


def _default_seeds(dim):
    return ball_samples(5, dim, max_radius=0.6, seed=3)


def _spread(z):
    return float(np.max(np.linalg.norm(z[:, None, :] - z[None, :, :], axis=-1)))


def classify_map(f, seeds=None, max_iter=10**5):
    """Place ``f`` in the trichotomy by orbit statistics from five seeds.

    Non-elliptic: all orbits within ``1e-6`` of the sphere and within
    ``1e-5`` of each other. Strongly elliptic: orbits settle on one interior
    point. Rotational elliptic: every orbit is either pointwise fixed or
    makes a close return (within ``1e-4`` of a post-transient anchor after a
    genuine excursion) without the orbits merging.
    """
    z = _default_seeds(f.dim) if seeds is None else np.asarray(seeds, dtype=complex)
    anchor_at, anchor = 64, None
    excursion = np.zeros(len(z))
    returned = np.zeros(len(z), dtype=bool)
    step = spread = None
    for n in range(1, max_iter + 1):
        new = np.asarray(f(z), dtype=complex)
        step = np.linalg.norm(new - z, axis=-1)
        z = new
        spread = _spread(z)
        gap = 1.0 - np.linalg.norm(z, axis=-1)
        if np.max(gap) < BOUNDARY_PROXIMITY and spread < COMMON_LIMIT:
            return MapClass("NonElliptic", tau=bg.bpoint(np.mean(z, axis=0)), iterations=n)
        if np.max(step) < INTERIOR_CONVERGENCE and spread < 1e-8 and np.min(gap) > BOUNDARY_PROXIMITY:
            x = interior_fixed_point(f, seeds=[np.mean(z, axis=0)])
            return MapClass("StronglyElliptic", fixed_point=x if x is not None else np.mean(z, axis=0),
                            iterations=n)
        fixed = step < 1e-12
        if np.all(fixed) and spread > 1e-6:
            return MapClass("RotationalElliptic", iterations=n)
        if n == anchor_at:
            anchor = z.copy()
            excursion[:] = 0.0
            returned[:] = False
        elif anchor is not None:
            d = np.linalg.norm(z - anchor, axis=-1)
            excursion = np.maximum(excursion, d)
            returned |= (d < CLOSE_RETURN) & (excursion > 10 * CLOSE_RETURN)
            if np.all(returned | fixed) and spread > 1e-6 and np.max(gap) > BOUNDARY_PROXIMITY:
                return MapClass("RotationalElliptic", iterations=n)
            if n == 2 * anchor_at:
                anchor_at *= 2
                anchor = z.copy()
                excursion[:] = 0.0
                returned[:] = False
    raise Undetermined("classification inconclusive after %d iterations" % max_iter,
                       {"last_step": step.tolist(), "spread": spread,
                        "norms": np.linalg.norm(z, axis=-1).tolist()})


def _newton_fixed(f, x, max_iter=100, h=1e-7):
    dim = x.size
    x = x.astype(complex)
    res = f(x) - x
    for _ in range(max_iter):
        r = np.linalg.norm(res)
        if r < 1e-13:
            break
        jac = complex_jacobian(f, x, h) - np.eye(dim)
        dx = np.linalg.lstsq(jac, -res, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            cand = x + lam * dx
            if np.linalg.norm(cand) < 1.0 - 1e-14:
                cres = f(cand) - cand
                if np.linalg.norm(cres) < r:
                    break
            lam *= 0.5
        else:
            break
        x, res = cand, cres
    return x, float(np.linalg.norm(res))


def interior_fixed_point(f, seeds=None, tol=INTERIOR_CONVERGENCE):
    """An interior fixed point found by damped Newton, or ``None``.

    Seeds default to the origin plus nine quasi-random points. Solutions
    closer than ``1e-8`` to the sphere are treated as boundary fixed points
    and discarded.
    """
    if seeds is None:
        seeds = np.vstack([np.zeros((1, f.dim)), ball_samples(9, f.dim, max_radius=0.9, seed=11)])
    for s in np.asarray(seeds, dtype=complex):
        x, r = _newton_fixed(f, s)
        if r < tol and np.linalg.norm(x) < 1.0 - 1e-8:
            return x
    return None


@dataclass(frozen=True, eq=False)
class RetractionResult:
    """Limit retraction ``pi = lim f^{n_j}`` along spectral close returns.

    ``period`` is the close-return iterate used for evaluation;
    ``eigenvalues`` and ``eigenvectors`` give the splitting of the
    differential at ``fixed_point`` into the unitary part (``unit``) and the
    attracting part.
    """

    f: HoloMap = field(repr=False)
    fixed_point: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    unit: np.ndarray
    dimension: int
    period: int
    residual: float

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        for _ in range(self.period):
            z = self.f(z)
        return z

    def idempotence_residual(self, samples):
        p = self(samples)
        return float(np.max(np.linalg.norm(self(p) - p, axis=-1)))

    def equivariance_residual(self, samples):
        return float(np.max(np.linalg.norm(self(self.f(samples)) - self.f(self(samples)), axis=-1)))


def _wrap(angle):
    return (angle + np.pi) % (2 * np.pi) - np.pi


def limit_retraction(f, samples=None, max_n=10**6, tol=1e-9, unit_tol=1e-6, jac_step=1e-3):
    """Limit retraction of an elliptic map with diagonalisable differential.

    The interior fixed point ``x`` is located, ``df_x`` is diagonalised and
    its unit-modulus eigenvalues define the limit-manifold dimension. Close
    returns are the iterates ``n`` with ``|n theta_k mod 2 pi| < 1e-4`` for
    every unitary angle ``theta_k``; past the attracting time scale the
    iterates of a sample set are compared at consecutive close returns until
    they agree to ``tol``.
    """
    x = interior_fixed_point(f)
    if x is None:
        raise HypothesisViolation("limit retraction needs an elliptic map; no interior fixed point found")
    # Richardson on two step sizes: a large step keeps integration noise of
    # flow maps small, the extrapolation removes the h^2 truncation term
    h = min(jac_step, 0.25 * (1.0 - np.linalg.norm(x)))
    jac = (4.0 * complex_jacobian(f, x, h / 2) - complex_jacobian(f, x, h)) / 3.0
    lam, vec = np.linalg.eig(jac)
    if np.linalg.cond(vec) > 1e8:
        raise HypothesisViolation("differential at the fixed point is not diagonalisable",
                                  {"eigenvalues": lam.tolist()})
    unit = np.abs(np.abs(lam) - 1.0) < unit_tol
    theta = np.angle(lam[unit])
    rho = float(np.max(np.abs(lam[~unit]))) if np.any(~unit) else 0.0
    n_min = 1 if rho == 0.0 else int(math.ceil(math.log(1e-12) / math.log(rho)))
    if samples is None:
        samples = x + ball_samples(32, f.dim, max_radius=max(1e-3, 0.9 * (1.0 - np.linalg.norm(x))), seed=5)
    state = np.asarray(samples, dtype=complex)
    prev = None
    best = math.inf
    for n in range(1, max_n + 1):
        state = f(state)
        if n < n_min or (theta.size and np.max(np.abs(_wrap(n * theta))) >= CLOSE_RETURN):
            continue
        if prev is not None:
            res = float(np.max(np.linalg.norm(state - prev, axis=-1)))
            best = min(best, res)
            if res < tol:
                return RetractionResult(f, x, lam, vec, unit, int(np.count_nonzero(unit)), n, res)
        prev = state.copy()
    raise Undetermined("no converged close return within %d iterates" % max_n,
                       {"best_residual": best, "eigenvalues": lam.tolist()})
