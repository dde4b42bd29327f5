"""Closed-form Kobayashi geometry of the unit disc and the unit ball of C^N.

Points are plain complex numpy arrays whose last axis is the coordinate
axis; ``cpoint`` and ``bpoint`` validate and freeze them. The disc is the
case ``N = 1``. Distances use the normalisation ``k(0, r) = artanh(r)``, so
the infinitesimal metric at the origin is the Euclidean norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError

INTERIOR_MARGIN = 1e-14
BOUNDARY_TOL = 1e-12
STOLZ_LADDER = (2, 4, 8, 16)
SPECIAL_TOL = 1e-6

__all__ = [
    "cpoint",
    "bpoint",
    "inner",
    "kobayashi_distance",
    "kobayashi_metric",
    "disc_distance",
    "involution",
    "ball_automorphism",
    "Geodesic",
    "geodesic",
    "left_inverse",
    "horosphere_height",
    "KRegion",
    "in_K_region",
    "ApproachClass",
    "classify_approach",
]


def _coords(z):
    z = np.array(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if z.ndim != 1 or z.size == 0:
        raise DimensionError("a point must be a scalar or a 1-d vector, got shape %s" % (z.shape,))
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite coordinates")
    return z


def cpoint(z):
    """Validated interior point: a read-only complex vector with norm < 1."""
    z = _coords(z)
    if np.linalg.norm(z) >= 1.0 - INTERIOR_MARGIN:
        raise DomainError("point %s is not interior (norm %.17g)" % (z, np.linalg.norm(z)))
    z.flags.writeable = False
    return z


def bpoint(p):
    """Validated boundary point: the input is normalised to unit norm."""
    p = _coords(p)
    nrm = np.linalg.norm(p)
    if nrm == 0.0:
        raise DomainError("the zero vector has no boundary direction")
    p = p / nrm
    if abs(np.linalg.norm(p) - 1.0) > BOUNDARY_TOL:
        raise DomainError("normalisation failed for %s" % p)
    p.flags.writeable = False
    return p


def inner(z, w):
    """Hermitian product <z, w> = sum z_j conj(w_j) along the last axis."""
    return np.sum(np.asarray(z) * np.conj(w), axis=-1)


def _check_dims(z, w):
    if np.shape(z)[-1] != np.shape(w)[-1]:
        raise DimensionError("dimension mismatch: %d vs %d" % (np.shape(z)[-1], np.shape(w)[-1]))


def _wedge(z, w):
    """``|z|^2 |w|^2 - |<z, w>|^2`` through the Lagrange identity (no cancellation)."""
    n = z.shape[-1]
    out = np.zeros(np.broadcast_shapes(z.shape[:-1], w.shape[:-1]))
    for i in range(n):
        for j in range(i + 1, n):
            out = out + np.abs(z[..., i] * w[..., j] - z[..., j] * w[..., i]) ** 2
    return out


def kobayashi_distance(z, w):
    """Kobayashi distance between interior points of the same ball.

    With ``c = (1-|z|^2)(1-|w|^2)/|1-<z,w>|^2 = 1 - tanh^2 k`` the distance
    is ``artanh(t)`` for ``t = tanh k < 1/2`` and ``log(1 + t) - log(c)/2``
    otherwise, which keeps accuracy near the sphere; ``t^2`` is formed from
    ``|z-w|^2`` minus the wedge term ``|z|^2|w|^2 - |<z,w>|^2``, itself summed
    from 2x2 minors, so that nearby points keep full relative accuracy. Broadcasts over leading axes.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_dims(z, w)
    zz = np.sum(np.abs(z) ** 2, axis=-1)
    ww = np.sum(np.abs(w) ** 2, axis=-1)
    zw = inner(z, w)
    den = np.abs(1.0 - zw) ** 2
    wedge = _wedge(z, w)
    num = np.maximum(np.sum(np.abs(z - w) ** 2, axis=-1) - wedge, 0.0)
    t = np.sqrt(num / den)
    c = (1.0 - zz) * (1.0 - ww) / den
    # artanh(t) is exact in form; near the sphere 1 - t loses digits, and
    # c = 1 - t^2 computed from the norms keeps them
    with np.errstate(divide="ignore"):
        out = np.where(t < 0.5, np.arctanh(np.minimum(t, 0.5)), np.log1p(t) - 0.5 * np.log(c))
    return out if out.ndim else float(out)


def disc_distance(a, b):
    """Poincare distance on the unit disc (scalars or broadcastable arrays)."""
    a = np.asarray(a, dtype=complex)[..., None]
    b = np.asarray(b, dtype=complex)[..., None]
    return kobayashi_distance(a, b)


def kobayashi_metric(z, v):
    """Infinitesimal Kobayashi metric of the ball at ``z`` in direction ``v``.

    ``kappa^2 = |v|^2/(1-|z|^2) + |<v,z>|^2/(1-|z|^2)^2``; on the disc this
    reduces to ``|v|/(1-|z|^2)``.
    """
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if v.ndim == 0:
        v = v.reshape(1)
    _check_dims(z, v)
    s = 1.0 - np.sum(np.abs(z) ** 2, axis=-1)
    out = np.sqrt(np.sum(np.abs(v) ** 2, axis=-1) / s + np.abs(inner(v, z)) ** 2 / s**2)
    return out if out.ndim else float(out)


def involution(a, z):
    """The involutive automorphism of the ball exchanging ``0`` and ``a``.

    ``phi_a(z) = (a - P z - s Q z) / (1 - <z, a>)`` with ``P`` the orthogonal
    projection on ``C a``, ``Q = I - P`` and ``s = sqrt(1 - |a|^2)``.
    Defined on the closed ball; broadcasts over leading axes of ``z``.
    """
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    na = float(np.linalg.norm(a))
    if na == 0.0:
        return -z
    # project on the unit direction: |a|^2 may underflow for tiny a
    u = a / na
    pz = inner(z, u)[..., None] * u
    qz = z - pz
    s = np.sqrt(1.0 - na * na)
    return (a - pz - s * qz) / (1.0 - inner(z, a)[..., None])


def ball_automorphism(a, unitary=None):
    """Automorphism ``U o phi_a`` as a map object (``U = I`` by default)."""
    from .holomap import BallAutomorphism

    return BallAutomorphism(a, unitary)


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Complex geodesic through the pole ``z0`` reaching ``p`` at ``zeta = 1``.

    Realised as the slice ``zeta -> zeta q`` moved by ``phi_{z0}``, where
    ``q = phi_{z0}(p)``. The left inverse is ``z -> <phi_{z0}(z), q>`` and the
    geodesic retraction is ``phi o left_inverse``.
    """

    z0: np.ndarray
    p: np.ndarray
    q: np.ndarray = field(repr=False)

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return involution(self.z0, zeta[..., None] * self.q)

    def left_inverse(self, z):
        return inner(involution(self.z0, np.asarray(z, dtype=complex)), self.q)

    def retraction(self, z):
        return self(self.left_inverse(z))


def geodesic(z0, p):
    z0 = cpoint(z0)
    p = bpoint(p)
    _check_dims(z0, p)
    q = involution(z0, p)
    q = q / np.linalg.norm(q)
    q.flags.writeable = False
    return Geodesic(z0, p, q)


def left_inverse(g, z):
    """Left inverse of the geodesic ``g`` evaluated on the closed ball."""
    return g.left_inverse(z)


def horosphere_height(p, z, z0=None):
    """``lim_{w -> p} [k(z, w) - k(z0, w)]`` for the ball.

    With pole 0 this is ``log(|1-<z,p>|^2 / (1-|z|^2)) / 2``; another pole is
    handled by subtracting its own height.
    """
    p = np.asarray(p, dtype=complex)
    z = np.asarray(z, dtype=complex)
    _check_dims(z, p)
    h = 0.5 * np.log(np.abs(1.0 - inner(z, p)) ** 2 / (1.0 - np.sum(np.abs(z) ** 2, axis=-1)))
    if z0 is not None:
        h = h - horosphere_height(p, z0)
    return h if np.ndim(h) else float(h)


@dataclass(frozen=True, eq=False)
class KRegion:
    """K-region of vertex ``p``, amplitude ``M > 1`` and pole ``z0``."""

    z0: np.ndarray
    p: np.ndarray
    M: float

    def __post_init__(self):
        if not self.M > 1:
            raise ValueError("K-region amplitude must exceed 1, got %r" % self.M)
        object.__setattr__(self, "z0", cpoint(self.z0))
        object.__setattr__(self, "p", bpoint(self.p))


def in_K_region(q, z):
    z = np.asarray(z, dtype=complex)
    value = horosphere_height(q.p, z, q.z0) + kobayashi_distance(q.z0, z)
    return value < np.log(q.M)


@dataclass(frozen=True, eq=False)
class ApproachClass:
    special: bool
    restricted: bool
    stolz_amplitude: float | None
    max_tail_ratio: float
    tail_distance: float


def classify_approach(p, pts, special_tol=SPECIAL_TOL):
    """Decide whether a sequence tending to ``p`` is special and/or restricted.

    Both notions use the geodesic from the origin to ``p``. Special: the tail
    of ``k(z_k, rho_p(z_k))`` is below ``special_tol`` and non-increasing
    (values under the rounding floor ``8 eps / (1-|z_k|^2)`` count as 0).
    Restricted: the tail of ``rho~_p(z_k)`` lies in a Stolz wedge
    ``|1-zeta| <= M (1-|zeta|)`` for some ``M`` of ``STOLZ_LADDER``; the
    smallest such ``M`` is reported.
    """
    p = bpoint(p)
    pts = np.asarray(pts, dtype=complex)
    if pts.ndim == 1 and p.size == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] != p.size:
        raise DimensionError("points must have shape (n, %d)" % p.size)
    if len(pts) < 8:
        raise ValueError("sequence too short: need at least 8 points, got %d" % len(pts))
    if np.linalg.norm(pts[-1] - p) > 1e-3:
        raise ValueError("sequence does not converge to p (last gap %.3e)"
                         % np.linalg.norm(pts[-1] - p))
    tail = pts[-max(4, len(pts) // 4):]
    zeta = inner(tail, p)
    proj = zeta[:, None] * p
    d = kobayashi_distance(tail, proj)
    # coordinates carry rounding of size eps, which the metric magnifies by
    # 1/(1-|z|^2); distances below that floor are indistinguishable from 0
    floor = 8 * np.finfo(float).eps / (1.0 - np.sum(np.abs(tail) ** 2, axis=-1))
    d = np.where(d < floor, 0.0, d)
    special = bool(np.all(d < special_tol) and np.all(np.diff(d) <= 1e-12))
    ratios = np.abs(1.0 - zeta) / (1.0 - np.abs(zeta))
    worst = float(np.max(ratios))
    amplitude = next((m for m in STOLZ_LADDER if worst <= m), None)
    return ApproachClass(special, amplitude is not None, amplitude, worst, float(np.max(d)))
