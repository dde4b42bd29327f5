"""Numerical kernels shared across modules.

Sequence extrapolation (Richardson tableau with error-driven selection),
finite-difference complex Jacobians, an embedded Dormand-Prince integrator
for batches of complex states, and deterministic quasi-random samples of
the ball and its boundary.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from .errors import NotSemiComplete

__all__ = [
    "extrapolate",
    "complex_jacobian",
    "dopri5",
    "ball_samples",
    "sphere_samples",
]


def extrapolate(values, ratio=2.0, max_order=6, vector=False, noise=None):
    """Limit of sequences whose error expands in powers of a step ``h``.

    ``values`` has shape ``(J, *batch)`` (or ``(J, *batch, N)`` with
    ``vector=True``); row ``i`` is the approximation at step
    ``h_0 / ratio**i``. A Richardson tableau up to ``max_order`` columns is
    built for every batch element and the entry with the smallest local
    error estimate (distance to both of its parents) is returned. Rows deep
    in the rounding-noise regime have large estimates and are never
    selected.

    ``noise`` optionally gives the rounding-error level of every row
    (broadcastable to the batch); it is carried through the tableau and
    added to the error estimates, so noisy rows are not trusted merely
    because neighbouring values agree by accident.

    Returns ``(limit, error_estimate)`` with shapes ``batch (+ (N,))`` and
    ``batch``.
    """
    col = np.asarray(values)
    if col.shape[0] < 2:
        raise ValueError("extrapolate needs at least two values")

    def size(x):
        a = np.abs(x)
        return np.max(a, axis=-1) if vector else a

    batch = col.shape[1:-1] if vector else col.shape[1:]
    if noise is None:
        noise = np.zeros((col.shape[0],) + (1,) * len(batch))
    else:
        noise = np.asarray(noise, dtype=float)
        if noise.ndim == 1:
            noise = noise.reshape((col.shape[0],) + (1,) * len(batch))
        noise = np.broadcast_to(noise, (col.shape[0],) + batch)
    best = col[-1].copy()
    best_err = np.full(batch, np.inf)
    for m in range(1, min(max_order, col.shape[0] - 1) + 1):
        gain = 1.0 / (ratio**m - 1.0)
        nxt = col[1:] + (col[1:] - col[:-1]) * gain
        noise = (1.0 + gain) * noise[1:] + gain * noise[:-1]
        err = np.maximum(size(nxt - col[1:]), size(nxt - col[:-1])) + noise
        idx = np.argmin(err, axis=0)
        e = np.take_along_axis(err, idx[None], axis=0)[0]
        if vector:
            v = np.take_along_axis(nxt, idx[None, ..., None], axis=0)[0]
        else:
            v = np.take_along_axis(nxt, idx[None], axis=0)[0]
        better = e < best_err
        best_err = np.where(better, e, best_err)
        best = np.where(better[..., None] if vector else better, v, best)
        col = nxt
    return best, best_err


def complex_jacobian(f, z, h=1e-7):
    """Complex Jacobian ``df/dz`` of a holomorphic map by central differences.

    For holomorphic ``f`` the derivative along a real coordinate direction
    equals the complex partial derivative, so only ``2N`` evaluations are
    needed.
    """
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    steps = np.eye(n, dtype=complex) * h
    plus = f(z[None, :] + steps)
    minus = f(z[None, :] - steps)
    return ((plus - minus) / (2.0 * h)).T


# Dormand-Prince 5(4) tableau.
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def dopri5(fun, y0, t_end, rtol=1e-11, atol=1e-11, max_steps_per_unit=10**6,
           exit_tol=1e-10):
    """Integrate the autonomous system ``y' = fun(y)`` from 0 to ``t_end``.

    ``y0`` has shape ``(..., N)``: every leading index is an independent
    point of the ball evolved with a shared step size. After each accepted
    step the Euclidean norm of every point is checked; a point further than
    ``exit_tol`` outside the closed unit ball raises ``NotSemiComplete``.
    No renormalisation is ever applied.
    """
    y = np.array(y0, dtype=complex)
    if t_end == 0.0:
        return y
    cap = max(1, int(math.ceil(max_steps_per_unit * max(t_end, 1e-300))))
    t = 0.0
    k1 = fun(y)
    scale0 = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean(np.abs(y / scale0) ** 2))
    d1 = np.sqrt(np.mean(np.abs(k1 / scale0) ** 2))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h, t_end)
    steps = 0
    while t < t_end:
        if steps >= cap:
            raise NotSemiComplete("step cap reached before t_end=%g" % t_end)
        last = t + h >= t_end
        if last:
            h = t_end - t
        ks = [k1]
        for s in range(1, 7):
            acc = y.copy()
            for coeff, kk in zip(_A[s], ks):
                if coeff:
                    acc = acc + h * coeff * kk
            ks.append(fun(acc))
        y_new = y + h * sum(b * kk for b, kk in zip(_B, ks) if b)
        err_vec = h * sum(e * kk for e, kk in zip(_E, ks) if e)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale))
        steps += 1
        if err <= 1.0:
            t = t_end if last else t + h
            y = y_new
            k1 = ks[6]
            norms = np.linalg.norm(y, axis=-1)
            if np.any(norms > 1.0 + exit_tol):
                raise NotSemiComplete(
                    "generator not semi-complete at this tolerance: trajectory "
                    "reached norm %.3e at t=%g" % (float(np.max(norms)), t))
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h = h * fac
    return y


def ball_samples(n, dim, max_radius=0.95, seed=0):
    """Deterministic quasi-random points of the ball of radius ``max_radius``.

    Directions come from a Halton sequence pushed through the normal
    quantile function, radii from an extra Halton coordinate with the
    volume-uniform law. Returns an ``(n, dim)`` complex array.
    """
    from scipy.special import ndtri

    sampler = qmc.Halton(d=2 * dim + 1, scramble=True, seed=seed)
    u = sampler.random(n)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    g = ndtri(u[:, : 2 * dim])
    v = g[:, :dim] + 1j * g[:, dim:]
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = max_radius * u[:, -1] ** (1.0 / (2 * dim))
    return v * r[:, None]


def sphere_samples(n, dim, seed=0):
    """Deterministic quasi-random points of the unit sphere in C^dim."""
    z = ball_samples(n, dim, max_radius=1.0, seed=seed)
    return z / np.linalg.norm(z, axis=1, keepdims=True)
