"""Backward iteration: preimages, backward orbits with their hyperbolic
step, contact curves of semigroups and the common boundary fixed point
check for a semigroup.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import ballgeo as bg
from . import boundary as bd
from ._numerics import complex_jacobian
from .errors import HypothesisViolation, PreimageError, Undetermined

PREIMAGE_TOL = 1e-11
JAC_STEP = 1e-7
MAX_NEWTON = 100
SINGULAR_COND = 1e12
EDGE_STOP = 1e-12
LIMIT_MATCH = 1e-5
K_LADDER = (2, 4, 8, 16, 32)
PUSHED_MATCH = 1e-4
STEP_SLACK = 1e-10

__all__ = [
    "preimage",
    "BackwardOrbit",
    "backward_orbit",
    "write_orbit_csv",
    "ContactCurve",
    "contact_curve",
    "VerificationReport",
    "common_brfp_verify",
]


def _vec(z):
    z = np.array(z, dtype=complex)
    return z.reshape(1) if z.ndim == 0 else z


def _newton(f, target, x):
    res = f(x) - target
    r = np.linalg.norm(res)
    for _ in range(MAX_NEWTON):
        if r < 1e-14:
            break
        jac = complex_jacobian(f, x, JAC_STEP)
        if np.linalg.cond(jac) > SINGULAR_COND:
            raise PreimageError("Jacobian numerically singular at %s" % x)
        dx = np.linalg.solve(jac, -res)
        lam = 1.0
        while lam > 2.0**-30:
            cand = x + lam * dx
            if np.linalg.norm(cand) < 1.0:
                cres = f(cand) - target
                cr = np.linalg.norm(cres)
                if cr < r:
                    break
            lam *= 0.5
        else:
            break
        x, res, r = cand, cres, cr
    return x, float(r)


def preimage(f, target, guess=None, tol=PREIMAGE_TOL):
    """A point ``x`` of the ball with ``|f(x) - target| < tol``.

    Maps with a closed-form inverse use it (followed by a Newton polish);
    the rest go through damped Newton on the finite-difference complex
    Jacobian, which picks the branch nearest to ``guess``; if that stalls,
    six starts nudged off ``guess`` in different complex directions are
    tried.
    """
    target = _vec(target)
    x = None
    inv = f.raw_inverse(target)
    if inv is not None:
        inv = _vec(inv)
        if np.all(np.isfinite(inv)) and np.linalg.norm(inv) < 1.0:
            x = inv
    if x is None:
        x = target.copy() if guess is None else _vec(guess)
        if not np.linalg.norm(x) < 1.0:
            raise PreimageError("Newton guess must be interior")
    r = float(np.linalg.norm(f(x) - target))
    if r >= tol * 1e-2:
        start = x
        x, r = _newton(f, target, start)
        # Newton from a real point of a real map never leaves the reals; nudge
        # the start off such invariant sets before giving up
        room = 0.5 * (1.0 - np.linalg.norm(start))
        for k in range(6):
            if r < tol:
                break
            nudge = min(0.05, room) * np.exp(1j * np.pi * (2 * k + 1) / 6) * np.ones(start.size)
            cand, cr = _newton(f, target, start + nudge / np.sqrt(start.size))
            if cr < r:
                x, r = cand, cr
    if not r < tol:
        raise PreimageError("Newton stagnated with residual %.3e" % r)
    return x


@dataclass(frozen=True, eq=False)
class BackwardOrbit:
    """Backward orbit ``w_0, w_1, ...`` with ``f(w_{k+1}) = w_k``.

    ``s = exp(2 sup_k k(w_k, w_{k+1}))`` is the hyperbolic step. ``status``
    is ``complete``, ``edge`` (stopped when ``1 - |w| < 1e-12``) or
    ``diverged`` (moved away from ``p``).
    """

    p: np.ndarray
    points: np.ndarray = field(repr=False)
    step_sups: np.ndarray = field(repr=False)
    s: float
    limit: np.ndarray | None
    residuals: np.ndarray = field(repr=False)
    k_region_tail: int | None
    alpha: float
    status: str = "complete"


def geometric_limit(points):
    """Limit of a geometrically converging vector sequence (Aitken on the
    last three points)."""
    pts = np.asarray(points)
    if len(pts) < 3:
        return pts[-1]
    d1 = np.linalg.norm(pts[-2] - pts[-3])
    d2 = np.linalg.norm(pts[-1] - pts[-2])
    if d1 == 0.0 or d2 >= d1:
        return pts[-1]
    rho = d2 / d1
    return pts[-1] + (pts[-1] - pts[-2]) * rho / (1.0 - rho)


def _k_tail(p, pts):
    tail = pts[len(pts) // 2:]
    for m in K_LADDER:
        region = bg.KRegion(np.zeros(p.size), p, m)
        if np.all(bg.in_K_region(region, tail)):
            return m
    return None


def backward_orbit(f, p, w0=None, n=30, alpha=None, force=False, edge_stop=EDGE_STOP):
    """Backward orbit of ``f`` starting at ``w0`` and heading to ``p``.

    Unless ``force`` is set, ``p`` must be a boundary regular fixed point
    with ``alpha > 1``. Newton guesses follow the linearised repulsion
    ``w_k + (w_k - w_{k-1}) / alpha``. The orbit stops early once a point
    comes within ``edge_stop`` of the sphere. Preimage failures re-raise
    ``PreimageError`` with the index reached.
    """
    p = bg.bpoint(p)
    if alpha is None:
        c = bd.classify_boundary_point(f, p)
        if c.kind == "RegularFixed":
            alpha = c.alpha
        elif not force:
            raise HypothesisViolation("p is not a boundary regular fixed point (%s)" % c.kind)
        else:
            alpha = 1.0
    if alpha <= 1.0 and not force:
        raise HypothesisViolation("p is not boundary repelling (alpha = %.12g)" % alpha)
    w0 = 0.9 * p if w0 is None else bg.cpoint(w0)
    pts = [np.array(w0, dtype=complex)]
    status = "complete"
    rate = max(alpha, 1.0)
    for k in range(n):
        w = pts[-1]
        guess = p + (w - p) / rate if k == 0 else w + (w - pts[-2]) / rate
        if not np.linalg.norm(guess) < 1.0:
            guess = w
        try:
            x = preimage(f, w, guess)
        except PreimageError as exc:
            raise PreimageError(str(exc), index=k + 1) from None
        if 1.0 - np.linalg.norm(x) < edge_stop:
            status = "edge"
            break
        if k > 2 and np.linalg.norm(x - p) > np.linalg.norm(w0 - p) + 1e-9:
            pts.append(x)
            status = "diverged"
            break
        pts.append(x)
    pts = np.array(pts)
    steps = bg.kobayashi_distance(pts[:-1], pts[1:]) if len(pts) > 1 else np.zeros(0)
    steps = np.atleast_1d(steps)
    s = math.exp(2.0 * float(np.max(steps))) if steps.size else 1.0
    residuals = np.linalg.norm(f(pts[1:]) - pts[:-1], axis=-1) if len(pts) > 1 else np.zeros(0)
    limit = None
    if status != "diverged":
        cand = geometric_limit(pts)
        if abs(1.0 - np.linalg.norm(cand)) < 1e-7 and np.linalg.norm(cand - p) < LIMIT_MATCH:
            limit = bg.bpoint(cand)
    k_tail = _k_tail(p, pts[1:]) if len(pts) > 4 and status != "diverged" else None
    return BackwardOrbit(p, pts, steps, s, limit, residuals, k_tail, float(alpha), status)


def write_orbit_csv(orbit, path):
    """Columns: k, Re/Im of every coordinate, step to the next point, residual."""
    dim = orbit.points.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k"] + [f"w{j}_{part}" for j in range(dim) for part in ("re", "im")]
                   + ["step", "residual"])
        for k, pt in enumerate(orbit.points):
            step = repr(float(orbit.step_sups[k])) if k < len(orbit.step_sups) else ""
            res = repr(float(orbit.residuals[k - 1])) if k > 0 else ""
            w.writerow([k] + [repr(float(v)) for z in pt for v in (z.real, z.imag)] + [step, res])


@dataclass(frozen=True, eq=False)
class ContactCurve:
    """``t -> phi_t(p)`` sampled on a grid. ``failures`` lists the grid
    times where ``p`` turned out not to be a regular contact point."""

    t_grid: tuple
    curve: np.ndarray = field(repr=False)
    modulus: float
    spacing: float
    failures: tuple = ()

    @property
    def ok(self):
        return not self.failures


def contact_curve(s, p, t_grid):
    """Boundary images ``phi_t(p)`` along ``t_grid`` and their largest jump."""
    p = bg.bpoint(p)
    ts = tuple(float(t) for t in t_grid)
    if not ts:
        raise ValueError("empty time grid")
    tmax = max(ts)
    if tmax > 0:
        c = bd.classify_boundary_point(s.time_slice(tmax), p)
        if not c.regular:
            raise HypothesisViolation("p is not a regular contact point of phi_%g (%s)" % (tmax, c.kind))
    curve, failures = [], []
    for t in ts:
        if t == 0:
            curve.append(np.array(p))
            continue
        c = bd.classify_boundary_point(s.time_slice(t), p)
        if not c.regular:
            failures.append((t, c.kind))
            curve.append(np.full(p.size, np.nan + 0j))
            continue
        curve.append(np.array(c.limit))
    curve = np.array(curve)
    if failures:
        warnings.warn("contact curve broken at t = %s" % ", ".join("%g (%s)" % f for f in failures),
                      RuntimeWarning, stacklevel=2)
    gaps = np.linalg.norm(np.diff(curve, axis=0), axis=-1) if len(ts) > 1 else np.zeros(1)
    modulus = float(np.max(gaps)) if len(ts) > 1 else 0.0
    spacing = float(np.max(np.diff(ts))) if len(ts) > 1 else 0.0
    return ContactCurve(ts, curve, modulus, spacing, tuple(failures))


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Result of ``common_brfp_verify``.

    ``verdict`` is PASS, FAIL (hypotheses hold, conclusion fails) or
    HYPOTHESIS_VIOLATED. ``per_t`` holds one dict per grid time with the
    pushed limit ``q``, its gap to ``p``, the classification of ``p`` under
    ``phi_t`` and the step-bound check.
    """

    verdict: str
    p: np.ndarray
    t0: float
    alpha_t0: float | None
    isolated: bool | None
    scan_resolution: float
    s: float | None
    orbit_limit: np.ndarray | None
    per_t: list
    lam: float | None
    lam_residual: float | None
    hypothesis_failures: list
    failures: list
    orbit: BackwardOrbit | None = field(default=None, repr=False)

    def to_dict(self):
        def cplx(v):
            return None if v is None else [[float(x.real), float(x.imag)] for x in np.asarray(v)]

        return {
            "verdict": self.verdict,
            "p": cplx(self.p),
            "t0": self.t0,
            "alpha_t0": self.alpha_t0,
            "isolated": self.isolated,
            "scan_resolution": self.scan_resolution,
            "isolation_rule": bd.ScanResult.rule,
            "s": self.s,
            "orbit_limit": cplx(self.orbit_limit),
            "per_t": [{**row, "q": cplx(row["q"])} for row in self.per_t],
            "lambda": self.lam,
            "lambda_residual": self.lam_residual,
            "hypothesis_failures": list(self.hypothesis_failures),
            "failures": list(self.failures),
        }


VERIFY_EDGE = 1e-5


def common_brfp_verify(s, p, t0, t_grid, n=20, resolution_deg=1.0):
    """Check that an isolated repelling fixed point of ``phi_{t0}`` is a
    regular fixed point of every ``phi_t`` on ``t_grid``.

    Steps: classify ``p`` under ``phi_{t0}`` and test isolation on a local
    scan window; build a backward orbit ``w_n`` of ``phi_{t0}`` at ``p``
    (kept ``1e-5`` away from the sphere so that distances stay accurate);
    push it forward by each ``phi_t`` and locate the limit of
    ``phi_t(w_n)``; classify ``p`` under each ``phi_t``; fit the
    exponential law of the dilation coefficients.
    """
    p = bg.bpoint(p)
    t0 = float(t0)
    ts = [float(t) for t in t_grid]
    hyp, fails = [], []
    f0 = s.time_slice(t0)
    c0 = bd.classify_boundary_point(f0, p)
    alpha0 = c0.alpha if c0.kind == "RegularFixed" else None
    isolated = None
    if alpha0 is None:
        hyp.append("p is not a boundary regular fixed point of phi_t0 (%s)" % c0.kind)
    else:
        if alpha0 <= 1.0 + 1e-9:
            hyp.append("p is not boundary repelling for phi_t0 (alpha = %.12g)" % alpha0)
        isolated = bd.isolated_at(f0, p, max(1.0, alpha0 * (1 + 1e-6)), resolution_deg)
        if not isolated:
            hyp.append("p is not isolated among fixed points with alpha <= alpha_t0 at grid scale")

    orbit = None
    if alpha0 is not None and alpha0 > 1.0 + 1e-9:
        orbit = backward_orbit(f0, p, n=n, alpha=alpha0, edge_stop=VERIFY_EDGE)

    per_t = []
    for t in ts:
        ft = s.time_slice(t)
        row = {"t": t}
        if orbit is not None:
            z = ft(orbit.points)
            q = geometric_limit(z)
            if abs(1.0 - np.linalg.norm(q)) < 1e-7:
                q = q / np.linalg.norm(q)
            zsteps = np.atleast_1d(bg.kobayashi_distance(z[:-1], z[1:]))
            row["step_bound_ok"] = bool(np.all(zsteps <= orbit.step_sups + STEP_SLACK))
            row["step_excess"] = float(np.max(zsteps - orbit.step_sups))
            row["source"] = "pushed orbit"
        else:
            try:
                q = bd.radial_limit(ft, p).point
            except Undetermined:
                q = None
            row["step_bound_ok"] = None
            row["step_excess"] = None
            row["source"] = "radial limit"
        row["q"] = q
        row["gap"] = None if q is None else float(np.linalg.norm(q - p))
        c = bd.classify_boundary_point(ft, p)
        row["kind"] = c.kind
        row["alpha"] = None if c.alpha is None else float(c.alpha)
        per_t.append(row)
        if row["gap"] is None or row["gap"] >= PUSHED_MATCH:
            fails.append("phi_%g(p) != p (gap %s)" % (t, row["gap"]))
        if c.kind != "RegularFixed" or not math.isfinite(c.alpha):
            fails.append("p is not a regular fixed point of phi_%g (%s)" % (t, c.kind))
        if row["step_bound_ok"] is False:
            fails.append("pushed step exceeds backward step at t=%g" % t)

    lam = lam_res = None
    try:
        fit = bd.dilation_law_fit(s, p, sorted(set(ts + [t0])))
        lam, lam_res = fit.lam, fit.max_residual
        if not fit.passed:
            fails.append("dilation law residual %.3e" % fit.max_residual)
    except HypothesisViolation as exc:
        fails.append(str(exc))

    if hyp:
        verdict = "HYPOTHESIS_VIOLATED"
    elif fails:
        verdict = "FAIL"
    else:
        verdict = "PASS"
    return VerificationReport(verdict, p, t0, alpha0, isolated, math.radians(resolution_deg),
                              None if orbit is None else orbit.s,
                              None if orbit is None else orbit.limit,
                              per_t, lam, lam_res, hyp, fails, orbit)
