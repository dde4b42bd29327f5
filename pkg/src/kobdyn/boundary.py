"""Boundary behaviour of self-maps: radial limits, dilation coefficients,
contact classification, the chain rule, the exponential law along
semigroups and grid scans for boundary regular fixed points.

All boundary quantities use the pole 0, where the geodesic to ``p`` is the
radius ``r -> r p`` and its left inverse is ``z -> <z, p>``. Radial
sequences are sampled on the ladder ``r_j = 1 - 2^-j``, ``j = 8..40``, and
extrapolated to ``r = 1`` with a Richardson tableau in powers of
``1 - r``.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from . import ballgeo as bg
from ._numerics import extrapolate
from .errors import HypothesisViolation, Undetermined
from .holomap import compose

LADDER = np.arange(8, 41)
RADII = 1.0 - 2.0 ** -LADDER
CAUCHY_TOL = 1e-9
BOUNDARY_FLAG = 1e-7
ALPHA_CAP = 1e8
FIXED_TOL = 1e-8

__all__ = [
    "RadialLimit",
    "radial_limit",
    "DilationResult",
    "dilation_coefficient",
    "ContactClassification",
    "classify_boundary_point",
    "classify_boundary_points",
    "ChainRuleReport",
    "chain_rule_check",
    "LawFit",
    "dilation_law_fit",
    "BoundaryGrid",
    "ScanHit",
    "ScanResult",
    "scan_brfp",
    "isolated_at",
    "write_scan_csv",
]


def _as_boundary_batch(points):
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[None, :]
    return pts / np.linalg.norm(pts, axis=-1, keepdims=True)


def _ladder_images(f, pts):
    """``f(r_j p)`` for every ladder radius: shape ``(J, m, N)``."""
    return np.asarray(f(RADII[:, None, None] * pts[None, :, :]), dtype=complex)


@dataclass(frozen=True, eq=False)
class RadialLimit:
    point: np.ndarray
    on_boundary: bool
    cauchy_gap: float
    error: float


def _radial_from_images(images):
    gap = np.linalg.norm(images[-1] - images[-2], axis=-1)
    limit, err = extrapolate(images, vector=True)
    return limit, err, gap


def radial_limit(f, p):
    """Limit of ``f(r p)`` as ``r -> 1`` along the dyadic ladder.

    Raises ``Undetermined`` if the last two ladder images differ by more
    than the Cauchy tolerance ``1e-9``. The limit is flagged as a boundary
    point (and normalised) when ``1 - |limit| < 1e-7``.
    """
    p = bg.bpoint(p)
    images = _ladder_images(f, p[None, :])
    limit, err, gap = _radial_from_images(images)
    limit, err, gap = limit[0], float(err[0]), float(gap[0])
    if not gap < CAUCHY_TOL:
        raise Undetermined("radial images are not Cauchy (last gap %.3e)" % gap,
                           {"gap": gap, "last": images[-1, 0].tolist()})
    on_boundary = 1.0 - np.linalg.norm(limit) < BOUNDARY_FLAG
    point = bg.bpoint(limit) if on_boundary else limit
    return RadialLimit(point, bool(on_boundary), gap, err)


@dataclass(frozen=True, eq=False)
class DilationResult:
    """Boundary dilation coefficient of ``f`` at ``p``.

    ``alpha`` is ``math.inf`` when the ratios exceed the cap. ``samples``
    lists ``(r_j, ratio_j)`` along the ladder; ``julia_alpha`` is the
    independent estimate from ``exp(2 [k(0, r p) - k(0, f(r p))])``.
    """

    alpha: float
    target: np.ndarray
    ratios: np.ndarray = field(repr=False)
    converged: bool
    error_estimate: float
    julia_alpha: float = math.nan
    lower_bound: float = 0.0

    @property
    def samples(self):
        return [(float(r), complex(x)) for r, x in zip(RADII, self.ratios)]


def _ratios(images, q, pts):
    rho = bg.inner(images, q[None, :, :])
    zeta = bg.inner(RADII[:, None, None] * pts[None, :, :], pts[None, :, :])
    return (1.0 - rho) / (1.0 - zeta)


def _julia_quotients(images):
    s = np.linalg.norm(images, axis=-1)
    r = RADII[:, None]
    return (1.0 + r) * (1.0 - s) / ((1.0 - r) * (1.0 + s))


_KINDS = np.array(["Undetermined", "NotContact", "NonRegular", "RegularContact", "RegularFixed"])


def _dilation_batch(f, pts):
    """Ladder images, radial limits, ratios and the verdict of every point."""
    images = _ladder_images(f, pts)
    limit, _, gap = _radial_from_images(images)
    norms = np.linalg.norm(limit, axis=-1)
    on_b = 1.0 - norms < BOUNDARY_FLAG
    q = limit / np.where(on_b, norms, 1.0)[:, None]
    ratios = _ratios(images, q, pts)
    # 1 - <f(r p), q> is formed with absolute rounding error ~eps
    noise = 4 * np.finfo(float).eps / (1.0 - RADII)
    with np.errstate(invalid="ignore", over="ignore"):
        alpha, a_err = extrapolate(ratios, noise=noise[:, None] * np.maximum(1.0, np.abs(ratios)))
        julia, _ = extrapolate(_julia_quotients(images), noise=noise[:, None])
        capped = np.any(~(np.abs(ratios) <= ALPHA_CAP), axis=0)
        scale = np.maximum(1.0, np.abs(alpha))
        unsettled = (a_err > 1e-3 * scale) | (np.abs(alpha.imag) > 1e-6 * scale) | ~(alpha.real > 0)
    fixed = np.linalg.norm(q - pts, axis=-1) < FIXED_TOL
    code = np.where(~(gap < CAUCHY_TOL), 0,
                    np.where(~on_b, 1,
                             np.where(capped, 2, np.where(unsettled, 0, np.where(fixed, 4, 3)))))
    f0 = np.asarray(f(np.zeros((1, pts.shape[1]), dtype=complex)))[0]
    lower = math.exp(-2.0 * bg.kobayashi_distance(f0, np.zeros_like(f0)))
    return dict(limit=limit, q=q, gap=gap, on_boundary=on_b, ratios=ratios, alpha=alpha,
                alpha_err=a_err, julia=julia, lower=lower, capped=capped, code=code,
                scale=scale)


def _dilation_from(batch, i):
    q = batch["q"][i]
    ratios = batch["ratios"][:, i]
    if batch["capped"][i]:
        return DilationResult(math.inf, q, ratios, True, 0.0, math.inf, batch["lower"])
    err = float(batch["alpha_err"][i])
    return DilationResult(float(batch["alpha"][i].real), q, ratios,
                          err < 1e-8 * batch["scale"][i], err,
                          float(batch["julia"][i].real), batch["lower"])


def dilation_coefficient(f, p):
    """Boundary dilation coefficient from the Julia-Wolff-Caratheodory ratio.

    ``alpha = lim (1 - <f(r p), q>) / (1 - r)`` with ``q`` the radial limit
    of ``f`` at ``p``. Requires that limit to be a boundary point.
    """
    p = bg.bpoint(p)
    batch = _dilation_batch(f, p[None, :])
    if not batch["gap"][0] < CAUCHY_TOL:
        raise Undetermined("radial images are not Cauchy", {"gap": float(batch["gap"][0])})
    if not batch["on_boundary"][0]:
        raise HypothesisViolation("p is not a contact point: radial limit %s is interior"
                                  % batch["limit"][0])
    if batch["code"][0] == 0:
        a = complex(batch["alpha"][0])
        raise Undetermined("dilation ratios do not settle",
                           {"alpha": str(a), "error": float(batch["alpha_err"][0]), "p": p.tolist()})
    return _dilation_from(batch, 0)


@dataclass(frozen=True, eq=False)
class ContactClassification:
    """``kind`` is one of NotContact, RegularContact, RegularFixed,
    NonRegular or Undetermined; ``limit`` is the radial limit when known."""

    kind: str
    p: np.ndarray
    limit: np.ndarray | None = None
    alpha: float | None = None
    dilation: DilationResult | None = field(default=None, repr=False)
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def regular(self):
        return self.kind in ("RegularContact", "RegularFixed")


def _classify_from(batch, i, p):
    code = batch["code"][i]
    kind = str(_KINDS[code])
    if code == 1:
        return ContactClassification(kind, p, limit=batch["limit"][i])
    if code == 0:
        diag = {"gap": float(batch["gap"][i])}
        if batch["gap"][i] < CAUCHY_TOL:
            diag.update(alpha=str(complex(batch["alpha"][i])), error=float(batch["alpha_err"][i]))
            return ContactClassification(kind, p, limit=batch["q"][i], diagnostics=diag)
        return ContactClassification(kind, p, diagnostics=diag)
    d = _dilation_from(batch, i)
    return ContactClassification(kind, p, limit=d.target, alpha=d.alpha, dilation=d)


def classify_boundary_points(f, points):
    """Classify many boundary points at once (vectorised ladder)."""
    pts = _as_boundary_batch(points)
    batch = _dilation_batch(f, pts)
    return [_classify_from(batch, i, pts[i]) for i in range(len(pts))]


def classify_boundary_point(f, p):
    return classify_boundary_points(f, bg.bpoint(p))[0]


@dataclass(frozen=True)
class ChainRuleReport:
    alpha_composite: float
    alpha_outer: float
    alpha_inner: float
    image: tuple
    residual: float
    passed: bool


def chain_rule_check(f, g, p, threshold=1e-4):
    """Compare ``alpha_p(g o f)`` with ``alpha_{f(p)}(g) * alpha_p(f)``."""
    p = bg.bpoint(p)
    inner_c = classify_boundary_point(f, p)
    if inner_c.kind == "Undetermined":
        raise Undetermined("inner map undetermined at p", inner_c.diagnostics)
    if not inner_c.regular:
        raise HypothesisViolation("alpha_p(f) is not finite (%s)" % inner_c.kind)
    outer_c = classify_boundary_point(g, inner_c.limit)
    comp_c = classify_boundary_point(compose(g, f), p)
    for c in (outer_c, comp_c):
        if c.kind == "Undetermined":
            raise Undetermined("constituent dilation undetermined", c.diagnostics)
    a_comp = comp_c.alpha if comp_c.regular else math.inf
    a_out = outer_c.alpha if outer_c.regular else math.inf
    product = a_out * inner_c.alpha
    if math.isinf(a_comp) or math.isinf(product):
        residual = 0.0 if math.isinf(a_comp) and math.isinf(product) else math.inf
    else:
        residual = abs(a_comp - product) / a_comp
    return ChainRuleReport(a_comp, a_out, inner_c.alpha, tuple(complex(x) for x in inner_c.limit),
                           residual, residual < threshold)


@dataclass(frozen=True)
class LawFit:
    lam: float
    max_residual: float
    alphas: tuple
    t_grid: tuple
    passed: bool


def dilation_law_fit(s, p, t_grid, threshold=1e-3):
    """Fit ``alpha_t(p) = lam^t`` by least squares of ``log alpha_t`` through 0.

    Every ``phi_t`` of the grid must fix ``p`` regularly; otherwise
    ``HypothesisViolation`` names the first offending time.
    """
    p = bg.bpoint(p)
    ts, logs = [], []
    for t in t_grid:
        c = classify_boundary_point(s.time_slice(t), p)
        if c.kind != "RegularFixed":
            raise HypothesisViolation("hypothesis violated at t=%g" % t,
                                      {"t": t, "kind": c.kind,
                                       "limit": None if c.limit is None else [complex(x) for x in c.limit]})
        ts.append(float(t))
        logs.append(math.log(c.alpha))
    ts_a, logs_a = np.array(ts), np.array(logs)
    slope = float(ts_a @ logs_a / (ts_a @ ts_a))
    resid = float(np.max(np.abs(logs_a - slope * ts_a)))
    return LawFit(math.exp(slope), resid, tuple(math.exp(x) for x in logs), tuple(ts), resid < threshold)


@dataclass(frozen=True)
class BoundaryGrid:
    """Angular grid on the unit sphere of C^N.

    The chart uses ``N - 1`` amplitude angles in ``[0, 90]`` degrees (a
    spherical parametrisation of ``(|p_1|, ..., |p_N|)``) and ``N`` phases in
    ``[0, 360)`` degrees, all stepped by ``resolution_deg``; phases of zero
    amplitudes are collapsed. ``center``/``radius`` restrict the scan to a
    Euclidean neighbourhood on the sphere.
    """

    resolution_deg: float = 1.0
    center: tuple | None = None
    radius: float | None = None

    @property
    def h(self):
        return math.radians(self.resolution_deg)


def _amplitudes(angles):
    """Spherical amplitudes ``(cos a1, sin a1 cos a2, ...)`` for angle rows."""
    n = angles.shape[-1] + 1
    out = np.empty(angles.shape[:-1] + (n,))
    s = np.ones(angles.shape[:-1])
    for k in range(n - 1):
        out[..., k] = s * np.cos(angles[..., k])
        s = s * np.sin(angles[..., k])
    out[..., -1] = s
    return np.where(np.abs(out) < 1e-15, 0.0, out)


def _grid_chunks(dim, grid):
    """Yield ``(chart_degrees, points)`` chunks in lexicographic chart order."""
    step = grid.resolution_deg
    amp_deg = np.arange(0.0, 90.0 + 1e-9, step)
    phase_deg = np.arange(0.0, 360.0 - 1e-9, step)
    if dim == 1:
        pts = np.exp(1j * np.radians(phase_deg))[:, None]
        yield phase_deg[:, None], pts
        return
    center = None if grid.center is None else np.asarray(grid.center, dtype=complex)
    amp_rows = np.array(np.meshgrid(*([amp_deg] * (dim - 1)), indexing="ij")).reshape(dim - 1, -1).T
    for row in amp_rows:
        amps = _amplitudes(np.radians(row)[None, :])[0]
        if center is not None and grid.radius is not None:
            if np.max(np.abs(amps - np.abs(center))) > grid.radius:
                continue
        live = amps > 0
        axes = [phase_deg if live[k] else np.array([0.0]) for k in range(dim)]
        phases = np.array(np.meshgrid(*axes, indexing="ij")).reshape(dim, -1).T
        pts = amps * np.exp(1j * np.radians(phases))
        chart = np.hstack([np.broadcast_to(row, (len(phases), dim - 1)), phases])
        if center is not None and grid.radius is not None:
            keep = np.linalg.norm(pts - center, axis=-1) <= grid.radius
            pts, chart = pts[keep], chart[keep]
        if len(pts):
            yield chart, pts


@dataclass(frozen=True, eq=False)
class ScanHit:
    chart: tuple
    p: np.ndarray
    alpha: float
    isolated: bool
    cluster: int


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Outcome of a boundary scan.

    ``hits`` are the grid points classified RegularFixed with
    ``alpha <= A``; ``classified`` keeps the full classification of every
    point that survived screening. Isolation is decided at grid scale: a
    cluster (single linkage at ``3h``) is isolated when its diameter is below
    ``3h`` and no other cluster lies within ``10h``.
    """

    hits: list
    classified: list = field(repr=False)
    resolution: float = 0.0
    n_points: int = 0
    n_candidates: int = 0
    rule: str = "isolated := cluster diameter < 3h and no other cluster within 10h"

    def __iter__(self):
        return iter(self.hits)

    def __len__(self):
        return len(self.hits)


SCREEN_DEPTH = 24


def _screen_chunk(f, chart, pts, tol):
    r = 1.0 - 2.0 ** -SCREEN_DEPTH
    img = np.asarray(f(r * pts), dtype=complex)
    keep = np.linalg.norm(img - pts, axis=-1) < tol
    return chart[keep], pts[keep], len(pts)


def _threads():
    try:
        return max(1, int(os.environ.get("KOBDYN_THREADS", "1")))
    except ValueError:
        return 1


def _real(points):
    pts = np.asarray(points)
    return np.hstack([pts.real, pts.imag])


FULL_CLUSTER_LIMIT = 20000


def _components(tree, n, radius):
    pairs = tree.query_pairs(radius, output_type="ndarray")
    adj = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    return connected_components(adj, directed=False)[1]


def _diameter_at_least(pts, bound, chunk=256):
    spread = np.max(np.linalg.norm(pts - pts[0], axis=1))
    if spread >= bound:
        return True
    if 2 * spread < bound:
        return False
    for start in range(0, len(pts), chunk):
        if np.max(cdist(pts[start:start + chunk], pts)) >= bound:
            return True
    return False


def _isolated_cluster(tree, real, members, h):
    """Isolation rule for one candidate cluster given by member indices."""
    pts = real[members]
    if _diameter_at_least(pts, 3 * h):
        return False
    counts = tree.query_ball_point(pts, 10 * h, return_length=True)
    return bool(np.all(counts == len(members)))


def _cluster_labels(real, h):
    """Single-linkage labels at ``3h`` and the isolation flag of every point.

    Large hit sets skip the full linkage (labels ``-1``): a point can only
    belong to an isolated cluster if its ``3h`` and ``10h`` neighbourhoods
    hold the same hits, which is checked by counting.
    """
    n = len(real)
    tree = cKDTree(real)
    isolated = np.zeros(n, dtype=bool)
    if n <= FULL_CLUSTER_LIMIT:
        labels = _components(tree, n, 3 * h)
        for lab in np.unique(labels):
            members = np.flatnonzero(labels == lab)
            isolated[members] = _isolated_cluster(tree, real, members, h)
        return labels, isolated
    labels = np.full(n, -1)
    c10 = tree.query_ball_point(real, 10 * h, return_length=True)
    c3 = tree.query_ball_point(real, 3 * h, return_length=True)
    next_label = 0
    for i in np.flatnonzero(c10 == c3):
        if labels[i] >= 0:
            continue
        members = np.array(sorted(tree.query_ball_point(real[i], 10 * h)))
        if _isolated_cluster(tree, real, members, h):
            labels[members] = next_label
            isolated[members] = True
            next_label += 1
    return labels, isolated


def scan_brfp(f, A, grid=None, screen_tol=1e-2, batch=4096, isolation=True):
    """Boundary regular fixed points with ``alpha <= A`` on an angular grid.

    A cheap screen (``|f(r p) - p|`` at ``r = 1 - 2^-24``) discards grid
    points that are visibly not fixed; survivors go through the full
    ladder classification. Results are ordered lexicographically in chart
    coordinates. With ``isolation=False`` the clustering step is skipped
    and every hit has ``isolated = None``.
    """
    if A < 1:
        raise ValueError("A must be >= 1")
    grid = grid or BoundaryGrid()
    h = grid.h
    chunks = list(_grid_chunks(f.dim, grid))
    tol = screen_tol + 4.0 * A * 2.0 ** -SCREEN_DEPTH
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        screened = list(pool.map(lambda c: _screen_chunk(f, c[0], c[1], tol), chunks))
    n_points = sum(s[2] for s in screened)
    charts = [s[0] for s in screened if len(s[0])]
    cands = [s[1] for s in screened if len(s[1])]
    if not cands:
        return ScanResult([], [], h, n_points, 0)
    charts = np.vstack(charts)
    cands = np.vstack(cands)
    classified = []
    for start in range(0, len(cands), batch):
        classified.extend(classify_boundary_points(f, cands[start:start + batch]))
    is_hit = np.array([c.kind == "RegularFixed" and c.alpha <= A * (1 + 1e-9) for c in classified])
    hit_idx = np.flatnonzero(is_hit)
    hits = []
    if len(hit_idx):
        if isolation:
            labels, isolated = _cluster_labels(_real(cands[hit_idx]), h)
        else:
            labels, isolated = np.full(len(hit_idx), -1), [None] * len(hit_idx)
        for k, i in enumerate(hit_idx):
            flag = isolated[k]
            hits.append(ScanHit(tuple(float(x) for x in charts[i]), bg.bpoint(cands[i]),
                                classified[i].alpha, None if flag is None else bool(flag),
                                int(labels[k])))
    return ScanResult(hits, list(zip(map(tuple, charts.tolist()), classified)), h, n_points, len(cands))


def _window_hits(f, p, A, resolution_deg, radius):
    grid = BoundaryGrid(resolution_deg, center=tuple(p), radius=radius)
    scan = scan_brfp(f, A, grid, isolation=False)
    if not scan.hits:
        return None, None
    real = _real(np.array([hit.p for hit in scan.hits]))
    tree = cKDTree(real)
    d, i = tree.query(_real(p[None, :])[0])
    if d > 3 * grid.h:
        return None, None
    return tree, real[i]


def isolated_at(f, p, A, resolution_deg=1.0):
    """Isolation of the fixed point ``p`` from scans of windows around it.

    A ``6h`` window settles the common non-isolated case (the hits within
    ``3h`` of ``p`` already span ``3h``); otherwise a ``14h`` window, wide
    enough to see every hit within ``10h`` of the cluster, decides. Returns
    ``None`` when no hit lies within ``3h`` of ``p``.
    """
    p = bg.bpoint(p)
    h = math.radians(resolution_deg)
    tree, x = _window_hits(f, p, A, resolution_deg, 6 * h)
    if tree is None:
        return None
    near = tree.data[tree.query_ball_point(x, 3 * h)]
    if _diameter_at_least(near, 3 * h):
        return False
    tree, x = _window_hits(f, p, A, resolution_deg, 14 * h)
    members = np.array(sorted(tree.query_ball_point(x, 10 * h)))
    return _isolated_cluster(tree, tree.data, members, h)


def write_scan_csv(result, path):
    """CSV export: chart coordinates, Re/Im of every coordinate, kind, alpha, isolated."""
    hit_by_chart = {h.chart: h for h in result.hits}
    rows = []
    for chart, c in result.classified:
        p = c.p
        hit = hit_by_chart.get(tuple(float(x) for x in chart))
        rows.append(list(chart) + [v for z in p for v in (z.real, z.imag)]
                    + [c.kind, "" if c.alpha is None else repr(float(c.alpha)),
                       "" if hit is None else str(hit.isolated)])
    dim = result.classified[0][1].p.size if result.classified else 0
    nchart = len(result.classified[0][0]) if result.classified else 0
    header = ["chart_%d" % k for k in range(nchart)]
    header += [f"p{k}_{part}" for k in range(dim) for part in ("re", "im")]
    header += ["kind", "alpha", "isolated"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
