import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles as o
from kobdyn import ballgeo as bg
from kobdyn.errors import DimensionError, DomainError
from strategies import ball_pair, ball_point, ball_triple


def test_frozen_distances():
    assert abs(bg.kobayashi_distance([0], [0.5]) - o.K_DISC_0_HALF) < 1e-10
    assert abs(bg.kobayashi_distance([0, 0], [0.6, 0]) - o.K_BALL_0_06) < 1e-10
    assert abs(bg.disc_distance(0, 0.5) - o.K_DISC_0_HALF) < 1e-10


@given(ball_pair())
def test_distance_matches_high_precision_oracle(pair):
    z, w = pair
    ref = float(o.mp_ball_distance(z.tolist(), w.tolist()))
    assert abs(bg.kobayashi_distance(z, w) - ref) < 1e-12 * max(1.0, ref) + 1e-15


@given(ball_pair())
def test_distance_is_symmetric_and_nonnegative(pair):
    z, w = pair
    d = bg.kobayashi_distance(z, w)
    assert d >= 0
    assert abs(d - bg.kobayashi_distance(w, z)) < 1e-12 * max(1.0, d)


@given(ball_triple())
def test_triangle_inequality(tri):
    a, b, c = tri
    assert bg.kobayashi_distance(a, c) <= bg.kobayashi_distance(a, b) + bg.kobayashi_distance(b, c) + 1e-12


@given(ball_pair(max_norm=0.9), st.data())
def test_automorphisms_are_isometries(pair, data):
    z, w = pair
    a = data.draw(ball_point(z.size, 0.9))
    phi = bg.involution(a, np.stack([z, w]))
    d0 = bg.kobayashi_distance(z, w)
    assert abs(bg.kobayashi_distance(phi[0], phi[1]) - d0) < 1e-9 * max(1.0, d0)


@given(st.integers(1, 3).flatmap(lambda n: ball_point(n, 0.9)), st.data())
def test_involution_is_an_involution(a, data):
    z = data.draw(ball_point(a.size, 0.9))
    assert np.allclose(bg.involution(a, bg.involution(a, z)), z, atol=1e-12)
    assert np.allclose(bg.involution(a, np.zeros_like(a)), a, atol=1e-15)
    assert np.allclose(bg.involution(a, a), 0, atol=1e-12)


def test_distance_keeps_relative_accuracy_for_close_points():
    z = np.array([0.6, 0.3j])
    w = z + 1e-9 * np.array([1.0, 1.0j])
    ref = float(o.mp_ball_distance(z.tolist(), w.tolist()))
    assert abs(bg.kobayashi_distance(z, w) / ref - 1) < 1e-6


def test_metric_is_the_infinitesimal_distance():
    z = np.array([0.4, -0.2j])
    v = np.array([0.3 + 0.1j, 0.5])
    eps = 1e-6
    ratio = bg.kobayashi_distance(z, z + eps * v) / (eps * bg.kobayashi_metric(z, v))
    assert abs(ratio - 1) < 1e-5
    assert abs(bg.kobayashi_metric(0.5, 1.0) - 4 / 3) < 1e-15


def test_geodesic_left_inverse_is_a_left_inverse():
    g = bg.geodesic([0.2, 0.1j], [0.6, 0.8j])
    zeta = (np.linspace(-0.9, 0.9, 20)[:, None] + 1j * np.linspace(-0.4, 0.4, 20)[None, :]).ravel()
    zeta = zeta[np.abs(zeta) < 0.95]
    assert np.max(np.abs(g.left_inverse(g(zeta)) - zeta)) < 1e-10
    assert np.allclose(g(np.array(0.0)), g.z0, atol=1e-14)
    assert np.allclose(g(np.array(1.0)), g.p, atol=1e-12)


def test_geodesic_is_an_isometric_embedding():
    g = bg.geodesic([0, 0.3], [1, 0])
    a, b = 0.3 + 0.2j, -0.5j
    assert abs(bg.kobayashi_distance(g(np.array(a)), g(np.array(b))) - bg.disc_distance(a, b)) < 1e-12


def test_retraction_is_idempotent():
    g = bg.geodesic([0.1, 0], [0, 1j])
    z = np.array([[0.3, 0.2j], [-0.1, 0.5]])
    r = g.retraction(z)
    assert np.allclose(g.retraction(r), r, atol=1e-12)


def test_horosphere_height_is_a_limit_of_distance_differences():
    p = np.array([0.6, 0.8j])
    z = np.array([0.1, -0.3j])
    w = (1 - 1e-7) * p
    approx = bg.kobayashi_distance(z, w) - bg.kobayashi_distance(np.zeros(2), w)
    assert abs(bg.horosphere_height(p, z) - approx) < 1e-5
    z0 = np.array([0.2, 0.0])
    approx0 = approx - (bg.kobayashi_distance(z0, w) - bg.kobayashi_distance(np.zeros(2), w))
    assert abs(bg.horosphere_height(p, z, z0) - approx0) < 1e-5


def test_k_region_membership():
    q = bg.KRegion([0, 0], [1, 0], 10)
    assert not bg.in_K_region(q, np.array([0, 0.9]))
    assert bg.in_K_region(q, np.array([0.9, 0]))
    with pytest.raises(ValueError):
        bg.KRegion([0, 0], [1, 0], 1.0)


@given(st.floats(0.05, 0.95), st.floats(1.5, 50))
def test_k_region_grows_with_amplitude(r, M):
    q1 = bg.KRegion([0], [1], M)
    q2 = bg.KRegion([0], [1], 2 * M)
    z = np.array([r * np.exp(0.7j)])
    assert (not bg.in_K_region(q1, z)) or bg.in_K_region(q2, z)


def test_point_validation():
    with pytest.raises(DomainError):
        bg.cpoint([0.8, 0.6])
    with pytest.raises(DomainError):
        bg.bpoint([0, 0])
    with pytest.raises(DomainError):
        bg.cpoint([np.nan])
    with pytest.raises(DimensionError):
        bg.cpoint(np.zeros((2, 2)))
    with pytest.raises(DimensionError):
        bg.kobayashi_distance([0, 0], [0])
    p = bg.bpoint([3, 4j])
    assert abs(np.linalg.norm(p) - 1) < 1e-15
    assert not p.flags.writeable


def test_distance_broadcasts():
    z = np.zeros((5, 2))
    w = np.array([[r, 0] for r in np.linspace(0, 0.9, 5)])
    d = bg.kobayashi_distance(z, w)
    assert d.shape == (5,)
    assert np.allclose(d, np.arctanh(np.linspace(0, 0.9, 5)), atol=1e-14)


def test_radial_approach_is_special_and_restricted():
    p = np.array([0.6, 0.8])
    r = 1 - 2.0 ** -np.arange(1, 30)
    c = bg.classify_approach(p, r[:, None] * p)
    assert c.special and c.restricted and c.stolz_amplitude == 2


def test_tangential_approach_is_not_restricted():
    r = 1 - 2.0 ** -np.arange(1, 30)
    theta = np.sqrt(1 - r)
    pts = r * np.exp(1j * theta)
    c = bg.classify_approach([1.0], pts)
    assert not c.restricted


@given(st.floats(0.01, 1.5))
def test_stolz_sequences_are_restricted(slope):
    r = 1 - 2.0 ** -np.arange(1, 30)
    pts = r * np.exp(1j * slope * (1 - r))
    assume(np.all(np.abs(pts) < 1))
    c = bg.classify_approach([1.0], pts)
    assert c.restricted
    assert math.isfinite(c.max_tail_ratio)
