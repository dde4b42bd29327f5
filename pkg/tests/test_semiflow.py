import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as o
from kobdyn import ballgeo as bg
from kobdyn import semiflow as sf
from kobdyn._numerics import ball_samples
from kobdyn.errors import DimensionError, NotSemiComplete
from strategies import ball_point

DYADIC = [0.25, 0.5, 0.75, 1.0]
HALF_HYPERBOLIC = sf.VectorField(lambda z: 0.5 * (1 - z**2), 1)


def test_hyperbolic_flow_matches_the_frozen_value():
    s = sf.DiscHyperbolic(1.0)
    assert abs(s.evaluate_t(1.0, np.array([0.0]))[0] - o.PHI1_ZERO) < 1e-15


@given(st.floats(0.1, 3), st.floats(0, 4), st.floats(-0.9, 0.9), st.floats(-0.4, 0.4))
def test_hyperbolic_flow_matches_the_cayley_oracle(lam, t, x, y):
    z = complex(x, y)
    ref = complex(o.mp_hyperbolic_flow(lam, t, z))
    assert abs(sf.DiscHyperbolic(lam).evaluate_t(t, np.array([z]))[0] - ref) < 1e-13


@pytest.mark.parametrize(
    "s",
    [sf.DiscHyperbolic(0.7), sf.BallRotation((0.3, -0.2)), sf.SiegelDilation()],
    ids=["hyperbolic", "rotation", "siegel"],
)
def test_closed_form_semigroup_property(s):
    z = ball_samples(16, s.dim, max_radius=0.9, seed=2)
    rep = sf.check_semigroup_property(s, DYADIC, z)
    assert rep.passed and rep.max_residual < 1e-12


def test_integrated_generator_matches_the_closed_form():
    s = sf.GeneratorODE(HALF_HYPERBOLIC)
    z = ball_samples(8, 1, max_radius=0.9, seed=3)
    assert sf.max_deviation(s, sf.DiscHyperbolic(1.0), DYADIC, z) < 1e-7
    rep = sf.check_semigroup_property(s, DYADIC, z)
    assert rep.passed and rep.threshold == sf.INTEGRATED_TOL


def test_berkson_porta_generator_attracts_to_its_point():
    g = sf.BerksonPorta(1j, (1.0,))
    s = sf.GeneratorODE(g)
    z = s.evaluate_t(20.0, np.array([[0.3], [-0.5j]]))
    assert np.max(np.abs(z - 1j)) < 0.1
    assert np.allclose(sf.generator_value(g, 1j), 0)
    with pytest.raises(ValueError):
        sf.BerksonPorta(0.5, (1.0,))


def test_berkson_porta_formula():
    g = sf.BerksonPorta(1.0, (0.5,))
    z = np.array([0.2 + 0.1j])
    assert np.allclose(g(z), 0.5 * (z - 1) ** 2)


def test_non_semi_complete_field_is_detected():
    s = sf.GeneratorODE(sf.VectorField(lambda z: z + 0.5, 1))
    with pytest.raises(NotSemiComplete):
        s.evaluate_t(5.0, np.array([0.5]))


def test_time_and_dimension_checks():
    s = sf.SiegelDilation()
    with pytest.raises(ValueError):
        s.evaluate_t(-1.0, np.zeros(2))
    with pytest.raises(DimensionError):
        s.evaluate_t(1.0, np.zeros(3))
    z = np.array([0.1, 0.2j])
    assert np.array_equal(s.evaluate_t(0.0, z), z)
    with pytest.raises(ValueError):
        sf.DiscHyperbolic(0.0)
    with pytest.raises(ValueError):
        sf.check_semigroup_property(s, [], z)


@given(st.floats(0, 2), st.data())
def test_siegel_slices_are_isometries(t, data):
    z = data.draw(ball_point(2, 0.9))
    w = data.draw(ball_point(2, 0.9))
    f = sf.time_slice(sf.SiegelDilation(), t)
    fz, fw = f(np.stack([z, w]))
    d = bg.kobayashi_distance(z, w)
    assert abs(bg.kobayashi_distance(fz, fw) - d) < 1e-9 * max(1, d)
    assert np.allclose(sf.SiegelDilation().flow(-t, np.stack([fz, fw])), np.stack([z, w]), atol=1e-10)


def test_time_slice_is_a_map_object():
    f = sf.time_slice(sf.BallRotation((0.25,)), 1.0)
    assert f.dim == 1 and f.invertible
    assert np.allclose(f(np.array([0.5])), 0.5j)
    assert np.allclose(f.raw_inverse(np.array([0.5j])), 0.5)
    g = sf.time_slice(sf.GeneratorODE(HALF_HYPERBOLIC), 1.0)
    assert not g.invertible and g.raw_inverse(np.array([0.1])) is None


def test_continuity_modulus_of_a_rotation():
    s = sf.BallRotation((1.0,))
    z = np.array([[0.5]])
    m = sf.continuity_modulus(s, 0.3, 1e-3, z)
    assert abs(m - 0.5 * abs(np.exp(2j * np.pi * 1e-3) - 1)) < 1e-14
