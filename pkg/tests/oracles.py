"""Independent reference computations used to freeze expected values.

Everything here runs in mpmath at 50 significant digits and shares no code
with the package. The frozen constants below were produced by these
functions; ``test_oracles.py`` re-derives them so a drift in either place
is caught.
"""

import mpmath as mp

mp.mp.dps = 50

# artanh(1/2): disc distance from 0 to 0.5
K_DISC_0_HALF = 0.5493061443340548
# log 2: ball distance from 0 to (0.6, 0)
K_BALL_0_06 = 0.6931471805599453
# boundary derivatives of g(z) = (3z + 1)/(z + 3) at -1 and +1
ALPHA_G_MINUS = 2.0
ALPHA_G_PLUS = 0.5
# radial derivative of the time-1 Siegel dilation at (-1, 0) and (1, 0)
ALPHA_SIEGEL_MINUS = 2.718281828459045
ALPHA_SIEGEL_PLUS = 0.36787944117144233
# tanh(1/2): hyperbolic disc flow with generator (1 - z^2)/2 at t = 1 from 0
PHI1_ZERO = 0.46211715726000974


def mp_ball_distance(z, w):
    """artanh of the pseudo-hyperbolic distance, in high precision."""
    z = [mp.mpc(x) for x in z]
    w = [mp.mpc(x) for x in w]
    zz = mp.fsum(abs(x) ** 2 for x in z)
    ww = mp.fsum(abs(x) ** 2 for x in w)
    zw = mp.fsum(a * mp.conj(b) for a, b in zip(z, w))
    c = (1 - zz) * (1 - ww) / abs(1 - zw) ** 2
    return mp.atanh(mp.sqrt(max(mp.mpf(0), 1 - c)))


def mp_disc_distance(a, b):
    a, b = mp.mpc(a), mp.mpc(b)
    return mp.atanh(abs(a - b) / abs(1 - mp.conj(b) * a))


def mp_moebius_derivative(a, b, c, d, z):
    """Symbolic derivative (ad - bc)/(cz + d)^2."""
    return (mp.mpc(a) * d - mp.mpc(b) * c) / (mp.mpc(c) * z + d) ** 2


def mp_siegel_first(t, z1, z2=0):
    """First coordinate of the Cayley-conjugated Siegel dilation."""
    e = mp.e ** t
    den = e * (1 + z1) + (1 - z1)
    return (e * (1 + z1) - (1 - z1)) / den


def mp_siegel_alpha(t, sign):
    """Radial derivative ``d/dr <f(r p), p>`` at ``r = 1`` for ``p = (sign, 0)``."""
    return mp.diff(lambda r: mp_siegel_first(t, sign * r) * sign, 1)


def mp_hyperbolic_flow(lam, t, z):
    """Closed form of ``dz/dt = lam (1 - z^2)/2`` through the Cayley map."""
    c = (1 + mp.mpc(z)) / (1 - mp.mpc(z))
    c = c * mp.e ** (lam * t)
    return (c - 1) / (c + 1)


def backward_moebius(k):
    """``-(2^k - 1)/(2^k + 1)``: the backward orbit of g from 0 toward -1."""
    return -(mp.mpf(2) ** k - 1) / (mp.mpf(2) ** k + 1)
