"""Backward iteration sequences converging to boundary fixed points.

Run: python3 demos/03_backward_orbits.py
"""

import numpy as np

from kobdyn import backward as bw
from kobdyn import holomap as hm

g = hm.DiscMoebius(3, 1, 1, 3)
orbit = bw.backward_orbit(g, [-1], w0=[0.0], n=12)
print("Moebius orbit:", np.round(orbit.points[:, 0].real, 6))
print("hyperbolic step s = %.9f, alpha = %.9f, status %s" % (orbit.s, orbit.alpha, orbit.status))

f = hm.SliceRotation(0.25, 0.5)
orbit = bw.backward_orbit(f, [0, 1], w0=[0.0, 0.5], n=30, force=True)
print("slice rotation: limit %s, s = %.6f, tail K-region amplitude %s"
      % (orbit.limit.round(6), orbit.s, orbit.k_region_tail))
