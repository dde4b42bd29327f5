"""Kobayashi geometry of the disc and the ball.

Run: python3 demos/01_geometry.py
"""

import numpy as np

from kobdyn import ballgeo as bg

print("k_disc(0, 0.5)       = %.12f" % bg.kobayashi_distance([0.0], [0.5]))
print("k_ball(0, (0.6, 0))  = %.12f" % bg.kobayashi_distance([0.0, 0.0], [0.6, 0.0]))

# automorphisms move points around without changing distances
a = np.array([0.3, -0.2j])
z, w = np.array([0.1, 0.4j]), np.array([-0.5, 0.2])
fz, fw = bg.involution(a, np.stack([z, w]))
print("distance before/after an automorphism: %.15f / %.15f"
      % (bg.kobayashi_distance(z, w), bg.kobayashi_distance(fz, fw)))

# a complex geodesic through z0 reaching the boundary point p, and its left inverse
g = bg.geodesic([0.2, 0.1j], [0.6, 0.8j])
zeta = np.array([0.0, 0.5, 0.9j])
print("left inverse recovers the disc parameter:", np.round(g.left_inverse(g(zeta)), 12))

# approach regions at the boundary point (1, 0)
region = bg.KRegion([0, 0], [1, 0], 10.0)
for pt in ([0.9, 0.0], [0.9, 0.3], [0.0, 0.9]):
    print("point %-12s in K-region(M=10): %s" % (pt, bg.in_K_region(region, np.array(pt))))
