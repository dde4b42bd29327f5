"""Dilation coefficients and a scan for boundary repelling fixed points.

Run: python3 demos/02_boundary_fixed_points.py
"""

from kobdyn import boundary as bd
from kobdyn import holomap as hm

g = hm.DiscMoebius(3, 1, 1, 3)
for p in (-1.0, 1.0, 1j):
    c = bd.classify_boundary_point(g, [p])
    print("g at %-6s -> %-15s alpha = %.9f" % (p, c.kind, c.alpha))

siegel = hm.SiegelMap(1.0)
print("map class of the Siegel slice:", hm.classify_map(siegel).kind)
scan = bd.scan_brfp(siegel, 3.0, bd.BoundaryGrid(2.0))
print("scan: %d grid points, %d candidates" % (scan.n_points, scan.n_candidates))
for h in scan.hits:
    print("  fixed point %s  alpha = %.9f  isolated = %s" % (h.p.round(9), h.alpha, h.isolated))
