"""Semigroups: the dilation law and a common boundary fixed point.

Run: python3 demos/04_semigroups.py
"""

from kobdyn import backward as bw
from kobdyn import boundary as bd
from kobdyn import semiflow as sf

siegel = sf.SiegelDilation()
fit = bd.dilation_law_fit(siegel, [-1, 0], [0.25, 0.5, 0.75, 1.0])
print("alpha_t at (-1, 0):", [round(a, 9) for a in fit.alphas], "lambda = %.9f" % fit.lam)

rep = bw.common_brfp_verify(siegel, [-1, 0], 1.0, [0.25, 0.5, 0.75])
print("Siegel dilation, common fixed point at (-1, 0):", rep.verdict)

rot = sf.BallRotation((1.0, 0.0))
rep = bw.common_brfp_verify(rot, [1, 0], 1.0, [0.25, 0.5, 0.75])
half = next(r for r in rep.per_t if r["t"] == 0.5)
print("rotation semigroup at (1, 0):", rep.verdict, "; phi_1/2 sends it to", half["q"].round(12))
