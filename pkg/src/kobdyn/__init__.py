"""Numerical laboratory for holomorphic dynamics on the unit disc and ball.

Modules
-------
ballgeo    Kobayashi distance and metric, automorphisms, geodesics, K-regions.
holomap    Self-map representations, iteration, Denjoy-Wolff classification.
semiflow   One-parameter semigroups, closed form or integrated from generators.
boundary   Radial limits, dilation coefficients, boundary fixed point scans.
backward   Preimages, backward orbits, contact curves, common fixed points.
suites     Property suites T1..T9; ``config``/``cli`` run JSON scenarios.
"""

from . import backward, ballgeo, boundary, holomap, semiflow
from .errors import (
    DimensionError,
    DomainError,
    HypothesisViolation,
    IntegrityError,
    KobdynError,
    NotSemiComplete,
    PreimageError,
    Undetermined,
)

__version__ = "0.1.0"

__all__ = [
    "ballgeo",
    "holomap",
    "semiflow",
    "boundary",
    "backward",
    "KobdynError",
    "DimensionError",
    "DomainError",
    "IntegrityError",
    "Undetermined",
    "HypothesisViolation",
    "NotSemiComplete",
    "PreimageError",
]
