"""JSON scenario configs and map / semigroup descriptors.

A scenario is one JSON object. ``kind`` selects the computation; the other
keys allowed for each kind are listed in ``KIND_KEYS`` and anything else
is rejected with the offending key path. Complex numbers may be written as
a number, a ``[re, im]`` pair or a string such as ``"1-2j"`` or ``"0.5i"``.

Maps are given either as objects (``{"type": "DiscMoebius", "a": 3, ...}``)
or in call form (``"DiscMoebius(3, 1, 1, 3)"``); semigroups likewise.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field

import numpy as np

from . import holomap as hm
from . import semiflow as sf

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "KIND_KEYS",
    "load_config",
    "parse_config",
    "parse_complex",
    "parse_point",
    "build_map",
    "build_semigroup",
]


class ConfigError(ValueError):
    """Invalid scenario; ``path`` locates the offending key."""

    def __init__(self, path, message):
        super().__init__("%s: %s" % (path or "<root>", message))
        self.path = path


COMMON_KEYS = {"kind", "name", "tolerances", "output"}
KIND_KEYS = {
    "geometry": {"query", "domain", "z", "w", "v", "p", "z0", "M", "zeta"},
    "classify": {"map", "p"},
    "scan": {"map", "A", "resolution_deg", "center", "radius"},
    "backward": {"map", "p", "w0", "n", "force"},
    "semigroup": {"semigroup", "t_grid", "z_samples", "n_samples", "reference", "p"},
    "verify": {"suite", "semigroup", "p", "t0", "t_grid", "n"},
}
TOLERANCE_KEYS = {"threshold", "tol_scale"}
OUTPUT_KEYS = {"dir", "csv"}
GEOMETRY_QUERIES = ("distance", "metric", "horosphere", "k_region", "left_inverse")


def _path(parent, key):
    return "%s.%s" % (parent, key) if parent else str(key)


def parse_complex(value, path="value"):
    if isinstance(value, bool):
        raise ConfigError(path, "expected a complex number, got a boolean")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    if isinstance(value, str):
        text = value.replace(" ", "")
        if "j" not in text:
            text = text.replace("i", "j")
        if text.endswith("j") and text[:-1] in ("", "+", "-"):
            text = text[:-1] + "1j"
        try:
            return complex(text)
        except ValueError:
            pass
    raise ConfigError(path, "cannot read %r as a complex number" % (value,))


def parse_point(value, path="point"):
    """A point of C^N: a scalar (N = 1) or a list of complex entries."""
    if isinstance(value, list):
        if not value:
            raise ConfigError(path, "empty point")
        return np.array([parse_complex(v, "%s[%d]" % (path, i)) for i, v in enumerate(value)])
    return np.array([parse_complex(value, path)])


def _call_form(text, path):
    try:
        node = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ConfigError(path, "cannot parse descriptor %r" % text) from exc
    if isinstance(node, ast.Name):
        return node.id, []
    if not isinstance(node, ast.Call) or not isinstance(node.func, ast.Name) or node.keywords:
        raise ConfigError(path, "descriptor must look like Name(arg, ...)")
    args = []
    for i, a in enumerate(node.args):
        try:
            args.append(ast.literal_eval(a))
        except ValueError as exc:
            raise ConfigError("%s[%d]" % (path, i), "arguments must be literals") from exc
    return node.func.id, args


_MAP_PARAMS = {
    "DiscMoebius": ("a", "b", "c", "d"),
    "BallAutomorphism": ("a", "unitary"),
    "Diagonal": ("mu",),
    "SliceRotation": ("theta", "a"),
    "SiegelMap": ("t",),
    "Identity": ("dim",),
    "FlowMap": ("semigroup", "t"),
    "Composite": ("maps",),
}
_SEMIGROUP_PARAMS = {
    "DiscHyperbolic": ("lam",),
    "BallRotation": ("thetas",),
    "SiegelDilation": (),
    "GeneratorODE": ("generator",),
}
_GENERATOR_PARAMS = {
    "BerksonPorta": ("tau", "coeffs"),
    "Linear": ("matrix",),
}


def _normalise(desc, table, path, what):
    if isinstance(desc, str):
        name, args = _call_form(desc, path)
        if name not in table:
            raise ConfigError(path, "unknown %s %r" % (what, name))
        names = table[name]
        if len(args) > len(names) and names and names[-1] in ("mu", "thetas", "coeffs"):
            args = args[:len(names) - 1] + [list(args[len(names) - 1:])]
        if len(args) > len(names):
            raise ConfigError(path, "%s takes at most %d arguments" % (name, len(names)))
        return name, dict(zip(names, args))
    if isinstance(desc, dict):
        if "type" not in desc:
            raise ConfigError(path, "%s descriptor needs a 'type'" % what)
        name = desc["type"]
        if name not in table:
            raise ConfigError(_path(path, "type"), "unknown %s %r" % (what, name))
        extra = set(desc) - {"type"} - set(table[name])
        if extra:
            raise ConfigError(_path(path, sorted(extra)[0]), "unknown key for %s" % name)
        return name, {k: v for k, v in desc.items() if k != "type"}
    raise ConfigError(path, "%s descriptor must be a string or an object" % what)


def _need(params, key, path):
    if key not in params:
        raise ConfigError(_path(path, key), "missing parameter")
    return params[key]


def _real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "expected a real number")
    return float(value)


def _complex_list(value, path):
    if not isinstance(value, list):
        value = [value]
    return tuple(parse_complex(v, "%s[%d]" % (path, i)) for i, v in enumerate(value))


def build_generator(desc, path="generator"):
    name, params = _normalise(desc, _GENERATOR_PARAMS, path, "generator")
    if name == "BerksonPorta":
        tau = parse_complex(_need(params, "tau", path), _path(path, "tau"))
        coeffs = _complex_list(params.get("coeffs", [1]), _path(path, "coeffs"))
        try:
            return sf.BerksonPorta(tau, coeffs)
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from exc
    rows = _need(params, "matrix", path)
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ConfigError(_path(path, "matrix"), "expected a square list of rows")
    mat = np.array([[parse_complex(v, "%s.matrix[%d][%d]" % (path, i, j)) for j, v in enumerate(r)]
                    for i, r in enumerate(rows)])
    if mat.shape[0] != mat.shape[1]:
        raise ConfigError(_path(path, "matrix"), "matrix must be square")
    mat.flags.writeable = False
    return sf.VectorField(lambda z, m=mat: z @ m.T, mat.shape[0])


def build_semigroup(desc, path="semigroup"):
    name, params = _normalise(desc, _SEMIGROUP_PARAMS, path, "semigroup")
    try:
        if name == "DiscHyperbolic":
            return sf.DiscHyperbolic(_real(_need(params, "lam", path), _path(path, "lam")))
        if name == "BallRotation":
            th = params.get("thetas", [])
            th = th if isinstance(th, list) else [th]
            return sf.BallRotation(tuple(_real(v, "%s.thetas[%d]" % (path, i)) for i, v in enumerate(th)))
        if name == "SiegelDilation":
            return sf.SiegelDilation()
        return sf.GeneratorODE(build_generator(_need(params, "generator", path), _path(path, "generator")))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(path, str(exc)) from exc


def build_map(desc, path="map"):
    name, params = _normalise(desc, _MAP_PARAMS, path, "map")
    try:
        if name == "DiscMoebius":
            return hm.DiscMoebius(*(parse_complex(_need(params, k, path), _path(path, k)) for k in "abcd"))
        if name == "BallAutomorphism":
            a = parse_point(_need(params, "a", path), _path(path, "a"))
            u = params.get("unitary")
            if u is not None:
                u = np.array([[parse_complex(v, _path(path, "unitary")) for v in row] for row in u])
            return hm.BallAutomorphism(a, u)
        if name == "Diagonal":
            return hm.Diagonal(_complex_list(_need(params, "mu", path), _path(path, "mu")))
        if name == "SliceRotation":
            return hm.SliceRotation(_real(_need(params, "theta", path), _path(path, "theta")),
                                    _real(_need(params, "a", path), _path(path, "a")))
        if name == "SiegelMap":
            return hm.SiegelMap(_real(_need(params, "t", path), _path(path, "t")))
        if name == "Identity":
            return hm.identity(int(_real(_need(params, "dim", path), _path(path, "dim"))))
        if name == "FlowMap":
            s = build_semigroup(_need(params, "semigroup", path), _path(path, "semigroup"))
            return s.time_slice(_real(_need(params, "t", path), _path(path, "t")))
        maps = _need(params, "maps", path)
        if not isinstance(maps, list) or not maps:
            raise ConfigError(_path(path, "maps"), "expected a non-empty list")
        return hm.Composite(tuple(build_map(m, "%s.maps[%d]" % (path, i)) for i, m in enumerate(maps)))
    except ConfigError:
        raise
    except (ValueError, TypeError, ArithmeticError, hm.IntegrityError) as exc:
        raise ConfigError(path, "%s: %s" % (type(exc).__name__, exc)) from exc


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario; ``params`` holds the kind-specific raw entries."""

    kind: str
    name: str
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    source: str | None = None


def parse_config(doc, source=None):
    if not isinstance(doc, dict):
        raise ConfigError("", "a scenario must be a JSON object")
    kind = doc.get("kind")
    if kind not in KIND_KEYS:
        raise ConfigError("kind", "expected one of %s, got %r" % (", ".join(KIND_KEYS), kind))
    allowed = COMMON_KEYS | KIND_KEYS[kind]
    for key in doc:
        if key not in allowed:
            raise ConfigError(key, "unknown key for a %s scenario" % kind)
    tol = doc.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("tolerances", "expected an object")
    for key, val in tol.items():
        if key not in TOLERANCE_KEYS:
            raise ConfigError(_path("tolerances", key), "unknown tolerance")
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0:
            raise ConfigError(_path("tolerances", key), "tolerances must be positive numbers")
    out = doc.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output", "expected an object")
    for key in out:
        if key not in OUTPUT_KEYS:
            raise ConfigError(_path("output", key), "unknown output option")
    name = doc.get("name", kind)
    if not isinstance(name, str):
        raise ConfigError("name", "expected a string")
    params = {k: v for k, v in doc.items() if k not in COMMON_KEYS}
    if kind == "geometry" and params.get("query", "distance") not in GEOMETRY_QUERIES:
        raise ConfigError("query", "expected one of %s" % ", ".join(GEOMETRY_QUERIES))
    return ScenarioConfig(kind, name, params, dict(tol), dict(out), source)


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("", "%s is not valid JSON (line %d: %s)" % (path, exc.lineno, exc.msg)) from exc
    return parse_config(doc, str(path))
