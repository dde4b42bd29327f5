"""``kobdyn`` command line: run a JSON scenario or a verification suite.

Usage::

    kobdyn scenario.json [--out DIR] [--suite Tk] [--tol-scale X]
    kobdyn --suite T4 [--out DIR]

Each run writes ``report.json`` (schema 1, deterministic), ``report.txt``
(aligned table), ``timing.json`` (wall time, kept apart so reports diff
cleanly) and, for scans and backward orbits, an optional CSV.

Exit codes: 0 success; 2 hypothesis violation or undetermined numerics;
1 configuration or runtime errors and failed suites.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import backward as bw
from . import ballgeo as bg
from . import boundary as bd
from . import holomap as hm
from . import semiflow as sf
from . import suites
from ._numerics import ball_samples
from .config import ConfigError, ScenarioConfig, build_map, build_semigroup, load_config, parse_point
from .errors import HypothesisViolation, KobdynError, Undetermined

SCHEMA = 1
EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS = 0, 1, 2
DEFAULT_OUT = "kobdyn-out"

__all__ = ["Outcome", "run_scenario", "run_suite", "write_outputs", "main", "SCHEMA"]


class Outcome:
    """Result of one run: a JSON-ready ``result``, a status and optional CSV rows.

    ``status`` is ``ok``, ``fail`` (suite verdict FAIL), ``hypothesis_violated``,
    ``undetermined`` or ``error``; it fixes the exit code.
    """

    EXIT = {"ok": EXIT_OK, "fail": EXIT_ERROR, "error": EXIT_ERROR,
            "hypothesis_violated": EXIT_HYPOTHESIS, "undetermined": EXIT_HYPOTHESIS}

    def __init__(self, kind, name, status, result, table, csv_writer=None, diagnostics=None):
        self.kind = kind
        self.name = name
        self.status = status
        self.result = result
        self.table = table
        self.csv_writer = csv_writer
        self.diagnostics = diagnostics or {}
        self.runtime = 0.0

    @property
    def exit_code(self):
        return self.EXIT[self.status]

    def report(self):
        return {
            "schema": SCHEMA,
            "name": self.name,
            "kind": self.kind,
            "status": self.status,
            "exit_code": self.exit_code,
            "result": _plain(self.result),
            "diagnostics": _plain(self.diagnostics),
        }


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    return suites._plain(v)


def _fmt(v):
    """Human formatting of a raw (not yet JSON-converted) value."""
    if isinstance(v, (complex, np.complexfloating)):
        return "%.12g%+.12gi" % (v.real, v.imag)
    if isinstance(v, (float, np.floating)):
        return "%.12g" % v
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(_plain(v))


def _table(rows, header=("quantity", "value")):
    """Aligned plain-text table from a list of tuples."""
    cells = [tuple(header)] + [tuple(_fmt(c) for c in r) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _geometry(cfg):
    p = cfg.params
    query = p.get("query", "distance")
    domain = p.get("domain", "ball")
    if domain not in ("disc", "ball"):
        raise ConfigError("domain", "expected 'disc' or 'ball'")

    def pt(key, boundary=False):
        if key not in p:
            raise ConfigError(key, "missing for a %s query" % query)
        z = parse_point(p[key], key)
        if domain == "disc" and z.size != 1:
            raise ConfigError(key, "disc points have one coordinate")
        return bg.bpoint(z) if boundary else z

    result = {"query": query, "domain": domain}
    if query == "distance":
        result["value"] = bg.kobayashi_distance(pt("z"), pt("w"))
    elif query == "metric":
        result["value"] = bg.kobayashi_metric(pt("z"), pt("v"))
    elif query == "horosphere":
        z0 = pt("z0") if "z0" in p else None
        result["value"] = bg.horosphere_height(pt("p", True), pt("z"), z0)
    elif query == "k_region":
        M = p.get("M")
        if isinstance(M, bool) or not isinstance(M, (int, float)):
            raise ConfigError("M", "expected a real amplitude > 1")
        region = bg.KRegion(pt("z0") if "z0" in p else np.zeros(pt("p").size, complex), pt("p", True), M)
        z = pt("z")
        result["value"] = (bg.horosphere_height(region.p, z, region.z0)
                           + bg.kobayashi_distance(region.z0, z))
        result["bound"] = float(np.log(M))
        result["inside"] = bool(bg.in_K_region(region, z))
    else:
        g = bg.geodesic(pt("z0") if "z0" in p else np.zeros(pt("p").size, complex), pt("p", True))
        zeta = g.left_inverse(pt("z"))
        result["value"] = complex(zeta)
        result["retraction"] = g(np.asarray(zeta))
    rows = [(k, v) for k, v in result.items()]
    return Outcome(cfg.kind, cfg.name, "ok", result, _table(rows))


def _classification_dict(c):
    out = {"kind": c.kind, "p": c.p, "regular": c.regular}
    if c.limit is not None:
        out["limit"] = c.limit
    if c.alpha is not None:
        out["alpha"] = float(c.alpha)
    if c.dilation is not None:
        out["alpha_error"] = float(c.dilation.error_estimate)
        out["julia_alpha"] = float(c.dilation.julia_alpha)
    return out


def _classify(cfg):
    f = build_map(cfg.params.get("map"), "map") if "map" in cfg.params else None
    if f is None:
        raise ConfigError("map", "missing map descriptor")
    if "p" not in cfg.params:
        mc = hm.classify_map(f)
        result = {"map_class": mc.kind, "iterations": mc.iterations}
        if mc.fixed_point is not None:
            result["fixed_point"] = mc.fixed_point
        if mc.tau is not None:
            result["denjoy_wolff_point"] = mc.tau
        return Outcome(cfg.kind, cfg.name, "ok", result, _table(list(result.items())))
    c = bd.classify_boundary_point(f, parse_point(cfg.params["p"], "p"))
    result = _classification_dict(c)
    if c.kind == "Undetermined":
        return Outcome(cfg.kind, cfg.name, "undetermined", result, _table(list(result.items())),
                       diagnostics=c.diagnostics)
    return Outcome(cfg.kind, cfg.name, "ok", result, _table(list(result.items())))


def _scan(cfg):
    p = cfg.params
    f = build_map(p.get("map"), "map")
    A = p.get("A")
    if isinstance(A, bool) or not isinstance(A, (int, float)) or A < 1:
        raise ConfigError("A", "expected a real bound >= 1")
    res = p.get("resolution_deg", 1.0)
    if isinstance(res, bool) or not isinstance(res, (int, float)) or not res > 0:
        raise ConfigError("resolution_deg", "expected a positive angle")
    center = p.get("center")
    if center is not None:
        center = tuple(parse_point(center, "center"))
    radius = p.get("radius")
    if radius is not None and (isinstance(radius, bool) or not isinstance(radius, (int, float))
                               or not radius > 0):
        raise ConfigError("radius", "expected a positive radius")
    scan = bd.scan_brfp(f, A, bd.BoundaryGrid(float(res), center, radius))
    hits = [{"chart": h.chart, "p": h.p, "alpha": h.alpha, "isolated": h.isolated, "cluster": h.cluster}
            for h in scan.hits]
    result = {"A": float(A), "resolution_deg": float(res), "n_points": scan.n_points,
              "n_candidates": scan.n_candidates, "isolation_rule": scan.rule, "hits": hits}
    rows = [(i, h["p"], h["alpha"], h["isolated"]) for i, h in enumerate(hits)]
    text = _table([(k, result[k]) for k in ("A", "resolution_deg", "n_points", "n_candidates")])
    text += "\n" + _table(rows, ("hit", "p", "alpha", "isolated"))
    return Outcome(cfg.kind, cfg.name, "ok", result, text, lambda path: bd.write_scan_csv(scan, path))


def _backward(cfg):
    p = cfg.params
    f = build_map(p.get("map"), "map")
    if "p" not in p:
        raise ConfigError("p", "missing boundary point")
    w0 = parse_point(p["w0"], "w0") if "w0" in p else None
    n = p.get("n", 30)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError("n", "expected a positive integer")
    force = p.get("force", False)
    if not isinstance(force, bool):
        raise ConfigError("force", "expected true or false")
    orbit = bw.backward_orbit(f, parse_point(p["p"], "p"), w0=w0, n=n, force=force)
    result = {"p": orbit.p, "alpha": orbit.alpha, "s": orbit.s, "status": orbit.status,
              "length": len(orbit.points), "limit": orbit.limit, "k_region_tail": orbit.k_region_tail,
              "max_residual": float(np.max(orbit.residuals)) if len(orbit.residuals) else 0.0,
              "points": orbit.points}
    rows = [(k, v) for k, v in result.items() if k != "points"]
    return Outcome(cfg.kind, cfg.name, "ok", result, _table(rows),
                   lambda path: bw.write_orbit_csv(orbit, path))


def _time_grid(value, key="t_grid"):
    if not isinstance(value, list) or not value or not all(
            isinstance(t, (int, float)) and not isinstance(t, bool) and t >= 0 for t in value):
        raise ConfigError(key, "expected a non-empty list of non-negative times")
    return [float(t) for t in value]


def _semigroup(cfg):
    p = cfg.params
    s = build_semigroup(p.get("semigroup"), "semigroup")
    ts = _time_grid(p.get("t_grid"))
    if "z_samples" in p:
        zs = p["z_samples"]
        if not isinstance(zs, list) or not zs:
            raise ConfigError("z_samples", "expected a non-empty list of points")
        z = np.array([parse_point(v, "z_samples[%d]" % i) for i, v in enumerate(zs)])
    else:
        n = p.get("n_samples", 16)
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ConfigError("n_samples", "expected a positive integer")
        z = ball_samples(n, s.dim, max_radius=0.9, seed=0)
    rep = sf.check_semigroup_property(s, ts, z, threshold=cfg.tolerances.get("threshold"))
    result = {"semigroup_residual": rep.max_residual, "threshold": rep.threshold,
              "semigroup_property": rep.passed, "worst_times": list(rep.worst)}
    if "reference" in p:
        ref = build_semigroup(p["reference"], "reference")
        result["reference_deviation"] = sf.max_deviation(s, ref, ts, z)
    status = "ok" if rep.passed else "fail"
    if "p" in p:
        law = bd.dilation_law_fit(s, parse_point(p["p"], "p"), ts)
        result.update(lam=law.lam, law_residual=law.max_residual, alphas=list(law.alphas),
                      law_passed=law.passed)
        if not law.passed:
            status = "fail"
    return Outcome(cfg.kind, cfg.name, status, result, _table(list(result.items())))


def run_suite(suite_id, tol_scale=1.0, name=None):
    rep = suites.verify_suite(suite_id, tol_scale)
    out = Outcome("verify", name or rep.suite, "ok" if rep.passed else "fail", rep.to_dict(),
                  _suite_table(rep))
    return out


def _suite_table(rep):
    rows = [(c.name, c.anchor, c.measured, c.relation + " " + _fmt(c.threshold),
             "PASS" if c.passed else "FAIL") for c in rep.checks]
    head = "suite %s: %s  verdict %s\n\n" % (rep.suite, rep.title, rep.verdict)
    return head + _table(rows, ("check", "anchor", "measured", "threshold", "result"))


def _verify(cfg, tol_scale):
    p = cfg.params
    if "suite" in p:
        extra = set(p) - {"suite"}
        if extra:
            raise ConfigError(sorted(extra)[0], "not used together with 'suite'")
        if p["suite"] not in suites.SUITES:
            raise ConfigError("suite", "expected one of %s" % ", ".join(suites.SUITES))
        return run_suite(p["suite"], tol_scale, cfg.name)
    s = build_semigroup(p.get("semigroup"), "semigroup")
    if "p" not in p or "t0" not in p:
        raise ConfigError("p" if "p" not in p else "t0", "missing for a common fixed point check")
    t0 = p["t0"]
    if isinstance(t0, bool) or not isinstance(t0, (int, float)) or not t0 > 0:
        raise ConfigError("t0", "expected a positive time")
    n = p.get("n", 20)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError("n", "expected a positive integer")
    rep = bw.common_brfp_verify(s, parse_point(p["p"], "p"), float(t0), _time_grid(p.get("t_grid")), n=n)
    result = rep.to_dict()
    status = {"PASS": "ok", "FAIL": "fail", "HYPOTHESIS_VIOLATED": "hypothesis_violated"}[rep.verdict]
    rows = [(k, v) for k, v in result.items() if k not in ("per_t",)]
    return Outcome(cfg.kind, cfg.name, status, result, _table(rows))


_HANDLERS = {"geometry": _geometry, "classify": _classify, "scan": _scan,
             "backward": _backward, "semigroup": _semigroup}


def run_scenario(cfg: ScenarioConfig, tol_scale=None):
    """Run a validated scenario and return its ``Outcome``.

    Hypothesis violations and undetermined numerics become outcomes with
    exit code 2; configuration problems raise ``ConfigError``.
    """
    if tol_scale is None:
        tol_scale = float(cfg.tolerances.get("tol_scale", 1.0))
    start = time.perf_counter()
    try:
        if cfg.kind == "verify":
            out = _verify(cfg, tol_scale)
        else:
            out = _HANDLERS[cfg.kind](cfg)
    except ConfigError:
        raise
    except HypothesisViolation as exc:
        out = Outcome(cfg.kind, cfg.name, "hypothesis_violated", {"message": str(exc)},
                      "hypothesis violated: %s\n" % exc, diagnostics=getattr(exc, "diagnostics", {}))
    except Undetermined as exc:
        out = Outcome(cfg.kind, cfg.name, "undetermined", {"message": str(exc)},
                      "undetermined: %s\n" % exc, diagnostics=getattr(exc, "diagnostics", {}))
    out.runtime = time.perf_counter() - start
    return out


def write_outputs(out, directory, csv_name=None):
    """Write report.json, report.txt, timing.json and the optional CSV."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "report.json", "w") as fh:
        json.dump(out.report(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(d / "report.txt", "w") as fh:
        fh.write("%s (%s): %s, exit %d\n\n" % (out.name, out.kind, out.status, out.exit_code))
        fh.write(out.table)
    with open(d / "timing.json", "w") as fh:
        json.dump({"runtime_seconds": out.runtime, "finished_unix": time.time()}, fh, indent=2)
        fh.write("\n")
    written = [d / "report.json", d / "report.txt", d / "timing.json"]
    if csv_name and out.csv_writer is not None:
        out.csv_writer(d / csv_name)
        written.append(d / csv_name)
    return written


def _parser():
    ap = argparse.ArgumentParser(prog="kobdyn", description="Run a holomorphic dynamics scenario or suite.")
    ap.add_argument("scenario", nargs="?", help="JSON scenario file")
    ap.add_argument("--out", help="output directory (default: scenario 'output.dir' or %s)" % DEFAULT_OUT)
    ap.add_argument("--suite", help="run a verification suite T1..T9")
    ap.add_argument("--tol-scale", type=float, default=None, help="scale suite tolerances by X > 0")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.scenario is None and args.suite is None:
        _parser().print_usage(sys.stderr)
        print("kobdyn: give a scenario file or --suite", file=sys.stderr)
        return EXIT_ERROR
    if args.tol_scale is not None and not args.tol_scale > 0:
        print("kobdyn: --tol-scale must be positive", file=sys.stderr)
        return EXIT_ERROR
    csv_name = None
    out_dir = args.out
    try:
        if args.scenario is not None:
            cfg = load_config(args.scenario)
            if args.suite is not None:
                if cfg.kind != "verify":
                    raise ConfigError("kind", "--suite needs a verify scenario")
                params = {"suite": args.suite.upper()}
                cfg = ScenarioConfig(cfg.kind, cfg.name, params, cfg.tolerances, cfg.output, cfg.source)
            out_dir = out_dir or cfg.output.get("dir")
            csv_opt = cfg.output.get("csv")
            if csv_opt:
                csv_name = csv_opt if isinstance(csv_opt, str) else "%s.csv" % cfg.kind
            out = run_scenario(cfg, args.tol_scale)
        else:
            sid = args.suite.upper()
            if sid not in suites.SUITES:
                raise ConfigError("--suite", "expected one of %s" % ", ".join(suites.SUITES))
            start = time.perf_counter()
            out = run_suite(sid, 1.0 if args.tol_scale is None else args.tol_scale)
            out.runtime = time.perf_counter() - start
    except ConfigError as exc:
        print("kobdyn: configuration error at %s" % exc, file=sys.stderr)
        return EXIT_ERROR
    except (OSError, KobdynError, ValueError) as exc:
        print("kobdyn: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_ERROR
    write_outputs(out, out_dir or DEFAULT_OUT, csv_name)
    sys.stdout.write("%s (%s): %s\n" % (out.name, out.kind, out.status))
    if out.status != "ok":
        sys.stderr.write(out.table if out.status == "fail" else "%s\n" % out.result.get("message", ""))
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
