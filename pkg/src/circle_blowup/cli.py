"""Command line front end: ``check``, ``scan``, ``reduce`` and ``trace``.

A scenario is a JSON file holding the Fourier coefficients of ``h`` and ``k``
plus run settings. Reports go to ``--out`` (default: the config's
``output_dir``, else the working directory) and JSON reports are echoed on
stdout unless ``--quiet``.

Exit codes: 0 success, 1 usage or parse error, 2 hypothesis or branch
violation, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ansatz, hypothesis, reduction, solver
from .conformal import MobiusParam
from .errors import (
    BlowupError,
    Degenerate,
    HypothesisH1Violated,
    NonpositiveCurvature,
    NotStationary,
    ResolutionTooCoarse,
    Tangential,
    WrongBranch,
)
from .rates import loglog_slope
from .spectral import CircleFunction, dirichlet_norm, lp_norm, required_grid

log = logging.getLogger("circle_blowup")

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_SOLVER = 0, 1, 2, 3

_HYPOTHESIS_ERRORS = (NotStationary, HypothesisH1Violated, NonpositiveCurvature, Degenerate, Tangential, WrongBranch)

SCAN_COLUMNS = ["delta", "eta", "eps", "tau", "norm_W_L2", "norm_E_L32", "norm_phi", "c0", "c1", "c2"]
TRACE_COLUMNS = ["epsilon", "delta_fit", "eta_fit", "tau_fit", "max_u", "mass", "iters", "cond"]

DEFAULT_TOLERANCES = {"hypothesis": hypothesis.TOL, "newton": 1e-10, "projected": 1e-12}


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    h_cos: list
    h_sin: list = field(default_factory=list)
    k_cos: list = field(default_factory=list)
    k_sin: list = field(default_factory=list)
    n_grid: int = 2048
    eps_list: list = field(default_factory=list)
    delta_scan: tuple = (1e-3, 1e-1, 6)
    tolerances: dict = field(default_factory=dict)
    output_dir: str | None = None
    scan_eta: float = 0.0
    scan_eps: float = 0.0
    scan_tau: float = 0.0

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "h_cos" not in raw:
            raise ConfigError("h_cos is required")
        try:
            cfg = cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    def validate(self):
        n = self.n_grid
        if isinstance(n, bool) or not isinstance(n, int) or n < 64 or n & (n - 1):
            raise ConfigError(f"n_grid must be a power of two >= 64, got {n!r}")
        for name in ("h_cos", "h_sin", "k_cos", "k_sin", "eps_list"):
            setattr(self, name, _real_list(getattr(self, name), name))
        if not self.h_cos:
            raise ConfigError("h_cos must hold at least the constant term")
        for name in ("h_cos", "h_sin", "k_cos", "k_sin"):
            if len(getattr(self, name)) > n // 8:
                raise ConfigError(f"{name} has more than n_grid/8 = {n // 8} coefficients")
        ds = self.delta_scan
        if not isinstance(ds, (list, tuple)) or len(ds) != 3:
            raise ConfigError("delta_scan must be [min, max, count]")
        lo, hi, count = ds
        if not (isinstance(count, int) and count >= 1) or not (0 < _real(lo, "delta_scan") <= _real(hi, "delta_scan") <= 1):
            raise ConfigError("delta_scan needs 0 < min <= max <= 1 and an integer count >= 1")
        self.delta_scan = (float(lo), float(hi), int(count))
        if not isinstance(self.tolerances, dict):
            raise ConfigError("tolerances must be an object")
        for key, val in self.tolerances.items():
            if key not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {key!r}")
            if not _real(val, key) > 0:
                raise ConfigError(f"tolerance {key} must be positive")
        for name in ("scan_eta", "scan_eps", "scan_tau"):
            setattr(self, name, _real(getattr(self, name), name))

    def tol(self, name):
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def curvatures(self, n_grid=None):
        n_grid = self.n_grid if n_grid is None else n_grid
        h = CircleFunction.from_trig(cos=self.h_cos, sin=self.h_sin, n_grid=n_grid)
        k = CircleFunction.from_trig(cos=self.k_cos or [0.0], sin=self.k_sin, n_grid=n_grid)
        return h, k

    def scan_deltas(self):
        lo, hi, count = self.delta_scan
        return np.geomspace(lo, hi, count) if count > 1 else np.array([lo])


def _real(x, name):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise ConfigError(f"{name} must hold finite numbers")
    return float(x)


def _real_list(xs, name):
    if not isinstance(xs, (list, tuple)):
        raise ConfigError(f"{name} must be a list")
    return [_real(x, name) for x in xs]


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return ScenarioConfig.from_dict(raw)


# -- output -----------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _fmt(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.17g" % (float(x) + 0.0)


def write_json(path: Path, payload, echo=True):
    text = json.dumps(_clean(payload), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")
    if echo:
        print(text)


def write_csv(path: Path, columns, rows):
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


# -- commands ---------------------------------------------------------------


def cmd_check(cfg: ScenarioConfig, out: Path, echo=True):
    h, k = cfg.curvatures()
    rep = hypothesis.evaluate(h, k, tol=cfg.tol("hypothesis"))
    payload = rep.to_dict()
    payload["failed"] = rep.failed()
    write_json(out / "check.json", payload, echo)
    if not rep.all_satisfied:
        print("hypothesis failed: " + ", ".join(rep.failed()), file=sys.stderr)
        return EXIT_HYPOTHESIS, rep
    return EXIT_OK, rep


def _require_hypotheses(cfg, h, k):
    rep = hypothesis.evaluate(h, k, tol=cfg.tol("hypothesis"))
    if not rep.all_satisfied:
        print("hypothesis failed: " + ", ".join(rep.failed()), file=sys.stderr)
        return None
    return rep


def cmd_reduce(cfg: ScenarioConfig, out: Path, echo=True):
    h, k = cfg.curvatures()
    rep = _require_hypotheses(cfg, h, k)
    if rep is None:
        return EXIT_HYPOTHESIS, None
    rs = reduction.assemble_reduced(rep)
    d = rs.to_dict()
    payload = {key: d[key] for key in ("A", "B", "det_A", "cond_value", "d0", "s0", "branch")}
    write_json(out / "reduce.json", payload, echo)
    return EXIT_OK, rs


def scan_point(cfg: ScenarioConfig, delta):
    """One row of the scan: ansatz norms and the projected solve at ``delta``."""
    n_grid = max(cfg.n_grid, required_grid(delta))
    h, k = cfg.curvatures(n_grid)
    p = MobiusParam(delta, cfg.scan_eta)
    try:
        b = ansatz.build_ansatz(h, k, p, cfg.scan_tau, cfg.scan_eps, n_grid=n_grid)
        E = ansatz.error_term(b)
        proj = solver.solve_projected(b, tol=cfg.tol("projected"))
    except BlowupError as exc:
        exc.context.setdefault("delta", delta)
        raise
    return {
        "delta": float(delta),
        "eta": cfg.scan_eta,
        "eps": cfg.scan_eps,
        "tau": cfg.scan_tau,
        "norm_W_L2": lp_norm(b.W, 2).value,
        "norm_E_L32": lp_norm(E, 1.5).value,
        "norm_phi": dirichlet_norm(proj.phi),
        "c0": proj.c0,
        "c1": proj.c1,
        "c2": proj.c2,
    }


def cmd_scan(cfg: ScenarioConfig, out: Path, echo=True):
    deltas = cfg.scan_deltas()
    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(lambda d: scan_point(cfg, d), deltas))
    write_csv(out / "scan.csv", SCAN_COLUMNS, rows)
    slopes = {c: loglog_slope(deltas, [r[c] for r in rows]) for c in ("norm_W_L2", "norm_E_L32", "norm_phi")}
    payload = {"eta": cfg.scan_eta, "eps": cfg.scan_eps, "tau": cfg.scan_tau, "n_points": len(rows), "slopes": slopes}
    write_json(out / "scan.json", payload, echo)
    return EXIT_OK, rows


def cmd_trace(cfg: ScenarioConfig, out: Path, echo=True):
    if not cfg.eps_list:
        raise ConfigError("eps_list must be nonempty for trace")
    h, k = cfg.curvatures()
    rep = _require_hypotheses(cfg, h, k)
    if rep is None:
        return EXIT_HYPOTHESIS, None
    rs = reduction.assemble_reduced(rep)
    tr = solver.continuation(h, k, rs, rep, cfg.eps_list, n_grid=cfg.n_grid, tol=cfg.tol("newton"))
    rows = [rec.row() for rec in tr.records]
    write_csv(out / "trace.csv", TRACE_COLUMNS, rows)
    mags = np.abs([r["epsilon"] for r in rows])
    payload = {
        "rate_d": tr.rate_d,
        "rate_s": tr.rate_s,
        "d0": rs.d0,
        "s0": rs.s0,
        "branch": rs.branch,
        "max_u_loglog_slope": -loglog_slope(mags, np.exp([r["max_u"] for r in rows])),
        "n_records": len(rows),
        "bisected_steps": len(tr.warm_starts),
    }
    write_json(out / "trace.json", payload, echo)
    return EXIT_OK, tr


COMMANDS = {"check": cmd_check, "scan": cmd_scan, "reduce": cmd_reduce, "trace": cmd_trace}


def build_parser():
    ap = argparse.ArgumentParser(prog="circle-blowup", description="Blow-up analysis of the half-Laplacian Liouville equation on the circle.")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "check": "evaluate the standing hypotheses at theta = 0",
        "scan": "ansatz and projected-problem norms over a delta scan",
        "reduce": "assemble and solve the 2x2 reduced system",
        "trace": "continue the blow-up family through eps_list",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=True, metavar="PATH", help="scenario JSON file")
        sp.add_argument("--out", metavar="DIR", help="output directory")
        sp.add_argument("--grid", type=int, metavar="N", help="override n_grid")
        sp.add_argument("--quiet", action="store_true", help="do not echo reports on stdout")
    return ap


def _report_error(out, exc, echo):
    payload = {"error": exc.code, "message": str(exc), "context": {k: str(v) for k, v in exc.context.items()}}
    if out is not None:
        write_json(out / "error.json", payload, echo=False)
    print(str(exc), file=sys.stderr)


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    out = None
    try:
        cfg = load_config(args.config)
        if args.grid is not None:
            cfg.n_grid = args.grid
            cfg.validate()
        out = Path(args.out or cfg.output_dir or ".")
        out.mkdir(parents=True, exist_ok=True)
        code, _ = COMMANDS[args.command](cfg, out, echo=not args.quiet)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResolutionTooCoarse as exc:
        _report_error(out, exc, not args.quiet)
        return EXIT_USAGE
    except _HYPOTHESIS_ERRORS as exc:
        _report_error(out, exc, not args.quiet)
        return EXIT_HYPOTHESIS
    except BlowupError as exc:
        _report_error(out, exc, not args.quiet)
        return EXIT_SOLVER
    except ValueError as exc:
        # e.g. an eps so large that the predicted delta exceeds 1
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
