"""Command-line front end: ``tubeforms <command> [options]``.

Exit codes: 0 when every checked property holds, 1 when one fails (or a
computation does not converge), 2 for usage and domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields

from . import bounds, counterexample, verify
from .errors import ConvergenceError, DomainError, ResolutionError
from .harmonics import HarmonicField, QuadratureSpec, eval_df, eval_f
from .hypergeom import ConjugateParams, endpoint_value, f21_conj, f21_deriv_factor
from .tubegeom import MARGULIS_EPS, TubeParams

FORMATS = ("table", "csv", "json")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-8
    n_r: int = 64
    n_theta: int = 64
    n_z: int = 64
    margulis_eps: float = MARGULIS_EPS
    output_format: str = "table"

    def __post_init__(self) -> None:
        if not (0.0 < self.tolerance <= 1e-2):
            raise DomainError("tolerance must lie in (0, 1e-2]")
        if min(self.n_r, self.n_theta, self.n_z) < 8:
            raise DomainError("quadrature counts must be >= 8")
        if not self.margulis_eps > 0:
            raise DomainError("margulis_eps must be positive")
        if self.output_format not in FORMATS:
            raise DomainError(f"output format must be one of {FORMATS}")

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.n_r, self.n_theta, self.n_z)


# ---------------------------------------------------------------------------
# formatting


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) or hasattr(x, "dtype"):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.11e}"
    return str(x)


def _json_value(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) or hasattr(x, "dtype"):
        x = float(x)
        return fmt(x) if math.isfinite(x) else "null"
    return json.dumps(str(x))


def render(records: list[dict], style: str) -> str:
    if not records:
        return "[]\n" if style == "json" else ""
    keys: list[str] = []
    for rec in records:
        keys.extend(k for k in rec if k not in keys)
    if style == "json":
        objs = ["{" + ", ".join(f"{json.dumps(k)}: {_json_value(rec[k])}" for k in rec) + "}" for rec in records]
        return "[\n  " + ",\n  ".join(objs) + "\n]\n"
    if style == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for rec in records:
            w.writerow([fmt(rec.get(k)) for k in keys])
        return buf.getvalue()
    cells = [[fmt(rec.get(k)) for k in keys] for rec in records]
    widths = [max(len(k), *(len(row[i]) for row in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells)
    return "\n".join(lines) + "\n"


def _emit(records: list[dict], cfg: RunConfig, notes: tuple[str, ...] = ()) -> None:
    sys.stdout.write(render(records, cfg.output_format))
    stream = sys.stdout if cfg.output_format == "table" else sys.stderr
    for n in notes:
        print(f"note: {n}", file=stream)


# ---------------------------------------------------------------------------
# commands


def cmd_eval2f1(a, cfg: RunConfig) -> int:
    tol = a.tol if a.tol is not None else min(cfg.tolerance, 1e-3)
    if a.u == 1.0 and not a.deriv:
        ev = endpoint_value(ConjugateParams(a.k, a.d))
        _emit([{"value": ev.value, "log_value": ev.log_value, "terms_used": 0,
                "truncation_estimate": 0.0, "method": "endpoint"}], cfg)
        return 0
    if a.deriv:
        res = f21_deriv_factor(a.d, a.u, tol, a.method)
    else:
        res = f21_conj(ConjugateParams(a.k, a.d), a.u, tol, a.method)
    _emit([{"value": res.value, "log_value": res.log_value, "terms_used": res.terms_used,
            "truncation_estimate": res.truncation_estimate, "method": res.method}], cfg)
    return 0


def _check_record(c: verify.Check) -> dict:
    rec = {"check": c.name, "passed": c.passed, "worst": c.worst, "threshold": c.threshold}
    where = "; ".join(f"{k}={fmt(v) if not isinstance(v, int) else v}" for k, v in c.where.items())
    rec["where"] = where
    return rec


def cmd_verify(a, cfg: RunConfig) -> int:
    q = cfg.quadrature
    names = list(verify.SUITES) if a.suite == "all" else [a.suite]
    checks: list[verify.Check] = []
    for name in names:
        if name == "ode":
            kw = {}
            if a.lam is not None:
                kw["lambdas"] = (a.lam,)
            if a.theta0 is not None:
                kw["thetas"] = (a.theta0,)
            if a.k is not None:
                kw["ks"] = (a.k,)
            if a.m is not None:
                kw["ms"] = (a.m,)
            if a.R is not None:
                kw["R"] = a.R
            checks += verify.ode_suite(**kw)
        elif name in ("flux", "orthogonality"):
            checks += verify.SUITES[name](q=q, seed=a.seed)
        elif name == "laplacian":
            checks += verify.laplacian_suite(seed=a.seed)
        else:
            checks += verify.SUITES[name]()
    _emit([_check_record(c) for c in checks], cfg)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        print(f"FAIL {c.name}: worst {fmt(c.worst)} > {fmt(c.threshold)} at {_check_record(c)['where']}",
              file=sys.stderr)
    return 1 if failed else 0


def cmd_counterexample(a, cfg: RunConfig) -> int:
    rows = counterexample.linf_l2_growth(a.m, a.V, a.steps, a.lam0, cfg.quadrature)
    recs = []
    for row in rows:
        d = row.as_dict()
        recs.append({k: d[k] for k in counterexample.CSV_FIELDS} if not a.full else d)
    _emit(recs, cfg)
    if len(rows) < 2:
        return 0
    ok = counterexample.tail_growth_confirmed(rows)
    if not ok:
        print("tail ratios are not strictly increasing", file=sys.stderr)
    return 0 if ok else 1


def _row_records(rep: bounds.Report) -> list[dict]:
    return [r.as_dict() for r in rep.rows]


def cmd_bounds(a, cfg: RunConfig) -> int:
    notes: tuple[str, ...] = ()
    sub = a.bounds_cmd
    if sub == "thurston":
        inp = bounds.ThurstonInput(a.lam, a.kappa)
        b = bounds.thurston_lower_bound(inp, not a.rounded, cfg.margulis_eps)
        row = bounds.compare("exceeds_simplified", b.simplified, b.value, "0.2 pi |kappa|/sqrt(lambda) < bound")
        rec = row.as_dict()
        rec.update(value=b.value, simplified=b.simplified, valid_regime=b.valid_regime,
                   vacuous=b.vacuous, exact_constants=b.exact_constants)
        recs = [rec]
        if not b.valid_regime:
            notes = ("lambda exceeds 58e-6: the simplified form is not claimed there",)
        ok = row.satisfied or not b.valid_regime
    elif sub == "sandwich":
        lo, hi = bounds.bd_sandwich(a.vol, a.inj, a.thurston)
        rows = [bounds.compare("lower_le_upper", lo, hi, "pi/sqrt(vol) Th <= 10 pi/sqrt(inj) Th", strict=False)]
        if a.harmonic is not None:
            rows += [
                bounds.compare("lower_le_harmonic", lo, a.harmonic, "pi/sqrt(vol) Th <= ||a||_L2", strict=False),
                bounds.compare("harmonic_le_upper", a.harmonic, hi, "||a||_L2 <= 10 pi/sqrt(inj) Th", strict=False),
            ]
        recs = [r.as_dict() for r in rows]
        ok = all(r.satisfied for r in rows)
    elif sub == "ratio":
        v = bounds.main_ratio_bound(a.c, a.R)
        from .tubegeom import log_cosh

        lc = log_cosh(a.R)
        norm = v / math.sqrt(lc) if lc > 0 else math.inf
        recs = [{"c": a.c, "R": a.R, "bound": v, "log_cosh_R": lc, "bound_over_sqrt_log_cosh": norm,
                 "relative_gap_to_8": abs(norm - 8.0) / 8.0}]
        ok = True
    elif sub == "entropy":
        rep = bounds.entropy_relations(bounds.FiberedInvariants(a.K, a.ent, a.vol, a.thurston, a.genus))
        recs, notes, ok = _row_records(rep), rep.notes, rep.consistent
    elif sub == "dehn":
        g = bounds.dehn_example_growth(a.n, a.c)
        recs = [{"n": a.n, "c": a.c, "lambda_n": g.lambda_n, "lower_bound": g.lower_bound,
                 "valid_regime": g.valid_regime}]
        notes = (g.note,)
        ok = True
    elif sub == "volume":
        rep = bounds.product_volume_comparison(a.genus, a.K, a.vol)
        recs, notes, ok = _row_records(rep), rep.notes, rep.consistent
    elif sub == "covering":
        recs = []
        for n in range(1, a.n + 1):
            s = bounds.covering_scaling(a.lip * n, n, a.ent / n)
            recs.append({"n": n, "lip_n": s.lip_n, "lip_over_n": s.lip_over_n, "product": s.product})
        ok = True
    else:  # pragma: no cover - argparse enforces the choice
        raise UsageError(sub)
    _emit(recs, cfg, notes)
    return 0 if ok else 1


def cmd_diskflux(a, cfg: RunConfig) -> int:
    tube = TubeParams(a.lam, 0.0, a.R)
    v = counterexample.disk_flux_violation(a.c, tube, a.max_modes, a.slack, cfg.quadrature)
    rec = {"found": v.found, "strategy": v.strategy, "modes": len(v.coefficients), "lhs": v.lhs, "rhs": v.rhs,
           "ratio": v.ratio, "best_ratio": v.best_ratio, "optimal_ratio": v.optimal_ratio,
           "verified_ratio": v.verified_ratio}
    _emit([rec], cfg)
    return 0 if v.found else 1


def cmd_field(a, cfg: RunConfig) -> int:
    with open(a.file, encoding="utf-8") as fh:
        fld = HarmonicField.from_json(fh.read())
    p = (a.r, a.theta, a.z)
    df = eval_df(fld, p)
    _emit([{"r": a.r, "theta": a.theta, "z": a.z, "f": eval_f(fld, p), "f_r": df.f_r,
            "f_theta": df.f_theta, "f_z": df.f_z, "norm": df.norm}], cfg)
    return 0


# ---------------------------------------------------------------------------
# parser


def _pos_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values")
    common.add_argument("--format", dest="output_format", choices=FORMATS, default=None)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--n-r", dest="n_r", type=int, default=None)
    common.add_argument("--n-theta", dest="n_theta", type=int, default=None)
    common.add_argument("--n-z", dest="n_z", type=int, default=None)
    common.add_argument("--margulis-eps", dest="margulis_eps", type=float, default=None)

    ap = argparse.ArgumentParser(prog="tubeforms", description="Harmonic forms on hyperbolic tubes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval2f1", parents=[common], help="evaluate F_k(d; u) or the derivative factor G(d; u)")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--u", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--method", choices=("auto", "series", "connection"), default=None)
    p.add_argument("--deriv", action="store_true", default=None, help="evaluate G instead of F_k")

    p = sub.add_parser("verify", parents=[common], help="run an identity sweep")
    p.add_argument("--suite", choices=(*verify.SUITES, "all"), default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--theta0", type=float, default=None)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("counterexample", parents=[common], help="growth table of the L-infinity/L2 ratio")
    p.add_argument("--m", type=_pos_int, default=None)
    p.add_argument("--V", type=float, default=None)
    p.add_argument("--steps", type=_pos_int, default=None)
    p.add_argument("--lam0", type=float, default=None)
    p.add_argument("--full", action="store_true", default=None, help="add the log and bound columns")

    p = sub.add_parser("diskflux", parents=[common], help="search for a disk-flux witness")
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--max-modes", dest="max_modes", type=_pos_int, default=None)
    p.add_argument("--slack", type=float, default=None)

    p = sub.add_parser("field", parents=[common], help="evaluate a field stored as JSON at one point")
    p.add_argument("--file", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--z", type=float, required=True)

    p = sub.add_parser("bounds", help="closed-form inequality calculators")
    bsub = p.add_subparsers(dest="bounds_cmd", required=True)
    b = bsub.add_parser("thurston", parents=[common])
    b.add_argument("--lambda", dest="lam", type=float, required=True)
    b.add_argument("--kappa", type=int, required=True)
    b.add_argument("--rounded", action="store_true", default=None, help="use the rounded constant 0.676")
    b = bsub.add_parser("sandwich", parents=[common])
    b.add_argument("--vol", type=float, required=True)
    b.add_argument("--inj", type=float, required=True)
    b.add_argument("--thurston", type=float, required=True)
    b.add_argument("--harmonic", type=float, default=None)
    b = bsub.add_parser("ratio", parents=[common])
    b.add_argument("--c", type=float, required=True)
    b.add_argument("--R", type=float, required=True)
    b = bsub.add_parser("entropy", parents=[common])
    b.add_argument("--K", type=float, required=True)
    b.add_argument("--ent", type=float, required=True)
    b.add_argument("--vol", type=float, required=True)
    b.add_argument("--thurston", type=float, required=True)
    b.add_argument("--genus", type=int, required=True)
    b = bsub.add_parser("dehn", parents=[common])
    b.add_argument("--n", type=_pos_int, required=True)
    b.add_argument("--c", type=float, required=True)
    b = bsub.add_parser("volume", parents=[common])
    b.add_argument("--genus", type=int, required=True)
    b.add_argument("--K", type=float, required=True)
    b.add_argument("--vol", type=float, required=True)
    b = bsub.add_parser("covering", parents=[common])
    b.add_argument("--lip", type=float, required=True)
    b.add_argument("--ent", type=float, required=True)
    b.add_argument("--n", type=_pos_int, default=20)
    return ap


# defaults applied after the config file, per command
DEFAULTS = {
    "eval2f1": {"k": 0, "method": "auto", "deriv": False},
    "verify": {"suite": "all", "seed": verify.SEED},
    "counterexample": {"m": 1, "V": 10.0, "steps": 20, "lam0": 1.0, "full": False},
    "diskflux": {"c": 10.0, "lam": 0.05, "R": 5.0, "max_modes": 10, "slack": 0.05},
    "bounds": {"rounded": False},
    "field": {},
}
REQUIRED = {"eval2f1": ("d", "u")}
_CONFIG_FIELDS = {f.name for f in fields(RunConfig)}


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    if "format" in doc and "output_format" not in doc:
        doc["output_format"] = doc.pop("format")
    if "lambda" in doc and "lam" not in doc:
        doc["lam"] = doc.pop("lambda")
    return doc


def resolve(ns: argparse.Namespace) -> tuple[argparse.Namespace, RunConfig]:
    """Fill unset options: flags win over the config file, which wins over defaults."""
    conf = _load_config(ns.config)
    for key, val in conf.items():
        if getattr(ns, key, None) is None and hasattr(ns, key):
            setattr(ns, key, val)
    for key, val in DEFAULTS.get(ns.command, {}).items():
        if getattr(ns, key, None) is None:
            setattr(ns, key, val)
    for key in REQUIRED.get(ns.command, ()):
        if getattr(ns, key, None) is None:
            raise UsageError(f"--{key} is required")
    kw = {k: getattr(ns, k) for k in _CONFIG_FIELDS if getattr(ns, k, None) is not None}
    return ns, RunConfig(**kw)


COMMANDS = {
    "eval2f1": cmd_eval2f1,
    "verify": cmd_verify,
    "counterexample": cmd_counterexample,
    "bounds": cmd_bounds,
    "diskflux": cmd_diskflux,
    "field": cmd_field,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ns, cfg = resolve(ns)
        return COMMANDS[ns.command](ns, cfg)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
