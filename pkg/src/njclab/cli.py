"""Command-line front end: ``njclab {audit,estimate,product,reproduce}``.

Machine output goes to ``--out`` (or stdout); diagnostics go to stderr.
Exit codes: 0 success, 1 mismatch or estimation failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from njclab import product, qspace, zoo
from njclab.core import ContractViolation, as_order
from njclab.estimator import EstimationFailed, SearchConfig, estimate
from njclab.properties import DEFAULT_SAMPLES, audit, normability_verdict
from njclab.reproduce import fmt, reproduce_rows, rows_to_csv, rows_to_json

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG = 0, 1, 2
SCHEMA = "njc-lab/1"

NAMED_BUDGETS = {
    "default": (32, 4096, 200),
    "quick": (4, 1024, 100),
    "tiny": (1, 512, 20),
}

CONFIG_KEYS = {"metric", "sigma", "seed", "budget", "out", "format", "basis_file", "dim", "components", "psi", "samples", "product"}


class ConfigError(Exception):
    """Invalid configuration; carries a field-level message."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def parse_sigmas(text) -> list[float]:
    if isinstance(text, (int, float)):
        items = [text]
    elif isinstance(text, list):
        items = text
    else:
        items = [t for t in str(text).split(",") if t.strip()]
    if not items:
        raise ConfigError("sigma", "at least one order is required")
    out = []
    for t in items:
        try:
            out.append(as_order(zoo.parse_number(str(t))).sigma)
        except (ValueError, ContractViolation) as exc:
            raise ConfigError("sigma", f"invalid order {t!r}: {exc}") from exc
    return out


def parse_budget(text, seed: int) -> SearchConfig:
    if text is None:
        text = "default"
    text = str(text).strip()
    if text in NAMED_BUDGETS:
        r, s, t = NAMED_BUDGETS[text]
    else:
        parts = text.lower().split("x")
        try:
            r, s, t = (int(p) for p in parts)
        except ValueError as exc:
            raise ConfigError("budget", f"expected RxSxT or one of {sorted(NAMED_BUDGETS)}, got {text!r}") from exc
    try:
        return SearchConfig(seed=seed, restarts=r, samples_per_restart=s, refine_steps=t)
    except ContractViolation as exc:
        raise ConfigError("budget", str(exc)) from exc


def build_psi(text: str, n: int):
    if not text:
        raise ConfigError("psi", "required for product metrics")
    kind, _, val = str(text).partition(":")
    try:
        if kind == "p":
            return product.make_psi_p(n, zoo.parse_number(val))
        if kind == "custom":
            return product.make_custom_psi(val, n)
    except (ValueError, ContractViolation) as exc:
        raise ConfigError("psi", str(exc)) from exc
    raise ConfigError("psi", f"expected 'p:<value>' or 'custom:<name>', got {text!r}")


def split_components(text) -> list[str]:
    if isinstance(text, list):
        return [str(t) for t in text]
    # commas inside parentheses belong to a component spec
    out, depth, cur = [], 0, ""
    for ch in str(text):
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    out.append(cur)
    return [c.strip() for c in out if c.strip()]


def build_space(cfg: dict):
    dim = cfg.get("dim") or 2
    comps = cfg.get("components")
    metric = cfg.get("metric")
    try:
        if comps:
            specs = split_components(comps)
            if len(specs) < 2:
                raise ConfigError("components", "a product needs at least two components")
            spaces = [zoo.make_space(s, 1) for s in specs] if cfg.get("dim") is None else [zoo.make_space(s, dim) for s in specs]
            return product.make_product(spaces, build_psi(cfg.get("psi"), len(spaces)))
        if not metric:
            raise ConfigError("metric", "a metric spec is required")
        if metric in ("hamel-additive", "rational-euclidean"):
            basis = qspace.load_basis(cfg["basis_file"]) if cfg.get("basis_file") else None
            if metric == "hamel-additive":
                return qspace.make_hamel_additive_metric(basis)
            return qspace.make_rational_euclidean_metric(basis)
        return zoo.make_space(metric, dim)
    except ContractViolation as exc:
        field = "components" if comps else ("basis_file" if cfg.get("basis_file") else "metric")
        raise ConfigError(field, str(exc)) from exc
    except OSError as exc:
        raise ConfigError("basis_file", str(exc)) from exc


def merge_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise ConfigError("config", f"unknown keys {sorted(unknown)}")
        if isinstance(data.get("product"), dict):
            data.setdefault("components", data["product"].get("components"))
            data.setdefault("psi", data["product"].get("psi"))
        cfg.update(data)
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    cfg.setdefault("seed", 0)
    cfg.setdefault("format", "json")
    if cfg["format"] not in ("json", "csv"):
        raise ConfigError("format", f"expected json or csv, got {cfg['format']!r}")
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed", "must be a nonnegative integer")
    return cfg


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, float) and math.isinf(o):
        return None
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "tolist"):
        return o.tolist()
    return str(o)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def cmd_audit(cfg: dict) -> int:
    space = build_space(cfg)
    samples = int(cfg.get("samples") or DEFAULT_SAMPLES)
    report = audit(space, samples=samples, seed=cfg["seed"])
    verdict = normability_verdict(space, report)
    expected = getattr(space, "expected_properties", None)
    mismatches = []
    if expected:
        mismatches = [k for k, v in expected.items() if k in report.checks and report.passed(k) != v]
    for k in mismatches:
        print(f"profile mismatch: {k} expected {'PASS' if expected[k] else 'FAIL'}, got {report.status(k).value}",
              file=sys.stderr)
    if cfg["format"] == "csv":
        rows = [(k, v.status.value, v.margin, v.samples) for k, v in report.checks.items()]
        rows.append(("normability", verdict.status.value, "", ""))
        emit(_csv(("property", "status", "margin", "samples"), rows), cfg.get("out"))
    else:
        doc = report.to_json(space)
        doc["normability"] = verdict.to_json(space)
        doc["expected_profile_match"] = not mismatches if expected else None
        emit(_dump(doc), cfg.get("out"))
    return EXIT_MISMATCH if mismatches else EXIT_OK


def _estimates(space, sigmas, scfg):
    out, failed = [], False
    for s in sigmas:
        try:
            out.append(estimate(space, s, scfg))
        except EstimationFailed as exc:
            print(f"estimation failed at sigma={s:g}: {exc}", file=sys.stderr)
            failed = True
    return out, failed


def _closed_form_mismatch(e) -> bool:
    return e.closed_form is not None and abs(e.value - e.closed_form["value"]) > 1e-2


def _estimate_output(space, ests, fmt_name):
    if fmt_name == "csv":
        rows = []
        for e in ests:
            cf = e.closed_form["value"] if e.closed_form else ""
            diff = abs(e.value - cf) if e.closed_form else ""
            rows.append((space.name, e.sigma.sigma, e.value, cf, diff, e.bracket.lo, e.bracket.hi,
                         json.dumps(space.to_json(e.witness.x), sort_keys=True),
                         json.dumps(space.to_json(e.witness.y), sort_keys=True)))
        return _csv(("space", "sigma", "value", "closed_form", "abs_diff", "bracket_lo", "bracket_hi",
                     "witness_x", "witness_y"), rows)
    return _dump({"schema": SCHEMA, "space": space.name, "estimates": [e.to_json(space) for e in ests]})


def cmd_estimate(cfg: dict) -> int:
    space = build_space(cfg)
    sigmas = parse_sigmas(cfg.get("sigma", "2"))
    scfg = parse_budget(cfg.get("budget"), cfg["seed"])
    ests, failed = _estimates(space, sigmas, scfg)
    for e in ests:
        if _closed_form_mismatch(e):
            print(f"sigma={e.sigma.sigma:g}: estimate {e.value:.12g} differs from closed form "
                  f"{e.closed_form['value']:.12g}", file=sys.stderr)
    emit(_estimate_output(space, ests, cfg["format"]), cfg.get("out"))
    return EXIT_MISMATCH if failed or any(_closed_form_mismatch(e) for e in ests) else EXIT_OK


def cmd_product(cfg: dict) -> int:
    if not cfg.get("components"):
        raise ConfigError("components", "required for the product command")
    space = build_space(cfg)
    sigmas = parse_sigmas(cfg.get("sigma", "2"))
    scfg = parse_budget(cfg.get("budget"), cfg["seed"])
    ests, failed = _estimates(space, sigmas, scfg)
    if cfg["format"] == "csv":
        emit(_estimate_output(space, ests, "csv"), cfg.get("out"))
    else:
        doc = {
            "schema": SCHEMA,
            "space": space.name,
            "psi": space.psi.name,
            "membership": space.psi.membership.to_json(),
            "estimates": [e.to_json(space) for e in ests],
        }
        emit(_dump(doc), cfg.get("out"))
    return EXIT_MISMATCH if failed or any(_closed_form_mismatch(e) for e in ests) else EXIT_OK


def cmd_reproduce(cfg: dict) -> int:
    scfg = parse_budget(cfg.get("budget"), cfg["seed"])
    rows = reproduce_rows(config=scfg)
    if cfg["format"] == "json":
        emit(_dump(rows_to_json(rows)), cfg.get("out"))
    else:
        emit(rows_to_csv(rows), cfg.get("out"))
    bad = [r for r in rows if not r.ok]
    for r in bad:
        print(f"row out of tolerance: {r.space} sigma={r.sigma:g} ref={r.reference_value:.12g} "
              f"estimated={r.estimated:.12g}", file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


COMMANDS = {"audit": cmd_audit, "estimate": cmd_estimate, "product": cmd_product, "reproduce": cmd_reproduce}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="njclab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--metric", help='metric spec, e.g. "truncated", "norm(3)", "frac-power(1/5)", "hamel-additive"')
    common.add_argument("--dim", type=int, help="dimension of zoo metrics (default 2)")
    common.add_argument("--sigma", help="comma-separated orders, e.g. 1,1.5,2")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--budget", help="RxSxT (restarts x samples x refine steps) or default/quick/tiny")
    common.add_argument("--samples", type=int, help="audit samples per property")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    common.add_argument("--basis-file", dest="basis_file", help="JSON basis declaration for rational spaces")
    common.add_argument("--components", help='product components, e.g. "norm(2),norm(2)"')
    common.add_argument("--psi", help='simplex function, "p:<value>" or "custom:<name>"')
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("audit", parents=[common], help="audit structural properties")
    sub.add_parser("estimate", parents=[common], help="estimate the constant for each order")
    sub.add_parser("product", parents=[common], help="build a product metric and estimate its constant")
    sub.add_parser("reproduce", parents=[common], help="reproduce the table of closed-form constants")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = merge_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
