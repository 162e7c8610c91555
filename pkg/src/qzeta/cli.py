"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error (including
parameters outside a function's domain), 3 domain or truncation error
raised while evaluating.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import classical, qeuler, zeta
from .characters import load_character
from .qcore import (
    DEFAULT_PREC,
    CertifiedValue,
    DomainError,
    QContext,
    QZetaError,
    TailPolicy,
    format_exact,
    parse_scalar,
    scalar_to_json,
)
from .verify import SUITES, VerificationReport, VerifyConfig, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

OBJECTS = ("number", "poly", "higher", "zeta", "lfun")
# declared parameter order per object; table rows are lexicographic in it
TABLE_PARAMS = {
    "number": ("n", "q", "u"),
    "poly": ("n", "x", "q", "u"),
    "higher": ("n", "r", "x", "q", "u"),
    "zeta": ("s", "x", "r", "q", "u"),
    "lfun": ("s", "q", "u"),
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing helpers


def _int(text: str, flag: str, minimum: int = 0) -> int:
    try:
        v = int(text)
    except ValueError:
        raise UsageError(f"--{flag} expects an integer >= {minimum}, got {text!r}") from None
    if v < minimum:
        raise UsageError(f"--{flag} expects an integer >= {minimum}, got {v}")
    return v


def _scalar(text: str, flag: str):
    try:
        return parse_scalar(text)
    except DomainError:
        raise UsageError(f"--{flag} expects a rational p/q, decimal or complex number, got {text!r}") from None


def parse_range(text: str, flag: str) -> list:
    """``a..b`` (inclusive integers) or a comma-separated list of scalars."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            a, b = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"--{flag} range must look like a..b with integers, got {text!r}") from None
        if b < a:
            raise UsageError(f"--{flag} range {text!r} is empty")
        return list(range(a, b + 1))
    return [_scalar(part, flag) for part in text.split(",") if part.strip()]


def _policy(args) -> TailPolicy | None:
    cap = args.max_terms if args.max_terms is not None else 10**6
    if args.terms is not None and args.tol is not None:
        raise UsageError("--terms and --tol are mutually exclusive")
    try:
        if args.terms is not None:
            return TailPolicy(fixed_terms=_int(args.terms, "terms"), term_cap=cap)
        if args.tol is not None:
            tol = _scalar(args.tol, "tol")
            if not isinstance(tol, Fraction) or tol <= 0:
                raise UsageError("--tol expects a positive number")
            return TailPolicy(target_bound=tol, term_cap=cap)
        if args.max_terms is not None:
            return TailPolicy(target_bound=TailPolicy.default(args.prec).target_bound, term_cap=cap)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return None


def _context(q, u, args) -> QContext:
    try:
        return QContext(q, u, mode=args.mode, precision_bits=args.prec)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _as_int(value: Any, flag: str, minimum: int = 0) -> int:
    if isinstance(value, Fraction) and value.denominator == 1 and value >= minimum:
        return int(value)
    if isinstance(value, int) and value >= minimum:
        return value
    raise UsageError(f"--{flag} expects an integer >= {minimum}, got {value}")


# ---------------------------------------------------------------------------
# evaluation


def _exact_result(value: Any, ctx: QContext) -> dict:
    return {
        "value": scalar_to_json(value, ctx.precision_bits),
        "tail_bound": "0",
        "terms_used": 0,
        "mode": "exact" if ctx.exact else "certified",
    }


def evaluate_point(obj: str, params: dict, args, chi=None) -> dict:
    """Evaluate one object at one parameter point; returns the result record."""
    ctx = _context(params["q"], params["u"], args)
    if obj in ("zeta", "lfun"):
        policy = _policy(args)
        s = params["s"]
        if obj == "lfun":
            res: CertifiedValue = zeta.l_q(s, chi, ctx, policy)
        else:
            query = zeta.ZetaQuery(s, ctx, params.get("x"), params.get("r", 1), None, policy)
            res = zeta.evaluate(query)
        return res.to_json()
    n = params["n"]
    if obj == "number":
        return _exact_result(qeuler.q_euler_number(n, ctx), ctx)
    if obj == "poly":
        return _exact_result(qeuler.q_euler_polynomial(n, params["x"], ctx), ctx)
    if obj == "higher":
        return _exact_result(qeuler.q_euler_higher(n, params["r"], params["x"], ctx), ctx)
    raise UsageError(f"unknown object {obj!r}")


def _point_from_args(obj: str, args) -> dict:
    p: dict[str, Any] = {"q": _scalar(args.q, "q"), "u": _scalar(args.u, "u")}
    if obj in ("number", "poly", "higher"):
        p["n"] = _int(args.n, "n")
    if obj in ("poly", "higher"):
        p["x"] = _scalar(args.x, "x")
    if obj == "higher":
        p["r"] = _int(args.r, "r", 1)
    if obj in ("zeta", "lfun"):
        p["s"] = _scalar(args.s, "s")
    if obj == "zeta":
        p["x"] = None if args.x is None else _scalar(args.x, "x")
        p["r"] = _int(args.r, "r", 1)
    return p


def _validate_point(obj: str, p: dict, args) -> None:
    _context(p["q"], p["u"], args)
    x = p.get("x")
    if x is not None:
        re = x.real if hasattr(x, "real") else x
        if obj == "zeta" and not re > 0:
            raise UsageError("--x must satisfy Re(x) > 0")
        if re < 0:
            raise UsageError("--x must satisfy Re(x) >= 0")


# ---------------------------------------------------------------------------
# output


def _plain_scalar(v: Any) -> str:
    if isinstance(v, dict):
        re, im = v["re"], v["im"]
        if float(im) == 0:
            return re
        sign = "" if im.startswith("-") else "+"
        return f"{re}{sign}{im} i"
    if v is None:
        return ""
    return str(v)


def _render_records(records: list[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for rec in records:
            w.writerow([_plain_scalar(rec.get(c)) for c in columns])
        return buf.getvalue()
    for rec in records:
        buf.write("  ".join(f"{c}={_plain_scalar(rec.get(c))}" for c in columns) + "\n")
    return buf.getvalue()


def _render_single(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    cols = list(record)
    if fmt == "csv":
        return _render_records([record], cols, "csv")
    return "".join(f"{k}: {_plain_scalar(v)}\n" for k, v in record.items())


def _render_reports(reports: list[VerificationReport], fmt: str, timing: bool) -> str:
    if fmt == "json":
        payload = [r.to_json(timing) for r in reports]
        return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "inputs", "lhs", "rhs", "bound", "pass", "note"])
        for rep in reports:
            for case in rep.cases:
                c = case.to_json(rep.prec_bits)
                inputs = ";".join(f"{k}={v}" for k, v in c["inputs"].items())
                w.writerow([rep.suite, inputs, _plain_scalar(c["lhs"]), _plain_scalar(c["rhs"]),
                            c["bound"] or "", c["pass"], c["note"]])
        return buf.getvalue()
    for rep in reports:
        for case in rep.cases:
            c = case.to_json(rep.prec_bits)
            inputs = " ".join(f"{k}={v}" for k, v in c["inputs"].items())
            status = "PASS" if c["pass"] else "FAIL"
            extra = f" [{c['note']}]" if c["note"] else ""
            buf.write(f"{rep.suite} {status} {inputs} lhs={_plain_scalar(c['lhs'])} "
                      f"rhs={_plain_scalar(c['rhs'])}{extra}\n")
        s = rep.summary()
        buf.write(f"{rep.suite}: {s['passed']}/{s['cases']} passed{'' if rep.fatal else ' (report only)'}\n")
    if timing:
        buf.write(f"wall time: {sum(r.wall_time for r in reports):.3f}s\n")
    return buf.getvalue()


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_object(args) -> int:
    obj = args.command
    point = _point_from_args(obj, args)
    _validate_point(obj, point, args)
    chi = _load_chi(args.chi) if obj == "lfun" else None
    if obj in ("zeta", "lfun"):
        _policy(args)
    try:
        record = evaluate_point(obj, point, args, chi)
    except QZetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(_render_single(record, args.format), args)
    return EXIT_OK


def _load_chi(spec: str | None):
    if spec is None:
        raise UsageError("--chi is required (builtin:mod1, builtin:mod3, builtin:mod4 or a JSON file)")
    try:
        return load_character(spec)
    except DomainError as exc:
        raise UsageError(f"--chi: {exc}") from None


def cmd_audit(args) -> int:
    n_max = _int(args.n_max, "n-max")
    rows = [row.to_json() for row in classical.bernoulli_euler_identity_audit(n_max)]
    _emit(_render_records(rows, ["n", "lhs", "rhs", "equal"], args.format), args)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    chars = tuple(_load_chi(c) for c in args.chi) if args.chi else None
    tol = _scalar(args.tol, "tol")
    if not isinstance(tol, Fraction) or tol <= 0:
        raise UsageError("--tol expects a positive number")
    cfg = VerifyConfig(precision_bits=args.prec, target_bound=tol, characters=chars,
                       audit_n_max=_int(args.n_max, "n-max"))
    reports = [run_suite(name, cfg) for name in names]
    _emit(_render_reports(reports, args.format, not args.no_timing), args)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_VERIFY


def cmd_table(args) -> int:
    obj = args.object
    names = TABLE_PARAMS[obj]
    ranges: dict[str, list] = {}
    for name in names:
        raw = getattr(args, name)
        if raw is None:
            if name == "x" and obj == "zeta":
                ranges[name] = [None]
                continue
            if name == "r":
                ranges[name] = [1]
                continue
            raise UsageError(f"table {obj} needs --{name}")
        values = parse_range(raw, name)
        if name in ("n", "r"):
            values = [_as_int(v, name, 1 if name == "r" else 0) for v in values]
        ranges[name] = values
    for q in ranges["q"]:
        for u in ranges["u"]:
            _context(q, u, args)
    chi = _load_chi(args.chi) if obj == "lfun" else None
    _policy(args)
    certified = obj in ("zeta", "lfun") or args.mode == "certified"
    columns = [*names, "value", *(("tail_bound", "terms_used") if certified else ()), "error"]
    records, failed = [], False
    for combo in itertools.product(*(ranges[n] for n in names)):
        point = dict(zip(names, combo))
        row: dict[str, Any] = {k: ("" if v is None else _input_str(v)) for k, v in point.items()}
        try:
            _validate_point(obj, point, args)
            res = evaluate_point(obj, point, args, chi)
            row["value"] = res["value"]
            if certified:
                row["tail_bound"] = res["tail_bound"]
                row["terms_used"] = res["terms_used"]
            row["error"] = ""
        except (QZetaError, UsageError) as exc:
            failed = True
            row.update({"value": None, "error": str(exc)})
            if certified:
                row.update({"tail_bound": None, "terms_used": None})
        records.append(row)
    _emit(_render_records(records, columns, args.format), args)
    return EXIT_DOMAIN if failed else EXIT_OK


def _input_str(v: Any) -> str:
    if isinstance(v, (Fraction, int)):
        return format_exact(v)
    return str(v)


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, evaluation: bool = True) -> None:
    if evaluation:
        p.add_argument("--q", required=True, help="q with 0<q<1 (0<|q|<1 in certified mode)")
        p.add_argument("--u", required=True, help="u with |u|<1")
        p.add_argument("--mode", choices=("exact", "certified"), default="exact")
    p.add_argument("--prec", type=int, default=DEFAULT_PREC, help="precision in bits (default $QZETA_DEFAULT_PREC or 128)")
    p.add_argument("--format", choices=("json", "csv", "plain"), default="json")
    p.add_argument("--out", help="write output to FILE instead of stdout")


def _series_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", help="target tail bound")
    p.add_argument("--terms", help="sum exactly this many terms")
    p.add_argument("--max-terms", type=int, dest="max_terms", help="term cap (default 10^6)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qzeta", description="q-Euler numbers and q-zeta functions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("number", help="q-Euler number H_{n,q}(1/u)")
    p.add_argument("--n", required=True)
    _common(p)

    p = sub.add_parser("poly", help="q-Euler polynomial H_{n,q}(1/u, x)")
    p.add_argument("--n", required=True)
    p.add_argument("--x", required=True)
    _common(p)

    p = sub.add_parser("higher", help="order-r q-Euler polynomial")
    p.add_argument("--n", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--x", required=True)
    _common(p)

    p = sub.add_parser("zeta", help="q-Hurwitz / q-Riemann / r-ple q-zeta series")
    p.add_argument("--s", required=True)
    p.add_argument("--x", help="shift; omit for the sum over positive indices")
    p.add_argument("--r", default="1")
    _common(p)
    _series_flags(p)

    p = sub.add_parser("lfun", help="q-l-function l_q(s, chi)")
    p.add_argument("--s", required=True)
    p.add_argument("--chi", help="builtin:mod1|mod3|mod4 or a JSON file")
    _common(p)
    _series_flags(p)

    p = sub.add_parser("audit", help="report both sides of H_n(-1) = sum C(n+1,k) 2^k B_k")
    p.add_argument("--n-max", dest="n_max", default="10")
    _common(p, evaluation=False)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=(*SUITES, "all"))
    p.add_argument("--chi", action="append", help="character(s) for distribution/lfun suites")
    p.add_argument("--tol", default="1e-28", help="required tail bound (default 1e-28)")
    p.add_argument("--n-max", dest="n_max", default="10", help="audit range")
    p.add_argument("--no-timing", action="store_true", help="omit wall time from the output")
    _common(p, evaluation=False)

    p = sub.add_parser("table", help="sweep an object over parameter ranges")
    p.add_argument("object", choices=OBJECTS)
    for name in ("n", "r", "s", "x", "q", "u"):
        p.add_argument(f"--{name}", help="a..b or comma-separated values")
    p.add_argument("--chi")
    p.add_argument("--mode", choices=("exact", "certified"), default="exact")
    _common(p, evaluation=False)
    _series_flags(p)
    return parser


_COMMANDS: dict[str, Callable[[Any], int]] = {
    **{obj: cmd_object for obj in OBJECTS},
    "audit": cmd_audit,
    "verify": cmd_verify,
    "table": cmd_table,
}


_VALUE_FLAGS = frozenset({"--n", "--r", "--s", "--x", "--q", "--u", "--tol"})


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    # argparse mistakes "-3..3" or "-1/2" for an option
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            nxt = argv[i + 1]
            if nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                i += 2
                continue
        out.append(tok)
        i += 1
    return out


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.prec < 53:
        print("error: --prec must be at least 53", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QZetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
