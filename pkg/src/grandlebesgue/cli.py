"""Command-line driver.

Usage::

    grandlebesgue norm --f const:3 --p 2
    grandlebesgue norm --f f0:0.5,1 --psi natural --bgls
    grandlebesgue check-inequalities --seed 0 --suite-size 200
    grandlebesgue verify-embedding --f f0:0.5,2 --psi natural:1,1.5 --out report.json
    grandlebesgue sharpness --delta 0.5 --gamma 2 --format csv
    grandlebesgue lemma1 --alpha2 -1 --sweep

Exit codes: 0 success, 1 an inequality was violated, 2 bad input.
Every report is ``{"command", "records", "summary"}`` in JSON, or the records
as CSV with a header row.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import CIRCLE, UNIT_INTERVAL, CircleDomain, PeriodicFunction, lp_norms
from .embedding import (
    DEFAULT_FAMILIES,
    SequenceFamily,
    lemma1_asymptotics_check,
    lemma1_series,
    records_to_csv,
    to_jsonable,
    verify_theorem1,
)
from .errors import DataError, DomainError
from .polynomial import TrigPolynomial
from .psi import (
    PsiFunction,
    bgls_norm,
    constant_psi,
    dirac_psi,
    make_grid,
    make_power_psi,
    natural_psi,
    parse_psi_record,
)
from .sharpness import SharpnessConfig, make_f0, sharpness_report
from .trig import TheoremConstants, run_inequality_suite


class SpecError(ValueError):
    """A function, psi or config specification could not be parsed."""


# ---------------------------------------------------------------------------
# specs

DOMAINS = {"circle": CIRCLE, "unit": UNIT_INTERVAL}


def _floats(text: str, count: Optional[int] = None) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise SpecError(f"expected numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise SpecError(f"expected {count} numbers, got {text!r}")
    return vals


def parse_function(spec: str, domain: Optional[str] = None) -> PeriodicFunction:
    """``const:c``, ``cos:k``, ``f0:delta,gamma`` or ``file:path``."""
    tag, _, arg = spec.partition(":")
    dom = DOMAINS[domain] if domain else None
    if tag == "const":
        (c,) = _floats(arg, 1)
        return PeriodicFunction.constant(c, dom or CIRCLE)
    if tag == "cos":
        (k,) = _floats(arg, 1)
        if k != int(k) or k < 1:
            raise SpecError("cos:k needs a positive integer k")
        k = int(k)
        a = np.zeros(k)
        a[-1] = 1.0
        d = dom or CIRCLE
        return PeriodicFunction.from_trig(TrigPolynomial(0.0, a, np.zeros(k), d.circumference),
                                          label=f"cos:{k}")
    if tag == "f0":
        delta, gamma = _floats(arg, 2)
        if dom is not None and dom is not UNIT_INTERVAL:
            raise SpecError("f0 lives on the unit domain")
        return make_f0(delta, gamma)
    if tag == "file":
        return _read_samples(arg, dom)
    raise SpecError(f"unknown function spec {spec!r}")


def _read_samples(path: str, dom: Optional[CircleDomain]) -> PeriodicFunction:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    try:
        xs = np.array([float(r[0]) for r in rows])
        vals = np.array([float(r[1]) for r in rows])
    except (ValueError, IndexError):
        raise SpecError(f"{path}: expected x,value rows") from None
    d = dom or CIRCLE
    n = xs.size
    expected = xs[0] + np.arange(n) * d.circumference / max(n, 1)
    if n < 2 or not np.allclose(xs, expected, rtol=0, atol=1e-6 * d.circumference):
        raise SpecError(f"{path}: x values must form a uniform grid of step L/N on the domain")
    return PeriodicFunction.from_samples(vals, d, label=f"file:{Path(path).name}")


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def default_interval(f: PeriodicFunction) -> tuple[float, float]:
    """(1, (1 + 1/delta)/2) for f0, (1, 2) otherwise."""
    if f.label.startswith("f0:"):
        delta = float(f.label[3:].split(",")[0])
        return 1.0, (1.0 + 1.0 / delta) / 2.0
    return 1.0, 2.0


def parse_psi(spec: str, f: PeriodicFunction, grid_points: int = 16):
    """Returns (psi, grid).  Specs: ``natural[:a,b]``, ``one``, ``const:v``,
    ``power:a,b,beta,gamma``, ``dirac:r`` or a ``key=value;...`` record."""
    tag, _, arg = spec.partition(":")
    if "=" in spec:
        psi = parse_psi_record(spec)
    elif tag == "natural":
        a, b = _floats(arg, 2) if arg else default_interval(f)
        grid = make_grid(a, b, grid_points)
        return natural_psi(f, grid), grid
    elif tag == "one" and not arg:
        psi = constant_psi(1.0, 2.0, 1.0)
    elif tag == "const":
        (v,) = _floats(arg, 1)
        psi = constant_psi(1.0, 2.0, v)
    elif tag == "power":
        a, b, beta, gamma = _floats(arg, 4)
        psi = make_power_psi(a, b, beta, gamma)
    elif tag == "dirac":
        (r,) = _floats(arg, 1)
        psi = dirac_psi(r)
    else:
        raise SpecError(f"unknown psi spec {spec!r}")
    grid = make_grid(psi.a, psi.b, grid_points)
    return psi, grid


def parse_families(text: str) -> tuple[SequenceFamily, ...]:
    out = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        tag, _, arg = item.partition(":")
        if tag == "dyadic":
            out.append(SequenceFamily("dyadic"))
        elif tag == "geometric":
            (rho,) = _floats(arg, 1)
            out.append(SequenceFamily("geometric", rho))
        elif tag == "explicit":
            out.append(SequenceFamily("explicit", values=tuple(int(v) for v in _floats(arg))))
        else:
            raise SpecError(f"unknown sequence family {item!r}")
    if not out:
        raise SpecError("no sequence families given")
    return tuple(out)


# ---------------------------------------------------------------------------
# output

def emit(command: str, records: list, summary: dict, fields: Sequence[str], args) -> None:
    if args.format == "csv":
        text = records_to_csv(records, fields)
    else:
        payload = {"command": command, "records": records, "summary": summary}
        text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def _constants(args) -> TheoremConstants:
    return TheoremConstants(c0=args.c0, c_jackson=args.c_jackson,
                            series_factor=args.series_factor, theorem_factor=args.theorem_factor)


def cmd_norm(args) -> int:
    f = parse_function(args.f, args.domain)
    if args.bgls:
        psi, grid = parse_psi(args.psi or "natural", f, args.grid_points)
        value, witness = bgls_norm(f, psi, grid, return_witness=True)
        records = [{"p": witness, "value": value}]
        summary = {"function": f.label, "psi": args.psi or "natural", "bgls_norm": value,
                   "witness_p": witness}
        emit("norm", records, summary, ("p", "value"), args)
        return 0
    ps = _floats(args.p) if args.p else [2.0]
    values = lp_norms(f, ps)
    records = []
    for p, v in zip(ps, values):
        rec = {"p": p, "value": float(v)}
        if f.exact_norm is not None:
            rec["exact"] = f.exact_norm(p)
        records.append(rec)
    emit("norm", records, {"function": f.label, "domain_circumference": f.circumference},
         ("p", "value", "exact"), args)
    return 0


def cmd_check_inequalities(args) -> int:
    if args.suite_size < 1:
        raise SpecError("--suite-size must be positive")
    ps = _floats(args.ps)
    report = run_inequality_suite(args.seed, args.suite_size, ps, _constants(args),
                                  nikolskii_constant=args.nikolskii_constant,
                                  h_grid_size=args.h_grid_size)
    records = report.pop("violations")
    emit("check-inequalities", records, report,
         ("check", "index", "degree", "n", "p", "q", "ratio"), args)
    return 0 if report["passed"] else 1


def cmd_verify_embedding(args) -> int:
    f = parse_function(args.f, args.domain)
    psi, grid = parse_psi(args.psi or "natural", f, args.grid_points)
    q_grid = _floats(args.q_grid) if args.q_grid else None
    families = parse_families(args.families) if args.families else DEFAULT_FAMILIES
    report = verify_theorem1(f, psi, q_grid=q_grid, p_grid=grid.points, families=families,
                             constants=_constants(args), literal=args.literal,
                             h_grid_size=args.h_grid_size)
    d = report.to_dict()
    emit("verify-embedding", d["records"], d["summary"],
         ("q", "f_norm_q", "theta_q", "ratio", "witness_p", "witness_sequence_kind",
          "divergent", "block_c2", "block_c3"), args)
    return 0 if report.verified else 1


def cmd_sharpness(args) -> int:
    cfg = SharpnessConfig(args.delta, args.gamma, b=args.b, window_points=args.window_points,
                          h_grid_size=args.h_grid_size)
    report = sharpness_report(cfg, constants=_constants(args))
    d = report.to_dict()
    emit("sharpness", d["records"], d["summary"],
         ("q", "nu0", "theta", "bound", "log_nu0", "log_bound", "witness_p"), args)
    return 0


def cmd_lemma1(args) -> int:
    if args.sweep:
        res = lemma1_asymptotics_check(args.alpha2)
        records = [{"eta": e, "W": w, "ratio": r} for e, w, r in zip(res["eta"], res["W"], res["ratio"])]
        summary = {k: res[k] for k in ("alpha2", "regime", "ratio_min", "ratio_max", "holds")}
        emit("lemma1", records, summary, ("eta", "W", "ratio"), args)
        return 0 if res["holds"] else 1
    value = lemma1_series(args.eta, args.alpha2)
    emit("lemma1", [{"eta": args.eta, "W": value}], {"alpha2": args.alpha2},
         ("eta", "W"), args)
    return 0


# ---------------------------------------------------------------------------
# parser

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--config", default=None, help="key=value file; flags given here win")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c0", type=float, default=3.0)
    p.add_argument("--c-jackson", type=float, default=12.0)
    p.add_argument("--series-factor", type=float, default=32.0)
    p.add_argument("--theorem-factor", type=float, default=6.0)
    p.add_argument("--h-grid-size", type=int, default=64)


def _function_args(p: argparse.ArgumentParser, need_f: bool = True) -> None:
    p.add_argument("--f", required=need_f, help="const:c | cos:k | f0:delta,gamma | file:path")
    p.add_argument("--domain", choices=sorted(DOMAINS), default=None)
    p.add_argument("--psi", default=None,
                   help="natural[:a,b] | one | const:v | power:a,b,beta,gamma | dirac:r | key=value;...")
    p.add_argument("--grid-points", type=int, default=16)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grandlebesgue",
                                     description="Norms, moduli and embedding bounds in grand Lebesgue spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="Lp norms or the grand-Lebesgue norm of a function")
    _common(p)
    _function_args(p)
    p.add_argument("--p", default=None, help="comma-separated exponents (default 2)")
    p.add_argument("--bgls", action="store_true", help="report sup_p |f|_p / psi(p)")
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("check-inequalities", help="seeded Nikol'skii and Vallee-Poussin suite")
    _common(p)
    p.add_argument("--suite-size", type=int, default=200)
    p.add_argument("--nikolskii-constant", type=float, default=2.0)
    p.add_argument("--ps", default="1,1.5,2,4,64")
    p.set_defaults(handler=cmd_check_inequalities)

    p = sub.add_parser("verify-embedding", help="compare |f|_q with 6 theta(q)")
    _common(p)
    _function_args(p)
    p.add_argument("--q-grid", default=None, help="comma-separated q values")
    p.add_argument("--families", default=None,
                   help="e.g. 'dyadic;geometric:1.5;explicit:1,2,4,8'")
    p.add_argument("--literal", action="store_true", help="drop the psi(p) prefactor")
    p.set_defaults(handler=cmd_verify_embedding)

    p = sub.add_parser("sharpness", help="extremal exponent and power for f0")
    _common(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--window-points", type=int, default=32)
    p.set_defaults(handler=cmd_sharpness)

    p = sub.add_parser("lemma1", help="the series sum_k 2^(-k eta) k^alpha2")
    _common(p)
    p.add_argument("--alpha2", type=float, required=True)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--sweep", action="store_true", help="ratio to the asymptotic model on a grid")
    p.set_defaults(handler=cmd_lemma1)
    return parser


_COMMANDS = ("norm", "check-inequalities", "verify-embedding", "sharpness", "lemma1")


def _config_argv(path: str, parser: argparse.ArgumentParser, command: str) -> list[str]:
    """Turn a key=value file into flags placed before the command-line flags."""
    sub = next(a for a in parser._subparsers._group_actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub.choices[command]
    flags = {}
    for action in subparser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                flags[opt[2:].replace("-", "_")] = (opt, action)
    out = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SpecError(f"cannot read config {path}: {exc}") from None
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in flags or key == "config":
            raise SpecError(f"bad config line {line!r}")
        opt, action = flags[key]
        value = value.strip()
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes"):
                out.append(opt)
            elif value.lower() not in ("0", "false", "no"):
                raise SpecError(f"{key} expects true or false")
        else:
            out.extend([opt, value])
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    config = pre.parse_known_args(argv[1:])[0].config if argv else None
    try:
        if config and argv[0] in _COMMANDS:
            argv = [argv[0]] + _config_argv(config, parser, argv[0]) + argv[1:]
        args = parser.parse_args(argv)
        return args.handler(args)
    except (SpecError, DomainError, DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
