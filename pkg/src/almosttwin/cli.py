"""Command-line entry point.

Every subcommand writes a JSON summary (stdout unless ``--json PATH``) and,
where there is tabular data, a CSV (``--csv PATH``).  Outputs carry a
metadata block (version, command, resolved config) but no timings, so equal
configs give byte-identical files; elapsed time goes to stderr.

Exit codes: 0 success, 1 usage error, 2 acceptance failure, 3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    csv_path: str | None = None
    json_path: str | None = None
    workers: int = 1
    seed: int = 0

    def echo(self) -> dict:
        return {"version": __version__, "command": self.command, "params": self.params,
                "seed": self.seed}


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "label"):
        return o.label()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def emit(cfg: RunConfig, summary: dict, header: list | None = None, rows=None):
    if header is not None and cfg.csv_path:
        buf = io.StringIO()
        buf.write("# " + json.dumps(cfg.echo(), sort_keys=True, default=_jsonable) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        _write(cfg.csv_path, buf.getvalue())
    doc = {"meta": cfg.echo(), "result": summary}
    _write(cfg.json_path, json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + "\n")


def _spec(a):
    from .primes import ConstraintSpec
    return ConstraintSpec(a.constraint, m=a.m, H=a.H, rough=a.rough)


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


# --- subcommands -----------------------------------------------------------

def cmd_sieve(a, cfg):
    from .primes import sieve_range, constrained_primes, witness
    spec = _spec(a)
    table = sieve_range(a.lo, a.hi + spec.margin)
    ps = constrained_primes(table, spec, lo=a.lo, hi=a.hi)
    rows = ((int(p), " ".join(map(str, witness(int(p), spec, table)))) for p in ps)
    emit(cfg, {"lo": a.lo, "hi": a.hi, "constraint": spec.label(), "count": int(ps.size)},
         ["p", "witness"], rows)
    return EXIT_OK


def cmd_bohr(a, cfg):
    from .trigpoly import bohr_cutoff
    chi = bohr_cutoff(a.N, _int_list(a.omega), a.eta, D=a.D)
    rows = ((n, repr(float(v))) for n, v in enumerate(chi.values))
    emit(cfg, chi.summary(), ["n", "chi"], rows)
    return EXIT_OK


def _function_from(text: str, N: int):
    """``const:c``, ``window:lo,hi[,height]``, ``primes:W,b,lo,hi[,kind]`` or ``csv:path``."""
    from .cyclic import CyclicFunction, wtricked_prime_function
    from .primes import ConstraintSpec
    kind, _, arg = text.partition(":")
    parts = [p for p in arg.split(",") if p]
    if kind == "const":
        return CyclicFunction.constant(N, float(parts[0]) if parts else 1.0)
    if kind == "window":
        lo, hi = float(parts[0]), float(parts[1])
        h = float(parts[2]) if len(parts) > 2 else 1.0
        return CyclicFunction.indicator(N, int(np.ceil(lo * N)), int(np.ceil(hi * N))).scale(h)
    if kind == "primes":
        W, b = int(parts[0]), int(parts[1])
        lo, hi = (float(parts[2]), float(parts[3])) if len(parts) >= 4 else (0.25, 0.5)
        spec = ConstraintSpec(parts[4]) if len(parts) > 4 else ConstraintSpec()
        return wtricked_prime_function(N, W, b, (lo, hi), spec)
    if kind == "csv":
        vals = np.loadtxt(arg, delimiter=",", ndmin=1, comments="#")
        if vals.size != N:
            raise ValueError(f"{arg} holds {vals.size} values, expected N={N}")
        return CyclicFunction(N, vals.astype(float))
    raise ValueError(f"unknown function spec {text!r}")


def cmd_transfer(a, cfg):
    from .cyclic import transference_check
    fs = [_function_from(s, a.N) for s in (a.f1, a.f2, a.f3)]
    rep = transference_check(*fs, delta=a.delta, K=a.K, max_omega=a.max_omega, max_degree=a.max_degree)
    emit(cfg, rep.to_dict())
    return EXIT_OK


def cmd_sievefn(a, cfg):
    from .sievefn import build_sieve_table, chen_constant
    t = build_sieve_table(a.s_max, a.step)
    summary = {}
    if t.s_max >= 5:
        summary = chen_constant(a.eps, table=t).to_dict()
    rows = ((repr(s), repr(F), repr(f)) for s, F, f in t.rows())
    emit(cfg, summary, ["s", "F", "f"], rows)
    return EXIT_OK


def cmd_singular(a, cfg):
    from .arith import LinearFormSystem, singular_series
    s = singular_series(LinearFormSystem.parse(a.forms), a.cutoff)
    emit(cfg, s.to_dict())
    return EXIT_OK


def cmd_expsum(a, cfg):
    from . import expsums as E
    base = {"lemma": a.lemma, "x": a.x, "alpha": a.alpha, "Q": a.Q}
    if a.lemma == "B1":
        lhs = abs(E.ap_expsum(a.x, a.alpha, a.Q, a.c) - E.ap_expsum(a.x, a.alpha) / a.Q)
        rhs = abs(a.alpha) * a.x + 1
        rep = {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs, "params": {"c": a.c}}
    elif a.lemma == "B2":
        if a.q is None or a.a is None:
            raise ValueError("lemma B2 needs --a and --q")
        rep = E.geom_series_bound(E.ExpSumParams(a.x, a.alpha, a.a, a.q, a.Q, c=a.c)).to_dict()
    elif a.lemma == "B5":
        rep = E.tau_min_sum(a.alpha, a.M, a.x, a.k, q=a.q).to_dict()
    elif a.lemma == "typeI":
        rep = E.type_one_bound(a.x, a.Q, a.M, a.alpha, q=a.q, a=a.a).to_dict()
    elif a.arc == "major":
        rep = E.major_arc_report(a.x, a.alpha, a.Q).to_dict()
    else:
        rep = E.minor_arc_report(a.x, a.alpha, a.Q, q=a.q).to_dict()
    summary = dict(base, **rep)
    emit(cfg, summary, ["lemma", "x", "alpha", "Q", "lhs", "rhs_shape", "ratio"],
         [(a.lemma, a.x, repr(a.alpha), a.Q, repr(rep["lhs"]), repr(rep["rhs"]), repr(rep["ratio"]))])
    return EXIT_OK


def cmd_goldbach(a, cfg):
    from .goldbach import scan
    rep = scan(a.lo, a.hi, _spec(a), count=a.count, workers=cfg.workers)
    emit(cfg, rep.summary(), ["N", "found", "p1", "p2", "p3", "count"], rep.rows())
    return EXIT_OK


def cmd_verify_all(a, cfg):
    from .acceptance import run_all
    only = set(_int_list(a.only)) if a.only else None
    results = []
    for r in run_all(quick=a.quick, only=only):
        print(r.line(), file=sys.stderr, flush=True)
        results.append(r)
    passed = all(r.passed for r in results)
    summary = {"quick": a.quick, "passed": passed,
               "criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
                            for r in results]}
    emit(cfg, summary)
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {
    "sieve": cmd_sieve, "bohr": cmd_bohr, "transfer": cmd_transfer, "sievefn": cmd_sievefn,
    "singular": cmd_singular, "expsum": cmd_expsum, "goldbach": cmd_goldbach,
    "verify-all": cmd_verify_all,
}


def _constraint_flags(p):
    p.add_argument("--constraint", choices=["none", "chen", "cluster"], default="none")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--H", type=int, default=6)
    p.add_argument("--rough", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    common.add_argument("--csv", dest="csv_path", help="CSV output path ('-' for stdout)")
    common.add_argument("--json", dest="json_path", help="JSON output path (default stdout)")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--quiet", action="store_true", help="no timing line on stderr")

    parser = _Parser(prog="almosttwin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("sieve", parents=[common], help="constrained primes in [lo, hi)")
    p.add_argument("--lo", type=int, default=2)
    p.add_argument("--hi", type=int, required=True)
    _constraint_flags(p)

    p = sub.add_parser("bohr", parents=[common], help="smooth Bohr cutoff")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--omega", required=True, help="comma-separated frequencies")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--D", type=int, default=None, help="override the cutoff degree")

    p = sub.add_parser("transfer", parents=[common], help="transference hypotheses and triple count")
    p.add_argument("--N", type=int, required=True)
    for name in ("f1", "f2", "f3"):
        p.add_argument(f"--{name}", required=True,
                       help="const:c | window:lo,hi[,h] | primes:W,b[,lo,hi[,kind]] | csv:path")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--max-omega", type=int, default=3)
    p.add_argument("--max-degree", type=int, default=10 ** 6)

    p = sub.add_parser("sievefn", parents=[common], help="linear sieve functions and Chen's constant")
    p.add_argument("--s-max", type=float, default=5.0)
    p.add_argument("--step", type=float, default=1e-4)
    p.add_argument("--eps", type=float, default=0.0)

    p = sub.add_parser("singular", parents=[common], help="singular series of linear forms")
    p.add_argument("--forms", required=True, help='"a1,b1;a2,b2;..."')
    p.add_argument("--cutoff", type=int, default=10 ** 6)

    p = sub.add_parser("expsum", parents=[common], help="exponential sum evaluators")
    p.add_argument("--lemma", choices=["B1", "B2", "B5", "typeI", "primeAP"], required=True,
                   help="B1: AP geometric sum minus its average; B2: AP sum against q/(Q,q); "
                        "B5: divisor-weighted min sum; typeI: type I bilinear sum; "
                        "primeAP: primes in APs (--arc major|minor)")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--Q", type=int, default=1)
    p.add_argument("--c", type=int, default=0)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--arc", choices=["major", "minor"], default="minor")

    p = sub.add_parser("goldbach", parents=[common], help="ternary representations scan")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    _constraint_flags(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true", help="also count ordered representations")
    g.add_argument("--first-only", dest="count", action="store_false")

    p = sub.add_parser("verify-all", parents=[common], help="run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    return parser


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise UsageError(f"config line without '=': {line!r}")
            out[key.strip().lstrip("-").replace("-", "_")] = val.strip()
    return out


def _apply_config(parser, argv, ns):
    """Re-parse with config values as defaults so explicit flags still win."""
    conf = read_config(ns.config)
    sub = parser._subparsers._group_actions[0].choices[ns.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for k, v in conf.items():
        if k not in known:
            raise UsageError(f"unknown config key {k!r} for {ns.command}")
        act = known[k]
        if act.nargs == 0:
            defaults[k] = v.lower() in ("1", "true", "yes", "on")
        else:
            defaults[k] = act.type(v) if act.type else v
            act.required = False
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        try:
            ns = parser.parse_args(argv)
        except UsageError:
            # a config file may supply required flags
            pre = argparse.ArgumentParser(add_help=False)
            pre.add_argument("--config")
            known, _ = pre.parse_known_args(argv)
            cmd = next((x for x in argv if x in COMMANDS), None)
            if not known.config or cmd is None:
                raise
            ns = argparse.Namespace(config=known.config, command=cmd)
        if ns.command is None:
            raise UsageError("missing subcommand; choose from " + ", ".join(COMMANDS))
        if ns.config:
            ns = _apply_config(parser, argv, ns)
        if ns.workers is None:
            ns.workers = int(os.environ.get("ALMOSTTWIN_WORKERS", "1"))
        skip = {"config", "csv_path", "json_path", "workers", "seed", "quiet", "command"}
        cfg = RunConfig(ns.command, {k: v for k, v in sorted(vars(ns).items()) if k not in skip},
                        ns.csv_path, ns.json_path, ns.workers, ns.seed)
        code = COMMANDS[ns.command](ns, cfg)
    except UsageError as e:
        print(f"almosttwin: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError, FileNotFoundError) as e:
        print(f"almosttwin: invalid parameters: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001 - reported as an internal error code
        print(f"almosttwin: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if not getattr(ns, "quiet", False):
        print(f"almosttwin {ns.command}: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return code
