"""Batch front end: ``unicol <command> [flags]`` prints one deterministic JSON report.

Exit codes: 2 for configuration and literal errors, 3 for points or data
outside the supported domain, 4 for precision exhaustion.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .engine import ColemanEngine, engine_precision
from .literals import LiteralError, parse_point
from .overconvergent import PoleSet
from .padic import PadicNumber, PrecisionError, log_unit, to_padic
from .series import DomainError

CACHE_SCHEMA = 1
EXIT_CONFIG, EXIT_DOMAIN, EXIT_PRECISION = 2, 3, 4


class ConfigError(ValueError):
    pass


# -- configuration -----------------------------------------------------------------

def _common(parser):
    parser.add_argument("--p", type=int, default=5)
    parser.add_argument("--prec", type=int, default=12, help="target digits N")
    parser.add_argument("--series-deg", type=int, default=None)
    parser.add_argument("--max-word-len", type=int, default=4)
    parser.add_argument("--poles", default="0,1,inf")
    parser.add_argument("--base", default="teich(3)")
    parser.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="unicol", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("log", help="log_unit of a point")
    _common(c)
    c.add_argument("--at", required=True)
    c = sub.add_parser("polylog", help="-I_(1,0,...,0) at a point (vanishes at the base)")
    _common(c)
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--at", required=True)
    c = sub.add_parser("iint", help="iterated integral between two points")
    _common(c)
    c.add_argument("--word", required=True)
    c.add_argument("--from", dest="start", default=None)
    c.add_argument("--to", dest="end", required=True)
    c = sub.add_parser("transport", help="transport matrix between two centers")
    _common(c)
    c.add_argument("--connection", default=None, help="JSON connection file")
    c.add_argument("--forms", default="dz/z", help="';'-separated forms of a chain connection")
    c.add_argument("--x", required=True)
    c.add_argument("--y", required=True)
    c = sub.add_parser("dbar", help="obstruction class of sum f_a I_(a) + g")
    _common(c)
    c.add_argument("--term", action="append", default=[], help="a:f for f*I_(a)")
    c.add_argument("--g", default="0")
    c = sub.add_parser("psi", help="both routes of the Čech square for [eta_a] (x) f")
    _common(c)
    c.add_argument("--s1", required=True)
    c.add_argument("--s2", required=True)
    c.add_argument("--letter", required=True)
    c.add_argument("--h1", default="0")
    c.add_argument("--h2", default="0")
    c.add_argument("--f", default="1")
    c = sub.add_parser("twovar-check", help="df_k = Omega_k, dOmega_k = 0, f_k(S,S) = 0")
    _common(c)
    c.add_argument("--word", required=True)
    c.add_argument("--discs", default=None, help="rS,rz (default: base,base)")
    c.add_argument("--degree", type=int, default=10)
    c = sub.add_parser("selftest", help="quick invariant suite")
    _common(c)
    return ap


def _residue_of(text, p):
    pt = parse_point(text, p)
    if isinstance(pt, PadicNumber):
        return pt.residue()
    pt = Fraction(pt)
    if pt.denominator % p == 0:
        raise ConfigError(f"{text} is not a center")
    return pt.numerator * pow(pt.denominator, -1, p) % p


def _word(text, p):
    return tuple(int(t) % p for t in text.replace(" ", "").split(",") if t != "")


class Context:
    """Validated configuration plus a lazily built engine."""

    def __init__(self, args):
        self.args = args
        p = args.p
        if p < 3 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ConfigError("--p must be an odd prime")
        if args.prec < 1 or args.max_word_len < 0:
            raise ConfigError("--prec and --max-word-len must be positive")
        self.p = p
        self.work = engine_precision(args.prec, args.max_word_len)
        self.poles = PoleSet.parse(args.poles, p, prec=self.work,
                                   series_degree=args.series_deg)
        self.base = _residue_of(args.base, p)
        self._engine = None

    def config(self) -> dict:
        a = self.args
        cfg = {k: v for k, v in sorted(vars(a).items()) if k not in ("out",)}
        cfg["working_precision"] = self.work
        return cfg

    def config_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.config(), sort_keys=True).encode()).hexdigest()

    @property
    def engine(self) -> ColemanEngine:
        if self._engine is None:
            self._engine = ColemanEngine(self.poles, self.base,
                                         max_word_length=self.args.max_word_len)
            _load_cache(self)
        return self._engine

    def point(self, text):
        return parse_point(text, self.p, self.work, self.poles)


# -- center value cache --------------------------------------------------------------

def _cache_path(ctx) -> Path | None:
    root = os.environ.get("UNICOL_CACHE_DIR")
    if not root:
        return None
    key = json.dumps([CACHE_SCHEMA, ctx.p, ctx.work, list(ctx.poles.finite), ctx.base,
                      ctx.args.max_word_len])
    return Path(root) / f"centers-{hashlib.sha256(key.encode()).hexdigest()[:16]}.json"


def _load_cache(ctx):
    path = _cache_path(ctx)
    if path is None or not path.exists():
        return
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return
    if data.get("schema") != CACHE_SCHEMA:
        return
    for item in data.get("values", []):
        w, r = tuple(item["word"]), item["center"]
        ctx._engine._values[(w, r)] = PadicNumber.from_json(item["value"])


def _save_cache(ctx):
    path = _cache_path(ctx)
    if path is None or ctx._engine is None:
        return
    values = [{"word": list(w), "center": r, "value": v.to_json()}
              for (w, r), v in sorted(ctx._engine._values.items())
              if isinstance(v, PadicNumber)]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"schema": CACHE_SCHEMA, "values": values}, sort_keys=True))


# -- output ----------------------------------------------------------------------------

def encode(x):
    """JSON form of results: p-adic numbers become ``{"p", "v", "digits", "prec"}``."""
    if isinstance(x, PadicNumber):
        return x.to_json()
    if isinstance(x, Fraction):
        return {"fraction": str(x)}
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if x == float("inf"):
        return "inf"
    return x


def _precision_of(x):
    if isinstance(x, PadicNumber):
        return x.prec
    if isinstance(x, dict):
        vals = [_precision_of(v) for v in x.values()]
    elif isinstance(x, (list, tuple)):
        vals = [_precision_of(v) for v in x]
    else:
        return None
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


# -- commands ------------------------------------------------------------------------------

def cmd_log(ctx):
    x = to_padic(ctx.point(ctx.args.at), ctx.p, ctx.work)
    return {"log_unit": log_unit(x, ctx.p)}


def cmd_polylog(ctx):
    k = ctx.args.k
    if not {0, 1} <= set(ctx.poles.finite):
        raise DomainError("polylog needs the discs of 0 and 1 removed")
    word = (1,) + (0,) * (k - 1)
    z = ctx.point(ctx.args.at)
    val = -ctx.engine.evaluate_theta(ctx.engine.I(word), z)
    return {"word": list(word), "value": val}


def iterated_integral(engine, word, x, y):
    """``int_x^y`` of ``word`` through the base: ``sum_j (-1)**j I_{rev(w[:j])}(x) I_{w[j:]}(y)``."""
    acc = Fraction(0)
    for j in range(len(word) + 1):
        left = engine.evaluate_theta(engine.I(tuple(reversed(word[:j]))), x)
        right = engine.evaluate_theta(engine.I(word[j:]), y)
        term = left * right
        acc = acc - term if j % 2 else acc + term
    return acc


def cmd_iint(ctx):
    word = _word(ctx.args.word, ctx.p)
    if len(word) > ctx.args.max_word_len:
        raise ConfigError("word longer than --max-word-len")
    y = ctx.point(ctx.args.end)
    x = ctx.point(ctx.args.start) if ctx.args.start else ctx.poles.lift(ctx.base)
    return {"word": list(word), "value": iterated_integral(ctx.engine, word, x, y)}


def cmd_transport(ctx):
    from .connections import FunctionField, Transporter, UnipotentConnection
    F = FunctionField(ctx.p, ctx.work)
    if ctx.args.connection:
        M = UnipotentConnection.from_json(F, json.loads(Path(ctx.args.connection).read_text()))
    else:
        M = UnipotentConnection.from_forms(F, [F.parse(t) for t in ctx.args.forms.split(";")])
    x, y = _residue_of(ctx.args.x, ctx.p), _residue_of(ctx.args.y, ctx.p)
    for r in (x, y):
        ctx.poles.check_in_X(ctx.poles.lift(r))
    T = Transporter(M, ctx.engine)
    return {"connection": M.to_json(), "x": x, "y": y, "matrix": T.transport(x, y)}


def cmd_dbar(ctx):
    from .connections import ExactCalculus, ExactColemanFunction, FunctionField
    from .dbar import dbar
    F = FunctionField(ctx.p, ctx.work)
    calc = ExactCalculus(F, ctx.poles.finite, ctx.base)
    terms = {(): F.parse(ctx.args.g)}
    for t in ctx.args.term:
        a, _, f = t.partition(":")
        if not f:
            raise ConfigError("--term must look like a:f")
        a = _residue_of(a, ctx.p)
        terms[(a,)] = terms.get((a,), F.K.zero) + F.parse(f)
    return {"class": dbar(ExactColemanFunction(calc, terms)).to_json()}


def cmd_psi(ctx):
    from .connections import FunctionField
    from .dbar import CechCover, diagram_check
    F = FunctionField(ctx.p, ctx.work)
    a = ctx.args
    cover = CechCover(ctx.poles, _residue_of(a.s1, ctx.p), _residue_of(a.s2, ctx.p), ctx.base)
    letter = _residue_of(a.letter, ctx.p)
    if letter not in ctx.poles.finite:
        raise DomainError("the class must be a removed disc of X")
    P12 = cover.restricted_poles("12")
    eng = ColemanEngine(P12, ctx.base, max_word_length=1)
    pts = [P12.lift(r) + k * ctx.p for r in P12.centers for k in (1, 2)][:6]
    return diagram_check(cover, letter, F.parse(a.h1), F.parse(a.h2), F.parse(a.f), eng, pts)


def cmd_twovar(ctx):
    from .twovar import check_two_variable
    word = _word(ctx.args.word, ctx.p)
    if ctx.args.discs:
        rS, rz = (_residue_of(t, ctx.p) for t in ctx.args.discs.split(","))
    else:
        rS = rz = ctx.base
    return check_two_variable(ctx.engine, word, rS, rz, ctx.args.degree)


def cmd_selftest(ctx):
    from .engine import shuffle
    eng = ctx.engine
    N = ctx.args.prec
    checks = []
    pts = [ctx.poles.lift(r) + ctx.p * (k + 1) for k, r in enumerate(ctx.poles.centers)]
    for a in ctx.poles.finite:
        b = eng.b
        worst = min(_digits(eng.evaluate_theta(eng.I((a,)), z)
                            - log_unit((z - ctx.poles.lift(a)) / (b - ctx.poles.lift(a)), ctx.p),
                            ctx.p) for z in pts)
        checks.append({"name": f"log oracle ({a})", "margin": worst, "pass": worst >= N})
    letters = ctx.poles.finite
    u, v = (letters[0],), (letters[-1], letters[0])
    worst = 2 ** 31
    for z in pts:
        lhs = eng.evaluate_theta(eng.I(u), z) * eng.evaluate_theta(eng.I(v), z)
        rhs = sum((m * eng.evaluate_theta(eng.I(w), z) for w, m in shuffle(u, v).items()),
                  Fraction(0))
        worst = min(worst, _digits(lhs - rhs, ctx.p))
    checks.append({"name": "shuffle", "margin": worst, "pass": worst >= N})
    rep = eng.frobenius_equivariance_check(eng.I(v), pts)
    checks.append({"name": "frobenius equivariance", "margin": rep["min_agreement"],
                   "pass": rep["min_agreement"] >= N})
    return {"pass": all(c["pass"] for c in checks), "checks": checks}


def _digits(d, p):
    from .engine import _agreement
    return _agreement(d, p)


COMMANDS = {"log": cmd_log, "polylog": cmd_polylog, "iint": cmd_iint,
            "transport": cmd_transport, "dbar": cmd_dbar, "psi": cmd_psi,
            "twovar-check": cmd_twovar, "selftest": cmd_selftest}


def run(argv=None) -> tuple[int, dict]:
    """Parse ``argv``, run the command and return ``(exit_code, report)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), {}
    try:
        ctx = Context(args)
        result = COMMANDS[args.command](ctx)
        _save_cache(ctx)
    except (ConfigError, LiteralError, json.JSONDecodeError, OSError) as exc:
        return EXIT_CONFIG, {"error": "config", "message": str(exc)}
    except PrecisionError as exc:
        return EXIT_PRECISION, {"error": "precision", "message": str(exc)}
    except (DomainError, ZeroDivisionError) as exc:
        return EXIT_DOMAIN, {"error": "domain", "message": str(exc)}
    except ValueError as exc:
        return EXIT_CONFIG, {"error": "config", "message": str(exc)}
    report = {"command": args.command, "version": __version__, "config": ctx.config(),
              "config_hash": ctx.config_hash(), "precision": _precision_of(result),
              "result": encode(result)}
    return 0, report


def main(argv=None) -> int:
    code, report = run(argv)
    if report:
        text = json.dumps(report, sort_keys=True, indent=2)
        out = getattr(_last_args(argv), "out", None)
        if out and code == 0:
            Path(out).write_text(text + "\n")
        else:
            stream = sys.stdout if code == 0 else sys.stderr
            print(text, file=stream)
    return code


def _last_args(argv):
    try:
        return build_parser().parse_args(argv)
    except SystemExit:
        return None


if __name__ == "__main__":
    sys.exit(main())
