"""Command-line front end: documents in, canonical JSON reports out.

Subcommands
-----------
``ord EXPR``
    Evaluate an ordinal expression ("w^2*3 + w") to its CNF JSON.
``space eval FILE``
    Index of a direct-sum space document, with the rule that produced it.
``set derive FILE --eps-q P/Q [--steps N]``
    Iterated eps-derivation of a set document, with a step-by-step trace.
    Product documents route through the union-of-products iterator.
``verify SUITE [--samples N] [--seed N]``
    Run a randomized containment-check suite; exit 1 on any failing case.
``sigma A B C D`` / ``frount D EPS Q M``
    The quantitative stage bounds, echoing their inputs.
``cover L FILE...``
    Integer-tuple cover of the q-ball spanned by factor set documents.

Reports are canonical JSON (sorted keys, fixed separators, LF) so a fixed
invocation is byte-identical across runs; anything time-dependent goes to
stderr through logging only.  Set ``SZLENK_LOG=info`` (or pass ``--log
info``; the flag wins) to see wall-clock timings.

Exit codes: 0 success, 1 verification/certification failure, 2 usage,
parse, or document errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import ordinal
from .calculus import InvalidParams, direct_sum_index, frount_M, sigma
from .checks import run_suite
from .documents import (
    SCHEMA_VERSION,
    DocumentError,
    dumps_canonical,
    fan_node_to_doc,
    fanset_from_doc,
    loads,
    space_from_doc,
    space_index_to_doc,
    trace_to_doc,
)
from .exactmath import pow_bounds
from .fansets import ProdQ, derive_steps
from .ordinal import frac_from_str, frac_to_str
from .pointmodel import ProductModel
from .products import ChainNestingViolated, bq_cover, derive_product_step, product_union_derive

LOG = logging.getLogger("szlenk.cli")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run; fixed config (incl. seed) means a
    byte-identical report."""

    command: str
    inputs: tuple[str, ...] = ()
    eps_q: tuple[Fraction, ...] = ()
    steps: tuple[int, ...] = ()
    samples: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None
    format: str = "json"
    log_level: Optional[str] = None
    params: tuple[str, ...] = field(default=(), repr=False)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="szlenk",
        description="exact Szlenk-style index computations on documents",
    )
    parser.add_argument(
        "--log",
        metavar="LEVEL",
        default=None,
        help="log level (debug/info/warning/error); overrides SZLENK_LOG",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", metavar="FILE", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json", help="report format (default json)")

    p = sub.add_parser("ord", help="evaluate an ordinal expression to CNF")
    p.add_argument("expr", help="expression over w, ^, *, +, integers")
    output_flags(p)

    p_space = sub.add_parser("space", help="space-document commands")
    space_sub = p_space.add_subparsers(dest="space_command", required=True)
    p = space_sub.add_parser("eval", help="compute the index of a space document")
    p.add_argument("file", help="space document (JSON), or - for stdin")
    output_flags(p)

    p_set = sub.add_parser("set", help="set-document commands")
    set_sub = p_set.add_subparsers(dest="set_command", required=True)
    p = set_sub.add_parser("derive", help="iterate the eps-derivation of a set document")
    p.add_argument("file", help="set document (JSON), or - for stdin")
    p.add_argument("--eps-q", required=True, metavar="P/Q", help="eps^q as a fraction, e.g. 1/2")
    p.add_argument("--steps", type=int, default=32, metavar="N", help="maximum steps (default 32)")
    output_flags(p)

    p = sub.add_parser("verify", help="run a randomized containment-check suite")
    p.add_argument("suite", help="suite name (see the checks module)")
    p.add_argument("--samples", type=int, default=100, metavar="N", help="number of cases (default 100)")
    p.add_argument("--seed", type=int, default=0, metavar="N", help="generator seed (default 0)")
    output_flags(p)

    p = sub.add_parser("sigma", help="stage bound: least n with n >= (2a/(b-c))^d - (b/(b-c))^d + 1")
    for name in ("a", "b", "c", "d"):
        p.add_argument(name, help=f"parameter {name} as a fraction")
    output_flags(p)

    p = sub.add_parser("frount", help="product emptiness bound M for m-fold derivations")
    p.add_argument("d", help="diameter bound as a fraction")
    p.add_argument("eps", help="eps as a fraction")
    p.add_argument("q", help="norm exponent q >= 1 as a fraction")
    p.add_argument("m", type=int, help="derivation depth m >= 2")
    output_flags(p)

    p = sub.add_parser("cover", help="integer-tuple cover of the q-ball of scaled factors")
    p.add_argument("l", type=int, help="grid resolution l >= 1")
    p.add_argument("files", nargs="+", metavar="FILE", help="factor set documents (same q)")
    output_flags(p)

    return parser


def command_name(args: argparse.Namespace) -> str:
    if args.command == "space":
        return f"space {args.space_command}"
    if args.command == "set":
        return f"set {args.set_command}"
    return args.command


def config_from_args(args: argparse.Namespace) -> RunConfig:
    name = command_name(args)
    inputs: tuple[str, ...] = ()
    if hasattr(args, "file"):
        inputs = (args.file,)
    elif hasattr(args, "files"):
        inputs = tuple(args.files)
    eps_q: tuple[Fraction, ...] = ()
    if getattr(args, "eps_q", None) is not None:
        eps_q = (_parse_frac(args.eps_q, "--eps-q"),)
    steps = (args.steps,) if hasattr(args, "steps") else ()
    params: tuple[str, ...] = ()
    if name == "ord":
        params = (args.expr,)
    elif name == "verify":
        params = (args.suite,)
    elif name == "sigma":
        params = (args.a, args.b, args.c, args.d)
    elif name == "frount":
        params = (args.d, args.eps, args.q, str(args.m))
    elif name == "cover":
        params = (str(args.l),)
    return RunConfig(
        command=name,
        inputs=inputs,
        eps_q=eps_q,
        steps=steps,
        samples=getattr(args, "samples", None),
        seed=getattr(args, "seed", 0),
        out=args.out,
        format=args.format,
        log_level=args.log,
        params=params,
    )


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _parse_frac(text: str, what: str) -> Fraction:
    try:
        return frac_from_str(text)
    except ValueError:
        raise InvalidParams(f"{what} must be a fraction like 3/4, got {text!r}") from None


def _read_json(path: str) -> object:
    if path == "-":
        return loads(sys.stdin.read())
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from None
    return loads(text)


def _setup_logging(flag: Optional[str]) -> None:
    name = flag if flag is not None else os.environ.get("SZLENK_LOG", "warning")
    level = getattr(logging, str(name).upper(), None)
    if not isinstance(level, int):
        raise InvalidParams(f"unknown log level {name!r}")
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )
    logging.getLogger("szlenk").setLevel(level)


def _emit(doc: dict, cfg: RunConfig) -> None:
    if cfg.format == "json":
        text = dumps_canonical(doc)
    else:
        text = _render_text(cfg.command, doc)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# command handlers: each returns (report document, exit code)
# ---------------------------------------------------------------------------


def cmd_ord(cfg: RunConfig) -> tuple[dict, int]:
    value = ordinal.parse(cfg.params[0])
    return ordinal.to_json(value), EXIT_OK


def cmd_space_eval(cfg: RunConfig) -> tuple[dict, int]:
    expr = space_from_doc(_read_json(cfg.inputs[0]))
    result = direct_sum_index(expr)
    doc = {
        "v": SCHEMA_VERSION,
        "command": cfg.command,
        "result": space_index_to_doc(result),
    }
    return doc, EXIT_OK


def cmd_set_derive(cfg: RunConfig) -> tuple[dict, int]:
    F, q = fanset_from_doc(_read_json(cfg.inputs[0]))
    (eps_q,) = cfg.eps_q
    (steps,) = cfg.steps
    if eps_q <= 0:
        raise InvalidParams("--eps-q must be positive")
    if steps < 0:
        raise InvalidParams("--steps must be >= 0")
    if isinstance(F, ProdQ):
        return _derive_product(F, q, eps_q, steps, cfg)
    _, trace = derive_steps(F, eps_q, steps)
    settled = next((s.step for s in trace.steps if s.snapshot is None), None)
    doc = {
        "v": SCHEMA_VERSION,
        "command": cfg.command,
        "eps_q": frac_to_str(eps_q),
        "trace": trace_to_doc(trace, q, settled),
    }
    return doc, EXIT_OK


def _derive_product(
    F: ProdQ, q: Fraction, eps_q: Fraction, steps: int, cfg: RunConfig
) -> tuple[dict, int]:
    """Product documents: iterate the certified union-of-products form.

    The trace records term/point counts per step rather than snapshots
    (derived products need not stay products)."""
    model = ProductModel.of(list(F.factors))
    entries = [
        {
            "step": 0,
            "terms": 1,
            "points": math.prod(len(p) for p in model.factor_points),
        }
    ]
    settled: Optional[int] = None
    violation: Optional[dict] = None
    if steps >= 1:
        pu = derive_product_step([(Fraction(1), f) for f in F.factors], eps_q)
        entries.append({"step": 1, "terms": len(pu.terms), "points": len(pu.points())})
        if pu.is_empty():
            settled = 1
        k = 1
        while settled is None and k < steps:
            k += 1
            try:
                pu = product_union_derive(pu, eps_q)
            except ChainNestingViolated as exc:
                violation = {"step": k, "message": str(exc)}
                break
            entries.append({"step": k, "terms": len(pu.terms), "points": len(pu.points())})
            if pu.is_empty():
                settled = k
    doc = {
        "v": SCHEMA_VERSION,
        "command": cfg.command,
        "eps_q": frac_to_str(eps_q),
        "q": frac_to_str(q),
        "product": True,
        "steps": entries,
        "sz_eps": settled,
    }
    if violation is not None:
        doc["chain_nesting_violated"] = violation
        return doc, EXIT_FAIL
    return doc, EXIT_OK


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    report = run_suite(cfg.params[0], cfg.samples, cfg.seed)
    cases = []
    for c in report.cases:
        entry: dict = {"index": c.index, "passed": c.passed, "detail": c.detail}
        if c.counterexample:
            entry["counterexample"] = c.counterexample
        cases.append(entry)
    doc = {
        "v": SCHEMA_VERSION,
        "command": cfg.command,
        "suite": report.suite,
        "samples": report.samples,
        "seed": cfg.seed,
        "passed": report.passed,
        "failed": report.failed,
        "cases": cases,
    }
    return doc, (EXIT_OK if report.failed == 0 else EXIT_FAIL)


def cmd_sigma(cfg: RunConfig) -> tuple[dict, int]:
    a, b, c, d = (_parse_frac(s, n) for s, n in zip(cfg.params, "abcd"))
    value = sigma(a, b, c, d)
    doc = {
        "v": SCHEMA_VERSION,
        "command": cfg.command,
        "params": {
            "a": frac_to_str(a),
            "b": frac_to_str(b),
            "c": frac_to_str(c),
            "d": frac_to_str(d),
        },
        "value": value,
    }
    return doc, EXIT_OK


def cmd_frount(cfg: RunConfig) -> tuple[dict, int]:
    d = _parse_frac(cfg.params[0], "d")
    eps = _parse_frac(cfg.params[1], "eps")
    qv = _parse_frac(cfg.params[2], "q")
    m = int(cfg.params[3])
    if eps <= 0 or qv < 1:
        raise InvalidParams("frount needs eps > 0 and q >= 1")
    # eps enters through its q-th power; round it down so the reported M
    # never understates the bound for the true eps.
    eps_q = pow_bounds(eps, qv)[0]
    value = frount_M(d, eps_q, qv, m)
    doc = {
        "v": SCHEMA_VERSION,
        "command": cfg.command,
        "params": {
            "d": frac_to_str(d),
            "eps": frac_to_str(eps),
            "q": frac_to_str(qv),
            "m": m,
        },
        "value": value,
    }
    return doc, EXIT_OK


def cmd_cover(cfg: RunConfig) -> tuple[dict, int]:
    l = int(cfg.params[0])
    factors = []
    qs = []
    for path in cfg.inputs:
        F, q = fanset_from_doc(_read_json(path))
        factors.append(F)
        qs.append(q)
    if len(set(qs)) != 1:
        raise DocumentError("all factor documents must share the same q")
    cover = bq_cover(factors, l, qs[0])
    doc = {
        "v": SCHEMA_VERSION,
        "command": cfg.command,
        "l": cover.l,
        "q": frac_to_str(cover.q),
        "n": cover.n,
        "tuples": [list(k) for k in cover.tuples],
        "products": [[fan_node_to_doc(f) for f in prod] for prod in cover.products],
    }
    return doc, EXIT_OK


_HANDLERS = {
    "ord": cmd_ord,
    "space eval": cmd_space_eval,
    "set derive": cmd_set_derive,
    "verify": cmd_verify,
    "sigma": cmd_sigma,
    "frount": cmd_frount,
    "cover": cmd_cover,
}


# ---------------------------------------------------------------------------
# text rendering
# ---------------------------------------------------------------------------


def _render_text(command: str, doc: dict) -> str:
    lines: list[str] = []
    if command == "ord":
        lines.append(ordinal.to_text(ordinal.from_json(doc)))
    elif command == "space eval":
        r = doc["result"]
        if r["kind"] == "ordinal":
            lines.append(
                f"index {r['index_text']}  (rule {r['rule']}, compact={str(r['compact']).lower()})"
            )
        else:
            lines.append(f"not Asplund  (rule {r['rule']})")
    elif command == "set derive":
        if doc.get("product"):
            for s in doc["steps"]:
                lines.append(f"step {s['step']}: terms={s['terms']} points={s['points']}")
            bad = doc.get("chain_nesting_violated")
            if bad is not None:
                lines.append(f"chain nesting violated at step {bad['step']}: {bad['message']}")
            elif doc["sz_eps"] is not None:
                lines.append(f"sz_eps = {doc['sz_eps']}")
            else:
                lines.append("not empty within the step budget")
        else:
            for s in doc["trace"]["steps"]:
                if s["set"] is None:
                    lines.append(f"step {s['step']}: empty")
                else:
                    lines.append(
                        f"step {s['step']}: apexes={s['apexes']} diam_q={s['diam_q']}"
                    )
            sz = doc["trace"]["sz_eps"]
            lines.append(
                f"sz_eps = {sz}" if sz is not None else "not empty within the step budget"
            )
    elif command == "verify":
        lines.append(
            f"suite {doc['suite']}: {doc['passed']}/{doc['samples']} passed, "
            f"{doc['failed']} failed"
        )
        for c in doc["cases"]:
            if not c["passed"]:
                cex = f"  [{c['counterexample']}]" if "counterexample" in c else ""
                lines.append(f"case {c['index']}: FAIL {c['detail']}{cex}")
    elif command == "sigma":
        p = doc["params"]
        lines.append(
            f"sigma({p['a']}, {p['b']}, {p['c']}, {p['d']}) = {doc['value']}"
        )
    elif command == "frount":
        p = doc["params"]
        lines.append(
            f"M(d={p['d']}, eps={p['eps']}, q={p['q']}, m={p['m']}) = {doc['value']}"
        )
    elif command == "cover":
        lines.append(
            f"cover: n={doc['n']} l={doc['l']} q={doc['q']} tuples={len(doc['tuples'])}"
        )
        for k in doc["tuples"]:
            scales = ", ".join(frac_to_str(Fraction(ki, doc["l"])) for ki in k)
            lines.append(f"  k=({', '.join(map(str, k))})  scales=({scales})")
    else:  # pragma: no cover - parser restricts commands
        raise InvalidParams(f"unknown command {command!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = config_from_args(args)
        _setup_logging(cfg.log_level)
        handler = _HANDLERS[cfg.command]
        start = time.perf_counter()
        doc, code = handler(cfg)
        LOG.info("%s finished in %.3f s", cfg.command, time.perf_counter() - start)
        _emit(doc, cfg)
        return code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
