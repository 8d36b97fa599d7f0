"""Command-line entry point.

Verbs: ``normalize``, ``critical``, ``confluence``, ``termination``,
``homotopy-basis``, ``decide``, ``info``, ``export``.  A polygraph comes from
a compiled-in preset (``--preset``) or a file (``--polygraph``); reports are
emitted as text or JSON.  Exit codes: 0 = success/Equal, 1 = the analysis
found a failure (non-confluence, failed certificate, NotEqual/NotParallel),
2 = input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .coherence import (
    CoherenceError,
    PRESET_NAMES,
    Preset,
    decide_coherence,
    get_preset,
)
from .critical import (
    ConfluenceError,
    CriticalError,
    asphericity_pipeline,
    check_local_confluence,
    enumerate_critical_branchings,
    homotopy_basis,
    FailureReport,
)
from .diagram import DiagramError, canonical_form, parse_diagram, print_diagram
from .rewrite import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    Polygraph,
    RewriteError,
    normalize,
    parse_polygraph,
    parse_trace,
    print_polygraph,
    print_trace,
)
from .termination import TerminationError, check_decrease, parse_interpretation


class InputError(Exception):
    """Bad command-line input; maps to exit code 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyrew",
        description="polygraphic rewriting workbench for PROs and PROPs",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in (
        "normalize",
        "critical",
        "confluence",
        "termination",
        "homotopy-basis",
        "decide",
        "info",
        "export",
    ):
        p = sub.add_parser(verb)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--preset", choices=PRESET_NAMES)
        src.add_argument("--polygraph", metavar="FILE")
        p.add_argument("--expr")
        p.add_argument("--trace", action="append", default=[], metavar="FILE")
        p.add_argument("--interp", metavar="FILE")
        p.add_argument("--bound", type=int)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--max-extra-width", type=int, default=2)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", metavar="FILE")
        p.add_argument("--assume-terminating", action="store_true")
    return parser


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_preset(args) -> Preset | None:
    return get_preset(args.preset) if args.preset else None


def _load_polygraph(args) -> Polygraph:
    if args.preset:
        return get_preset(args.preset).polygraph
    if args.polygraph:
        return parse_polygraph(_read(args.polygraph))
    raise InputError("exactly one of --preset or --polygraph is required")


def _load_interp(args, preset: Preset | None):
    if args.interp:
        _, interp = parse_interpretation(_read(args.interp))
    elif preset is not None and preset.interp is not None:
        interp = preset.interp
    else:
        return None
    if args.bound is not None:
        interp = dataclasses.replace(interp, grid_bound=args.bound)
    return interp


# -- verbs -----------------------------------------------------------------


def _cmd_normalize(args):
    p = _load_polygraph(args)
    if not args.expr:
        raise InputError("normalize requires --expr")
    d = parse_diagram(args.expr, p.signature)
    nf, trace = normalize(d, p, args.budget)
    report = {
        "input": print_diagram(canonical_form(d)),
        "normal_form": print_diagram(nf),
        "steps": len(trace.steps),
        "trace": print_trace(trace, "normalization"),
    }
    text = f"{report['normal_form']}\n{report['steps']} step(s)"
    return 0, report, text


def _cmd_critical(args):
    p = _load_polygraph(args)
    branchings = enumerate_critical_branchings(p, args.max_extra_width)
    report = {
        "count": len(branchings),
        "branchings": [b.to_dict() for b in branchings],
    }
    lines = [f"{len(branchings)} critical branching(s)"]
    for b in branchings:
        lines.append(f"  {b.rules[0]} / {b.rules[1]} on {print_diagram(b.source)}")
    return 0, report, "\n".join(lines)


def _cmd_confluence(args):
    p = _load_polygraph(args)
    branchings = enumerate_critical_branchings(p, args.max_extra_width)
    results = [check_local_confluence(p, b, args.budget) for b in branchings]
    failures = [r for r in results if isinstance(r, FailureReport)]
    report = {
        "count": len(branchings),
        "confluent": not failures,
        "results": [r.to_dict() for r in results],
        "failure_count": len(failures),
    }
    lines = [
        f"{len(branchings)} branching(s), "
        + ("all locally confluent" if not failures
           else f"{len(failures)} NOT locally confluent")
    ]
    for f in failures:
        lines.append(
            f"  FAIL {f.branching.rules[0]} / {f.branching.rules[1]} on "
            f"{print_diagram(f.branching.source)}"
        )
    return (0 if not failures else 1), report, "\n".join(lines)


def _cmd_termination(args):
    p = _load_polygraph(args)
    interp = _load_interp(args, _load_preset(args))
    if interp is None:
        raise InputError(
            "termination requires --interp (or a preset with a built-in "
            "interpretation)"
        )
    cert = check_decrease(p, interp)
    return (0 if cert.passed else 1), cert.to_dict(), cert.verdict


def _cmd_homotopy_basis(args):
    p = _load_polygraph(args)
    interp = _load_interp(args, _load_preset(args))
    try:
        basis = homotopy_basis(
            p,
            interp=interp,
            assume_terminating=args.assume_terminating,
            max_extra_width=args.max_extra_width,
            budget=args.budget,
        )
    except ConfluenceError as exc:
        report = {
            "error": str(exc),
            "failures": [f.to_dict() for f in exc.failures],
        }
        return 1, report, f"no homotopy basis: {exc}"
    report = {"count": len(basis), "cells": [cd.to_dict() for cd in basis]}
    lines = [f"homotopy basis with {len(basis)} generating 4-cell(s)"]
    for cd in basis:
        b = cd.branching
        lines.append(f"  {b.rules[0]} / {b.rules[1]} on {print_diagram(b.source)}")
    return 0, report, "\n".join(lines)


def _cmd_decide(args):
    preset = _load_preset(args)
    if preset is None:
        raise InputError("decide requires --preset")
    if len(args.trace) != 2:
        raise InputError("decide requires exactly two --trace files")
    t1 = parse_trace(_read(args.trace[0]), preset.polygraph)
    t2 = parse_trace(_read(args.trace[1]), preset.polygraph)
    decision = decide_coherence(preset, t1, t2)
    code = 0 if decision.outcome == "Equal" else 1
    return code, decision.to_dict(), decision.outcome


def _cmd_info(args):
    p = _load_polygraph(args)
    preset = _load_preset(args)
    interp = _load_interp(args, preset)
    expected = preset.expected_proper if preset else None
    report = asphericity_pipeline(
        p,
        interp=interp,
        expected_proper=expected,
        max_extra_width=args.max_extra_width,
        budget=args.budget,
    )
    lines = [
        f"polygraph {report.polygraph} "
        f"({'prop' if report.is_prop else 'pro'}, {len(p.rules)} rule(s))",
        f"branchings: {len(report.branchings)}",
        f"confluent: {report.confluent}",
    ]
    if report.family_counts:
        tally = ", ".join(f"{k}={v}" for k, v in report.family_counts.items())
        lines.append(f"families: {tally}")
    lines.append(f"verdict: {report.verdict}")
    return (0 if report.ok else 1), report.to_dict(), "\n".join(lines)


def _cmd_export(args):
    p = _load_polygraph(args)
    text = print_polygraph(p)
    return 0, {"polygraph": text}, text.rstrip("\n")


_VERBS = {
    "normalize": _cmd_normalize,
    "critical": _cmd_critical,
    "confluence": _cmd_confluence,
    "termination": _cmd_termination,
    "homotopy-basis": _cmd_homotopy_basis,
    "decide": _cmd_decide,
    "info": _cmd_info,
    "export": _cmd_export,
}


def _emit(args, report: dict, text: str) -> None:
    payload = (
        json.dumps(report, indent=2) if args.format == "json" else text
    ) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(payload)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(payload)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        code, report, text = _VERBS[args.verb](args)
        _emit(args, report, text)
        return code
    except (
        InputError,
        DiagramError,
        RewriteError,
        TerminationError,
        CriticalError,
        CoherenceError,
        BudgetExceededError,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
