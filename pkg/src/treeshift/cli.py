"""Command line entry point: ``treeshift {classify,verify-extension,moments,dot}``.

Exit codes: 0 success, 1 parse/schema error, 2 window or precondition error,
3 strict-mode disagreement between symbolic verdicts and numeric oracles.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import report
from .classify import ExtensionKind, build_extension_model, classify_extension, verify_extension
from .dot import emit_dot
from .errors import DomainError, PreconditionError, SpecError, WindowError
from .moments import delta1_check, stieltjes_check
from .specfile import parse_spec
from .tree import Window, resolve_vertex

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_STRICT = 0, 1, 2, 3


def default_tol() -> float:
    value = os.environ.get("TREESHIFT_TOL")
    if value is None:
        return report.DEFAULT_TOL
    try:
        return float(value)
    except ValueError:
        raise DomainError(f"TREESHIFT_TOL={value!r} is not a number") from None


def _window(text: str) -> Window:
    try:
        return Window.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_classify(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    reports = []
    for spec in args.spec:
        shift = parse_spec(spec)
        reports.append(report.run_classify(shift, args.window, tol, name=Path(spec).name))
    doc = reports[0] if len(reports) == 1 else {"reports": reports,
                                                "summary": [[r["name"], r["formal_normality"]["status"],
                                                             r["extension"]["verdict"]] for r in reports]}
    _emit(report.dumps(doc), args.json)
    if args.json:
        for r in reports:
            print(f"{r['name']}: {r['formal_normality']['status']}, {r['extension']['verdict']}")
    if args.strict and not all(r["agreement"]["all"] for r in reports):
        bad = [r["name"] for r in reports if not r["agreement"]["all"]]
        print(f"strict: symbolic and numeric oracles disagree for {', '.join(bad)}", file=sys.stderr)
        return EXIT_STRICT
    return EXIT_OK


def cmd_verify_extension(args) -> int:
    tol = args.tol if args.tol is not None else 1e-12
    shift = parse_spec(args.spec)
    verdict = classify_extension(shift)
    if verdict.kind != ExtensionKind.PERTURBED_UNILATERAL:
        raise PreconditionError(f"{args.spec}: extension verdict is {verdict.label()}; "
                                "only PerturbedUnilateral shifts have a model to verify")
    model = build_extension_model(verdict.alpha, verdict.theta)
    rep = verify_extension(shift, model, args.window, tol)
    doc = {
        "name": Path(args.spec).name,
        "alpha": report.fmt(rep.alpha),
        "theta": report.fmt(rep.theta),
        "window": rep.window,
        "tol": rep.tol,
        "passed": rep.passed,
        "checks": {k: {"passed": c.passed, "residual": report.fmt(c.residual)} for k, c in rep.checks.items()},
        "restriction_weights": [report.fmt(x) for x in rep.restriction_weights[:8]],
    }
    _emit(report.dumps(doc), args.json)
    return EXIT_OK


def cmd_moments(args) -> int:
    shift = parse_spec(args.spec)
    u = resolve_vertex(shift.tree, args.vertex)
    values = shift.moment_sequence(u, args.count)
    doc = {"name": Path(args.spec).name, "vertex": str(u), "values": [report.fmt(x) for x in values]}
    if len(values) >= 2:
        st = stieltjes_check(values)
        doc["stieltjes"] = {"passes": st.passes, "order": st.order, "min_eig_H": report.fmt(st.min_eig_H),
                            "min_eig_H_shifted": report.fmt(st.min_eig_H_shifted),
                            "minors_H": [report.fmt(x) for x in st.minors_H[:4]]}
    doc["delta1"] = delta1_check(values, default_tol())
    _emit(report.dumps(doc), args.json)
    return EXIT_OK


def cmd_dot(args) -> int:
    shift = parse_spec(args.spec)
    emit_dot(shift, args.out, args.window)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treeshift", description="Weighted shifts on directed trees")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify one or more shift specs")
    p.add_argument("spec", nargs="+")
    p.add_argument("--window", type=_window, default=report.DEFAULT_WINDOW, help="truncation window H,R")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--strict", action="store_true", help="exit 3 if numeric oracles disagree")
    p.add_argument("--json", metavar="OUT", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify-extension", help="verify the normal-extension model of a half-line shift")
    p.add_argument("spec")
    p.add_argument("--window", type=int, default=30)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--json", metavar="OUT")
    p.set_defaults(func=cmd_verify_extension)

    p = sub.add_parser("moments", help="moment sequence ||S^n e_u||^2 with a Stieltjes test")
    p.add_argument("spec")
    p.add_argument("--vertex", required=True)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--json", metavar="OUT")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("dot", help="write a Graphviz rendering")
    p.add_argument("spec")
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=_window, default=None)
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (WindowError, PreconditionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
