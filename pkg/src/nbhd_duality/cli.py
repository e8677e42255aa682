"""Command-line interface: ``nbhd VERB ...``.

Results are JSON on standard output; diagnostics go to standard error.
Exit codes: 0 success, 1 domain error (JSON error object), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import lab
from . import syntax as sx
from .algebra import FiniteModalAlgebra, as_meet_families, check_algebra_properties
from .duality import build_J, build_Jbar, build_K, stone_map
from .errors import NbhdError
from .frames import NeighborhoodFrame, check_frame_properties
from .selftest import default_jobs, run_selftest


@dataclass
class CommandReport:
    command: str
    inputs: dict[str, Any] = field(default_factory=dict)
    result: Any = None
    exit_code: int = 0

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs,
                "result": self.result, "exit_code": self.exit_code}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise NbhdError(f"cannot read {path}: {e.strerror}") from None


def _read_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise NbhdError(f"{path} is not valid JSON: {e}") from None


def _formula_lines(text: str) -> list[str]:
    lines = [ln.strip() for ln in text.splitlines()]
    return [ln for ln in lines if ln and not ln.startswith("#")]


def _class(text: str) -> lab.LogicClass:
    return lab.LogicClass.parse(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nbhd", description="Neighborhood semantics and modal algebra toolkit.")
    p.add_argument("--pretty", action="store_true", help="human-readable output")
    p.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps")
    # the global options are also accepted after the verb
    common = _Parser(add_help=False)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)
    sub.required = True

    def verb(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[common])

    s = verb("parse", help="parse formulas, one per line")
    s.add_argument("file")

    s = verb("check-frame", help="closure flags of a frame")
    s.add_argument("file")

    s = verb("check-algebra", help="flags of a modal algebra")
    s.add_argument("file")

    s = verb("dualize", help="frame from algebra (--j/--jbar) or algebra from frame (--k)")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--j", action="store_true")
    g.add_argument("--jbar", action="store_true")
    g.add_argument("--k", action="store_true")
    s.add_argument("file")
    s.add_argument("--meets")

    s = verb("represent", help="check the representation map")
    s.add_argument("file")
    s.add_argument("--meets", required=True)
    s.add_argument("--jbar", action="store_true")

    s = verb("decide", help="decide validity in a logic class")
    s.add_argument("formula")
    s.add_argument("--class", dest="cls", default="")
    s.add_argument("--bound", type=int, default=lab.DEFAULT_MAX_BASIS)

    s = verb("countermodel", help="search a bounded countermodel")
    s.add_argument("formula")
    s.add_argument("--class", dest="cls", default="")
    s.add_argument("--max-worlds", type=int, default=4)
    s.add_argument("--bound", type=int, default=lab.DEFAULT_MAX_BASIS)

    s = verb("model-existence", help="model for a formula set via the fragment")
    s.add_argument("--formulas", required=True)
    s.add_argument("--class", dest="cls", default="")

    verb("bf-demo", help="Barcan formula countermodel")
    verb("omega-bf-demo", help="omega-Barcan countermodel and finite contrast")

    s = verb("selftest", help="run the invariant suites")
    s.add_argument("--exhaustive", action="store_true")
    return p


def _dispatch(args) -> tuple[Any, int]:
    verb = args.verb
    if verb == "parse":
        out = []
        for line in _formula_lines(_read_text(args.file)):
            phi = sx.parse(line)
            out.append({"input": line, "text": sx.to_text(phi), "ast": sx.to_json(phi),
                        "modal_depth": sx.modal_depth(phi)})
        return {"formulas": out}, 0
    if verb == "check-frame":
        Z = NeighborhoodFrame.from_json(_read_json(args.file))
        return {"frame": Z.to_json(), "properties": check_frame_properties(Z).to_json()}, 0
    if verb == "check-algebra":
        A = FiniteModalAlgebra.from_json(_read_json(args.file))
        return {"algebra": A.to_json(), "properties": check_algebra_properties(A).to_json()}, 0
    if verb == "dualize":
        if args.k:
            return {"algebra": build_K(NeighborhoodFrame.from_json(_read_json(args.file))).to_json()}, 0
        A = FiniteModalAlgebra.from_json(_read_json(args.file))
        S = as_meet_families(_read_json(args.meets), A) if args.meets else None
        Z = build_J(A, S) if args.j else build_Jbar(A, S)
        return {"frame": Z.to_json()}, 0
    if verb == "represent":
        A = FiniteModalAlgebra.from_json(_read_json(args.file))
        S = as_meet_families(_read_json(args.meets), A)
        f, report = stone_map(A, S, "Jbar" if args.jbar else "J")
        return {"map": f, "report": report.to_json()}, 0
    if verb == "decide":
        phi = sx.parse(args.formula)
        return lab.decide_valid(phi, _class(args.cls), max_basis=args.bound).to_json(), 0
    if verb == "countermodel":
        phi = sx.parse(args.formula)
        M = lab.find_countermodel(phi, _class(args.cls), max_worlds=args.max_worlds,
                                  max_basis=args.bound)
        return {"found": M is not None, "max_worlds": args.max_worlds,
                "model": None if M is None else M.to_json()}, 0
    if verb == "model-existence":
        formulas = [sx.parse(ln) for ln in _formula_lines(_read_text(args.formulas))]
        return lab.model_existence_report(formulas, _class(args.cls)).to_json(), 0
    if verb == "bf-demo":
        return lab.bf_countermodel(), 0
    if verb == "omega-bf-demo":
        return lab.omega_bf_countermodel(), 0
    if verb == "selftest":
        results = run_selftest(args.exhaustive, args.jobs)
        ok = all(r.passed for r in results)
        return {"passed": ok, "suites": [r.to_json() for r in results]}, 0 if ok else 1
    raise _UsageError(f"unknown verb {verb}")


def run(argv: Sequence[str] | None = None) -> CommandReport:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        return CommandReport("usage", {"argv": argv}, {"error": {"type": "UsageError",
                                                                   "message": str(e)}}, 2)
    except SystemExit as e:  # --help
        return CommandReport("help", {"argv": argv}, None, int(e.code or 0))
    if args.jobs is None:
        args.jobs = default_jobs()
    inputs = {k: v for k, v in vars(args).items() if k not in ("verb",)}
    try:
        result, code = _dispatch(args)
    except (NbhdError, ValueError) as e:
        err = {"type": type(e).__name__, "message": str(e)}
        if isinstance(e, sx.ParseError):
            err["position"] = e.position
        return CommandReport(args.verb, inputs, {"error": err}, 1)
    return CommandReport(args.verb, inputs, result, code)


def render(value: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            return pad + json.dumps(value)
        return "\n".join(f"{pad}-\n{render(v, indent + 1)}" for v in value)
    return pad + json.dumps(value)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    report = run(argv)
    if report.command not in ("usage", "help"):
        if report.inputs.get("pretty"):
            print(render(report.result))
        else:
            print(json.dumps(report.result))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
