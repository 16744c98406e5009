"""Command line: ``cpfcert check|validate|render``.

Exit codes: 0 certified, 1 rejected, 2 partially certified, 3 unsupported,
4 parse/schema/I-O error.  With several files the most severe outcome wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .checker import check
from .cpf_io import ParseError, SchemaError, parse_certificate, validate_schema
from .model import Certified, PartiallyCertified, Rejected, Unsupported, validate_structure
from .render import render_html
from .terms import DEFAULT_FUEL

EXIT_CODES = {Certified: 0, Rejected: 1, PartiallyCertified: 2, Unsupported: 3}
IO_ERROR = 4
# Rejected > Unsupported > PartiallyCertified > Certified; errors above all
_SEVERITY = {0: 0, 2: 1, 3: 2, 1: 3, IO_ERROR: 4}


def exit_code(verdict) -> int:
    return EXIT_CODES[type(verdict)]


def combine_exit_codes(codes) -> int:
    return max(codes, key=_SEVERITY.__getitem__, default=0)


def verdict_to_json(verdict) -> dict:
    return {
        "verdict": verdict.kind,
        "path": getattr(verdict, "path", None),
        "obligations": list(getattr(verdict, "obligations", ())),
        "reason": getattr(verdict, "reason", None)
        or (f"unsupported input {verdict.element}" if isinstance(verdict, Unsupported) else None),
    }


def verdict_from_json(data: dict):
    match data["verdict"]:
        case "CERTIFIED":
            return Certified()
        case "PARTIALLY_CERTIFIED":
            return PartiallyCertified(tuple(data["obligations"]))
        case "REJECTED":
            return Rejected(data["path"], data["reason"])
        case "UNSUPPORTED":
            return Unsupported(data["reason"].removeprefix("unsupported input "))
    raise ValueError(f"unknown verdict {data['verdict']!r}")


def format_verdict(verdict) -> str:
    match verdict:
        case Certified():
            return "CERTIFIED"
        case PartiallyCertified(obligations):
            lines = ["PARTIALLY CERTIFIED, open obligations:"]
            return "\n".join(lines + [f"  - {o}" for o in obligations])
        case Rejected(path, reason):
            return f"REJECTED at {path}: {reason}"
        case Unsupported(element):
            return f"UNSUPPORTED: {element}"
    raise TypeError(verdict)


def _default_fuel() -> int:
    env = os.environ.get("CPFCERT_FUEL")
    if env:
        try:
            return int(env)
        except ValueError:
            print(f"cpfcert: ignoring non-integer CPFCERT_FUEL={env!r}", file=sys.stderr)
    return DEFAULT_FUEL


def _load(path: str):
    data = Path(path).read_bytes()
    cp = parse_certificate(data)
    defects = validate_structure(cp)
    if defects:
        raise SchemaError(defects[0].path, defects[0].message)
    return cp


def _cmd_check(args, out, err) -> int:
    codes = []
    for path in args.files:
        buf = []
        try:
            verdict = check(_load(path), fuel=args.fuel)
        except (OSError, ParseError, SchemaError) as e:
            err.write(f"{path}: error: {e}\n")
            codes.append(IO_ERROR)
            continue
        if args.format == "json":
            buf.append(json.dumps({"file": path, **verdict_to_json(verdict)}))
        else:
            prefix = f"{path}: " if len(args.files) > 1 else ""
            buf.append(prefix + format_verdict(verdict))
        out.write("\n".join(buf) + "\n")
        codes.append(exit_code(verdict))
    return combine_exit_codes(codes)


def _cmd_validate(args, out, err) -> int:
    codes = []
    for path in args.files:
        try:
            problems = validate_schema(Path(path).read_bytes())
        except OSError as e:
            err.write(f"{path}: error: {e}\n")
            codes.append(IO_ERROR)
            continue
        if problems:
            err.write("".join(f"{path}: {p}\n" for p in problems))
            codes.append(IO_ERROR)
        else:
            out.write(f"{path}: valid\n")
            codes.append(0)
    return combine_exit_codes(codes)


def _cmd_render(args, out, err) -> int:
    try:
        html = render_html(_load(args.file))
    except (OSError, ParseError, SchemaError) as e:
        err.write(f"{args.file}: error: {e}\n")
        return IO_ERROR
    if args.output:
        Path(args.output).write_text(html, encoding="utf-8")
    else:
        out.write(html)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpfcert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", help="parse, validate and check certificates")
    p.add_argument("files", nargs="+")
    p.add_argument("--fuel", type=int, default=None,
                   help=f"rewrite steps per normal form (default {DEFAULT_FUEL}, env CPFCERT_FUEL)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=_cmd_check)
    p = sub.add_parser("validate", help="structural schema check only")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=_cmd_validate)
    p = sub.add_parser("render", help="render a certificate as HTML")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_render)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return IO_ERROR if e.code else 0
    if getattr(args, "fuel", 0) is None:
        args.fuel = _default_fuel()
    if getattr(args, "fuel", 0) < 0:
        err.write("cpfcert: --fuel must be non-negative\n")
        return IO_ERROR
    return args.func(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
