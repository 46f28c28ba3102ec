"""Command line front-end: ``python -m duoidal SUBCOMMAND ...``.

Exit status is 0 on success (or "equal"), 1 when a check fails (or
"distinct"), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import diagram as D
from .errors import DuoidalError
from .evaluation import SelfAlgebra, WeightAlgebra, eval_diagram
from .expr import to_text
from .terms import load
from .zetless import decode, enumerate_zetless

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


def _where(path, err):
    line = getattr(err, "line", None)
    return f"{path}:{line}" if line is not None else path


def _describe(err):
    text = f"{type(err).__name__}: {err}"
    wires = getattr(err, "wires", None)
    if wires:
        text += f" [wires {', '.join(map(str, wires))}]"
    return text


def _diagram(f, name):
    if name not in f:
        raise UsageError(f"{f.path}: no term named {name!r}")
    return f.diagram(name)


def cmd_check(args, out):
    f = load(args.file)
    failed = 0
    for name in f.names():
        try:
            d = f.diagram(name)
            D.validate(d)
        except DuoidalError as e:
            failed += 1
            print(f"{_where(f.path, e)}: {name}: {_describe(e)}", file=out)
            continue
        print(f"{name}: ok  {to_text(d.source)} -> {to_text(d.target)}", file=out)
    return 1 if failed else 0


def cmd_eq(args, out):
    f = load(args.file)
    a, b = _diagram(f, args.lhs), _diagram(f, args.rhs)
    same = D.equal(a, b, up_to_symmetry=args.up_to_symmetry)
    print("equal" if same else "distinct", file=out)
    return 0 if same else 1


def _normal_json(d):
    return json.dumps(D.to_json(D.canonical_diagram(d)), indent=2, sort_keys=True)


def cmd_normalize(args, out):
    f = load(args.file)
    print(_normal_json(_diagram(f, args.term)), file=out)
    return 0


def cmd_render(args, out):
    f = load(args.file)
    d = _diagram(f, args.term)
    if args.dot:
        out.write(D.to_dot(d, poset=args.poset, name=args.term))
    else:
        out.write(D.to_ascii(d))
    return 0


def cmd_enumerate(args, out):
    types = [t for t in args.types.split(",") if t]
    if not types:
        raise UsageError("--types needs at least one type name")
    posets = enumerate_zetless(args.n, types)
    for p in posets:
        rel = ", ".join(f"{x}<={y}" for x, y in p.strict_pairs())
        print(f"{to_text(decode(p)):<24} labels={list(p.labels)} order={{{rel}}}", file=out)
    print(f"count: {len(posets)}", file=out)
    return 0


def _weights(text):
    weights = {}
    for item in filter(None, (text or "").split(",")):
        name, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"bad weight {item!r}, expected NAME=INT")
        try:
            weights[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"bad weight {item!r}, expected NAME=INT") from None
    return weights


def cmd_eval(args, out):
    f = load(args.file)
    d = _diagram(f, args.term)
    D.validate(d)
    if args.algebra == "weight":
        print(eval_diagram(WeightAlgebra(_weights(args.weights)), d), file=out)
    else:
        result = eval_diagram(SelfAlgebra(f.signature), d)
        print(_normal_json(result), file=out)
        print("equal to input" if D.equal(result, d) else "differs from input", file=out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="duoidal", description="String diagrams for physical duoidal categories.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="elaborate and validate every term of a file")
    s.add_argument("file")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("eq", help="compare two terms as string diagrams")
    s.add_argument("file")
    s.add_argument("lhs")
    s.add_argument("rhs")
    s.add_argument("--up-to-symmetry", action="store_true",
                   help="compare boundaries up to reordering of tensor factors")
    s.set_defaults(run=cmd_eq)

    s = sub.add_parser("normalize", help="print the canonical JSON form of a term")
    s.add_argument("file")
    s.add_argument("term")
    s.set_defaults(run=cmd_normalize)

    s = sub.add_parser("render", help="draw a term as DOT or text")
    s.add_argument("file")
    s.add_argument("term")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--ascii", action="store_true")
    s.add_argument("--poset", action="store_true", help="also emit the derived wire order (DOT)")
    s.set_defaults(run=cmd_render)

    s = sub.add_parser("enumerate", help="list zetless posets of a given size")
    s.add_argument("n", type=int)
    s.add_argument("--types", default="A")
    s.set_defaults(run=cmd_enumerate)

    s = sub.add_parser("eval", help="evaluate a term in a built-in algebra")
    s.add_argument("file")
    s.add_argument("term")
    s.add_argument("--algebra", choices=["weight", "self"], default="weight")
    s.add_argument("--weights", default="", help="NAME=INT,... for the weight algebra")
    s.set_defaults(run=cmd_eval)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.run(args, out)
    except UsageError as e:
        print(f"error: {e}", file=err)
        return 2
    except OSError as e:
        print(f"error: {e}", file=err)
        return 2
    except DuoidalError as e:
        path = getattr(args, "file", "<input>")
        print(f"{_where(path, e)}: {_describe(e)}", file=err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
