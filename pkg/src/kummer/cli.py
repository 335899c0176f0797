"""Command-line front end.

JSON goes to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 verification failures, 2 usage or domain error, 3 vacuous verification.
Vectors are given in the basis ``e1, f1, e2, f2, e3, f3, delta``.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from typing import Sequence

from .invariant import (
    admissible_divisibilities,
    canonical_embedding,
    find_b,
    h_lattice,
    theta,
)
from .lattice import DomainError, LatticeError, kummer_lattice, pair
from .mukai import kummer_fibration_poltype, bm_witness
from .oracle import (
    EnumerationConfig,
    Report,
    default_bound,
    enumerate_isotropic,
    verify_faithful,
    verify_lemmas,
    verify_surjective,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_VACUOUS = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _emit(obj, human: bool):
    if human:
        _print_human(obj)
    else:
        print(json.dumps(obj))


def _print_human(obj, indent: int = 0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                         (v.values() if isinstance(v, dict) else v)):
                print(f"{pad}{k}:")
                _print_human(v, indent + 1)
            else:
                print(f"{pad}{k}: {_fmt(v)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, dict):
                print(pad + "  ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
            else:
                print(pad + _fmt(item))
    else:
        print(pad + _fmt(obj))


def _fmt(v) -> str:
    if isinstance(v, list):
        return "(" + ",".join(_fmt(x) for x in v) + ")"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}={_fmt(x)}" for k, x in v.items()) + "}"
    return str(v)


def _need_n2(n: int):
    if n < 2:
        raise CliError(f"n must be >= 2 (got {n})")


def _parse_vector(text: str) -> tuple[int, ...]:
    try:
        coords = tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise CliError(f"cannot parse vector {text!r}")
    if len(coords) != 7:
        raise CliError(f"expected 7 coordinates (e1,f1,e2,f2,e3,f3,delta), got {len(coords)}")
    return coords


def _classify(n: int, coords: Sequence[int]) -> dict:
    alpha = kummer_lattice(n).vector(coords)
    q = pair(alpha, alpha)
    if q:
        raise CliError(f"not isotropic, (alpha,alpha) = {q}")
    inv = theta(alpha, n)
    return {
        "vector": list(coords),
        "d": inv.d,
        "b": find_b(alpha),
        "invariant": inv.to_json(),
        "h_gram": [list(r) for r in h_lattice(alpha).gram()],
        "poltype": list(kummer_fibration_poltype(n, inv.d)),
    }


def cmd_poltype(args) -> int:
    _need_n2(args.n)
    if args.d is not None:
        out = {"n": args.n, "d": args.d, "poltype": list(kummer_fibration_poltype(args.n, args.d))}
    else:
        out = {"n": args.n, "rows": [
            {"d": d, "poltype": list(kummer_fibration_poltype(args.n, d))}
            for d in admissible_divisibilities(args.n)]}
    _emit(out, args.human)
    return EXIT_OK


def cmd_classify(args) -> int:
    _need_n2(args.n)
    out = {"n": args.n}
    out.update(_classify(args.n, _parse_vector(args.vector)))
    _emit(out, args.human)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    _need_n2(args.n)
    classes = []
    census: Counter = Counter()
    # an empty box is not an error here, just an empty listing
    found = enumerate_isotropic(EnumerationConfig(args.n, args.bound, args.d)) if args.bound >= 1 else []
    for alpha in found:
        inv = theta(alpha, args.n)
        classes.append({"vector": list(alpha), "invariant": inv.to_json()})
        census[(inv.d, inv.b_residue)] += 1
    out = {
        "n": args.n, "bound": args.bound, "d": args.d, "count": len(classes),
        "classes": classes,
        "census": [{"d": d, "b": b, "count": c} for (d, b), c in sorted(census.items())],
    }
    _emit(out, args.human)
    return EXIT_OK


def cmd_witness(args) -> int:
    _need_n2(args.n)
    v, alpha, rep = bm_witness(args.n, args.d, args.b)
    out = {"v": v.to_json(), "alpha": alpha.to_json()}
    out.update(rep.to_json())
    _emit(out, args.human)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    _need_n2(args.n)
    n = args.n
    bound = default_bound(n) if args.bound is None else args.bound
    suites = ["lemmas", "faithful", "surjective"] if args.suite == "all" else [args.suite]
    ds = [args.d] if args.d is not None else admissible_divisibilities(n)
    if args.d is not None and (n + 1) % (args.d * args.d):
        raise CliError(f"d^2 does not divide n+1 (n={n}, d={args.d})")
    reports: list[Report] = []
    for suite in suites:
        if suite == "surjective":
            rep = Report("surjective", n, None)
            for d in ds:
                rep = rep.merge(verify_surjective(n, d))
            rep.details.pop("d", None)
            reports.append(rep)
        elif bound < 1:
            reports.append(Report(suite, n, bound))
        else:
            cfg = EnumerationConfig(n, bound, args.d)
            reports.append(verify_lemmas(cfg) if suite == "lemmas" else verify_faithful(cfg))
    out = {"n": n, "bound": bound, "suite": args.suite,
           "reports": [r.to_json() for r in reports],
           "ok": all(r.ok for r in reports)}
    _emit(out, args.human)
    if any(r.vacuous for r in reports):
        print(f"no classes at bound {bound}", file=sys.stderr)
        return EXIT_VACUOUS
    return EXIT_OK if out["ok"] else EXIT_FAIL


def cmd_embed(args) -> int:
    if args.n < 1:
        raise CliError("n must be >= 1")
    emb = canonical_embedding(args.n)
    image = emb.image()
    out = {
        "n": args.n,
        "matrix": [list(r) for r in emb.matrix],
        "v": list(emb.v),
        "v_square": pair(emb.v, emb.v),
        "v_square_ok": pair(emb.v, emb.v) == 2 * args.n + 2,
        "image_orthogonal_to_v": all(pair(emb.v, g) == 0 for g in image.generators),
        "image_saturated": emb.is_primitive(),
        "complement_is_v": emb.complement_ok(),
    }
    _emit(out, args.human)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # SUPPRESS so a flag given before the subcommand is not reset by the subparser
    common.add_argument("--human", action="store_true", default=argparse.SUPPRESS,
                        help="render tables instead of JSON")
    p = _Parser(prog="kummer", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("poltype", parents=[common], help="polarization type of the fibration")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int)
    s.set_defaults(func=cmd_poltype)

    s = sub.add_parser("classify", parents=[common], help="invariant of an isotropic class")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--vector", required=True, help="e1,f1,e2,f2,e3,f3,delta")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("enumerate", parents=[common], help="list classes with bounded coordinates")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--d", type=int)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("witness", parents=[common], help="Mukai-vector witness for (n, d, b)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--suite", choices=["lemmas", "faithful", "surjective", "all"], default="all")
    s.add_argument("--bound", type=int)
    s.add_argument("--d", type=int)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("embed", parents=[common], help="the canonical embedding into U^4")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_embed)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    human = False
    try:
        args = build_parser().parse_args(argv)
        args.human = human = getattr(args, "human", False)
        return args.func(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except (DomainError, LatticeError) as exc:
        code, msg = EXIT_USAGE, str(exc)
    print(f"error: {msg}", file=sys.stderr)
    if not human:
        print(json.dumps({"error": msg}))
    return code


if __name__ == "__main__":
    sys.exit(main())
