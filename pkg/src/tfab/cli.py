"""Command-line interface.

Exit codes: 0 success / true verdict, 1 false or negative verdict,
2 usage error, 3 parse error (with a positioned diagnostic),
4 inconclusive-within-bound (a bounded certificate that is not exact).

`--json` switches every report to a versioned JSON schema; default output
is human-readable text.  TFAB_SEED provides the default search seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .arith import INF, is_prime
from .cornerlab import (
    Example1Config,
    Example2Config,
    Example3Config,
    REPORT_SCHEMA,
    build_example1,
    build_example2,
    build_example3,
    example2_main_decomposition,
    verify_example1,
    verify_example2,
    verify_example3,
)
from .decomp import (
    CLIPPED_WITHIN_BOUND,
    is_clipped,
    main_decomposition,
    stein_socle_decomposition,
)
from .dsl import (
    ParseError,
    document_from_group,
    parse_element,
    parse_presentation,
    print_presentation,
)
from .groups import GroupError, NotMember, ZeroElement
from .homs import end_integrality_basis
from .typesys import TypeClass

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INCONCLUSIVE = 4


def _build_parser():
    ap = argparse.ArgumentParser(prog="tfab", description=__doc__)
    ap.add_argument("--version", action="version", version=f"tfab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, elt=False, prime=False, bound=None, seed=False):
        p.add_argument("file", help="presentation file (.tfab)")
        if elt:
            p.add_argument("--elt", action="append", required=True, help="element expression")
        if prime:
            p.add_argument("--prime", type=int, required=True)
        if bound is not None:
            p.add_argument("--bound", type=int, default=bound)
        if seed:
            p.add_argument("--seed", type=int, default=None)
        p.add_argument("--json", action="store_true")

    common(sub.add_parser("validate", help="validate and canonicalize a presentation"))
    common(sub.add_parser("member", help="exact membership"), elt=True)
    common(sub.add_parser("height", help="p-height of an element"), elt=True, prime=True)
    common(sub.add_parser("type", help="type of an element"), elt=True)
    common(sub.add_parser("purify", help="pure closure of elements"), elt=True)
    common(sub.add_parser("decompose", help="Main Decomposition"), bound=4, seed=True)
    common(sub.add_parser("clipped", help="rank-one summand certificate"), bound=4)
    p = sub.add_parser("stein", help="socle splitting K ⊕ B")
    common(p, bound=5)
    p.add_argument("--type", dest="tau", required=True, help="comma-separated primes, or Z")
    p = sub.add_parser("end", help="endomorphism integrality structure")
    common(p)
    p.add_argument("--cap", type=int, default=6)
    p = sub.add_parser("example", help="classical example families")
    p.add_argument("family", choices=("1", "2", "3"))
    p.add_argument("action", choices=("build", "verify", "split"))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--bound", type=int, default=3)
    return ap


def _emit(args, payload: dict, human: str) -> None:
    if getattr(args, "json", False):
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        text = human if human.endswith("\n") else human + "\n"
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args):
    with open(args.file, "r", encoding="utf-8") as fh:
        text = fh.read()
    doc = parse_presentation(text)
    return doc, doc.to_group()


def _seed(args):
    s = getattr(args, "seed", None)
    if s is not None:
        return s
    env = os.environ.get("TFAB_SEED")
    return int(env) if env else None


def _char_str(c) -> str:
    return str(c)


def _cmd_validate(args):
    doc, g = _load(args)
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "validate",
        "name": doc.name,
        "rank": g.rank,
        "prime_universe": sorted(g.prime_universe),
        "canonical": print_presentation(document_from_group(g, doc.name)),
    }
    human = (
        f"valid: rank {g.rank}, prime universe "
        f"{{{', '.join(str(p) for p in sorted(g.prime_universe))}}}"
    )
    _emit(args, payload, human)
    return EXIT_OK


def _cmd_member(args):
    doc, g = _load(args)
    results = []
    for expr in args.elt:
        x = parse_element(expr, doc)
        results.append((expr, g.member(x)))
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "member",
        "results": [{"elt": e, "member": ok} for e, ok in results],
    }
    human = "\n".join(f"{e}: {'member' if ok else 'not a member'}" for e, ok in results)
    _emit(args, payload, human)
    return EXIT_OK if all(ok for _, ok in results) else EXIT_NEGATIVE


def _cmd_height(args):
    doc, g = _load(args)
    if not is_prime(args.prime):
        sys.stderr.write(f"error: {args.prime} is not prime\n")
        return EXIT_USAGE
    expr = args.elt[0]
    x = parse_element(expr, doc)
    h = g.height(x, args.prime)
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "height",
        "elt": expr,
        "prime": args.prime,
        "height": "inf" if h is INF else h,
    }
    _emit(args, payload, f"height of {expr} at {args.prime}: {'inf' if h is INF else h}")
    return EXIT_OK


def _cmd_type(args):
    doc, g = _load(args)
    expr = args.elt[0]
    x = parse_element(expr, doc)
    t = g.type_of(x)
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "type",
        "elt": expr,
        "type": str(t),
        "characteristic": str(g.characteristic_of(x)),
    }
    _emit(args, payload, f"type of {expr}: {t} (characteristic {g.characteristic_of(x)})")
    return EXIT_OK


def _cmd_purify(args):
    doc, g = _load(args)
    elts = [parse_element(e, doc) for e in args.elt]
    sub = g.purify(elts)
    subdoc = document_from_group(sub, f"{doc.name}_pure")
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "purify",
        "rank": sub.rank,
        "presentation": subdoc.to_jsonable(),
        "embedding": [[str(x) for x in v] for v in sub.directions],
    }
    _emit(args, payload, print_presentation(subdoc))
    return EXIT_OK


def _cmd_decompose(args):
    doc, g = _load(args)
    rep = main_decomposition(g, args.bound, seed=_seed(args))
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "decompose",
        **rep.to_jsonable(),
    }
    types = ", ".join(str(t) for t in rep.cd_types) or "(none)"
    human = (
        f"decomposable part types: {types}\n"
        f"complement rank: {rep.complement_rank}\n"
        f"bound: {rep.certificate_bound}"
        + ("" if rep.complement_certificate_exact else " (complement certificate bounded)")
    )
    _emit(args, payload, human)
    return EXIT_OK


def _cmd_clipped(args):
    doc, g = _load(args)
    cert = is_clipped(g, args.bound)
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "clipped",
        **cert.to_jsonable(),
    }
    human = f"{cert.verdict} (bound {cert.bound}, exhaustive={cert.exhaustive})"
    _emit(args, payload, human)
    if cert.verdict != CLIPPED_WITHIN_BOUND:
        return EXIT_NEGATIVE
    return EXIT_OK if cert.exhaustive else EXIT_INCONCLUSIVE


def _parse_tau(text: str) -> TypeClass:
    text = text.strip()
    if text in ("Z", "z", ""):
        return TypeClass()
    return TypeClass(int(x) for x in text.split(","))


def _cmd_stein(args):
    doc, g = _load(args)
    tau = _parse_tau(args.tau)
    K, B = stein_socle_decomposition(g, tau, bound=args.bound)
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "stein",
        "tau": str(tau),
        "kernel_rank": K.rank,
        "complement_rank": B.rank,
        "kernel": document_from_group(K, "K").to_jsonable() if K.rank else None,
        "complement": document_from_group(B, "B").to_jsonable() if B.rank else None,
    }
    human = f"socle({tau}) = K ⊕ B with rank K = {K.rank}, rank B = {B.rank}"
    _emit(args, payload, human)
    return EXIT_OK


def _cmd_end(args):
    doc, g = _load(args)
    desc = end_integrality_basis(g, cap=args.cap)
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "end",
        **desc.to_jsonable(),
    }
    human = (
        f"rational algebra: {len(desc.units)} matrix units "
        f"{list(desc.units)}\ncoefficient lattice rows: "
        f"{[list(r) for r in desc.lattice]}"
    )
    _emit(args, payload, human)
    return EXIT_OK


def _example_cfg(family: str, n):
    if family == "1":
        return Example1Config.default(n or 4)
    if family == "2":
        return Example2Config.default(n or 2)
    return Example3Config.default(n or 3)


def _cmd_example(args):
    cfg = _example_cfg(args.family, args.n)
    if args.action == "build":
        if args.family == "1":
            g = build_example1(cfg).G
        elif args.family == "2":
            g = build_example2(cfg).G
        else:
            g = build_example3(cfg).G
        doc = document_from_group(g, f"example{args.family}")
        payload = {
            "schema": REPORT_SCHEMA,
            "command": "example-build",
            "family": args.family,
            "presentation": doc.to_jsonable(),
        }
        _emit(args, payload, print_presentation(doc))
        return EXIT_OK
    if args.action == "verify":
        if args.family == "1":
            rep = verify_example1(cfg, bound=args.bound)
        elif args.family == "2":
            rep = verify_example2(cfg)
        else:
            rep = verify_example3(cfg, bound=args.bound)
        payload = rep.to_jsonable()
        human = "\n".join(
            f"[{'ok' if c.passed else 'FAIL'}] {c.name}"
            + (f" ({c.detail})" if c.detail else "")
            for c in rep.checks
        )
        _emit(args, payload, human)
        return EXIT_OK if rep.passed else EXIT_NEGATIVE
    # split
    if args.family == "1":
        g = build_example1(cfg).G
        rep = main_decomposition(g, args.bound)
        payload = {
            "schema": REPORT_SCHEMA,
            "command": "example-split",
            "family": "1",
            **rep.to_jsonable(),
        }
        human = (
            f"decomposable types: {[str(t) for t in rep.cd_types]}, "
            f"complement rank {rep.complement_rank}"
        )
        _emit(args, payload, human)
        return EXIT_OK
    if args.family == "2":
        dec = example2_main_decomposition(cfg)
        payload = {
            "schema": REPORT_SCHEMA,
            "command": "example-split",
            "family": "2",
            "alpha": {str(n): a for n, a in sorted(dec.alpha.items())},
            "z_line_count": len(dec.z_lines),
            "chain_rank": dec.H.rank,
            "report": dec.report.to_jsonable(),
        }
        human = (
            f"alpha = {dec.alpha}\n"
            f"{len(dec.z_lines)} divisible lines plus a chain block of rank {dec.H.rank}\n"
            + ("all checks passed" if dec.report.passed else "CHECKS FAILED")
        )
        _emit(args, payload, human)
        return EXIT_OK if dec.report.passed else EXIT_NEGATIVE
    lab = build_example3(cfg)
    plans, lines = lab.decompose_fully(lab.G)
    payload = {
        "schema": REPORT_SCHEMA,
        "command": "example-split",
        "family": "3",
        "blocks": [p.to_jsonable() for p in plans],
        "divisible_lines": len(lines),
    }
    human = (
        f"{len(plans)} coupled blocks "
        f"{[sorted(p.T) for p in plans]} plus {len(lines)} divisible lines"
    )
    _emit(args, payload, human)
    return EXIT_OK


_HANDLERS = {
    "validate": _cmd_validate,
    "member": _cmd_member,
    "height": _cmd_height,
    "type": _cmd_type,
    "purify": _cmd_purify,
    "decompose": _cmd_decompose,
    "clipped": _cmd_clipped,
    "stein": _cmd_stein,
    "end": _cmd_end,
    "example": _cmd_example,
}


def run_command(argv) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except ParseError as e:
        sys.stderr.write(f"parse error at {e.line}:{e.col}: expected {e.expected}, found {e.found}\n")
        return EXIT_PARSE
    except FileNotFoundError as e:
        sys.stderr.write(f"error: cannot read {e.filename}\n")
        return EXIT_USAGE
    except (ZeroElement, NotMember) as e:
        sys.stderr.write(f"negative: {e}\n")
        return EXIT_NEGATIVE
    except GroupError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_NEGATIVE
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
