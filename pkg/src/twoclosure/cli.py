"""Command-line front end.

Exit codes: 0 success, 2 unreadable input, 3 precondition failure
(including the 3/2-transitivity promise), 4 a resource cap was hit.

Caps come from the environment:
  TWOCLOSURE_ELEMENT_CAP     largest group enumerated element by element (10^7)
  TWOCLOSURE_ORACLE_CAP      largest degree for oracle-aut (30)
  TWOCLOSURE_ISO_ORACLE_CAP  largest degree for the isomorphism oracle (21)
  TWOCLOSURE_TUPLE_BUDGET    largest n^k for k-orbit computations (10^7)

Output group files list a generating set of at most max(2, log2 |G|)
elements.  Summary lines are written as '#' comments ahead of the file body.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import closure, formats, oracle
from .coherent import scheme_of_group, wl_closure
from .errors import (
    BadParameters,
    BaseNotFound,
    DegreeMismatch,
    IncoherentInput,
    NoGeneratingPair,
    NotAlgebraicIsomorphism,
    NotPrime,
    OverBudget,
    OverCapError,
    PreconditionViolation,
    SingularMatrix,
)
from .zoo import affine_group, agammal1, agl1, as0, gf

EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_CAP = 4

STEP_NAMES = {1: "step 1 (oracle)", 2: "step 2", 3: "step 3", 4: "step 4", 5: "step 5", 6: "step 6"}


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _group_text(G):
    return formats.format_group(G, G.small_generating_set())


def cmd_closure2(args):
    G = formats.parse_group(_read(args.group))
    res = closure.solve_two_closure(G, args.threshold)
    print(f"# order {res.group.order()}")
    print(f"# branch {STEP_NAMES[res.step]}")
    if res.below_bound and res.step > 1:
        print(f"# note degree {G.degree} is at most {closure.CLASSIFICATION_BOUND}")
    _emit(_group_text(res.group), args.out)


def cmd_closurek(args):
    G = formats.parse_group(_read(args.group))
    K = closure.k_closure(G, args.k, budget=args.budget, small_threshold=args.threshold)
    print(f"# order {K.order()}")
    _emit(_group_text(K), args.out)


def cmd_iso(args):
    G = formats.parse_group(_read(args.group))
    G2 = formats.parse_group(_read(args.group2))
    if G.degree != G2.degree:
        raise DegreeMismatch(f"degrees {G.degree} and {G2.degree} differ")
    if args.colored:
        X = scheme_of_group(G)
        psi = formats.parse_psi(_read(args.colored), X.rank)
        S = closure.iso_colored(G, G2, psi, args.threshold)
    else:
        S = closure.iso_schemes(G, G2, args.threshold)
    count = math.factorial(S.degree) if S.symmetric else len(S)
    print(f"# count {count}")
    _emit(formats.format_isoset(S), args.out)


def cmd_inv(args):
    G = formats.parse_group(_read(args.group))
    X = scheme_of_group(G)
    print(f"# rank {X.rank}")
    _emit(formats.format_scheme(X), args.out)


def cmd_wl(args):
    n, rels = formats.parse_scheme_or_relations(_read(args.input))
    X = wl_closure(rels, degree=n).canonical()
    print(f"# rank {X.rank}")
    _emit(formats.format_scheme(X), args.out)


def _yn(v):
    return "yes" if v else "no"


def cmd_check(args):
    G = formats.parse_group(_read(args.group))
    trans = G.is_transitive()
    rows = [
        ("transitive", _yn(trans)),
        ("2-transitive", _yn(G.is_2transitive()) if trans else "no"),
        ("primitive", _yn(G.is_primitive()) if trans else "n/a"),
        ("frobenius", _yn(G.is_frobenius()) if trans else "n/a"),
        ("3/2-transitive", _yn(G.is_three_halves_transitive())),
        ("order", str(G.order())),
    ]
    for k, v in rows:
        print(f"{k:<15} {v}")


def cmd_zoo(args):
    p = args.params
    name = args.name
    try:
        if name in ("agl1", "agammal1", "as0"):
            if len(p) != 2:
                raise BadParameters(f"{name} takes: p d")
            ctor = {"agl1": lambda a, b: agl1(gf(a, b)), "agammal1": agammal1, "as0": as0}[name]
            G = ctor(p[0], p[1])
        else:
            if len(p) < 2:
                raise BadParameters("affine takes: p m followed by matrix entries, row by row")
            q, m, flat = p[0], p[1], p[2:]
            if m < 1 or len(flat) % (m * m):
                raise BadParameters(f"matrix entries must come in blocks of {m * m}")
            mats = [[flat[s + r * m: s + (r + 1) * m] for r in range(m)] for s in range(0, len(flat), m * m)]
            G = affine_group(q, m, mats)
    except ValueError as e:
        if isinstance(e, (BadParameters, NotPrime, SingularMatrix)):
            raise
        raise BadParameters(str(e)) from None
    _emit(formats.format_group(G), args.out)


def cmd_oracle_aut(args):
    X = formats.parse_scheme(_read(args.scheme))
    A = oracle.aut_oracle(X, cap=args.cap)
    print(f"# order {A.order()}")
    _emit(_group_text(A), args.out)


def build_parser():
    ap = argparse.ArgumentParser(prog="twoclosure", description="2-closures of 3/2-transitive groups")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("closure2", cmd_closure2, "2-closure of a group")
    sp.add_argument("group")
    sp.add_argument("--threshold", type=int, default=closure.DEFAULT_THRESHOLD)
    sp.add_argument("--out")

    sp = add("closurek", cmd_closurek, "k-closure of a group that is not 2-transitive")
    sp.add_argument("group")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--threshold", type=int, default=closure.DEFAULT_THRESHOLD)
    sp.add_argument("--budget", type=int, default=closure.TUPLE_BUDGET)
    sp.add_argument("--out")

    sp = add("iso", cmd_iso, "isomorphisms between the schemes of two groups")
    sp.add_argument("group")
    sp.add_argument("group2")
    sp.add_argument("--colored", metavar="PSI_FILE")
    sp.add_argument("--threshold", type=int, default=closure.DEFAULT_THRESHOLD)
    sp.add_argument("--out")

    sp = add("inv", cmd_inv, "scheme of a group")
    sp.add_argument("group")
    sp.add_argument("--out")

    sp = add("wl", cmd_wl, "WL-closure of a scheme or relations file")
    sp.add_argument("input")
    sp.add_argument("--out")

    sp = add("check", cmd_check, "predicate table for a group")
    sp.add_argument("group")

    sp = add("zoo", cmd_zoo, "write a standard group")
    sp.add_argument("name", choices=["agl1", "agammal1", "as0", "affine"])
    sp.add_argument("params", type=int, nargs="*")
    sp.add_argument("--out")

    sp = add("oracle-aut", cmd_oracle_aut, "automorphism group of a scheme by backtracking")
    sp.add_argument("scheme")
    sp.add_argument("--cap", type=int, default=oracle.AUT_CAP)
    sp.add_argument("--out")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except (formats.FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionViolation, IncoherentInput, NotAlgebraicIsomorphism, DegreeMismatch,
            NoGeneratingPair, BadParameters, NotPrime, SingularMatrix) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (OverCapError, OverBudget, BaseNotFound) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    return 0


if __name__ == "__main__":
    sys.exit(main())
