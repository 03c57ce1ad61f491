"""Command line front end.

Every subcommand wraps exactly one library operation and supports --json.
Exit codes: 0 success, 1 domain error (library ValueError and friends),
2 usage error (bad flags or an unparseable ordinal, with its position).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from importlib import resources

from .ordinal import (
    Ordinal,
    ParseError,
    ZERO,
    add,
    compare,
    format_ordinal,
    left_subtract,
    mul_nat,
    parse,
    to_json as ordinal_to_json,
)
from .topology import (
    cb_index,
    format_closed_set,
    interval,
    iterated_derivative,
    to_json as closed_set_to_json,
)
from .grasberg import (
    StepFunction,
    check_king,
    check_queen,
    params,
    grasberg_norm,
    phi,
    random_step_function,
    step_function_from_json,
    step_function_to_json,
    step_scale,
    sup_on,
)
from .trees import (
    FamilyContractError,
    check_fact_i,
    check_fact_ii,
    family_from_table,
    marching_indicators,
    rank,
    tree_from_json,
    tree_from_text,
)
from .szlenk import extract_small_combination, index_of_CK


def _color_enabled() -> bool:
    return sys.stdout.isatty() and not os.environ.get("NO_COLOR")


def _paint(text: str, code: str) -> str:
    if _color_enabled():
        return f"\x1b[{code}m{text}\x1b[0m"
    return text


def _emit(args, text: str, payload) -> None:
    if args.json:
        print(json.dumps(payload))
    else:
        print(text)


# ---- shrinking --------------------------------------------------------------


def shrink_step_function(f: StepFunction, still_failing, max_steps: int = 200) -> StepFunction:
    """Deterministically minimize a failing example.

    First reduce the piece count (halving, then single drops), then simplify
    values toward 0 (zeroing, integer truncation, halving), keeping every
    change only while the failure persists.
    """
    steps = 0
    improved = True
    while improved and steps < max_steps:
        improved = False
        k = len(f.breakpoints)
        candidates = []
        if k > 2:
            kept = list(range(1, k - 1, 2)) + [k - 1]
            candidates.append(
                StepFunction(
                    f.ambient,
                    tuple(f.breakpoints[i] for i in kept),
                    tuple(f.values[i] for i in kept),
                )
            )
        for i in range(k - 1):
            candidates.append(
                StepFunction(
                    f.ambient,
                    f.breakpoints[:i] + f.breakpoints[i + 1 :],
                    f.values[:i] + f.values[i + 1 :],
                )
            )
        for cand in candidates:
            if len(cand.breakpoints) < len(f.breakpoints) and still_failing(cand):
                f = cand
                improved = True
                steps += 1
                break
    improved = True
    while improved and steps < max_steps:
        improved = False
        for i, v in enumerate(f.values):
            if v == 0:
                continue
            ladder = [Fraction(0)]
            if v != int(v):
                ladder.append(Fraction(int(v)))
            ladder.append(v / 2)
            for repl in ladder:
                if repl == v:
                    continue
                cand = StepFunction(
                    f.ambient, f.breakpoints, f.values[:i] + (repl,) + f.values[i + 1 :]
                )
                if still_failing(cand):
                    f = cand
                    improved = True
                    steps += 1
                    break
            if improved:
                break
    return f


# ---- input helpers ----------------------------------------------------------


def _load_step_function(source: str) -> StepFunction:
    text = source
    if not source.lstrip().startswith("{"):
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
    return step_function_from_json(json.loads(text))


def _load_tree(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    if text.lstrip().startswith("{"):
        return tree_from_json(json.loads(text))
    return tree_from_text(text)


def _load_family(space, name_or_path: str, ladder: Ordinal):
    if name_or_path == "marching-indicators":
        return marching_indicators(space, step=ladder)
    with open(name_or_path, "r", encoding="utf-8") as handle:
        table = json.load(handle)
    return family_from_table(space, table)


# ---- handlers ---------------------------------------------------------------


def _cmd_ord(args) -> int:
    if args.ord_op == "eval":
        value = parse(args.ordinal)
        _emit(args, format_ordinal(value), ordinal_to_json(value))
    elif args.ord_op == "cmp":
        c = compare(parse(args.left), parse(args.right))
        word = {-1: "less", 0: "equal", 1: "greater"}[c]
        _emit(args, word, {"cmp": c, "result": word})
    elif args.ord_op == "add":
        total = parse(args.ordinals[0])
        for item in args.ordinals[1:]:
            total = add(total, parse(item))
        _emit(args, format_ordinal(total), ordinal_to_json(total))
    elif args.ord_op == "mul":
        base = parse(args.ordinal)
        product = ZERO if args.k == 0 else mul_nat(base, args.k)
        _emit(args, format_ordinal(product), ordinal_to_json(product))
    else:
        diff = left_subtract(parse(args.left), parse(args.right))
        _emit(args, format_ordinal(diff), ordinal_to_json(diff))
    return 0


def _cmd_cb(args) -> int:
    value = cb_index(interval(parse(args.ordinal)))
    _emit(args, format_ordinal(value), ordinal_to_json(value))
    return 0


def _cmd_derive(args) -> int:
    space = interval(parse(args.ordinal))
    derived = iterated_derivative(space, parse(args.times))
    _emit(args, format_closed_set(derived), closed_set_to_json(derived))
    return 0


def _cmd_szlenk(args) -> int:
    result = index_of_CK(interval(parse(args.ordinal)))
    text = f"CB={format_ordinal(result.cb)}, Sz(C(K))={format_ordinal(result.index)}"
    _emit(args, text, result.to_json())
    return 0


def _cmd_grasberg(args) -> int:
    space = interval(parse(args.space))
    if args.grasberg_op == "params":
        p = params(space)
        text = f"o={format_ordinal(p.o)}, b={p.b}, CB={format_ordinal(p.cb)}"
        payload = {"o": ordinal_to_json(p.o), "b": p.b, "cb": ordinal_to_json(p.cb)}
        _emit(args, text, payload)
    elif args.grasberg_op == "norm":
        f = _load_step_function(args.fn)
        value = grasberg_norm(f, space)
        _emit(args, str(value), {"norm": str(value)})
    else:
        f = _load_step_function(args.fn)
        critical = phi(f, space, Fraction(args.eps))
        _emit(args, format_closed_set(critical), closed_set_to_json(critical))
    return 0


def _check_king_trial(space, trial_seed: int, max_pieces: int):
    f = random_step_function(space, 3 * trial_seed, max_pieces=max_pieces)
    rng = random.Random(3 * trial_seed + 2)
    eps = Fraction(rng.randint(1, 40), 20)
    return f, eps, check_king(f, space, eps)


def _check_queen_trial(space, trial_seed: int, max_pieces: int):
    f = random_step_function(space, 3 * trial_seed, max_pieces=max_pieces)
    g = random_step_function(space, 3 * trial_seed + 1, max_pieces=max_pieces)
    rng = random.Random(3 * trial_seed + 2)
    eps = Fraction(rng.randint(1, 40), 20)
    cap = eps / 2 ** params(space).b
    spread = sup_on(g, phi(f, space, eps))
    if spread > cap:
        g = step_scale(g, cap / spread)
    return f, g, eps, check_queen(f, g, space, eps)


def _cmd_check(args) -> int:
    space = interval(parse(args.space))
    passes = 0
    failure = None
    for i in range(args.trials):
        trial_seed = args.seed * 1_000_003 + i
        if args.lemma == "king":
            f, eps, report = _check_king_trial(space, trial_seed, args.max_pieces)
            if report.passed:
                passes += 1
            else:
                failure = ("king", f, None, eps)
                break
        else:
            f, g, eps, report = _check_queen_trial(space, trial_seed, args.max_pieces)
            if report.passed:
                passes += 1
            else:
                failure = ("queen", f, g, eps)
                break

    if failure is None:
        text = f"{passes}/{args.trials} " + _paint("pass", "32")
        if args.json:
            print(json.dumps({"trials": args.trials, "passes": passes, "pass": True}))
        else:
            print(text)
        return 0

    lemma, f, g, eps = failure
    if lemma == "king":
        f = shrink_step_function(f, lambda c: not check_king(c, space, eps).passed)
        payload = {
            "lemma": lemma,
            "pass": False,
            "eps": str(eps),
            "f": step_function_to_json(f),
        }
    else:
        f = shrink_step_function(
            f, lambda c: not check_queen(c, g, space, eps).passed
        )
        g = shrink_step_function(
            g, lambda c: not check_queen(f, c, space, eps).passed
        )
        payload = {
            "lemma": lemma,
            "pass": False,
            "eps": str(eps),
            "f": step_function_to_json(f),
            "g": step_function_to_json(g),
        }
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"{passes}/{args.trials} " + _paint("FAIL", "31"))
        print("minimal counterexample:")
        print(json.dumps(payload, indent=2))
    return 1


def _cmd_tree(args) -> int:
    tree = _load_tree(args.file)
    r = rank(tree)
    if args.tree_op == "rank":
        _emit(args, str(r), {"rank": r})
        return 0
    reports = []
    for k in range(r + 1):
        reports.append(check_fact_i(tree, k))
        reports.append(check_fact_ii(tree, k))
    ok = all(rep.passed for rep in reports)
    if args.json:
        print(json.dumps({"rank": r, "pass": ok, "reports": [rep.to_json() for rep in reports]}))
    else:
        print(f"rank {r}")
        for rep in reports:
            if rep.passed:
                continue
            for witness, actual in rep.failures:
                where = "" if witness is None else f" at node {witness!r}"
                print(f"fact {rep.fact} k={rep.k}: rank {actual}{where}")
        word = _paint("pass", "32") if ok else _paint("FAIL", "31")
        print(f"facts i and ii for k=0..{r}: {word}")
    return 0 if ok else 1


def _cmd_extract(args) -> int:
    space = interval(parse(args.space))
    family = _load_family(space, args.family, parse(args.ladder))
    certificate = extract_small_combination(
        space, family, Fraction(args.delta), max_probes=args.budget
    )
    if args.json:
        print(json.dumps(certificate.to_json()))
    else:
        print(f"n={certificate.n} eps={certificate.eps}")
        print(f"branch={list(certificate.branch[-1])}")
        print(f"finalNorm={certificate.final_norm} < delta={certificate.delta}")
    return 0


def _cmd_schema(args) -> int:
    root = resources.files("ordspace") / "schema" / "v1"
    names = sorted(entry.name for entry in root.iterdir() if entry.name.endswith(".json"))
    if args.schema_op == "list":
        _emit(args, "\n".join(names), {"schemas": names})
        return 0
    wanted = args.name if args.name.endswith(".json") else args.name + ".json"
    if wanted not in names:
        raise ValueError(f"unknown schema {args.name!r}; available: {', '.join(names)}")
    print((root / wanted).read_text(encoding="utf-8").rstrip())
    return 0


# ---- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordspace",
        description="Exact Cantor-Bendixson and Szlenk index computations on compact ordinal spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_json(p):
        p.add_argument("--json", action="store_true", help="emit JSON instead of text")
        return p

    ord_parser = sub.add_parser("ord", help="ordinal arithmetic")
    ord_sub = ord_parser.add_subparsers(dest="ord_op", required=True)
    p = with_json(ord_sub.add_parser("eval", help="parse and reprint in canonical form"))
    p.add_argument("ordinal")
    p = with_json(ord_sub.add_parser("cmp", help="compare two ordinals"))
    p.add_argument("left")
    p.add_argument("right")
    p = with_json(ord_sub.add_parser("add", help="sum, left to right"))
    p.add_argument("ordinals", nargs="+")
    p = with_json(ord_sub.add_parser("mul", help="right-multiply by a natural"))
    p.add_argument("ordinal")
    p.add_argument("k", type=int)
    p = with_json(
        ord_sub.add_parser("sub", help="the unique c with left + c = right")
    )
    p.add_argument("left")
    p.add_argument("right")
    for sp in ord_sub.choices.values():
        sp.set_defaults(handler=_cmd_ord)

    p = with_json(sub.add_parser("cb", help="Cantor-Bendixson index of [0, z]"))
    p.add_argument("ordinal")
    p.set_defaults(handler=_cmd_cb)

    p = with_json(sub.add_parser("derive", help="iterated derivative of [0, z]"))
    p.add_argument("ordinal")
    p.add_argument("--times", default="1", help="ordinal number of derivations")
    p.set_defaults(handler=_cmd_derive)

    p = with_json(sub.add_parser("szlenk", help="Szlenk index of C([0, z])"))
    p.add_argument("ordinal")
    p.set_defaults(handler=_cmd_szlenk)

    gras = sub.add_parser("grasberg", help="norm parameters, norms, critical sets")
    gras_sub = gras.add_subparsers(dest="grasberg_op", required=True)
    p = with_json(gras_sub.add_parser("params", help="o, b and CB of [0, z]"))
    p.add_argument("--space", required=True, help="ordinal z for the space [0, z]")
    p = with_json(gras_sub.add_parser("norm", help="Grasberg norm of a step function"))
    p.add_argument("--space", required=True)
    p.add_argument("--fn", required=True, help="step function: JSON file path or inline JSON")
    p = with_json(gras_sub.add_parser("phi", help="critical set of a step function"))
    p.add_argument("--space", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--eps", required=True, help="positive rational, e.g. 1/2")
    for sp in gras_sub.choices.values():
        sp.set_defaults(handler=_cmd_grasberg)

    p = with_json(sub.add_parser("check", help="fuzz one of the two norm lemmas"))
    p.add_argument("lemma", choices=("king", "queen"))
    p.add_argument("--space", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-pieces", type=int, default=5, dest="max_pieces")
    p.set_defaults(handler=_cmd_check)

    tree = sub.add_parser("tree", help="tree rank and the two rank facts")
    tree_sub = tree.add_subparsers(dest="tree_op", required=True)
    for name, help_text in (("rank", "rank of a tree file"), ("facts", "check both rank facts for every k")):
        p = with_json(tree_sub.add_parser(name, help=help_text))
        p.add_argument("--file", required=True)
        p.set_defaults(handler=_cmd_tree)

    p = with_json(sub.add_parser("extract", help="extract a small convex combination"))
    p.add_argument("--space", required=True)
    p.add_argument("--family", default="marching-indicators", help="builtin name or table file")
    p.add_argument("--delta", required=True, help="positive rational target")
    p.add_argument("--ladder", default="1", help="ladder step for marching-indicators")
    p.add_argument("--budget", type=int, default=10**6, help="child search probe budget")
    p.set_defaults(handler=_cmd_extract)

    schema = sub.add_parser("schema", help="JSON schemas for the data formats")
    schema_sub = schema.add_subparsers(dest="schema_op", required=True)
    p = with_json(schema_sub.add_parser("list", help="list schema files"))
    p.set_defaults(handler=_cmd_schema)
    p = with_json(schema_sub.add_parser("show", help="print one schema"))
    p.add_argument("name")
    p.set_defaults(handler=_cmd_schema)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ZeroDivisionError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FamilyContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    entry()
