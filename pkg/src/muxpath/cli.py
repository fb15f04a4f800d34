"""Command-line front end.

Exit codes: 0 for a positive verdict (nodes selected, sat, contained,
implied, certain), 1 for a negative one, 2 for usage, parse or budget errors.
Timings are only printed with --timing so that plain output is reproducible.
"""

import argparse
import json
import statistics
import sys
import time

from .acceptance import selected_nodes
from .automata import compile_query
from .emptiness import BudgetExhausted
from .nsta import nsta_selected_nodes, nsta_to_twata, twata_to_nsta
from .reasoning import (certain_answer, contained, implies, parse_constraints,
                        parse_node_ref, parse_views, satisfiable)
from .semantics import eval_query_direct
from .syntax import QueryError, QuerySyntaxError, parse_query
from .trees import (TreeSyntaxError, binary_address_map, chain_binary, encode_binary,
                    format_address, parse_tree, render_tree)


class UsageError(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _query(arg, flag="--query"):
    if arg is None:
        raise UsageError(f"{flag} is required")
    text = _read(arg[1:]) if arg.startswith("@") else arg
    return parse_query(text)


def _tree(path):
    if path is None:
        raise UsageError("--tree is required")
    return parse_tree(_read(path))


def evaluate_automaton(q, t):
    """Sibling addresses of t selected by compile_query(q)."""
    amap = binary_address_map(t)
    back = {b: s for s, b in amap.items()}
    sel = selected_nodes(compile_query(q), encode_binary(t))
    return {back[x] for x in sel}


# ------------------------------------------------------------------ commands

def cmd_eval(args, out):
    q, t = _query(args.query), _tree(args.tree)
    if args.engine == "direct":
        nodes = eval_query_direct(q, t)
    else:
        nodes = evaluate_automaton(q, t)
    nodes = sorted(nodes)
    out["verdict"] = "SELECTED" if nodes else "NONE"
    out["nodes"] = [format_address(x) for x in nodes]
    return bool(nodes)


def _witness(out, tree, node=None):
    out["witness"] = render_tree(tree)
    if node is not None:
        out["witness_node"] = format_address(node)


def cmd_sat(args, out):
    res = satisfiable(_query(args.query), args.max_states, out["stats"])
    out["verdict"] = "SAT" if res else "UNSAT"
    if res:
        _witness(out, res.tree, res.node)
    return bool(res)


def cmd_contains(args, out):
    res = contained(_query(args.q1, "--q1"), _query(args.q2, "--q2"),
                    args.max_states, out["stats"])
    out["verdict"] = "CONTAINED" if res else "NOT CONTAINED"
    if not res:
        _witness(out, res.tree, res.node)
    return bool(res)


def _constraints(path):
    return parse_constraints(_read(path)) if path else []


def cmd_implies(args, out):
    res = implies(_constraints(args.constraints), _query(args.query),
                  args.max_states, out["stats"])
    out["verdict"] = "IMPLIED" if res else "NOT IMPLIED"
    if not res:
        _witness(out, res.tree, ())
    return bool(res)


def cmd_certain(args, out):
    if args.node is None:
        raise UsageError("--node is required")
    views = parse_views(_read(args.views)) if args.views else []
    try:
        ref = parse_node_ref(args.node)
    except ValueError as e:
        raise UsageError(str(e)) from None
    res = certain_answer(_query(args.query), views, _constraints(args.constraints), ref,
                         args.max_states, out["stats"])
    out["verdict"] = "CERTAIN" if res else "NOT CERTAIN"
    if not res:
        _witness(out, res.tree)
    return bool(res)


def cmd_compile(args, out):
    a = compile_query(_query(args.query))
    out["verdict"] = "COMPILED"
    out["stats"]["states"] = len(a)
    out["automaton"] = a.to_dot() if args.format == "dot" else a.dump()
    return True


def cmd_nsta_roundtrip(args, out):
    a = compile_query(_query(args.query))
    m = twata_to_nsta(a, args.max_states)
    b = nsta_to_twata(m)
    out["stats"].update(states=len(a), nsta_states=len(m), back_states=len(b),
                        letters=len(m.letters))
    ok = True
    if args.tree:
        t = encode_binary(_tree(args.tree))
        sa, sm, sb = selected_nodes(a, t), nsta_selected_nodes(m, t), selected_nodes(b, t)
        ok = sa == sm == sb
        out["nodes"] = [format_address(x) for x in sorted(sa)]
    out["verdict"] = "PRESERVED" if ok else "MISMATCH"
    return ok


def linear_fit(xs, ys):
    """(slope, intercept, R^2) of a least-squares line."""
    slope, icept = statistics.linear_regression(xs, ys)
    r = statistics.correlation(xs, ys)
    return slope, icept, r * r


def cmd_bench(args, out):
    a = compile_query(_query(args.query))
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = []
    for n in sizes:
        t = chain_binary(n, args.label)
        best = None
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            selected_nodes(a, t)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        rows.append((n, best))
    out["verdict"] = "DONE"
    out["sizes"] = sizes
    out["seconds"] = [round(s, 6) for _, s in rows]
    if len(rows) >= 2:
        out["r2"] = round(linear_fit(sizes, [s for _, s in rows])[2], 6)
    return True


COMMANDS = {
    "eval": cmd_eval, "sat": cmd_sat, "contains": cmd_contains, "implies": cmd_implies,
    "certain": cmd_certain, "compile": cmd_compile, "nsta-roundtrip": cmd_nsta_roundtrip,
    "bench": cmd_bench,
}


def build_parser():
    p = argparse.ArgumentParser(prog="muxpath", description="µXPath query evaluation and reasoning")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "json")):
        sp.add_argument("--format", choices=formats, default="text")
        sp.add_argument("--max-states", type=int, default=None,
                        help="state budget (default 2000000 or $MUXPATH_MAX_STATES)")
        sp.add_argument("--timing", action="store_true", help="report wall time")
        return sp

    sp = common(sub.add_parser("eval", help="nodes of a tree selected by a query"))
    sp.add_argument("--tree")
    sp.add_argument("--query", help="query text or @FILE")
    sp.add_argument("--engine", choices=("automaton", "direct"), default="automaton")

    sp = common(sub.add_parser("sat", help="query satisfiability"))
    sp.add_argument("--query")

    sp = common(sub.add_parser("contains", help="is q1 contained in q2"))
    sp.add_argument("--q1")
    sp.add_argument("--q2")

    sp = common(sub.add_parser("implies", help="do root constraints imply a query at the root"))
    sp.add_argument("--constraints")
    sp.add_argument("--query")

    sp = common(sub.add_parser("certain", help="certain answer under views and constraints"))
    sp.add_argument("--query")
    sp.add_argument("--views")
    sp.add_argument("--constraints")
    sp.add_argument("--node")

    sp = common(sub.add_parser("compile", help="dump the compiled automaton"),
                ("text", "json", "dot"))
    sp.add_argument("--query")

    sp = common(sub.add_parser("nsta-roundtrip", help="2WATA -> NSTA -> 2WATA sizes and check"))
    sp.add_argument("--query")
    sp.add_argument("--tree")

    sp = common(sub.add_parser("bench", help="evaluation time on chain trees"))
    sp.add_argument("--query")
    sp.add_argument("--sizes", default="1000,10000,100000")
    sp.add_argument("--label", default="a")
    sp.add_argument("--repeat", type=int, default=1)
    return p


def _print_text(out, stream, stats_stream=None):
    """Verdict and details on ``stream``; stats (with --timing) on ``stats_stream``."""
    if "automaton" in out:
        print(out["automaton"], file=stream)
        return
    if out["verdict"] in ("SELECTED", "NONE"):
        for x in out["nodes"]:
            print(x, file=stream)
        return
    print(out["verdict"], file=stream)
    for k in ("witness", "witness_node", "nodes", "sizes", "seconds", "r2"):
        if k in out:
            v = out[k]
            print(f"{k.replace('_', ' ')}: {' '.join(map(str, v)) if isinstance(v, list) else v}",
                  file=stream)
    if stats_stream is not None:
        for k, v in sorted(out["stats"].items()):
            print(f"{k}: {v}", file=stats_stream)


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    out = {"verdict": None, "stats": {}}
    t0 = time.perf_counter()
    try:
        ok = COMMANDS[args.command](args, out)
    except (UsageError, QuerySyntaxError, QueryError, TreeSyntaxError, ValueError) as e:
        print(f"muxpath {args.command}: error: {e}", file=stderr)
        return 2
    except BudgetExhausted as e:
        print(f"muxpath {args.command}: {e}", file=stderr)
        return 2
    if args.timing:
        out["stats"]["millis"] = round((time.perf_counter() - t0) * 1000, 3)
    if args.format == "json":
        if "automaton" in out:
            out["automaton"] = out["automaton"].splitlines()
        print(json.dumps(out, sort_keys=True), file=stdout)
    else:
        _print_text(out, stdout, stderr if args.timing else None)
    return 0 if ok else 1


if __name__ == "__main__":      # pragma: no cover
    sys.exit(main())
