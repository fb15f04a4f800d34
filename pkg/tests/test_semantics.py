import random

from hypothesis import given, settings, strategies as st

from gen import random_expr, random_path, random_query, random_tree
from muxpath.semantics import eval_expr, eval_path_relation, eval_query_direct, eval_query_valuation
from muxpath.syntax import (Diamond, FixpointBlock, MuXPathQuery, Not, Prop, parse_expr,
                            parse_path, parse_query)
from muxpath.trees import parse_address, parse_tree

seeds = st.integers(0, 2**32 - 1)
DOC = parse_tree("(doc (red) (blue (red)))")


def addrs(*xs):
    return {parse_address(x) for x in xs}


def test_lfp_reach_red():
    q = parse_query("$X : lfp { $X = red | <child> $X }")
    assert eval_query_direct(q, DOC) == addrs("/", "/1", "/2", "/2/1")


def test_gfp_invariant():
    q = parse_query("$X : gfp { $X = (red -> !blue) & [child] $X }")
    assert eval_query_direct(q, DOC) == addrs("/", "/1", "/2", "/2/1")
    t = parse_tree("(doc (red blue) (blue))")
    assert eval_query_direct(q, t) == addrs("/2")


def test_self_loop_kinds():
    # X = X: least solution empty, greatest everything
    assert eval_query_direct(parse_query("$X : lfp { $X = $X }"), DOC) == set()
    assert eval_query_direct(parse_query("$X : gfp { $X = $X }"), DOC) == set(DOC.labels)


def test_flags_have_structural_meaning():
    t = parse_tree("(a (b) (c (d)))")
    assert eval_expr(Prop("ifc"), t) == addrs("/1", "/2/1")
    assert eval_expr(Prop("irs"), t) == addrs("/2")
    assert eval_expr(Prop("hfc"), t) == addrs("/", "/2")
    assert eval_expr(Prop("hrs"), t) == addrs("/1")


def test_path_relations():
    t = parse_tree("(a (b) (c (d)))")
    assert eval_path_relation(parse_path("fchild"), t) == {((), (1,)), ((2,), (2, 1))}
    assert eval_path_relation(parse_path("right^-"), t) == {((2,), (1,))}
    assert eval_path_relation(parse_path("child"), t) == {((), (1,)), ((), (2,)), ((2,), (2, 1))}
    star = eval_path_relation(parse_path("child*"), t)
    assert len(star) == 4 + 3 + 1      # reflexive pairs plus descendants
    assert eval_path_relation(parse_path("?(b)"), t) == {((1,), (1,))}


def test_multi_block_valuation():
    q = parse_query("$Z : lfp { $Z = $X & $Y } lfp { $X = <child>red } gfp { $Y = [child]$Y & !blue }")
    v = eval_query_valuation(q, DOC)
    assert v["X"] == addrs("/", "/2")
    assert v["Y"] == addrs("/1", "/2/1")
    assert v["Z"] == set()


def _swap_kinds(q):
    return MuXPathQuery(q.goal, tuple(FixpointBlock("gfp" if b.kind == "lfp" else "lfp",
                                                    b.equations) for b in q.blocks))


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_lfp_below_gfp(seed):
    rng = random.Random(seed)
    q = random_query(rng, max_blocks=1)
    t = random_tree(rng, 10)
    lfp = q if q.blocks[0].kind == "lfp" else _swap_kinds(q)
    assert eval_query_direct(lfp, t) <= eval_query_direct(_swap_kinds(lfp), t)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_complement(seed):
    rng = random.Random(seed)
    e = random_expr(rng, 3, ("a", "b"), regular=True)
    t = random_tree(rng, 10)
    assert eval_expr(Not(e), t) == set(t.labels) - eval_expr(e, t)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_diamond_matches_relation(seed):
    rng = random.Random(seed)
    p = random_path(rng, 3, lambda: random_expr(rng, 0, ("a", "b")), regular=True)
    t = random_tree(rng, 10)
    target = eval_expr(Prop("a"), t)
    rel = eval_path_relation(p, t)
    assert eval_expr(Diamond(p, Prop("a")), t) == {x for x, y in rel if y in target}


def test_expression_example():
    t = parse_tree("(a (b) (b (a)))")
    assert eval_expr(parse_expr("<child*>(a & !<child>true)"), t) == addrs("/", "/2", "/2/1")
