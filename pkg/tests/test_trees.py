import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_tree
from muxpath.trees import (BinaryTree, NotWellFormed, SiblingTree, TreeSyntaxError,
                           binary_address_map, chain_binary, chain_tree, decode_binary,
                           encode_binary, enumerate_trees, format_address, parse_address,
                           parse_tree, render_tree, well_formed_check)

seeds = st.integers(0, 2**32 - 1)


def naive_encode(t):
    """Relation-based reference: collect fchild / right pairs, then place
    nodes by walking them.  Independent of encode_binary's address map."""
    nodes = t.nodes()
    fchild = {x: x + (1,) for x in nodes if x + (1,) in t.labels}
    right = {x: x[:-1] + (x[-1] + 1,) for x in nodes
             if x and x[:-1] + (x[-1] + 1,) in t.labels}
    place = {(): ()}
    todo = [()]
    while todo:
        x = todo.pop()
        for rel, d in ((fchild, 1), (right, 2)):
            if x in rel:
                place[rel[x]] = place[x] + (d,)
                todo.append(rel[x])
    inv_f = {v: k for k, v in fchild.items()}
    inv_r = {v: k for k, v in right.items()}
    out = {}
    for x in nodes:
        lab = set(t.labels[x])
        lab |= {"hfc"} if x in fchild else set()
        lab |= {"hrs"} if x in right else set()
        lab |= {"ifc"} if x in inv_f else set()
        lab |= {"irs"} if x in inv_r else set()
        out[place[x]] = lab
    return BinaryTree(out)


def test_parse_example():
    t = parse_tree("(doc (red) (blue (red)))")
    assert len(t) == 4
    assert t.labels[()] == {"doc"}
    assert t.labels[(2, 1)] == {"red"}


def test_parse_single_and_reserved():
    assert parse_tree("(a)").labels == {(): frozenset({"a"})}
    with pytest.raises(TreeSyntaxError, match="reserved"):
        parse_tree("(a (ifc))")


@pytest.mark.parametrize("text, where", [
    ("(a", "line 1"),
    ("(a))", "line 1"),
    ("(a (b) c)", "line 1"),
    ("\n\n  (a ?)", "line 3, column 6"),
    ("", "empty"),
])
def test_parse_errors(text, where):
    with pytest.raises(TreeSyntaxError, match=where.split(",")[0]):
        parse_tree(text)


def test_comments_and_whitespace():
    t = parse_tree("# a doc\n(a  # root\n  (b))")
    assert render_tree(t) == "(a (b))"


def test_render_unlabeled():
    assert render_tree(parse_tree("(a () (b))")) == "(a () (b))"
    assert render_tree(parse_tree("(b a)")) == "(a b)"


@given(seeds)
def test_render_parse_roundtrip(seed):
    t = random_tree(random.Random(seed))
    assert parse_tree(render_tree(t)) == t


def test_encode_example():
    b = encode_binary(parse_tree("(a (b) (c))"))
    assert b.labels == {(): {"a", "hfc"}, (1,): {"b", "ifc", "hrs"}, (1, 2): {"c", "irs"}}


def test_encode_chain_flags():
    b = encode_binary(chain_tree(3))
    assert b.labels[()] == {"a", "hfc"}
    assert b.labels[(1,)] == {"a", "hfc", "ifc"}
    assert b.labels[(1, 1)] == {"a", "ifc"}


@given(seeds)
def test_encode_matches_relation_oracle(seed):
    t = random_tree(random.Random(seed))
    assert encode_binary(t) == naive_encode(t)


@given(seeds)
def test_encode_decode_laws(seed):
    t = random_tree(random.Random(seed))
    b = encode_binary(t)
    assert well_formed_check(b)
    assert decode_binary(b) == t
    assert len(b) == len(t)
    n_f = sum("hfc" in l for l in b.labels.values())
    n_r = sum("hrs" in l for l in b.labels.values())
    assert n_f == sum(1 for x in t.nodes() if t.children(x))
    assert n_r == sum(1 for x in t.nodes() if x and x[:-1] + (x[-1] + 1,) in t.labels)


def test_decode_ignores_irrelevant_parts():
    b = BinaryTree({(): {"a"}, (1,): {"b", "ifc"}})
    assert decode_binary(b) == SiblingTree({(): {"a"}})
    b = BinaryTree({(): {"a", "hfc"}, (1,): {"b", "ifc", "hrs"}, (1, 2): {"c", "irs"}})
    assert render_tree(decode_binary(b)) == "(a (b) (c))"


def test_well_formed_violations():
    assert not well_formed_check(BinaryTree({(): {"irs"}}))
    assert well_formed_check(BinaryTree({(): {"irs"}})).address == ()
    rep = well_formed_check(BinaryTree({(): {"hfc"}, (1,): set()}))
    assert not rep and rep.address == (1,)
    with pytest.raises(NotWellFormed):
        decode_binary(BinaryTree({(): {"hrs"}}))


def test_addresses():
    assert format_address(()) == "/"
    assert format_address((2, 1)) == "/2/1"
    assert parse_address("/2/1") == (2, 1)
    assert parse_address("/") == ()
    with pytest.raises(ValueError):
        parse_address("/0")


def test_binary_address_map():
    t = parse_tree("(a (b) (c (d)) (e))")
    m = binary_address_map(t)
    assert m[(3,)] == (1, 2, 2)
    assert m[(2, 1)] == (1, 2, 1)


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("first", [True, False])
def test_chain_binary_matches_encoding(n, first):
    assert chain_binary(n, first_children=first).to_binary() == encode_binary(chain_tree(n, first_children=first))


def test_enumerate_counts():
    # ordered trees with n nodes: Catalan(n-1); with one prop each node has 2 labelings
    counts = [sum(1 for t in enumerate_trees(n, ["a"], min_nodes=n)) for n in (1, 2, 3, 4)]
    assert counts == [2, 4, 2 * 2**3, 5 * 2**4]


@settings(max_examples=30)
@given(seeds)
def test_sibling_closure_enforced(seed):
    t = random_tree(random.Random(seed))
    for x in t.nodes():
        if x and x[-1] > 1:
            assert x[:-1] + (x[-1] - 1,) in t.labels
