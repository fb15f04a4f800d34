import itertools
import random

from hypothesis import given, settings, strategies as st

from gen import NSTA_LETTERS as LETTERS, all_binary_trees, random_nsta, random_tree, random_twata
from muxpath.acceptance import selected_nodes
from muxpath.automata import compile_query, validate_weakness
from muxpath.nsta import (BOTTOM, NstAutomaton, nsta_selected_nodes, nsta_to_twata,
                          pad_full_binary, twata_to_nsta)
from muxpath.syntax import parse_query
from muxpath.trees import BinaryTree, encode_binary, enumerate_trees

seeds = st.integers(0, 2**32 - 1)
def brute_selected(m, b):
    """Enumerate every state labeling of the padded tree."""
    pt = pad_full_binary(b)
    nodes = pt.nodes()
    out = set()
    for run in itertools.product(m.states, repeat=len(nodes)):
        r = dict(zip(nodes, run))
        if r[()] not in m.initial:
            continue
        ok = True
        for x in nodes:
            l = pt.labels[x]
            if l is BOTTOM:
                ok = m.leaf_ok(r[x])
            else:
                ok = (r[x + (1,)], r[x + (2,)]) in m.pairs(r[x], m.letter_of(l))
            if not ok:
                break
        if ok:
            out |= {x for x in b.labels if r[x] in m.selecting}
    return out


def test_padding():
    b = BinaryTree({(): {"a"}, (1,): set(), (1, 2): set()})
    pt = pad_full_binary(b)
    assert len(pt) == 2 * len(b) + 1
    assert len(pt.leaves()) == len(b) + 1
    assert all(pt.labels[x] is BOTTOM for x in pt.leaves())
    assert pt.unpad() == b


def test_empty_selecting_or_initial():
    b = encode_binary(enumerate_trees(2, ["p"]).__next__())
    m = NstAutomaton([0], LETTERS + [BOTTOM], {(0, BOTTOM): {(0, 0)}}, {0}, {0}, set())
    assert nsta_selected_nodes(m, b) == set()
    m = NstAutomaton([0], LETTERS + [BOTTOM], {(0, BOTTOM): {(0, 0)}}, set(), {0}, {0})
    assert nsta_selected_nodes(m, b) == set()


def test_dump_lists_states():
    m = random_nsta(random.Random(1))
    assert m.dump().startswith("# NSTA: 3 states, 3 letters")


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_selection_matches_brute_force(seed):
    rng = random.Random(seed)
    m = random_nsta(rng)
    for b in rng.sample(list(all_binary_trees(3, ["p"])), 6):
        assert nsta_selected_nodes(m, b) == brute_selected(m, b)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_twata_to_nsta_random(seed):
    rng = random.Random(seed)
    a = random_twata(rng, depth=2)
    m = twata_to_nsta(a)
    for b in all_binary_trees(3, ["p"]):
        assert nsta_selected_nodes(m, b) == selected_nodes(a, b)


def test_twata_to_nsta_compiled():
    a = compile_query(parse_query("$X : lfp { $X = a & <fchild^->b }"))
    m = twata_to_nsta(a)
    for t in enumerate_trees(4, ["a", "b"]):
        b = encode_binary(t)
        assert nsta_selected_nodes(m, b) == selected_nodes(a, b)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_nsta_to_twata_random(seed):
    rng = random.Random(seed)
    m = random_nsta(rng)
    a = nsta_to_twata(m)
    assert len(a) == 1 + 4 * len(m) + len(LETTERS)
    assert validate_weakness(a) and not a.alpha
    for _ in range(5):
        b = encode_binary(random_tree(rng, 6, props=("p",)))
        assert selected_nodes(a, b) == nsta_selected_nodes(m, b)


def test_nothing_and_everything():
    from muxpath.automata import PFALSE, PTRUE, Twata
    trees = list(all_binary_trees(3, ["p"]))
    none = twata_to_nsta(Twata(["f"], [PFALSE], 0, [{0}], set(), props={"p"}))
    every = twata_to_nsta(Twata(["t"], [PTRUE], 0, [{0}], set(), props={"p"}))
    for b in trees:
        assert nsta_selected_nodes(none, b) == set()
        assert nsta_selected_nodes(every, b) == set(b.labels)


def test_select_red_nodes():
    # one state that is happy anywhere, selecting exactly at {red} letters
    letters = [frozenset(), frozenset({"red"})]
    delta = {("any", l): {("any", "any"), ("sel", "any"), ("any", "sel"), ("sel", "sel")}
             for l in letters}
    delta.update({("sel", frozenset({"red"})): delta[("any", frozenset())],
                  ("any", BOTTOM): {("any", "any")}})
    m = NstAutomaton(["any", "sel"], letters + [BOTTOM], delta, {"any", "sel"}, {"any"}, {"sel"})
    a = nsta_to_twata(m)
    rng = random.Random(3)
    for _ in range(20):
        b = encode_binary(random_tree(rng, 7, props=("red",)))
        want = {x for x, l in b.labels.items() if "red" in l}
        assert nsta_selected_nodes(m, b) == want
        assert selected_nodes(a, b) == want


def test_single_node_padding():
    pt = pad_full_binary(BinaryTree({(): {"a"}}))
    assert len(pt) == 3 and pt.leaves() == [(1,), (2,)]
