import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import all_binary_trees, random_twata
from muxpath.acceptance import selected_nodes
from muxpath.automata import (PFALSE, PTRUE, LabelIs, Move, Twata, build_wf_automaton, p_and,
                              p_or)
from muxpath.emptiness import (AnnotationLabel, BudgetExhausted, Empty, StrategyLabel,
                               close_annotation, expand_strategy_labels, minimal_models,
                               twata_nonempty)
from muxpath.syntax import parse_query

seeds = st.integers(0, 2**32 - 1)
TREES = list(all_binary_trees(4, ["p"]))


def test_minimal_models():
    a, b, c = Move(1, 0), Move(2, 0), Move(0, 1)
    assert minimal_models(PTRUE) == [frozenset()]
    assert minimal_models(PFALSE) == []
    assert minimal_models(p_or(a, p_and(a, b))) == [frozenset({a})]
    got = minimal_models(p_and(p_or(a, b), c))
    assert set(got) == {frozenset({a, c}), frozenset({b, c})}


def test_expand_strategy_labels():
    d0 = p_or(p_and(LabelIs("p", True), Move(1, 1)), Move(2, 1))
    a = Twata(["s0", "s1"], [d0, PTRUE], 0, [{0, 1}], set(), props={"p"})
    with_p = expand_strategy_labels(a, {"p"})
    assert {lab.edges for lab in with_p} == {frozenset({(0, 1, 1)}), frozenset({(0, 2, 1)})}
    assert all(lab.active == {0, 1} for lab in with_p)
    assert {lab.edges for lab in expand_strategy_labels(a, set())} == {frozenset({(0, 2, 1)})}
    dead = Twata(["s0"], [LabelIs("p", True)], 0, [{0}], set(), props={"p"})
    assert expand_strategy_labels(dead, set()) == set()


def test_close_annotation_loops():
    r = StrategyLabel(frozenset({0, 1}), frozenset({(0, 0, 1), (1, 0, 0)}))
    acc = close_annotation(r, {0, 1})
    assert (0, 1, 0) in acc.edges and acc.accepting
    rej = close_annotation(r, set())
    assert (0, 0, 0) in rej.edges and not rej.accepting


def test_close_annotation_excursion():
    # state 0 goes down to 1, the child sends 1 straight back up as 2
    here = StrategyLabel(frozenset({0}), frozenset({(0, 1, 1)}))
    child = StrategyLabel(frozenset({1}), frozenset({(1, -1, 2)}))
    eta = close_annotation(here, {2}, children={1: (child, AnnotationLabel())})
    assert (0, 1, 2) in eta.edges
    eta = close_annotation(here, set(), children={1: (child, AnnotationLabel())})
    assert (0, 0, 2) in eta.edges


def _wf(text):
    return build_wf_automaton(parse_query(text))


def test_contradiction_is_empty():
    assert twata_nonempty(_wf("$X : lfp { $X = red & !red }")) is Empty


def test_proposition_has_witness():
    t = twata_nonempty(_wf("$X : lfp { $X = a }"))
    assert t and any("a" in lab for lab in t.labels.values())


def test_rejecting_loop_vs_accepting_loop():
    assert not twata_nonempty(Twata(["x"], [Move(0, 0)], 0, [{0}], set()))
    assert twata_nonempty(Twata(["x"], [Move(0, 0)], 0, [{0}], {0}))


def test_needs_an_upward_excursion():
    # go to the first child, then back up and check p at the root
    delta = [Move(1, 1), Move(-1, 2), LabelIs("p", True)]
    a = Twata(["s0", "s1", "s2"], delta, 0, [{2}, {1}, {0}], set(), props={"p"})
    t = twata_nonempty(a)
    assert t and "p" in t.labels[()] and (1,) in t.labels


def test_stats_and_budget():
    stats = {}
    twata_nonempty(_wf("$X : lfp { $X = a | <child>$X }"), stats=stats)
    assert stats["states"] > 0 and stats["nta_states"] > 0
    with pytest.raises(BudgetExhausted):
        twata_nonempty(_wf("$X : lfp { $X = a & <child>(b & <child>c) }"), max_states=1)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_agrees_with_enumeration(seed):
    a = random_twata(random.Random(seed))
    found = any(() in selected_nodes(a, t) for t in TREES)
    verdict = twata_nonempty(a)
    if found:
        assert verdict
    if verdict:
        assert () in selected_nodes(a, verdict)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_annotation_closure_idempotent(seed):
    rng = random.Random(seed)
    n = 4
    edges = frozenset((rng.randrange(n), rng.choice((0, 0, 1, 2, -1)), rng.randrange(n))
                      for _ in range(rng.randint(0, 6)))
    r = StrategyLabel(frozenset(s for s, _, _ in edges), edges)
    alpha = {s for s in range(n) if rng.random() < 0.4}
    eta = close_annotation(r, alpha)
    assert close_annotation(r, alpha, start=eta.edges) == eta


def test_single_node_acceptor():
    # accept exactly the trees without children: the witness has one node
    a = Twata(["s"], [LabelIs("hfc", False)], 0, [{0}], set(), props={"hfc"})
    t = twata_nonempty(a)
    assert t and len(t) == 1


def test_initial_demands_have_no_upward_edges():
    from muxpath.emptiness import Nta
    a = _wf("$X : lfp { $X = a & <fchild^->b }")
    n = Nta(a)
    # the root may not send anything up, so no root option has a -1 edge
    assert not n.root.allowed
    assert n.options[n.root]
    assert all(dd != -1 for o in n.options[n.root] for _, dd, _ in o.strategy.edges)
