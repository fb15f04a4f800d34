import random

from hypothesis import given, settings, strategies as st

from gen import all_binary_trees, random_query, random_tree, random_twata
from muxpath.acceptance import At, build_product, selected_nodes, solve_weak_game
from muxpath.automata import PFALSE, PTRUE, LabelIs, Move, PAnd, POr, Twata, compile_query, p_and
from muxpath.syntax import parse_query
from muxpath.trees import BinaryTree, encode_binary, parse_tree

seeds = st.integers(0, 2**32 - 1)


def naive_winning(a, b):
    """Kleene iteration per weakness class, straight over tree addresses."""
    nodes = list(b.labels)
    win = {}

    def ev(f, x, cur):
        if f == PTRUE:
            return True
        if f == PFALSE:
            return False
        if isinstance(f, LabelIs):
            return (f.prop in b.labels[x]) == f.positive
        if isinstance(f, PAnd):
            return all(ev(g, x, cur) for g in f.args)
        if isinstance(f, POr):
            return any(ev(g, x, cur) for g in f.args)
        y = x if f.d == 0 else (x[:-1] if f.d == -1 and x else None if f.d == -1 else x + (f.d,))
        if y is None or y not in b.labels:
            return False
        return cur[(f.s, y)]

    for cls, acc in zip(a.partition, a.accepting_classes):
        cur = dict(win)
        cur.update({(s, x): acc for s in cls for x in nodes})
        while True:
            nxt = dict(cur)
            for s in cls:
                for x in nodes:
                    nxt[(s, x)] = ev(a.delta[s], x, cur)
            if nxt == cur:
                break
            cur = nxt
        win = cur
    return {p for p, v in win.items() if v}


def test_product_positions():
    a = compile_query(parse_query("$X : lfp { $X = a | <fchild>$X }"))
    b = encode_binary(parse_tree("(a (b) (c))"))
    g = build_product(a, b)
    assert len(g) == len(a) * 3
    assert len(g.positions) == len(g)
    dia = a.index[next(e for e in a.exprs if str(e).startswith("Diamond"))]
    # the diamond resolves its flag and moves to the first child
    f = g.formula((dia, ()))
    assert isinstance(f, At) and f.node == (1,)
    assert g.formula((dia, (1,))) == PFALSE        # no children below b
    assert g.class_of((dia, ())) == a.class_of[dia]


def test_self_loops():
    t = encode_binary(parse_tree("(a (b))"))
    rej = Twata(["x"], [Move(0, 0)], 0, [{0}], set())
    acc = Twata(["x"], [Move(0, 0)], 0, [{0}], {0})
    assert selected_nodes(rej, t) == set()
    assert selected_nodes(acc, t) == set(t.labels)


def test_true_false_automata():
    t = encode_binary(parse_tree("(a (b) (c))"))
    assert selected_nodes(Twata(["t"], [PTRUE], 0, [{0}], set()), t) == set(t.labels)
    assert selected_nodes(Twata(["f"], [PFALSE], 0, [{0}], {0}), t) == set()


def test_missing_neighbour_is_false():
    t = BinaryTree({(): {"p"}})
    for d in (-1, 1, 2):
        a = Twata(["x", "t"], [Move(d, 1), PTRUE], 0, [{1}, {0}], set())
        assert selected_nodes(a, t) == set()


def test_infinite_upward_play():
    # climb to the root and down again forever: rejected unless accepting
    t = BinaryTree({(): set(), (1,): set()})
    delta = [p_and(Move(-1, 1)), Move(1, 0)]
    assert selected_nodes(Twata(["u", "d"], delta, 0, [{0, 1}], set()), t) == set()
    assert selected_nodes(Twata(["u", "d"], delta, 0, [{0, 1}], {0, 1}), t) == {(1,)}


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_matches_naive_random_automata(seed):
    rng = random.Random(seed)
    a = random_twata(rng)
    trees = list(all_binary_trees(3, ["p"]))
    for b in rng.sample(trees, 10):
        assert solve_weak_game(build_product(a, b)) == naive_winning(a, b)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_matches_naive_compiled(seed):
    rng = random.Random(seed)
    a = compile_query(random_query(rng))
    b = encode_binary(random_tree(rng, 8))
    assert solve_weak_game(build_product(a, b)) == naive_winning(a, b)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_accepting_class_wins_more(seed):
    rng = random.Random(seed)
    a = random_twata(rng)
    b = rng.choice(list(all_binary_trees(3, ["p"])))
    rej = Twata(a.names, a.delta, 0, a.partition, set(), props={"p"})
    acc = Twata(a.names, a.delta, 0, a.partition, set(range(len(a))), props={"p"})
    assert solve_weak_game(build_product(rej, b)) <= solve_weak_game(build_product(acc, b))


def test_worked_example_pipeline():
    from muxpath.trees import binary_address_map
    q = parse_query("$X : lfp { $X = red | <child> $X }")
    t = parse_tree("(doc (red) (blue (red)))")
    a = compile_query(q)
    m = binary_address_map(t)
    want = {m[x] for x in [(), (1,), (2,), (2, 1)]}
    b = encode_binary(t)
    assert selected_nodes(a, b) == want
    assert {x for s, x in solve_weak_game(build_product(a, b)) if s == a.initial} == want
