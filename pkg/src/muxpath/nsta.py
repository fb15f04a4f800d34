"""Nondeterministic selecting tree automata (NSTAs) and the two conversions.

An NSTA reads the *padded* binary tree: every real node gets exactly two
children, missing ones being leaves labeled BOTTOM.  A run labels every node
with a state, starts in an initial state at the root, follows ``delta`` at
inner nodes, and is accepting when each BOTTOM leaf x with state q has
``delta(q, BOTTOM)`` meeting F x F.  A real node is selected when some
accepting run gives it a selecting state.
"""

import itertools
from dataclasses import dataclass

from .automata import (PFALSE, PTRUE, LabelIs, Move, PAnd, POr, Twata, p_and, p_or,
                       resolve)
from .emptiness import Nta, _exits, _local
from .trees import FLAGS, BinaryTree


class _Bottom:
    def __repr__(self):
        return "BOTTOM"

    def __str__(self):
        return "⊥"


BOTTOM = _Bottom()


class NstAutomaton:
    """States are arbitrary hashables; ``delta`` maps (state, letter) to a
    set of state pairs (missing keys mean no transition).  Letters are
    frozensets of propositions, or BOTTOM."""

    def __init__(self, states, letters, delta, initial, accepting, selecting, props=None):
        self.states = list(states)
        self.letters = list(letters)
        self.delta = {k: frozenset(v) for k, v in delta.items() if v}
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        self.selecting = frozenset(selecting)
        if props is None:
            props = frozenset().union(*(l for l in self.letters if l is not BOTTOM))
        self.props = frozenset(props)

    def __len__(self):
        return len(self.states)

    def pairs(self, q, letter):
        return self.delta.get((q, letter), frozenset())

    def letter_of(self, label):
        return label if label is BOTTOM else frozenset(label) & self.props

    def leaf_ok(self, q):
        return any(p in self.accepting and r in self.accepting
                   for p, r in self.pairs(q, BOTTOM))

    def dump(self):
        idx = {q: i for i, q in enumerate(self.states)}

        def let(l):
            return "⊥" if l is BOTTOM else "{" + ",".join(sorted(l)) + "}"

        lines = [f"# NSTA: {len(self.states)} states, {len(self.letters)} letters"]
        for q in self.states:
            tags = [t for t, on in (("initial", q in self.initial),
                                    ("accepting", q in self.accepting),
                                    ("selecting", q in self.selecting)) if on]
            moves = []
            for l in self.letters:
                ps = sorted((idx[p], idx[r]) for p, r in self.pairs(q, l))
                if ps:
                    moves.append(let(l) + " -> " + " | ".join(f"({p},{r})" for p, r in ps))
            tag = f" [{' '.join(tags)}]" if tags else ""
            lines.append(f"state {idx[q]}{tag}: {'; '.join(moves) or 'none'}    # {q}")
        return "\n".join(lines)


class PaddedTree:
    """A full binary tree: address -> label, padding leaves labeled BOTTOM."""

    def __init__(self, labels):
        self.labels = dict(labels)

    def __len__(self):
        return len(self.labels)

    def nodes(self):
        return sorted(self.labels)

    def leaves(self):
        return [x for x in self.nodes() if x + (1,) not in self.labels]

    def unpad(self):
        return BinaryTree({x: l for x, l in self.labels.items() if l is not BOTTOM})


def pad_full_binary(b):
    """Give every node of b two children; the added ones are BOTTOM leaves."""
    out = {x: frozenset(l) for x, l in b.labels.items()}
    for x in list(out):
        for i in (1, 2):
            if x + (i,) not in out:
                out[x + (i,)] = BOTTOM
    return PaddedTree(out)


def _pad_arrays(b):
    """Array form of the padded tree: (labels, c1, c2); node 0 is the root
    and padding leaves have no children (-1)."""
    nodes, parent, k1, k2 = b.indexed()
    labels = [frozenset(b.labels[x]) for x in nodes]
    n = len(nodes)
    c1, c2 = list(k1), list(k2)
    for i in range(n):
        for arr in (c1, c2):
            if arr[i] < 0:
                arr[i] = len(labels)
                labels.append(BOTTOM)
    c1 += [-1] * (len(labels) - n)
    c2 += [-1] * (len(labels) - n)
    return labels, c1, c2


def nsta_selected_nodes(m, b):
    """Nodes of b (as b.nodes() lists them) selected by the NSTA m.

    Bottom-up: which states admit an accepting run below each node; then
    top-down: which of those are reachable from an initial state at the root."""
    nodes = b.nodes()
    labels, c1, c2 = _pad_arrays(b)
    n = len(labels)
    letters = [m.letter_of(l) for l in labels]
    ok = [None] * n
    for x in reversed(_topo(c1, c2)):
        if labels[x] is BOTTOM:
            ok[x] = {q for q in m.states if m.leaf_ok(q)}
        else:
            l1, l2 = ok[c1[x]], ok[c2[x]]
            ok[x] = {q for q in m.states
                     if any(p in l1 and r in l2 for p, r in m.pairs(q, letters[x]))}
    reach = [set() for _ in range(n)]
    reach[0] = ok[0] & m.initial
    for x in _topo(c1, c2):
        if labels[x] is BOTTOM:
            continue
        l1, l2 = ok[c1[x]], ok[c2[x]]
        for q in reach[x]:
            for p, r in m.pairs(q, letters[x]):
                if p in l1 and r in l2:
                    reach[c1[x]].add(p)
                    reach[c2[x]].add(r)
    return {nodes[i] for i in range(len(nodes)) if reach[i] & m.selecting}


def _topo(c1, c2):
    out, stack = [], [0]
    while stack:
        x = stack.pop()
        out.append(x)
        for c in (c2[x], c1[x]):
            if c >= 0:
                stack.append(c)
    return out


# ------------------------------------------------------------ 2WATA -> NSTA

@dataclass(frozen=True)
class Certificate:
    """One node's share of a strategy: demand, chosen option, the exits it
    promises its children, and the exits it yields to its parent."""
    demand: object
    option: int
    kids: tuple
    exits: frozenset

    def __repr__(self):
        return f"cert({sorted(self.demand.entry)}#{self.option}:{len(self.exits)})"


_EMPTY = "empty"


def _holds(f, edges):
    if f == PTRUE:
        return True
    if f == PFALSE:
        return False
    if isinstance(f, Move):
        return (f.d, f.s) in edges
    if isinstance(f, PAnd):
        return all(_holds(g, edges) for g in f.args)
    if isinstance(f, POr):
        return any(_holds(g, edges) for g in f.args)
    raise ValueError(f"unexpected atom {f}")


def _certificates(n):
    """Every (demand, option, child exits) choice whose local run graph is
    accepting, together with the exits it produces.  No dominance pruning:
    on a fixed tree a weaker summary may be the only one available."""
    alpha = n.alpha
    adm = {d: set() for d in n.options}
    certs = {}
    tried = set()
    changed = True
    while changed:
        changed = False
        for d, opts in n.options.items():
            for oi, o in enumerate(opts):
                ups = {}
                for s, dd, t in o.strategy.edges:
                    if dd == -1 and t not in n.trivial:
                        ups.setdefault(s, []).append(t)
                pools = [[(_EMPTY, cd)] if not cd.entry else [(cd, x) for x in adm[cd]]
                         for cd in o.children]
                for combo in itertools.product(*pools):
                    if (d, oi, combo) in tried:
                        continue
                    tried.add((d, oi, combo))
                    kid_exits = [() if k[0] == _EMPTY else k[1] for k in combo]
                    succ = _local(o, kid_exits, alpha)
                    if succ is None:
                        continue
                    ex = _exits(d.entry, succ, ups, alpha)
                    c = Certificate(d, oi, combo, ex)
                    certs[c] = o
                    if ex not in adm[d]:
                        adm[d].add(ex)
                    changed = True
                    n._charge()
    return certs


def twata_to_nsta(a, max_states=None):
    """An NSTA selecting, on every binary tree, the nodes from which ``a``
    accepts.  States are certificates of local strategy choices; letters
    range over all subsets of the automaton's propositions (flags included)."""
    n = Nta(a, max_states, anchored=True)
    certs = _certificates(n)
    by_key = {}
    for c in certs:
        by_key.setdefault((c.demand, c.exits), []).append(c)
    by_demand = {}
    for c in certs:
        by_demand.setdefault(c.demand, []).append(c)
    bot, acc = "bot", "accept"
    props = sorted(a.props)
    letters = [frozenset(p for p, on in zip(props, bits) if on)
               for bits in itertools.product((False, True), repeat=len(props))]

    def kid_states(k):
        if k[0] == _EMPTY:
            return [bot] + by_demand.get(k[1], [])
        return by_key.get(k, [])

    delta = {(bot, BOTTOM): {(acc, acc)}}
    for c, o in certs.items():
        edges_of = {}
        for s, dd, t in o.strategy.edges:
            edges_of.setdefault(s, set()).add((dd, t))
        pairs = set(itertools.product(kid_states(c.kids[0]), kid_states(c.kids[1])))
        if not pairs:
            continue
        for l in letters:
            if all(_holds(resolve(n.delta[s], l), edges_of.get(s, ())) for s in o.strategy.active):
                delta[(c, l)] = pairs
    states = [acc, bot] + sorted(certs, key=repr)
    initial = by_demand.get(n.root, [])
    selecting = [c for c, o in certs.items() if a.initial in o.strategy.active]
    return NstAutomaton(states, letters + [BOTTOM], delta, initial, [acc], selecting, props)


# ------------------------------------------------------------ NSTA -> 2WATA

def nsta_to_twata(m):
    """A 2WATA selecting, on every well-formed binary tree, the nodes that m
    selects.  Padding leaves are the missing children, found through the
    hfc / hrs flags.  All classes are rejecting: downward copies only move
    down and upward copies only move up, so every play is finite."""
    props = sorted(m.props)
    real = [l for l in m.letters if l is not BOTTOM]
    S = list(m.states)
    k = len(S)
    names = ["s0"]
    for d in "udlr":
        names += [f"({q},{d})" for q in S]
    let_base = len(names)
    names += ["{" + ",".join(sorted(l)) + "}" for l in real]

    def st(i, d):
        return 1 + "udlr".index(d) * k + i

    idx = {q: i for i, q in enumerate(S)}
    leaf = [m.leaf_ok(q) for q in S]
    let_idx = {l: let_base + j for j, l in enumerate(real)}

    def child(i, flag, t):
        present = LabelIs(flag)
        return p_or(p_and(present, Move(i, st(idx[t], "d"))),
                    p_and(LabelIs(flag, False), PTRUE if leaf[idx[t]] else PFALSE))

    delta = [None] * len(names)
    delta[0] = p_or(*(p_and(Move(0, st(idx[q], "d")), Move(0, st(idx[q], "u")))
                      for q in m.selecting if q in idx))
    ups_1 = {q: [] for q in S}      # q as left child: (parent state, letter, right sibling state)
    ups_2 = {q: [] for q in S}
    for t in S:
        for l in real:
            for p, r in m.pairs(t, l):
                ups_1[p].append((t, l, r))
                ups_2[r].append((t, l, p))
    for q in S:
        i = idx[q]
        delta[st(i, "d")] = p_or(*(
            p_and(Move(0, let_idx[l]), child(1, "hfc", p), child(2, "hrs", r))
            for l in real for p, r in m.pairs(q, l)))
        at_root = p_and(LabelIs("ifc", False), LabelIs("irs", False),
                        PTRUE if q in m.initial else PFALSE)
        from_left = p_and(LabelIs("ifc"), p_or(*(
            p_and(Move(-1, st(idx[t], "u")), Move(-1, let_idx[l]), Move(-1, st(idx[r], "r")))
            for t, l, r in ups_1[q])))
        from_right = p_and(LabelIs("irs"), p_or(*(
            p_and(Move(-1, st(idx[t], "u")), Move(-1, let_idx[l]), Move(-1, st(idx[p], "l")))
            for t, l, p in ups_2[q])))
        delta[st(i, "u")] = p_or(at_root, from_left, from_right)
        delta[st(i, "l")] = child(1, "hfc", q)
        delta[st(i, "r")] = child(2, "hrs", q)
    for l, j in let_idx.items():
        delta[j] = p_and(*(LabelIs(p, p in l) for p in props))
    low = set(range(let_base, len(names))) | {st(i, d) for i in range(k) for d in "dlr"}
    ups = {st(i, "u") for i in range(k)}
    return Twata(names, delta, 0, [low, ups, {0}], set(), props=set(props) | set(FLAGS))
