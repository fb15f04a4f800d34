"""Nonemptiness of 2WATAs, with witness trees.

The engine guesses, node by node, a local strategy (which moves each active
state takes) and summarises what happens below a node by its *exits*: for a
state t entering the node from its parent, the states u the run can come back
up to, and whether an accepting state was seen on the way.  Exits are the
part of an annotation a parent actually needs, so they play the role of the
annotation component of an NTA state.

Exploration runs top-down (which sets of states can enter a node, and which
upward moves are allowed there); acceptance runs bottom-up as a fixpoint,
admitting a (demand, exits) pair as soon as some local choice is justified by
children admitted earlier.  The first justification of each pair is kept as a
witness plan, from which a finite tree is rebuilt and re-checked by the
evaluator before it is returned.
"""

import itertools
import os
from dataclasses import dataclass, field

from .acceptance import selected_nodes
from .automata import (PFALSE, PTRUE, LabelIs, Move, PAnd, POr, _Const, label_props, p_and, p_or,
                       resolve)
from .trees import BinaryTree

DEFAULT_MAX_STATES = 2_000_000


class BudgetExhausted(RuntimeError):
    """The state budget ran out before a verdict was reached."""


class _Empty:
    """The 'no tree is accepted' verdict (falsy)."""

    def __bool__(self):
        return False

    def __repr__(self):
        return "Empty"


Empty = _Empty()


def default_budget():
    env = os.environ.get("MUXPATH_MAX_STATES")
    return int(env) if env else DEFAULT_MAX_STATES


# ------------------------------------------------------------ label types

@dataclass(frozen=True)
class StrategyLabel:
    """tau(x): the active states and the moves they take, as (s, d, s')."""
    active: frozenset
    edges: frozenset

    def sources(self):
        return frozenset(s for s, _, _ in self.edges)


@dataclass(frozen=True)
class AnnotationLabel:
    """eta(x): (s, c, s') means a finite run segment from s back to s' at the
    same node, with c = 1 when it visits an accepting state after s."""
    edges: frozenset = frozenset()

    @property
    def accepting(self):
        return not any(s == t and c == 0 for s, c, t in self.edges)


@dataclass(frozen=True)
class NtaState:
    strategy: StrategyLabel
    annotation: AnnotationLabel


@dataclass(frozen=True)
class Demand:
    """What a parent asks of a child: the states it sends down (entry) and
    the states the child may move up to (allowed)."""
    entry: frozenset
    allowed: frozenset


@dataclass(frozen=True)
class _Option:
    letter: frozenset
    strategy: StrategyLabel
    children: tuple          # (Demand or None, Demand or None)


# ------------------------------------------------------------ minimal models

def minimal_models(f):
    """Minimal sets of moves satisfying a label-free positive formula."""
    if f == PTRUE:
        return [frozenset()]
    if f == PFALSE or isinstance(f, _Const):
        return []
    if isinstance(f, Move):
        return [frozenset([f])]
    if isinstance(f, LabelIs):
        raise ValueError("resolve label tests first")
    subs = [minimal_models(g) for g in f.args]
    if isinstance(f, POr):
        cands = [m for ms in subs for m in ms]
    else:
        cands = [frozenset()]
        for ms in subs:
            cands = list({c | m for c in cands for m in ms})
            if not cands:
                return []
    cands = sorted(set(cands), key=len)
    out = []
    for c in cands:
        if not any(o <= c for o in out):
            out.append(c)
    return out


def _forbid_up(f, allowed):
    """Replace upward moves to states outside ``allowed`` by false."""
    if isinstance(f, Move):
        return PFALSE if f.d == -1 and f.s not in allowed else f
    if isinstance(f, PAnd):
        return p_and(*(_forbid_up(g, allowed) for g in f.args))
    if isinstance(f, POr):
        return p_or(*(_forbid_up(g, allowed) for g in f.args))
    return f


def expand_strategy_labels(a, letter, active=None):
    """All strategy labels for ``active`` (default: every state) under
    ``letter``: one minimal model per active state, combined."""
    active = sorted(range(len(a)) if active is None else active)
    per_state = []
    for s in active:
        ms = minimal_models(resolve(a.delta[s], letter))
        if not ms:
            return set()
        per_state.append([frozenset((s, m.d, m.s) for m in mod) for mod in ms])
    out = set()
    for combo in itertools.product(*per_state):
        out.add(StrategyLabel(frozenset(active), frozenset().union(*combo)))
    return out


# ------------------------------------------------------------ annotations

def close_annotation(r, alpha, children=None, parent=None, start=()):
    """Least annotation of strategy ``r`` closed under the four rules.

    ``children`` maps a direction i > 0 to (strategy, annotation) of child i;
    ``parent`` is (i, strategy, annotation) of the parent, this node being its
    i-th child.  A zero-length segment is allowed on the other side of an
    excursion (a state entering a child may step straight back up), which the
    composition rules otherwise miss.  Bits count states after the source.
    """
    alpha = frozenset(alpha)
    acc = lambda s: 1 if s in alpha else 0
    edges = set(start)
    for s, d, t in r.edges:
        if d == 0:
            edges.add((s, acc(t), t))

    def excursions(down, other_r, other_eta, back):
        # down: pairs (s, t) with s here and t entering the other node
        out = set()
        segs = {}
        for u, c, v in other_eta.edges:
            segs.setdefault(u, set()).add((c, v))
        for s, t in down:
            reach = {(acc(t), t)} | {(max(acc(t), c), v) for c, v in segs.get(t, ())}
            for c, v in reach:
                for v2, d2, w in other_r.edges:
                    if v2 == v and d2 == back:
                        out.add((s, max(c, acc(w)), w))
        return out

    extra = set()
    for i, (cr, ceta) in (children or {}).items():
        down = [(s, t) for s, d, t in r.edges if d == i]
        extra |= excursions(down, cr, ceta, -1)
    if parent is not None:
        i, pr, peta = parent
        down = [(s, t) for s, d, t in r.edges if d == -1]
        extra |= excursions(down, pr, peta, i)
    edges |= extra
    # rule 1: transitive composition with max bits
    changed = True
    while changed:
        changed = False
        by_src = {}
        for s, c, t in edges:
            by_src.setdefault(s, set()).add((c, t))
        for s, c, t in list(edges):
            for c2, t2 in by_src.get(t, ()):
                e = (s, max(c, c2), t2)
                if e not in edges:
                    edges.add(e)
                    changed = True
    return AnnotationLabel(frozenset(edges))


# ------------------------------------------------------------ exploration

class Nta:
    """The explored part of the strategy/annotation automaton.

    ``options[d]`` lists the local choices for demand d: a letter, a strategy
    label and the demands it puts on the two children (None = no child).
    ``states`` maps admitted (demand, exits) keys to their NtaState.

    With ``anchored`` the run may start at any node: the root receives
    nothing, every node may add the initial state to its active set, and
    children are always present (possibly with nothing to do).  Option
    pruning is off in that mode since it is only sound when the tree is
    ours to choose."""

    def __init__(self, a, max_states=None, anchored=False):
        self.a = a
        self.anchored = anchored
        self.max_states = default_budget() if max_states is None else max_states
        self.alpha = a.alpha
        self.root = Demand(frozenset() if anchored else frozenset([a.initial]), frozenset())
        self.options = {}
        self.states = {}
        self.initials = set()
        self._models = {}
        self.delta, self.trivial = _simplify(a)
        self.up = frozenset(t for t in a.up_targets() if t not in self.trivial)
        self.up_free = frozenset(t for t in a.up_targets() if t in self.trivial)
        self._rel = [tuple(sorted(label_props(f))) for f in self.delta]
        self._n_options = 0
        self.letters = set()
        self._explore()

    @property
    def size(self):
        return len(self.options) + self._n_options + len(self.states)

    def _charge(self):
        if self.size > self.max_states:
            raise BudgetExhausted(f"state budget of {self.max_states} exhausted")

    def _table(self, s, allowed):
        """Models of state s, indexed by the values of its relevant props:
        {bits: [(edges, 0-targets)]}."""
        key = (s, allowed)
        tab = self._models.get(key)
        if tab is None:
            props = self._rel[s]
            tab = {}
            for bits in itertools.product((False, True), repeat=len(props)):
                letter = frozenset(p for p, b in zip(props, bits) if b)
                f = _forbid_up(resolve(self.delta[s], letter), allowed)
                tab[bits] = [(tuple((s, m.d, m.s) for m in mod),
                              tuple(m.s for m in mod if m.d == 0))
                             for mod in minimal_models(f)]
            self._models[key] = tab
        return tab

    def _explore(self):
        todo = [self.root]
        self.options[self.root] = None
        while todo:
            d = todo.pop()
            opts = self._options_for(d)
            self.options[d] = opts
            self._n_options += len(opts)
            self._charge()
            for o in opts:
                for cd in o.children:
                    if cd is not None and cd not in self.options:
                        self.options[cd] = None
                        todo.append(cd)

    def _seeds(self, d):
        spare = sorted(self.up - d.entry)
        anchors = [frozenset()]
        if self.anchored and self.a.initial not in d.entry:
            anchors.append(frozenset([self.a.initial]))
        for k in range(len(spare) + 1):
            for extra in itertools.combinations(spare, k):
                for anc in anchors:
                    yield d.entry | frozenset(extra) | anc

    def _options_for(self, d):
        seen = {}
        for seed in self._seeds(d):
            for letter, strat in self._strategies(seed, d.allowed):
                kids = []
                for i in (1, 2):
                    ent = frozenset(t for s, dd, t in strat.edges if dd == i)
                    up = (strat.active & self.up) | self.up_free
                    kids.append(Demand(ent, up) if ent or self.anchored else None)
                key = (strat, tuple(kids))
                if key not in seen:
                    self.letters.add(letter)
                    seen[key] = _Option(letter, strat, tuple(kids))
                    if len(seen) > self.max_states:
                        raise BudgetExhausted(f"state budget of {self.max_states} exhausted")
        if self.anchored:
            return list(seen.values())
        return _prune(seen.values(), self.up)

    def _strategies(self, seed, allowed):
        """Active sets closed under 0-moves, with one minimal model each.

        The letter is fixed lazily: a proposition is only branched on when an
        active state's transition mentions it; untouched ones stay false.
        Plain backtracking with undo, since this is the engine's hot loop."""
        out = []
        pend = sorted(seed)
        chosen = set()
        edges = []
        assign = {}

        def go(i):
            while i < len(pend) and pend[i] in chosen:
                i += 1
            if i == len(pend):
                letter = frozenset(p for p, v in assign.items() if v)
                out.append((letter, StrategyLabel(frozenset(chosen), frozenset(edges))))
                return
            s = pend[i]
            props = self._rel[s]
            tab = self._table(s, allowed)
            free = [p for p in props if p not in assign]
            for bits in itertools.product((False, True), repeat=len(free)):
                assign.update(zip(free, bits))
                for medges, zeros in tab[tuple(assign[p] for p in props)]:
                    chosen.add(s)
                    n_p, n_e = len(pend), len(edges)
                    edges.extend(medges)
                    pend.extend(z for z in zeros if z not in chosen)
                    go(i + 1)
                    del pend[n_p:]
                    del edges[n_e:]
                    chosen.discard(s)
            for p in free:
                del assign[p]

        go(0)
        return out


def _simplify(a):
    """Transitions with moves to unsatisfiable states made false and 0-moves
    to trivially true states made true; returns (delta, trivially true)."""
    delta = list(a.delta)
    dead, trivial = set(), set()

    def sub(f):
        if isinstance(f, Move):
            if f.s in dead:
                return PFALSE
            if f.d == 0 and f.s in trivial:
                return PTRUE
            return f
        if isinstance(f, PAnd):
            return p_and(*(sub(g) for g in f.args))
        if isinstance(f, POr):
            return p_or(*(sub(g) for g in f.args))
        return f

    changed = True
    while changed:
        changed = False
        for s, f in enumerate(delta):
            g = sub(f)
            if g != f:
                delta[s] = g
                changed = True
            if g == PFALSE and s not in dead:
                dead.add(s)
                changed = True
            if g == PTRUE and s not in trivial:
                trivial.add(s)
                changed = True
    return delta, frozenset(trivial)


def _prune(options, up):
    """Drop options whose edges include another option's edges (same
    upward-target set): they only add obligations."""
    opts = sorted(options, key=lambda o: len(o.strategy.edges))
    kept = []
    for o in opts:
        sig = o.strategy.active & up
        if not any(k.strategy.active & up == sig and k.strategy.edges <= o.strategy.edges
                   for k in kept):
            kept.append(o)
    return kept


# ------------------------------------------------------------ acceptance

@dataclass
class WitnessPlan:
    """First justification of each admitted key: (letter, child keys)."""
    steps: dict = field(default_factory=dict)

    def tree(self, key):
        labels = {(): None}
        stack = [((), key)]
        while stack:
            addr, k = stack.pop()
            letter, kids = self.steps[k]
            labels[addr] = letter
            for i, ck in zip((1, 2), kids):
                if ck is not None:
                    stack.append((addr + (i,), ck))
        return BinaryTree(labels)


def _local(option, kid_exits, alpha):
    """Local run graph of one choice, given the children's exits.

    succ[s] lists (s', bit) for 0-moves and for excursions through a child.
    Returns None when some cycle avoids accepting states (a cycle of
    zero-bit edges; cycles stay inside one weakness class)."""
    strat = option.strategy
    succ = {s: [] for s in strat.active}
    for s, d, t in strat.edges:
        if d == 0:
            succ[s].append((t, 1 if t in alpha else 0))
        elif d > 0:
            for t2, u, c in kid_exits[d - 1]:
                if t2 == t and u in succ:
                    succ[s].append((u, 1 if c or u in alpha else 0))
    # iterative DFS for a cycle over zero-bit edges
    color = dict.fromkeys(succ, 0)
    for root in succ:
        if color[root]:
            continue
        color[root] = 1
        stack = [(root, iter(succ[root]))]
        while stack:
            v, it = stack[-1]
            for w, c in it:
                if c:
                    continue
                if color[w] == 1:
                    return None
                if color[w] == 0:
                    color[w] = 1
                    stack.append((w, iter(succ[w])))
                    break
            else:
                color[v] = 2
                stack.pop()
    return succ


def _search(succ, src):
    """Least bit of a path (>= 1 step) from src to each reachable state."""
    seen = {}
    todo = [(src, 0)]
    while todo:
        v, b = todo.pop()
        for w, c in succ[v]:
            nb = b | c
            if w not in seen or nb < seen[w]:
                seen[w] = nb
                todo.append((w, nb))
    return seen


def _annotation(succ):
    return AnnotationLabel(frozenset((s, c, t) for s in succ
                                     for t, c in _search(succ, s).items()))


def _exits(entry, succ, ups, alpha):
    out = {}
    for t in entry:
        b0 = 1 if t in alpha else 0
        cands = [(t, b0)] + [(v, b0 | c) for v, c in _search(succ, t).items()]
        for v, b in cands:
            for u in ups.get(v, ()):
                k = (t, u)
                if k not in out or b < out[k]:
                    out[k] = b
    return frozenset((t, u, b) for (t, u), b in out.items())


def _better(x, y):
    """Exit summary x is at least as good as y for every parent."""
    ym = {(t, u): b for t, u, b in y}
    return all((t, u) in ym and b >= ym[(t, u)] for t, u, b in x)


def nta_accepting_fixpoint(n, a=None):
    """Admit (demand, exits) keys bottom-up until nothing changes.

    Returns (acc, plan): acc maps each demand to its non-dominated exit
    summaries; plan records the first justification of every admitted key.
    """
    a = a or n.a
    alpha = a.alpha
    acc = {d: [] for d in n.options}
    plan = WitnessPlan()
    tried = set()
    ups_of = {}
    for d, opts in n.options.items():
        ups_of[d] = []
        for o in opts:
            ups = {}
            for s, dd, t in o.strategy.edges:
                if dd == -1 and t not in n.trivial:     # a true state ends the path
                    ups.setdefault(s, []).append(t)
            ups_of[d].append(ups)
    changed = True
    while changed:
        changed = False
        for d, opts in n.options.items():
            for oi, o in enumerate(opts):
                pools = []
                for cd in o.children:
                    pools.append([None] if cd is None else [(cd, x) for x in acc[cd]])
                for combo in itertools.product(*pools):
                    tk = (d, oi, combo)
                    if tk in tried:
                        continue
                    tried.add(tk)
                    kid_exits = [() if c is None else c[1] for c in combo]
                    succ = _local(o, kid_exits, alpha)
                    if succ is None:
                        continue
                    ex = _exits(d.entry, succ, ups_of[d][oi], alpha)
                    if any(_better(y, ex) for y in acc[d]):
                        continue
                    acc[d] = [y for y in acc[d] if not _better(ex, y)] + [ex]
                    key = (d, ex)
                    plan.steps[key] = (o.letter, combo)
                    n.states[key] = NtaState(o.strategy, _annotation(succ))
                    if d == n.root:
                        n.initials.add(key)
                    changed = True
                    n._charge()
    return acc, plan


def twata_nonempty(a, max_states=None, stats=None):
    """A finite binary tree accepted from its root, or Empty.

    Witnesses are re-checked with the evaluator before being returned.
    If ``stats`` is a dict, automaton and NTA sizes are recorded in it."""
    n = Nta(a, max_states)
    acc, plan = nta_accepting_fixpoint(n, a)
    if stats is not None:
        stats["states"] = len(a)
        stats["nta_states"] = n.size
    if not acc[n.root]:
        return Empty
    key = (n.root, acc[n.root][0])
    t = plan.tree(key)
    if () not in selected_nodes(a, t):
        raise AssertionError("witness tree is not accepted; engine bug")
    return t
