"""Two-way weak alternating tree automata over binary trees.

Transitions are positive Boolean formulas whose atoms are moves
``Move(d, s)`` (d in -1, 0, 1, 2) and label tests ``LabelIs(p, positive)``.
Resolving the label tests against a concrete node label gives the formula
over moves that the automaton must satisfy at that node.
"""

from collections import namedtuple
from dataclasses import dataclass
from functools import reduce
from itertools import product

from .lowering import prepare_query
from .syntax import (FALSE, TRUE, And, Ax, Axis, Box, Const, Diamond, FixpointBlock,
                     MuXPathQuery, Not, Or, Prop, Var, body_of, closure, conj, disj,
                     dual_name, free_vars, render_expr)
from .trees import FLAGS

# ------------------------------------------------------------------ formulas


@dataclass(frozen=True)
class Move:
    d: int
    s: int

    def __str__(self):
        return f"({self.d},{self.s})"


@dataclass(frozen=True)
class LabelIs:
    prop: str
    positive: bool = True

    def __str__(self):
        return self.prop if self.positive else "!" + self.prop


@dataclass(frozen=True)
class _Const:
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


PTRUE = _Const(True)
PFALSE = _Const(False)


@dataclass(frozen=True)
class PAnd:
    args: tuple

    def __str__(self):
        return " & ".join(f"({a})" if isinstance(a, POr) else str(a) for a in self.args)


@dataclass(frozen=True)
class POr:
    args: tuple

    def __str__(self):
        return " | ".join(str(a) for a in self.args)


def p_and(*xs):
    out = []
    for x in xs:
        if x == PFALSE:
            return PFALSE
        if x == PTRUE:
            continue
        out.extend(x.args if isinstance(x, PAnd) else (x,))
    if not out:
        return PTRUE
    return out[0] if len(out) == 1 else PAnd(tuple(out))


def p_or(*xs):
    out = []
    for x in xs:
        if x == PTRUE:
            return PTRUE
        if x == PFALSE:
            continue
        out.extend(x.args if isinstance(x, POr) else (x,))
    if not out:
        return PFALSE
    return out[0] if len(out) == 1 else POr(tuple(out))


def resolve(f, label):
    """Evaluate LabelIs atoms under ``label`` (a set of props); simplify."""
    if isinstance(f, LabelIs):
        return PTRUE if (f.prop in label) == f.positive else PFALSE
    if isinstance(f, PAnd):
        return p_and(*(resolve(a, label) for a in f.args))
    if isinstance(f, POr):
        return p_or(*(resolve(a, label) for a in f.args))
    return f


def atoms(f):
    if isinstance(f, (PAnd, POr)):
        for a in f.args:
            yield from atoms(a)
    else:
        yield f


def label_props(f):
    return frozenset(a.prop for a in atoms(f) if isinstance(a, LabelIs))


def moves(f):
    return [a for a in atoms(f) if isinstance(a, Move)]


# ------------------------------------------------------------------- the type

WeaknessReport = namedtuple("WeaknessReport", "ok reason")
WeaknessReport.__bool__ = lambda self: self.ok


class Twata:
    """A 2WATA with an explicit weakness partition (lowest class first)."""

    def __init__(self, names, delta, initial, partition, alpha, props=None, exprs=None):
        self.names = tuple(names)
        self.delta = tuple(delta)
        self.initial = initial
        self.partition = tuple(frozenset(c) for c in partition)
        self.alpha = frozenset(alpha)
        occurring = set()
        for f in self.delta:
            occurring |= label_props(f)
        self.props = frozenset(props) if props is not None else frozenset(occurring) | set(FLAGS)
        self.exprs = tuple(exprs) if exprs is not None else None
        self._relevant = [label_props(f) for f in self.delta]
        self._cache = {}
        self.class_of = {}
        for i, c in enumerate(self.partition):
            for s in c:
                self.class_of[s] = i

    def __len__(self):
        return len(self.names)

    @property
    def accepting_classes(self):
        return tuple(c <= self.alpha for c in self.partition)

    def relevant(self, s):
        return self._relevant[s]

    def resolved(self, s, label):
        key = (s, frozenset(label) & self._relevant[s])
        r = self._cache.get(key)
        if r is None:
            r = self._cache[key] = resolve(self.delta[s], key[1])
        return r

    def up_targets(self):
        return frozenset(m.s for f in self.delta for m in moves(f) if m.d == -1)

    def reachable_states(self, start=None):
        start = self.initial if start is None else start
        seen = {start}
        todo = [start]
        while todo:
            s = todo.pop()
            for m in moves(self.delta[s]):
                if m.s not in seen:
                    seen.add(m.s)
                    todo.append(m.s)
        return frozenset(seen)

    def dump(self):
        lines = [f"# initial state {self.initial}"]
        for ci, c in enumerate(self.partition):
            tag = "accepting" if c <= self.alpha else "rejecting"
            for s in sorted(c):
                lines.append(f"state {s} [class C{ci} {tag}]: {self.delta[s]}    # {self.names[s]}")
        return "\n".join(lines)

    def to_dot(self):
        lines = ["digraph twata {", "  rankdir=LR;"]
        for s, name in enumerate(self.names):
            shape = "doublecircle" if s in self.alpha else "circle"
            label = name.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  s{s} [shape={shape}, label="{s}: {label}"];')
        lines.append(f"  init [shape=point]; init -> s{self.initial};")
        for s, f in enumerate(self.delta):
            for d in sorted({(m.d, m.s) for m in moves(f)}):
                lines.append(f'  s{s} -> s{d[1]} [label="{d[0]}"];')
        lines.append("}")
        return "\n".join(lines)


def validate_weakness(a):
    """Partition covers states disjointly, classes are pure, moves never ascend."""
    seen = set()
    for c in a.partition:
        if c & seen:
            return WeaknessReport(False, f"state {min(c & seen)} is in two classes")
        seen |= c
    if seen != set(range(len(a))):
        missing = sorted(set(range(len(a))) - seen)
        return WeaknessReport(False, f"states {missing} are in no class")
    if a.initial not in seen:
        return WeaknessReport(False, "initial state is not a state")
    for i, c in enumerate(a.partition):
        if (c & a.alpha) and not c <= a.alpha:
            return WeaknessReport(False, f"class C{i} mixes accepting and rejecting states")
    for s, f in enumerate(a.delta):
        for m in moves(f):
            if m.s not in a.class_of:
                return WeaknessReport(False, f"state {s} moves to unknown state {m.s}")
            if m.d not in (-1, 0, 1, 2):
                return WeaknessReport(False, f"state {s} uses direction {m.d}")
            if a.class_of[m.s] > a.class_of[s]:
                return WeaknessReport(
                    False, f"state {s} (class C{a.class_of[s]}) moves up to state {m.s} "
                           f"(class C{a.class_of[m.s]})")
    return WeaknessReport(True, None)


# ---------------------------------------------------------------- compilation

_AXIS_MOVE = {
    Axis.FCHILD: ("hfc", 1),
    Axis.RIGHT: ("hrs", 2),
    Axis.FCHILD_INV: ("ifc", -1),
    Axis.RIGHT_INV: ("irs", -1),
}


def _levels(q):
    """Linear list of (variable names, kind), dependencies first.

    Implicit dual blocks (duals nobody defined explicitly) join the order
    too: the dual of block B reads the duals of whatever B reads, so it is
    placed after those."""
    defined = set(q.variables())
    owner = {}
    entries = []
    for b in q.blocks:
        entries.append((b.variables, b.kind, b))
        duals = tuple(dual_name(v) for v in b.variables)
        if not any(d in defined for d in duals):
            entries.append((duals, "gfp" if b.kind == "lfp" else "lfp", b))
    for i, (vs, _, _) in enumerate(entries):
        for v in vs:
            owner[v] = i
    deps = []
    for i, (vs, _, b) in enumerate(entries):
        implicit = vs[0] not in defined
        used = {u for _, e in b.equations for u in free_vars(e)}
        if implicit:
            used = {dual_name(u) for u in used}
        deps.append({owner[u] for u in used} - {i})
    order, done = [], set()
    while len(order) < len(entries):
        i = next(i for i in range(len(entries)) if i not in done and deps[i] <= done)
        order.append(i)
        done.add(i)
    return [entries[i][:2] for i in order]


def compile_query(q):
    """A_q: one state per closure member, moves per the closure structure."""
    q = prepare_query(q)
    cl = sorted(closure(q), key=lambda e: (render_expr(e)))
    levels = _levels(q)
    level_of = {}
    for i, (vs, _) in enumerate(levels, 1):
        for v in vs:
            level_of[v] = i
    index = {e: i for i, e in enumerate(cl)}
    defs = q.definitions()

    def cls(e):
        vs = free_vars(e)
        return max((level_of[v] for v in vs), default=0)

    delta = []
    for e in cl:
        if isinstance(e, Const):
            f = PTRUE if e.value else PFALSE
        elif isinstance(e, Prop):
            f = LabelIs(e.name, True)
        elif isinstance(e, Not):
            assert isinstance(e.arg, Prop), e
            f = LabelIs(e.arg.name, False)
        elif isinstance(e, And):
            f = p_and(Move(0, index[e.left]), Move(0, index[e.right]))
        elif isinstance(e, Or):
            f = p_or(Move(0, index[e.left]), Move(0, index[e.right]))
        elif isinstance(e, (Diamond, Box)):
            flag, d = _AXIS_MOVE[e.path.axis]
            mv = Move(d, index[e.arg])
            if isinstance(e, Diamond):
                f = PAnd((LabelIs(flag, True), mv))
            else:
                f = POr((LabelIs(flag, False), mv))
        elif isinstance(e, Var):
            f = Move(0, index[body_of(q, e.name, defs)])
        else:
            raise TypeError(e)
        delta.append(f)

    nclass = len(levels) + 1
    buckets = [set() for _ in range(nclass)]
    for e, i in index.items():
        buckets[cls(e)].add(i)
    partition, alpha = [], set()
    for li, members in enumerate(buckets):
        if not members:
            continue
        partition.append(members)
        if li > 0 and levels[li - 1][1] == "gfp":
            alpha |= members
    props = {e.name for e in cl if isinstance(e, Prop)} | set(FLAGS)
    a = Twata([render_expr(e) for e in cl], delta, index[Var(q.goal)], partition, alpha,
              props=props, exprs=cl)
    a.query = q
    a.index = index
    assert validate_weakness(a), validate_weakness(a).reason
    return a


def build_wf_automaton(q):
    """A^wf_q: checks the structural flags everywhere and q somewhere.

    Two additions beyond the textbook construction: the initial state also
    checks the root flags (no ifc, irs or hrs at the root), and the search
    state only descends along hfc / hrs, so it never looks at parts of the
    binary tree that do not encode sibling-tree nodes."""
    base = compile_query(q)
    ix = base.index
    n = len(base)
    s_ini, s_struc, s_q0 = n, n + 1, n + 2
    ifc, irs = ix[Prop("ifc")], ix[Prop("irs")]
    not_ifc, not_irs = ix[Not(Prop("ifc"))], ix[Not(Prop("irs"))]
    d_ini = p_and(Move(0, s_struc), Move(0, s_q0),
                  LabelIs("ifc", False), LabelIs("irs", False), LabelIs("hrs", False))
    d_struc = p_and(
        p_or(LabelIs("hfc", False), p_and(Move(1, ifc), Move(1, not_irs), Move(1, s_struc))),
        p_or(LabelIs("hrs", False), p_and(Move(2, irs), Move(2, not_ifc), Move(2, s_struc))))
    d_q0 = p_or(Move(0, base.initial),
                p_and(LabelIs("hfc", True), Move(1, s_q0)),
                p_and(LabelIs("hrs", True), Move(2, s_q0)))
    partition = list(base.partition) + [{s_q0}, {s_struc}, {s_ini}]
    a = Twata(base.names + ("s_ini", "s_struc", "s_q0"), base.delta + (d_ini, d_struc, d_q0),
              s_ini, partition, base.alpha | {s_struc}, props=base.props,
              exprs=base.exprs + (None, None, None))
    a.query = base.query
    a.index = base.index
    a.goal_state = base.initial
    assert validate_weakness(a), validate_weakness(a).reason
    return a


# ------------------------------------------------------------ back-translation

def _pi(f, var):
    if f == PTRUE:
        return TRUE
    if f == PFALSE:
        return FALSE
    if isinstance(f, Move):
        x = Var(var(f.s))
        if f.d == 0:
            return x
        if f.d == 1:
            return Diamond(Ax(Axis.FCHILD), x)
        if f.d == 2:
            return Diamond(Ax(Axis.RIGHT), x)
        return Or(And(Prop("ifc"), Diamond(Ax(Axis.FCHILD_INV), x)),
                  And(Prop("irs"), Diamond(Ax(Axis.RIGHT_INV), x)))
    if isinstance(f, LabelIs):
        return Prop(f.prop) if f.positive else Not(Prop(f.prop))
    if isinstance(f, PAnd):
        return reduce(And, (_pi(a, var) for a in f.args))
    if isinstance(f, POr):
        return reduce(Or, (_pi(a, var) for a in f.args))
    raise TypeError(f)


def twata_to_query(a, var=lambda s: f"s{s}"):
    """pi(A): one equation per state, one block per partition class.

    Each body is a case split over the label props the state's transition
    mentions: for every assignment, a guard fixing those props conjoined with
    the translation of the transition resolved under that assignment."""
    eq = {}
    for s, f in enumerate(a.delta):
        props = sorted(a.relevant(s))
        cases = []
        for bits in product((True, False), repeat=len(props)):
            label = {p for p, b in zip(props, bits) if b}
            r = resolve(f, label)
            if r == PFALSE:
                continue
            guard = conj(*(Prop(p) if b else Not(Prop(p)) for p, b in zip(props, bits)))
            cases.append(conj(guard, _pi(r, var)))
        eq[s] = disj(*cases)
    blocks = []
    for c in a.partition:
        kind = "gfp" if c <= a.alpha else "lfp"
        blocks.append(FixpointBlock(kind, tuple((var(s), eq[s]) for s in sorted(c))))
    return MuXPathQuery(var(a.initial), tuple(blocks))
