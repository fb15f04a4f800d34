"""Query evaluation: the product of a 2WATA with a tree, solved as a weak game.

Positions are pairs (state, node).  The game is solved one weakness class at
a time, lowest class first: by then every move leaving the class points at a
position whose value is already known, so a class is a monotone Boolean
equation system, solved as a least fixpoint (rejecting class) or a greatest
fixpoint (accepting class) with a worklist.  A position is re-evaluated only
when one of its successors in the same class changes value, which keeps the
total work linear in the size of the product.
"""

from dataclasses import dataclass

from .automata import PFALSE, PTRUE, Move, PAnd, POr, _Const, moves, p_and, p_or


@dataclass(frozen=True)
class At:
    """A product position, as it appears in instantiated formulas."""
    state: int
    node: tuple

    def __str__(self):
        return f"({self.state},{self.node})"


class ProductGame:
    def __init__(self, a, b):
        self.a = a
        self.b = b
        nodes, parent, c1, c2 = b.indexed()
        self.nodes = nodes
        self.n = len(nodes)
        self.parent, self.c1, self.c2 = parent, c1, c2
        self.nbr = {-1: parent, 1: c1, 2: c2}
        labels = {}
        self.label_id = []
        for x in nodes:
            lab = b.labels[x]
            self.label_id.append(labels.setdefault(lab, len(labels)))
        self.labels = list(labels)           # only labels present in b get resolved
        self.templates = [[a.resolved(s, lab) for lab in self.labels] for s in range(len(a))]

    @property
    def positions(self):
        return [(s, x) for s in range(len(self.a)) for x in self.nodes]

    def __len__(self):
        return len(self.a) * self.n

    def class_of(self, pos):
        return self.a.class_of[pos[0]]

    def formula(self, pos):
        """The move formula of a position, with directions applied."""
        s, x = pos
        if not hasattr(self, "_pos"):
            self._pos = {y: i for i, y in enumerate(self.nodes)}
        i = self._pos[x]
        return self._inst(self.templates[s][self.label_id[i]], i)

    def _inst(self, f, i):
        if isinstance(f, Move):
            j = i if f.d == 0 else self.nbr[f.d][i]
            return PFALSE if j < 0 else At(f.s, self.nodes[j])
        if isinstance(f, PAnd):
            return p_and(*(self._inst(g, i) for g in f.args))
        if isinstance(f, POr):
            return p_or(*(self._inst(g, i) for g in f.args))
        return f


def build_product(a, b):
    return ProductGame(a, b)


def _compile(f, n, nbr):
    """Turn a move formula into a function (values, node index) -> bool."""
    if f == PTRUE:
        return lambda v, x: True
    if f == PFALSE or isinstance(f, _Const):
        return lambda v, x: False
    if isinstance(f, Move):
        off = f.s * n
        if f.d == 0:
            return lambda v, x: v[off + x]
        arr = nbr[f.d]
        return lambda v, x: arr[x] >= 0 and v[off + arr[x]]
    parts = [_compile(g, n, nbr) for g in f.args]
    if isinstance(f, PAnd):
        if len(parts) == 2:
            p, q = parts
            return lambda v, x: p(v, x) and q(v, x)
        return lambda v, x: all(p(v, x) for p in parts)
    if len(parts) == 2:
        p, q = parts
        return lambda v, x: p(v, x) or q(v, x)
    return lambda v, x: any(p(v, x) for p in parts)


def _solve(g):
    """Values of all positions as a bytearray indexed by state * n + node."""
    a, n = g.a, g.n
    nbr = g.nbr
    parent, c1, c2 = g.parent, g.c1, g.c2
    lab = g.label_id
    val = bytearray(len(a) * n)
    fns = [[_compile(t, n, nbr) for t in row] for row in g.templates]
    # who moves into s, by direction (over every label)
    preds = [[] for _ in range(len(a))]
    for s, f in enumerate(a.delta):
        for m in moves(f):
            preds[m.s].append((s, m.d))
    for cls, acc in zip(a.partition, a.accepting_classes):
        init = 1 if acc else 0
        members = sorted(cls)
        for s in members:
            off = s * n
            val[off:off + n] = bytes([init]) * n
        inpreds = {s: sorted({(p, d) for p, d in preds[s] if p in cls}) for s in members}
        work = [(s, x) for s in members for x in range(n)]
        while work:
            s, x = work.pop()
            k = s * n + x
            new = 1 if fns[s][lab[x]](val, x) else 0
            if new == val[k]:
                continue
            val[k] = new
            for p, d in inpreds[s]:
                if d == 0:
                    work.append((p, x))
                elif d == -1:
                    if c1[x] >= 0:
                        work.append((p, c1[x]))
                    if c2[x] >= 0:
                        work.append((p, c2[x]))
                else:
                    y = parent[x]
                    if y >= 0 and (c1 if d == 1 else c2)[y] == x:
                        work.append((p, y))
    return val


def solve_weak_game(g):
    """Winning positions, as (state, address) pairs."""
    val = _solve(g)
    n = g.n
    return {(k // n, g.nodes[k % n]) for k in range(len(val)) if val[k]}


def selected_nodes(a, b):
    """Binary-tree addresses x from which a accepts, i.e. (initial, x) wins."""
    g = build_product(a, b)
    val = _solve(g)
    off = a.initial * g.n
    return {g.nodes[x] for x in range(g.n) if val[off + x]}
