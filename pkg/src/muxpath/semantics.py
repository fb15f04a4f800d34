"""Reference semantics: naive fixpoint iteration over explicit node sets.

Nothing here touches automata; the evaluator is the ground truth the tests
compare the compiled pipeline against.  The structural flags are given their
intended meaning (``ifc`` = first child, ``irs`` = later sibling, ``hfc`` = has
children, ``hrs`` = has a next sibling) so back-translated queries can be
evaluated too.
"""

from .syntax import (Alt, And, Ax, Axis, Box, Const, Diamond, Implies, Inverse, Not, Or,
                     Prop, Seq, Star, Test, Var, block_order, check_structure, free_vars)


class _Evaluator:
    def __init__(self, t):
        self.t = t
        self.nodes = frozenset(t.labels)
        self._rel = {}

    # relations are successor maps {x: set(y)}
    def axis(self, a):
        if a in self._rel:
            return self._rel[a]
        t = self.t
        r = {x: set() for x in self.nodes}
        if a in (Axis.CHILD, Axis.FCHILD, Axis.RIGHT):
            for x in self.nodes:
                if a is Axis.CHILD:
                    r[x].update(t.children(x))
                elif a is Axis.FCHILD:
                    if x + (1,) in t.labels:
                        r[x].add(x + (1,))
                elif x and x[:-1] + (x[-1] + 1,) in t.labels:
                    r[x].add(x[:-1] + (x[-1] + 1,))
        else:
            fwd = self.axis(a.inverse)
            for x, ys in fwd.items():
                for y in ys:
                    r[y].add(x)
        self._rel[a] = r
        return r

    def path(self, p, val):
        cacheable = not free_vars(p)
        if cacheable and p in self._rel:
            return self._rel[p]
        if isinstance(p, Ax):
            r = self.axis(p.axis)
        elif isinstance(p, Test):
            s = self.expr(p.expr, val)
            r = {x: ({x} if x in s else set()) for x in self.nodes}
        elif isinstance(p, Seq):
            r1, r2 = self.path(p.left, val), self.path(p.right, val)
            r = {x: set().union(*(r2[y] for y in r1[x])) for x in self.nodes}
        elif isinstance(p, Alt):
            r1, r2 = self.path(p.left, val), self.path(p.right, val)
            r = {x: r1[x] | r2[x] for x in self.nodes}
        elif isinstance(p, Star):
            r1 = self.path(p.arg, val)
            r = {}
            for x in self.nodes:
                seen = {x}
                todo = [x]
                while todo:
                    y = todo.pop()
                    for z in r1[y]:
                        if z not in seen:
                            seen.add(z)
                            todo.append(z)
                r[x] = seen
        elif isinstance(p, Inverse):
            r1 = self.path(p.arg, val)
            r = {x: set() for x in self.nodes}
            for x, ys in r1.items():
                for y in ys:
                    r[y].add(x)
        else:
            raise TypeError(f"not a path: {p!r}")
        if cacheable:
            self._rel[p] = r
        return r

    def prop(self, name):
        t = self.t
        if name == "hfc":
            return frozenset(x for x in self.nodes if x + (1,) in t.labels)
        if name == "hrs":
            return frozenset(x for x in self.nodes if x and x[:-1] + (x[-1] + 1,) in t.labels)
        if name == "ifc":
            return frozenset(x for x in self.nodes if x and x[-1] == 1)
        if name == "irs":
            return frozenset(x for x in self.nodes if x and x[-1] > 1)
        return frozenset(x for x, lab in t.labels.items() if name in lab)

    def expr(self, e, val):
        if isinstance(e, Const):
            return self.nodes if e.value else frozenset()
        if isinstance(e, Prop):
            return self.prop(e.name)
        if isinstance(e, Var):
            return val[e.name]
        if isinstance(e, Not):
            return self.nodes - self.expr(e.arg, val)
        if isinstance(e, And):
            return self.expr(e.left, val) & self.expr(e.right, val)
        if isinstance(e, Or):
            return self.expr(e.left, val) | self.expr(e.right, val)
        if isinstance(e, Implies):
            return (self.nodes - self.expr(e.left, val)) | self.expr(e.right, val)
        if isinstance(e, Diamond):
            r = self.path(e.path, val)
            s = self.expr(e.arg, val)
            return frozenset(x for x in self.nodes if not r[x].isdisjoint(s))
        if isinstance(e, Box):
            r = self.path(e.path, val)
            s = self.expr(e.arg, val)
            return frozenset(x for x in self.nodes if r[x] <= s)
        raise TypeError(f"not a node expression: {e!r}")


def eval_path_relation(p, t, valuation=None):
    """Set of (x, y) address pairs related by path p in sibling tree t."""
    ev = _Evaluator(t)
    r = ev.path(p, valuation or {})
    return {(x, y) for x, ys in r.items() for y in ys}


def eval_expr(e, t, valuation=None):
    """Node set of a (variable-closed under ``valuation``) node expression."""
    return set(_Evaluator(t).expr(e, valuation or {}))


def eval_query_valuation(q, t):
    """Full valuation {var: frozenset(addresses)} after solving every block."""
    check_structure(q)
    ev = _Evaluator(t)
    val = {}
    for i in block_order(q):
        b = q.blocks[i]
        start = ev.nodes if b.kind == "gfp" else frozenset()
        cur = {v: start for v in b.variables}
        limit = len(b.equations) * len(ev.nodes) + 1
        for _ in range(limit + 1):
            env = dict(val)
            env.update(cur)
            nxt = {v: ev.expr(e, env) for v, e in b.equations}
            if nxt == cur:
                break
            cur = nxt
        else:       # pragma: no cover - monotone bodies always converge
            raise RuntimeError("fixpoint iteration did not converge; is the block monotone?")
        val.update(cur)
    return val


def eval_query_direct(q, t):
    """Nodes of t selected by q (the goal variable's value)."""
    return set(eval_query_valuation(q, t)[q.goal])
