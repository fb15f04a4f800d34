"""Lowering of regular path expressions and of the unranked child axis.

Two routes lead to core queries (axes fchild, right and their inverses only):

* ``lower_paths`` translates a closed RXPath node expression into a query
  with one lfp block per construct, following the classic inductive
  translation (each subformula gets its own variable);
* ``prepare_query`` lowers the paths that occur inside the bodies of a
  user query, adding equations to the enclosing block, and then validates.
"""

from .syntax import (Alt, And, Ax, Axis, Box, CORE_AXES, Const, Diamond, FixpointBlock,
                     Implies, Inverse, MuXPathQuery, Not, Or, Prop, QueryError, Seq, Star, Test,
                     Var, block_order, check_monotone, check_structure, free_vars,
                     map_path_tests, nnf, render_path, validate_query)


# ------------------------------------------------------------ inverses, child

def push_inverses(p):
    """Move every Inverse down onto axis atoms."""
    if isinstance(p, Ax):
        return p
    if isinstance(p, Test):
        return Test(push_inverses_expr(p.expr))
    if isinstance(p, Seq):
        return Seq(push_inverses(p.left), push_inverses(p.right))
    if isinstance(p, Alt):
        return Alt(push_inverses(p.left), push_inverses(p.right))
    if isinstance(p, Star):
        return Star(push_inverses(p.arg))
    if isinstance(p, Inverse):
        return _invert(p.arg)
    raise TypeError(p)


def _invert(p):
    if isinstance(p, Ax):
        return Ax(p.axis.inverse)
    if isinstance(p, Test):
        return Test(push_inverses_expr(p.expr))
    if isinstance(p, Seq):
        return Seq(_invert(p.right), _invert(p.left))
    if isinstance(p, Alt):
        return Alt(_invert(p.left), _invert(p.right))
    if isinstance(p, Star):
        return Star(_invert(p.arg))
    if isinstance(p, Inverse):
        return push_inverses(p.arg)
    raise TypeError(p)


def _map_expr_paths(e, f):
    if isinstance(e, (Const, Prop, Var)):
        return e
    if isinstance(e, Not):
        return Not(_map_expr_paths(e.arg, f))
    if isinstance(e, (And, Or, Implies)):
        return type(e)(_map_expr_paths(e.left, f), _map_expr_paths(e.right, f))
    if isinstance(e, (Diamond, Box)):
        return type(e)(f(e.path), _map_expr_paths(e.arg, f))
    raise TypeError(e)


def push_inverses_expr(e):
    return _map_expr_paths(e, push_inverses)


_CHILD = Seq(Ax(Axis.FCHILD), Star(Ax(Axis.RIGHT)))
_CHILD_INV = Seq(Star(Ax(Axis.RIGHT_INV)), Ax(Axis.FCHILD_INV))


def _lower_child_path(p):
    if isinstance(p, Ax):
        if p.axis is Axis.CHILD:
            return _CHILD
        if p.axis is Axis.CHILD_INV:
            return _CHILD_INV
        return p
    if isinstance(p, Test):
        return Test(lower_child_axis(p.expr))
    if isinstance(p, (Seq, Alt)):
        return type(p)(_lower_child_path(p.left), _lower_child_path(p.right))
    if isinstance(p, (Star, Inverse)):
        return type(p)(_lower_child_path(p.arg))
    raise TypeError(p)


def lower_child_axis(x):
    """Replace child by fchild/right* and child^- by (right^-)*/fchild^-.

    Accepts a path, a node expression or a whole query."""
    if isinstance(x, MuXPathQuery):
        return _map_bodies(x, lower_child_axis)
    if isinstance(x, (Ax, Test, Seq, Alt, Star, Inverse)):
        return _lower_child_path(x)
    return _map_expr_paths(x, _lower_child_path)


def _map_bodies(q, f):
    return MuXPathQuery(q.goal, tuple(
        FixpointBlock(b.kind, tuple((v, f(e)) for v, e in b.equations)) for b in q.blocks))


def is_core_path(p):
    return isinstance(p, Ax) and p.axis in CORE_AXES


def is_core_expr(e):
    if isinstance(e, (Const, Prop, Var)):
        return True
    if isinstance(e, Not):
        return is_core_expr(e.arg)
    if isinstance(e, (And, Or, Implies)):
        return is_core_expr(e.left) and is_core_expr(e.right)
    if isinstance(e, (Diamond, Box)):
        return is_core_path(e.path) and is_core_expr(e.arg)
    return False


def is_core_query(q):
    return all(is_core_expr(e) for b in q.blocks for _, e in b.equations)


# ----------------------------------------------------------- tau (RXPath)

def _desugar(e):
    """Rewrite to the connectives the translation table covers: !, &, <P>."""
    if isinstance(e, (Const, Prop)):
        return e
    if isinstance(e, Var):
        raise QueryError("lower_paths expects a variable-free RXPath expression")
    if isinstance(e, Not):
        inner = _desugar(e.arg)
        if isinstance(inner, Not):
            return inner.arg
        if isinstance(inner, Const):
            return Const(not inner.value)
        return Not(inner)
    if isinstance(e, And):
        return And(_desugar(e.left), _desugar(e.right))
    if isinstance(e, Or):
        return _desugar(Not(And(Not(e.left), Not(e.right))))
    if isinstance(e, Implies):
        return _desugar(Not(And(e.left, Not(e.right))))
    if isinstance(e, Diamond):
        return Diamond(map_path_tests(e.path, _desugar), _desugar(e.arg))
    if isinstance(e, Box):
        return _desugar(Not(Diamond(e.path, Not(e.arg))))
    raise TypeError(e)


class _Tau:
    def __init__(self, prefix):
        self.prefix = prefix
        self.n = 0
        self.blocks = []

    def fresh(self):
        self.n += 1
        return f"{self.prefix}{self.n}"

    def node(self, e):
        """Translate e; returns the expression standing for it (literal or Var)."""
        if isinstance(e, (Const, Prop)):
            return e
        if isinstance(e, Not):
            if isinstance(e.arg, Prop):
                return e
            r = self.node(e.arg)
            x = self.fresh()
            self.blocks.append(FixpointBlock("lfp", ((x, Not(r)),)))
            return Var(x)
        if isinstance(e, And):
            a, b = self.node(e.left), self.node(e.right)
            x = self.fresh()
            self.blocks.append(FixpointBlock("lfp", ((x, And(a, b)),)))
            return Var(x)
        if isinstance(e, Diamond):
            target = self.node(e.arg)
            eqs = []
            x = self.diamond(e.path, target, eqs)
            self.blocks.append(FixpointBlock("lfp", tuple(eqs)))
            return Var(x)
        raise TypeError(e)

    def diamond(self, p, target, eqs):
        """Equations for <p>target; returns the variable naming it."""
        x = self.fresh()
        if isinstance(p, Ax):
            eqs.append((x, Diamond(p, target)))
        elif isinstance(p, Test):
            eqs.append((x, And(self.node(p.expr), target)))
        elif isinstance(p, Seq):
            inner = self.diamond(p.right, target, eqs)
            outer = self.diamond(p.left, Var(inner), eqs)
            eqs.append((x, Var(outer)))
        elif isinstance(p, Alt):
            a = self.diamond(p.left, target, eqs)
            b = self.diamond(p.right, target, eqs)
            eqs.append((x, Or(Var(a), Var(b))))
        elif isinstance(p, Star):
            if isinstance(p.arg, Ax):
                eqs.append((x, Or(target, Diamond(p.arg, Var(x)))))
            else:
                step = self.diamond(p.arg, Var(x), eqs)
                eqs.append((x, Or(target, Var(step))))
        else:
            raise TypeError(p)
        return x


def lower_paths(e, prefix="X"):
    """Translate a closed RXPath node expression into a query of lfp blocks."""
    e = _desugar(lower_child_axis(push_inverses_expr(e)))
    tau = _Tau(prefix)
    r = tau.node(e)
    if not isinstance(r, Var):
        goal = tau.fresh()
        tau.blocks.append(FixpointBlock("lfp", ((goal, r),)))
    else:
        goal = r.name
    return MuXPathQuery(goal, tuple(tau.blocks))


# ------------------------------------------------- paths inside query bodies

def _axes(p, out):
    if isinstance(p, Ax):
        out.add(p.axis)
    elif isinstance(p, (Seq, Alt)):
        _axes(p.left, out)
        _axes(p.right, out)
    elif isinstance(p, Star):
        _axes(p.arg, out)


def _nullable(p):
    if isinstance(p, Ax):
        return False
    if isinstance(p, Test):
        return True
    if isinstance(p, Seq):
        return _nullable(p.left) and _nullable(p.right)
    if isinstance(p, Alt):
        return _nullable(p.left) or _nullable(p.right)
    return True   # Star


def well_founded(p):
    """True if iterating p can never return to the start node.

    Holds when p moves in one direction only (all forward or all inverse axes)
    and every step moves at least once."""
    axes = set()
    _axes(p, axes)
    if not axes or _nullable(p):
        return False
    return all(a.is_inverse for a in axes) or not any(a.is_inverse for a in axes)


def _has_star(e):
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Star):
            return True
        if isinstance(x, (Not, Inverse)):
            stack.append(x.arg)
        elif isinstance(x, (And, Or, Implies, Seq, Alt)):
            stack.extend((x.left, x.right))
        elif isinstance(x, (Diamond, Box)):
            stack.extend((x.path, x.arg))
        elif isinstance(x, Test):
            stack.append(x.expr)
    return False


class _Group:
    def __init__(self, kind, names):
        self.kind = kind
        self.names = set(names)
        self.eqs = []


class _BodyLowering:
    def __init__(self, q):
        self.taken = set(q.variables())
        self.n = 0
        self.extra = []     # new blocks for stars whose kind differs

    def fresh(self, g):
        while True:
            self.n += 1
            name = f"_p{self.n}"
            if name not in self.taken:
                self.taken.add(name)
                g.names.add(name)
                return name

    def share(self, g, e):
        if isinstance(e, (Const, Prop, Var)) or (isinstance(e, Not) and isinstance(e.arg, (Prop, Var))):
            return e
        w = self.fresh(g)
        g.eqs.append((w, e))
        return Var(w)

    def expr(self, g, e):
        if isinstance(e, (Const, Prop, Var)):
            return e
        if isinstance(e, Not):
            return Not(self.expr(g, e.arg))
        if isinstance(e, (And, Or, Implies)):
            return type(e)(self.expr(g, e.left), self.expr(g, e.right))
        if isinstance(e, (Diamond, Box)) and _has_star(e) and not free_vars(e) & g.names:
            # closed: give it its own block so its helpers stay out of g
            h = _Group("lfp" if isinstance(e, Diamond) else "gfp", ())
            z = self.fresh(h)
            h.eqs.append((z, None))
            op = self.dia if isinstance(e, Diamond) else self.box
            h.eqs[0] = (z, op(h, e.path, self.expr(h, e.arg)))
            self.extra.append(FixpointBlock(h.kind, tuple(h.eqs)))
            return Var(z)
        if isinstance(e, Diamond):
            return self.dia(g, e.path, self.expr(g, e.arg))
        if isinstance(e, Box):
            return self.box(g, e.path, self.expr(g, e.arg))
        raise TypeError(e)

    def dia(self, g, p, t):
        if isinstance(p, Ax):
            return Diamond(p, t)
        if isinstance(p, Test):
            return And(self.expr(g, p.expr), t)
        if isinstance(p, Seq):
            return self.dia(g, p.left, self.dia(g, p.right, t))
        if isinstance(p, Alt):
            t = self.share(g, t)
            return Or(self.dia(g, p.left, t), self.dia(g, p.right, t))
        if isinstance(p, Star):
            return self.star(g, p.arg, t, "lfp")
        raise TypeError(p)

    def box(self, g, p, t):
        if isinstance(p, Ax):
            return Box(p, t)
        if isinstance(p, Test):
            return Or(self.expr(g, nnf(Not(p.expr))), t)
        if isinstance(p, Seq):
            return self.box(g, p.left, self.box(g, p.right, t))
        if isinstance(p, Alt):
            t = self.share(g, t)
            return And(self.box(g, p.left, t), self.box(g, p.right, t))
        if isinstance(p, Star):
            return self.star(g, p.arg, t, "gfp")
        raise TypeError(p)

    def star(self, g, p, t, need):
        while isinstance(p, Star):      # (p*)* = p*
            p = p.arg
        if g.kind != need and not well_founded(p):
            used = free_vars(t) | free_vars(p)
            if used & g.names:
                op = "<%s*>" if need == "lfp" else "[%s*]"
                raise QueryError(
                    f"cannot lower {op % render_path(p, 3)} inside a {g.kind} block: the "
                    f"star needs a {need} equation but refers to variables of its own block")
            h = _Group(need, ())
            z = self.fresh(h)
            h.eqs.append((z, None))
            body = self._star_body(h, p, t, z, need)
            h.eqs[0] = (z, body)
            self.extra.append(FixpointBlock(need, tuple(h.eqs)))
            return Var(z)
        z = self.fresh(g)
        slot = len(g.eqs)
        g.eqs.append((z, None))
        g.eqs[slot] = (z, self._star_body(g, p, t, z, need))
        return Var(z)

    def _star_body(self, g, p, t, z, need):
        if need == "lfp":
            return Or(t, self.dia(g, p, Var(z)))
        return And(t, self.box(g, p, Var(z)))


def lower_query_paths(q):
    """Replace complex paths in query bodies by extra equations.

    Bodies are put in NNF first so helper variables only occur positively."""
    q = _map_bodies(q, nnf)
    lw = _BodyLowering(q)
    blocks = []
    for b in q.blocks:
        g = _Group(b.kind, b.variables)
        for v, e in b.equations:
            g.eqs.append((v, lw.expr(g, e)))
        # heads first, helper equations after
        heads = [(v, e) for v, e in g.eqs if v in b.variables]
        helpers = [(v, e) for v, e in g.eqs if v not in b.variables]
        blocks.append(FixpointBlock(b.kind, tuple(heads + helpers)))
    return MuXPathQuery(q.goal, tuple(lw.extra) + tuple(blocks))


def prepare_query(q):
    """Full front end: checks, inverse pushing, child lowering, path lowering,
    NNF and dualization.  The result only uses the four core axes."""
    check_structure(q)
    check_monotone(q)
    block_order(q)
    q = _map_bodies(q, lambda e: lower_child_axis(push_inverses_expr(e)))
    q = lower_query_paths(q)
    q = validate_query(q)
    assert is_core_query(q)
    return q
