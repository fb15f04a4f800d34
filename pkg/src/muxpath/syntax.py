"""muXPath abstract syntax, parser, printer, NNF, validation and closure.

Surface syntax::

    $X : lfp { $X = red | <child> $X } gfp { $Y = [right] $Y & !blue }

Variables written ``$~X`` are reserved for the dual of ``$X`` (introduced when a
variable is used under negation outside its own block).
"""

import re
from dataclasses import dataclass, field
from enum import Enum

from .trees import FLAGS


class QuerySyntaxError(ValueError):
    def __init__(self, msg, line=None, col=None):
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(msg + where)
        self.line = line
        self.col = col


class QueryError(ValueError):
    """Semantic problem: undefined variable, non-monotone body, cyclic blocks..."""


# ----------------------------------------------------------------------- AST

class Axis(Enum):
    FCHILD = "fchild"
    RIGHT = "right"
    CHILD = "child"
    FCHILD_INV = "fchild^-"
    RIGHT_INV = "right^-"
    CHILD_INV = "child^-"

    @property
    def inverse(self):
        return _INV[self]

    @property
    def is_inverse(self):
        return self.value.endswith("^-")

    def __repr__(self):
        return f"Axis.{self.name}"


_INV = {
    Axis.FCHILD: Axis.FCHILD_INV, Axis.FCHILD_INV: Axis.FCHILD,
    Axis.RIGHT: Axis.RIGHT_INV, Axis.RIGHT_INV: Axis.RIGHT,
    Axis.CHILD: Axis.CHILD_INV, Axis.CHILD_INV: Axis.CHILD,
}
CORE_AXES = frozenset({Axis.FCHILD, Axis.RIGHT, Axis.FCHILD_INV, Axis.RIGHT_INV})


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Var:
    name: str
    span: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Diamond:
    path: object
    arg: object


@dataclass(frozen=True)
class Box:
    path: object
    arg: object


@dataclass(frozen=True)
class Ax:
    axis: Axis


@dataclass(frozen=True)
class Test:
    expr: object


@dataclass(frozen=True)
class Seq:
    left: object
    right: object


@dataclass(frozen=True)
class Alt:
    """Path union."""
    left: object
    right: object


@dataclass(frozen=True)
class Star:
    arg: object


@dataclass(frozen=True)
class Inverse:
    arg: object


def U_PATH():
    """The ``u`` macro: (fchild | right)*."""
    return Star(Alt(Ax(Axis.FCHILD), Ax(Axis.RIGHT)))


@dataclass(frozen=True)
class FixpointBlock:
    kind: str                 # "lfp" | "gfp"
    equations: tuple          # ((var name, NodeExpr), ...)

    @property
    def variables(self):
        return tuple(v for v, _ in self.equations)


@dataclass(frozen=True)
class MuXPathQuery:
    goal: str
    blocks: tuple

    def definitions(self):
        return {v: e for b in self.blocks for v, e in b.equations}

    def block_index(self):
        return {v: i for i, b in enumerate(self.blocks) for v, _ in b.equations}

    def variables(self):
        return [v for b in self.blocks for v, _ in b.equations]

    def __str__(self):
        return render_query(self)


NormalizedQuery = MuXPathQuery   # a validated MuXPathQuery (NNF, dualized, sorted)


def dual_name(v):
    return v[1:] if v.startswith("~") else "~" + v


def conj(*es):
    es = [e for e in es if e != TRUE]
    if not es:
        return TRUE
    out = es[0]
    for e in es[1:]:
        out = And(out, e)
    return out


def disj(*es):
    es = [e for e in es if e != FALSE]
    if not es:
        return FALSE
    out = es[0]
    for e in es[1:]:
        out = Or(out, e)
    return out


# --------------------------------------------------------------------- lexer

_TOK = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<var>\$~?[A-Za-z_][A-Za-z0-9_#']*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|\^-|[(){}<>\[\]!&|:;=/*?,])
""", re.X)


class _Lexer:
    def __init__(self, text, pos=0):
        self.text = text
        self.toks = []
        line = 1 + text.count("\n", 0, pos)
        col0 = text.rfind("\n", 0, pos) + 1
        while pos < len(text):
            m = _TOK.match(text, pos)
            if not m:
                raise QuerySyntaxError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
            kind = m.lastgroup
            if kind == "ws":
                s = m.group()
                if "\n" in s:
                    line += s.count("\n")
                    col0 = pos + s.rindex("\n") + 1
            elif kind != "comment":
                self.toks.append((kind, m.group(), line, pos - col0 + 1, pos))
            pos = m.end()
        self.i = 0
        self.end = (line, pos - col0 + 1)

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None, *self.end, len(self.text))

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def at(self, value):
        return self.peek()[1] == value

    def expect(self, value):
        kind, v, line, col, _ = self.next()
        if v != value:
            found = "end of input" if v is None else repr(v)
            raise QuerySyntaxError(f"expected {value!r}, found {found}", line, col)

    def error(self, what):
        kind, v, line, col, _ = self.peek()
        found = "end of input" if v is None else repr(v)
        raise QuerySyntaxError(f"expected {what}, found {found}", line, col)


_AXIS_WORDS = {"child": Axis.CHILD, "right": Axis.RIGHT, "fchild": Axis.FCHILD}


class _Parser:
    def __init__(self, lex):
        self.lx = lex

    # expressions
    def expr(self):
        left = self.disj()
        if self.lx.at("->"):
            self.lx.next()
            return Implies(left, self.expr())
        return left

    def disj(self):
        e = self.conj()
        while self.lx.at("|"):
            self.lx.next()
            e = Or(e, self.conj())
        return e

    def conj(self):
        e = self.unary()
        while self.lx.at("&"):
            self.lx.next()
            e = And(e, self.unary())
        return e

    def unary(self):
        kind, v, line, col, _ = self.lx.peek()
        if v == "!":
            self.lx.next()
            return Not(self.unary())
        if v == "<":
            self.lx.next()
            p = self.path()
            self.lx.expect(">")
            return Diamond(p, self.unary())
        if v == "[":
            self.lx.next()
            p = self.path()
            self.lx.expect("]")
            return Box(p, self.unary())
        return self.atom()

    def atom(self):
        kind, v, line, col, _ = self.lx.peek()
        if kind == "var":
            self.lx.next()
            return Var(v[1:], span=(line, col))
        if kind == "ident":
            self.lx.next()
            if v == "true":
                return TRUE
            if v == "false":
                return FALSE
            return Prop(v)
        if v == "(":
            self.lx.next()
            e = self.expr()
            self.lx.expect(")")
            return e
        self.lx.error("an expression")

    # paths
    def path(self):
        p = self.pseq()
        while self.lx.at("|"):
            self.lx.next()
            p = Alt(p, self.pseq())
        return p

    def pseq(self):
        p = self.ppost()
        while self.lx.at("/"):
            self.lx.next()
            p = Seq(p, self.ppost())
        return p

    def ppost(self):
        p = self.patom()
        while True:
            if self.lx.at("*"):
                self.lx.next()
                p = Star(p)
            elif self.lx.at("^-"):
                self.lx.next()
                p = Ax(p.axis.inverse) if isinstance(p, Ax) else Inverse(p)
            else:
                return p

    def patom(self):
        kind, v, line, col, _ = self.lx.peek()
        if kind == "ident" and v in _AXIS_WORDS:
            self.lx.next()
            return Ax(_AXIS_WORDS[v])
        if kind == "ident" and v == "u":
            self.lx.next()
            return U_PATH()
        if v == "?":
            self.lx.next()
            self.lx.expect("(")
            e = self.expr()
            self.lx.expect(")")
            return Test(e)
        if v == "(":
            self.lx.next()
            p = self.path()
            self.lx.expect(")")
            return p
        self.lx.error("a path")

    # queries
    def query(self):
        kind, v, line, col, _ = self.lx.next()
        if kind != "var":
            raise QuerySyntaxError("a query starts with its goal variable", line, col)
        goal = (v[1:], line, col)
        self.lx.expect(":")
        blocks = []
        while True:
            blocks.append(self.block())
            if self.lx.at(",") and self.lx.peek(1)[1] in ("lfp", "gfp"):
                self.lx.next()
            if self.lx.peek()[1] not in ("lfp", "gfp"):
                break
        return goal, blocks

    def block(self):
        kind, v, line, col, _ = self.lx.next()
        if v not in ("lfp", "gfp"):
            raise QuerySyntaxError("expected 'lfp' or 'gfp'", line, col)
        self.lx.expect("{")
        eqs = [self.equation()]
        while self.lx.at(";"):
            self.lx.next()
            if self.lx.at("}"):
                break
            eqs.append(self.equation())
        self.lx.expect("}")
        return v, eqs

    def equation(self):
        kind, v, line, col, _ = self.lx.next()
        if kind != "var":
            raise QuerySyntaxError("expected an equation head '$name'", line, col)
        self.lx.expect("=")
        return (v[1:], line, col), self.expr()


def _finish_query(goal, blocks):
    seen = {}
    out = []
    for kind, eqs in blocks:
        tup = []
        for (name, line, col), body in eqs:
            if name in seen:
                raise QuerySyntaxError(f"duplicate equation head ${name}", line, col)
            seen[name] = True
            tup.append((name, body))
        out.append(FixpointBlock(kind, tuple(tup)))
    q = MuXPathQuery(goal[0], tuple(out))
    if goal[0] not in seen:
        raise QuerySyntaxError(f"goal ${goal[0]} is not defined", goal[1], goal[2])
    for b in q.blocks:
        for _, body in b.equations:
            for v in free_vars(body, spans=True):
                if v.name not in seen:
                    line, col = v.span or (None, None)
                    raise QuerySyntaxError(f"${v.name} is used but never defined", line, col)
    return q


def parse_query(text):
    """Parse a complete query."""
    q, pos = parse_query_prefix(text, 0)
    if text[pos:].strip():
        lx = _Lexer(text, pos)
        lx.error("end of input")
    return q


def parse_query_prefix(text, pos=0):
    """Parse one query starting at ``pos``; returns (query, end offset)."""
    lx = _Lexer(text, pos)
    p = _Parser(lx)
    goal, blocks = p.query()
    end = lx.peek()[4]
    return _finish_query(goal, blocks), end


def parse_expr(text):
    lx = _Lexer(text)
    e = _Parser(lx).expr()
    if lx.peek()[0] is not None:
        lx.error("end of input")
    return e


def parse_path(text):
    lx = _Lexer(text)
    p = _Parser(lx).path()
    if lx.peek()[0] is not None:
        lx.error("end of input")
    return p


# ------------------------------------------------------------------- printer

def _lvl(e):
    if isinstance(e, Implies):
        return 1
    if isinstance(e, Or):
        return 2
    if isinstance(e, And):
        return 3
    return 4


def render_expr(e, need=0):
    s = _render_expr(e)
    return f"({s})" if _lvl(e) < need else s


def _render_expr(e):
    if isinstance(e, Const):
        return "true" if e.value else "false"
    if isinstance(e, Prop):
        return e.name
    if isinstance(e, Var):
        return "$" + e.name
    if isinstance(e, Not):
        return "!" + render_expr(e.arg, 4)
    if isinstance(e, And):
        return f"{render_expr(e.left, 3)} & {render_expr(e.right, 4)}"
    if isinstance(e, Or):
        return f"{render_expr(e.left, 2)} | {render_expr(e.right, 3)}"
    if isinstance(e, Implies):
        return f"{render_expr(e.left, 2)} -> {render_expr(e.right, 1)}"
    if isinstance(e, Diamond):
        return f"<{render_path(e.path)}>{render_expr(e.arg, 4)}"
    if isinstance(e, Box):
        return f"[{render_path(e.path)}]{render_expr(e.arg, 4)}"
    raise TypeError(f"not a node expression: {e!r}")


def _plvl(p):
    if isinstance(p, Alt):
        return 1
    if isinstance(p, Seq):
        return 2
    return 3


def render_path(p, need=0):
    s = _render_path(p)
    return f"({s})" if _plvl(p) < need else s


def _render_path(p):
    if isinstance(p, Ax):
        return p.axis.value
    if isinstance(p, Test):
        return f"?({render_expr(p.expr)})"
    if isinstance(p, Seq):
        return f"{render_path(p.left, 2)}/{render_path(p.right, 3)}"
    if isinstance(p, Alt):
        return f"{render_path(p.left, 1)} | {render_path(p.right, 2)}"
    if isinstance(p, Star):
        inner = render_path(p.arg, 3)
        if isinstance(p.arg, Ax) and p.arg.axis.is_inverse:
            inner = f"({inner})"
        return inner + "*"
    if isinstance(p, Inverse):
        return f"({render_path(p.arg)})^-"
    raise TypeError(f"not a path expression: {p!r}")


def render_query(q):
    parts = [f"${q.goal} :"]
    for b in q.blocks:
        eqs = "; ".join(f"${v} = {render_expr(e)}" for v, e in b.equations)
        parts.append(f"{b.kind} {{ {eqs} }}")
    return " ".join(parts)


# ---------------------------------------------------------------- traversals

def free_vars(e, spans=False):
    """Variable occurrences (Var nodes if spans, else names) in e, paths included."""
    out = []
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.append(x if spans else x.name)
        elif isinstance(x, (Not, Star, Inverse)):
            stack.append(x.arg)
        elif isinstance(x, (And, Or, Implies, Seq, Alt)):
            stack.append(x.right)
            stack.append(x.left)
        elif isinstance(x, (Diamond, Box)):
            stack.append(x.arg)
            stack.append(x.path)
        elif isinstance(x, Test):
            stack.append(x.expr)
    return out if spans else set(out)


def polarities(e, pol=1):
    """Yield (Var node, +1/-1) for every variable occurrence."""
    stack = [(e, pol)]
    while stack:
        x, p = stack.pop()
        if isinstance(x, Var):
            yield x, p
        elif isinstance(x, Not):
            stack.append((x.arg, -p))
        elif isinstance(x, (And, Or)):
            stack.append((x.left, p))
            stack.append((x.right, p))
        elif isinstance(x, Implies):
            stack.append((x.left, -p))
            stack.append((x.right, p))
        elif isinstance(x, Diamond):
            stack.append((x.path, p))
            stack.append((x.arg, p))
        elif isinstance(x, Box):
            stack.append((x.path, -p))
            stack.append((x.arg, p))
        elif isinstance(x, (Seq, Alt)):
            stack.append((x.left, p))
            stack.append((x.right, p))
        elif isinstance(x, (Star, Inverse)):
            stack.append((x.arg, p))
        elif isinstance(x, Test):
            stack.append((x.expr, p))


def map_path_tests(p, f):
    if isinstance(p, Ax):
        return p
    if isinstance(p, Test):
        return Test(f(p.expr))
    if isinstance(p, Seq):
        return Seq(map_path_tests(p.left, f), map_path_tests(p.right, f))
    if isinstance(p, Alt):
        return Alt(map_path_tests(p.left, f), map_path_tests(p.right, f))
    if isinstance(p, Star):
        return Star(map_path_tests(p.arg, f))
    if isinstance(p, Inverse):
        return Inverse(map_path_tests(p.arg, f))
    raise TypeError(p)


def nnf(e):
    """Negation normal form: negation only on Prop / Var; Implies removed."""
    return _nnf(e, False)


def _nnf(e, neg):
    if isinstance(e, Const):
        return Const(e.value != neg)
    if isinstance(e, (Prop, Var)):
        return Not(e) if neg else e
    if isinstance(e, Not):
        return _nnf(e.arg, not neg)
    if isinstance(e, And):
        l, r = _nnf(e.left, neg), _nnf(e.right, neg)
        return Or(l, r) if neg else And(l, r)
    if isinstance(e, Or):
        l, r = _nnf(e.left, neg), _nnf(e.right, neg)
        return And(l, r) if neg else Or(l, r)
    if isinstance(e, Implies):
        l, r = _nnf(e.left, not neg), _nnf(e.right, neg)
        return And(l, r) if neg else Or(l, r)
    if isinstance(e, (Diamond, Box)):
        p = map_path_tests(e.path, nnf)
        a = _nnf(e.arg, neg)
        if isinstance(e, Diamond) != neg:
            return Diamond(p, a)
        return Box(p, a)
    raise TypeError(f"not a node expression: {e!r}")


def substitute(e, f):
    """Bottom-up rewrite: f(node) returns a replacement or None."""
    r = f(e)
    if r is not None:
        return r
    if isinstance(e, Not):
        return Not(substitute(e.arg, f))
    if isinstance(e, (And, Or, Implies)):
        return type(e)(substitute(e.left, f), substitute(e.right, f))
    if isinstance(e, (Diamond, Box)):
        return type(e)(map_path_tests(e.path, lambda t: substitute(t, f)), substitute(e.arg, f))
    return e


def negate(e):
    """nnf(!e) with negated variables replaced by their duals."""
    return _dualize_literals(nnf(Not(e)))


def _dualize_literals(e):
    def f(x):
        if isinstance(x, Not) and isinstance(x.arg, Var):
            return Var(dual_name(x.arg.name))
        return None
    return substitute(e, f)


def expr_size(e):
    n = 0
    stack = [e]
    while stack:
        x = stack.pop()
        n += 1
        if isinstance(x, (Not, Star, Inverse)):
            stack.append(x.arg)
        elif isinstance(x, (And, Or, Implies, Seq, Alt)):
            stack.extend((x.left, x.right))
        elif isinstance(x, (Diamond, Box)):
            stack.extend((x.path, x.arg))
        elif isinstance(x, Test):
            stack.append(x.expr)
    return n


def query_size(q):
    return sum(1 + expr_size(e) for b in q.blocks for _, e in b.equations)


def subexpressions(q):
    """Distinct node subexpressions of the heads and bodies of q."""
    out = set()
    stack = [Var(v) for v in q.variables()] + [e for b in q.blocks for _, e in b.equations]
    while stack:
        x = stack.pop()
        if isinstance(x, (Seq, Alt)):
            stack.extend((x.left, x.right))
            continue
        if isinstance(x, (Star, Inverse)):
            stack.append(x.arg)
            continue
        if isinstance(x, Ax):
            continue
        if isinstance(x, Test):
            stack.append(x.expr)
            continue
        if x in out:
            continue
        out.add(x)
        if isinstance(x, Not):
            stack.append(x.arg)
        elif isinstance(x, (And, Or, Implies)):
            stack.extend((x.left, x.right))
        elif isinstance(x, (Diamond, Box)):
            stack.extend((x.path, x.arg))
    return out


# ---------------------------------------------------------------- validation

def check_structure(q):
    heads = {}
    for b in q.blocks:
        if b.kind not in ("lfp", "gfp"):
            raise QueryError(f"unknown block kind {b.kind!r}")
        if not b.equations:
            raise QueryError("empty fixpoint block")
        for v, _ in b.equations:
            if v in heads:
                raise QueryError(f"duplicate equation head ${v}")
            heads[v] = True
    if q.goal not in heads:
        raise QueryError(f"goal ${q.goal} is not defined")
    for b in q.blocks:
        for v, e in b.equations:
            for u in free_vars(e):
                if u not in heads:
                    raise QueryError(f"${u} is used but never defined")


def check_monotone(q):
    for b in q.blocks:
        mine = set(b.variables)
        for head, body in b.equations:
            for var, pol in polarities(body):
                if pol < 0 and var.name in mine:
                    where = f" (line {var.span[0]}, column {var.span[1]})" if var.span else ""
                    raise QueryError(
                        f"monotonicity violation: ${var.name} occurs negatively in the "
                        f"body of ${head}{where}")


def block_order(q):
    """Stable topological order of the blocks (dependencies first)."""
    owner = q.block_index()
    n = len(q.blocks)
    deps = [set() for _ in range(n)]
    for i, b in enumerate(q.blocks):
        for _, e in b.equations:
            for u in free_vars(e):
                if owner[u] != i:
                    deps[i].add(owner[u])
    placed = []
    done = set()
    while len(placed) < n:
        for i in range(n):
            if i not in done and deps[i] <= done:
                placed.append(i)
                done.add(i)
                break
        else:
            left = sorted(set(range(n)) - done)
            names = ", ".join("$" + q.blocks[i].variables[0] for i in left)
            raise QueryError(f"cyclic dependency between fixpoint blocks ({names})")
    return placed


def validate_query(q):
    """Check monotonicity and block ordering, put bodies in NNF and dualize.

    Every variable used under negation from outside its block gets a dual
    block of the opposite kind defining ``$~X``; ``!$X`` is rewritten to
    ``$~X``.  Blocks come back in dependency order.
    """
    check_structure(q)
    check_monotone(q)
    block_order(q)           # reject cycles before doing any work
    blocks = [FixpointBlock(b.kind, tuple((v, nnf(e)) for v, e in b.equations))
              for b in q.blocks]
    owner = {v: i for i, b in enumerate(blocks) for v in b.variables}

    def negated(e):
        out = []
        stack = [e]
        while stack:
            x = stack.pop()
            if isinstance(x, Not) and isinstance(x.arg, Var):
                out.append(x.arg.name)
            elif isinstance(x, (Not, Star, Inverse)):
                stack.append(x.arg)
            elif isinstance(x, (And, Or, Implies, Seq, Alt)):
                stack.extend((x.left, x.right))
            elif isinstance(x, (Diamond, Box)):
                stack.extend((x.path, x.arg))
            elif isinstance(x, Test):
                stack.append(x.expr)
        return out

    work = [u for b in blocks for _, e in b.equations for u in negated(e)]
    while work:
        u = work.pop()
        d = dual_name(u)
        if d in owner:
            continue
        src = blocks[owner[u]]
        mine = set(src.variables)

        def fix(x, mine=mine):
            if isinstance(x, Not) and isinstance(x.arg, Var) and x.arg.name in mine:
                return Var(dual_name(x.arg.name))
            return None

        eqs = tuple((dual_name(v), substitute(nnf(Not(e)), fix)) for v, e in src.equations)
        kind = "gfp" if src.kind == "lfp" else "lfp"
        blocks.append(FixpointBlock(kind, eqs))
        for v, e in eqs:
            owner[v] = len(blocks) - 1
            work.extend(negated(e))
    blocks = [FixpointBlock(b.kind, tuple((v, _dualize_literals(e)) for v, e in b.equations))
              for b in blocks]
    out = MuXPathQuery(q.goal, tuple(blocks))
    order = block_order(out)
    return MuXPathQuery(q.goal, tuple(out.blocks[i] for i in order))


# ------------------------------------------------------------------- closure

def body_of(q, name, defs=None):
    """Body of a defined variable, or the negated body for an implicit dual."""
    defs = q.definitions() if defs is None else defs
    if name in defs:
        return nnf(defs[name])
    return negate(defs[dual_name(name)])


def closure(q):
    """CL(q): heads, bodies, the flags, closed under the closure rules.

    ``nnf(!$X)`` is taken to be the dual variable ``$~X`` so the closure only
    holds meaningful automaton states.
    """
    defs = q.definitions()
    out = set()
    stack = [Prop(f) for f in FLAGS] + [Var(v) for v in defs]
    stack += [nnf(e) for e in defs.values()]
    while stack:
        x = stack.pop()
        if x in out:
            continue
        out.add(x)
        if isinstance(x, Not):
            stack.append(x.arg)
        else:
            stack.append(negate(x))
        if isinstance(x, (And, Or)):
            stack.extend((x.left, x.right))
        elif isinstance(x, (Diamond, Box)):
            stack.append(x.arg)
        elif isinstance(x, Var):
            stack.append(body_of(q, x.name, defs))
    return frozenset(out)
