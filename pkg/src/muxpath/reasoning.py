"""Decision procedures built on automata emptiness.

Every question is turned into the satisfiability of one query; a satisfying
tree is decoded, re-checked with the reference evaluator, and handed back as
a witness or countermodel.
"""

import re
from dataclasses import dataclass

from .automata import build_wf_automaton
from .emptiness import twata_nonempty
from .lowering import lower_query_paths
from .semantics import eval_query_direct
from .syntax import (FALSE, U_PATH, Alt, And, Ax, Axis, Box, Diamond, FixpointBlock, Implies,
                     MuXPathQuery, Not, Or, Prop, QueryError, QuerySyntaxError, Seq, Star, Test,
                     Var, check_monotone, check_structure, conj, parse_expr, parse_query_prefix,
                     substitute)
from .trees import BinaryTree, decode_binary, sibling_address_map

# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Sat:
    tree: object
    node: tuple

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Unsat:
    def __bool__(self):
        return False


@dataclass(frozen=True)
class Contained:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotContained:
    tree: object
    node: tuple

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Implied:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotImplied:
    tree: object
    explanation: str = ""

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Certain:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotCertain:
    tree: object
    explanation: str = ""

    def __bool__(self):
        return False


# ---------------------------------------------------------------- node refs

@dataclass(frozen=True)
class Identifier:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ExplicitPath:
    steps: tuple        # of "fchild" / "right"; empty = the root

    def __post_init__(self):
        for s in self.steps:
            if s not in ("fchild", "right"):
                raise ValueError(f"explicit paths use fchild and right only, not {s!r}")

    def __str__(self):
        return "/".join(self.steps) if self.steps else "/"


@dataclass(frozen=True)
class ViewSpec:
    symbol: str
    definition: MuXPathQuery
    extension: tuple    # of NodeRefs


def parse_node_ref(text):
    text = text.strip()
    if text == "/":
        return ExplicitPath(())
    parts = [p for p in text.split("/") if p]
    if parts and all(p in ("fchild", "right") for p in parts):
        return ExplicitPath(tuple(parts))
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", text):
        return Identifier(text)
    raise ValueError(f"bad node reference {text!r}")


def resolve_node_ref(ref, t):
    """The node a reference denotes in sibling tree t, or None."""
    if isinstance(ref, Identifier):
        hits = [x for x in t.nodes() if ref.name in t.labels[x]]
        return hits[0] if len(hits) == 1 else None
    x = ()
    for s in ref.steps:
        if s == "fchild":
            x = x + (1,)
        elif not x:
            return None
        else:
            x = x[:-1] + (x[-1] + 1,)
        if x not in t.labels:
            return None
    return x


# ---------------------------------------------------------------- renaming

def rename_apart(q, suffix):
    """Append ``suffix`` to every variable of q (duals follow along)."""
    ren = lambda v: v + suffix

    def f(x):
        if isinstance(x, Var):
            return Var(ren(x.name))
        return None

    blocks = tuple(FixpointBlock(b.kind, tuple((ren(v), substitute(e, f)) for v, e in b.equations))
                   for b in q.blocks)
    return MuXPathQuery(ren(q.goal), blocks)


def _fresh(base, used):
    name, k = base, 0
    while name in used or ("~" + name) in used:
        k += 1
        name = f"{base}{k}"
    return name


def _used(*qs):
    return {v for q in qs for v in q.variables()}


def _wrap(goal, body, *qs):
    """Query with one lfp equation on top of the blocks of qs."""
    blocks = tuple(b for q in qs for b in q.blocks)
    return MuXPathQuery(goal, blocks + (FixpointBlock("lfp", ((goal, body),)),))


# ---------------------------------------------------------------- satisfiability

def _check(q):
    check_structure(q)
    check_monotone(q)


def satisfiable(q, max_states=None, stats=None):
    """Sat(sibling tree, selected node) or Unsat."""
    _check(q)
    a = build_wf_automaton(q)
    b = twata_nonempty(a, max_states, stats)
    if not b:
        return Unsat()
    core = BinaryTree({x: b.labels[x] for x in sibling_address_map(b)})
    t = decode_binary(core)
    sel = eval_query_direct(q, t)
    if not sel:
        raise AssertionError("witness tree selects no node; engine bug")
    return Sat(t, min(sel))


def contained(q1, q2, max_states=None, stats=None):
    """Is every node selected by q1 also selected by q2, on every tree?"""
    _check(q1)
    _check(q2)
    r1, r2 = rename_apart(q1, "#1"), rename_apart(q2, "#2")
    goal = _fresh("X0", _used(r1, r2))
    diff = _wrap(goal, And(Var(r1.goal), Not(Var(r2.goal))), r1, r2)
    res = satisfiable(diff, max_states, stats)
    if not res:
        return Contained()
    t, x = res.tree, res.node
    if x not in eval_query_direct(q1, t) or x in eval_query_direct(q2, t):
        raise AssertionError("containment countermodel fails verification")
    return NotContained(t, x)


# ---------------------------------------------------------------- root constraints

def constraints_to_query(gamma):
    """A query selecting the root exactly when every constraint holds there."""
    gamma = [rename_apart(g, f"#{i}") for i, g in enumerate(gamma, 1)]
    goal = _fresh("Xr", _used(*gamma))
    body = conj(Box(Ax(Axis.FCHILD_INV), FALSE), Box(Ax(Axis.RIGHT_INV), FALSE),
                *(Var(g.goal) for g in gamma))
    return _wrap(goal, body, *gamma)


def query_to_constraint(q):
    """A root constraint that holds iff q selects some node."""
    goal = _fresh("Xr", _used(q))
    x = Var(goal)
    body = Or(Or(Var(q.goal), Diamond(Ax(Axis.FCHILD), x)), Diamond(Ax(Axis.RIGHT), x))
    return _wrap(goal, body, q)


def negate_constraint(phi):
    goal = _fresh("Xn", _used(phi))
    return _wrap(goal, Not(Var(phi.goal)), phi)


def constraints_satisfiable(gamma, max_states=None, stats=None):
    res = satisfiable(constraints_to_query(gamma), max_states, stats)
    if res:
        for g in gamma:
            if () not in eval_query_direct(g, res.tree):
                raise AssertionError("constraint model fails verification")
    return res


def implies(gamma, phi, max_states=None, stats=None):
    """Does every tree satisfying gamma at the root satisfy phi there?"""
    gamma = list(gamma)
    res = satisfiable(constraints_to_query(gamma + [negate_constraint(phi)]), max_states, stats)
    if not res:
        return Implied()
    t = res.tree
    for i, g in enumerate(gamma, 1):
        if () not in eval_query_direct(g, t):
            raise AssertionError(f"countermodel violates constraint {i}")
    if () in eval_query_direct(phi, t):
        raise AssertionError("countermodel satisfies the conclusion")
    return NotImplied(t, "the root satisfies every premise but not the conclusion")


def nominal_constraint(p):
    """N_p: proposition p holds at exactly one node."""
    a = p
    text = (f"<u>{a} & [u]((<fchild/u>{a} -> [right/u]!{a}) & "
            f"(<right/u>{a} -> [fchild/u]!{a}) & ({a} -> [(fchild|right)/u]!{a}))")
    q = MuXPathQuery(f"N_{p}", (FixpointBlock("lfp", ((f"N_{p}", parse_expr(text)),)),))
    return lower_query_paths(q)


# ---------------------------------------------------------------- DTD rules

@dataclass(frozen=True)
class DtdRule:
    name: str
    content: tuple       # ("name", n) | ("seq", [..]) | ("alt", [..]) | ("star", x)


_DTD_TOK = re.compile(r"\s*(?:(->)|([A-Za-z_][A-Za-z0-9_]*)|([(),|*]))")


def parse_dtd_rule(text):
    """``A -> B, (C*|D), E`` (',' sequence, '|' choice, '*' repetition)."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _DTD_TOK.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad DTD rule near {text[pos:]!r}")
        toks.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def take(v=None):
        nonlocal i
        t = peek()
        if t is None or (v is not None and t != v):
            raise ValueError(f"bad DTD rule: expected {v or 'a token'}, found {t}")
        i += 1
        return t

    def alt():
        items = [seq()]
        while peek() == "|":
            take()
            items.append(seq())
        return items[0] if len(items) == 1 else ("alt", tuple(items))

    def seq():
        items = [post()]
        while peek() == ",":
            take()
            items.append(post())
        return items[0] if len(items) == 1 else ("seq", tuple(items))

    def post():
        x = atom()
        while peek() == "*":
            take()
            x = ("star", x)
        return x

    def atom():
        t = peek()
        if t == "(":
            take()
            x = alt()
            take(")")
            return x
        if t and re.fullmatch(r"[A-Za-z_]\w*", t):
            take()
            return ("name", t)
        raise ValueError(f"bad DTD rule: unexpected {t}")

    name = take()
    if not re.fullmatch(r"[A-Za-z_]\w*", name):
        raise ValueError("a DTD rule starts with an element name")
    take("->")
    content = alt()
    if peek() is not None:
        raise ValueError(f"bad DTD rule: trailing {peek()}")
    return DtdRule(name, content)


def _dtd_path(c):
    kind = c[0]
    if kind == "name":
        return Seq(Ax(Axis.RIGHT), Test(Prop(c[1])))
    if kind == "star":
        return Star(_dtd_path(c[1]))
    parts = [_dtd_path(x) for x in c[1]]
    out = parts[0]
    for p in parts[1:]:
        out = Seq(out, p) if kind == "seq" else Alt(out, p)
    return out


def dtd_rule_constraint(rule):
    """[u](A -> <fchild/?(B)/...>[right]false) for a rule A -> B, ...

    The first component must be a single element name; it is reached by
    fchild, the rest by right steps."""
    if isinstance(rule, str):
        rule = parse_dtd_rule(rule)
    c = rule.content
    items = c[1] if c[0] == "seq" else (c,)
    if items[0][0] != "name":
        raise QueryError("unsupported DTD rule shape: the content must start with a name")
    path = Seq(Ax(Axis.FCHILD), Test(Prop(items[0][1])))
    if len(items) > 1:
        path = Seq(path, _dtd_path(("seq", items[1:]) if len(items) > 2 else items[1]))
    body = Box(U_PATH(), Implies(Prop(rule.name), Diamond(path, Box(Ax(Axis.RIGHT), FALSE))))
    goal = f"D_{rule.name}"
    return lower_query_paths(MuXPathQuery(goal, (FixpointBlock("lfp", ((goal, body),)),)))


# ---------------------------------------------------------------- views

def _ref_path(ref, target):
    e = target
    for s in reversed(ref.steps):
        e = Diamond(Ax(Axis.FCHILD if s == "fchild" else Axis.RIGHT), e)
    return e


def _ref_constraint(ref, target_of, q, base):
    """A root constraint placing the node ``ref`` in target_of(goal)."""
    goal = _fresh(base, _used(q))
    if isinstance(ref, Identifier):
        x = Var(goal)
        body = Or(Or(And(Prop(ref.name), target_of(Var(q.goal))), Diamond(Ax(Axis.FCHILD), x)),
                  Diamond(Ax(Axis.RIGHT), x))
    else:
        body = _ref_path(ref, target_of(Var(q.goal)))
    return _wrap(goal, body, q)


def certain_answer(q, views, gamma, c, max_states=None, stats=None):
    """Is node reference c selected by q on every tree consistent with the
    (sound) views and the root constraints gamma?"""
    if isinstance(c, str):
        c = parse_node_ref(c)
    _check(q)
    parts = list(gamma)
    idents = set()
    for v in views:
        _check(v.definition)
        for a in v.extension:
            parts.append(_ref_constraint(a, lambda x: x, v.definition, "Xa"))
            if isinstance(a, Identifier):
                idents.add(a.name)
    if isinstance(c, Identifier):
        idents.add(c.name)
    parts += [nominal_constraint(a) for a in sorted(idents)]
    parts.append(_ref_constraint(c, Not, q, "Xc"))
    res = satisfiable(constraints_to_query(parts), max_states, stats)
    if not res:
        return Certain()
    t = res.tree
    for i, g in enumerate(gamma, 1):
        if () not in eval_query_direct(g, t):
            raise AssertionError(f"countermodel violates root constraint {i}")
    for v in views:
        sel = eval_query_direct(v.definition, t)
        for a in v.extension:
            x = resolve_node_ref(a, t)
            if x is None or x not in sel:
                raise AssertionError(f"countermodel violates view {v.symbol}")
    x = resolve_node_ref(c, t)
    if x is None or x in eval_query_direct(q, t):
        raise AssertionError("countermodel does not refute the answer")
    return NotCertain(t, f"node {c} exists and is not selected by the query")


# ---------------------------------------------------------------- file formats

def _strip_comments(text):
    return "\n".join(line.split("#", 1)[0] if line.lstrip().startswith("#") else line
                     for line in text.splitlines())


def parse_constraints(text):
    """A sequence of queries, one per stanza."""
    text = _strip_comments(text)
    out = []
    pos = 0
    while text[pos:].strip():
        q, pos = parse_query_prefix(text, pos)
        out.append(q)
        rest = text[pos:].lstrip()
        if rest.startswith(";"):
            pos = len(text) - len(rest) + 1
    return out


_VIEW_HEAD = re.compile(r"\s*view\s+([A-Za-z_][A-Za-z0-9_]*)\s*\{\s*def\s*:", re.S)


def parse_views(text):
    """``view NAME { def: <query>; ext: ref, ref }`` stanzas."""
    text = _strip_comments(text)
    views = []
    pos = 0
    while text[pos:].strip():
        m = _VIEW_HEAD.match(text, pos)
        if not m:
            line = text.count("\n", 0, pos) + 1
            raise QuerySyntaxError("expected 'view NAME { def: ...'", line, 1)
        q, pos = parse_query_prefix(text, m.end())
        m2 = re.compile(r"\s*;\s*ext\s*:([^}]*)\}", re.S).match(text, pos)
        if not m2:
            line = text.count("\n", 0, pos) + 1
            raise QuerySyntaxError("expected '; ext: refs }' after the view definition", line, 1)
        refs = tuple(parse_node_ref(r) for r in m2.group(1).split(",") if r.strip())
        views.append(ViewSpec(m.group(1), q, refs))
        pos = m2.end()
    return views
