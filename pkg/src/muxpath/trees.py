"""Sibling trees, their binary encoding, and a small text format.

Nodes are addressed by tuples of positive ints, ``()`` being the root.  In a
sibling tree ``x + (i,)`` is the i-th child of ``x``; in a binary tree index 1
is the first child and index 2 the next sibling (after encoding).
"""

import itertools
import re
from collections import namedtuple

FLAGS = ("ifc", "irs", "hfc", "hrs")
FLAG_SET = frozenset(FLAGS)


class TreeSyntaxError(ValueError):
    def __init__(self, msg, line=None, col=None):
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(msg + where)
        self.line = line
        self.col = col


class NotWellFormed(ValueError):
    pass


def format_address(addr):
    """``()`` -> ``"/"``, ``(2, 1)`` -> ``"/2/1"``."""
    if not addr:
        return "/"
    return "".join(f"/{i}" for i in addr)


def parse_address(text):
    text = text.strip()
    if text in ("", "/"):
        return ()
    parts = [p for p in text.split("/") if p]
    try:
        addr = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"bad node address {text!r}") from None
    if any(i < 1 for i in addr):
        raise ValueError(f"bad node address {text!r}")
    return addr


class _Tree:
    __slots__ = ("labels", "_kids")

    def __init__(self, labels):
        self.labels = {tuple(k): frozenset(v) for k, v in labels.items()}
        if () not in self.labels:
            raise ValueError("a tree needs a root")
        for x in self.labels:
            if x and x[:-1] not in self.labels:
                raise ValueError(f"address {format_address(x)} has no parent")
        self._kids = None

    def __eq__(self, other):
        return type(self) is type(other) and self.labels == other.labels

    def __hash__(self):
        return hash(frozenset(self.labels.items()))

    def __len__(self):
        return len(self.labels)

    def __contains__(self, addr):
        return addr in self.labels

    def nodes(self):
        """Addresses in document (pre-)order."""
        return sorted(self.labels)

    def label(self, addr):
        return self.labels[addr]

    def children(self, addr):
        if self._kids is None:
            kids = {x: [] for x in self.labels}
            for x in self.labels:
                if x:
                    kids[x[:-1]].append(x)
            for v in kids.values():
                v.sort()
            self._kids = kids
        return self._kids[addr]

    def props(self):
        out = set()
        for lab in self.labels.values():
            out |= lab
        return frozenset(out)


class SiblingTree(_Tree):
    """Finite ordered unranked tree with sets of propositions as labels."""

    __slots__ = ()

    def __init__(self, labels):
        super().__init__(labels)
        for x, lab in self.labels.items():
            if x and x[-1] > 1 and x[:-1] + (x[-1] - 1,) not in self.labels:
                raise ValueError(f"{format_address(x)} lacks a left sibling")
            if x and x[-1] < 1:
                raise ValueError("indices start at 1")
            bad = lab & FLAG_SET
            if bad:
                raise ValueError(f"reserved proposition {sorted(bad)[0]!r} used as a label")

    def __repr__(self):
        return f"SiblingTree({render_tree(self)!r})"


class BinaryTree(_Tree):
    """Binary tree; index 1 = first child, 2 = next sibling once encoded."""

    __slots__ = ()

    def __init__(self, labels):
        super().__init__(labels)
        for x in self.labels:
            if x and x[-1] not in (1, 2):
                raise ValueError("binary tree indices must be 1 or 2")

    def __repr__(self):
        items = ", ".join(
            f"{format_address(x)}: {{{', '.join(sorted(self.labels[x]))}}}" for x in self.nodes())
        return f"BinaryTree({items})"

    def indexed(self):
        """Preorder node list plus parent / child arrays (-1 = absent).

        Used by the evaluators; built iteratively so deep trees are fine."""
        nodes = self.nodes()
        pos = {x: i for i, x in enumerate(nodes)}
        n = len(nodes)
        parent = [-1] * n
        c1 = [-1] * n
        c2 = [-1] * n
        for i, x in enumerate(nodes):
            if x:
                p = pos[x[:-1]]
                parent[i] = p
                if x[-1] == 1:
                    c1[p] = i
                else:
                    c2[p] = i
        return nodes, parent, c1, c2


class IndexedBinaryTree:
    """Array form of a binary tree: nodes are preorder positions 0..n-1.

    Address tuples cost quadratic memory on deep trees (a chain of 10^5
    nodes), so large benchmark inputs use this form.  It quacks like a
    BinaryTree as far as the evaluator is concerned: ``labels[i]`` and
    ``indexed()``.
    """

    def __init__(self, labels, parent, c1, c2):
        self.labels = [frozenset(l) for l in labels]
        self.parent, self.c1, self.c2 = list(parent), list(c1), list(c2)
        if not (len(self.labels) == len(self.parent) == len(self.c1) == len(self.c2)):
            raise ValueError("array lengths differ")

    def __len__(self):
        return len(self.labels)

    def nodes(self):
        return list(range(len(self.labels)))

    def indexed(self):
        return self.nodes(), self.parent, self.c1, self.c2

    def to_binary(self):
        """Address form (fine for small trees)."""
        addr = [None] * len(self)
        addr[0] = ()
        for i in range(len(self)):      # preorder: parents come first
            for k, arr in ((1, self.c1), (2, self.c2)):
                if arr[i] >= 0:
                    addr[arr[i]] = addr[i] + (k,)
        return BinaryTree({addr[i]: self.labels[i] for i in range(len(self))})


def chain_binary(n, label="a", first_children=True):
    """encode_binary(chain_tree(n, ...)) built directly in array form."""
    labels, parent, c1, c2 = [], [], [-1] * n, [-1] * n
    for i in range(n):
        lab = {label}
        parent.append(i - 1)
        if first_children:
            if i + 1 < n:
                lab.add("hfc")
                c1[i] = i + 1
            if i > 0:
                lab.add("ifc")
        else:
            if i == 0 and n > 1:
                lab.add("hfc")
                c1[0] = 1
            if i == 1:
                lab.add("ifc")
            if i > 1:
                lab.add("irs")
            if i > 0 and i + 1 < n:
                lab.add("hrs")
                c2[i] = i + 1
        labels.append(lab)
    return IndexedBinaryTree(labels, parent, c1, c2)


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(r"\s+|#[^\n]*|\(|\)|[A-Za-z_][A-Za-z0-9_]*")


def _tokens(text):
    line, col0, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TreeSyntaxError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        tok = m.group()
        if tok[0] in " \t\r\n#" or tok.isspace():
            nl = tok.count("\n")
            if nl:
                line += nl
                col0 = pos + tok.rindex("\n") + 1
        else:
            yield tok, line, pos - col0 + 1
        pos = m.end()


def parse_tree(text):
    """Parse ``(label* child*)`` notation into a SiblingTree."""
    labels = {}
    stack = []   # [address, number of children seen]
    done = False
    last = (1, 1)
    for tok, line, col in _tokens(text):
        last = (line, col)
        if done:
            raise TreeSyntaxError("trailing input after tree", line, col)
        if tok == "(":
            if stack:
                top = stack[-1]
                top[1] += 1
                addr = top[0] + (top[1],)
            else:
                addr = ()
            labels[addr] = set()
            stack.append([addr, 0])
        elif tok == ")":
            if not stack:
                raise TreeSyntaxError("unbalanced ')'", line, col)
            stack.pop()
            if not stack:
                done = True
        else:
            if not stack:
                raise TreeSyntaxError(f"label {tok!r} outside a node", line, col)
            addr, nkids = stack[-1]
            if nkids:
                raise TreeSyntaxError(f"label {tok!r} after a child node", line, col)
            if tok in FLAG_SET:
                raise TreeSyntaxError(f"reserved proposition {tok!r} used as a label", line, col)
            labels[addr].add(tok)
    if stack:
        raise TreeSyntaxError("unexpected end of input: unclosed '('", *last)
    if not done:
        raise TreeSyntaxError("empty input: expected '('", *last)
    return SiblingTree(labels)


def render_tree(t):
    """Single-line rendering; labels sorted, children in order."""
    toks = []
    stack = [((), False)]
    while stack:
        x, closing = stack.pop()
        if closing:
            toks.append(")")
            continue
        toks.append("(")
        toks.extend(sorted(t.labels[x]))
        stack.append((x, True))
        for c in reversed(t.children(x)):
            stack.append((c, False))
    return " ".join(toks).replace("( ", "(").replace(" )", ")")


# ------------------------------------------------------------ binary encoding

def encode_binary(t):
    """pi_b: first child -> .1, next sibling -> .2, plus the structural flags."""
    addr = binary_address_map(t)
    out = {}
    for x, lab in t.labels.items():
        flags = set(lab)
        if t.children(x):
            flags.add("hfc")
        if x:
            flags.add("ifc" if x[-1] == 1 else "irs")
            if x[:-1] + (x[-1] + 1,) in t.labels:
                flags.add("hrs")
        out[addr[x]] = flags
    return BinaryTree(out)


def binary_address_map(t):
    """Map sibling addresses of ``t`` to their addresses in encode_binary(t)."""
    addr = {(): ()}
    for x in t.nodes():
        if x:
            if x[-1] == 1:
                addr[x] = addr[x[:-1]] + (1,)
            else:
                addr[x] = addr[x[:-1] + (x[-1] - 1,)] + (2,)
    return addr


WellFormedReport = namedtuple("WellFormedReport", "ok address reason")
WellFormedReport.__bool__ = lambda self: self.ok


def well_formed_check(b):
    """Check the flag conditions; returns the first violation in document order."""
    root = b.labels[()]
    for f in ("ifc", "irs", "hrs"):
        if f in root:
            return WellFormedReport(False, (), f"root carries {f}")
    for x in b.nodes():
        lab = b.labels[x]
        if "hfc" in lab:
            c = b.labels.get(x + (1,))
            if c is None:
                return WellFormedReport(False, x, "hfc without a 1-child")
            if "ifc" not in c or "irs" in c:
                return WellFormedReport(False, x + (1,), "1-child must carry ifc and not irs")
        if "hrs" in lab:
            c = b.labels.get(x + (2,))
            if c is None:
                return WellFormedReport(False, x, "hrs without a 2-child")
            if "irs" not in c or "ifc" in c:
                return WellFormedReport(False, x + (2,), "2-child must carry irs and not ifc")
    return WellFormedReport(True, None, None)


def sibling_address_map(b):
    """pi_s on addresses: binary address -> sibling address, relevant part only."""
    out = {(): ()}
    stack = [()]
    while stack:
        x = stack.pop()
        lab = b.labels[x]
        s = out[x]
        if "hfc" in lab and x + (1,) in b.labels:
            out[x + (1,)] = s + (1,)
            stack.append(x + (1,))
        if "hrs" in lab and s and x + (2,) in b.labels:
            out[x + (2,)] = s[:-1] + (s[-1] + 1,)
            stack.append(x + (2,))
    return out


def decode_binary(b):
    """pi_s; irrelevant parts (no hfc / hrs) are dropped."""
    rep = well_formed_check(b)
    if not rep.ok:
        raise NotWellFormed(f"not well-formed at {format_address(rep.address)}: {rep.reason}")
    amap = sibling_address_map(b)
    return SiblingTree({s: b.labels[x] - FLAG_SET for x, s in amap.items()})


# ------------------------------------------------------------------- helpers

def chain_tree(n, label="a", first_children=True):
    """n nodes; a chain of first children, or a root with n-1 children."""
    if first_children:
        return SiblingTree({(1,) * k: {label} for k in range(n)})
    labels = {(): {label}}
    for i in range(1, n):
        labels[(i,)] = {label}
    return SiblingTree(labels)


def _shapes(n):
    """All ordered forests with n nodes, as tuples of child-forests."""
    if n == 0:
        yield ()
        return
    for k in range(1, n + 1):           # size of the first tree
        for sub in _shapes(k - 1):
            for rest in _shapes(n - k):
                yield (sub,) + rest


def tree_shapes(n):
    """All sibling-tree shapes with exactly n nodes, as address lists."""
    for kids in _shapes(n - 1):
        addrs = [()]
        stack = [((), kids)]
        while stack:
            base, forest = stack.pop()
            for i, sub in enumerate(forest, 1):
                a = base + (i,)
                addrs.append(a)
                stack.append((a, sub))
        yield sorted(addrs)


def enumerate_trees(max_nodes, props, min_nodes=1):
    """Every sibling tree with min_nodes..max_nodes nodes labeled over props."""
    props = sorted(props)
    subsets = [frozenset(c) for r in range(len(props) + 1)
               for c in itertools.combinations(props, r)]
    for n in range(min_nodes, max_nodes + 1):
        for addrs in tree_shapes(n):
            for labs in itertools.product(subsets, repeat=n):
                yield SiblingTree(dict(zip(addrs, labs)))
