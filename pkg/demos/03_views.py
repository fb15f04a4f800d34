"""Certain answers from view extensions and root constraints.

    python demos/03_views.py
"""

from muxpath import parse_query
from muxpath.reasoning import ExplicitPath, Identifier, ViewSpec, certain_answer

P = parse_query
red = P("$V : lfp { $V = red }")

# the view says the root's first child is red
views = [ViewSpec("V", red, (ExplicitPath(("fchild",)),))]
print("is fchild red or blue?", certain_answer(P("$Q : lfp { $Q = red | blue }"), views, [], "fchild"))
r = certain_answer(P("$Q : lfp { $Q = blue }"), views, [], "fchild")
print("is fchild blue?       ", bool(r), "countermodel", r.tree)

# a constraint can settle what the view leaves open
red_is_blue = P("$G : gfp { $G = (red -> blue) & [child]$G }")
print("is fchild blue, given red -> blue everywhere?",
      certain_answer(P("$Q : lfp { $Q = blue }"), views, [red_is_blue], "fchild"))

# identifiers name a node wherever it is (this one takes a few seconds)
views = [ViewSpec("V", red, (Identifier("k"),))]
print("is node k red?", certain_answer(P("$Q : lfp { $Q = red }"), views, [], "k"))
