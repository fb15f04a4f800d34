"""Static reasoning: satisfiability, containment, schemas and nominals.

    python demos/02_reasoning.py
"""

from muxpath import parse_query
from muxpath.reasoning import (constraints_satisfiable, contained, dtd_rule_constraint,
                               nominal_constraint, satisfiable)

P = parse_query

# a query nobody can satisfy, and one with a witness
print("red & !red:", satisfiable(P("$X : lfp { $X = red & !red }")))
r = satisfiable(P("$X : lfp { $X = a & <child>(b & <right^->true) }"))
print("a with a non-first b child:", r.tree, "selected node", r.node)

# containment with a countermodel when it fails
reach = P("$X : lfp { $X = red | <child> $X }")
print("<fchild><right>red within reach-red:",
      bool(contained(P("$Y : lfp { $Y = <fchild><right>red }"), reach)))
r = contained(reach, P("$Y : lfp { $Y = red }"))
print("reach-red within red:", bool(r), "countermodel", r.tree, "at", r.node)

# a DTD-like rule as a root constraint
rule = dtd_rule_constraint("A -> B, (C*|D), E")
r = constraints_satisfiable([rule, P("$R : lfp { $R = A }")])
print("A -> B,(C*|D),E with root A:", r.tree)
r = constraints_satisfiable([rule, P("$R : lfp { $R = A & [fchild]false }")])
print("... and no first child:", r)

# a nominal: exactly one node carries the proposition
r = constraints_satisfiable([nominal_constraint("k"), P("$R : lfp { $R = <fchild>true }")])
print("nominal k with a child:", r.tree)
