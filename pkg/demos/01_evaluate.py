"""Evaluate a query two ways and look at the automaton in between.

    python demos/01_evaluate.py
"""

from muxpath import compile_query, encode_binary, parse_query, parse_tree
from muxpath.acceptance import selected_nodes
from muxpath.semantics import eval_query_direct
from muxpath.trees import binary_address_map, format_address

tree = parse_tree("(doc (red) (blue (red)))")
query = parse_query("$X : lfp { $X = red | <child> $X }")

# reference answer: plain fixpoint iteration over node sets
direct = sorted(eval_query_direct(query, tree))
print("direct evaluation:   ", [format_address(x) for x in direct])

# the same answer through the automaton: compile, encode the tree, solve the game
a = compile_query(query)
b = encode_binary(tree)
back = {bx: x for x, bx in binary_address_map(tree).items()}
auto = sorted(back[x] for x in selected_nodes(a, b))
print("automaton evaluation:", [format_address(x) for x in auto])
assert auto == direct

print(f"\nthe automaton has {len(a)} states in {len(a.partition)} weakness classes:")
print(a.dump())
