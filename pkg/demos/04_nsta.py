"""From a two-way alternating automaton to a one-way selecting automaton and back.

    python demos/04_nsta.py
"""

from muxpath import compile_query, encode_binary, parse_query
from muxpath.acceptance import selected_nodes
from muxpath.nsta import nsta_selected_nodes, nsta_to_twata, twata_to_nsta
from muxpath.trees import enumerate_trees

a = compile_query(parse_query("$X : lfp { $X = a & <fchild^->b }"))
m = twata_to_nsta(a)
back = nsta_to_twata(m)
print(f"2WATA {len(a)} states -> NSTA {len(m)} states -> 2WATA {len(back)} states")

trees = [encode_binary(t) for t in enumerate_trees(3, ["a", "b"])]
same = sum(selected_nodes(a, b) == nsta_selected_nodes(m, b) == selected_nodes(back, b)
           for b in trees)
print(f"selected nodes agree on {same} of {len(trees)} trees")
