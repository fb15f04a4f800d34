"""Evaluation time grows linearly with the tree.

    python demos/05_linear.py
"""

import time

from muxpath import compile_query, parse_query
from muxpath.acceptance import selected_nodes
from muxpath.cli import linear_fit
from muxpath.trees import chain_binary

a = compile_query(parse_query("$X : lfp { $X = red | <child> $X }"))
sizes, secs = [1000, 4000, 16000, 64000], []
for n in sizes:
    t = chain_binary(n, "blue")
    t0 = time.perf_counter()
    selected_nodes(a, t)
    secs.append(time.perf_counter() - t0)
    print(f"{n:>6} nodes: {secs[-1] * 1000:8.1f} ms")
print("R^2 of a straight-line fit: %.4f" % linear_fit(sizes, secs)[2])
