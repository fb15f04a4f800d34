"""Small shared helpers for the test modules."""


from muxpath.acceptance import selected_nodes
from muxpath.trees import binary_address_map, encode_binary, enumerate_trees


def automaton_select(a, t):
    """Sibling addresses of t selected by automaton a (run on the encoding)."""
    back = {b: s for s, b in binary_address_map(t).items()}
    return {back[x] for x in selected_nodes(a, encode_binary(t))}


def small_trees(max_nodes, props):
    return list(enumerate_trees(max_nodes, sorted(props)))


def query_props(*qs):
    from muxpath.syntax import Prop, subexpressions
    out = set()
    for q in qs:
        out |= {e.name for e in subexpressions(q) if isinstance(e, Prop)}
    return out - {"ifc", "irs", "hfc", "hrs"}
