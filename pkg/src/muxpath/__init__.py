"""Alternation-free fixpoint XPath (µXPath): evaluation via two-way weak
alternating tree automata, and reasoning (satisfiability, containment,
constraints, view-based answering) via automaton emptiness."""

from .acceptance import build_product, selected_nodes, solve_weak_game
from .automata import Twata, build_wf_automaton, compile_query, twata_to_query, validate_weakness
from .emptiness import BudgetExhausted, Empty, twata_nonempty
from .lowering import lower_query_paths, prepare_query
from .nsta import (BOTTOM, NstAutomaton, nsta_selected_nodes, nsta_to_twata, pad_full_binary,
                   twata_to_nsta)
from .reasoning import (Certain, Contained, Implied, NotCertain, NotContained, NotImplied, Sat,
                        Unsat, certain_answer, constraints_satisfiable, contained,
                        dtd_rule_constraint, implies, nominal_constraint, satisfiable)
from .semantics import eval_query_direct
from .syntax import parse_expr, parse_path, parse_query, render_query
from .trees import (BinaryTree, SiblingTree, decode_binary, encode_binary, parse_tree,
                    render_tree)

__version__ = "0.1.0"
