"""limaut: a workbench for k-limited automata and one-way pushdown automata.

Exact-rational probabilistic semantics, the machine-to-machine
transformations between blank-skipping 2-limited automata and pushdown
automata, crossing-matrix machinery, first-traverse decompositions, and a
brute-force oracle that certifies every transformation on small inputs.
"""

from .machines import (BLANK, LAMBDA, LEND, REND, Dfa, LeveledAlphabet,
                       LimitedAutomaton, MachineClass, MachineError,
                       PushdownAutomaton, Violation, classify,
                       is_blank_skipping, is_ideal_shape, validate_limited,
                       validate_pda)
from .semantics import (ACCEPT, REJECT, UNRESOLVED, ConfigurationGraph, Mode,
                        ProbabilityReport, acceptance_probability,
                        build_config_graph, count_accepting_paths,
                        decide_language_upto, enumerate_paths_oracle,
                        expected_steps)
from .transducers import (OutputMultiset, RtTransducer, compose_transducers,
                          evaluate_transducer)

__all__ = [
    "BLANK", "LAMBDA", "LEND", "REND",
    "Dfa", "LeveledAlphabet", "LimitedAutomaton", "MachineClass",
    "MachineError", "PushdownAutomaton", "Violation",
    "classify", "is_blank_skipping", "is_ideal_shape",
    "validate_limited", "validate_pda",
    "ACCEPT", "REJECT", "UNRESOLVED",
    "ConfigurationGraph", "Mode", "ProbabilityReport",
    "acceptance_probability", "build_config_graph", "count_accepting_paths",
    "decide_language_upto", "enumerate_paths_oracle", "expected_steps",
    "OutputMultiset", "RtTransducer", "compose_transducers",
    "evaluate_transducer",
]

__version__ = "0.1.0"
