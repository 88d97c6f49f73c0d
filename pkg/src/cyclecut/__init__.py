"""Minimum cycle decompositions of double ear decomposable multigraphs."""
from .construction import (
    CycleDecomposition,
    EarScript,
    EarStep,
    SubdivideStep,
    apply_script,
    ear_script_from_trace,
    lift_cycles,
    random_script,
    validate_decomposition,
)
from .multigraph import (
    GraphFormatError,
    Multigraph,
    connected_components,
    degree,
    parse_graph,
    read_graph,
    resolve,
    serialize,
    subdivide,
)
from .oracle import brute_force_c, enumerate_even_multigraphs
from .recognizer import (
    degrees_in_2_4,
    is_double_ear_decomposable,
    treewidth_at_most_2,
)
from .reduction import DecompositionResult, NotDecomposable, cycle_number, run

__version__ = "0.1.0"
