"""Average-case branch-and-bound for maximum independent set on random graphs."""
from .errors import DomainError, InsufficientDataError, ParseError, ResourceCapError
from .graph import Graph, RngStream, gen_gnm, gen_gnp, induced_prefix, read_dimacs, turan_bound, write_dimacs
from .solvers import (
    SearchNode,
    SolveResult,
    bnb_best_first,
    bnb_census,
    brute_force_alpha,
    count_independent_sets,
    exhaustive_search,
    potential,
    tree_counts,
)

__version__ = "0.1.0"
