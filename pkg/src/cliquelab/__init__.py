"""Maximum clique through QUBO sampling, with benchmark generation and analysis."""

from .benchgen import GraphRecipe, graph_creation, ratio
from .decompose import DecomposeConfig, decompose_is
from .graph import Graph, complement
from .qubo import build_is_qubo, build_mc_qubo
from .solvers import AnnealConfig, LocalAnnealerClient, exact_max_clique, solve_max_clique

__version__ = "0.1.0"
