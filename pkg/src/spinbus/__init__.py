"""Entanglement distribution through unmodulated spin graphs.

Single-excitation dynamics, pair concurrence for two-site encodings,
mirror-symmetry classification and flux/time targeting on spin rings.
"""

__version__ = "0.1.0"

from .dynamics import Propagator, diagonalize, transition_amplitudes
from .entanglement import Encoding, concurrence_closed_form, concurrence_wootters, pair_amplitudes
from .graph import SpinGraph, gauge_transform, make_chain, make_ring, parse_graph
from .hamiltonian import build_full_space, build_single_excitation
from .optimizer import (
    Budgets,
    flux_transfer_search,
    optimal_encoding_at_time,
    optimize_over_time,
    plan_targeting,
)
from .symmetry import classify, counterpart_coverage, find_involutions

__all__ = [
    "Budgets",
    "Encoding",
    "Propagator",
    "SpinGraph",
    "build_full_space",
    "build_single_excitation",
    "classify",
    "concurrence_closed_form",
    "concurrence_wootters",
    "counterpart_coverage",
    "diagonalize",
    "find_involutions",
    "flux_transfer_search",
    "gauge_transform",
    "make_chain",
    "make_ring",
    "optimal_encoding_at_time",
    "optimize_over_time",
    "pair_amplitudes",
    "parse_graph",
    "plan_targeting",
    "transition_amplitudes",
]
