"""Exact bandwidth of meager deterministic timed automata.

Pipeline: parse an automaton, split it into regions, abstract each start
region by the barycenters of its faces, and read the growth rate off the
smallest root of the characteristic quasi-polynomial of the resulting
simply-timed graph.
"""

from .barycentric import build_abstraction
from .cli import Options, run_pipeline
from .model import TimedAutomaton, TimedWord, parse_automaton
from .regions import region_split
from .stg import SimplyTimedGraph, growth_rate, parse_stg

__all__ = [
    "Options",
    "SimplyTimedGraph",
    "TimedAutomaton",
    "TimedWord",
    "build_abstraction",
    "growth_rate",
    "parse_automaton",
    "parse_stg",
    "region_split",
    "run_pipeline",
]
