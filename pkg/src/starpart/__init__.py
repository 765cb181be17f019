"""Constructive partitions of graphs without star forests, matchings and their complements."""

from __future__ import annotations

from .errors import (
    ArgumentError,
    ClassMembershipError,
    ContractError,
    GraphParseError,
    SizeLimitError,
    StarpartError,
)
from .graph import (
    BipartiteGraph,
    Block,
    Graph,
    Guarantee,
    LabelledPartition,
    VertexSet,
    parse_bipartite,
    parse_graph6,
    read_any_graph,
    relation,
    write_bipartite,
    write_graph6,
)
from .patterns import PatternSpec, build_pattern, family_F, find_induced, find_induced_bipartite, is_twin_star_free, parse_pattern

__version__ = "0.1.0"
