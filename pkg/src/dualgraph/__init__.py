"""Dual-module graph analytics: vertex-centric push plus edge-block pull."""
from .algorithms import bfs, pagerank, wcc
from .edge_block import EdgeBlockConfig, EdgeBlockIndex, SizeClass, build_edge_blocks, choose_group_power, classify
from .executor import RunResult, Strategy, run_program
from .frontier import Bitmap
from .graph import Graph
from .graph_io import CsrGraph, RawEdgeList, build_csr, parse_edge_list, power_law_graph, random_graph

__version__ = "0.1.0"
