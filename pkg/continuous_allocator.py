"""
Continuous Allocator Module
Builds the exact disjoint B_k ⊆ A_k with ν(B_k) = m_k from a rational max flow over the atom table
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Set, Tuple, Union

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from errors import InvariantViolationError
from hall_certificates import Instance, ViolatingSet, cut_certificate
from measure import IntervalSet, carve, partition, union_all
from venn_atoms import AtomTable, atomize, mask_members

logger = logging.getLogger(__name__)

SOURCE = 'source'
SINK = 'sink'


def demand_node(k: int) -> Tuple[str, int]:
    return ('demand', k)


def atom_node(mask: int) -> Tuple[str, int]:
    return ('atom', mask)


@dataclass
class FlowNetwork:
    """source -> demand k (m_k) -> atom Q ∋ k (Σm) -> sink (ν(S_Q))"""

    graph: nx.DiGraph
    n: int
    masks: List[int]

    @property
    def interior_nodes(self) -> List[Hashable]:
        return [node for node in self.graph.nodes if node not in (SOURCE, SINK)]

    def capacity(self, u: Hashable, v: Hashable) -> Fraction:
        return self.graph[u][v]['capacity']


@dataclass
class FlowResult:
    value: Fraction
    edge_flows: Dict[Tuple[Hashable, Hashable], Fraction]
    source_side: Set[Hashable]

    @property
    def source_demands(self) -> List[int]:
        """0-based demands on the source side of the minimum cut"""
        return sorted(node[1] for node in self.source_side
                      if isinstance(node, tuple) and node[0] == 'demand')

    def flow_between(self, k: int, mask: int) -> Fraction:
        return self.edge_flows.get((demand_node(k), atom_node(mask)), Fraction(0))


@dataclass
class Allocation:
    """B_1..B_n plus the per-atom shares f(k, Q) they were cut from"""

    parts: Tuple[IntervalSet, ...]
    shares: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    flow_value: Fraction = Fraction(0)

    @property
    def measures(self) -> List[Fraction]:
        return [part.measure for part in self.parts]

    def share_ranges(self, mask: int) -> List[Tuple[int, Fraction, Fraction]]:
        """
        (k, start, stop) in measure coordinates of S_Q: demand k owns the
        stretch of the atom from start to stop, counted from its left end.
        """
        ranges = []
        offset = Fraction(0)
        for (k, q), amount in sorted(self.shares.items()):
            if q != mask:
                continue
            ranges.append((k, offset, offset + amount))
            offset += amount
        return ranges


def build_network(inst: Instance, table: AtomTable) -> FlowNetwork:
    """source -> demand k -> atoms containing k -> sink"""
    bound = inst.total_demand
    graph = nx.DiGraph()
    graph.add_node(SOURCE)
    for k, demand in enumerate(inst.demands):
        graph.add_edge(SOURCE, demand_node(k), capacity=demand)
    for k in range(inst.n):
        for mask in table.masks_containing(k):
            graph.add_edge(demand_node(k), atom_node(mask), capacity=bound)
    for mask, atom in table.items():
        graph.add_edge(atom_node(mask), SINK, capacity=atom.measure)
    graph.add_node(SINK)
    return FlowNetwork(graph=graph, n=inst.n, masks=table.masks())


def max_flow(net: FlowNetwork) -> FlowResult:
    """Exact Edmonds-Karp over Fraction capacities"""
    residual = edmonds_karp(net.graph, SOURCE, SINK, capacity='capacity')
    value = Fraction(residual.graph['flow_value'])
    edge_flows = {(u, v): Fraction(residual[u][v]['flow']) for u, v in net.graph.edges}

    reached = {SOURCE}
    queue = deque([SOURCE])
    while queue:
        u = queue.popleft()
        for v, attr in residual[u].items():
            if v not in reached and attr['capacity'] - attr['flow'] > 0:
                reached.add(v)
                queue.append(v)

    logger.debug("max flow %s over %d edges", value, net.graph.number_of_edges())
    return FlowResult(value=value, edge_flows=edge_flows, source_side=reached)


def allocate_exact(inst: Instance, table: Optional[AtomTable] = None) -> Union[Allocation, ViolatingSet]:
    """Flow shares per atom, carved leftmost and split in ascending k"""
    table = atomize(inst.subsets) if table is None else table
    result = max_flow(build_network(inst, table))
    if result.value < inst.total_demand:
        certificate = cut_certificate(inst, table, result.value, result.source_demands)
        logger.info("instance infeasible: flow %s < %s", result.value, inst.total_demand)
        return certificate

    pieces: List[List[IntervalSet]] = [[] for _ in range(inst.n)]
    shares: Dict[Tuple[int, int], Fraction] = {}
    for mask, atom in table.items():
        takers = [(k, result.flow_between(k, mask)) for k in mask_members(mask)]
        takers = [(k, amount) for k, amount in takers if amount > 0]
        if not takers:
            continue
        used = carve(atom, sum((amount for _, amount in takers), Fraction(0)))
        for (k, amount), piece in zip(takers, partition(used, [amount for _, amount in takers])):
            pieces[k].append(piece)
            shares[(k, mask)] = amount

    allocation = Allocation(parts=tuple(union_all(p) for p in pieces), shares=shares,
                            flow_value=result.value)
    for k, (part, demand) in enumerate(zip(allocation.parts, inst.demands)):
        if part.measure != demand:
            raise InvariantViolationError(f"B_{k + 1} has measure {part.measure}, expected {demand}")
    logger.info("exact allocation built for %d sets", inst.n)
    return allocation
