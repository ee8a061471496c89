from typing import FrozenSet, List, Tuple

import networkx as nx

from services.errors import MalformedInputError
from services.order import HeightedOrder, Point


def hasse_edges(order: HeightedOrder) -> FrozenSet[Tuple[Point, Point]]:
    graph = nx.DiGraph()
    graph.add_nodes_from(order.domain)
    graph.add_edges_from(order.strict_pairs())
    try:
        reduced = nx.transitive_reduction(graph)
    except nx.NetworkXError as exc:
        raise MalformedInputError(f"relation has a cycle: {exc}") from exc
    return frozenset(reduced.edges())


def _node(point: Point) -> str:
    return f'"{point}"'


def export_dot(order: HeightedOrder, name: str = "order") -> str:
    lines: List[str] = [f"digraph {name} {{", "\trankdir=BT;"]
    for beta in sorted(order.heights()):
        lines.append("\t{")
        lines.append("\t\trank=same;")
        for point in sorted(p for p in order.domain if p.beta == beta):
            lines.append(f'\t\t{_node(point)} [label="{point}"];')
        lines.append("\t}")
    for low, high in sorted(hasse_edges(order)):
        lines.append(f"\t{_node(low)} -> {_node(high)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
