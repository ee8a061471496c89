"""Finite models of symmetric systems of countable-style models.

A node is a finite set of ordinals with a code ordinal naming it and a
`delta`: the length of its initial segment inside [0, threshold_top). One node
belongs to another when its code is among the other's elements.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from services.amalgam import OrderIso
from services.errors import (
    InvalidAmalgamationError,
    InvalidInputError,
    InvalidIsoError,
    MalformedInputError,
    NoIsoError,
    NotFoundError,
)
from services.report import Report

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class NodeModel:
    code: int
    elements: FrozenSet[int] = field(compare=False)
    delta: int = field(compare=False)

    @classmethod
    def of(cls, code: int, elements: Iterable[int], threshold_top: int, delta: Optional[int] = None) -> "NodeModel":
        members = frozenset(elements)
        if delta is None:
            delta = next(d for d in range(threshold_top + 1) if d not in members or d == threshold_top)
        return cls(code, members, delta)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NodeModel):
            return NotImplemented
        return (self.code, self.elements, self.delta) == (other.code, other.elements, other.delta)

    def __hash__(self) -> int:
        return hash((self.code, self.elements, self.delta))

    def sorted_elements(self) -> List[int]:
        return sorted(self.elements)

    def contains(self, other: "NodeModel") -> bool:
        return other.code in self.elements


@dataclass(frozen=True)
class SymSystem:
    threshold_top: int
    nodes: Tuple[NodeModel, ...] = ()

    @classmethod
    def of(
        cls,
        threshold_top: int,
        nodes: Iterable[NodeModel],
        contains: Optional[Iterable[Tuple[int, int]]] = None,
    ) -> "SymSystem":
        system = cls(threshold_top, tuple(sorted(set(nodes))))
        if contains is not None:
            declared = frozenset((int(j), int(i)) for j, i in contains)
            derived = system.containment()
            if declared != derived:
                stray = sorted(declared ^ derived)[0]
                raise MalformedInputError(
                    f"declared containment {stray[0]} in {stray[1]} disagrees with the elements", witness=stray
                )
        return system

    def __len__(self) -> int:
        return len(self.nodes)

    def codes(self) -> FrozenSet[int]:
        return frozenset(n.code for n in self.nodes)

    def node(self, code: int) -> NodeModel:
        for candidate in self.nodes:
            if candidate.code == code:
                return candidate
        raise NotFoundError(f"no node with code {code}", witness=(code,))

    def containment(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset((j.code, i.code) for i in self.nodes for j in self.nodes if i.contains(j))

    def carrier(self) -> FrozenSet[int]:
        result = set(self.codes())
        for node in self.nodes:
            result |= node.elements
        return frozenset(result)

    def with_nodes(self, nodes: Iterable[NodeModel]) -> "SymSystem":
        return SymSystem(self.threshold_top, tuple(sorted(set(nodes))))


@dataclass(frozen=True)
class GapWitness:
    i: int
    alpha: int
    beta: Optional[int]  # None when no element of the node lies above i


def _check_codes(sys: SymSystem) -> None:
    seen: Dict[int, NodeModel] = {}
    for node in sys.nodes:
        if node.code in seen:
            raise MalformedInputError(f"two nodes share the code {node.code}", witness=(node.code,))
        if node.code < sys.threshold_top:
            raise MalformedInputError(
                f"code {node.code} lies inside the threshold segment [0, {sys.threshold_top})", witness=(node.code,)
            )
        seen[node.code] = node


def _structure(sys: SymSystem) -> Optional[Report]:
    segment = frozenset(range(sys.threshold_top))
    for node in sys.nodes:
        if node.elements & segment != frozenset(range(node.delta)) or node.delta > sys.threshold_top:
            return Report.violation("A", (node.code,), f"delta {node.delta} does not match the elements of {node.code}")
    for j_code, i_code in sorted(sys.containment()):
        inner, outer = sys.node(j_code), sys.node(i_code)
        if not inner.elements <= outer.elements:
            return Report.violation("A", (j_code, i_code), f"node {j_code} belongs to {i_code} but is not a subset")
        if inner.delta >= outer.delta:
            return Report.violation("A", (j_code, i_code), f"node {j_code} belongs to {i_code} without lower delta")
    return None


def node_iso(n1: NodeModel, n2: NodeModel) -> OrderIso[int]:
    if len(n1.elements) != len(n2.elements):
        raise NoIsoError(
            f"nodes {n1.code} and {n2.code} have {len(n1.elements)} and {len(n2.elements)} elements",
            witness=(n1.code, n2.code),
        )
    return OrderIso(dict(zip(n1.sorted_elements(), n2.sorted_elements())))


def _copy(node: NodeModel, psi: OrderIso[int]) -> NodeModel:
    return NodeModel(psi(node.code), psi.apply(node.elements), node.delta)


def check_system(sys: SymSystem) -> Report:
    _check_codes(sys)
    report = _structure(sys)
    if report is not None:
        return report
    by_delta: Dict[int, List[NodeModel]] = {}
    for node in sys.nodes:
        by_delta.setdefault(node.delta, []).append(node)
    for group in by_delta.values():
        for first in group:
            for second in group:
                if first.code >= second.code:
                    continue
                if len(first.elements) != len(second.elements):
                    return Report.violation(
                        "B", (first.code, second.code), f"nodes {first.code} and {second.code} differ in size"
                    )
                psi = node_iso(first, second)
                for xi in sorted(first.elements & second.elements):
                    if psi(xi) != xi:
                        return Report.violation(
                            "B", (first.code, second.code, xi), f"isomorphism moves the shared ordinal {xi}"
                        )
    for inner in sys.nodes:
        for outer in sys.nodes:
            if inner.delta < outer.delta and not any(inner.code in peer.elements for peer in by_delta[outer.delta]):
                return Report.violation(
                    "C", (inner.code, outer.code), f"no node at the level of {outer.code} contains {inner.code}"
                )
    present = frozenset(sys.nodes)
    for outer in sys.nodes:
        for inner in sys.nodes:
            if not outer.contains(inner):
                continue
            for peer in by_delta[outer.delta]:
                image = _copy(inner, node_iso(outer, peer))
                if image not in present:
                    return Report.violation(
                        "D",
                        (inner.code, outer.code, peer.code),
                        f"copy of {inner.code} from {outer.code} into {peer.code} is missing",
                    )
    return Report.passed()


def _member(sys: SymSystem, n: NodeModel) -> None:
    if n not in sys.nodes:
        raise NotFoundError(f"node {n.code} is not in the system", witness=(n.code,))


def restrict(sys: SymSystem, n: NodeModel) -> SymSystem:
    _member(sys, n)
    return sys.with_nodes(node for node in sys.nodes if n.contains(node))


def copies_into(sys: SymSystem, n: NodeModel, w: SymSystem) -> Dict[NodeModel, NodeModel]:
    """Every copy of a node of w into a node at the level of n, mapped to its source."""
    _member(sys, n)
    if w.threshold_top != sys.threshold_top:
        raise InvalidAmalgamationError("systems use different threshold segments")
    for node in w.nodes:
        if not n.contains(node) or not node.elements <= n.elements:
            raise InvalidAmalgamationError(f"node {node.code} does not lie inside {n.code}", witness=(node.code,))
    for node in restrict(sys, n).nodes:
        if node not in w.nodes:
            raise InvalidAmalgamationError(
                f"node {node.code} belongs to {n.code} but is missing from the added system", witness=(node.code,)
            )
    sources: Dict[NodeModel, NodeModel] = {}
    for peer in sys.nodes:
        if peer.delta == n.delta:
            psi = node_iso(n, peer)
            sources.update((_copy(node, psi), node) for node in w.nodes)
    return sources


def amalgamate_into(sys: SymSystem, n: NodeModel, w: SymSystem) -> SymSystem:
    merged: Dict[int, NodeModel] = {node.code: node for node in sys.nodes}
    for image, source in sorted(copies_into(sys, n, w).items()):
        clash = merged.get(image.code)
        if clash is not None and clash != image:
            raise InvalidAmalgamationError(
                f"copy of {source.code} collides with node {image.code}", witness=(image.code,)
            )
        merged[image.code] = image
    logger.debug("amalgamated %s nodes into %s: %s -> %s", len(w), n.code, len(sys), len(merged))
    return sys.with_nodes(merged.values())


def union_isomorphic(m: SymSystem, n: SymSystem, psi: OrderIso[int]) -> SymSystem:
    if m.threshold_top != n.threshold_top:
        raise InvalidIsoError("systems use different threshold segments")
    if psi.domain() != m.carrier() or psi.image() != n.carrier():
        raise InvalidIsoError("map must carry the first system's ordinals onto the second's")
    ordinals = sorted(psi.domain())
    for lower, upper in zip(ordinals, ordinals[1:]):
        if psi(lower) >= psi(upper):
            raise InvalidIsoError(f"map does not preserve the order of {lower} and {upper}", witness=(lower, upper))
    shared = m.carrier() & n.carrier()
    for xi in sorted(shared):
        if psi(xi) != xi:
            raise InvalidIsoError(f"map moves the shared ordinal {xi}", witness=(xi,))
    targets = frozenset(n.nodes)
    images = frozenset(_copy(node, psi) for node in m.nodes)
    if images != targets:
        stray = sorted(images ^ targets)[0]
        raise InvalidIsoError(f"map does not match node {stray.code} with a node of the other system", witness=(stray.code,))
    merged: Dict[int, NodeModel] = {node.code: node for node in m.nodes}
    for node in n.nodes:
        clash = merged.get(node.code)
        if clash is not None and clash != node:
            raise InvalidIsoError(f"both systems name different nodes {node.code}", witness=(node.code,))
        merged[node.code] = node
    return m.with_nodes(merged.values())


def _relevant(sys: SymSystem, n: NodeModel, outside_only: bool) -> List[NodeModel]:
    return [
        other
        for other in sys.nodes
        if other != n and other.delta < n.delta and not (outside_only and n.contains(other))
    ]


def _clear(alpha: int, beta: Optional[int], n: NodeModel, others: Sequence[NodeModel]) -> bool:
    for other in others:
        for xi in other.elements & n.elements:
            if alpha <= xi and (beta is None or xi < beta):
                return False
    return True


def gap_search(sys: SymSystem, n: NodeModel, i: int, outside_only: bool = False) -> Optional[GapWitness]:
    _member(sys, n)
    if i in n.elements:
        raise InvalidInputError(f"{i} belongs to node {n.code}", witness=(i,))
    above = [xi for xi in n.elements if xi > i]
    beta = min(above) if above else None
    others = _relevant(sys, n, outside_only)
    for alpha in sorted((xi for xi in n.elements if xi < i), reverse=True):
        if _clear(alpha, beta, n, others):
            return GapWitness(i, alpha, beta)
    logger.info("no gap below %s in node %s", i, n.code)
    return None


def verify_gap_witness(sys: SymSystem, n: NodeModel, witness: GapWitness, outside_only: bool = False) -> Report:
    if witness.i in n.elements:
        return Report.violation("input", (witness.i,), f"{witness.i} belongs to node {n.code}")
    if witness.alpha not in n.elements:
        return Report.violation("a", (witness.alpha,), f"{witness.alpha} is not in node {n.code}")
    above = [xi for xi in n.elements if xi > witness.i]
    expected = min(above) if above else None
    if witness.beta != expected:
        return Report.violation("b", (witness.beta,), f"upper end should be {expected}")
    if not (witness.alpha < witness.i and (witness.beta is None or witness.i < witness.beta)):
        return Report.violation("c", (witness.alpha, witness.i, witness.beta), "interval does not straddle i")
    for other in _relevant(sys, n, outside_only):
        for xi in sorted(other.elements & n.elements):
            if witness.alpha <= xi and (witness.beta is None or xi < witness.beta):
                return Report.violation("d", (other.code, xi), f"{xi} from node {other.code} lies in the interval")
    return Report.passed()
