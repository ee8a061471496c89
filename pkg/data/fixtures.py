"""Small worked instances shared by the tests and the shipped JSON fixtures."""
from typing import Callable, Dict, Tuple

from services.amalgam import OrderIso, Structure
from services.conditions import Condition
from services.order import BarrierMap, HeightedOrder, Point, Universe, canonical_barriers
from services.symsys import NodeModel, SymSystem

A = Point(0, 0)
B = Point(1, 0)
X = Point(0, 1)
X1, X2 = Point(0, 1), Point(1, 1)
Y = Point(0, 2)
Y1, Y2 = Point(0, 2), Point(1, 2)


def _structure(order: HeightedOrder) -> Structure:
    return Structure(order, canonical_barriers(order))


def p_a() -> Structure:
    """a and b at height 0, both below x at height 1; fan-out 2."""
    order = HeightedOrder.build(Universe(3, 2, 2), [A, B, X], [(A, X), (B, X)])
    return _structure(order)


def chain3() -> Structure:
    points = [Point(0, 0), Point(0, 1), Point(0, 2)]
    pairs = [(p, q) for p in points for q in points if p.beta < q.beta]
    return _structure(HeightedOrder.build(Universe(1, 3, 1), points, pairs))


def diamond() -> Structure:
    """The full 2x2 grid: a and b below both u=(0,1) and v=(1,1)."""
    u, v = Point(0, 1), Point(1, 1)
    order = HeightedOrder.build(Universe(2, 2, 2), [A, B, u, v], [(A, u), (B, u), (A, v), (B, v)])
    return _structure(order)


def lonely_top() -> Structure:
    """(0,1) with nothing below it: admissible for fan-out checks skipped, but ranks drop a level."""
    return _structure(HeightedOrder.build(Universe(1, 2, 1), [A, X]))


def antisymmetry_break() -> HeightedOrder:
    return HeightedOrder.build(Universe(2, 1, 1), [A, B], [(A, B), (B, A)])


def am1() -> Tuple[Structure, Structure, OrderIso[Point]]:
    universe = Universe(1, 3, 1)
    first = _structure(HeightedOrder.build(universe, [A, X], [(A, X)]))
    second = _structure(HeightedOrder.build(universe, [A, Y], [(A, Y)]))
    return first, second, OrderIso({A: A, X: Y})


def am2() -> Tuple[Structure, Structure, OrderIso[Point]]:
    universe = Universe(2, 3, 1)
    first = _structure(HeightedOrder.build(universe, [A, X1, X2], [(A, X1), (A, X2)]))
    second = _structure(HeightedOrder.build(universe, [A, Y1, Y2], [(A, Y1), (A, Y2)]))
    return first, second, OrderIso({A: A, X1: Y1, X2: Y2})


def single_node_system() -> SymSystem:
    return SymSystem.of(2, [NodeModel.of(5, [0, 3], 2)])


def tower_system() -> SymSystem:
    """Three nodes with 4 in 6 in 9 and deltas 1, 2, 3."""
    return SymSystem.of(
        3,
        [
            NodeModel.of(4, [0], 3),
            NodeModel.of(6, [0, 1, 4], 3),
            NodeModel.of(9, [0, 1, 2, 4, 6], 3),
        ],
    )


def twin_system() -> SymSystem:
    """Two same-delta nodes meeting in {0, 1}, each holding a copy of a low node."""
    return SymSystem.of(
        2,
        [
            NodeModel.of(10, [0, 3], 2),
            NodeModel.of(11, [0, 5], 2),
            NodeModel.of(20, [0, 1, 3, 7, 10], 2),
            NodeModel.of(21, [0, 1, 5, 8, 11], 2),
        ],
    )


def am2_marked_conditions() -> Tuple[Condition, Condition, OrderIso[Point]]:
    """AM2 with one marked node seeing x1 and y2; B3 puts a into their barrier."""
    first, second, psi = am2()
    system = single_node_system()
    views = {5: frozenset({X1, Y2})}
    q1 = Condition(first.order, first.barriers, system, frozenset({5}), views)
    q2 = Condition(second.order, second.barriers, system, frozenset({5}), views)
    return q1, q2, psi


def with_barriers(structure: Structure, mapping: Dict) -> Structure:
    return Structure(structure.order, structure.barriers.extended(BarrierMap.of(mapping).entries))


ORDERS: Dict[str, Callable[[], Structure]] = {
    "p_a": p_a,
    "chain3": chain3,
    "diamond": diamond,
    "lonely_top": lonely_top,
}

SYSTEMS: Dict[str, Callable[[], SymSystem]] = {
    "single_node": single_node_system,
    "tower": tower_system,
    "twin": twin_system,
}
