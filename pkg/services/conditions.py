"""Forcing conditions: an order, its barriers, a symmetric system and marked nodes.

Every node of the system carries a point view, the set of points it "sees".
A marked node must contain the barrier of every pair of points it sees.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from services.amalgam import OrderIso, Structure, amalgamate_B3, amalgamate_b3, psi_amalgamate
from services.errors import (
    AmalgamationIncompatibleError,
    IncompleteBarrierMapError,
    InvalidChainError,
    InvalidInputError,
    InvalidPointError,
    MalformedInputError,
)
from services.order import (
    BarrierMap,
    HeightedOrder,
    Pair,
    Point,
    Universe,
    all_pairs,
    check_barrier_map,
    check_condition_A,
    check_partial_order,
    is_barrier,
    minimal_barrier,
    ordered,
    pair_key,
)
from services.report import Report
from services.symsys import SymSystem, amalgamate_into, check_system, copies_into, restrict, union_isomorphic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Condition:
    order: HeightedOrder
    barriers: BarrierMap
    system: SymSystem = field(default_factory=lambda: SymSystem(0))
    marked: FrozenSet[int] = frozenset()
    point_views: Mapping[int, FrozenSet[Point]] = field(default_factory=dict)

    @classmethod
    def bare(cls, order: HeightedOrder, barriers: BarrierMap) -> "Condition":
        return cls(order, barriers)

    @classmethod
    def empty(cls, universe: Universe) -> "Condition":
        return cls(HeightedOrder.empty(universe), BarrierMap.empty())

    def __hash__(self) -> int:
        return hash((self.order, self.barriers, self.system, self.marked, frozenset(self.point_views.items())))

    def view(self, code: int) -> FrozenSet[Point]:
        return self.point_views.get(code, frozenset())

    def replace(self, **changes) -> "Condition":
        fields = {
            "order": self.order,
            "barriers": self.barriers,
            "system": self.system,
            "marked": self.marked,
            "point_views": self.point_views,
        }
        fields.update(changes)
        return Condition(**fields)


def _as_clause(clause: str, report: Report) -> Report:
    return Report.violation(clause, report.witness, report.message, context=(report.clause,) + report.context)


def validate(q: Condition) -> Report:
    codes = q.system.codes()
    for code, view in q.point_views.items():
        if code not in codes:
            raise MalformedInputError(f"point view given for unknown node {code}", witness=(code,))
        for point in view:
            if not q.order.universe.contains(point):
                raise MalformedInputError(f"node {code} sees {point} outside the universe", witness=(code, point))
    for report in (check_partial_order(q.order), check_condition_A(q.order)):
        if not report:
            return _as_clause("1", report)
    try:
        report = check_barrier_map(q.order, q.barriers)
    except IncompleteBarrierMapError as error:
        return Report.violation("2", error.witness, str(error))
    if not report:
        return _as_clause("2", report)
    report = check_system(q.system)
    if not report:
        return _as_clause("3", report)
    unknown = sorted(q.marked - codes)
    if unknown:
        return Report.violation("4", (unknown[0],), f"marked node {unknown[0]} is not in the system")
    for code in sorted(q.marked):
        seen = q.view(code) & q.order.domain
        for pair in sorted(all_pairs(seen), key=sorted):
            x, y = ordered(pair)
            escaped = q.barriers.get(x, y) - seen
            if escaped:
                return Report.violation(
                    "5", (code, x, y), f"barrier of {{{x}, {y}}} leaves node {code} at {min(escaped)}"
                )
    return Report.passed()


def extends(q: Condition, p: Condition) -> bool:
    if not (p.order.domain <= q.order.domain and p.order.rel <= q.order.rel):
        return False
    if not q.barriers.extends(p.barriers):
        return False
    if not frozenset(p.system.nodes) <= frozenset(q.system.nodes) or not p.marked <= q.marked:
        return False
    return all(q.view(code) == p.view(code) for code in p.system.codes())


def chain_union(chain: Sequence[Condition]) -> Condition:
    if not chain:
        raise InvalidChainError("cannot take the union of an empty chain")
    for index, (before, after) in enumerate(zip(chain, chain[1:]), start=1):
        if not extends(after, before):
            raise InvalidChainError(f"link {index} does not extend link {index - 1}", witness=(index,))
    first = chain[0]
    domain = frozenset().union(*(q.order.domain for q in chain))
    rel = frozenset().union(*(q.order.rel for q in chain))
    entries: Dict[Pair, FrozenSet[Point]] = {}
    nodes = set()
    marked: FrozenSet[int] = frozenset()
    views: Dict[int, FrozenSet[Point]] = {}
    for q in chain:
        entries.update(q.barriers.entries)
        nodes.update(q.system.nodes)
        marked |= q.marked
        views.update(q.point_views)
    return Condition(
        HeightedOrder(first.order.universe, domain, rel),
        BarrierMap(entries),
        first.system.with_nodes(nodes),
        marked,
        views,
    )


def _fresh(q: Condition, point: Point) -> None:
    if not q.order.universe.contains(point):
        raise InvalidPointError(f"{point} lies outside the universe", witness=(point,))
    if point in q.order.domain:
        raise InvalidPointError(f"{point} is already in the order", witness=(point,))


def add_point(q: Condition, new: Point, top: Point) -> Condition:
    """Put a fresh point below `top` and below everything above `top`."""
    _fresh(q, new)
    if top not in q.order.domain:
        raise InvalidPointError(f"{top} is not in the order", witness=(top,))
    if new.beta >= top.beta:
        raise InvalidPointError(f"{new} is not lower than {top}", witness=(new, top))
    above = q.order.up(top)
    rel = set(q.order.rel)
    rel.add((new, new))
    rel.update((new, z) for z in above)
    order = HeightedOrder(q.order.universe, q.order.domain | {new}, frozenset(rel))
    fresh = {pair_key(new, z): (frozenset((new,)) if z in above else frozenset()) for z in q.order.domain}
    logger.debug("added %s below %s", new, top)
    return q.replace(order=order, barriers=q.barriers.extended(fresh))


def add_point_above(q: Condition, new: Point, support: Iterable[Point]) -> Condition:
    """Put a fresh point above every point of `support`.

    The new pairs get their minimal barriers; a marked node that already sees
    the new point must contain them, otherwise the point is refused.
    """
    _fresh(q, new)
    support = frozenset(support)
    for s in sorted(support):
        if s not in q.order.domain:
            raise InvalidPointError(f"{s} is not in the order", witness=(s,))
        if s.beta >= new.beta:
            raise InvalidPointError(f"{s} is not lower than {new}", witness=(s, new))
    below = frozenset().union(*(q.order.down(s) for s in support))
    rel = set(q.order.rel)
    rel.add((new, new))
    rel.update((w, new) for w in below)
    order = HeightedOrder(q.order.universe, q.order.domain | {new}, frozenset(rel))
    fresh = {pair_key(new, z): minimal_barrier(order, new, z) for z in q.order.domain}
    revised = q.replace(order=order, barriers=q.barriers.extended(fresh))
    report = validate(revised)
    if not report:
        raise InvalidPointError(f"point {new} rolled back: {report.message}", witness=report.witness)
    logger.debug("added %s above %s points", new, len(support))
    return revised


def insert_relation(q: Condition, x: Point, y: Point) -> Condition:
    """Relate two existing points, repairing the barriers the new pairs invalidate.

    The entry of {x, y} always changes, so the result revises q rather than
    extending it; callers that need an extension must check `extends`.
    """
    for point in (x, y):
        if point not in q.order.domain:
            raise InvalidPointError(f"{point} is not in the order", witness=(point,))
    if q.order.le(x, y):
        return q
    if x.beta >= y.beta:
        raise InvalidPointError(f"{x} is not lower than {y}", witness=(x, y))
    if not q.order.strict_down(x) <= q.order.down(y):
        raise InvalidPointError(f"points below {x} are not all below {y}", witness=(x, y))
    rel = set(q.order.rel)
    rel.update((a, c) for a in q.order.down(x) for c in q.order.up(y))
    order = HeightedOrder(q.order.universe, q.order.domain, frozenset(rel))
    repaired: Dict[Pair, FrozenSet[Point]] = {}
    for c in q.order.up(y):
        for z in q.order.domain - {c}:
            current = q.barriers.get(c, z)
            if not is_barrier(order, c, z, current):
                repaired[pair_key(c, z)] = minimal_barrier(order, c, z)
    revised = q.replace(order=order, barriers=q.barriers.extended(repaired))
    report = validate(revised)
    if not report:
        raise InvalidPointError(f"relation {x}<={y} rolled back: {report.message}", witness=report.witness)
    logger.debug("related %s below %s, repaired %s barriers", x, y, len(repaired))
    return revised


def restrict_condition(q: Condition, code: int) -> Condition:
    node = q.system.node(code)
    seen = q.view(code) & q.order.domain
    system = restrict(q.system, node)
    kept = system.codes()
    return Condition(
        q.order.restrict(seen),
        q.barriers.restricted(seen),
        system,
        q.marked & kept,
        {c: v for c, v in q.point_views.items() if c in kept},
    )


def _merge_views(views: Dict[int, FrozenSet[Point]], more: Mapping[int, FrozenSet[Point]]) -> Optional[Report]:
    for code, view in sorted(more.items()):
        if code in views and views[code] != view:
            return Report.violation("views", (code,), f"node {code} is seen differently by the two conditions")
        views[code] = view
    return None


def amalgamate_conditions(
    q1: Condition,
    q2: Condition,
    psi: OrderIso[Point],
    mode: str = "union",
    system_iso: Optional[OrderIso[int]] = None,
    node: Optional[int] = None,
    barrier: str = "B3",
) -> Condition:
    if barrier not in ("B3", "b3"):
        raise InvalidInputError(f"unknown barrier amalgamation {barrier!r}")
    stages: List[Tuple[str, Report]] = []
    order = psi_amalgamate(q1.order, q2.order, psi)
    combine = amalgamate_B3 if barrier == "B3" else amalgamate_b3
    barriers = combine(Structure(q1.order, q1.barriers), Structure(q2.order, q2.barriers), psi)
    staged = Condition(order, barriers)
    stages.append(("order+barriers", validate(staged)))

    views: Dict[int, FrozenSet[Point]] = {}
    if mode == "union":
        iso = system_iso or OrderIso.identity(q1.system.carrier())
        system = union_isomorphic(q1.system, q2.system, iso)
        clash = _merge_views(views, q1.point_views) or _merge_views(views, q2.point_views)
    elif mode == "into":
        if node is None:
            raise InvalidInputError("amalgamating into a node needs the node code")
        anchor = q2.system.node(node)
        system = amalgamate_into(q2.system, anchor, q1.system)
        sources = copies_into(q2.system, anchor, q1.system)
        copied = {image.code: q1.view(source.code) for image, source in sources.items() if source.code in q1.point_views}
        clash = _merge_views(views, q2.point_views) or _merge_views(views, copied)
    else:
        raise InvalidInputError(f"unknown system mode {mode!r}")
    if clash is not None:
        stages.append(("views", clash))
        raise AmalgamationIncompatibleError(clash.message, clash, stages)
    staged = staged.replace(system=system, point_views=views)
    stages.append(("system", validate(staged)))

    result = staged.replace(marked=q1.marked | q2.marked)
    report = validate(result)
    stages.append(("marked", report))
    for name, outcome in stages:
        logger.info("amalgamation stage %s: %s", name, "ok" if outcome else outcome.clause)
    if not report:
        raise AmalgamationIncompatibleError(f"amalgam fails clause {report.clause}: {report.message}", report, stages)
    for label, source in (("first", q1), ("second", q2)):
        if not extends(result, source):
            failure = Report.violation("extends", (label,), f"amalgam does not extend the {label} condition")
            raise AmalgamationIncompatibleError(failure.message, failure, stages)
    return result
