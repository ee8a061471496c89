"""The topology generated by the cones C(x) and their complements.

A finite Hausdorff space is discrete, so the literal topology is the power set.
Cantor-Bendixson levels are computed with the fan-out threshold standing in
for "finite": a neighbourhood C(x) minus some cones may only cut away the cones
of fewer than `fanout` barrier points.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from services.errors import CapacityError, InvalidBasicSetError, InvalidPairError, MalformedInputError
from services.order import BarrierMap, HeightedOrder, Point, down_set, minimal_barrier
from services.report import Report

DEFAULT_TOPOLOGY_CAP = 16


@dataclass(frozen=True)
class SpaceAnalysis:
    levels: Tuple[FrozenSet[Point], ...]
    ranks: Mapping[Point, int]
    residue: FrozenSet[Point]

    @property
    def scattered(self) -> bool:
        return not self.residue

    def __hash__(self) -> int:
        return hash((self.levels, self.residue))


@dataclass(frozen=True)
class CardinalSequence:
    sizes: Tuple[int, ...]
    total: bool


@dataclass(frozen=True)
class Separation:
    pair: Tuple[Point, Point]
    witness: FrozenSet[Point]
    kind: str  # "cone" or "complement"
    anchor: Point


@dataclass(frozen=True)
class CoverReduction:
    cover: FrozenSet[Point]
    basic_set: FrozenSet[Point]
    report: Report


def generate_topology(ord: HeightedOrder, cap: int = DEFAULT_TOPOLOGY_CAP) -> FrozenSet[FrozenSet[Point]]:
    points = ord.points()
    if len(points) > cap:
        raise CapacityError(
            f"{len(points)} points exceed the topology cap of {cap}; use cb_derive instead",
        )
    index = {p: i for i, p in enumerate(points)}
    full = (1 << len(points)) - 1
    cone = {p: sum(1 << index[q] for q in ord.down(p)) for p in points}
    # smallest subbasic intersection around each point
    neighbourhood: List[int] = []
    for x in points:
        mask = full
        bit = 1 << index[x]
        for p in points:
            mask &= cone[p] if cone[p] & bit else full & ~cone[p]
        neighbourhood.append(mask)
    opens = set()
    for candidate in range(full + 1):
        if all(neighbourhood[i] & ~candidate == 0 for i in range(len(points)) if candidate >> i & 1):
            opens.add(frozenset(p for p in points if candidate >> index[p] & 1))
    logging.getLogger(__name__).debug("topology on %s points has %s open sets", len(points), len(opens))
    return frozenset(opens)


def _isolated(ord: HeightedOrder, x: Point, subspace: FrozenSet[Point], fanout: int) -> bool:
    lower = ord.strict_down(x) & subspace
    if not lower:
        return True
    candidates = [w for w in ord.points() if ord.lt(w, x) and ord.down(w) & lower]
    for size in range(1, fanout):
        for chosen in combinations(candidates, size):
            covered = frozenset().union(*(ord.down(w) for w in chosen))
            if lower <= covered:
                return True
    return False


def isolated_by_enumeration(ord: HeightedOrder, x: Point, subspace: Iterable[Point], fanout: int) -> bool:
    """Exhaustive oracle: try every family of removable cones around x."""
    space = frozenset(subspace)
    removable = [z for z in ord.points() if not ord.le(x, z)]
    own = ord.down(x)
    for size in range(len(removable) + 1):
        for chosen in combinations(removable, size):
            removed = frozenset().union(*(ord.down(z) for z in chosen))
            cost = frozenset().union(*(minimal_barrier(ord, x, z) for z in chosen))
            if len(cost) < fanout and (own - removed) & space == {x}:
                return True
    return False


def cb_derive(
    ord: HeightedOrder,
    cross_check: bool = False,
    cap: int = DEFAULT_TOPOLOGY_CAP,
) -> SpaceAnalysis:
    fanout = ord.universe.fanout
    remaining = frozenset(ord.domain)
    levels: List[FrozenSet[Point]] = []
    ranks: Dict[Point, int] = {}
    check = cross_check and len(ord) <= cap
    while remaining:
        isolated = frozenset(x for x in remaining if _isolated(ord, x, remaining, fanout))
        if check:
            expected = frozenset(x for x in remaining if isolated_by_enumeration(ord, x, remaining, fanout))
            if expected != isolated:
                raise RuntimeError(
                    f"isolation mismatch at stage {len(levels)}: fast={sorted(isolated)} oracle={sorted(expected)}"
                )
        if not isolated:
            break
        for x in isolated:
            ranks[x] = len(levels)
        levels.append(isolated)
        remaining = remaining - isolated
    if remaining:
        logging.getLogger(__name__).warning("derivation stopped with %s points left", len(remaining))
    return SpaceAnalysis(tuple(levels), ranks, remaining)


def cardinal_sequence(ord: HeightedOrder) -> CardinalSequence:
    analysis = cb_derive(ord)
    return CardinalSequence(tuple(len(level) for level in analysis.levels), analysis.scattered)


def verify_levels(ord: HeightedOrder, analysis: Optional[SpaceAnalysis] = None) -> Report:
    analysis = analysis or cb_derive(ord)
    for x in ord.points():
        rank = analysis.ranks.get(x)
        if rank != x.beta:
            return Report.violation("levels", (x,), f"{x} has rank {rank} but height {x.beta}")
    return Report.passed()


def separate(ord: HeightedOrder, x: Point, y: Point) -> Separation:
    if x == y:
        raise InvalidPairError(f"cannot separate {x} from itself", witness=(x,))
    down_set(ord, x)
    if ord.le(x, y):
        separation = Separation((x, y), ord.down(x), "cone", x)
    else:
        separation = Separation((x, y), ord.domain - down_set(ord, y), "complement", y)
    if x not in separation.witness or y in separation.witness:
        raise MalformedInputError(f"{x} and {y} cannot be separated; the order is not antisymmetric", witness=(x, y))
    return separation


def basic_set(ord: HeightedOrder, positives: Iterable[Point], negatives: Iterable[Point]) -> FrozenSet[Point]:
    result = frozenset(ord.domain)
    for p in positives:
        result &= down_set(ord, p)
    for n in negatives:
        result -= down_set(ord, n)
    return result


def cover_reduction(
    ord: HeightedOrder,
    bmap: BarrierMap,
    x: Point,
    positives: Iterable[Point],
    negatives: Iterable[Point],
) -> CoverReduction:
    negatives = sorted(frozenset(negatives))
    basic = basic_set(ord, positives, negatives)
    if x not in basic:
        raise InvalidBasicSetError(f"{x} is not in the basic set", witness=(x,))
    cover = frozenset().union(*(bmap.get(x, n) for n in negatives))
    for w in sorted(cover):
        if not ord.lt(w, x):
            return CoverReduction(cover, basic, Report.violation("C.1", (w,), f"{w} is not strictly below {x}"))
        if w.beta >= x.beta:
            return CoverReduction(cover, basic, Report.violation("A", (w,), f"{w} is not lower than {x}"))
    reach = frozenset().union(*(ord.down(w) for w in cover))
    for t in sorted(ord.down(x) - basic):
        if t not in reach:
            return CoverReduction(cover, basic, Report.violation("C.2", (t,), f"{t} escapes the barrier cones"))
    return CoverReduction(cover, basic, Report.passed())
