"""Finite heighted orders, cones and the admissibility axioms.

Points are (alpha, beta) pairs: alpha is a width index, beta is the height.
The relation is stored explicitly, reflexive pairs included, so every check is
a direct scan over the stored pairs.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple

from services.errors import IncompleteBarrierMapError, MalformedInputError, NotFoundError
from services.report import Report

logger = logging.getLogger(__name__)


class Point(NamedTuple):
    alpha: int
    beta: int

    @property
    def height(self) -> int:
        return self.beta

    def __str__(self) -> str:
        return f"({self.alpha},{self.beta})"


Pair = FrozenSet[Point]


def pair_key(x: Point, y: Point) -> Pair:
    return frozenset((x, y))


def all_pairs(points: Iterable[Point]) -> FrozenSet[Pair]:
    return frozenset(pair_key(x, y) for x, y in combinations(sorted(points), 2))


def ordered(pair: Pair) -> Tuple[Point, Point]:
    x, y = sorted(pair)
    return x, y


@dataclass(frozen=True)
class Universe:
    width: int
    height: int
    fanout: int = 1

    def __post_init__(self) -> None:
        for name in ("width", "height", "fanout"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise MalformedInputError(f"universe {name} must be a positive integer, got {value!r}")

    def contains(self, point: Point) -> bool:
        return 0 <= point.alpha < self.width and 0 <= point.beta < self.height

    def points(self) -> List[Point]:
        return [Point(a, b) for b in range(self.height) for a in range(self.width)]

    def with_fanout(self, fanout: int) -> "Universe":
        return Universe(self.width, self.height, fanout)


@dataclass(frozen=True)
class HeightedOrder:
    universe: Universe
    domain: FrozenSet[Point]
    rel: FrozenSet[Tuple[Point, Point]]

    def __post_init__(self) -> None:
        for point in self.domain:
            if not self.universe.contains(point):
                raise MalformedInputError(f"point {point} lies outside the universe", witness=(point,))
        for x, y in self.rel:
            if x not in self.domain or y not in self.domain:
                raise MalformedInputError(f"pair {x}<={y} mentions a point outside the domain", witness=(x, y))

    @classmethod
    def build(
        cls,
        universe: Universe,
        points: Iterable[Tuple[int, int]],
        pairs: Iterable[Tuple[Tuple[int, int], Tuple[int, int]]] = (),
        reflexive: bool = True,
    ) -> "HeightedOrder":
        domain = frozenset(Point(*p) for p in points)
        rel = {(Point(*x), Point(*y)) for x, y in pairs}
        if reflexive:
            rel.update((p, p) for p in domain)
        return cls(universe, domain, frozenset(rel))

    @classmethod
    def empty(cls, universe: Universe) -> "HeightedOrder":
        return cls(universe, frozenset(), frozenset())

    @cached_property
    def _down(self) -> Dict[Point, FrozenSet[Point]]:
        index: Dict[Point, set] = {p: set() for p in self.domain}
        for x, y in self.rel:
            index[y].add(x)
        return {p: frozenset(v) for p, v in index.items()}

    @cached_property
    def _up(self) -> Dict[Point, FrozenSet[Point]]:
        index: Dict[Point, set] = {p: set() for p in self.domain}
        for x, y in self.rel:
            index[x].add(y)
        return {p: frozenset(v) for p, v in index.items()}

    def le(self, x: Point, y: Point) -> bool:
        return (x, y) in self.rel

    def lt(self, x: Point, y: Point) -> bool:
        return x != y and (x, y) in self.rel

    def down(self, x: Point) -> FrozenSet[Point]:
        return self._down[x]

    def up(self, x: Point) -> FrozenSet[Point]:
        return self._up[x]

    def strict_down(self, x: Point) -> FrozenSet[Point]:
        return self._down[x] - {x}

    def points(self) -> List[Point]:
        return sorted(self.domain)

    def heights(self) -> FrozenSet[int]:
        return frozenset(p.beta for p in self.domain)

    def strict_pairs(self) -> Iterator[Tuple[Point, Point]]:
        return ((x, y) for x, y in sorted(self.rel) if x != y)

    def restrict(self, points: Iterable[Point]) -> "HeightedOrder":
        keep = frozenset(points) & self.domain
        return HeightedOrder(self.universe, keep, frozenset((x, y) for x, y in self.rel if x in keep and y in keep))

    def __len__(self) -> int:
        return len(self.domain)


@dataclass(frozen=True)
class BarrierMap:
    entries: Mapping[Pair, FrozenSet[Point]]

    @classmethod
    def of(cls, mapping: Mapping[Iterable[Point], Iterable[Point]]) -> "BarrierMap":
        entries: Dict[Pair, FrozenSet[Point]] = {}
        for pair, barrier in mapping.items():
            key = frozenset(Point(*p) for p in pair)
            if len(key) != 2:
                raise MalformedInputError(f"barrier key {sorted(key)} is not a pair of distinct points")
            entries[key] = frozenset(Point(*p) for p in barrier)
        return cls(entries)

    @classmethod
    def empty(cls) -> "BarrierMap":
        return cls({})

    def __hash__(self) -> int:
        return hash(frozenset(self.entries.items()))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, pair: object) -> bool:
        return pair in self.entries

    def get(self, x: Point, y: Point) -> FrozenSet[Point]:
        # b({x,x}) = {x}
        if x == y:
            return frozenset((x,))
        try:
            return self.entries[pair_key(x, y)]
        except KeyError:
            raise NotFoundError(f"no barrier recorded for {{{x}, {y}}}", witness=(x, y)) from None

    def pairs(self) -> FrozenSet[Pair]:
        return frozenset(self.entries)

    def points(self) -> FrozenSet[Point]:
        return frozenset(p for pair in self.entries for p in pair)

    def extended(self, more: Mapping[Pair, FrozenSet[Point]]) -> "BarrierMap":
        merged = dict(self.entries)
        merged.update(more)
        return BarrierMap(merged)

    def restricted(self, points: Iterable[Point]) -> "BarrierMap":
        keep = frozenset(points)
        return BarrierMap({k: v for k, v in self.entries.items() if k <= keep})

    def extends(self, other: "BarrierMap") -> bool:
        return all(self.entries.get(k) == v for k, v in other.entries.items())


def _require(ord: HeightedOrder, *points: Point) -> None:
    for point in points:
        if point not in ord.domain:
            raise NotFoundError(f"point {point} is not in the domain", witness=(point,))


def check_partial_order(ord: HeightedOrder) -> Report:
    points = ord.points()
    for x in points:
        if not ord.le(x, x):
            return Report.violation("reflexivity", (x,), f"{x} is not related to itself")
    for x, y in combinations(points, 2):
        if ord.le(x, y) and ord.le(y, x):
            return Report.violation("antisymmetry", (x, y), f"{x} and {y} are mutually related")
    for x, y in sorted(ord.rel):
        for z in sorted(ord.up(y)):
            if not ord.le(x, z):
                return Report.violation("transitivity", (x, y, z), f"{x}<={y}<={z} but not {x}<={z}")
    return Report.passed()


def check_condition_A(ord: HeightedOrder) -> Report:
    for x, y in ord.strict_pairs():
        if x.beta >= y.beta:
            return Report.violation("A", (x, y), f"{x} is strictly below {y} without lower height")
    return Report.passed()


def check_condition_B(ord: HeightedOrder, fanout: Optional[int] = None) -> Report:
    m = ord.universe.fanout if fanout is None else fanout
    occupied = ord.heights()
    top = max((p.beta for p in ord.domain), default=0)
    notes = tuple(f"level {level} holds no domain point" for level in range(top) if level not in occupied)
    for y in ord.points():
        below = ord.down(y)
        for level in range(y.beta):
            count = sum(1 for z in below if z.beta == level)
            if count < m:
                return Report.violation(
                    "B", (y, level), f"{y} has {count} points at level {level} below it, needs {m}", context=notes
                )
    return Report.passed(notes)


def down_set(ord: HeightedOrder, x: Point) -> FrozenSet[Point]:
    _require(ord, x)
    return ord.down(x)


def common_lower_cone(ord: HeightedOrder, x: Point, y: Point) -> FrozenSet[Point]:
    _require(ord, x, y)
    return ord.down(x) & ord.down(y)


def maximal_elements(ord: HeightedOrder, subset: Iterable[Point]) -> FrozenSet[Point]:
    pool = frozenset(subset)
    return frozenset(p for p in pool if not any(ord.lt(p, q) for q in pool))


def is_barrier(ord: HeightedOrder, x: Point, y: Point, candidate: Iterable[Point]) -> Report:
    if x == y:
        raise MalformedInputError(f"a barrier needs two distinct points, got {x} twice", witness=(x,))
    cone = common_lower_cone(ord, x, y)
    chosen = sorted(frozenset(candidate))
    for c in chosen:
        if c not in cone:
            return Report.violation("C.1", (c,), f"{c} is not below both {x} and {y}", context=(x, y))
    for t in sorted(cone):
        if not any(ord.le(t, c) for c in chosen):
            return Report.violation("C.2", (t,), f"{t} is below {x} and {y} but under no barrier point", context=(x, y))
    return Report.passed()


def minimal_barrier(ord: HeightedOrder, x: Point, y: Point) -> FrozenSet[Point]:
    return maximal_elements(ord, common_lower_cone(ord, x, y))


def canonical_barriers(ord: HeightedOrder) -> BarrierMap:
    return BarrierMap({pair: minimal_barrier(ord, *ordered(pair)) for pair in all_pairs(ord.domain)})


def check_barrier_map(ord: HeightedOrder, bmap: BarrierMap) -> Report:
    expected = all_pairs(ord.domain)
    missing = expected - bmap.pairs()
    extra = bmap.pairs() - expected
    if missing or extra:
        witness = sorted(missing or extra, key=sorted)[0]
        raise IncompleteBarrierMapError(
            f"barrier map covers {len(bmap)} pairs, the domain has {len(expected)}",
            witness=tuple(sorted(witness)),
        )
    for pair in sorted(expected, key=sorted):
        x, y = ordered(pair)
        report = is_barrier(ord, x, y, bmap.get(x, y))
        if not report:
            return report
    return Report.passed()


def check_admissible(
    ord: HeightedOrder,
    bmap: BarrierMap,
    fanout: Optional[int] = None,
    require_fanout: bool = True,
) -> Report:
    checks = [check_partial_order(ord), check_condition_A(ord)]
    for report in checks:
        if not report:
            return report
    notes: Tuple[str, ...] = ()
    if require_fanout:
        report_b = check_condition_B(ord, fanout)
        if not report_b:
            return report_b
        notes = report_b.notes
    report_c = check_barrier_map(ord, bmap)
    if not report_c:
        return report_c
    logger.debug("admissible: %s points, %s barrier entries", len(ord), len(bmap))
    return Report.passed(notes)


def covering_pairs(ord: HeightedOrder) -> FrozenSet[Tuple[Point, Point]]:
    """Hasse edges: strict pairs with nothing strictly between them."""
    edges = set()
    for x, y in ord.strict_pairs():
        if not any(ord.lt(x, z) and ord.lt(z, y) for z in ord.domain):
            edges.add((x, y))
    return frozenset(edges)
