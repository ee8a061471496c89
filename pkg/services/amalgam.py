"""Amalgamation of two isomorphic heighted orders and of their barrier maps.

Given orders on P1 and P2 and an isomorphism psi: P1 -> P2 fixing P1 & P2, the
amalgam is the unique order on P1 | P2 that restricts to both inputs, puts x
below y (x only in P1, y only in P2) when psi(x) is below y, and puts y below x
when some shared point sits between them.
"""
import logging
from dataclasses import dataclass
from typing import (
    Dict,
    FrozenSet,
    Generic,
    Hashable,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Protocol,
    Set,
    Tuple,
    TypeVar,
)

from services.errors import InvalidAmalgamationError, InvalidIsoError, InvalidPairError, MalformedInputError
from services.order import (
    BarrierMap,
    HeightedOrder,
    Pair,
    Point,
    all_pairs,
    is_barrier,
    maximal_elements,
    ordered,
    pair_key,
)
from services.report import Report

logger = logging.getLogger(__name__)

K = TypeVar("K", bound=Hashable)


@dataclass(frozen=True)
class OrderIso(Generic[K]):
    """A finite bijection, used both for points and for ordinals."""

    mapping: Mapping[K, K]

    def __post_init__(self) -> None:
        if len(set(self.mapping.values())) != len(self.mapping):
            raise InvalidIsoError("map is not injective")

    @classmethod
    def identity(cls, keys: Iterable[K]) -> "OrderIso[K]":
        return cls({k: k for k in keys})

    def __hash__(self) -> int:
        return hash(frozenset(self.mapping.items()))

    def __call__(self, key: K) -> K:
        try:
            return self.mapping[key]
        except KeyError:
            raise InvalidIsoError(f"{key} is outside the domain of the map", witness=(key,)) from None

    def __len__(self) -> int:
        return len(self.mapping)

    def domain(self) -> FrozenSet[K]:
        return frozenset(self.mapping)

    def image(self) -> FrozenSet[K]:
        return frozenset(self.mapping.values())

    def apply(self, keys: Iterable[K]) -> FrozenSet[K]:
        return frozenset(self(k) for k in keys)

    def inverse(self) -> "OrderIso[K]":
        return OrderIso({v: k for k, v in self.mapping.items()})

    def compose(self, other: "OrderIso[K]") -> "OrderIso[K]":
        """self after other."""
        return OrderIso({k: self(v) for k, v in other.mapping.items()})

    def restrict(self, keys: Iterable[K]) -> "OrderIso[K]":
        keep = frozenset(keys)
        return OrderIso({k: v for k, v in self.mapping.items() if k in keep})

    def fixes(self, keys: Iterable[K]) -> bool:
        return all(self.mapping.get(k) == k for k in keys)

    def moved(self) -> FrozenSet[K]:
        return frozenset(k for k, v in self.mapping.items() if k != v)


class BarrierOrder(Protocol):
    order: HeightedOrder
    barriers: BarrierMap


class Structure(NamedTuple):
    order: HeightedOrder
    barriers: BarrierMap


@dataclass(frozen=True)
class CanonicalSequences:
    left_pairs: Tuple[Tuple[Point, Point], ...]
    right_pairs: Tuple[Tuple[Point, Point], ...]
    # right leaves as reached by the recursion, before re-anchoring at y
    anchored: Tuple[Tuple[Point, Point], ...] = ()


def _iso_violation(ord1: HeightedOrder, ord2: HeightedOrder, psi: OrderIso[Point]) -> Optional[Report]:
    if psi.domain() != ord1.domain:
        missing = sorted(ord1.domain ^ psi.domain())
        return Report.violation("iso", tuple(missing[:1]), "map domain differs from the first order's domain")
    if psi.image() != ord2.domain:
        missing = sorted(ord2.domain ^ psi.image())
        return Report.violation("iso", tuple(missing[:1]), "map image differs from the second order's domain")
    points = ord1.points()
    for x in points:
        for y in points:
            if ord1.le(x, y) != ord2.le(psi(x), psi(y)):
                return Report.violation("iso", (x, y), f"map does not preserve the relation between {x} and {y}")
    return None


def _fix_violation(ord1: HeightedOrder, ord2: HeightedOrder, psi: OrderIso[Point]) -> Optional[Report]:
    for p in sorted(ord1.domain & ord2.domain):
        if psi(p) != p:
            return Report.violation("fix", (p,), f"shared point {p} is moved to {psi(p)}")
    return None


def _require_iso(ord1: HeightedOrder, ord2: HeightedOrder, psi: OrderIso[Point]) -> None:
    if ord1.universe != ord2.universe:
        raise MalformedInputError("orders live in different universes")
    report = _iso_violation(ord1, ord2, psi) or _fix_violation(ord1, ord2, psi)
    if report is not None:
        raise InvalidIsoError(report.message, witness=report.witness)


def _expected(ord1: HeightedOrder, ord2: HeightedOrder, psi: OrderIso[Point], x: Point, y: Point) -> Tuple[str, bool]:
    dom1, dom2 = ord1.domain, ord2.domain
    if x in dom1 and y in dom1:
        return "i", ord1.le(x, y)
    if x in dom2 and y in dom2:
        return "ii", ord2.le(x, y)
    if x in dom1:
        return "iii", ord2.le(psi(x), y)
    shared = dom1 & dom2
    return "iv", any(ord2.le(x, w) and ord1.le(w, y) for w in shared)


def psi_amalgamate(ord1: HeightedOrder, ord2: HeightedOrder, psi: OrderIso[Point]) -> HeightedOrder:
    _require_iso(ord1, ord2, psi)
    shared = ord1.domain & ord2.domain
    only1 = ord1.domain - shared
    only2 = ord2.domain - shared
    rel = set(ord1.rel) | set(ord2.rel)
    rel.update((x, y) for x in only1 for y in ord2.up(psi(x)) if y in only2)
    for w in shared:
        rel.update((x, y) for x in ord2.down(w) if x in only2 for y in ord1.up(w) if y in only1)
    merged = HeightedOrder(ord1.universe, ord1.domain | ord2.domain, frozenset(rel))
    logger.debug("amalgam of %s and %s points has %s pairs", len(ord1), len(ord2), len(rel))
    return merged


def verify_amalgam_unique(
    ord1: HeightedOrder,
    ord2: HeightedOrder,
    psi: OrderIso[Point],
    candidate: HeightedOrder,
) -> Report:
    union = ord1.domain | ord2.domain
    if candidate.domain != union:
        stray = sorted(candidate.domain ^ union)
        return Report.violation("domain", (stray[0],), "candidate domain is not the union of both domains")
    points = sorted(union)
    for x in points:
        for y in points:
            clause, wanted = _expected(ord1, ord2, psi, x, y)
            if candidate.le(x, y) != wanted:
                verb = "misses" if wanted else "adds"
                return Report.violation(clause, (x, y), f"candidate {verb} {x}<={y}")
    return Report.passed()


def is_progressive(
    ord1: HeightedOrder,
    bmap1: BarrierMap,
    ord2: HeightedOrder,
    bmap2: BarrierMap,
    psi: OrderIso[Point],
) -> Report:
    report = _iso_violation(ord1, ord2, psi)
    if report is not None:
        return report
    for pair in sorted(all_pairs(ord1.domain), key=sorted):
        x, y = ordered(pair)
        image = psi.apply(bmap1.get(x, y))
        if image != bmap2.get(psi(x), psi(y)):
            return Report.violation("iso", (x, y), f"barrier of {{{x}, {y}}} is not carried onto its image")
    heights2 = ord2.heights()
    for p in ord1.points():
        q = psi(p)
        if q.alpha != p.alpha or q.beta < p.beta:
            return Report.violation("oplus", (p,), f"{p} is sent to {q}")
        if p.beta in heights2 and q != p:
            return Report.violation("ominus", (p,), f"height {p.beta} occurs in the second order but {p} moves")
    shared = ord1.domain & ord2.domain
    for pair in sorted(all_pairs(shared), key=sorted):
        u, v = ordered(pair)
        if bmap1.get(u, v) != bmap2.get(u, v):
            return Report.violation("otimes", (u, v), f"shared pair {{{u}, {v}}} has different barriers")
    return _fix_violation(ord1, ord2, psi) or Report.passed()


Leaf = Tuple[str, Point, Point]


class _Unfolding:
    """Memoised unfolding of the barrier recursion for cross pairs.

    A cross pair is {x, y} with x only in the first domain and y only in the
    second. Its leaves are pairs inside one domain: "left" leaves (x', v) with
    v shared, read from the first map, and "right" leaves (u, y') with u shared,
    read from the second. When x turns up in its own barrier it stands for
    itself as the leaf (x, x); when y does, it is replaced by the leaves
    (w, y) for the maximal shared points w below x.
    """

    def __init__(self, first: BarrierOrder, second: BarrierOrder, psi: OrderIso[Point]) -> None:
        self.first = first
        self.second = second
        self.psi = psi
        self.inverse = psi.inverse()
        self.only1 = first.order.domain - second.order.domain
        self.only2 = second.order.domain - first.order.domain
        self.shared = first.order.domain & second.order.domain
        self.merged = psi_amalgamate(first.order, second.order, psi)
        self._memo: Dict[Pair, FrozenSet[Leaf]] = {}
        self._active: Set[Pair] = set()

    def orient(self, x: Point, y: Point) -> Optional[Tuple[Point, Point]]:
        if x in self.only1 and y in self.only2:
            return x, y
        if y in self.only1 and x in self.only2:
            return y, x
        return None

    def leaves(self, x: Point, y: Point) -> FrozenSet[Leaf]:
        key = pair_key(x, y)
        if key in self._memo:
            return self._memo[key]
        if y == self.psi(x):
            result = frozenset({("left", x, x)})
        else:
            self._active.add(key)
            found: Set[Leaf] = set()
            for v in sorted(self.second.barriers.get(self.psi(x), y)):
                found |= self._through_shared(x, y) if v == y else self._branch(x, v)
            for u in sorted(self.first.barriers.get(x, self.inverse(y))):
                found |= frozenset({("left", x, x)}) if u == x else self._branch(u, y)
            self._active.discard(key)
            result = frozenset(found)
        self._memo[key] = result
        return result

    def _branch(self, p: Point, q: Point) -> FrozenSet[Leaf]:
        if q not in self.only2:
            return frozenset({("left", p, q)})
        if p not in self.only1:
            return frozenset({("right", p, q)})
        if pair_key(p, q) in self._active:
            logger.debug("barrier recursion refers back to {%s, %s}; contributes nothing", p, q)
            return frozenset()
        return self.leaves(p, q)

    def _through_shared(self, x: Point, y: Point) -> FrozenSet[Leaf]:
        # y sits in its own barrier: what lies under y and under x passes through a shared point below x
        found: Set[Leaf] = set()
        for w in sorted(maximal_elements(self.first.order, self.shared & self.first.order.down(x))):
            found |= self._branch(w, y)
        return frozenset(found)

    def small_barrier(self, x: Point, y: Point) -> FrozenSet[Point]:
        result: Set[Point] = set()
        for side, p, q in self.leaves(x, y):
            source = self.first if side == "left" else self.second
            result |= source.barriers.get(p, q)
        return frozenset(result)

    def large_barrier(self, x: Point, y: Point) -> FrozenSet[Point]:
        result: Set[Point] = set()
        for side, p, q in self.leaves(x, y):
            if side == "left":
                result |= self.first.barriers.get(p, q)
            else:
                result |= self.second.barriers.get(p, y)
        return frozenset(result)


def _unfolding(first: BarrierOrder, second: BarrierOrder, psi: OrderIso[Point]) -> _Unfolding:
    report = is_progressive(first.order, first.barriers, second.order, second.barriers, psi)
    if not report:
        raise InvalidIsoError(f"map is not progressive: {report.message}", witness=report.witness)
    if first.order.universe != second.order.universe:
        raise MalformedInputError("orders live in different universes")
    return _Unfolding(first, second, psi)


def _combine(first: BarrierOrder, second: BarrierOrder, unfolding: _Unfolding, large: bool) -> BarrierMap:
    entries: Dict[Pair, FrozenSet[Point]] = {}
    dom1, dom2 = first.order.domain, second.order.domain
    for pair in all_pairs(dom1 | dom2):
        x, y = ordered(pair)
        if pair <= dom1:
            entries[pair] = first.barriers.get(x, y)
        elif pair <= dom2:
            entries[pair] = second.barriers.get(x, y)
        else:
            x, y = unfolding.orient(x, y)
            entry = unfolding.large_barrier(x, y) if large else unfolding.small_barrier(x, y)
            report = is_barrier(unfolding.merged, x, y, entry)
            if not report:
                raise InvalidAmalgamationError(
                    f"amalgamated barrier of {{{x}, {y}}} fails: {report.message}", witness=(x, y) + report.witness
                )
            entries[pair] = entry
    return BarrierMap(entries)


def amalgamate_b3(first: BarrierOrder, second: BarrierOrder, psi: OrderIso[Point]) -> BarrierMap:
    unfolding = _unfolding(first, second, psi)
    return _combine(first, second, unfolding, large=False)


def amalgamate_B3(first: BarrierOrder, second: BarrierOrder, psi: OrderIso[Point]) -> BarrierMap:
    unfolding = _unfolding(first, second, psi)
    return _combine(first, second, unfolding, large=True)


def canonical_sequences(
    first: BarrierOrder,
    second: BarrierOrder,
    psi: OrderIso[Point],
    x: Point,
    y: Point,
) -> CanonicalSequences:
    unfolding = _unfolding(first, second, psi)
    if x not in unfolding.only1 or y not in unfolding.only2 or y == psi(x):
        raise InvalidPairError(
            f"{x} must lie only in the first domain and {y} only in the second, with {y} != psi({x})",
            witness=(x, y),
        )
    leaves = unfolding.leaves(x, y)
    left: List[Tuple[Point, Point]] = sorted((p, q) for side, p, q in leaves if side == "left")
    anchored = sorted((p, q) for side, p, q in leaves if side == "right")
    right = sorted({(p, y) for p, _ in anchored})
    return CanonicalSequences(tuple(left), tuple(right), tuple(anchored))
