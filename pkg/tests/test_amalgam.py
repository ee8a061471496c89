import pytest
from hypothesis import given

from data.fixtures import A, X, X1, X2, Y, Y1, Y2, am1, am2
from services import amalgam
from services.amalgam import (
    OrderIso,
    Structure,
    amalgamate_B3,
    amalgamate_b3,
    canonical_sequences,
    is_progressive,
    psi_amalgamate,
    verify_amalgam_unique,
)
from services.errors import InvalidAmalgamationError, InvalidIsoError, InvalidPairError
from services.order import (
    HeightedOrder,
    Point,
    Universe,
    canonical_barriers,
    check_admissible,
    check_barrier_map,
    check_partial_order,
)
from tests.strategies import examples, progressive_pairs


def _transitive_union(first, second):
    rel = set(first.rel) | set(second.rel)
    changed = True
    while changed:
        extra = {(x, z) for x, y in rel for w, z in rel if y == w} - rel
        changed = bool(extra)
        rel |= extra
    return HeightedOrder(first.universe, first.domain | second.domain, frozenset(rel))


def test_am1_order():
    first, second, psi = am1()
    merged = psi_amalgamate(first.order, second.order, psi)
    assert merged.le(X, Y)
    assert not merged.le(Y, X)
    assert verify_amalgam_unique(first.order, second.order, psi, merged)


def test_plain_union_misses_clause_iii():
    first, second, psi = am1()
    report = verify_amalgam_unique(first.order, second.order, psi, _transitive_union(first.order, second.order))
    assert report.clause == "iii"
    assert report.witness == (X, Y)


def test_identity_amalgam_is_the_order():
    first, _, _ = am1()
    psi = OrderIso.identity(first.order.domain)
    assert psi_amalgamate(first.order, first.order, psi) == first.order


def test_am1_is_progressive():
    first, second, psi = am1()
    assert is_progressive(first.order, first.barriers, second.order, second.barriers, psi)


def test_moving_down_is_not_progressive():
    first, second, psi = am1()
    backwards = psi.inverse()
    report = is_progressive(second.order, second.barriers, first.order, first.barriers, backwards)
    assert report.clause == "oplus"


def test_non_iso_map_is_rejected():
    first, second, _ = am1()
    bad = OrderIso({A: Y, X: A})
    report = is_progressive(first.order, first.barriers, second.order, second.barriers, bad)
    assert report.clause == "iso"
    with pytest.raises(InvalidIsoError):
        psi_amalgamate(first.order, second.order, bad)


def test_am1_small_and_large_barriers():
    first, second, psi = am1()
    assert amalgamate_b3(first, second, psi).get(X, Y) == {X}
    assert amalgamate_B3(first, second, psi).get(X, Y) == {X}


def test_am2_barriers():
    first, second, psi = am2()
    small = amalgamate_b3(first, second, psi)
    large = amalgamate_B3(first, second, psi)
    assert small.get(X1, Y2) == {A}
    assert large.get(X1, Y2) == {A}
    assert small.get(X1, Y1) == {X1}
    merged = psi_amalgamate(first.order, second.order, psi)
    assert check_admissible(merged, large, require_fanout=False)


def test_am2_canonical_sequences():
    first, second, psi = am2()
    sequences = canonical_sequences(first, second, psi, X1, Y2)
    assert sequences.left_pairs == ((X1, A),)
    assert sequences.right_pairs == ((A, Y2),)


def test_canonical_sequences_need_a_cross_pair():
    first, second, psi = am2()
    with pytest.raises(InvalidPairError):
        canonical_sequences(first, second, psi, X1, Y1)
    with pytest.raises(InvalidPairError):
        canonical_sequences(first, second, psi, X1, X2)


def test_iso_helpers():
    psi = OrderIso({1: 2, 2: 3})
    assert psi.inverse().compose(psi) == OrderIso.identity([1, 2])
    assert psi.moved() == {1, 2}
    assert psi.restrict([1]).mapping == {1: 2}
    assert OrderIso.identity([4]).fixes([4])
    with pytest.raises(InvalidIsoError):
        OrderIso({1: 2, 3: 2})


def _chain(universe, points):
    pairs = [(p, q) for p in points for q in points if p.beta < q.beta]
    order = HeightedOrder.build(universe, points, pairs)
    return Structure(order, canonical_barriers(order))


def _interleaved_chains():
    """Two chains through the shared (0,2); (0,1) in the second sits between (0,0) and (0,3) of the first."""
    universe = Universe(1, 5, 1)
    first = _chain(universe, [Point(0, 0), Point(0, 2), Point(0, 3)])
    second = _chain(universe, [Point(0, 1), Point(0, 2), Point(0, 4)])
    psi = OrderIso({Point(0, 0): Point(0, 1), Point(0, 2): Point(0, 2), Point(0, 3): Point(0, 4)})
    return first, second, psi


def _side_branch():
    """y=(1,5) lies below psi(x) but not below x; t=(0,1) reaches x only through the shared (0,3)."""
    universe = Universe(2, 8, 1)
    low, side, shared, top = Point(0, 0), Point(1, 2), Point(0, 3), Point(0, 6)
    psi = OrderIso({low: Point(0, 1), side: Point(1, 5), shared: shared, top: Point(0, 7)})
    pairs = [(low, side), (side, top), (low, shared), (shared, top), (low, top)]
    first = HeightedOrder.build(universe, [low, side, shared, top], pairs)
    second = HeightedOrder.build(universe, psi.image(), [(psi(x), psi(y)) for x, y in pairs])
    return (
        Structure(first, canonical_barriers(first)),
        Structure(second, canonical_barriers(second)),
        psi,
    )


def test_barrier_keeps_an_end_met_in_its_own_barrier():
    first, second, psi = _interleaved_chains()
    merged = psi_amalgamate(first.order, second.order, psi)
    assert merged.le(Point(0, 1), Point(0, 3))
    for combine in (amalgamate_b3, amalgamate_B3):
        barriers = combine(first, second, psi)
        assert barriers.get(Point(0, 3), Point(0, 1)) == {Point(0, 0), Point(0, 1)}
        assert check_barrier_map(merged, barriers)


def test_sequences_pass_through_the_shared_point():
    first, second, psi = _interleaved_chains()
    sequences = canonical_sequences(first, second, psi, Point(0, 3), Point(0, 1))
    assert sequences.left_pairs == ((Point(0, 0), Point(0, 0)),)
    assert sequences.right_pairs == ((Point(0, 2), Point(0, 1)),)


def test_end_below_the_image_only_is_covered_through_shared_points():
    first, second, psi = _side_branch()
    assert is_progressive(first.order, first.barriers, second.order, second.barriers, psi)
    merged = psi_amalgamate(first.order, second.order, psi)
    x, y, t = Point(0, 6), Point(1, 5), Point(0, 1)
    assert not merged.le(y, x)
    assert merged.le(t, x)
    for combine in (amalgamate_b3, amalgamate_B3):
        barriers = combine(first, second, psi)
        assert barriers.get(x, y) == {t, Point(1, 2)}
        assert barriers.get(x, t) == {Point(0, 0), t}
        assert check_barrier_map(merged, barriers)


def test_broken_cross_barrier_is_refused(monkeypatch):
    first, second, psi = am1()
    monkeypatch.setattr(amalgam._Unfolding, "small_barrier", lambda self, x, y: frozenset())
    with pytest.raises(InvalidAmalgamationError) as raised:
        amalgamate_b3(first, second, psi)
    assert raised.value.witness[:2] == (X, Y)


@examples(5_000)
@given(progressive_pairs())
def test_amalgam_is_the_unique_common_extension(case):
    first, second, psi = case
    assert is_progressive(first.order, first.barriers, second.order, second.barriers, psi)
    merged = psi_amalgamate(first.order, second.order, psi)
    assert check_partial_order(merged)
    assert verify_amalgam_unique(first.order, second.order, psi, merged)
    assert merged.restrict(first.order.domain) == first.order
    assert merged.restrict(second.order.domain) == second.order


@examples(5_000)
@given(progressive_pairs())
def test_amalgamated_barriers_are_barriers(case):
    first, second, psi = case
    merged = psi_amalgamate(first.order, second.order, psi)
    for combine in (amalgamate_b3, amalgamate_B3):
        barriers = combine(first, second, psi)
        assert check_barrier_map(merged, barriers)
        assert barriers.extends(first.barriers)
        assert barriers.extends(second.barriers)


@given(progressive_pairs())
def test_sequences_rebuild_the_small_barrier(case):
    first, second, psi = case
    small = amalgamate_b3(first, second, psi)
    only1 = first.order.domain - second.order.domain
    only2 = second.order.domain - first.order.domain
    for x in only1:
        for y in only2 - {psi(x)}:
            sequences = canonical_sequences(first, second, psi, x, y)
            rebuilt = set()
            for p, q in sequences.left_pairs:
                rebuilt |= first.barriers.get(p, q)
            for p, q in sequences.anchored:
                rebuilt |= second.barriers.get(p, q)
            assert rebuilt == small.get(x, y)
