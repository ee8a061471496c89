import pytest
from hypothesis import assume, given

from data.fixtures import single_node_system, tower_system, twin_system
from services.amalgam import OrderIso
from services.errors import (
    InvalidAmalgamationError,
    InvalidInputError,
    InvalidIsoError,
    MalformedInputError,
    NoIsoError,
    NotFoundError,
)
from services.symsys import (
    GapWitness,
    NodeModel,
    SymSystem,
    amalgamate_into,
    check_system,
    gap_search,
    node_iso,
    restrict,
    union_isomorphic,
    verify_gap_witness,
)
from tests.strategies import shifted_copy, tower_systems, towers_with_copies


@pytest.mark.parametrize("build", [single_node_system, tower_system, twin_system])
def test_fixture_systems_pass(build):
    assert check_system(build())


def test_equal_nodes_meeting_in_the_segment_pass():
    system = SymSystem.of(1, [NodeModel.of(5, [0, 2], 1), NodeModel.of(6, [0, 3], 1)])
    assert check_system(system)


def test_moved_shared_ordinal_breaks_clause_B():
    system = SymSystem.of(1, [NodeModel.of(8, [0, 2, 5], 1), NodeModel.of(9, [0, 5, 6], 1)])
    report = check_system(system)
    assert report.clause == "B"
    assert report.witness == (8, 9, 5)


def test_missing_copy_breaks_clause_D():
    nodes = [node for node in twin_system().nodes if node.code != 11]
    report = check_system(SymSystem.of(2, nodes))
    assert report.clause == "D"


def test_missing_container_breaks_clause_C():
    system = SymSystem.of(2, [NodeModel.of(4, [0], 2), NodeModel.of(6, [0, 1], 2)])
    report = check_system(system)
    assert report.clause == "C"
    assert report.witness == (4, 6)


def test_containment_without_subset_breaks_clause_A():
    system = SymSystem.of(2, [NodeModel.of(4, [0, 3], 2), NodeModel.of(6, [0, 1, 4], 2)])
    assert check_system(system).clause == "A"


def test_bad_codes_are_malformed():
    with pytest.raises(MalformedInputError):
        check_system(SymSystem(2, (NodeModel.of(1, [0], 2),)))
    with pytest.raises(MalformedInputError):
        check_system(SymSystem(2, (NodeModel(5, frozenset({0}), 1), NodeModel(5, frozenset({0, 3}), 1))))


def test_declared_containment_must_match():
    with pytest.raises(MalformedInputError):
        SymSystem.of(3, tower_system().nodes, contains=[[4, 6]])


def test_node_iso():
    first = NodeModel.of(10, [0, 1, 5], 2)
    second = NodeModel.of(11, [0, 1, 7], 2)
    assert node_iso(first, second).mapping == {0: 0, 1: 1, 5: 7}
    assert node_iso(first, first) == OrderIso.identity(first.elements)
    with pytest.raises(NoIsoError):
        node_iso(NodeModel.of(3, [2, 3], 2), NodeModel.of(4, [2, 4, 6], 2))


def test_node_iso_there_and_back_is_the_identity():
    first = NodeModel.of(10, [0, 1, 5], 2)
    second = NodeModel.of(11, [0, 1, 7], 2)
    assert node_iso(second, first).compose(node_iso(first, second)) == OrderIso.identity(first.elements)
    assert node_iso(first, second).compose(node_iso(second, first)) == OrderIso.identity(second.elements)


def test_restrict_tower():
    system = tower_system()
    top = system.node(9)
    assert restrict(system, top).codes() == {4, 6}
    assert len(restrict(system, system.node(4))) == 0
    with pytest.raises(NotFoundError):
        restrict(system, NodeModel.of(99, [0], 3))


def test_amalgamate_into_copies_across_twins():
    system = twin_system()
    n = system.node(20)
    extra = NodeModel.of(7, [0, 3], 2)
    w = restrict(system, n).with_nodes(list(restrict(system, n).nodes) + [extra])
    result = amalgamate_into(system, n, w)
    assert result.node(7) == extra
    assert result.node(8) == NodeModel(8, frozenset({0, 5}), 1)
    assert check_system(result)


def test_amalgamate_into_is_idempotent_on_its_own_restriction():
    system = tower_system()
    n = system.node(9)
    assert amalgamate_into(system, n, restrict(system, n)) == system


def test_amalgamate_into_checks_preconditions():
    system = tower_system()
    with pytest.raises(InvalidAmalgamationError):
        amalgamate_into(system, system.node(9), SymSystem(3))
    with pytest.raises(InvalidAmalgamationError):
        amalgamate_into(system, system.node(6), SymSystem.of(3, [NodeModel.of(12, [0], 3)]))


def test_union_with_itself():
    system = twin_system()
    assert union_isomorphic(system, system, OrderIso.identity(system.carrier())) == system


def test_union_of_disjoint_copies():
    system = single_node_system()
    copy, psi = shifted_copy(system, 10)
    union = union_isomorphic(system, copy, psi)
    assert union.codes() == {5, 15}
    assert check_system(union)


def test_union_rejects_moved_shared_ordinal():
    system = single_node_system()
    overlapping = SymSystem.of(2, [NodeModel.of(6, [0, 5], 2)])
    with pytest.raises(InvalidIsoError):
        union_isomorphic(system, overlapping, OrderIso({0: 0, 3: 5, 5: 6}))


def test_gap_search_alone():
    system = single_node_system()
    witness = gap_search(system, system.node(5), 2)
    assert witness == GapWitness(2, 0, 3)


def test_gap_search_skips_lower_nodes():
    system = tower_system()
    n = system.node(9)
    witness = gap_search(system, n, 3)
    assert witness == GapWitness(3, 2, 4)
    assert verify_gap_witness(system, n, witness)


def test_gap_search_not_found():
    system = tower_system()
    n = system.node(9)
    assert gap_search(system, n, 5) is None
    assert gap_search(system, n, 5, outside_only=True) == GapWitness(5, 4, 6)


def test_gap_search_outside_only_still_counts_peer_copies():
    system = twin_system()
    n = system.node(20)
    assert gap_search(system, n, 4) is None
    witness = gap_search(system, n, 4, outside_only=True)
    assert witness == GapWitness(4, 3, 7)
    assert verify_gap_witness(system, n, witness, outside_only=True)
    report = verify_gap_witness(system, n, witness)
    assert report.clause == "d"
    assert report.witness == (10, 3)
    assert gap_search(system, system.node(21), 2, outside_only=True) == GapWitness(2, 1, 5)


def test_gap_search_top_is_open():
    system = tower_system()
    n = system.node(9)
    witness = gap_search(system, n, 7, outside_only=True)
    assert witness == GapWitness(7, 6, None)


def test_gap_search_rejects_member():
    system = tower_system()
    with pytest.raises(InvalidInputError):
        gap_search(system, system.node(9), 4)


def test_bad_witness_is_reported():
    system = tower_system()
    n = system.node(9)
    assert verify_gap_witness(system, n, GapWitness(5, 4, 6)).clause == "d"
    assert verify_gap_witness(system, n, GapWitness(3, 2, 6)).clause == "b"


@given(tower_systems())
def test_restrict_preserves_system(system):
    assert check_system(system)
    for node in system.nodes:
        assert check_system(restrict(system, node))


@given(tower_systems())
def test_union_of_shifted_copies(system):
    copy, psi = shifted_copy(system, max(system.carrier()) + 1)
    union = union_isomorphic(system, copy, psi)
    assert len(union) == 2 * len(system)
    assert check_system(union)
    top = max(union.nodes, key=lambda node: node.delta)
    assert amalgamate_into(union, top, restrict(union, top)) == union


@given(tower_systems())
def test_gap_witnesses_verify(system):
    for node in system.nodes:
        for i in range(max(node.elements) + 2):
            if i in node.elements:
                continue
            witness = gap_search(system, node, i)
            if witness is not None:
                assert verify_gap_witness(system, node, witness)


@given(towers_with_copies())
def test_copies_sit_side_by_side(case):
    _, system = case
    assert check_system(system)
    by_delta = {}
    for node in system.nodes:
        by_delta.setdefault(node.delta, []).append(node)
    for peers in by_delta.values():
        assert len(peers) >= 2
        for first in peers:
            for second in peers:
                there_and_back = node_iso(second, first).compose(node_iso(first, second))
                assert there_and_back == OrderIso.identity(first.elements)


@given(towers_with_copies())
def test_amalgamate_into_rebuilds_every_copy(case):
    tower, system = case
    top = max(tower.nodes, key=lambda node: node.delta)
    tops = system.with_nodes(node for node in system.nodes if node.delta == top.delta)
    result = amalgamate_into(tops, top, restrict(system, top))
    assert result == system
    assert check_system(result)
    assert len(result) == len(tops) * len(tower)


@given(towers_with_copies())
def test_dropping_a_copy_breaks_clause_D(case):
    tower, system = case
    assume(len(tower) > 1)
    low = min(node for node in system.nodes if node not in tower.nodes and node.delta == 1)
    report = check_system(system.with_nodes(node for node in system.nodes if node != low))
    assert report.clause == "D"
