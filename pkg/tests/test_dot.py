import pytest
from hypothesis import given

from data.fixtures import A, B, X, antisymmetry_break, diamond, p_a
from services.errors import MalformedInputError
from services.order import covering_pairs
from tests.strategies import orders
from utils.dot import export_dot, hasse_edges


def test_p_a_edges():
    assert hasse_edges(p_a().order) == {(A, X), (B, X)}


def test_dot_groups_heights():
    text = export_dot(diamond().order, "diamond")
    assert text.startswith("digraph diamond {")
    assert text.count("rank=same;") == 2
    assert '"(0,0)" -> "(0,1)";' in text


def test_cycle_is_rejected():
    with pytest.raises(MalformedInputError):
        hasse_edges(antisymmetry_break())


@given(orders())
def test_graph_reduction_matches_covering_scan(order):
    assert hasse_edges(order) == covering_pairs(order)
