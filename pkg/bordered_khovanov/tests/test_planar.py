import pytest

from bordered_khovanov import planar
from bordered_khovanov.errors import BridgeError, InputError, ParseError, SizeError
from bordered_khovanov.planar import Matching, Partition


def test_matching_counts_are_catalan():
    """|B^n| is the n-th Catalan number."""
    counts = [len(planar.enumerate_matchings(n)) for n in range(1, 6)]
    assert counts == [1, 2, 5, 14, 42]


def test_enumeration_is_sorted():
    matchings = planar.enumerate_matchings(3)
    assert list(matchings) == sorted(matchings)
    assert str(matchings[0]) == "[(1,2),(3,4),(5,6)]"


def test_size_bounds():
    with pytest.raises(SizeError):
        planar.enumerate_matchings(0)
    with pytest.raises(SizeError):
        planar.enumerate_matchings(planar.MAX_N + 1)


def test_parse_matching():
    matching = planar.parse_matching("[(1,4), (2,3)]")
    assert matching.pairs == ((1, 4), (2, 3))
    assert matching.partner(2) == 3
    with pytest.raises(ParseError):
        planar.parse_matching("[(1,3),(2,4)]")
    with pytest.raises(ParseError):
        planar.parse_matching("(1,2)")


def test_crossing_arcs_rejected():
    with pytest.raises(InputError):
        Matching.from_pairs([(1, 3), (2, 4)])


def test_partition_bijection():
    """Matchings and noncrossing partitions correspond both ways."""
    for n in range(1, 5):
        for matching in planar.enumerate_matchings(n):
            partition = planar.matching_to_partition(matching)
            assert planar.partition_to_matching(partition) == matching
    nested = planar.parse_matching("[(1,4),(2,3)]")
    assert planar.matching_to_partition(nested) == Partition.from_blocks(2, [[1, 2]])


def test_kreweras_swaps_bottom_and_top():
    bottom = Partition.from_blocks(3, [[1], [2], [3]])
    top = Partition.from_blocks(3, [[1, 2, 3]])
    assert planar.kreweras_dual(bottom) == top
    assert planar.kreweras_dual(top) == bottom


def test_hasse_diagram_sizes():
    """NC_3 has five vertices and six cover relations."""
    diagram = planar.hasse_diagram(3)
    assert len(diagram.vertices) == 5
    assert len(diagram.edges) == 6
    bottom = Partition.from_blocks(3, [[1], [2], [3]])
    top = Partition.from_blocks(3, [[1, 2, 3]])
    assert planar.hasse_distance(bottom, top) == 2


def test_geodesic_graphs_connected():
    for n in (2, 3):
        vertices = planar.hasse_diagram(n).vertices
        for p in vertices:
            for q in vertices:
                assert planar.geodesic_graph_connected(p, q), f"{p} -> {q}"


def test_geodesics_between_middle_partitions():
    """Two rank-one partitions are joined through the bottom and through the top."""
    p = Partition.from_blocks(3, [[1, 2], [3]])
    q = Partition.from_blocks(3, [[1], [2, 3]])
    paths = planar.geodesics(p, q)
    assert len(paths) == 2
    assert len(planar.geodesic_graph_components(p, q)) == 1


def test_bridges_and_surgery():
    """The only bridge on [(1,2),(3,4)] joins 2 and 3; its dual returns."""
    flat = planar.parse_matching("[(1,2),(3,4)]")
    nested = planar.parse_matching("[(1,4),(2,3)]")
    assert planar.bridges(flat) == ((2, 3),)
    assert planar.surger(flat, (2, 3)) == nested
    back = planar.dual_bridge(flat, (2, 3))
    assert planar.surger(nested, back) == flat
    assert planar.bridge_between(flat, nested) == (2, 3)


def test_undrawable_bridge():
    flat = planar.parse_matching("[(1,2),(3,4)]")
    assert not planar.is_drawable(flat, (1, 2))
    with pytest.raises(BridgeError):
        planar.surger(flat, (1, 3))
