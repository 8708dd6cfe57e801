import pytest

from bordered_khovanov import hncomplex, tangles
from bordered_khovanov.errors import InputError, ParseError
from bordered_khovanov.tangles import Link
from bordered_khovanov.zlinalg import Combination, ZComplex

UNKNOT_TEXT = """
tangle left 2
orient 1 out
orient 2 in
cap 1

tangle right 2
orient 1 in
orient 2 out
cap 1
"""


@pytest.fixture(scope="module")
def corpus():
    return tangles.corpus_links()


def _chain_ranks(complex_):
    ranks = {}
    for h, _ in complex_.grading.values():
        ranks[h] = ranks.get(h, 0) + 1
    return [ranks[h] for h in sorted(ranks)]


def test_corpus_loads(corpus):
    assert set(corpus) == {"braid", "hopf", "trefoil", "unknot"}
    assert [str(e) for e in corpus["braid"].left.events[:3]] == ["x+ 1", "x+ 2", "x+ 1"]
    assert corpus["trefoil"].left.crossing_count == 2
    assert corpus["trefoil"].right.crossing_count == 1


def test_parse_link_and_lines():
    link = tangles.parse_link(UNKNOT_TEXT)
    assert link.n == 1
    assert link.left.lines() == ["tangle left 2", "orient 1 out", "orient 2 in", "cap 1"]
    assert tangles.parse_tangle("\n".join(link.right.lines())) == link.right


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as info:
        tangles.parse_tangle("tangle left 2\norient 1 out\norient 2 in\nswap 1\n")
    assert info.value.line == 4
    with pytest.raises(ParseError):
        tangles.parse_tangle("tangle left 2\norient 1 out\ncap 1\n")
    with pytest.raises(ParseError):
        tangles.parse_tangle("tangle left 2\norient 1 out\norient 2 out\ncap 1\n")
    with pytest.raises(ParseError):
        tangles.parse_tangle("tangle left 4\norient 1 out\norient 2 in\norient 3 out\norient 4 in\ncap 1\n")


def test_boundary_mismatch():
    link = tangles.parse_link(UNKNOT_TEXT)
    with pytest.raises(InputError):
        tangles.check_boundary(Link(link.left, link.left))


def test_unknot_complex_and_homology(corpus):
    """cap | cup: two generators, zero differential, Z in two adjacent q degrees."""
    C = tangles.direct_CKh(corpus["unknot"])
    assert len(C) == 2
    assert not any(C.differential.values())
    homology = tangles.kh(corpus["unknot"])
    assert homology.total_rank() == 2
    (h1, q1), (h2, q2) = sorted(homology.groups)
    assert h1 == h2 == 0
    assert q2 - q1 == 2


def test_hopf_chain_ranks(corpus):
    """Two crossings: 4, 4, 4 generators by homological degree and Kh of rank 4."""
    C = tangles.direct_CKh(corpus["hopf"])
    assert _chain_ranks(C) == [4, 4, 4]
    assert C.d_squared_witness() is None
    assert C.degree_witness() is None
    assert tangles.kh(corpus["hopf"]).total_rank() == 4


def test_trefoil_has_one_torsion_group(corpus):
    homology = tangles.kh(corpus["trefoil"])
    torsion = [key for key, group in homology.groups.items() if group.torsion]
    assert len(torsion) == 1
    assert homology.groups[torsion[0]].torsion == (2,)
    assert homology.total_rank() == 4
    C = tangles.direct_CKh(corpus["trefoil"])
    assert homology.euler_characteristic() == C.chain_euler_characteristic()


def test_crossing_reorder_is_an_isomorphism(corpus):
    from bordered_khovanov.zlinalg import identification_witness

    link = corpus["trefoil"]
    reordered, mapping = tangles.reorder_crossings(link, [2, 0, 1])
    assert identification_witness(tangles.direct_CKh(link), reordered, mapping) is None


def test_tangle_complexes_sit_on_the_right_side(corpus):
    link = corpus["hopf"]
    M = tangles.khovanov_complex(link.left)
    N = tangles.khovanov_complex(link.right)
    assert M.side == hncomplex.RIGHT
    assert N.side == hncomplex.LEFT
    assert hncomplex.check_C_module(N).passed
    assert hncomplex.check_d_squared(N).passed


def test_tensor_identifies_with_direct(corpus):
    for link in corpus.values():
        M = tangles.khovanov_complex(link.left)
        N = tangles.khovanov_complex(link.right)
        report = tangles.identify_tensor(link, hncomplex.tensor_over_Hn(M, N))
        assert report.passed, report.witness
        assert report.data == {"signs": "canonical"}


def _hopf_tensor(corpus):
    link = corpus["hopf"]
    M = tangles.khovanov_complex(link.left)
    N = tangles.khovanov_complex(link.right)
    return link, hncomplex.tensor_over_Hn(M, N)


def test_single_sign_flip_is_not_an_identification(corpus):
    """Negating the differential out of one generator breaks the canonical match."""
    link, complex_ = _hopf_tensor(corpus)
    flipped = next(gen for gen in complex_.generators if complex_.differential[gen])
    differential = {gen: Combination(image) for gen, image in complex_.differential.items()}
    differential[flipped] = differential[flipped].scaled(-1)
    report = tangles.identify_tensor(link, ZComplex(complex_.grading, differential))
    assert not report.passed
    assert report.witness["reason"] == "differential"


def test_diagonal_sign_change_is_reported_not_accepted(corpus):
    link, complex_ = _hopf_tensor(corpus)
    flipped = next(gen for gen in complex_.generators if complex_.differential[gen])
    differential = {}
    for gen, image in complex_.differential.items():
        image = Combination({t: -c if t == flipped else c for t, c in image.items()})
        differential[gen] = image.scaled(-1) if gen == flipped else image
    report = tangles.identify_tensor(link, ZComplex(complex_.grading, differential))
    assert not report.passed
    assert report.witness["sign_change"]


def test_reidemeister_one_adds_a_crossing(corpus):
    link = corpus["unknot"]
    moved = tangles.reidemeister(link.left, "R1+", (0, 1))
    assert moved.crossing_count == 1
    assert tangles.kh(Link(moved, link.right)) == tangles.kh(link)


def test_reidemeister_two_keeps_homology(corpus):
    link = corpus["hopf"]
    moved = tangles.reidemeister(link.right, "R2", (0, 1))
    assert moved.crossing_count == link.right.crossing_count + 2
    assert tangles.kh(Link(link.left, moved)) == tangles.kh(link)


def test_bad_moves(corpus):
    word = corpus["unknot"].left
    with pytest.raises(InputError):
        tangles.reidemeister(word, "R4", (0, 1))
    with pytest.raises(InputError):
        tangles.reidemeister(word, "R3", (0, 1))
    with pytest.raises(InputError):
        tangles.reidemeister(word, "R1+", (0, 5))


def test_reidemeister_three_on_the_braid_triple(corpus):
    link = corpus["braid"]
    assert tangles.kh(link) == tangles.kh(corpus["unknot"])
    moved = tangles.reidemeister(link.left, "R3", (0, 1))
    assert [str(e) for e in moved.events[:3]] == ["x+ 2", "x+ 1", "x+ 2"]
    assert tangles.kh(Link(moved, link.right)) == tangles.kh(link)
    assert tangles.reidemeister(moved, "R3", (0, 1)) == link.left
    with pytest.raises(InputError):
        tangles.reidemeister(link.left, "R3", (1, 1))


def test_reidemeister_three_equivalence(corpus):
    data = tangles.reidemeister_equivalence(corpus["braid"].left, "R3", (0, 1))
    assert data.report.passed, data.report.error
    assert data.final.to_zcomplex().homology() == data.reference.to_zcomplex().homology()


def test_reidemeister_equivalence_certifies_steps(corpus):
    """R1 on the cap is undone by certified Gaussian elimination."""
    data = tangles.reidemeister_equivalence(corpus["unknot"].left, "R1+", (0, 1))
    assert data.report.passed, data.report.error
    assert data.steps
    assert data.final.to_zcomplex().homology() == data.reference.to_zcomplex().homology()
