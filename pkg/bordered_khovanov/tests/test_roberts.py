import random

import pytest

from bordered_khovanov import arcalg, bordered, roberts
from bordered_khovanov.errors import InputError, SizeError
from bordered_khovanov.zlinalg import Combination

SEED = 20261019


def test_n1_generators():
    """H^1 gives one circle generator 1 -> x and its mirrored dual."""
    rights = roberts.right_generators(1)
    assert len(rights) == 1
    b = rights[0]
    assert b.kind == roberts.CIRCLE
    assert b.bidegree == (-2, 0)
    assert b.source.is_idempotent()
    assert b.target.signs == (arcalg.MINUS,)
    d = roberts.left_generators(1)[0]
    assert d.dual
    assert d.bidegree == (2, 1)
    assert d.partner() == b


def test_generator_names_round_trip():
    lookup = roberts.generator_lookup(2)
    for g in roberts.right_generators(2) + roberts.left_generators(2):
        assert lookup[g.name] == g
        assert g.name.startswith("d" if g.dual else "b")


def test_br_presentation_verifies():
    for n in (1, 2):
        report = roberts.verify_BR(n)
        assert report.passed, report.error


def test_relation_degrees():
    expected = {1: {-2}, 2: {-3}, 3: {-4}, 4: {-2}}
    audit = roberts.degree_audit(2)
    assert 4 in audit
    for family, degrees in audit.items():
        assert degrees == expected[family]


def test_graph_components_have_known_shapes():
    graph = roberts.monomial_graph_G(2)
    assert graph.components
    assert set(graph.shape_counts()) <= {roberts.ISOLATED, roberts.SEGMENT, roberts.TRIANGLE, roberts.TETRAHEDRON}
    for component in graph.of_shape(roberts.SEGMENT):
        assert len(component) == 2


def test_dual_has_square_zero_differential():
    for n in (1, 2):
        dual = roberts.dual_BR(n)
        assert dual.check_d_squared().passed
    assert not roberts.dual_BR(1).differential


def test_product_algebra_differential_descends():
    for mode in roberts.MODES:
        algebra = roberts.product_algebra(2, mode)
        report = roberts.check_differential_descends(algebra)
        assert report.passed, report.error
    assert roberts.product_algebra(2, roberts.GAMMA_QUOTIENT).name == "BGamma_2"


def test_gamma_quotient_only_loses_rank():
    for piece, (full, gamma) in roberts.rank_comparison(2).items():
        assert gamma <= full, piece


def test_product_word_key_moves_dual_letters_left():
    """Right-first words are the leading terms, so bridge commutations rewrite b * m(b*) into m(b*) * b."""
    algebra = roberts.product_algebra(2)
    commutations = [r.relation for r in roberts.extra_relations(2) if r.family == 1]
    assert commutations
    for relation in commutations:
        word = next(w for w in relation if w.letters[0].startswith("b"))
        assert roberts.product_word_key(word)[:2] == (-2, -1)
        assert all(roberts.product_word_key(word) < roberts.product_word_key(w) for w in relation if w != word)
        reduced = algebra.reduce(Combination.single(word))
        assert reduced
        assert all(w.letters[0].startswith("d") for w in reduced)


def test_mirror_algebra():
    algebra = roberts.build_BR(1)
    mirrored = roberts.mirror_algebra(algebra)
    assert mirrored.name == "m(B_R(H^1))"
    assert mirrored.idempotents == [arcalg.mirror(h) for h in algebra.idempotents]


def test_dd_bimodules_satisfy_the_relation():
    for n in (1, 2):
        for kind in (roberts.K_B_BDUAL, roberts.K_BDUAL_B):
            report = bordered.verify_DD(roberts.dd_delta(kind, n))
            assert report.passed, report.witness
        for mode in roberts.MODES:
            report = bordered.verify_DD(roberts.dd_delta(roberts.K_PRODUCT, n, mode))
            assert report.passed, report.witness


def test_dd_term_bidegrees_for_one_pair():
    for kind in roberts.DD_KINDS:
        report = bordered.verify_DD(roberts.dd_delta(kind, 1))
        assert report.data["term_bidegrees"] == [[0, 1]]


def test_dd_export_lines():
    K = roberts.dd_delta(roberts.K_PRODUCT, 1)
    lines = K.export_lines()
    assert lines[0].startswith("dd K[")
    assert any("mirr(" in line for line in lines[1:])


def test_bad_arguments():
    with pytest.raises(SizeError):
        roberts.build_BR(roberts.MAX_N + 1)
    with pytest.raises(InputError):
        roberts.product_algebra(1, "half")
    with pytest.raises(InputError):
        roberts.dd_delta("sideways", 1)
    with pytest.raises(InputError):
        roberts.dd_delta(roberts.K_PRODUCT, 1, base=roberts.HN)


def test_extra_relations_match_the_action_kernel():
    for n in (1, 2):
        report = roberts.check_extra_relations(n)
        assert report.passed, report.witness
    families = roberts.check_extra_relations(2).data["families"]
    # two arcs per side leave no circle untouched by a bridge surgery
    assert set(families) == {1, 2, 4, 5}


def test_extra_relations_for_one_circle():
    """H^1 has a single circle, which cannot be flipped twice."""
    assert roberts.extra_relations(1) == ()
    assert roberts.mixed_relations(1) == []


def test_split_relation_has_three_terms():
    split = [r.relation for r in roberts.extra_relations(2) if r.family == 5]
    assert split
    for relation in split:
        assert sorted(relation.values()) in ([-1, -1, 1], [-1, 1, 1])
        firsts = {word.letters[0][0] for word in relation}
        assert firsts == {"b", "d"}


def test_flipped_circle():
    b = roberts.right_generators(1)[0]
    assert roberts.flipped_circle(b) == frozenset({1, 2})
    assert roberts.flipped_circle(b.partner()) == frozenset({1, 2})
    bridge = next(g for g in roberts.right_generators(2) if g.kind == roberts.GAMMA)
    with pytest.raises(InputError):
        roberts.flipped_circle(bridge)


def test_gamma_quotient_kills_tetrahedron_sums():
    assert roberts.tetrahedron_relations(2) == []
    tetrahedra = roberts.monomial_graph_G(3).of_shape(roberts.TETRAHEDRON)
    assert tetrahedra
    relations = roberts.tetrahedron_relations(3)
    assert len(relations) == 3 * len(tetrahedra)
    full = roberts.product_algebra(3, roberts.FULL)
    gamma = roberts.product_algebra(3, roberts.GAMMA_QUOTIENT)
    for relation in relations:
        assert gamma.is_zero(relation)
        assert not full.is_zero(relation)
    pieces = roberts.tetrahedron_pieces(3)
    assert pieces
    for piece in pieces:
        assert gamma.rank(piece) < full.rank(piece)


def test_mirr_is_multiplicative_on_random_pairs():
    rng = random.Random(SEED)
    algebra = roberts.product_algebra(2)
    mirrored = roberts.mirror_algebra(algebra)
    by_left = {}
    for weight in (1, 2):
        for group in algebra.words_of_weight(weight).values():
            for word in group:
                by_left.setdefault(word.left, []).append(word)
    words = [word for group in by_left.values() for word in group]
    nonzero = 0
    for _ in range(100):
        x = rng.choice(words)
        y = rng.choice(by_left.get(x.right, words))
        product = algebra.mul({x: 1}, {y: 1})
        assert mirrored.mul(roberts.mirr({x: 1}), roberts.mirr({y: 1})) == roberts.mirr(product)
        nonzero += bool(product)
    assert nonzero
