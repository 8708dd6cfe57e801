import itertools
import random
from collections import defaultdict

import pytest

from bordered_khovanov import arcalg, linquad, planar
from bordered_khovanov.arcalg import MINUS, PLUS
from bordered_khovanov.errors import InputError

SEED = 20261019


def _matching(text):
    return planar.parse_matching(text)


def test_algebra_ranks():
    """rank H^n = sum over pairs (a, b) of 2^#circles."""
    assert arcalg.algebra_rank(1) == 2
    assert arcalg.algebra_rank(2) == 12
    flat = _matching("[(1,2),(3,4)]")
    nested = _matching("[(1,4),(2,3)]")
    assert arcalg.piece_rank(flat, flat) == 4
    assert arcalg.piece_rank(flat, nested) == 2


def test_degrees_of_generators():
    flat = _matching("[(1,2),(3,4)]")
    assert arcalg.idempotent(flat).degree == 0
    assert arcalg.h_gamma(flat, (2, 3)).degree == 1
    assert arcalg.h_alpha(flat, (1, 2)).degree == 2


def test_h1_is_dual_numbers():
    """H^1 is Z[x]/x^2."""
    a = planar.enumerate_matchings(1)[0]
    one = arcalg.idempotent(a)
    x = arcalg.h_alpha(a, (1, 2))
    assert arcalg.multiply(one, x) == {x: 1}
    assert arcalg.multiply(x, one) == {x: 1}
    assert arcalg.multiply(x, x) == {}


def test_merge_then_split():
    """h_gamma h_gamma^dagger is the sum of the two arc generators."""
    flat = _matching("[(1,2),(3,4)]")
    nested = _matching("[(1,4),(2,3)]")
    there = arcalg.h_gamma(flat, (2, 3))
    back = arcalg.h_gamma(nested, planar.dual_bridge(flat, (2, 3)))
    product = arcalg.multiply(there, back)
    assert product == {arcalg.h_alpha(flat, (1, 2)): 1, arcalg.h_alpha(flat, (3, 4)): 1}


def test_non_composable_product_vanishes():
    flat = _matching("[(1,2),(3,4)]")
    nested = _matching("[(1,4),(2,3)]")
    assert arcalg.multiply(arcalg.idempotent(flat), arcalg.idempotent(nested)) == {}


def _associates(x, y, z):
    left = arcalg.multiply_elements(arcalg.multiply(x, y), {z: 1})
    right = arcalg.multiply_elements({x: 1}, arcalg.multiply(y, z))
    return left == right


def _by_left(n):
    table = defaultdict(list)
    for h in arcalg.basis(n):
        table[h.left].append(h)
    return table


def test_associativity_on_h2():
    """Every triple of basis elements, composable or not."""
    basis = arcalg.basis(2)
    for x in basis:
        for y in basis:
            for z in basis:
                assert _associates(x, y, z), (str(x), str(y), str(z))


def test_associativity_on_random_h3_triples():
    rng = random.Random(SEED)
    basis = arcalg.basis(3)
    starting = _by_left(3)
    for _ in range(10_000):
        x = rng.choice(basis)
        y = rng.choice(starting[x.right])
        z = rng.choice(starting[y.right])
        assert _associates(x, y, z), (str(x), str(y), str(z))


def test_surgery_order_does_not_matter():
    """The product is independent of the order the middle arcs are surgered in."""
    for x in arcalg.basis(2):
        for y in arcalg.basis(2):
            if x.right != y.left:
                continue
            assert arcalg.multiply(x, y, order=[0, 1]) == arcalg.multiply(x, y, order=[1, 0])


def test_surgery_order_on_random_h3_products():
    """All 3! surgery orders of the middle arcs give the same product."""
    rng = random.Random(SEED)
    basis = arcalg.basis(3)
    starting = _by_left(3)
    orders = list(itertools.permutations(range(3)))
    for _ in range(300):
        x = rng.choice(basis)
        y = rng.choice(starting[x.right])
        expected = arcalg.multiply(x, y)
        for order in orders:
            assert arcalg.multiply(x, y, order=list(order)) == expected, (str(x), str(y), order)


def test_generator_kinds():
    flat = _matching("[(1,2),(3,4)]")
    assert arcalg.generator_kind(arcalg.h_gamma(flat, (2, 3))) == "gamma"
    assert arcalg.generator_kind(arcalg.h_alpha(flat, (3, 4))) == "alpha"
    with pytest.raises(InputError):
        arcalg.generator_kind(arcalg.idempotent(flat))
    with pytest.raises(InputError):
        arcalg.h_alpha(flat, (2, 3))


def test_diagram_sign_validation():
    flat = _matching("[(1,2),(3,4)]")
    with pytest.raises(InputError):
        arcalg.diagram(flat, flat, (PLUS,))
    element = arcalg.diagram(flat, flat, (PLUS, MINUS))
    assert arcalg.mirror(arcalg.mirror(element)) == element


def test_presentation_of_h1():
    """One generator h_alpha with h_alpha^2 = 0: ranks 1 and 1 in degrees 0 and 2."""
    algebra = arcalg.hn_presentation(1)
    assert len(algebra.generators) == 1
    a = planar.enumerate_matchings(1)[0]
    assert algebra.rank((a, a, (0, 0), 0)) == 1
    assert algebra.rank((a, a, (2, 0), 2)) == 1
    assert algebra.total_rank() == 2


def test_presentation_verifies_for_h2():
    algebra = arcalg.hn_presentation(2)
    report = linquad.verify_presentation(algebra, arcalg.hn_oracle(2))
    assert report.passed, report.error
    assert report.data["rank"] == arcalg.algebra_rank(2)


def test_dropping_relations_is_detected():
    """Without the h_gamma h_gamma^dagger relations the ranks no longer match."""
    algebra = arcalg.hn_presentation(2)
    kept = [r for r in algebra.relations if not any(len(w.letters) == 1 for w in r)]
    truncated = linquad.PresentedAlgebra(
        "truncated",
        algebra.idempotents,
        list(algebra.generators.values()),
        kept,
        max_weight=algebra.max_weight,
    )
    report = linquad.verify_presentation(truncated, arcalg.hn_oracle(2))
    assert not report.passed


def test_arc_algebra_interface():
    algebra = arcalg.ArcAlgebra(2)
    flat = _matching("[(1,2),(3,4)]")
    x = arcalg.h_alpha(flat, (1, 2))
    assert algebra.unit(flat) == arcalg.idempotent(flat)
    assert algebra.d({x: 1}) == {}
    assert algebra.bidegree(x) == (2, 0)
    assert algebra.mul({x: 1}, {x: 1}) == {}
