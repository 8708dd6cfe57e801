import random

import pytest

from bordered_khovanov import arcalg
from bordered_khovanov.errors import InputError, PresentationError
from bordered_khovanov.linquad import (
    GeneratorSpec,
    Monomial,
    PresentedAlgebra,
    formal_dual_presentation,
    quadratic_algebra,
    quadratic_dual,
    quadratic_part,
    same_relation_span,
)
from bordered_khovanov.zlinalg import Combination

SEED = 20261019


def _polynomial_ring():
    """Z[x, y] truncated above weight 2, one idempotent."""
    specs = [GeneratorSpec("x", "e", "e", (1, 0), 1), GeneratorSpec("y", "e", "e", (1, 0), 1)]
    xy = Monomial("e", "e", ("x", "y"))
    yx = Monomial("e", "e", ("y", "x"))
    return PresentedAlgebra("P", ["e"], specs, [Combination({xy: 1, yx: -1})], max_weight=2)


def test_commutative_relation_normal_form():
    """xy and yx reduce to the same normal form."""
    algebra = _polynomial_ring()
    assert algebra.mul(algebra.word("x"), algebra.word("y")) == algebra.mul(algebra.word("y"), algebra.word("x"))
    assert algebra.rank(("e", "e", (2, 0), 2)) == 3
    assert algebra.is_zero(algebra.word("x", "x", "y"))


def test_quadratic_dual_is_exterior():
    """The dual of a commutative ring is an exterior algebra with shifted degrees."""
    dual = quadratic_dual(_polynomial_ring())
    assert set(dual.generators) == {"x*", "y*"}
    assert dual.generators["x*"].bidegree == (-1, 1)
    assert dual.rank(("e", "e", (-2, 2), 2)) == 1
    assert dual.is_zero(dual.word("x*", "x*"))
    anti = dual.reduce(dual.word("x*", "y*") + dual.word("y*", "x*"))
    assert not anti


def test_non_homogeneous_relation_rejected():
    specs = [GeneratorSpec("x", "e", "e", (1, 0), 1)]
    x = Monomial("e", "e", ("x",))
    xx = Monomial("e", "e", ("x", "x"))
    with pytest.raises(PresentationError):
        PresentedAlgebra("bad", ["e"], specs, [Combination({x: 1, xx: 1})])


def test_duplicate_generator_rejected():
    specs = [GeneratorSpec("x", "e", "e", (1, 0), 1), GeneratorSpec("x", "e", "e", (1, 0), 1)]
    with pytest.raises(PresentationError):
        PresentedAlgebra("bad", ["e"], specs, [])


def test_words_must_compose():
    specs = [GeneratorSpec("x", "e", "f", (1, 0), 1)]
    algebra = PresentedAlgebra("path", ["e", "f"], specs, [])
    assert algebra.monomial("x").right == "f"
    with pytest.raises(InputError):
        algebra.monomial("x", "x")
    with pytest.raises(InputError):
        algebra.monomial()


def test_leibniz_sign_on_words():
    """mu1(ab) = (-1)^{h(b)} mu1(a) b + a mu1(b)."""
    specs = [
        GeneratorSpec("a", "e", "e", (1, 1), 1),
        GeneratorSpec("b", "e", "e", (1, 1), 1),
        GeneratorSpec("c", "e", "e", (2, 2), 2),
    ]
    c = Monomial("e", "e", ("c",))
    algebra = PresentedAlgebra("dga", ["e"], specs, [], differential={"a": {c: 1}})
    image = algebra.d_word(Monomial("e", "e", ("a", "b")))
    assert image == {Monomial("e", "e", ("c", "b")): -1}


def test_quadratic_part_of_h2():
    """H^2 splits into quadratic rows, some with a linear part."""
    algebra = arcalg.hn_presentation(2)
    data = quadratic_part(algebra)
    assert data.ideal()
    assert any(linear for linear in data.phi().values())
    homogeneous = quadratic_algebra(algebra)
    assert all(len(w.letters) == 2 for r in homogeneous.relations for w in r)


def test_dual_of_h2_has_a_differential():
    """The linear terms of H^2 become mu1 on the dual, and mu1^2 = 0 there."""
    dual = formal_dual_presentation(arcalg.hn_presentation(2))
    assert dual.max_weight is None
    assert dual.differential
    assert dual.check_d_squared().passed


def test_same_relation_span():
    algebra = _polynomial_ring()
    xy = Monomial("e", "e", ("x", "y"))
    yx = Monomial("e", "e", ("y", "x"))
    assert same_relation_span(algebra.relations, [Combination({yx: 1, xy: -1})])
    assert not same_relation_span(algebra.relations, [Combination({xy: 1})])


def test_export_lines():
    lines = _polynomial_ring().export_lines()
    assert lines[0] == "algebra P"
    assert "gen x e0 e0 1 0 1" in lines
    assert any(line.startswith("rel ") for line in lines)


def test_reduce_is_idempotent_on_random_elements():
    """Normal forms are fixed by reduce and use only basis words of their pieces."""
    rng = random.Random(SEED)
    algebra = arcalg.hn_presentation(2)
    words = [
        word
        for weight in range(algebra.max_weight + 2)
        for group in algebra.words_of_weight(weight).values()
        for word in group
    ]
    for _ in range(1000):
        element = Combination()
        for _ in range(rng.randint(1, 4)):
            element.add_term(rng.choice(words), rng.randint(-3, 3))
        reduced = algebra.reduce(element)
        assert algebra.reduce(reduced) == reduced
        for word in reduced:
            assert word in algebra.basis_words(algebra.piece(word))
