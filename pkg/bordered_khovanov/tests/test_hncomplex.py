import random

import pytest

from bordered_khovanov import arcalg, hncomplex, planar, tangles
from bordered_khovanov.errors import HypothesisError, InputError
from bordered_khovanov.hncomplex import LEFT, RIGHT, ProjComplex, ProjGenerator

SEED = 20261019


def _point():
    return planar.enumerate_matchings(1)[0]


def _cone(coefficient=1):
    """x -> y -> nothing, with w -> y alongside, over H^1 as a right complex."""
    a = _point()
    e = arcalg.idempotent(a)
    generators = {
        "x": ProjGenerator(a, 0, 0),
        "w": ProjGenerator(a, 0, 0),
        "y": ProjGenerator(a, 0, 1),
    }
    differential = {"x": {("y", e): coefficient}, "w": {("y", e): 1}}
    return ProjComplex(1, RIGHT, generators, differential)


def test_side_is_validated():
    with pytest.raises(InputError):
        ProjComplex(1, "up", {}, {})


def test_cone_is_a_C_module_complex():
    M = _cone()
    assert hncomplex.check_C_module(M).passed
    assert hncomplex.check_d_squared(M).passed
    assert len(M.to_zcomplex()) == 6


def test_grading_violation_is_reported():
    a = _point()
    x = arcalg.h_alpha(a, (1, 2))
    generators = {"x": ProjGenerator(a, 0, 0), "y": ProjGenerator(a, 0, 1)}
    M = ProjComplex(1, RIGHT, generators, {"x": {("y", x): 1}})
    report = hncomplex.check_C_module(M)
    assert not report.passed
    assert report.witness["reason"] == "grading"


def test_mirror_twice_is_identity():
    M = tangles.khovanov_complex(tangles.corpus_links()["hopf"].left)
    back = hncomplex.mirror_complex(hncomplex.mirror_complex(M))
    assert back.side == M.side
    assert back.differential == M.differential


def test_gaussian_elimination_of_a_cancelling_pair():
    """Cancelling x against y leaves w with zero differential, and g o f ~ id."""
    M = _cone()
    data = hncomplex.pair_cancellation_data(M, {"x": "y"})
    assert data.kept == ["w"]
    result = hncomplex.gaussian_eliminate(M, data)
    assert list(result.complex.generators) == ["w"]
    assert result.complex.differential["w"] == {}
    assert result.variant == 1
    assert result.report.passed
    assert hncomplex.removed_generators(M, result) == {"x", "y"}


def test_elimination_needs_a_unit():
    M = _cone(coefficient=2)
    with pytest.raises(HypothesisError) as info:
        hncomplex.pair_cancellation_data(M, {"x": "y"})
    assert info.value.item == 3


def test_elimination_needs_a_right_complex():
    M = hncomplex.mirror_complex(_cone())
    data = hncomplex.EliminationData(["w"], {})
    with pytest.raises(InputError):
        hncomplex.gaussian_eliminate(M, data)


def test_chain_maps_and_homotopies():
    M = _cone()
    identity = hncomplex.identity_map(M)
    assert hncomplex.check_chain_map(identity, "Ctilde").passed
    composed = hncomplex.compose_chain_maps(identity, identity)
    assert hncomplex.maps_equal(composed, identity)
    zero = hncomplex.ChainMap(M, M, {})
    assert hncomplex.check_homotopy(identity, identity, zero).passed
    assert not hncomplex.check_homotopy(identity, zero, zero).passed


def test_tensor_product_of_unknot_halves():
    """cap tensor cup over H^1 is the rank-two complex of the unknot."""
    link = tangles.corpus_links()["unknot"]
    M = tangles.khovanov_complex(link.left)
    N = tangles.khovanov_complex(link.right)
    assert M.side == RIGHT and N.side == LEFT
    C = hncomplex.tensor_over_Hn(M, N)
    assert len(C) == 2
    assert all(not image for image in C.differential.values())
    with pytest.raises(InputError):
        hncomplex.tensor_over_Hn(N, M)


def test_check_isomorphism_with_identity():
    M = tangles.khovanov_complex(tangles.corpus_links()["trefoil"].left)
    assert hncomplex.check_isomorphism(M, M, {gen: (gen, 1) for gen in M.generators}).passed
    assert hncomplex.check_d_squared(M).passed
    assert hncomplex.check_C_module(M).passed


def test_export_lines_mark_c_and_c_tilde():
    M = tangles.khovanov_complex(tangles.corpus_links()["hopf"].left)
    lines = M.export_lines()
    assert lines[0].startswith(f"complex {M.side} 2 ")
    assert any(line.startswith("d ") or line.startswith("dt ") for line in lines)


def _random_complex(rng, n=2):
    """A C_module complex over H^n with random idempotents, coefficients and two or three levels."""
    matchings = planar.enumerate_matchings(n)
    coefficients = [arcalg.idempotent(a) for a in matchings] + list(arcalg.beta_mult(n))
    side = rng.choice((LEFT, RIGHT))
    generators = {}
    for level in range(rng.choice((2, 3))):
        for k in range(rng.randint(1, 3)):
            generators[(level, k)] = ProjGenerator(rng.choice(matchings), rng.randint(0, 2), level)
    differential = {}
    for gen, data in generators.items():
        image = {}
        for target, other in generators.items():
            if other.h != data.h + 1 or rng.random() < 0.3:
                continue
            ends = (other.idempotent, data.idempotent) if side == RIGHT else (data.idempotent, other.idempotent)
            choices = [h for h in coefficients if (h.left, h.right) == ends and other.q + h.degree == data.q]
            if choices:
                image[(target, rng.choice(choices))] = rng.choice((-2, -1, 1, 2))
        differential[gen] = image
    return ProjComplex(n, side, generators, differential)


def test_d_squared_formulations_agree_on_random_complexes():
    rng = random.Random(SEED)
    outcomes = set()
    for _ in range(1000):
        M = _random_complex(rng)
        assert hncomplex.check_C_module(M).passed
        report = hncomplex.check_d_squared(M)
        direct = all(not M.apply_d(M.differential[gen]) for gen in M.generators)
        assert report.passed == direct, report.error
        assert "disagree" not in (report.error or "")
        outcomes.add(direct)
    assert outcomes == {True, False}
