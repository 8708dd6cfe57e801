import pytest

from bordered_khovanov import bordered, hncomplex, roberts, tangles
from bordered_khovanov.errors import CompositionError, InputError
from bordered_khovanov.zlinalg import Combination


@pytest.fixture(scope="module")
def corpus():
    return tangles.corpus_links()


def _halves(link):
    M = tangles.khovanov_complex(link.left)
    N = tangles.khovanov_complex(link.right)
    return M, N


def test_typeD_from_left_complex(corpus):
    _, N = _halves(corpus["hopf"])
    D = bordered.typeD_from_complex(N)
    assert len(D) == len(N)
    assert bordered.verify_typeD(D).passed
    assert bordered.check_typeD_recovers(N).passed
    assert D.export_lines()[0] == f"typeD D(N) over H^2 {len(N)}"


def test_typeD_needs_left_complex(corpus):
    M, _ = _halves(corpus["hopf"])
    with pytest.raises(InputError):
        bordered.typeD_from_complex(M)


def test_typeA_over_hn(corpus):
    M, _ = _halves(corpus["trefoil"])
    A = bordered.typeA_over_Hn(M)
    report = bordered.verify_typeA(A)
    assert report.passed, report.witness
    with pytest.raises(InputError):
        bordered.typeA_over_Hn(hncomplex.mirror_complex(M))


def test_box_tensor_refuses_mirrored_side(corpus):
    M, N = _halves(corpus["unknot"])
    A = bordered.typeA_over_Hn(M)
    D = bordered.mirror_typeD(bordered.typeD_from_complex(N))
    assert D.mirrored
    with pytest.raises(InputError):
        bordered.box_tensor(A, D)
    assert not bordered.mirror_typeD(D).mirrored


def test_box_tensor_over_hn_is_a_complex(corpus):
    M, N = _halves(corpus["hopf"])
    C = bordered.box_tensor(bordered.typeA_over_Hn(M), bordered.typeD_from_complex(N))
    assert C.d_squared_witness() is None
    assert C.degree_witness() is None


@pytest.mark.parametrize("method", bordered.METHODS)
def test_pairing_identifies_with_direct(corpus, method):
    for name in ("unknot", "hopf"):
        report = bordered.check_pairing(corpus[name], method)
        assert report.passed, f"{name} {method}: {report.witness}"


@pytest.mark.parametrize("method", bordered.METHODS)
def test_trefoil_homology_agrees(corpus, method):
    link = corpus["trefoil"]
    assert bordered.pairing_complex(link, method).homology() == tangles.kh(link)


def test_unknown_method(corpus):
    with pytest.raises(InputError):
        bordered.pairing_complex(corpus["unknot"], "telepathy")


def test_roberts_structures(corpus):
    """A(M) over the product algebra is a dg module and D(N) matches its boxed definition."""
    M, N = _halves(corpus["hopf"])
    for mode in roberts.MODES:
        A = bordered.typeA_roberts(M, mode)
        assert bordered.verify_typeA(A).passed
        D = bordered.typeD_roberts(N, mode)
        assert bordered.verify_typeD(D).passed


def test_roberts_typeA_needs_right_complex(corpus):
    _, N = _halves(corpus["unknot"])
    with pytest.raises(InputError):
        bordered.typeA_roberts(N)
    with pytest.raises(InputError):
        bordered.typeD_roberts(hncomplex.mirror_complex(N))


def test_box_with_dd_gives_type_d(corpus):
    M, _ = _halves(corpus["hopf"])
    A = bordered.typeA_roberts(M)
    K = roberts.dd_delta(roberts.K_PRODUCT, 2)
    D = bordered.box_with_DD(A, K)
    assert D.mirrored
    assert bordered.verify_typeD(D).passed
    other = bordered.typeA_over_Hn(M)
    with pytest.raises(InputError):
        bordered.box_with_DD(other, K)


def test_identity_ainfty_morphism(corpus):
    M, _ = _halves(corpus["hopf"])
    A = bordered.typeA_roberts(M)
    identity = bordered.identity_ainfty(A)
    assert bordered.verify_ainfty(identity).passed
    twice = bordered.compose(identity, identity)
    assert twice.f1 == identity.f1
    assert not twice.has_second
    empty = bordered.AInftyHomotopy(A, A)
    assert bordered.verify_ainfty_homotopy(identity, twice, empty).passed


def test_ainfty_from_identity_chain_map(corpus):
    M, _ = _halves(corpus["trefoil"])
    A = bordered.typeA_roberts(M)
    F = bordered.ainfty_from_chainmap(hncomplex.identity_map(M), A, A)
    assert not F.has_second
    assert bordered.verify_ainfty(F).passed


def test_compose_rejects_two_second_terms(corpus):
    M, _ = _halves(corpus["unknot"])
    A = bordered.typeA_roberts(M)
    F = bordered.identity_ainfty(A)
    gen = next(iter(A.generators))
    letter = next(iter(A.letters_from(A.idempotent(gen))), None)
    if letter is None:
        letter = A.algebra.monomial(next(iter(A.algebra.generators)))
    F.f2[(gen, letter)] = Combination.single(gen)
    with pytest.raises(CompositionError):
        bordered.compose(F, F)
    other = bordered.typeA_roberts(M, roberts.GAMMA_QUOTIENT)
    with pytest.raises(InputError):
        bordered.compose(bordered.identity_ainfty(other), bordered.identity_ainfty(A))


def test_ainfty_homotopy_from_identity_coefficients(corpus):
    M, _ = _halves(corpus["hopf"])
    A = bordered.typeA_roberts(M)
    H = bordered.ainfty_from_homotopy(hncomplex.identity_map(M), A, A)
    assert H.h1 == bordered.identity_ainfty(A).f1


def test_ainfty_homotopy_rejects_non_idempotent_coefficients(corpus):
    M, _ = _halves(corpus["hopf"])
    A = bordered.typeA_roberts(M)
    tilde = [(gen, image) for gen, image in M.differential.items() if any(not h.is_idempotent() for (_, h) in image)]
    if not tilde:
        pytest.skip("no non-idempotent coefficient in this complex")
    gen, image = tilde[0]
    psi = hncomplex.ChainMap(M, M, {gen: Combination(image)})
    with pytest.raises(InputError):
        bordered.ainfty_from_homotopy(psi, A, A)


def test_typeD_morphisms(corpus):
    _, N = _halves(corpus["hopf"])
    D = bordered.typeD_roberts(N)
    identity = bordered.identity_typeD_morphism(D)
    assert bordered.verify_typeD_morphism(identity).passed
    composed = bordered.compose_typeD_morphisms(identity, identity)
    assert bordered.typeD_morphisms_equal(composed, identity)
    zero = bordered.TypeDMorphism(D, D)
    assert bordered.verify_typeD_homotopy(identity, identity, zero).passed


@pytest.mark.parametrize("mode", roberts.MODES)
def test_transport_of_reidemeister_one(corpus, mode):
    data = tangles.reidemeister_equivalence(corpus["unknot"].left, "R1+", (0, 1))
    report = bordered.transport_equivalence(data, mode)
    assert report.passed, report.error
    assert report.metadata["mode"] == mode
    tetrahedra = [key for key in report.data if key.endswith("tetrahedra")]
    assert len(tetrahedra) == (report.metadata["steps"] if mode == roberts.GAMMA_QUOTIENT else 0)


@pytest.mark.parametrize("mode", roberts.MODES)
def test_transport_of_reidemeister_three(corpus, mode):
    link = corpus["braid"]
    data = tangles.reidemeister_equivalence(link.left, "R3", (0, 1))
    report = bordered.transport_equivalence(data, mode)
    assert report.passed, report.error
    moved = tangles.Link(data.moved, link.right)
    assert bordered.pairing_complex(moved, bordered.BOX_PRODUCT).homology() == tangles.kh(link)


def _table_module(algebra, idempotents, table):
    """A type A structure acting on words through a literal table."""
    generators = {gen: bordered.StructureGenerator(idem, (0, 0)) for gen, idem in idempotents.items()}

    def action(gen, word):
        if not word.letters:
            return Combination.single(gen) if generators[gen].idempotent == word.left else Combination()
        return Combination(table.get((gen, word.letters), {}))

    return bordered.TypeA("table", algebra, generators, {}, action)


def test_tetrahedron_sums_must_vanish_through_F2():
    algebra = roberts.product_algebra(3, roberts.GAMMA_QUOTIENT)
    relation = roberts.tetrahedron_relations(3)[0]
    a = min(relation, key=lambda w: w.letters)
    first, second = a.letters
    source = _table_module(algebra, {"x": a.left}, {})
    target = _table_module(
        algebra, {"u": algebra.monomial(first).right, "y": a.right}, {("u", (second,)): {"y": 1}}
    )
    quiet = bordered.AInftyMorphism(source, target)
    assert bordered.check_tetrahedra_act_as_zero(quiet, 3).passed

    loud = bordered.AInftyMorphism(source, target, f2={("x", algebra.monomial(first)): Combination.single("u")})
    report = bordered.check_tetrahedra_act_as_zero(loud, 3)
    assert not report.passed
    assert report.witness["reason"] == "F2"
