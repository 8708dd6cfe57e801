import math
import random

import pytest
from sympy import Matrix

from bordered_khovanov.errors import InputError, VerificationError
from bordered_khovanov.zlinalg import (
    BigradedHomology,
    Combination,
    HomologyGroup,
    RowEchelon,
    SmithForm,
    ZComplex,
    certify_smith_form,
    complexes_equal_under_identification,
    integer_kernel,
    lin_sum,
    smith_normal_form,
    solve_signs,
)

SEED = 20261019


def test_combination_drops_zero_coefficients():
    """Adding a term and its negative leaves nothing behind."""
    c = Combination.single("a", 3)
    c.add_term("a", -3)
    assert c == {}
    assert not (Combination.single("x") - Combination.single("x"))
    assert lin_sum([(2, {"a": 1}), (-1, {"a": 2, "b": 1})]) == {"b": -1}


def test_smith_normal_form_of_small_matrix():
    """[[2,4],[6,8]] has invariant factors 2 and 4, with certified transforms."""
    form = smith_normal_form([[2, 4], [6, 8]])
    assert form.invariants == [2, 4]
    assert form.rank == 2
    certify_smith_form([[2, 4], [6, 8]], form)


def test_smith_normal_form_rank_deficient():
    form = smith_normal_form([[1, 2], [2, 4]])
    assert form.invariants == [1, 0]
    assert form.rank == 1


def test_certify_rejects_wrong_diagonal():
    """A diagonal that does not equal U*A*V is caught."""
    bad = SmithForm([[1, 0], [0, 1]], [[1, 0], [0, 1]], [[1, 0], [0, 1]], [1, 1])
    with pytest.raises(VerificationError):
        certify_smith_form([[2, 0], [0, 2]], bad)


def test_row_echelon_merges_with_bezout():
    """Inserting 2a and 3a gives the unit row a."""
    echelon = RowEchelon()
    assert echelon.insert({"a": 2})
    assert not echelon.insert({"a": 3})
    assert echelon.rank == 1
    assert echelon.unit_pivots()
    assert echelon.contains({"a": 5})


def test_row_echelon_same_span():
    first = RowEchelon().extend([{"a": 1, "b": 1}, {"b": 1}])
    second = RowEchelon().extend([{"a": 1}, {"a": 1, "b": -1}])
    assert first.same_span(second)
    third = RowEchelon().extend([{"a": 2}, {"b": 1}])
    assert not first.same_span(third)


def test_integer_kernel_of_one_equation():
    """x + y = 0 has kernel spanned by x - y."""
    kernel = integer_kernel([{"x": 1, "y": 1}], ["x", "y"])
    assert len(kernel) == 1
    vector = kernel[0]
    assert abs(vector["x"]) == 1
    assert vector["x"] == -vector["y"]


def test_integer_kernel_rejects_unknown_column():
    with pytest.raises(InputError):
        integer_kernel([{"z": 1}], ["x"])


def test_homology_with_torsion():
    """a -> 2b leaves Z/2 in the degree of b."""
    complex_ = ZComplex({"a": (0, 0), "b": (1, 0)}, {"a": {"b": 2}})
    homology = complex_.homology()
    assert homology.group(1, 0) == HomologyGroup(0, (2,))
    assert homology.group(0, 0).is_zero()
    assert homology.total_rank() == 0


def test_homology_after_unit_cancellation():
    """A unit differential cancels and leaves the isolated generator."""
    complex_ = ZComplex(
        {"a": (0, 0), "b": (1, 0), "c": (0, 2)},
        {"a": {"b": -1}},
    )
    assert len(complex_.cancelled()) == 1
    homology = complex_.homology()
    assert homology == BigradedHomology({(0, 2): HomologyGroup(1)})
    assert homology.euler_characteristic() == {2: 1}
    assert homology.lines() == ["h=0 q=2: Z"]


def test_homology_json_round_trip_and_degree_check():
    homology = BigradedHomology({(0, 1): HomologyGroup(1), (3, 7): HomologyGroup(0, (2,))})
    assert BigradedHomology.from_json(homology.to_json()) == homology
    bad = ZComplex({"a": (0, 0), "b": (2, 0)}, {"a": {"b": 1}})
    assert bad.degree_witness() is not None
    with pytest.raises(InputError):
        bad.validate()


def test_solve_signs_finds_diagonal_change():
    """Two complexes that differ by the sign of one generator are identified."""
    first = ZComplex({"a": (0, 0), "b": (1, 0)}, {"a": {"b": 1}})
    second = ZComplex({"A": (0, 0), "B": (1, 0)}, {"A": {"B": -1}})
    signs = solve_signs(first, second, {"a": "A", "b": "B"})
    assert signs is not None
    assert signs["a"] * signs["b"] == -1


def test_homology_rejects_nonzero_d_squared():
    """a -> b -> c with both coefficients 1 is not a complex."""
    broken = ZComplex({"a": (0, 0), "b": (1, 0), "c": (2, 0)}, {"a": {"b": 1}, "b": {"c": 1}})
    assert broken.d_squared_witness() == {"generator": "'a'", "target": "'c'", "coefficient": 1}
    with pytest.raises(InputError):
        broken.homology()
    with pytest.raises(InputError):
        broken.homology(cancel=False)


def test_identification_must_be_a_total_bijection():
    complex_ = ZComplex({"a": (0, 0), "b": (1, 0)}, {"a": {"b": 1}})
    with pytest.raises(InputError):
        complexes_equal_under_identification(complex_, complex_, {"a": ("a", 1)})
    with pytest.raises(InputError):
        complexes_equal_under_identification(complex_, complex_, {"a": ("a", 1), "b": ("a", 1)})
    assert complexes_equal_under_identification(complex_, complex_, {"a": ("a", 1), "b": ("b", 1)})
    assert complexes_equal_under_identification(complex_, complex_, {"a": ("a", -1), "b": ("b", -1)})
    assert not complexes_equal_under_identification(complex_, complex_, {"a": ("a", 1), "b": ("b", -1)})


def test_smith_normal_form_on_random_matrices():
    """Certified transforms, a divisor chain led by the gcd of the entries, and the rational rank."""
    rng = random.Random(SEED)
    for _ in range(1000):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        matrix = [[rng.choice((0, 0, rng.randint(-6, 6))) for _ in range(cols)] for _ in range(rows)]
        form = smith_normal_form(matrix)
        certify_smith_form(matrix, form)
        assert form.rank == Matrix(matrix).rank()
        assert form.invariants[0] == math.gcd(*(value for row in matrix for value in row))
        for first, second in zip(form.invariants, form.invariants[1:]):
            assert first >= 0 and second >= 0
            if first:
                assert second % first == 0
            else:
                assert second == 0
