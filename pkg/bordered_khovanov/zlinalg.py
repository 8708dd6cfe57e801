"""Exact integer linear algebra: sparse combinations, echelon forms,
Smith normal form and bigraded homology of free Z-complexes."""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors, smith_normal_decomp

from .errors import InputError, VerificationError

logger = logging.getLogger(__name__)

Bigrading = Tuple[int, int]

NOT_TOTAL = "mapping is not defined on every generator"
NOT_BIJECTIVE = "mapping is not a bijection"


class Combination(dict):
    """A finite Z-linear combination of hashable keys. Zero coefficients are never stored."""

    @classmethod
    def single(cls, key: Hashable, coeff: int = 1) -> "Combination":
        result = cls()
        result.add_term(key, coeff)
        return result

    def add_term(self, key: Hashable, coeff: int) -> None:
        if not coeff:
            return
        value = self.get(key, 0) + coeff
        if value:
            self[key] = value
        else:
            self.pop(key, None)

    def add(self, other: Dict[Hashable, int], scale: int = 1) -> "Combination":
        result = Combination(self)
        if scale:
            for key, coeff in other.items():
                result.add_term(key, coeff * scale)
        return result

    def scaled(self, scale: int) -> "Combination":
        if not scale:
            return Combination()
        return Combination({key: coeff * scale for key, coeff in self.items()})

    def map_keys(self, fn: Callable[[Hashable], Hashable]) -> "Combination":
        result = Combination()
        for key, coeff in self.items():
            result.add_term(fn(key), coeff)
        return result

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other, -1)

    def __neg__(self):
        return self.scaled(-1)

    def __mul__(self, scale: int):
        return self.scaled(scale)

    __rmul__ = __mul__


def lin_sum(parts: Iterable[Tuple[int, Dict[Hashable, int]]]) -> Combination:
    """Sum of coeff * combination over the given pairs."""
    total = Combination()
    for coeff, part in parts:
        for key, value in part.items():
            total.add_term(key, coeff * value)
    return total


class RowEchelon:
    """Integer row echelon form over Z, kept in Hermite shape.

    Columns are compared with `order_key`; the smallest column of a row is its
    leading column. Inserting a vector keeps the Z-span exact by combining
    rows with Bezout coefficients whenever a pivot does not divide.
    """

    def __init__(self, order_key: Optional[Callable[[Hashable], Any]] = None):
        self._key = order_key or (lambda column: column)
        self._rows: Dict[Hashable, Combination] = {}
        self._sorted: Optional[List[Hashable]] = None

    def _lead(self, vector: Dict[Hashable, int]) -> Hashable:
        return min(vector, key=self._key)

    def insert(self, vector: Dict[Hashable, int]) -> bool:
        """Add a vector to the span. Returns True when the rank grew."""
        current = Combination(vector)
        while current:
            column = self._lead(current)
            coeff = current[column]
            pivot_row = self._rows.get(column)
            if pivot_row is None:
                if coeff < 0:
                    current = -current
                self._rows[column] = current
                self._sorted = None
                return True
            pivot = pivot_row[column]
            if coeff % pivot == 0:
                current = current.add(pivot_row, -(coeff // pivot))
                continue
            s, t, g = ZZ.gcdex(ZZ(pivot), ZZ(coeff))
            self._rows[column] = pivot_row.scaled(int(s)).add(current, int(t))
            current = pivot_row.scaled(coeff // int(g)).add(current, -(pivot // int(g)))
        return False

    def extend(self, vectors: Iterable[Dict[Hashable, int]]) -> "RowEchelon":
        for vector in vectors:
            self.insert(vector)
        return self

    def pivots(self) -> List[Hashable]:
        if self._sorted is None:
            self._sorted = sorted(self._rows, key=self._key)
        return self._sorted

    @property
    def rank(self) -> int:
        return len(self._rows)

    def unit_pivots(self) -> bool:
        return all(abs(row[column]) == 1 for column, row in self._rows.items())

    def reduce(self, vector: Dict[Hashable, int]) -> Combination:
        """Canonical representative of `vector` modulo the span."""
        current = Combination(vector)
        for column in self.pivots():
            coeff = current.get(column)
            if coeff is None:
                continue
            row = self._rows[column]
            quotient = coeff // row[column]
            if quotient:
                current = current.add(row, -quotient)
        return current

    def contains(self, vector: Dict[Hashable, int]) -> bool:
        return not self.reduce(vector)

    def hermite_rows(self) -> Dict[Hashable, Combination]:
        """Rows reduced against every later pivot; with unit pivots this is the RREF."""
        reduced: Dict[Hashable, Combination] = {}
        order = self.pivots()
        for index in range(len(order) - 1, -1, -1):
            column = order[index]
            row = self._rows[column]
            for later in order[index + 1:]:
                coeff = row.get(later)
                if coeff is None:
                    continue
                later_row = reduced[later]
                quotient = coeff // later_row[later]
                if quotient:
                    row = row.add(later_row, -quotient)
            reduced[column] = row
        return {column: reduced[column] for column in order}

    def rows(self) -> List[Combination]:
        return [self._rows[column] for column in self.pivots()]

    def same_span(self, other: "RowEchelon") -> bool:
        return all(other.contains(row) for row in self.rows()) and all(
            self.contains(row) for row in other.rows()
        )


@dataclass
class SmithForm:
    """U * A * V = D with U, V unimodular and D diagonal with a divisor chain."""

    left: List[List[int]]
    diagonal: List[List[int]]
    right: List[List[int]]
    invariants: List[int]

    @property
    def rank(self) -> int:
        return sum(1 for value in self.invariants if value)


def _domain_matrix(rows: Sequence[Sequence[int]], shape: Tuple[int, int]) -> DomainMatrix:
    return DomainMatrix([[ZZ(int(value)) for value in row] for row in rows], shape, ZZ)


def _to_ints(matrix: DomainMatrix) -> List[List[int]]:
    return [[int(value) for value in row] for row in matrix.to_list()]


def _identity(size: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(size)] for i in range(size)]


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> SmithForm:
    """Smith normal form with transformation matrices, certified before returning."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if rows == 0 or cols == 0:
        zero = [[0] * cols for _ in range(rows)]
        return SmithForm(_identity(rows), zero, _identity(cols), [])

    dm = _domain_matrix(matrix, (rows, cols))
    smf, left, right = smith_normal_decomp(dm)
    diagonal = _to_ints(smf)
    left_rows = _to_ints(left)

    # make the diagonal nonnegative by negating rows of U
    for i in range(min(rows, cols)):
        if diagonal[i][i] < 0:
            diagonal[i][i] = -diagonal[i][i]
            left_rows[i] = [-value for value in left_rows[i]]

    result = SmithForm(
        left_rows,
        diagonal,
        _to_ints(right),
        [diagonal[i][i] for i in range(min(rows, cols))],
    )
    certify_smith_form(matrix, result)
    return result


def certify_smith_form(matrix: Sequence[Sequence[int]], form: SmithForm) -> None:
    """Raise VerificationError unless U*A*V = D, det U = det V = +-1 and D is a divisor chain."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if not rows or not cols:
        return
    a = _domain_matrix(matrix, (rows, cols))
    u = _domain_matrix(form.left, (rows, rows))
    v = _domain_matrix(form.right, (cols, cols))
    d = _domain_matrix(form.diagonal, (rows, cols))
    if u * a * v != d:
        raise VerificationError("U*A*V differs from D", {"shape": [rows, cols]})
    if abs(int(u.det())) != 1 or abs(int(v.det())) != 1:
        raise VerificationError("transformation matrix is not unimodular", {"shape": [rows, cols]})
    for i in range(rows):
        for j in range(cols):
            if i != j and form.diagonal[i][j]:
                raise VerificationError("D is not diagonal", {"entry": [i, j]})
    chain = form.invariants
    for i in range(len(chain) - 1):
        if chain[i] == 0 and chain[i + 1] != 0:
            raise VerificationError("zero invariant before a nonzero one", {"index": i})
        if chain[i] and chain[i + 1] % chain[i]:
            raise VerificationError("invariants do not form a divisor chain", {"index": i})


def nonzero_invariants(rows: Sequence[Sequence[int]], shape: Tuple[int, int]) -> List[int]:
    """Nonzero invariant factors of a matrix, as positive integers."""
    if not shape[0] or not shape[1]:
        return []
    factors = invariant_factors(_domain_matrix(rows, shape))
    return [abs(int(value)) for value in factors if value]


def integer_kernel(vectors: Sequence[Dict[Hashable, int]], columns: Sequence[Hashable]) -> List[Combination]:
    """Saturated Z-basis of {x : <v, x> = 0 for every v in vectors}, over the given columns."""
    columns = list(columns)
    if not columns:
        return []
    index = {column: i for i, column in enumerate(columns)}
    matrix = []
    for vector in vectors:
        row = [0] * len(columns)
        for key, coeff in vector.items():
            if key not in index:
                raise InputError(f"column {key!r} outside the kernel basis")
            row[index[key]] = coeff
        if any(row):
            matrix.append(row)
    if not matrix:
        return [Combination.single(column) for column in columns]
    form = smith_normal_form(matrix)
    kernel = []
    for j in range(form.rank, len(columns)):
        vector = Combination()
        for i, column in enumerate(columns):
            vector.add_term(column, form.right[i][j])
        kernel.append(vector)
    return kernel


@dataclass(frozen=True)
class HomologyGroup:
    free: int
    torsion: Tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return not self.free and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free:
            parts.append("Z" if self.free == 1 else f"Z^{self.free}")
        parts.extend(f"Z/{order}" for order in self.torsion)
        return " + ".join(parts) if parts else "0"


@dataclass
class BigradedHomology:
    """Homology indexed by (homological degree h, quantum degree q)."""

    groups: Dict[Bigrading, HomologyGroup] = field(default_factory=dict)

    def __post_init__(self):
        self.groups = {key: group for key, group in self.groups.items() if not group.is_zero()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, BigradedHomology):
            return NotImplemented
        return self.groups == other.groups

    def group(self, h: int, q: int) -> HomologyGroup:
        return self.groups.get((h, q), HomologyGroup(0))

    def total_rank(self) -> int:
        return sum(group.free for group in self.groups.values())

    def euler_characteristic(self) -> Dict[int, int]:
        """Graded Euler characteristic: q -> sum over h of (-1)^h * rank."""
        totals: Dict[int, int] = defaultdict(int)
        for (h, q), group in self.groups.items():
            totals[q] += (-1) ** (h % 2) * group.free
        return {q: value for q, value in sorted(totals.items()) if value}

    def to_json(self) -> List[Dict[str, Any]]:
        return [
            {"h": h, "q": q, "free": group.free, "torsion": list(group.torsion)}
            for (h, q), group in sorted(self.groups.items())
        ]

    @classmethod
    def from_json(cls, entries: Iterable[Dict[str, Any]]) -> "BigradedHomology":
        return cls(
            {
                (int(entry["h"]), int(entry["q"])): HomologyGroup(
                    int(entry["free"]), tuple(int(t) for t in entry.get("torsion", ()))
                )
                for entry in entries
            }
        )

    def lines(self) -> List[str]:
        return [f"h={h} q={q}: {group}" for (h, q), group in sorted(self.groups.items())]


class ZComplex:
    """A finitely generated free bigraded chain complex over Z.

    `grading` maps each generator to (h, q); d raises h by one and preserves q.
    """

    def __init__(self, grading: Dict[Hashable, Bigrading], differential: Dict[Hashable, Dict[Hashable, int]]):
        self.grading = dict(grading)
        self.differential: Dict[Hashable, Combination] = {
            gen: Combination(differential.get(gen, {})) for gen in self.grading
        }

    @property
    def generators(self) -> List[Hashable]:
        return list(self.grading)

    def __len__(self) -> int:
        return len(self.grading)

    def d(self, element: Dict[Hashable, int]) -> Combination:
        return lin_sum((coeff, self.differential[gen]) for gen, coeff in element.items())

    def d_squared_witness(self) -> Optional[Dict[str, Any]]:
        for gen in self.grading:
            square = self.d(self.differential[gen])
            if square:
                target, coeff = next(iter(square.items()))
                return {"generator": repr(gen), "target": repr(target), "coefficient": coeff}
        return None

    def degree_witness(self) -> Optional[Dict[str, Any]]:
        for gen, image in self.differential.items():
            h, q = self.grading[gen]
            for target in image:
                if target not in self.grading:
                    return {"generator": repr(gen), "target": repr(target), "reason": "unknown target"}
                if self.grading[target] != (h + 1, q):
                    return {
                        "generator": repr(gen),
                        "target": repr(target),
                        "source_grading": [h, q],
                        "target_grading": list(self.grading[target]),
                    }
        return None

    def validate(self) -> None:
        witness = self.degree_witness() or self.d_squared_witness()
        if witness is not None:
            raise InputError(f"not a bigraded chain complex: {witness}")

    def regraded(self, fn: Callable[[Bigrading], Bigrading]) -> "ZComplex":
        return ZComplex({gen: fn(grading) for gen, grading in self.grading.items()}, self.differential)

    def chain_euler_characteristic(self) -> Dict[int, int]:
        totals: Dict[int, int] = defaultdict(int)
        for h, q in self.grading.values():
            totals[q] += (-1) ** (h % 2)
        return {q: value for q, value in sorted(totals.items()) if value}

    def cancelled(self) -> "ZComplex":
        """Homotopy equivalent complex with every unit coefficient cancelled."""
        diff = {gen: Combination(image) for gen, image in self.differential.items()}
        incoming: Dict[Hashable, set] = defaultdict(set)
        for gen, image in diff.items():
            for target in image:
                incoming[target].add(gen)

        def set_image(gen: Hashable, image: Combination) -> None:
            for target in diff[gen]:
                if target not in image:
                    incoming[target].discard(gen)
            for target in image:
                incoming[target].add(gen)
            diff[gen] = image

        queue = deque(self.grading)
        removed = 0
        while queue:
            x = queue.popleft()
            if x not in diff:
                continue
            units = [y for y, c in diff[x].items() if c in (1, -1) and y in diff]
            if not units:
                continue
            y = min(units, key=lambda target: len(incoming[target]))
            c = diff[x][y]
            for z in list(incoming[y]):
                if z == x or z not in diff:
                    continue
                b = diff[z][y]
                set_image(z, diff[z].add(diff[x], -b * c))
                queue.append(z)
            for w in list(incoming[x]):
                if w in diff:
                    image = Combination(diff[w])
                    image.pop(x, None)
                    set_image(w, image)
            for gen in (x, y):
                set_image(gen, Combination())
                del diff[gen]
                incoming.pop(gen, None)
            removed += 2
        logger.debug(f"Cancelled {removed} of {len(self.grading)} generators")
        return ZComplex({gen: self.grading[gen] for gen in diff}, diff)

    def homology(self, cancel: bool = True) -> BigradedHomology:
        """Bigraded homology via Smith normal form of each differential block.

        Raises InputError unless d is of degree (1, 0) and d^2 = 0.
        """
        self.validate()
        complex_ = self.cancelled() if cancel else self
        by_degree: Dict[Bigrading, List[Hashable]] = defaultdict(list)
        for gen, grading in complex_.grading.items():
            by_degree[grading].append(gen)

        invariant_cache: Dict[Bigrading, List[int]] = {}

        def outgoing_invariants(degree: Bigrading) -> List[int]:
            if degree not in invariant_cache:
                sources = by_degree.get(degree, [])
                targets = by_degree.get((degree[0] + 1, degree[1]), [])
                target_index = {gen: i for i, gen in enumerate(targets)}
                rows = [[0] * len(sources) for _ in targets]
                for j, gen in enumerate(sources):
                    for target, coeff in complex_.differential[gen].items():
                        rows[target_index[target]][j] = coeff
                invariant_cache[degree] = nonzero_invariants(rows, (len(targets), len(sources)))
            return invariant_cache[degree]

        groups = {}
        for (h, q), gens in by_degree.items():
            outgoing = outgoing_invariants((h, q))
            incoming = outgoing_invariants((h - 1, q))
            free = len(gens) - len(outgoing) - len(incoming)
            torsion = tuple(sorted(value for value in incoming if value > 1))
            groups[(h, q)] = HomologyGroup(free, torsion)
        return BigradedHomology(groups)


def identification_witness(
    first: ZComplex,
    second: ZComplex,
    mapping: Dict[Hashable, Tuple[Hashable, int]],
    negate_q: bool = False,
) -> Optional[Dict[str, Any]]:
    """First place where `mapping` (g1 -> (g2, sign)) fails to be an isomorphism of complexes."""
    if len(mapping) != len(first.grading) or set(mapping) != set(first.grading):
        return {"reason": NOT_TOTAL}
    images = [target for target, _ in mapping.values()]
    if len(set(images)) != len(images) or set(images) != set(second.grading):
        return {"reason": NOT_BIJECTIVE}
    for gen, (target, sign) in mapping.items():
        if sign not in (1, -1):
            return {"generator": repr(gen), "reason": "sign must be +1 or -1"}
        h, q = first.grading[gen]
        expected = (h, -q if negate_q else q)
        if second.grading[target] != expected:
            return {
                "generator": repr(gen),
                "reason": "grading",
                "first": list(first.grading[gen]),
                "second": list(second.grading[target]),
            }
    for gen, (target, sign) in mapping.items():
        pushed = Combination()
        for source_target, coeff in first.differential[gen].items():
            image, image_sign = mapping[source_target]
            pushed.add_term(image, coeff * image_sign)
        expected = second.differential[target].scaled(sign)
        if pushed != expected:
            return {"generator": repr(gen), "reason": "differential", "difference": len(pushed - expected)}
    return None


def complexes_equal_under_identification(
    first: ZComplex,
    second: ZComplex,
    mapping: Dict[Hashable, Tuple[Hashable, int]],
    negate_q: bool = False,
) -> bool:
    """True when `mapping` is an isomorphism; a mapping that is not a total bijection is an input error."""
    witness = identification_witness(first, second, mapping, negate_q)
    if witness is not None and witness["reason"] in (NOT_TOTAL, NOT_BIJECTIVE):
        raise InputError(f"identification rejected: {witness['reason']}")
    return witness is None


def solve_signs(
    first: ZComplex,
    second: ZComplex,
    base: Dict[Hashable, Hashable],
    negate_q: bool = False,
) -> Optional[Dict[Hashable, int]]:
    """Signs s with g -> (base[g], s[g]) an isomorphism, or None if no diagonal sign change works."""
    if set(base) != set(first.grading):
        return None
    neighbours: Dict[Hashable, List[Tuple[Hashable, int]]] = defaultdict(list)
    for gen, image in first.differential.items():
        for target, coeff in image.items():
            other = second.differential.get(base[gen], {}).get(base[target], 0)
            if abs(other) != abs(coeff):
                return None
            ratio = other // coeff
            neighbours[gen].append((target, ratio))
            neighbours[target].append((gen, ratio))
    signs: Dict[Hashable, int] = {}
    for start in first.grading:
        if start in signs:
            continue
        signs[start] = 1
        queue = deque([start])
        while queue:
            gen = queue.popleft()
            for other, ratio in neighbours[gen]:
                wanted = signs[gen] * ratio
                if other not in signs:
                    signs[other] = wanted
                    queue.append(other)
                elif signs[other] != wanted:
                    return None
    mapping = {gen: (base[gen], signs[gen]) for gen in first.grading}
    if identification_witness(first, second, mapping, negate_q) is not None:
        return None
    return signs
