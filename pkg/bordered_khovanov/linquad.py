"""Presented path algebras over Z: normal forms, quadratic parts and quadratic duals.

An algebra is given by idempotents, weighted generators between idempotents,
homogeneous relations and optionally a differential on generators. Normal forms
are computed piece by piece (left idempotent, right idempotent, bidegree,
weight) by spanning the two-sided ideal inside that piece.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .errors import InputError, PresentationError, ResourceError, VerificationError
from .framework.check_result import CheckReport
from .zlinalg import Combination, RowEchelon, integer_kernel, lin_sum

logger = logging.getLogger(__name__)

DEFAULT_MAX_WORDS = 200000

Bidegree = Tuple[int, int]
Piece = Tuple[Hashable, Hashable, Bidegree, int]


@dataclass(frozen=True)
class Monomial:
    """A composable word of generator names from `left` to `right`; empty letters is the idempotent."""

    left: Hashable
    right: Hashable
    letters: Tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return f"e[{self.left}]"
        return "*".join(self.letters)


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    left: Hashable
    right: Hashable
    bidegree: Bidegree  # (doubled intrinsic degree, homological degree)
    weight: int


def default_word_key(word: Monomial) -> Tuple:
    return (-len(word.letters), word.letters)


@dataclass
class QuadraticRow:
    pivot: Monomial
    quadratic: Combination
    linear: Combination


@dataclass
class QuadraticData:
    """RREF of the relations, split into quadratic part I and linear part phi, per piece."""

    rows: Dict[Piece, List[QuadraticRow]] = field(default_factory=dict)

    def ideal(self) -> List[Combination]:
        return [row.quadratic for rows in self.rows.values() for row in rows]

    def phi(self) -> Dict[Monomial, Combination]:
        return {row.pivot: row.linear for rows in self.rows.values() for row in rows}


class PresentedAlgebra:
    def __init__(
        self,
        name: str,
        idempotents: Sequence[Hashable],
        generators: Sequence[GeneratorSpec],
        relations: Sequence[Dict[Monomial, int]],
        differential: Optional[Dict[str, Dict[Monomial, int]]] = None,
        max_weight: Optional[int] = None,
        word_key: Optional[Callable[[Monomial], Any]] = None,
        max_words: int = DEFAULT_MAX_WORDS,
    ):
        """
        :param max_weight: every word of larger weight is asserted to vanish in the quotient.
        :param word_key: column order for normal forms; pivots (smallest keys) are rewritten.
        """
        self.name = name
        self.idempotents = list(idempotents)
        self.generators: Dict[str, GeneratorSpec] = {}
        for spec in generators:
            if spec.name in self.generators:
                raise PresentationError(f"{name}: duplicate generator {spec.name}")
            if spec.weight < 1:
                raise PresentationError(f"{name}: generator {spec.name} has weight {spec.weight}")
            self.generators[spec.name] = spec
        self.differential = {key: Combination(value) for key, value in (differential or {}).items()}
        self.max_weight = max_weight
        self.word_key = word_key or default_word_key
        self.max_words = max_words
        self.relations = [Combination(r) for r in relations if r]

        self._by_left: Dict[Hashable, List[GeneratorSpec]] = defaultdict(list)
        for spec in self.generators.values():
            self._by_left[spec.left].append(spec)
        self._words: Dict[int, Dict[Hashable, List[Monomial]]] = {}
        self._pieces: Dict[int, Dict[Piece, List[Monomial]]] = {}
        self._ideal: Dict[Piece, RowEchelon] = {}
        self._relations_by_piece: Dict[Piece, List[Combination]] = defaultdict(list)
        self._built_weight = -1
        for relation in self.relations:
            pieces = {self.piece(word) for word in relation}
            if len(pieces) != 1:
                raise PresentationError(f"{name}: relation is not homogeneous: {self.format(relation)}")
            self._relations_by_piece[pieces.pop()].append(relation)

    # words

    def unit(self, idem: Hashable) -> Monomial:
        return Monomial(idem, idem, ())

    def monomial(self, *letters: str) -> Monomial:
        if not letters:
            raise InputError("use unit() for idempotent words")
        specs = [self.generators[name] for name in letters]
        for first, second in zip(specs, specs[1:]):
            if first.right != second.left:
                raise InputError(f"{first.name} and {second.name} are not composable")
        return Monomial(specs[0].left, specs[-1].right, tuple(letters))

    def word(self, *letters: str) -> Combination:
        return Combination.single(self.monomial(*letters))

    def bidegree(self, word: Monomial) -> Bidegree:
        s = h = 0
        for name in word.letters:
            spec = self.generators[name]
            s += spec.bidegree[0]
            h += spec.bidegree[1]
        return (s, h)

    def weight(self, word: Monomial) -> int:
        return sum(self.generators[name].weight for name in word.letters)

    def hom_degree(self, word: Monomial) -> int:
        return self.bidegree(word)[1]

    def left(self, word: Monomial) -> Hashable:
        return word.left

    def right(self, word: Monomial) -> Hashable:
        return word.right

    def piece(self, word: Monomial) -> Piece:
        return (word.left, word.right, self.bidegree(word), self.weight(word))

    def words_of_weight(self, weight: int) -> Dict[Hashable, List[Monomial]]:
        """Composable words of exactly this weight, grouped by left idempotent."""
        if weight in self._words:
            return self._words[weight]
        result: Dict[Hashable, List[Monomial]] = defaultdict(list)
        if weight == 0:
            for idem in self.idempotents:
                result[idem].append(self.unit(idem))
        else:
            for spec in self.generators.values():
                rest = weight - spec.weight
                if rest < 0:
                    continue
                for tail in self.words_of_weight(rest).get(spec.right, []):
                    result[spec.left].append(Monomial(spec.left, tail.right, (spec.name,) + tail.letters))
        total = sum(len(words) for words in result.values())
        if total > self.max_words:
            raise ResourceError(f"{self.name}: {total} words of weight {weight} exceed limit {self.max_words}")
        self._words[weight] = dict(result)
        return self._words[weight]

    def pieces_of_weight(self, weight: int) -> Dict[Piece, List[Monomial]]:
        if weight not in self._pieces:
            pieces: Dict[Piece, List[Monomial]] = defaultdict(list)
            for words in self.words_of_weight(weight).values():
                for word in words:
                    pieces[self.piece(word)].append(word)
            self._pieces[weight] = dict(pieces)
        return self._pieces[weight]

    # normal forms

    def _build_through(self, weight: int) -> None:
        for level in range(self._built_weight + 1, weight + 1):
            spans: Dict[Piece, List[Combination]] = defaultdict(list)
            for piece, relations in self._relations_by_piece.items():
                if piece[3] == level:
                    spans[piece].extend(relations)
            for spec in self.generators.values():
                lower = level - spec.weight
                if lower < 1:
                    continue
                for piece, echelon in self._ideal.items():
                    if piece[3] != lower:
                        continue
                    left, right, (s, h), _ = piece
                    s2, h2 = spec.bidegree
                    if right == spec.left:
                        target = (left, spec.right, (s + s2, h + h2), level)
                        spans[target].extend(self._append(row, spec) for row in echelon.rows())
                    if spec.right == left:
                        target = (spec.left, right, (s + s2, h + h2), level)
                        spans[target].extend(self._prepend(spec, row) for row in echelon.rows())
            for piece, rows in spans.items():
                echelon = RowEchelon(self.word_key)
                echelon.extend(rows)
                if echelon.rank:
                    self._ideal[piece] = echelon
            self._built_weight = level
            logger.debug(f"{self.name}: ideal built through weight {level}")

    @staticmethod
    def _append(row: Combination, spec: GeneratorSpec) -> Combination:
        return row.map_keys(lambda w: Monomial(w.left, spec.right, w.letters + (spec.name,)))

    @staticmethod
    def _prepend(spec: GeneratorSpec, row: Combination) -> Combination:
        return row.map_keys(lambda w: Monomial(spec.left, w.right, (spec.name,) + w.letters))

    def ideal_echelon(self, piece: Piece) -> Optional[RowEchelon]:
        weight = piece[3]
        if weight > self._built_weight:
            self._build_through(weight)
        return self._ideal.get(piece)

    def reduce(self, element: Dict[Monomial, int]) -> Combination:
        """Normal form of an element; words above max_weight vanish."""
        by_piece: Dict[Piece, Combination] = defaultdict(Combination)
        for word, coeff in element.items():
            by_piece[self.piece(word)].add_term(word, coeff)
        result = Combination()
        for piece, part in by_piece.items():
            if self.max_weight is not None and piece[3] > self.max_weight:
                continue
            echelon = self.ideal_echelon(piece)
            reduced = echelon.reduce(part) if echelon is not None else part
            for word, coeff in reduced.items():
                result.add_term(word, coeff)
        return result

    def is_zero(self, element: Dict[Monomial, int]) -> bool:
        return not self.reduce(element)

    def concat(self, u: Dict[Monomial, int], v: Dict[Monomial, int]) -> Combination:
        result = Combination()
        for x, a in u.items():
            for y, b in v.items():
                if x.right == y.left:
                    result.add_term(Monomial(x.left, y.right, x.letters + y.letters), a * b)
        return result

    def mul(self, u: Dict[Monomial, int], v: Dict[Monomial, int]) -> Combination:
        return self.reduce(self.concat(u, v))

    def d_word(self, word: Monomial) -> Combination:
        """Leibniz rule mu1(xy) = (-1)^{deg_h y} mu1(x) y + x mu1(y), unreduced."""
        result = Combination()
        letters = word.letters
        for i, name in enumerate(letters):
            image = self.differential.get(name)
            if not image:
                continue
            tail_degree = sum(self.generators[other].bidegree[1] for other in letters[i + 1:])
            sign = -1 if tail_degree % 2 else 1
            head = Monomial(word.left, self.generators[name].left, letters[:i])
            tail = Monomial(self.generators[name].right, word.right, letters[i + 1:])
            for middle, coeff in image.items():
                result.add_term(Monomial(word.left, word.right, head.letters + middle.letters + tail.letters), sign * coeff)
        return result

    def d(self, element: Dict[Monomial, int]) -> Combination:
        return self.reduce(lin_sum((coeff, self.d_word(word)) for word, coeff in element.items()))

    def basis_words(self, piece: Piece) -> List[Monomial]:
        words = self.pieces_of_weight(piece[3]).get(piece, [])
        echelon = self.ideal_echelon(piece)
        pivots = set(echelon.pivots()) if echelon is not None else set()
        return sorted((w for w in words if w not in pivots), key=self.word_key)

    def rank(self, piece: Piece) -> int:
        words = self.pieces_of_weight(piece[3]).get(piece, [])
        echelon = self.ideal_echelon(piece)
        return len(words) - (echelon.rank if echelon is not None else 0)

    def ranks(self, through_weight: Optional[int] = None) -> Dict[Piece, int]:
        top = self.max_weight if through_weight is None else through_weight
        if top is None:
            raise InputError(f"{self.name}: no weight bound, pass through_weight")
        result = {}
        for weight in range(top + 1):
            for piece in self.pieces_of_weight(weight):
                result[piece] = self.rank(piece)
        return result

    def torsion_pieces(self, through_weight: Optional[int] = None) -> List[Piece]:
        top = self.max_weight if through_weight is None else through_weight
        self._build_through(top)
        return [piece for piece, echelon in self._ideal.items() if piece[3] <= top and not echelon.unit_pivots()]

    def total_rank(self) -> int:
        return sum(self.ranks().values())

    def check_d_squared(self) -> CheckReport:
        for name in self.generators:
            square = self.d(self.d(self.word(name)))
            if square:
                return CheckReport.from_witness("mu1^2 = 0", {"generator": name, "terms": len(square)})
        for name, image in self.differential.items():
            spec = self.generators[name]
            for word in image:
                if self.bidegree(word) != (spec.bidegree[0], spec.bidegree[1] + 1) or self.weight(word) != spec.weight:
                    return CheckReport.from_witness("mu1 degree", {"generator": name, "word": str(word)})
        return CheckReport.from_witness("mu1^2 = 0", None)

    def format(self, element: Dict[Monomial, int]) -> str:
        if not element:
            return "0"
        parts = []
        for word, coeff in sorted(element.items(), key=lambda item: (str(item[0]), item[1])):
            parts.append(f"{'+' if coeff > 0 else '-'} {abs(coeff) if abs(coeff) != 1 else ''}{word}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    def export_lines(self) -> List[str]:
        """Line format: `idem`, `gen` and `rel` records, relations as coefficient/word pairs."""
        labels = {idem: f"e{i}" for i, idem in enumerate(self.idempotents)}
        lines = [f"algebra {self.name}"]
        lines.extend(f"idem {label} {idem}" for idem, label in labels.items())
        for spec in self.generators.values():
            lines.append(
                f"gen {spec.name} {labels[spec.left]} {labels[spec.right]} {spec.bidegree[0]} {spec.bidegree[1]} {spec.weight}"
            )
        for relation in self.relations:
            terms = " ".join(f"{coeff} {'.'.join(word.letters)}" for word, coeff in sorted(relation.items(), key=lambda item: item[0].letters))
            lines.append(f"rel {terms}")
        for name, image in self.differential.items():
            terms = " ".join(f"{coeff} {'.'.join(word.letters)}" for word, coeff in sorted(image.items(), key=lambda item: item[0].letters))
            lines.append(f"d {name} {terms}")
        return lines


def _quadratic_key(base: Callable[[Monomial], Any]) -> Callable[[Monomial], Any]:
    def key(word: Monomial) -> Tuple:
        return (0 if len(word.letters) == 2 else 1, base(word))

    return key


def quadratic_part(algebra: PresentedAlgebra) -> QuadraticData:
    """Split the relations into R = {r + phi(r)} with r quadratic and phi(r) linear."""
    key = _quadratic_key(algebra.word_key)
    data = QuadraticData()
    for piece, relations in algebra._relations_by_piece.items():
        for relation in relations:
            for word in relation:
                if len(word.letters) not in (1, 2):
                    raise PresentationError(f"{algebra.name}: relation has a word of length {len(word.letters)}")
        echelon = RowEchelon(key).extend(relations)
        if not echelon.unit_pivots():
            raise PresentationError(f"{algebra.name}: relations in piece {piece} need a non-unit pivot")
        rows = []
        for pivot, row in echelon.hermite_rows().items():
            if len(pivot.letters) != 2:
                raise PresentationError(f"{algebra.name}: purely linear relation {algebra.format(row)}")
            quadratic = Combination({w: c for w, c in row.items() if len(w.letters) == 2})
            linear = Combination({w: c for w, c in row.items() if len(w.letters) == 1})
            rows.append(QuadraticRow(pivot, quadratic, linear))
        data.rows[piece] = rows
    return data


def quadratic_algebra(algebra: PresentedAlgebra, name: Optional[str] = None) -> PresentedAlgebra:
    """The homogeneous quadratic algebra T(V)/(I)."""
    data = quadratic_part(algebra)
    return PresentedAlgebra(
        name or f"{algebra.name}^(0)",
        algebra.idempotents,
        list(algebra.generators.values()),
        data.ideal(),
        max_weight=algebra.max_weight,
        word_key=algebra.word_key,
        max_words=algebra.max_words,
    )


def dual_name(name: str) -> str:
    return f"{name}*"


def _quadratic_words(algebra: PresentedAlgebra) -> Dict[Piece, List[Monomial]]:
    pieces: Dict[Piece, List[Monomial]] = defaultdict(list)
    for first in algebra.generators.values():
        for second in algebra._by_left.get(first.right, []):
            word = Monomial(first.left, second.right, (first.name, second.name))
            pieces[algebra.piece(word)].append(word)
    return pieces


def annihilator(
    ideal_rows: Sequence[QuadraticRow],
    words: Sequence[Monomial],
) -> List[Combination]:
    """Lexicographic basis of I-perp in one piece: v* - sum_k I[k][v] w_k* for every non-pivot v."""
    pivots = {row.pivot for row in ideal_rows}
    result = []
    for word in words:
        if word in pivots:
            continue
        element = Combination.single(word)
        for row in ideal_rows:
            coeff = row.quadratic.get(word)
            if coeff:
                element.add_term(row.pivot, -coeff)
        result.append(element)
    return result


def quadratic_dual(
    algebra: PresentedAlgebra,
    rename: Callable[[str], str] = dual_name,
    name: Optional[str] = None,
    bounded: bool = True,
) -> PresentedAlgebra:
    """The Koszul-type dual (T(V*)/(I-perp), mu1 dual to phi).

    The pairing is <a*b*, cd> = [a = c][b = d]. I-perp is built lexicographically
    from the RREF of I and cross-checked against the integer kernel of I.
    """
    data = quadratic_part(algebra)
    words_by_piece = _quadratic_words(algebra)

    def star(word: Monomial) -> Monomial:
        return Monomial(word.left, word.right, tuple(rename(letter) for letter in word.letters))

    relations: List[Combination] = []
    for piece, words in words_by_piece.items():
        rows = data.rows.get(piece, [])
        lexicographic = annihilator(rows, words)
        kernel = integer_kernel([row.quadratic for row in rows], words)
        if not RowEchelon().extend([k.map_keys(lambda w: w.letters) for k in kernel]).same_span(
            RowEchelon().extend([v.map_keys(lambda w: w.letters) for v in lexicographic])
        ):
            raise VerificationError(
                f"{algebra.name}: annihilator bases disagree in piece {piece}",
                {"piece": str(piece)},
            )
        relations.extend(element.map_keys(star) for element in lexicographic)

    differential: Dict[str, Combination] = defaultdict(Combination)
    for rows in data.rows.values():
        for row in rows:
            for word, coeff in row.linear.items():
                differential[rename(word.letters[0])].add_term(star(row.pivot), coeff)

    generators = [
        GeneratorSpec(rename(spec.name), spec.left, spec.right, (-spec.bidegree[0], 1 - spec.bidegree[1]), spec.weight)
        for spec in algebra.generators.values()
    ]
    def dual_key(word: Monomial) -> Tuple:
        return (-len(word.letters), word.letters)

    dual = PresentedAlgebra(
        name or f"{algebra.name}!",
        algebra.idempotents,
        generators,
        relations,
        differential={key: value for key, value in differential.items() if value},
        max_weight=algebra.max_weight if bounded else None,
        word_key=dual_key,
        max_words=algebra.max_words,
    )
    logger.info(f"Built {dual.name}: {len(generators)} generators, {len(relations)} relations")
    return dual


def formal_dual_presentation(algebra: PresentedAlgebra) -> PresentedAlgebra:
    """The dual presentation with no weight bound, for duals that are infinite rank."""
    return quadratic_dual(algebra, bounded=False)


@dataclass
class PresentationOracle:
    """A target algebra for checking a presentation.

    `evaluate` sends a word to its image, `rank` gives the target rank of a piece.
    """

    evaluate: Callable[[Monomial], Dict[Hashable, int]]
    rank: Callable[[Piece], int]


def verify_presentation(algebra: PresentedAlgebra, oracle: PresentationOracle) -> CheckReport:
    """Relations vanish, ranks agree piece by piece, the normal-form basis maps injectively,
    and the pieces one weight above the bound vanish."""
    if algebra.max_weight is None:
        return CheckReport.failure_result(f"{algebra.name}: no weight bound to verify against")

    for index, relation in enumerate(algebra.relations):
        image = lin_sum((coeff, oracle.evaluate(word)) for word, coeff in relation.items())
        if image:
            return CheckReport.from_witness(
                "relations vanish", {"relation": index, "text": algebra.format(relation)}
            )

    ranks = {}
    for weight in range(algebra.max_weight + 1):
        for piece in algebra.pieces_of_weight(weight):
            rank = algebra.rank(piece)
            expected = oracle.rank(piece)
            ranks[str(piece)] = rank
            if rank != expected:
                return CheckReport.from_witness(
                    "ranks agree", {"piece": str(piece), "rank": rank, "expected": expected}
                )
            images = RowEchelon()
            for word in algebra.basis_words(piece):
                images.insert(oracle.evaluate(word))
            if images.rank != rank:
                return CheckReport.from_witness(
                    "normal forms independent", {"piece": str(piece), "rank": images.rank, "expected": rank}
                )

    above = algebra.max_weight + 1
    for piece in algebra.pieces_of_weight(above):
        rank = algebra.rank(piece)
        if rank:
            return CheckReport.from_witness("top weight vanishes", {"piece": str(piece), "rank": rank})

    torsion = algebra.torsion_pieces()
    if torsion:
        return CheckReport.from_witness("free quotient", {"piece": str(torsion[0])})
    return CheckReport.success_result(
        data={"pieces": len(ranks), "rank": sum(ranks.values())},
        metadata={"check": f"presentation of {algebra.name}"},
    )


def same_relation_span(relations_a: Iterable[Dict[Monomial, int]], relations_b: Iterable[Dict[Monomial, int]]) -> bool:
    first = RowEchelon().extend(Combination(r).map_keys(lambda w: w.letters) for r in relations_a)
    second = RowEchelon().extend(Combination(r).map_keys(lambda w: w.letters) for r in relations_b)
    return first.same_span(second)
