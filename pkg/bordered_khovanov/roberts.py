"""Roberts-type algebras rebuilt from H^n.

B_R(H^n) is the path algebra of matrix units e(h1, h2) on the basis beta of H^n
generated by right multiplication with beta_mult. Its quadratic dual, mirrored,
supplies the left-pointing letters of the product algebra B . m(B)!, and the
rank-one DD bimodules pair the two halves.

Letters are named by kind and by indices into `arcalg.basis(n)`:
`bg_i_j` / `bc_i_j` for right-pointing generators h_i -> h_j and `dg_i_j` /
`dc_i_j` for the mirrored duals, which sit between the P-idempotents h_i -> h_j.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Hashable, Iterable, List, Optional, Set, Tuple

from . import arcalg
from .arcalg import SignedDiagram
from .errors import InputError, SizeError, VerificationError
from .framework.check_result import CheckReport
from .linquad import (
    GeneratorSpec,
    Monomial,
    Piece,
    PresentationOracle,
    PresentedAlgebra,
    dual_name,
    formal_dual_presentation,
    quadratic_dual,
    quadratic_part,
    same_relation_span,
    verify_presentation,
)
from .zlinalg import Combination, RowEchelon, integer_kernel

logger = logging.getLogger(__name__)

MAX_N = 3

GAMMA = "g"
CIRCLE = "c"
WEIGHTS = {GAMMA: 1, CIRCLE: 2}

FULL = "full"
GAMMA_QUOTIENT = "gamma"
MODES = (FULL, GAMMA_QUOTIENT)

K_B_BDUAL = "B-Bdual"
K_BDUAL_B = "Bdual-B"
K_PRODUCT = "product"
DD_KINDS = (K_B_BDUAL, K_BDUAL_B, K_PRODUCT)

ROBERTS = "roberts"
HN = "hn"

ISOLATED = "isolated"
SEGMENT = "segment"
TRIANGLE = "triangle"
TETRAHEDRON = "tetrahedron"
SHAPES = {2: SEGMENT, 3: TRIANGLE, 4: TETRAHEDRON}


def _check_n(n: int) -> None:
    if not isinstance(n, int) or not 1 <= n <= MAX_N:
        raise SizeError(f"n = {n} outside 1..{MAX_N} for the Roberts-type algebras")


# idempotents


@lru_cache(maxsize=None)
def beta_index(n: int) -> Dict[SignedDiagram, int]:
    return {h: i for i, h in enumerate(arcalg.basis(n))}


def idempotent_label(h: SignedDiagram) -> str:
    return f"h{beta_index(h.n)[h]}"


def mirror_word(word: Monomial) -> Monomial:
    return Monomial(arcalg.mirror(word.left), arcalg.mirror(word.right), word.letters)


def mirr(element: Dict[Monomial, int]) -> Combination:
    """The ring isomorphism A -> m(A): same letters, idempotents mirrored."""
    return Combination(element).map_keys(mirror_word)


def mirror_algebra(algebra: PresentedAlgebra, name: Optional[str] = None) -> PresentedAlgebra:
    """m(A): the same ring with every idempotent of I_beta reflected."""
    mirror = arcalg.mirror
    generators = [
        GeneratorSpec(spec.name, mirror(spec.left), mirror(spec.right), spec.bidegree, spec.weight)
        for spec in algebra.generators.values()
    ]
    return PresentedAlgebra(
        name or f"m({algebra.name})",
        [mirror(idem) for idem in algebra.idempotents],
        generators,
        [mirr(relation) for relation in algebra.relations],
        differential={key: mirr(value) for key, value in algebra.differential.items()},
        max_weight=algebra.max_weight,
        word_key=algebra.word_key,
        max_words=algebra.max_words,
    )


# generators


@dataclass(frozen=True)
class RobertsGenerator:
    """b_{gamma;h1,h2} / b_{C;h1,h2}, or with `dual` set the letter m(b*) of P."""

    kind: str
    source: SignedDiagram
    target: SignedDiagram
    dual: bool = False

    @property
    def name(self) -> str:
        index = beta_index(self.source.n)
        prefix = "d" if self.dual else "b"
        return f"{prefix}{self.kind}_{index[self.source]}_{index[self.target]}"

    @property
    def weight(self) -> int:
        return WEIGHTS[self.kind]

    @property
    def bidegree(self) -> Tuple[int, int]:
        # doubled intrinsic degree, homological degree
        if self.dual:
            return (self.weight, 1)
        return (-self.weight, 0)

    def spec(self) -> GeneratorSpec:
        return GeneratorSpec(self.name, self.source, self.target, self.bidegree, self.weight)

    def word(self) -> Monomial:
        return Monomial(self.source, self.target, (self.name,))

    def partner(self) -> "RobertsGenerator":
        """b(h1 -> h2) <-> m(b*) between m(h1) and m(h2)."""
        return RobertsGenerator(self.kind, arcalg.mirror(self.source), arcalg.mirror(self.target), not self.dual)


@lru_cache(maxsize=None)
def right_generators(n: int) -> Tuple[RobertsGenerator, ...]:
    """e(h1, h2) for every h2 occurring in h1 * h with h in beta_mult."""
    _check_n(n)
    table = arcalg.structure_constants(n)
    found: Dict[Tuple[SignedDiagram, SignedDiagram], str] = {}
    for h1 in arcalg.basis(n):
        for h in arcalg.beta_mult(n):
            product = table.get((h1, h))
            if not product:
                continue
            kind = GAMMA if arcalg.generator_kind(h) == "gamma" else CIRCLE
            for h2 in product:
                previous = found.setdefault((h1, h2), kind)
                if previous != kind:
                    raise VerificationError(
                        "generator reached by both kinds of multiplier",
                        {"source": str(h1), "target": str(h2)},
                    )
    generators = [RobertsGenerator(kind, h1, h2) for (h1, h2), kind in found.items()]
    index = beta_index(n)
    return tuple(sorted(generators, key=lambda g: (g.kind, index[g.source], index[g.target])))


@lru_cache(maxsize=None)
def left_generators(n: int) -> Tuple[RobertsGenerator, ...]:
    return tuple(g.partner() for g in right_generators(n))


def generator_lookup(n: int) -> Dict[str, RobertsGenerator]:
    return {g.name: g for g in right_generators(n) + left_generators(n)}


def _composable_pairs(
    firsts: Iterable[RobertsGenerator], seconds: Iterable[RobertsGenerator]
) -> List[Tuple[RobertsGenerator, RobertsGenerator]]:
    by_source: Dict[SignedDiagram, List[RobertsGenerator]] = defaultdict(list)
    for g in seconds:
        by_source[g.source].append(g)
    return [(a, b) for a in firsts for b in by_source.get(a.target, [])]


def _pair_word(a: RobertsGenerator, b: RobertsGenerator) -> Monomial:
    return Monomial(a.source, b.target, (a.name, b.name))


# B_R(H^n)


@dataclass
class LabeledRelation:
    family: int
    relation: Combination

    @property
    def doubled_degree(self) -> int:
        word = next(iter(self.relation))
        return sum(-WEIGHTS[name[1]] for name in word.letters)


def relations_BR(n: int) -> List[LabeledRelation]:
    """The four relation families of B_R(H^n), one spanning set per graded piece.

    Family 1 identifies paths of two bridges, family 2 moves b_gamma past b_C,
    family 3 commutes circle generators and family 4 is b_gamma b_gamma^dagger = b_C.
    """
    generators = right_generators(n)
    linear = {(g.source, g.target, g.weight): g for g in generators}
    pieces: Dict[Tuple[SignedDiagram, SignedDiagram, int], List[Monomial]] = defaultdict(list)
    for a, b in _composable_pairs(generators, generators):
        pieces[(a.source, b.target, a.weight + b.weight)].append(_pair_word(a, b))

    result: List[LabeledRelation] = []
    for key, words in pieces.items():
        words = sorted(words, key=lambda w: w.letters)
        single = linear.get(key)
        if single is not None:
            for word in words:
                result.append(LabeledRelation(4, Combination({word: 1, single.word(): -1})))
            continue
        family = {2: 1, 3: 2, 4: 3}[key[2]]
        for word in words[1:]:
            result.append(LabeledRelation(family, Combination({word: 1, words[0]: -1})))
    logger.debug(f"B_R(H^{n}): {len(result)} relations over {len(pieces)} pieces")
    return result


@lru_cache(maxsize=None)
def build_BR(n: int) -> PresentedAlgebra:
    """B_R(H^n) as a linear-quadratic algebra over I_beta."""
    _check_n(n)
    generators = right_generators(n)
    algebra = PresentedAlgebra(
        f"B_R(H^{n})",
        arcalg.basis(n),
        [g.spec() for g in generators],
        [labeled.relation for labeled in relations_BR(n)],
        max_weight=2 * n,
    )
    logger.info(f"Built {algebra.name}: {len(generators)} generators, {len(algebra.relations)} relations")
    return algebra


@lru_cache(maxsize=None)
def _reachable(n: int) -> Set[Tuple[SignedDiagram, SignedDiagram, int]]:
    edges: Dict[SignedDiagram, List[RobertsGenerator]] = defaultdict(list)
    for g in right_generators(n):
        edges[g.source].append(g)
    reached = {(h, h, 0) for h in arcalg.basis(n)}
    frontier = list(reached)
    while frontier:
        nxt = []
        for source, middle, weight in frontier:
            for g in edges.get(middle, []):
                item = (source, g.target, weight + g.weight)
                if item not in reached:
                    reached.add(item)
                    nxt.append(item)
        frontier = nxt
    return reached


def endomorphism_oracle(n: int) -> PresentationOracle:
    """Words evaluate to matrix units e(left, right) in Hom_{I_n}(H^n, H^n)."""
    reachable = _reachable(n)

    def evaluate(word: Monomial) -> Combination:
        return Combination.single((word.left, word.right))

    def rank(piece: Piece) -> int:
        left, right, (degree, _), weight = piece
        if degree != -weight:
            return 0
        return 1 if (left, right, weight) in reachable else 0

    return PresentationOracle(evaluate, rank)


def verify_BR(n: int) -> CheckReport:
    algebra = build_BR(n)
    report = verify_presentation(algebra, endomorphism_oracle(n))
    report.metadata["check"] = f"presentation of {algebra.name} against endomorphisms"
    return report


def degree_audit(n: int) -> Dict[int, Set[int]]:
    """Family -> set of doubled intrinsic degrees of its relations."""
    audit: Dict[int, Set[int]] = defaultdict(set)
    for labeled in relations_BR(n):
        audit[labeled.family].add(labeled.doubled_degree)
    return dict(audit)


# graph G


@dataclass
class GraphComponent:
    shape: str
    vertices: Tuple[Monomial, ...]  # minimal vertex first

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass
class MonomialGraph:
    n: int
    components: List[GraphComponent] = field(default_factory=list)

    @property
    def vertices(self) -> Set[Monomial]:
        return {v for component in self.components for v in component.vertices}

    def shape_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = defaultdict(int)
        for component in self.components:
            counts[component.shape] += 1
        return dict(counts)

    def of_shape(self, shape: str) -> List[GraphComponent]:
        return [c for c in self.components if c.shape == shape]


def _word_key(word: Monomial) -> Tuple:
    return word.letters


@lru_cache(maxsize=None)
def monomial_graph_G(n: int) -> MonomialGraph:
    """Vertices: quadratic monomials of I; edges: v - v' in I with neither side in I."""
    data = quadratic_part(build_BR(n))
    graph = MonomialGraph(n)
    for piece, rows in data.rows.items():
        echelon = RowEchelon(_word_key).extend(row.quadratic for row in rows)
        vertices = sorted({w for row in rows for w in row.quadratic}, key=_word_key)
        in_ideal = {v for v in vertices if echelon.contains({v: 1})}
        loose = [v for v in vertices if v not in in_ideal]
        parent = {v: v for v in loose}

        def find(v: Monomial) -> Monomial:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        edges = set()
        for i, v in enumerate(loose):
            for w in loose[i + 1:]:
                if echelon.contains({v: 1, w: -1}):
                    edges.add((v, w))
                    parent[find(w)] = find(v)

        for v in sorted(in_ideal, key=_word_key):
            graph.components.append(GraphComponent(ISOLATED, (v,)))
        groups: Dict[Monomial, List[Monomial]] = defaultdict(list)
        for v in loose:
            groups[find(v)].append(v)
        for members in groups.values():
            members = sorted(members, key=_word_key)
            size = len(members)
            complete = all((v, w) in edges for i, v in enumerate(members) for w in members[i + 1:])
            if size not in SHAPES or not complete:
                raise VerificationError(
                    "component of G is not one of the four shapes",
                    {"piece": str(piece), "vertices": [str(v) for v in members], "complete": complete},
                )
            graph.components.append(GraphComponent(SHAPES[size], tuple(members)))
    logger.info(f"Graph G for n={n}: {graph.shape_counts()}")
    return graph


# the dual


def _all_quadratic_words(generators: Iterable[RobertsGenerator]) -> List[Monomial]:
    generators = list(generators)
    return [_pair_word(a, b) for a, b in _composable_pairs(generators, generators)]


def _star(word: Monomial) -> Monomial:
    return Monomial(word.left, word.right, tuple(dual_name(letter) for letter in word.letters))


@lru_cache(maxsize=None)
def dual_BR(n: int) -> PresentedAlgebra:
    """B_R(H^n)! read off the graph G; raises VerificationError if it differs from the generic dual."""
    algebra = build_BR(n)
    graph = monomial_graph_G(n)
    vertices = graph.vertices

    relations: List[Combination] = []
    for word in _all_quadratic_words(right_generators(n)):
        if word not in vertices:
            relations.append(Combination.single(_star(word)))
    for component in graph.components:
        if component.shape != ISOLATED:
            relations.append(Combination({_star(v): 1 for v in component.vertices}))

    differential: Dict[str, Combination] = defaultdict(Combination)
    for labeled in relations_BR(n):
        if labeled.family != 4:
            continue
        for word, coeff in labeled.relation.items():
            if len(word) == 1:
                pivot = next(w for w in labeled.relation if len(w) == 2)
                differential[dual_name(word.letters[0])].add_term(_star(pivot), coeff)

    generators = [
        GeneratorSpec(dual_name(g.name), g.source, g.target, (g.weight, 1), g.weight) for g in right_generators(n)
    ]
    dual = PresentedAlgebra(
        f"{algebra.name}!",
        algebra.idempotents,
        generators,
        relations,
        differential={key: value for key, value in differential.items() if value},
        max_weight=algebra.max_weight,
    )

    generic = quadratic_dual(algebra)
    if not same_relation_span(dual.relations, generic.relations):
        raise VerificationError(f"{dual.name}: relations from G differ from the generic dual", {"n": n})
    if dual.differential != generic.differential:
        raise VerificationError(f"{dual.name}: differential differs from the generic dual", {"n": n})
    logger.info(f"Built {dual.name}: {len(relations)} relations, mu1 on {len(dual.differential)} generators")
    return dual


# B . m(B)!


def _dual_to_left_letter(n: int) -> Dict[str, str]:
    return {dual_name(g.name): g.partner().name for g in right_generators(n)}


def left_word(n: int, word: Monomial) -> Monomial:
    """m(v*) for a word v of B_R(H^n): the D-word of P over the mirrored idempotents."""
    rename = {g.name: g.partner().name for g in right_generators(n)}
    rename.update(_dual_to_left_letter(n))
    return Monomial(arcalg.mirror(word.left), arcalg.mirror(word.right), tuple(rename[x] for x in word.letters))


def action_signature(n: int, letter: RobertsGenerator) -> Combination:
    """beta_mult element h' -> coefficient of the target in h' * source, for a left letter."""
    if not letter.dual:
        raise InputError(f"{letter.name} is not a left-pointing letter")
    table = arcalg.structure_constants(n)
    signature = Combination()
    for h in arcalg.beta_mult(n):
        product = table.get((h, letter.source))
        if product:
            signature.add_term(h, product.get(letter.target, 0))
    return signature


def mixed_relations(n: int) -> List[Combination]:
    """Integer relations among b * m(b*) and m(b*) * b words whose left letters act alike on every A(M)."""
    rights = right_generators(n)
    lefts = left_generators(n)
    signatures = {g.name: action_signature(n, g) for g in lefts}
    specs = {g.name: g for g in rights + lefts}

    pieces: Dict[Piece, List[Monomial]] = defaultdict(list)
    for a, b in _composable_pairs(rights, lefts) + _composable_pairs(lefts, rights):
        word = _pair_word(a, b)
        s = a.bidegree[0] + b.bidegree[0]
        h = a.bidegree[1] + b.bidegree[1]
        pieces[(word.left, word.right, (s, h), a.weight + b.weight)].append(word)

    relations: List[Combination] = []
    for piece, words in pieces.items():
        words = sorted(words, key=_word_key)
        columns: Dict[Hashable, Combination] = defaultdict(Combination)
        for word in words:
            letter = next(x for x in word.letters if specs[x].dual)
            for h, coeff in signatures[letter].items():
                columns[h].add_term(word, coeff)
        relations.extend(integer_kernel(list(columns.values()), words))
    logger.debug(f"Mixed relations for n={n}: {len(relations)} over {len(pieces)} pieces")
    return relations


def flipped_circle(letter: RobertsGenerator) -> arcalg.Circle:
    """The circle a circle letter turns from + to -, as a point set of its diagram."""
    if letter.kind != CIRCLE:
        raise InputError(f"{letter.name} is not a circle letter")
    for circle, before, after in zip(letter.source.circles, letter.source.signs, letter.target.signs):
        if before != after:
            return circle
    raise VerificationError(f"{letter.name} flips no circle", {"letter": letter.name})


@dataclass(frozen=True)
class MixedWord:
    word: Monomial
    right: RobertsGenerator
    left: RobertsGenerator

    @property
    def right_first(self) -> bool:
        return self.word.letters[0] == self.right.name


def _mixed_words(n: int) -> Dict[Tuple, List[MixedWord]]:
    """b * m(b*) and m(b*) * b words grouped by endpoints and the kinds of their two letters."""
    rights = right_generators(n)
    lefts = left_generators(n)
    pieces: Dict[Tuple, List[MixedWord]] = defaultdict(list)
    for a, b in _composable_pairs(rights, lefts) + _composable_pairs(lefts, rights):
        right, left = (b, a) if a.dual else (a, b)
        word = _pair_word(a, b)
        pieces[(word.left, word.right, right.kind, left.kind)].append(MixedWord(word, right, left))
    return pieces


def _surgery_relations(
    source: SignedDiagram, target: SignedDiagram, members: List[MixedWord]
) -> List[LabeledRelation]:
    """b_gamma against circle letters m(b*_C), keyed by the circle the left letter flips."""
    right_first = {flipped_circle(m.left): m.word for m in members if m.right_first}
    left_first = {flipped_circle(m.left): m.word for m in members if not m.right_first}
    before, after = set(source.circles), set(target.circles)
    gone, new = before - after, after - before
    used: Set[Monomial] = set()

    def take(table: Dict[arcalg.Circle, Monomial], circle: arcalg.Circle) -> Monomial:
        if circle not in table:
            raise VerificationError("circle letter has no partner word", {"circle": sorted(circle)})
        used.add(table[circle])
        return table[circle]

    result: List[LabeledRelation] = []
    for circle in sorted(set(right_first) - new, key=min):
        result.append(LabeledRelation(3, Combination({take(right_first, circle): 1, take(left_first, circle): -1})))
    if len(gone) == 2 and len(new) == 1:
        # gamma joins C' and C'' into C
        (joined,) = new
        if joined in right_first:
            relation = Combination({take(right_first, joined): 1})
            for part in gone:
                relation.add_term(take(left_first, part), -1)
            result.append(LabeledRelation(5, relation))
    elif len(gone) == 1 and len(new) == 2:
        # gamma splits C into C' and C''
        (split,) = gone
        if split in left_first:
            relation = Combination({take(left_first, split): -1})
            for part in new:
                relation.add_term(take(right_first, part), 1)
            result.append(LabeledRelation(5, relation))
    stray = (set(right_first.values()) | set(left_first.values())) - used
    if stray:
        raise VerificationError("words outside every extra relation", {"words": sorted(str(w) for w in stray)})
    return result


@lru_cache(maxsize=None)
def extra_relations(n: int) -> Tuple[LabeledRelation, ...]:
    """J_extra: the five families of relations between b and m(b*) letters.

    Families 1 and 2 equate every word of a piece whose left letter is a bridge, with
    the right letter a bridge or a circle. Family 3 commutes b_gamma past a circle the
    surgery leaves alone, family 4 commutes two disjoint circles, and family 5 is the
    three-term relation for a circle that gamma joins or splits.
    """
    _check_n(n)
    result: List[LabeledRelation] = []
    for (source, target, right_kind, left_kind), members in _mixed_words(n).items():
        right_first = sorted((m.word for m in members if m.right_first), key=_word_key)
        left_first = sorted((m.word for m in members if not m.right_first), key=_word_key)
        if left_kind == GAMMA:
            if not right_first or not left_first:
                raise VerificationError(
                    "bridge letter with no commuting partner", {"words": [str(m.word) for m in members]}
                )
            family = 1 if right_kind == GAMMA else 2
            result.extend(
                LabeledRelation(family, Combination({x: 1, y: -1})) for x in right_first for y in left_first
            )
        elif right_kind == CIRCLE:
            keyed = {(flipped_circle(m.right), flipped_circle(m.left)): m.word for m in members if m.right_first}
            for m in members:
                if m.right_first:
                    continue
                partner = keyed.get((flipped_circle(m.right), flipped_circle(m.left)))
                if partner is None:
                    raise VerificationError("circle letters with no commuting partner", {"word": str(m.word)})
                result.append(LabeledRelation(4, Combination({partner: 1, m.word: -1})))
        else:
            result.extend(_surgery_relations(source, target, members))
    logger.debug(f"J_extra for n={n}: {len(result)} relations")
    return tuple(result)


def check_extra_relations(n: int) -> CheckReport:
    """J_extra spans the same relations as the words whose left letters act alike on every A(M)."""
    explicit = [labeled.relation for labeled in extra_relations(n)]
    kernel = mixed_relations(n)
    if not same_relation_span(explicit, kernel):
        return CheckReport.failure_result(
            "J_extra differs from the action kernel", witness={"explicit": len(explicit), "kernel": len(kernel)}
        )
    families: Dict[int, int] = defaultdict(int)
    for labeled in extra_relations(n):
        families[labeled.family] += 1
    return CheckReport.success_result(data={"families": dict(families), "kernel": len(kernel)})


def tetrahedron_relations(n: int) -> List[Combination]:
    """a + c, a + d, b + c for every tetrahedron, with {a, b} sharing their first bridge."""
    result = []
    for component in monomial_graph_G(n).of_shape(TETRAHEDRON):
        groups: Dict[Hashable, List[Monomial]] = defaultdict(list)
        lookup = {g.name: g for g in right_generators(n)}
        for vertex in component.vertices:
            groups[lookup[vertex.letters[0]].target.right].append(vertex)
        if sorted(len(v) for v in groups.values()) != [2, 2]:
            raise VerificationError(
                "tetrahedron does not split into two bridge pairs",
                {"vertices": [str(v) for v in component.vertices]},
            )
        (a, b), (c, d) = [sorted(groups[key], key=_word_key) for key in sorted(groups, key=str)]
        a, b, c, d = (left_word(n, v) for v in (a, b, c, d))
        result.extend(Combination({x: 1, y: 1}) for x, y in ((a, c), (a, d), (b, c)))
    return result


def product_word_key(word: Monomial) -> Tuple:
    """Longer words first, then words with more right-pointing letters ahead of left-pointing ones."""
    inversions = 0
    rights_seen = 0
    for letter in word.letters:
        if letter.startswith("b"):
            rights_seen += 1
        else:
            inversions += rights_seen
    return (-len(word.letters), -inversions, word.letters)


@lru_cache(maxsize=None)
def product_algebra(n: int, mode: str = FULL) -> PresentedAlgebra:
    """B . m(B)! (mode "full") or its quotient BGamma_n (mode "gamma")."""
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}, expected one of {MODES}")
    _check_n(n)
    rights = right_generators(n)
    lefts = left_generators(n)
    dual = dual_BR(n)

    relations = [labeled.relation for labeled in relations_BR(n)]
    relations.extend(
        Combination({left_word(n, word): coeff for word, coeff in relation.items()}) for relation in dual.relations
    )
    relations.extend(labeled.relation for labeled in extra_relations(n))
    if mode == GAMMA_QUOTIENT:
        relations.extend(tetrahedron_relations(n))

    rename = _dual_to_left_letter(n)
    differential = {
        rename[name]: Combination({left_word(n, word): coeff for word, coeff in image.items()})
        for name, image in dual.differential.items()
    }
    name = f"BGamma_{n}" if mode == GAMMA_QUOTIENT else f"B_{n}.m(B_{n})!"
    algebra = PresentedAlgebra(
        name,
        arcalg.basis(n),
        [g.spec() for g in rights + lefts],
        relations,
        differential=differential,
        max_weight=2 * n,
        word_key=product_word_key,
    )
    logger.info(f"Built {name}: {len(rights) + len(lefts)} generators, {len(relations)} relations")
    return algebra


def check_differential_descends(algebra: PresentedAlgebra) -> CheckReport:
    """mu1 of every defining relation vanishes in the quotient, and mu1^2 = 0."""
    for index, relation in enumerate(algebra.relations):
        image = algebra.d(relation)
        if image:
            return CheckReport.from_witness(
                "mu1 preserves the relations",
                {"relation": index, "text": algebra.format(relation), "image": algebra.format(image)},
            )
    return algebra.check_d_squared()


def rank_comparison(n: int) -> Dict[Piece, Tuple[int, int]]:
    """Piece -> (rank in B . m(B)!, rank in BGamma_n)."""
    full = product_algebra(n, FULL)
    gamma = product_algebra(n, GAMMA_QUOTIENT)
    return {piece: (rank, gamma.rank(piece)) for piece, rank in full.ranks().items()}


def tetrahedron_pieces(n: int) -> Set[Piece]:
    algebra = product_algebra(n, FULL)
    pieces = set()
    for component in monomial_graph_G(n).of_shape(TETRAHEDRON):
        pieces.add(algebra.piece(left_word(n, component.vertices[0])))
    return pieces


# rank-one DD bimodules


@dataclass
class RankOneDD:
    """delta: e -> sum a (x) (c)^op with a in `left`, c in `right`; the output generator is a.right.

    When `right_mirrored` is set, right factors are elements of `right` read through mirr.
    """

    name: str
    left: PresentedAlgebra
    right: PresentedAlgebra
    delta: Dict[Hashable, Combination]
    right_mirrored: bool = False

    @property
    def idempotents(self) -> List[Hashable]:
        return list(self.left.idempotents)

    def of(self, idem: Hashable) -> Combination:
        return self.delta.get(idem, Combination())

    def export_lines(self) -> List[str]:
        labels = {idem: f"e{i}" for i, idem in enumerate(self.left.idempotents)}
        lines = [f"dd {self.name}"]
        for idem in self.left.idempotents:
            terms = self.of(idem)
            if not terms:
                continue
            parts = []
            for (a, c), coeff in sorted(terms.items(), key=lambda item: (item[0][0].letters, item[0][1].letters)):
                right = f"mirr({c})" if self.right_mirrored else str(c)
                parts.append(f"{coeff} ({a} (x) {right}^op)")
            lines.append(f"delta {labels[idem]} -> {' + '.join(parts)}")
        return lines


def _koszul_delta(algebra: PresentedAlgebra, dual_first: bool) -> Dict[Hashable, Combination]:
    delta: Dict[Hashable, Combination] = defaultdict(Combination)
    for spec in algebra.generators.values():
        word = Monomial(spec.left, spec.right, (spec.name,))
        star = Monomial(spec.left, spec.right, (dual_name(spec.name),))
        key = (star, word) if dual_first else (word, star)
        delta[spec.left].add_term(key, 1)
    return dict(delta)


def _base_and_dual(n: int, base: str) -> Tuple[PresentedAlgebra, PresentedAlgebra]:
    if base == ROBERTS:
        return build_BR(n), dual_BR(n)
    if base == HN:
        algebra = arcalg.hn_presentation(n)
        return algebra, formal_dual_presentation(algebra)
    raise InputError(f"unknown base algebra {base!r}")


def dd_delta(kind: str, n: int, mode: str = FULL, base: str = ROBERTS) -> RankOneDD:
    """The rank-one DD operations ^B K^(B!)op, ^B! K^Bop and the product one delta1 + delta2."""
    if kind == K_B_BDUAL:
        algebra, dual = _base_and_dual(n, base)
        return RankOneDD(f"K[{algebra.name}, {dual.name}^op]", algebra, dual, _koszul_delta(algebra, False))
    if kind == K_BDUAL_B:
        algebra, dual = _base_and_dual(n, base)
        return RankOneDD(f"K[{dual.name}, {algebra.name}^op]", dual, algebra, _koszul_delta(algebra, True))
    if kind != K_PRODUCT:
        raise InputError(f"unknown DD kind {kind!r}, expected one of {DD_KINDS}")
    if base != ROBERTS:
        raise InputError("the product DD bimodule exists only over I_beta")

    algebra = product_algebra(n, mode)
    delta: Dict[Hashable, Combination] = defaultdict(Combination)
    for b in right_generators(n):
        d = b.partner()
        # delta1: b (x) (b*)^op, with b* = mirr(m(b*))
        delta[b.source].add_term((b.word(), d.word()), 1)
        # delta2: m(b*) (x) m(b)^op
        delta[d.source].add_term((d.word(), b.word()), 1)
    return RankOneDD(f"K[{algebra.name}, m({algebra.name})^op]", algebra, algebra, dict(delta), right_mirrored=True)
