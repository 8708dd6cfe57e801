"""The arc algebra H^n: signed diagrams W(a)b, the surgery product and its generators."""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

from . import planar
from .errors import InputError, SizeError
from .planar import Bridge, Matching, Pair
from .zlinalg import Combination, lin_sum

logger = logging.getLogger(__name__)

PLUS = 1
MINUS = -1

Circle = FrozenSet[int]


class _UnionFind:
    def __init__(self):
        self.parent: Dict[Hashable, Hashable] = {}

    def find(self, x: Hashable) -> Hashable:
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: Hashable, y: Hashable) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry

    def groups(self) -> List[FrozenSet]:
        buckets: Dict[Hashable, set] = {}
        for x in list(self.parent):
            buckets.setdefault(self.find(x), set()).add(x)
        return [frozenset(group) for group in buckets.values()]


@lru_cache(maxsize=None)
def circles(left: Matching, right: Matching) -> Tuple[Circle, ...]:
    """Circles of W(left)right as point sets, sorted by minimum point."""
    if left.n != right.n:
        raise SizeError(f"matchings of different sizes: {left.n} and {right.n}")
    uf = _UnionFind()
    for p, q in left.pairs + right.pairs:
        uf.union(p, q)
    return tuple(sorted(uf.groups(), key=min))


@dataclass(frozen=True, order=True)
class SignedDiagram:
    """W(left)right with a sign (+1 or -1) on each circle, ordered by circle minimum point."""

    left: Matching
    right: Matching
    signs: Tuple[int, ...]

    @property
    def n(self) -> int:
        return self.left.n

    @property
    def circles(self) -> Tuple[Circle, ...]:
        return circles(self.left, self.right)

    @property
    def degree(self) -> int:
        plus = sum(1 for s in self.signs if s == PLUS)
        return self.n - plus + (len(self.signs) - plus)

    def sign_of(self, circle: Iterable[int]) -> int:
        circle = frozenset(circle)
        return self.signs[self.circles.index(circle)]

    def circle_containing(self, point: int) -> Circle:
        for circle in self.circles:
            if point in circle:
                return circle
        raise InputError(f"point {point} not on W({self.left}){self.right}")

    def is_idempotent(self) -> bool:
        return self.left == self.right and all(s == PLUS for s in self.signs)

    def __str__(self) -> str:
        labels = ",".join(f"c{i}:{'+' if s == PLUS else '-'}" for i, s in enumerate(self.signs))
        return f"W({self.left}){self.right} signs:{{{labels}}}"


def diagram(left: Matching, right: Matching, signs: Optional[Sequence[int]] = None) -> SignedDiagram:
    count = len(circles(left, right))
    if signs is None:
        signs = (PLUS,) * count
    if len(signs) != count or any(s not in (PLUS, MINUS) for s in signs):
        raise InputError(f"W({left}){right} has {count} circles, got signs {signs}")
    return SignedDiagram(left, right, tuple(signs))


def with_circle_sign(left: Matching, right: Matching, minus: Iterable[Circle]) -> SignedDiagram:
    minus = set(minus)
    return SignedDiagram(left, right, tuple(MINUS if c in minus else PLUS for c in circles(left, right)))


def idempotent(matching: Matching) -> SignedDiagram:
    return diagram(matching, matching)


def mirror(element: SignedDiagram) -> SignedDiagram:
    """W(a)b -> W(b)a with the same circle signs."""
    return SignedDiagram(element.right, element.left, element.signs)


@lru_cache(maxsize=None)
def basis(n: int) -> Tuple[SignedDiagram, ...]:
    """The Z-basis beta of H^n."""
    result = []
    for left in planar.enumerate_matchings(n):
        for right in planar.enumerate_matchings(n):
            count = len(circles(left, right))
            for signs in itertools.product((PLUS, MINUS), repeat=count):
                result.append(SignedDiagram(left, right, signs))
    return tuple(sorted(result))


def piece_rank(left: Matching, right: Matching) -> int:
    return 2 ** len(circles(left, right))


def algebra_rank(n: int) -> int:
    return len(basis(n))


def _surgery_terms(
    terms: List[Tuple[int, Dict[FrozenSet, int]]],
    before: List[FrozenSet],
    after: List[FrozenSet],
    anchor: Hashable,
) -> List[Tuple[int, Dict[FrozenSet, int]]]:
    """Apply one merge or split to each labelled term."""
    gone = [c for c in before if c not in after]
    new = [c for c in after if c not in before]
    result = []
    if len(gone) == 2 and len(new) == 1:
        for coeff, labels in terms:
            first, second = labels[gone[0]], labels[gone[1]]
            if first == MINUS and second == MINUS:
                continue
            updated = {c: s for c, s in labels.items() if c not in gone}
            updated[new[0]] = MINUS if MINUS in (first, second) else PLUS
            result.append((coeff, updated))
        return result
    if len(gone) == 1 and len(new) == 2:
        first = next(c for c in new if anchor in c)
        second = new[0] if new[1] is first else new[1]
        for coeff, labels in terms:
            base = {c: s for c, s in labels.items() if c != gone[0]}
            if labels[gone[0]] == PLUS:
                result.append((coeff, {**base, first: PLUS, second: MINUS}))
                result.append((coeff, {**base, first: MINUS, second: PLUS}))
            else:
                result.append((coeff, {**base, first: MINUS, second: MINUS}))
        return result
    raise InputError("surgery is neither a merge nor a split")


def _components(edges: Iterable[Tuple[Hashable, Hashable]], nodes: Iterable[Hashable]) -> List[FrozenSet]:
    uf = _UnionFind()
    for node in nodes:
        uf.find(node)
    for x, y in edges:
        uf.union(x, y)
    return uf.groups()


def _multiply_diagrams(x: SignedDiagram, y: SignedDiagram, order: Optional[Sequence[int]] = None) -> Combination:
    if x.right != y.left:
        return Combination()
    n = x.n
    points = range(1, 2 * n + 1)
    nodes = [("x", p) for p in points] + [("y", p) for p in points]
    fixed = [(("x", p), ("x", q)) for p, q in x.left.pairs] + [(("y", p), ("y", q)) for p, q in y.right.pairs]
    middle = list(x.right.pairs)
    if order is not None:
        if sorted(order) != list(range(len(middle))):
            raise InputError(f"surgery order must permute 0..{len(middle) - 1}")
        middle = [middle[i] for i in order]
    pending = list(middle)
    connectors: List[Tuple[Hashable, Hashable]] = []

    def edges() -> List[Tuple[Hashable, Hashable]]:
        arcs = [(("x", p), ("x", q)) for p, q in pending] + [(("y", p), ("y", q)) for p, q in pending]
        return fixed + arcs + connectors

    current = _components(edges(), nodes)
    labels: Dict[FrozenSet, int] = {}
    for circle, sign in zip(circles(x.left, x.right), x.signs):
        labels[next(c for c in current if ("x", min(circle)) in c)] = sign
    for circle, sign in zip(circles(y.left, y.right), y.signs):
        labels[next(c for c in current if ("y", min(circle)) in c)] = sign
    terms: List[Tuple[int, Dict[FrozenSet, int]]] = [(1, labels)]

    for p, q in middle:
        pending.remove((p, q))
        connectors.extend([(("x", p), ("y", p)), (("x", q), ("y", q))])
        after = _components(edges(), nodes)
        terms = _surgery_terms(terms, current, after, ("x", p))
        current = after
        if not terms:
            return Combination()

    result = Combination()
    final_circles = circles(x.left, y.right)
    for coeff, final_labels in terms:
        signs = []
        for circle in final_circles:
            component = next(c for c in final_labels if ("x", min(circle)) in c)
            signs.append(final_labels[component])
        result.add_term(SignedDiagram(x.left, y.right, tuple(signs)), coeff)
    return result


@lru_cache(maxsize=None)
def _cached_product(x: SignedDiagram, y: SignedDiagram) -> Combination:
    return _multiply_diagrams(x, y)


def multiply(x: SignedDiagram, y: SignedDiagram, order: Optional[Sequence[int]] = None) -> Combination:
    """Product x*y in H^n as a combination of basis diagrams (zero when x.right != y.left)."""
    if x.n != y.n:
        raise SizeError(f"diagrams for different n: {x.n} and {y.n}")
    if order is None:
        return Combination(_cached_product(x, y))
    return _multiply_diagrams(x, y, order)


def multiply_elements(u: Dict[SignedDiagram, int], v: Dict[SignedDiagram, int]) -> Combination:
    return lin_sum((a * b, multiply(x, y)) for x, a in u.items() for y, b in v.items())


@dataclass(frozen=True)
class Generator:
    """One element of beta_mult: a bridge generator h_gamma or an arc generator h_alpha."""

    kind: str  # "gamma" or "alpha"
    matching: Matching
    bridge: Optional[Bridge] = None
    arc: Optional[Pair] = None

    @property
    def element(self) -> SignedDiagram:
        if self.kind == "gamma":
            return h_gamma(self.matching, self.bridge)
        return h_alpha(self.matching, self.arc)

    @property
    def name(self) -> str:
        index = planar.matching_index(self.matching)
        if self.kind == "gamma":
            return f"hg_{index}_{self.bridge[0]}_{self.bridge[1]}"
        return f"ha_{index}_{self.arc[0]}"


def h_gamma(matching: Matching, bridge: Bridge) -> SignedDiagram:
    """(W(a) surger(a, gamma), all circles +)."""
    return diagram(matching, planar.surger(matching, bridge))


def h_alpha(matching: Matching, arc: Pair) -> SignedDiagram:
    """(W(a)a, - on the circle through arc alpha, + elsewhere)."""
    p, q = sorted(arc)
    if matching.partner(p) != q:
        raise InputError(f"({p},{q}) is not an arc of {matching}")
    return with_circle_sign(matching, matching, [frozenset((p, q))])


@lru_cache(maxsize=None)
def generators(n: int) -> Tuple[Generator, ...]:
    result = []
    for matching in planar.enumerate_matchings(n):
        for bridge in planar.bridges(matching):
            result.append(Generator("gamma", matching, bridge=bridge))
        for arc in matching.pairs:
            result.append(Generator("alpha", matching, arc=arc))
    return tuple(result)


@lru_cache(maxsize=None)
def beta_mult(n: int) -> Tuple[SignedDiagram, ...]:
    return tuple(sorted({g.element for g in generators(n)}))


def is_beta_mult(element: SignedDiagram) -> bool:
    return element in set(beta_mult(element.n))


def generator_kind(element: SignedDiagram) -> str:
    """"gamma" for h_gamma, "alpha" for h_alpha; InputError otherwise."""
    if element.left != element.right:
        if all(s == PLUS for s in element.signs) and planar.bridge_between(element.left, element.right):
            return "gamma"
    elif sum(1 for s in element.signs if s == MINUS) == 1:
        return "alpha"
    raise InputError(f"{element} is not in beta_mult")


@lru_cache(maxsize=None)
def structure_constants(n: int) -> Dict[Tuple[SignedDiagram, SignedDiagram], Combination]:
    """Nonzero products h*h' for h in beta and h' in beta_mult, in both orders."""
    table: Dict[Tuple[SignedDiagram, SignedDiagram], Combination] = {}
    mult = beta_mult(n)
    for h in basis(n):
        for g in mult:
            for pair in ((h, g), (g, h)):
                product = multiply(*pair)
                if product:
                    table[pair] = product
    return table


class ArcAlgebra:
    """H^n behind the generic algebra interface used by the bordered code (d = 0, hom degree 0)."""

    def __init__(self, n: int):
        planar._check_n(n)
        self.n = n
        self.name = f"H^{n}"

    def mul(self, u: Dict[SignedDiagram, int], v: Dict[SignedDiagram, int]) -> Combination:
        return multiply_elements(u, v)

    def d(self, u: Dict[SignedDiagram, int]) -> Combination:
        return Combination()

    def reduce(self, u: Dict[SignedDiagram, int]) -> Combination:
        return Combination(u)

    def is_zero(self, u: Dict[SignedDiagram, int]) -> bool:
        return not self.reduce(u)

    def bidegree(self, key: SignedDiagram) -> Tuple[int, int]:
        return (key.degree, 0)

    def hom_degree(self, key: SignedDiagram) -> int:
        return 0

    def left(self, key: SignedDiagram) -> Matching:
        return key.left

    def right(self, key: SignedDiagram) -> Matching:
        return key.right

    def unit(self, idem: Matching) -> SignedDiagram:
        return idempotent(idem)


def _hn_spec(generator: Generator):
    from .linquad import GeneratorSpec

    element = generator.element
    return GeneratorSpec(generator.name, element.left, element.right, (element.degree, 0), element.degree)


@lru_cache(maxsize=None)
def generator_table(n: int) -> Dict[str, Generator]:
    return {g.name: g for g in generators(n)}


def hn_presentation(n: int):
    """H^n as a quotient of the path algebra on beta_mult, by linear-quadratic relations."""
    from .linquad import Monomial, PresentedAlgebra

    table = generator_table(n)
    specs = {name: _hn_spec(g) for name, g in table.items()}
    gamma_from: Dict[Matching, List[Generator]] = {}
    alpha_on: Dict[Tuple[Matching, Pair], Generator] = {}
    for g in table.values():
        if g.kind == "gamma":
            gamma_from.setdefault(g.matching, []).append(g)
        else:
            alpha_on[(g.matching, g.arc)] = g

    def word(*names: str) -> Monomial:
        return Monomial(specs[names[0]].left, specs[names[-1]].right, names)

    def chain(words: List[Monomial]) -> List[Combination]:
        ordered = sorted(set(words), key=lambda w: w.letters)
        return [Combination({w: 1, ordered[0]: -1}) for w in ordered[1:]]

    relations: List[Combination] = []
    for a in planar.enumerate_matchings(n):
        # paths of two bridges ending away from a all agree
        two_step: Dict[Matching, List[Monomial]] = {}
        for first in gamma_from.get(a, []):
            middle = planar.surger(a, first.bridge)
            for second in gamma_from.get(middle, []):
                end = planar.surger(middle, second.bridge)
                if end != a:
                    two_step.setdefault(end, []).append(word(first.name, second.name))
        for words in two_step.values():
            relations.extend(chain(words))

        # h_alpha commutes past h_gamma along a shared circle
        for g in gamma_from.get(a, []):
            target = planar.surger(a, g.bridge)
            for circle in circles(a, target):
                words = [word(alpha_on[(a, arc)].name, g.name) for arc in a.pairs if set(arc) <= circle]
                words += [word(g.name, alpha_on[(target, arc)].name) for arc in target.pairs if set(arc) <= circle]
                relations.extend(chain(words))

            # h_gamma h_gamma^dagger = h_alpha1 + h_alpha2
            back = planar.dual_bridge(a, g.bridge)
            back_name = Generator("gamma", target, bridge=back).name
            p, q = g.bridge
            relation = Combination.single(word(g.name, back_name))
            relation.add_term(word(alpha_on[(a, a.arc_of(p))].name), -1)
            relation.add_term(word(alpha_on[(a, a.arc_of(q))].name), -1)
            relations.append(relation)

        arcs = list(a.pairs)
        for i, first in enumerate(arcs):
            x = alpha_on[(a, first)].name
            relations.append(Combination.single(word(x, x)))
            for second in arcs[i + 1:]:
                y = alpha_on[(a, second)].name
                relations.append(Combination({word(x, y): 1, word(y, x): -1}))

    algebra = PresentedAlgebra(
        f"H^{n}",
        planar.enumerate_matchings(n),
        list(specs.values()),
        relations,
        max_weight=2 * n,
    )
    logger.info(f"Presentation of H^{n}: {len(specs)} generators, {len(relations)} relations")
    return algebra


def hn_oracle(n: int):
    """Evaluation of words in H^n and the ranks of its graded pieces."""
    from .linquad import PresentationOracle

    table = generator_table(n)

    def evaluate(word) -> Combination:
        if not word.letters:
            return Combination.single(idempotent(word.left))
        result = Combination.single(table[word.letters[0]].element)
        for name in word.letters[1:]:
            result = multiply_elements(result, {table[name].element: 1})
        return result

    def rank(piece) -> int:
        left, right, (degree, _), _ = piece
        return sum(1 for d in basis(n) if d.left == left and d.right == right and d.degree == degree)

    return PresentationOracle(evaluate, rank)
