"""Complexes of projective H^n-modules, their maps, tensor products and Gaussian elimination.

A generator x_i sits over an idempotent e(x_i) (a matching) with grading (q, h).
Differentials are stored as combinations of (j, h') pairs: for a right module the
term means x_j * h', for a left module h' * x_j. The h' of a "c" coefficient is
the idempotent of x_j; a "c-tilde" coefficient carries an element of beta_mult.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, List, Optional, Set, Tuple

from . import arcalg
from .arcalg import SignedDiagram
from .errors import HypothesisError, InputError, SizeError, VerificationError
from .framework.check_result import CheckReport
from .planar import Matching
from .zlinalg import Combination, ZComplex, lin_sum

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"

Term = Tuple[Hashable, SignedDiagram]


@dataclass
class ProjGenerator:
    idempotent: Matching
    q: int
    h: int
    label: Any = None


class ProjComplex:
    def __init__(
        self,
        n: int,
        side: str,
        generators: Dict[Hashable, ProjGenerator],
        differential: Dict[Hashable, Dict[Term, int]],
    ):
        if side not in (LEFT, RIGHT):
            raise InputError(f"module side must be left or right, got {side}")
        self.n = n
        self.side = side
        self.generators = dict(generators)
        self.differential: Dict[Hashable, Combination] = {
            gen: Combination(differential.get(gen, {})) for gen in self.generators
        }

    def __len__(self) -> int:
        return len(self.generators)

    def unit(self, gen: Hashable) -> SignedDiagram:
        return arcalg.idempotent(self.generators[gen].idempotent)

    def element(self, gen: Hashable) -> Combination:
        return Combination.single((gen, self.unit(gen)))

    def multiply(self, h: SignedDiagram, u: SignedDiagram) -> Combination:
        """h acting by u on the module side: h*u for right modules, u*h for left modules."""
        return arcalg.multiply(h, u) if self.side == RIGHT else arcalg.multiply(u, h)

    def act(self, element: Dict[Term, int], u: SignedDiagram) -> Combination:
        result = Combination()
        for (gen, h), coeff in element.items():
            for product, c in self.multiply(h, u).items():
                result.add_term((gen, product), coeff * c)
        return result

    def expand(self, image: Dict[Term, int], h: SignedDiagram) -> Combination:
        """image * h (right) or h * image (left) for an image of a generator."""
        result = Combination()
        for (gen, coefficient), coeff in image.items():
            product = arcalg.multiply(coefficient, h) if self.side == RIGHT else arcalg.multiply(h, coefficient)
            for diagram, c in product.items():
                result.add_term((gen, diagram), coeff * c)
        return result

    def apply_d(self, element: Dict[Term, int]) -> Combination:
        return lin_sum((coeff, self.expand(self.differential[gen], h)) for (gen, h), coeff in element.items())

    def term_grading(self, term: Term) -> Tuple[int, int]:
        gen, h = term
        data = self.generators[gen]
        return (data.q + h.degree, data.h)

    def grading(self, gen: Hashable) -> Tuple[int, int]:
        data = self.generators[gen]
        return (data.q, data.h)

    def c_coefficients(self, gen: Hashable) -> Dict[Hashable, int]:
        return {j: c for (j, h), c in self.differential[gen].items() if h.is_idempotent()}

    def tilde_coefficients(self, gen: Hashable) -> Dict[Term, int]:
        return {(j, h): c for (j, h), c in self.differential[gen].items() if not h.is_idempotent()}

    def basis_terms(self, gen: Hashable) -> List[SignedDiagram]:
        """Diagrams h with x*h (right) or h*x (left) nonzero."""
        idem = self.generators[gen].idempotent
        if self.side == RIGHT:
            return [d for d in arcalg.basis(self.n) if d.left == idem]
        return [d for d in arcalg.basis(self.n) if d.right == idem]

    def to_zcomplex(self) -> ZComplex:
        """The underlying complex of abelian groups, basis x*h over beta."""
        grading = {}
        differential = {}
        for gen in self.generators:
            for h in self.basis_terms(gen):
                grading[(gen, h)] = (self.generators[gen].h, self.term_grading((gen, h))[0])
                differential[(gen, h)] = self.expand(self.differential[gen], h)
        return ZComplex(grading, differential)

    def restricted(self, keep: Iterable[Hashable], differential: Dict[Hashable, Dict[Term, int]]) -> "ProjComplex":
        keep = list(keep)
        return ProjComplex(self.n, self.side, {gen: self.generators[gen] for gen in keep}, differential)

    def export_lines(self) -> List[str]:
        """`gen`, `d` (c coefficient) and `dt` (c-tilde coefficient) records, generators by index."""
        index = {gen: i for i, gen in enumerate(self.generators)}
        lines = [f"complex {self.side} {self.n} {len(self.generators)}"]
        for gen, data in self.generators.items():
            lines.append(f"gen {index[gen]} {data.idempotent} {data.q} {data.h}")
        for gen, image in self.differential.items():
            for (target, h), coeff in sorted(image.items(), key=lambda item: (index[item[0][0]], str(item[0][1]))):
                if h.is_idempotent():
                    lines.append(f"d {index[gen]} {index[target]} {coeff}")
                else:
                    lines.append(f"dt {index[gen]} {index[target]} {h} {coeff}")
        return lines


def _coefficient_kind(h: SignedDiagram) -> int:
    """0 for c, 1 for h_gamma, 2 for h_alpha."""
    if h.is_idempotent():
        return 0
    return 1 if arcalg.generator_kind(h) == "gamma" else 2


def check_C_module(M: ProjComplex) -> CheckReport:
    """Every coefficient is an idempotent (c) or lies in beta_mult (c-tilde), with matching
    idempotents, and d raises h by one while preserving q."""
    mult = set(arcalg.beta_mult(M.n))
    for gen, image in M.differential.items():
        source = M.generators[gen]
        for (target, h), coeff in image.items():
            if target not in M.generators:
                return CheckReport.from_witness("C_module", {"generator": repr(gen), "reason": "unknown target"})
            expected_left, expected_right = (
                (M.generators[target].idempotent, source.idempotent)
                if M.side == RIGHT
                else (source.idempotent, M.generators[target].idempotent)
            )
            if (h.left, h.right) != (expected_left, expected_right):
                return CheckReport.from_witness(
                    "C_module", {"generator": repr(gen), "target": repr(target), "reason": "idempotents"}
                )
            if not h.is_idempotent() and h not in mult:
                return CheckReport.from_witness(
                    "C_module", {"generator": repr(gen), "target": repr(target), "coefficient": str(h)}
                )
            if M.term_grading((target, h)) != (source.q, source.h + 1):
                return CheckReport.from_witness(
                    "C_module", {"generator": repr(gen), "target": repr(target), "reason": "grading"}
                )
    return CheckReport.from_witness("C_module", None)


def check_d_squared(M: ProjComplex) -> CheckReport:
    """d^2 = 0 computed directly and as five coefficient families grouped by degree; both must agree."""
    direct_witness = None
    for gen in M.generators:
        square = M.apply_d(M.differential[gen])
        if square:
            (target, h), coeff = next(iter(square.items()))
            direct_witness = {"generator": repr(gen), "target": repr(target), "h": str(h), "coefficient": coeff}
            break

    table = arcalg.structure_constants(M.n)
    families: Dict[Tuple[int, Hashable, Hashable, SignedDiagram], int] = defaultdict(int)
    for gen, image in M.differential.items():
        for (middle, h1), a in image.items():
            for (target, h2), b in M.differential[middle].items():
                first, second = (h2, h1) if M.side == RIGHT else (h1, h2)
                if first.is_idempotent():
                    product = Combination.single(second)
                elif second.is_idempotent():
                    product = Combination.single(first)
                else:
                    product = table.get((first, second), Combination())
                family = _coefficient_kind(h1) + _coefficient_kind(h2) + 1
                for h3, c in product.items():
                    families[(family, gen, target, h3)] += a * b * c
    family_witness = None
    for (family, gen, target, h3), value in families.items():
        if value:
            family_witness = {"item": family, "generator": repr(gen), "target": repr(target), "h": str(h3)}
            break

    if (direct_witness is None) != (family_witness is None):
        return CheckReport.failure_result(
            "direct and family formulations of d^2 disagree",
            witness={"direct": direct_witness, "families": family_witness},
        )
    return CheckReport.from_witness("d^2 = 0", direct_witness)


def mirror_complex(M: ProjComplex) -> ProjComplex:
    """Swap module sides: x_j*h' becomes m(h')*x_j and back; generators and gradings unchanged."""
    side = LEFT if M.side == RIGHT else RIGHT
    differential = {
        gen: Combination({(target, arcalg.mirror(h)): c for (target, h), c in image.items()})
        for gen, image in M.differential.items()
    }
    return ProjComplex(M.n, side, M.generators, differential)


@dataclass
class ChainMap:
    """A module map sending x_i to a combination of target terms; also used for homotopies."""

    source: ProjComplex
    target: ProjComplex
    images: Dict[Hashable, Combination] = field(default_factory=dict)

    def image(self, gen: Hashable) -> Combination:
        return self.images.get(gen, Combination())

    def apply(self, element: Dict[Term, int]) -> Combination:
        return lin_sum((coeff, self.target.expand(self.image(gen), h)) for (gen, h), coeff in element.items())


def identity_map(M: ProjComplex) -> ChainMap:
    return ChainMap(M, M, {gen: M.element(gen) for gen in M.generators})


def compose_chain_maps(first: ChainMap, second: ChainMap) -> ChainMap:
    """second o first."""
    return ChainMap(first.source, second.target, {gen: second.apply(first.image(gen)) for gen in first.source.generators})


def maps_equal(f: ChainMap, g: ChainMap) -> bool:
    return all(f.image(gen) == g.image(gen) for gen in f.source.generators)


def _check_shape(f: ChainMap, kind: Optional[str], degree_shift: int, name: str) -> Optional[Dict[str, Any]]:
    mult = set(arcalg.beta_mult(f.source.n))
    for gen in f.source.generators:
        q, h = f.source.grading(gen)
        for (target, coefficient), _ in f.image(gen).items():
            if target not in f.target.generators:
                return {"map": name, "generator": repr(gen), "reason": "unknown target"}
            if kind == "Ctilde" and not coefficient.is_idempotent():
                return {"map": name, "generator": repr(gen), "reason": "coefficient outside idempotents"}
            if kind == "C" and not coefficient.is_idempotent() and coefficient not in mult:
                return {"map": name, "generator": repr(gen), "reason": "coefficient outside beta_mult"}
            if f.target.term_grading((target, coefficient)) != (q, h + degree_shift):
                return {"map": name, "generator": repr(gen), "target": repr(target), "reason": "grading"}
    return None


def check_chain_map(f: ChainMap, kind: Optional[str] = None, name: str = "chain map") -> CheckReport:
    """d'f = fd on generators; `kind` is "C", "Ctilde" or None."""
    witness = _check_shape(f, kind, 0, name)
    if witness is None:
        for gen in f.source.generators:
            left = f.target.apply_d(f.image(gen))
            right = f.apply(f.source.differential[gen])
            if left != right:
                witness = {"map": name, "generator": repr(gen), "difference": len(left - right)}
                break
    return CheckReport.from_witness(name, witness)


def check_homotopy(f: ChainMap, g: ChainMap, psi: ChainMap, name: str = "homotopy") -> CheckReport:
    """f - g = d'psi + psi d, psi with coefficients in the idempotents and degree h - 1."""
    witness = _check_shape(psi, "Ctilde", -1, name)
    if witness is None:
        for gen in f.source.generators:
            difference = f.image(gen) - g.image(gen)
            total = psi.target.apply_d(psi.image(gen)) + psi.apply(f.source.differential[gen])
            if difference != total:
                witness = {"map": name, "generator": repr(gen), "difference": len(difference - total)}
                break
    return CheckReport.from_witness(name, witness)


def tensor_over_Hn(M: ProjComplex, N: ProjComplex, negate_q: bool = True) -> ZComplex:
    """M (right) tensor N (left) over H^n with basis x_i*h*x'_j, h in beta.

    d(x h x') = (-1)^{deg_h x'} d_M(x) h x' + x h d_N(x').
    """
    if M.side != RIGHT or N.side != LEFT:
        raise InputError("tensor product needs a right complex and a left complex")
    if M.n != N.n:
        raise SizeError(f"complexes over H^{M.n} and H^{N.n}")
    by_pair: Dict[Tuple[Matching, Matching], List[SignedDiagram]] = defaultdict(list)
    for d in arcalg.basis(M.n):
        by_pair[(d.left, d.right)].append(d)

    grading = {}
    differential = {}
    for i, x in M.generators.items():
        for j, y in N.generators.items():
            for h in by_pair.get((x.idempotent, y.idempotent), []):
                q = x.q + h.degree + y.q
                grading[(i, h, j)] = (x.h + y.h, -q if negate_q else q)
                image = Combination()
                sign = -1 if y.h % 2 else 1
                for (k, coefficient), c in M.differential[i].items():
                    for product, c2 in arcalg.multiply(coefficient, h).items():
                        image.add_term((k, product, j), sign * c * c2)
                for (l, coefficient), c in N.differential[j].items():
                    for product, c2 in arcalg.multiply(h, coefficient).items():
                        image.add_term((i, product, l), c * c2)
                differential[(i, h, j)] = image
    logger.debug(f"Tensor product over H^{M.n}: {len(grading)} generators")
    return ZComplex(grading, differential)


def check_isomorphism(
    first: ProjComplex, second: ProjComplex, mapping: Dict[Hashable, Tuple[Hashable, int]]
) -> CheckReport:
    """x_i -> sign * x_{mapping(i)} is an isomorphism of complexes."""
    if set(mapping) != set(first.generators) or {t for t, _ in mapping.values()} != set(second.generators):
        return CheckReport.from_witness("isomorphism", {"reason": "not a bijection"})
    for gen, (target, sign) in mapping.items():
        if first.generators[gen].idempotent != second.generators[target].idempotent:
            return CheckReport.from_witness("isomorphism", {"generator": repr(gen), "reason": "idempotent"})
        pushed = Combination()
        for (k, h), c in first.differential[gen].items():
            image, image_sign = mapping[k]
            pushed.add_term((image, h), c * image_sign)
        if pushed != second.differential[target].scaled(sign):
            return CheckReport.from_witness("isomorphism", {"generator": repr(gen), "reason": "differential"})
    return CheckReport.from_witness("isomorphism", None)


@dataclass
class EliminationData:
    """Input to gaussian_eliminate: kept generators S, psi' on the z_j and the basis change tau."""

    kept: List[Hashable]
    psi_prime: Dict[Hashable, Dict[Hashable, int]]
    basis_change: Dict[Hashable, Combination] = field(default_factory=dict)


@dataclass
class EliminationResult:
    complex: ProjComplex
    f: ChainMap
    g: ChainMap
    psi: ChainMap
    variant: int
    report: CheckReport


def pair_cancellation_data(M: ProjComplex, pairs: Dict[Hashable, Hashable]) -> EliminationData:
    """Elimination data cancelling each a against pairs[a] along a +-1 c coefficient.

    z_a = x_a and z_b = c_ab (d x_a - its part on the a's); psi'(z_b) = c_ab z_a.
    """
    sources = set(pairs)
    targets = set(pairs.values())
    if len(targets) != len(pairs) or sources & targets:
        raise HypothesisError(2, "pairing is not a bijection between disjoint sets")
    eliminated = sources | targets
    basis_change: Dict[Hashable, Combination] = {}
    psi_prime: Dict[Hashable, Dict[Hashable, int]] = {}
    for a, b in pairs.items():
        unit = M.unit(b)
        c = M.differential[a].get((b, unit), 0)
        if c not in (1, -1):
            raise HypothesisError(3, f"coefficient of x_b in d(x_a) is {c}", {"a": repr(a), "b": repr(b)})
        z = Combination({term: coeff for term, coeff in M.differential[a].items() if term[0] not in sources}).scaled(c)
        on_targets = {term: coeff for term, coeff in z.items() if term[0] in targets}
        if on_targets != {(b, unit): 1}:
            raise HypothesisError(3, "z_b has components on other cancelled generators", {"b": repr(b)})
        tau = Combination({term: coeff for term, coeff in z.items() if term[0] not in eliminated})
        if tau:
            basis_change[b] = tau
        psi_prime[b] = {a: c}
    kept = [gen for gen in M.generators if gen not in eliminated]
    return EliminationData(kept, psi_prime, basis_change)


def gaussian_eliminate(M: ProjComplex, data: EliminationData) -> EliminationResult:
    """Replace M by the homotopy equivalent complex on the kept generators.

    The eliminated generators span, after the basis change z_j = x_j + tau_j, a
    subcomplex M2 contracted by psi'. Each hypothesis failure raises
    HypothesisError with its item number; the produced f, g and psi are certified.
    """
    if M.side != RIGHT:
        raise InputError("elimination is defined for right complexes; mirror first")
    report = check_C_module(M)
    if not report.passed:
        raise HypothesisError(1, "M is not a C_module complex", report.witness)

    kept = list(data.kept)
    kept_set = set(kept)
    if not kept_set <= set(M.generators):
        raise HypothesisError(2, "kept generators are not generators of M")
    removed = [gen for gen in M.generators if gen not in kept_set]
    removed_set = set(removed)
    tau = {t: Combination(data.basis_change.get(t, {})) for t in removed}
    for t, change in tau.items():
        for (k, h), _ in change.items():
            if k not in kept_set:
                raise HypothesisError(2, "basis change leaves the kept span", {"generator": repr(t)})
    psi_prime = {t: Combination(data.psi_prime.get(t, {})) for t in removed}
    variant = 2 if any(tau.values()) else 1

    def z(t: Hashable) -> Combination:
        return M.element(t) + tau[t]

    # item 3: span of the z_j is a subcomplex
    d2: Dict[Hashable, Combination] = {}
    for t in removed:
        image = M.apply_d(z(t))
        coords = Combination({(u, h): c for (u, h), c in image.items() if u in removed_set})
        rebuilt = lin_sum((c, M.act(z(u), h)) for (u, h), c in coords.items())
        if image != rebuilt:
            raise HypothesisError(3, "span of the z_j is not a subcomplex", {"generator": repr(t)})
        d2[t] = coords

    # item 4: psi' contracts M2
    for t in removed:
        for u in psi_prime[t]:
            if u not in removed_set:
                raise HypothesisError(4, "psi' leaves M2", {"generator": repr(t)})
            tq, th = M.grading(t)
            if M.grading(u) != (tq, th - 1) or M.generators[u].idempotent != M.generators[t].idempotent:
                raise HypothesisError(4, "psi' does not have degree (0,-1)", {"generator": repr(t), "image": repr(u)})

    def psi_z(coords: Dict[Term, int]) -> Combination:
        result = Combination()
        for (u, h), c in coords.items():
            for v, p in psi_prime[u].items():
                result.add_term((v, h), c * p)
        return result

    for t in removed:
        total = lin_sum((p, d2[u]) for u, p in psi_prime[t].items()) + psi_z(d2[t])
        if total != {(t, M.unit(t)): 1}:
            raise HypothesisError(4, "id != d2 psi' + psi' d2", {"generator": repr(t)})

    if variant == 2:
        for i in kept:
            for (j, h), c in M.tilde_coefficients(i).items():
                if j not in removed_set:
                    continue
                if psi_prime[j]:
                    raise HypothesisError(5, "c-tilde times psi' is nonzero", {"i": repr(i), "j": repr(j)})
                if tau[j]:
                    raise HypothesisError(6, "c-tilde times tau is nonzero", {"i": repr(i), "j": repr(j)})
        for i in removed:
            for j in psi_prime[i]:
                if tau[j]:
                    raise HypothesisError(7, "psi' times tau is nonzero", {"i": repr(i), "j": repr(j)})

    d1: Dict[Hashable, Combination] = {}
    d12: Dict[Hashable, Combination] = {}
    for i in kept:
        image = M.differential[i]
        kept_part = Combination({(k, h): c for (k, h), c in image.items() if k in kept_set})
        removed_part = Combination({(t, h): c for (t, h), c in image.items() if t in removed_set})
        correction = lin_sum((c, M.act(tau[t], h)) for (t, h), c in removed_part.items())
        d1[i] = kept_part - correction
        d12[i] = removed_part
    M1 = M.restricted(kept, d1)

    def x_coords(coords: Dict[Term, int]) -> Combination:
        return lin_sum((c, M.act(z(u), h)) for (u, h), c in coords.items())

    f = ChainMap(M, M1, {})
    for i in kept:
        f.images[i] = M.element(i)
    for t in removed:
        f.images[t] = -tau[t]
    g = ChainMap(M1, M, {i: M.element(i) - x_coords(psi_z(d12[i])) for i in kept})
    psi = ChainMap(M, M, {})
    for t in removed:
        psi.images[t] = -x_coords({(u, M.unit(t)): p for u, p in psi_prime[t].items()})

    f_kind, g_kind = ("Ctilde", "C") if variant == 1 else ("C", "Ctilde")
    checks = {
        "C_module(M1)": check_C_module(M1),
        "f": check_chain_map(f, f_kind, "f"),
        "g": check_chain_map(g, g_kind, "g"),
        "f o g = id": CheckReport.from_witness(
            "f o g = id", None if maps_equal(compose_chain_maps(g, f), identity_map(M1)) else {"reason": "f o g"}
        ),
        "g o f ~ id": check_homotopy(compose_chain_maps(f, g), identity_map(M), psi, "g o f ~ id"),
    }
    combined = CheckReport.combine("gaussian elimination", checks)
    if not combined.passed:
        raise VerificationError(combined.error or "elimination output failed", combined.witness)
    logger.info(f"Eliminated {len(removed)} generators (variant {variant}), {len(kept)} remain")
    return EliminationResult(M1, f, g, psi, variant, combined)


def removed_generators(M: ProjComplex, result: EliminationResult) -> Set[Hashable]:
    return set(M.generators) - set(result.complex.generators)
