"""Flat tangle words, their Khovanov complexes over H^n and the closed cube complex of a link.

A tangle word lives on one side of a vertical line with 2n boundary points,
numbered 1..2n bottom to top, and is read outward from the line. The running
strands are numbered 1..m bottom to top; events are

    cap i          join strands i and i+1
    cup i in|out   insert a new pair at positions i, i+1
    x+ i / x- i    crossing of strands i and i+1

A crossing has ports a (lower in), b (upper in), c (lower out) and d (upper out).
Its V smoothing joins a-c and b-d, the H smoothing a-b and c-d. x+ has
0-smoothing V, x- has 0-smoothing H.
"""

import itertools
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, FrozenSet, Hashable, List, Optional, Sequence, Set, Tuple

from . import arcalg, hncomplex
from .arcalg import MINUS, PLUS, SignedDiagram
from .errors import HypothesisError, InputError, ParseError, SizeError, VerificationError
from .framework.check_result import CheckReport
from .hncomplex import EliminationResult, ProjComplex, ProjGenerator
from .planar import Matching
from .zlinalg import BigradedHomology, Combination, ZComplex, identification_witness, solve_signs

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"
CROSSINGS = ("x+", "x-")
MOVES = ("R1+", "R1-", "R2", "R3")
MAX_CROSSINGS = 16


@dataclass(frozen=True)
class Event:
    kind: str  # cap, cup, x+, x-
    index: int
    direction: Optional[str] = None  # cups only

    def __str__(self) -> str:
        if self.kind == "cup":
            return f"cup {self.index} {self.direction or 'in'}"
        return f"{self.kind} {self.index}"


@dataclass(frozen=True)
class TangleWord:
    side: str
    points: int
    orientations: Tuple[str, ...]  # "in" or "out" at boundary points 1..2n
    events: Tuple[Event, ...]

    @property
    def n(self) -> int:
        return self.points // 2

    def crossing_events(self) -> List[int]:
        return [i for i, event in enumerate(self.events) if event.kind in CROSSINGS]

    @property
    def crossing_count(self) -> int:
        return len(self.crossing_events())

    def with_events(self, position: int, events: Sequence[Event]) -> "TangleWord":
        if not 0 <= position <= len(self.events):
            raise InputError(f"event position {position} outside 0..{len(self.events)}")
        return replace(self, events=self.events[:position] + tuple(events) + self.events[position:])

    def lines(self) -> List[str]:
        lines = [f"tangle {self.side} {self.points}"]
        lines.extend(f"orient {k + 1} {o}" for k, o in enumerate(self.orientations))
        lines.extend(str(event) for event in self.events)
        return lines


@dataclass(frozen=True)
class Link:
    left: TangleWord
    right: TangleWord

    @property
    def n(self) -> int:
        return self.right.n


def _parse_event(tokens: List[str], line: int) -> Event:
    kind = tokens[0]
    if kind not in ("cap", "cup") + CROSSINGS:
        raise ParseError(f"unknown event {kind!r}", line=line)
    if len(tokens) < 2 or not tokens[1].isdigit():
        raise ParseError(f"{kind} needs a strand index", line=line)
    direction = None
    if kind == "cup":
        direction = tokens[2] if len(tokens) > 2 else "in"
        if direction not in ("in", "out"):
            raise ParseError(f"cup direction must be in or out, got {direction!r}", line=line)
    elif len(tokens) > 2:
        raise ParseError(f"trailing tokens after {kind}", line=line)
    return Event(kind, int(tokens[1]), direction)


def _parse_blocks(text: str) -> List[TangleWord]:
    blocks: List[Dict[str, Any]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        if tokens[0] == "tangle":
            if len(tokens) != 3 or tokens[1] not in (LEFT, RIGHT) or not tokens[2].isdigit():
                raise ParseError("expected `tangle left|right <points>`", line=number)
            points = int(tokens[2])
            if points % 2 or points < 2:
                raise ParseError(f"boundary point count must be even and positive, got {points}", line=number)
            blocks.append({"side": tokens[1], "points": points, "orient": {}, "events": [], "line": number})
            continue
        if not blocks:
            raise ParseError("content before the first `tangle` header", line=number)
        block = blocks[-1]
        if tokens[0] == "orient":
            if len(tokens) != 3 or not tokens[1].isdigit() or tokens[2] not in ("in", "out"):
                raise ParseError("expected `orient <point> in|out`", line=number)
            point = int(tokens[1])
            if not 1 <= point <= block["points"]:
                raise ParseError(f"orientation for point {point} outside 1..{block['points']}", line=number)
            block["orient"][point] = tokens[2]
            continue
        block["events"].append((_parse_event(tokens, number), number))

    words = []
    for block in blocks:
        missing = [p for p in range(1, block["points"] + 1) if p not in block["orient"]]
        if missing:
            raise ParseError(f"missing orientation for points {missing}", line=block["line"])
        word = TangleWord(
            block["side"],
            block["points"],
            tuple(block["orient"][p] for p in range(1, block["points"] + 1)),
            tuple(event for event, _ in block["events"]),
        )
        analyze(word, lines=[line for _, line in block["events"]])
        words.append(word)
    return words


def parse_tangle(text: str) -> TangleWord:
    words = _parse_blocks(text)
    if len(words) != 1:
        raise ParseError(f"expected one tangle, found {len(words)}")
    return words[0]


def parse_link(text: str) -> Link:
    words = _parse_blocks(text)
    if len(words) != 2:
        raise ParseError(f"a link file holds a left and a right tangle, found {len(words)} blocks")
    by_side = {word.side: word for word in words}
    if set(by_side) != {LEFT, RIGHT}:
        raise ParseError("a link file needs one left and one right tangle")
    link = Link(by_side[LEFT], by_side[RIGHT])
    check_boundary(link)
    return link


def load_link(path: str) -> Link:
    return parse_link(Path(path).read_text())


CORPUS_DIR = Path(__file__).parent / "corpus"


def corpus_links(corpus_dir: Optional[str] = None) -> Dict[str, Link]:
    """Every `*.link` file of the corpus directory, keyed by file stem."""
    path = Path(corpus_dir) if corpus_dir else CORPUS_DIR
    return {file.stem: load_link(str(file)) for file in sorted(path.glob("*.link"))}


def check_boundary(link: Link) -> None:
    if link.left.points != link.right.points:
        raise InputError(f"boundary mismatch: {link.left.points} and {link.right.points} points")
    for k, (a, b) in enumerate(zip(link.left.orientations, link.right.orientations), start=1):
        if a == b:
            raise InputError(f"boundary mismatch: point {k} is oriented {a} on both sides")


@dataclass
class _Strand:
    segment: int
    direction: int  # +1 travelling away from the boundary line


@dataclass
class Walk:
    """Segment unions of one resolution (or of the crossing-free data when rho is None)."""

    unions: List[Tuple[int, int]] = field(default_factory=list)
    parallel: List[bool] = field(default_factory=list)
    segments: List[int] = field(default_factory=list)
    cup_segments: Dict[int, List[int]] = field(default_factory=dict)


def _walk(word: TangleWord, rho: Optional[Sequence[int]] = None, base: Optional[int] = None, lines=None, stop: Optional[int] = None) -> Tuple[Walk, List[_Strand]]:
    points = word.points
    next_id = points if base is None else base
    strands = [_Strand(k, 1 if o == "in" else -1) for k, o in enumerate(word.orientations)]
    walk = Walk(segments=list(range(points)))
    crossing = 0
    events = word.events if stop is None else word.events[:stop]
    for position, event in enumerate(events):
        line = lines[position] if lines else None
        i = event.index
        if event.kind == "cap":
            if not 1 <= i < len(strands):
                raise ParseError(f"cap {i} with {len(strands)} strands", line=line, event=position)
            a, b = strands[i - 1], strands[i]
            if a.direction == b.direction:
                raise ParseError(f"cap {i} joins strands with the same orientation", line=line, event=position)
            walk.unions.append((a.segment, b.segment))
            del strands[i - 1 : i + 1]
        elif event.kind == "cup":
            if not 1 <= i <= len(strands) + 1:
                raise ParseError(f"cup {i} with {len(strands)} strands", line=line, event=position)
            direction = 1 if (event.direction or "in") == "in" else -1
            segment = next_id
            next_id += 1
            walk.segments.append(segment)
            walk.cup_segments[position] = [segment]
            strands[i - 1 : i - 1] = [_Strand(segment, direction), _Strand(segment, -direction)]
        else:
            if not 1 <= i < len(strands):
                raise ParseError(f"{event.kind} {i} with {len(strands)} strands", line=line, event=position)
            a, b = strands[i - 1], strands[i]
            c, d = next_id, next_id + 1
            next_id += 2
            walk.segments.extend([c, d])
            walk.cup_segments[position] = [c, d]
            walk.parallel.append(a.direction == b.direction)
            if rho is not None:
                bit = rho[crossing]
                vertical = (event.kind == "x+") == (bit == 0)
                if vertical:
                    walk.unions.extend([(a.segment, c), (b.segment, d)])
                else:
                    walk.unions.extend([(a.segment, b.segment), (c, d)])
            strands[i - 1] = _Strand(c, b.direction)
            strands[i] = _Strand(d, a.direction)
            crossing += 1
    return walk, strands


@dataclass
class TangleAnalysis:
    signs: List[int]

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)


def analyze(word: TangleWord, lines=None) -> TangleAnalysis:
    """Validate the word and compute crossing signs; positive iff the 0-smoothing is the oriented one."""
    if word.side not in (LEFT, RIGHT):
        raise ParseError(f"side must be left or right, got {word.side}")
    if len(word.orientations) != word.points:
        raise ParseError("one orientation per boundary point is required")
    walk, strands = _walk(word, lines=lines)
    if strands:
        raise ParseError(f"{len(strands)} strands left open at the end of the word")
    signs = []
    for event_index, parallel in zip(word.crossing_events(), walk.parallel):
        kind = word.events[event_index].kind
        signs.append(1 if (kind == "x+") == parallel else -1)
    return TangleAnalysis(signs)


def _components(segments: Sequence[int], unions: Sequence[Tuple[int, int]]) -> List[FrozenSet[int]]:
    uf = arcalg._UnionFind()
    for segment in segments:
        uf.find(segment)
    for x, y in unions:
        uf.union(x, y)
    return sorted(uf.groups(), key=min)


@dataclass
class Resolution:
    rho: Tuple[int, ...]
    components: List[FrozenSet[int]]
    matching: Optional[Matching]
    free: Dict[int, FrozenSet[int]]  # circle id (min segment) -> segments
    arcs: Dict[Tuple[int, int], FrozenSet[int]]


def resolve(word: TangleWord, rho: Sequence[int]) -> Resolution:
    walk, _ = _walk(word, rho)
    components = _components(walk.segments, walk.unions)
    free = {}
    arcs = {}
    for component in components:
        boundary = sorted(s + 1 for s in component if s < word.points)
        if not boundary:
            free[min(component)] = component
        elif len(boundary) == 2:
            arcs[tuple(boundary)] = component
        else:
            raise InputError(f"component meets the boundary in {len(boundary)} points")
    matching = Matching.from_pairs(arcs) if arcs else None
    return Resolution(tuple(rho), components, matching, free, arcs)


@dataclass(frozen=True)
class GeneratorLabel:
    rho: Tuple[int, ...]
    free: Tuple[Tuple[int, int], ...]  # (circle id, sign)


def _edge_sign(rho: Sequence[int], crossing: int, order: Sequence[int]) -> int:
    count = sum(1 for c, bit in enumerate(rho) if bit and order[c] < order[crossing])
    return -1 if count % 2 else 1


def _merge(first: int, second: int) -> Optional[int]:
    if first == MINUS and second == MINUS:
        return None
    return MINUS if MINUS in (first, second) else PLUS


def _split(sign: int) -> List[Tuple[int, int]]:
    if sign == PLUS:
        return [(PLUS, MINUS), (MINUS, PLUS)]
    return [(MINUS, MINUS)]


def khovanov_complex(word: TangleWord, crossing_order: Optional[Sequence[int]] = None) -> ProjComplex:
    """The complex of projective H^n-modules of a tangle: left module for a right tangle, right
    module for a left tangle. `crossing_order[c]` is the position of crossing c in the sign order."""
    analysis = analyze(word)
    k = word.crossing_count
    if k > MAX_CROSSINGS:
        raise SizeError(f"{k} crossings exceed the limit {MAX_CROSSINGS}")
    order = list(range(k)) if crossing_order is None else list(crossing_order)
    if sorted(order) != list(range(k)):
        raise InputError(f"crossing order must permute 0..{k - 1}")
    n = word.n
    side = hncomplex.LEFT if word.side == RIGHT else hncomplex.RIGHT
    shift = n if word.side == RIGHT else 0

    resolutions = {rho: resolve(word, rho) for rho in itertools.product((0, 1), repeat=k)}
    generators: Dict[Hashable, ProjGenerator] = {}
    for rho, res in resolutions.items():
        r = sum(rho)
        fids = sorted(res.free)
        for signs in itertools.product((PLUS, MINUS), repeat=len(fids)):
            label = GeneratorLabel(rho, tuple(zip(fids, signs)))
            j = -(sum(signs) + r + analysis.n_plus - 2 * analysis.n_minus) - shift
            generators[label] = ProjGenerator(res.matching, j, r - analysis.n_minus, label)

    def coefficient_gamma(source: Matching, target: Matching) -> SignedDiagram:
        if side == hncomplex.LEFT:
            return arcalg.diagram(source, target)
        return arcalg.diagram(target, source)

    differential: Dict[Hashable, Combination] = {}
    for label in generators:
        rho = label.rho
        res = resolutions[rho]
        signs = dict(label.free)
        image = Combination()
        for c in range(k):
            if rho[c]:
                continue
            rho2 = rho[:c] + (1,) + rho[c + 1:]
            res2 = resolutions[rho2]
            sign = _edge_sign(rho, c, order)
            before = set(res.components)
            after = set(res2.components)
            gone = [comp for comp in res.components if comp not in after]
            new = [comp for comp in res2.components if comp not in before]
            kept = {fid: s for fid, s in signs.items() if res.free[fid] in after}
            unit = arcalg.idempotent(res2.matching)

            def target(extra: Dict[int, int]) -> GeneratorLabel:
                merged = dict(kept)
                merged.update(extra)
                return GeneratorLabel(rho2, tuple(sorted(merged.items())))

            def is_free(comp: FrozenSet[int]) -> bool:
                return min(comp) >= word.points

            if len(gone) == 2 and len(new) == 1:
                free_gone = [comp for comp in gone if is_free(comp)]
                if len(free_gone) == 2:
                    merged = _merge(signs[min(free_gone[0])], signs[min(free_gone[1])])
                    if merged is not None:
                        image.add_term((target({min(new[0]): merged}), unit), sign)
                elif len(free_gone) == 1:
                    circle_sign = signs[min(free_gone[0])]
                    if circle_sign == PLUS:
                        image.add_term((target({}), unit), sign)
                    else:
                        arc = tuple(sorted(s + 1 for s in new[0] if s < word.points))
                        image.add_term((target({}), arcalg.h_alpha(res.matching, arc)), sign)
                else:
                    raise InputError("two arcs cannot merge into one component")
            elif len(gone) == 1 and len(new) == 2:
                if is_free(gone[0]):
                    first, second = sorted(new, key=min)
                    for s1, s2 in _split(signs[min(gone[0])]):
                        image.add_term((target({min(first): s1, min(second): s2}), unit), sign)
                else:
                    circle = next(comp for comp in new if is_free(comp))
                    arc_comp = next(comp for comp in new if not is_free(comp))
                    arc = tuple(sorted(s + 1 for s in arc_comp if s < word.points))
                    image.add_term((target({min(circle): MINUS}), unit), sign)
                    image.add_term((target({min(circle): PLUS}), arcalg.h_alpha(res.matching, arc)), sign)
            elif len(gone) == 2 and len(new) == 2:
                image.add_term((target({}), coefficient_gamma(res.matching, res2.matching)), sign)
            else:
                raise InputError(f"crossing {c} changes {len(gone)} components into {len(new)}")
        differential[label] = image
    logger.debug(f"Khovanov complex of {word.side} tangle: {len(generators)} generators, {k} crossings")
    return ProjComplex(n, side, generators, differential)


def reordering_isomorphism(word: TangleWord, crossing_order: Sequence[int]) -> Dict[Hashable, Tuple[Hashable, int]]:
    """x_rho -> (-1)^{inv(rho)} x_rho between the default and the reordered complex,
    inv counting 1-crossings whose relative order is reversed."""
    k = word.crossing_count
    mapping = {}
    for label in khovanov_complex(word).generators:
        ones = [c for c in range(k) if label.rho[c]]
        inversions = sum(
            1 for x, y in itertools.combinations(ones, 2) if crossing_order[x] > crossing_order[y]
        )
        mapping[label] = (label, -1 if inversions % 2 else 1)
    return mapping


def direct_CKh(link: Link, crossing_order: Optional[Sequence[int]] = None) -> ZComplex:
    """Cube of resolutions of the closed diagram, crossings of the right tangle first
    unless `crossing_order` reorders them for the edge signs."""
    check_boundary(link)
    right, left = link.right, link.left
    a_right, a_left = analyze(right), analyze(left)
    points = right.points
    k1, k2 = right.crossing_count, left.crossing_count
    if k1 + k2 > MAX_CROSSINGS:
        raise SizeError(f"{k1 + k2} crossings exceed the limit {MAX_CROSSINGS}")
    right_walk, _ = _walk(right)
    base = points + len(right_walk.segments) - points
    shift = base - points
    n_plus = a_right.n_plus + a_left.n_plus
    n_minus = a_right.n_minus + a_left.n_minus

    def key(component: FrozenSet[int]) -> Tuple[str, int]:
        boundary = [s for s in component if s < points]
        if boundary:
            return ("B", min(boundary) + 1)
        if max(component) < base:
            return ("T1", min(component))
        return ("T2", min(component) - shift)

    circles: Dict[Tuple[int, ...], Dict[Tuple[str, int], FrozenSet[int]]] = {}
    for rho in itertools.product((0, 1), repeat=k1 + k2):
        w1, _ = _walk(right, rho[:k1])
        w2, _ = _walk(left, rho[k1:], base=base)
        comps = _components(sorted(set(w1.segments) | set(w2.segments)), w1.unions + w2.unions)
        circles[rho] = {key(comp): comp for comp in comps}

    grading = {}
    for rho, comps in circles.items():
        r = sum(rho)
        keys = sorted(comps)
        for signs in itertools.product((PLUS, MINUS), repeat=len(keys)):
            gen = (rho, tuple(zip(keys, signs)))
            grading[gen] = (r - n_minus, sum(signs) + r + n_plus - 2 * n_minus)

    order = list(range(k1 + k2)) if crossing_order is None else list(crossing_order)
    if sorted(order) != list(range(k1 + k2)):
        raise InputError(f"crossing order must permute 0..{k1 + k2 - 1}")
    differential = {}
    for gen in grading:
        rho, labelled = gen
        signs = dict(labelled)
        image = Combination()
        for c in range(k1 + k2):
            if rho[c]:
                continue
            rho2 = rho[:c] + (1,) + rho[c + 1:]
            before, after = circles[rho], circles[rho2]
            after_sets = set(after.values())
            before_sets = set(before.values())
            gone = [k for k, comp in before.items() if comp not in after_sets]
            new = [k for k, comp in after.items() if comp not in before_sets]
            kept = {k: s for k, s in signs.items() if k not in gone}
            sign = _edge_sign(rho, c, order)
            if len(gone) == 2 and len(new) == 1:
                merged = _merge(signs[gone[0]], signs[gone[1]])
                if merged is not None:
                    image.add_term((rho2, tuple(sorted({**kept, new[0]: merged}.items()))), sign)
            elif len(gone) == 1 and len(new) == 2:
                for s1, s2 in _split(signs[gone[0]]):
                    image.add_term((rho2, tuple(sorted({**kept, new[0]: s1, new[1]: s2}.items()))), sign)
            else:
                raise InputError(f"crossing {c} is neither a merge nor a split")
        differential[gen] = image
    logger.info(f"Direct cube complex: {len(grading)} generators, {k1 + k2} crossings")
    return ZComplex(grading, differential)


def reorder_crossings(link: Link, crossing_order: Sequence[int]) -> Tuple[ZComplex, Dict[Hashable, Tuple[Hashable, int]]]:
    """The direct complex with reordered edge signs and the isomorphism from the default one."""
    reordered = direct_CKh(link, crossing_order)
    mapping = {}
    for gen in direct_CKh(link).generators:
        ones = [c for c, bit in enumerate(gen[0]) if bit]
        inversions = sum(
            1 for x, y in itertools.combinations(ones, 2) if crossing_order[x] > crossing_order[y]
        )
        mapping[gen] = (gen, -1 if inversions % 2 else 1)
    return reordered, mapping


def identify_with_direct(link: Link) -> Dict[Hashable, Tuple[Hashable, int]]:
    """Tensor generator (i, h, j) -> (direct generator, sign (-1)^{n_-(right) * r(left)})."""
    M = khovanov_complex(link.left)
    N = khovanov_complex(link.right)
    n_minus_right = analyze(link.right).n_minus
    mapping = {}
    for i, x in M.generators.items():
        for j, y in N.generators.items():
            for h in arcalg.basis(link.n):
                if h.left != x.idempotent or h.right != y.idempotent:
                    continue
                labelled = {("B", min(circle)): s for circle, s in zip(h.circles, h.signs)}
                labelled.update({("T1", fid): s for fid, s in j.free})
                labelled.update({("T2", fid): s for fid, s in i.free})
                rho = j.rho + i.rho
                sign = -1 if (n_minus_right * sum(i.rho)) % 2 else 1
                mapping[(i, h, j)] = ((rho, tuple(sorted(labelled.items()))), sign)
    return mapping


def kh(link: Link) -> BigradedHomology:
    return direct_CKh(link).homology()


def _strand_directions(word: TangleWord, position: int) -> List[int]:
    _, strands = _walk(word, stop=position)
    return [strand.direction for strand in strands]


def _r3_rewrite(triple: Sequence[Event], i: int) -> List[Event]:
    kinds = [1 if e.kind == "x+" else -1 for e in triple]
    indices = [e.index for e in triple]
    if indices == [i, i + 1, i]:
        other = [i + 1, i, i + 1]
    elif indices == [i + 1, i, i + 1]:
        other = [i, i + 1, i]
    else:
        raise InputError(f"no braid triple on strands {i}, {i + 1}")
    if kinds[0] == kinds[1] == kinds[2]:
        new_kinds = kinds
    elif kinds[2] == -kinds[0]:
        new_kinds = [-kinds[0], kinds[1], kinds[0]]
    else:
        raise InputError("crossing pattern does not admit a braid move")
    return [Event("x+" if s > 0 else "x-", index) for s, index in zip(new_kinds, other)]


def reidemeister(word: TangleWord, move: str, site: Tuple[int, int]) -> TangleWord:
    """Apply a Reidemeister move at site (event position, strand index)."""
    if move not in MOVES:
        raise InputError(f"unknown move {move}; expected one of {', '.join(MOVES)}")
    position, i = site
    if not 0 <= position <= len(word.events):
        raise InputError(f"event position {position} outside 0..{len(word.events)}")
    directions = _strand_directions(word, position)
    if move in ("R1+", "R1-"):
        if not 1 <= i <= len(directions):
            raise InputError(f"strand {i} does not exist at event {position}")
        cup_direction = "in" if directions[i - 1] > 0 else "out"
        kind = "x+" if move == "R1+" else "x-"
        result = word.with_events(position, [Event("cup", i + 1, cup_direction), Event(kind, i), Event("cap", i + 1)])
    elif move == "R2":
        if not 1 <= i < len(directions):
            raise InputError(f"strands {i}, {i + 1} do not exist at event {position}")
        result = word.with_events(position, [Event("x+", i), Event("x-", i)])
    else:
        triple = word.events[position : position + 3]
        if len(triple) != 3 or any(e.kind not in CROSSINGS for e in triple):
            raise InputError(f"no crossing triple at event {position}")
        rewritten = _r3_rewrite(triple, i)
        result = replace(word, events=word.events[:position] + tuple(rewritten) + word.events[position + 3 :])
    analyze(result)
    return result


def move_crossings(word: TangleWord, move: str, site: Tuple[int, int]) -> List[int]:
    """Indices, in the moved word, of the crossings the move created or rewrote."""
    position, _ = site
    before = sum(1 for e in word.events[:position] if e.kind in CROSSINGS)
    count = {"R1+": 1, "R1-": 1, "R2": 2, "R3": 3}[move]
    return list(range(before, before + count))


def move_segments(word: TangleWord, move: str, site: Tuple[int, int]) -> Set[int]:
    """Segment ids created by the events of the move, in the moved word's numbering."""
    moved = reidemeister(word, move, site)
    position, _ = site
    span = {"R1+": 3, "R1-": 3, "R2": 2, "R3": 3}[move]
    walk, _ = _walk(moved)
    segments: Set[int] = set()
    for event_position in range(position, position + span):
        segments.update(walk.cup_segments.get(event_position, []))
    return segments


@dataclass
class EquivalenceData:
    """Gaussian elimination steps from the moved tangle's complex back to one of the original's size."""

    moved: TangleWord
    complex: ProjComplex
    steps: List[EliminationResult]
    reference: ProjComplex
    report: CheckReport

    @property
    def final(self) -> ProjComplex:
        return self.steps[-1].complex if self.steps else self.complex


def _pattern(label: GeneratorLabel, local: Sequence[int]) -> Tuple[int, ...]:
    return tuple(label.rho[c] for c in local)


def find_cancellation(
    M: ProjComplex, local: Sequence[int], local_segments: Set[int], resolutions: Dict[Tuple[int, ...], Resolution]
) -> Optional[EliminationResult]:
    """First local pair cancellation that passes every elimination hypothesis."""
    patterns = sorted({_pattern(label, local) for label in M.generators}, key=lambda p: (sum(p), p))
    for pattern in patterns:
        members = [label for label in M.generators if _pattern(label, local) == pattern]
        local_circles = set()
        for label in members:
            res = resolutions[label.rho]
            for fid, comp in res.free.items():
                if comp <= local_segments:
                    local_circles.add(fid)
        conditions: List[Optional[Tuple[int, int]]] = [None]
        conditions += [(fid, s) for fid in sorted(local_circles) for s in (PLUS, MINUS)]
        for position, crossing in enumerate(local):
            if pattern[position]:
                continue
            for condition in conditions:
                sources = [
                    label
                    for label in members
                    if condition is None or dict(label.free).get(condition[0]) == condition[1]
                ]
                if not sources:
                    continue
                pairs = {}
                for label in sources:
                    flipped = label.rho[:crossing] + (1,) + label.rho[crossing + 1:]
                    hits = [
                        (t, c)
                        for (t, h), c in M.differential[label].items()
                        if t.rho == flipped and h.is_idempotent()
                    ]
                    if len(hits) != 1 or hits[0][1] not in (1, -1):
                        break
                    pairs[label] = hits[0][0]
                else:
                    try:
                        data = hncomplex.pair_cancellation_data(M, pairs)
                        return hncomplex.gaussian_eliminate(M, data)
                    except (HypothesisError, VerificationError) as e:
                        logger.debug(f"Candidate {pattern} at crossing {crossing} rejected: {e}")
    return None


def reidemeister_equivalence(word: TangleWord, move: str, site: Tuple[int, int]) -> EquivalenceData:
    """Apply the move, then eliminate locally until no certified cancellation remains."""
    moved = reidemeister(word, move, site)
    local = move_crossings(word, move, site)
    segments = move_segments(word, move, site)
    k = moved.crossing_count
    others = [c for c in range(k) if c not in local]
    order = [0] * k
    for position, c in enumerate(local + others):
        order[c] = position
    M = khovanov_complex(moved, crossing_order=order)
    reference = khovanov_complex(word)
    if M.side == hncomplex.LEFT:
        M = hncomplex.mirror_complex(M)
        reference = hncomplex.mirror_complex(reference)
    resolutions = {rho: resolve(moved, rho) for rho in itertools.product((0, 1), repeat=k)}

    steps: List[EliminationResult] = []
    current = M
    for _ in range(len(local) + 1):
        result = find_cancellation(current, local, segments, resolutions)
        if result is None:
            break
        steps.append(result)
        current = result.complex
    same_size = len(current) == len(reference)
    same_homology = current.to_zcomplex().homology() == reference.to_zcomplex().homology()
    checks = {f"step {i + 1}": step.report for i, step in enumerate(steps)}
    checks["homology"] = CheckReport.from_witness(
        "homology agrees", None if same_homology else {"final": len(current), "reference": len(reference)}
    )
    report = CheckReport.combine(f"{move} equivalence", checks)
    report.metadata.update(
        {"steps": len(steps), "variants": [s.variant for s in steps], "same_size": same_size}
    )
    logger.info(f"{move} at {site}: {len(steps)} elimination steps, {len(current)} generators remain")
    return EquivalenceData(moved, M, steps, reference, report)


def identify_tensor(link: Link, complex_: ZComplex, negate_q: bool = False) -> CheckReport:
    """Compare a pairing complex on generators (i, h, j) with the direct complex, coefficient by
    coefficient under the canonical identification. A failure names any diagonal sign change that
    would repair it; such a change does not count as a match."""
    direct = direct_CKh(link)
    mapping = identify_with_direct(link)
    witness = identification_witness(complex_, direct, mapping, negate_q)
    if witness is None:
        return CheckReport.success_result(data={"signs": "canonical"}, metadata={"check": "identification"})
    signs = solve_signs(complex_, direct, {gen: target for gen, (target, _) in mapping.items()}, negate_q)
    if signs is not None:
        witness = {**witness, "sign_change": sorted(repr(gen) for gen, s in signs.items() if s != mapping[gen][1])}
    return CheckReport.failure_result("no canonical identification with the direct complex", witness=witness)
