"""Crossingless matchings, noncrossing partitions, bridges and geodesics in NC_n."""

import logging
import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import BridgeError, InputError, ParseError, SizeError

logger = logging.getLogger(__name__)

MAX_N = 8

Pair = Tuple[int, int]
Bridge = Tuple[int, int]


def _check_n(n: int, bound: int = MAX_N) -> None:
    if not isinstance(n, int) or n < 1 or n > bound:
        raise SizeError(f"n must lie in 1..{bound}, got {n}")


@dataclass(frozen=True, order=True)
class Matching:
    """A crossingless matching of the points 1..2n, pairs stored as sorted (p, q) with p < q."""

    pairs: Tuple[Pair, ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> "Matching":
        normalized = tuple(sorted(tuple(sorted((int(p), int(q)))) for p, q in pairs))
        matching = cls(normalized)
        matching.validate()
        return matching

    @property
    def n(self) -> int:
        return len(self.pairs)

    def validate(self) -> None:
        points = sorted(p for pair in self.pairs for p in pair)
        if points != list(range(1, 2 * self.n + 1)):
            raise InputError(f"not a perfect matching of 1..{2 * self.n}: {self}")
        for p, q in self.pairs:
            for r, s in self.pairs:
                if p < r < q < s:
                    raise InputError(f"arcs ({p},{q}) and ({r},{s}) cross")

    @property
    def partner_map(self) -> Dict[int, int]:
        return _partners(self)

    def partner(self, point: int) -> int:
        return _partners(self)[point]

    def arc_of(self, point: int) -> Pair:
        other = self.partner(point)
        return (min(point, other), max(point, other))

    def __str__(self) -> str:
        return "[" + ",".join(f"({p},{q})" for p, q in self.pairs) + "]"


@lru_cache(maxsize=None)
def _partners(matching: Matching) -> Dict[int, int]:
    result = {}
    for p, q in matching.pairs:
        result[p] = q
        result[q] = p
    return result


_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_matching(text: str) -> Matching:
    """Parse the text form `[(1,4),(2,3)]`."""
    stripped = text.strip()
    if not (stripped.startswith("[") and stripped.endswith("]")):
        raise ParseError(f"matching must be bracketed: {text!r}")
    pairs = [(int(p), int(q)) for p, q in _PAIR.findall(stripped)]
    if not pairs:
        raise ParseError(f"no pairs in matching {text!r}")
    try:
        return Matching.from_pairs(pairs)
    except InputError as e:
        raise ParseError(str(e)) from e


@dataclass(frozen=True, order=True)
class Partition:
    """A noncrossing partition of 1..size, blocks sorted internally and by minimum."""

    size: int
    blocks: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, size: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        normalized = tuple(sorted(tuple(sorted(block)) for block in blocks))
        partition = cls(size, normalized)
        points = sorted(p for block in normalized for p in block)
        if points != list(range(1, size + 1)):
            raise InputError(f"blocks do not partition 1..{size}: {partition}")
        return partition

    def block_of(self, point: int) -> Tuple[int, ...]:
        for block in self.blocks:
            if point in block:
                return block
        raise InputError(f"{point} not in 1..{self.size}")

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "{" + ",".join("{" + ",".join(str(p) for p in block) + "}" for block in self.blocks) + "}"


def parse_partition(text: str, size: int) -> Partition:
    blocks = re.findall(r"\{([\d,\s]+)\}", text)
    if not blocks:
        raise ParseError(f"no blocks in partition {text!r}")
    try:
        return Partition.from_blocks(size, [[int(p) for p in block.split(",") if p.strip()] for block in blocks])
    except InputError as e:
        raise ParseError(str(e)) from e


def _matchings_of(points: Tuple[int, ...]) -> List[Tuple[Pair, ...]]:
    if not points:
        return [()]
    first = points[0]
    result = []
    for k in range(1, len(points), 2):
        inner = _matchings_of(points[1:k])
        outer = _matchings_of(points[k + 1:])
        for left in inner:
            for right in outer:
                result.append(((first, points[k]),) + left + right)
    return result


@lru_cache(maxsize=None)
def enumerate_matchings(n: int) -> Tuple[Matching, ...]:
    """All crossingless matchings of 2n points, lexicographically sorted by pair list."""
    _check_n(n)
    matchings = [Matching(tuple(sorted(pairs))) for pairs in _matchings_of(tuple(range(1, 2 * n + 1)))]
    return tuple(sorted(matchings))


def matching_index(matching: Matching) -> int:
    return enumerate_matchings(matching.n).index(matching)


def matching_to_partition(matching: Matching) -> Partition:
    """Checkerboard bijection: q_i sits between points 2i-1 and 2i, grouped by their region."""
    n = matching.n
    groups: Dict[Pair, List[int]] = {}
    for i in range(1, n + 1):
        position = 2 * i - 0.5
        enclosing = [(p, q) for p, q in matching.pairs if p < position < q]
        innermost = min(enclosing, key=lambda arc: arc[1] - arc[0])
        groups.setdefault(innermost, []).append(i)
    return Partition.from_blocks(n, groups.values())


def partition_to_matching(partition: Partition) -> Matching:
    pairs = []
    for block in partition.blocks:
        for a, b in zip(block, block[1:]):
            pairs.append((2 * a, 2 * b - 1))
        pairs.append((2 * block[0] - 1, 2 * block[-1]))
    return Matching.from_pairs(pairs)


def rotate(matching: Matching, steps: int = 1) -> Matching:
    size = 2 * matching.n
    return Matching.from_pairs(
        ((p - 1 + steps) % size + 1, (q - 1 + steps) % size + 1) for p, q in matching.pairs
    )


def kreweras_dual(partition: Partition) -> Partition:
    """Kreweras complement, read off the complementary regions of the matching."""
    return matching_to_partition(rotate(partition_to_matching(partition)))


def refines(finer: Partition, coarser: Partition) -> bool:
    if finer.size != coarser.size:
        raise SizeError(f"partitions of different sizes: {finer.size} and {coarser.size}")
    for block in finer.blocks:
        target = set(coarser.block_of(block[0]))
        if not set(block) <= target:
            return False
    return True


@lru_cache(maxsize=None)
def noncrossing_partitions(n: int) -> Tuple[Partition, ...]:
    return tuple(sorted(matching_to_partition(m) for m in enumerate_matchings(n)))


@dataclass
class HasseDiagram:
    vertices: Tuple[Partition, ...]
    edges: Tuple[Tuple[Partition, Partition], ...]
    adjacency: Dict[Partition, Tuple[Partition, ...]]


@lru_cache(maxsize=None)
def hasse_diagram(n: int) -> HasseDiagram:
    """Cover relations of NC_n; edges are (finer, coarser) with one block fewer."""
    vertices = noncrossing_partitions(n)
    edges = []
    for p in vertices:
        for q in vertices:
            if len(p) == len(q) + 1 and refines(p, q):
                edges.append((p, q))
    adjacency: Dict[Partition, List[Partition]] = {v: [] for v in vertices}
    for p, q in edges:
        adjacency[p].append(q)
        adjacency[q].append(p)
    logger.debug(f"NC_{n}: {len(vertices)} vertices, {len(edges)} Hasse edges")
    return HasseDiagram(vertices, tuple(edges), {v: tuple(sorted(nbrs)) for v, nbrs in adjacency.items()})


def _distances_from(n: int, target: Partition) -> Dict[Partition, int]:
    adjacency = hasse_diagram(n).adjacency
    distance = {target: 0}
    queue = deque([target])
    while queue:
        vertex = queue.popleft()
        for other in adjacency[vertex]:
            if other not in distance:
                distance[other] = distance[vertex] + 1
                queue.append(other)
    return distance


def hasse_distance(p: Partition, q: Partition) -> int:
    if p.size != q.size:
        raise SizeError(f"partitions of different sizes: {p.size} and {q.size}")
    return _distances_from(p.size, q)[p]


def geodesics(p: Partition, q: Partition) -> List[Tuple[Partition, ...]]:
    """Every shortest path from p to q in the undirected Hasse diagram."""
    if p.size != q.size:
        raise SizeError(f"partitions of different sizes: {p.size} and {q.size}")
    adjacency = hasse_diagram(p.size).adjacency
    distance = _distances_from(p.size, q)
    paths: List[Tuple[Partition, ...]] = []

    def extend(path: Tuple[Partition, ...]) -> None:
        last = path[-1]
        if last == q:
            paths.append(path)
            return
        for other in adjacency[last]:
            if distance[other] == distance[last] - 1:
                extend(path + (other,))

    extend((p,))
    return sorted(paths)


def geodesic_graph_components(p: Partition, q: Partition) -> List[List[Tuple[Partition, ...]]]:
    """Connected components of the graph on geodesics p -> q, adjacent when they differ at one vertex."""
    paths = geodesics(p, q)
    groups: Dict[Tuple, List[int]] = {}
    for index, path in enumerate(paths):
        for position in range(1, len(path) - 1):
            blanked = path[:position] + (None,) + path[position + 1:]
            groups.setdefault(blanked, []).append(index)
    seen: Set[int] = set()
    components = []
    for start in range(len(paths)):
        if start in seen:
            continue
        component = []
        queue = deque([start])
        seen.add(start)
        while queue:
            index = queue.popleft()
            component.append(paths[index])
            path = paths[index]
            for position in range(1, len(path) - 1):
                blanked = path[:position] + (None,) + path[position + 1:]
                for other in groups[blanked]:
                    if other not in seen:
                        seen.add(other)
                        queue.append(other)
        components.append(sorted(component))
    return components


def geodesic_graph_connected(p: Partition, q: Partition) -> bool:
    return len(geodesic_graph_components(p, q)) == 1


def is_drawable(matching: Matching, bridge: Bridge) -> bool:
    p, q = bridge
    if not (1 <= p < q <= 2 * matching.n):
        return False
    partners = matching.partner_map
    if partners[p] == q:
        return False
    return all(p < partners[r] < q for r in range(p + 1, q))


def surger(matching: Matching, bridge: Bridge) -> Matching:
    """Surgery along a drawable bridge: arcs (p, a(p)), (q, a(q)) become (p, q), (a(p), a(q))."""
    if not is_drawable(matching, bridge):
        raise BridgeError(f"bridge {bridge} is not drawable on {matching}")
    p, q = bridge
    partners = matching.partner_map
    ap, aq = partners[p], partners[q]
    pairs = [pair for pair in matching.pairs if p not in pair and q not in pair]
    pairs.extend([(p, q), (min(ap, aq), max(ap, aq))])
    try:
        return Matching.from_pairs(pairs)
    except InputError as e:
        raise BridgeError(f"surgery along {bridge} on {matching} is not planar") from e


def drawable_bridges(matching: Matching) -> List[Bridge]:
    size = 2 * matching.n
    return [(p, q) for p in range(1, size + 1) for q in range(p + 1, size + 1) if is_drawable(matching, (p, q))]


@lru_cache(maxsize=None)
def bridges(matching: Matching) -> Tuple[Bridge, ...]:
    """Drawable bridges up to identification: one representative (the smallest) per resulting matching."""
    seen: Dict[Matching, Bridge] = {}
    for bridge in drawable_bridges(matching):
        result = surger(matching, bridge)
        seen.setdefault(result, bridge)
    return tuple(sorted(seen.values()))


def dual_bridge(matching: Matching, bridge: Bridge) -> Bridge:
    """The bridge on surger(a, gamma) whose surgery returns to a."""
    target = surger(matching, bridge)
    for candidate in bridges(target):
        if surger(target, candidate) == matching:
            return candidate
    raise BridgeError(f"no dual bridge for {bridge} on {matching}")


def bridge_between(source: Matching, target: Matching) -> Optional[Bridge]:
    for bridge in bridges(source):
        if surger(source, bridge) == target:
            return bridge
    return None
