"""Orbital Schreier graph of o = 1^inf: points, Gray index, distances, export."""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional

import graphviz
import networkx as nx

from grigorchuk_lab.config import settings
from grigorchuk_lab.errors import CapacityError, PreconditionError
from grigorchuk_lab.services.core_tree import LETTERS, Element, OmegaString, TreeNode, section
from grigorchuk_lab.services.grigorchuk import FIRST_GROUP, check_ray

logger = logging.getLogger(__name__)


def to_gray_code(x: int) -> int:
    """Convert a counter index to its Gray code."""
    return (x >> 1) ^ x


def from_gray_code(n: int) -> int:
    """Convert a Gray code back to its index (prefix XOR from the top bit)."""
    x, e = n, 1
    while x:
        x = n >> e
        e *= 2
        n = n ^ x
    return n


@dataclass(frozen=True, order=True)
class OrbitPoint:
    """A ray cofinal with 1^inf, given by the sorted 1-based positions of its zeros."""

    zeros: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(p < 1 for p in self.zeros):
            raise PreconditionError("flipped positions start at 1")
        if list(self.zeros) != sorted(set(self.zeros)):
            object.__setattr__(self, "zeros", tuple(sorted(set(self.zeros))))

    @classmethod
    def from_ray(cls, ray: str, capacity: Optional[int] = None) -> OrbitPoint:
        ray = check_ray(ray)
        capacity = settings.orbit_capacity if capacity is None else capacity
        if len(ray) > capacity:
            raise CapacityError(f"orbit point flips position {len(ray)} beyond capacity {capacity}")
        return cls(tuple(i + 1 for i, ch in enumerate(ray) if ch == "0"))

    @classmethod
    def parse(cls, text: str) -> OrbitPoint:
        """Read ``"z:3,5,8"`` or a plain Gray integer."""
        text = text.strip()
        if text.startswith("z:"):
            body = text[2:].strip()
            return cls(tuple(int(p) for p in body.split(",") if p.strip()))
        return from_gray_index(int(text))

    @property
    def ray(self) -> str:
        """Normalized ray prefix (no trailing 1s)."""
        if not self.zeros:
            return ""
        bits = ["1"] * self.zeros[-1]
        for p in self.zeros:
            bits[p - 1] = "0"
        return "".join(bits)

    @property
    def depth(self) -> int:
        """n(x): the deepest flipped position, 0 for o."""
        return self.zeros[-1] if self.zeros else 0

    @property
    def flip_mask(self) -> int:
        return sum(1 << (p - 1) for p in self.zeros)

    def serialize(self) -> str:
        return "z:" + ",".join(str(p) for p in self.zeros)

    def __str__(self) -> str:
        return (self.ray or "") + "1^inf"


ORIGIN = OrbitPoint()


def gray_index(x: OrbitPoint) -> int:
    """Position of x on the half-line: the deepest flip is the top Gray bit."""
    return from_gray_code(x.flip_mask)


def from_gray_index(n: int) -> OrbitPoint:
    if n < 0:
        raise PreconditionError("Gray index must be nonnegative")
    mask = to_gray_code(n)
    return OrbitPoint(tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1))


def distance(x: OrbitPoint, y: OrbitPoint) -> int:
    return abs(gray_index(x) - gray_index(y))


def act_point(x: OrbitPoint, g: TreeNode) -> OrbitPoint:
    return OrbitPoint.from_ray(g.trace(x.ray)[0])


def neighbors(x: OrbitPoint, omega: OmegaString = FIRST_GROUP) -> set[tuple[str, OrbitPoint]]:
    """Pairs (s, x.s) for the generators s of G_omega."""
    return {(s, act_point(x, Element(s, 0, omega))) for s in LETTERS}


def _explore(
    start: OrbitPoint, radius_cap: int, omega: OmegaString, stop: Optional[OrbitPoint] = None
) -> nx.Graph:
    graph = nx.Graph()
    graph.add_node(start)
    frontier = [start]
    for _ in range(radius_cap):
        following = []
        for point in frontier:
            for s, image in neighbors(point, omega):
                if image == point:
                    continue
                if image not in graph:
                    following.append(image)
                graph.add_edge(point, image, label=s)
        if stop is not None and stop in graph:
            break
        frontier = following
    return graph


def bfs_distance(
    x: OrbitPoint, y: OrbitPoint, radius_cap: int, omega: OmegaString = FIRST_GROUP
) -> Optional[int]:
    """Graph distance by breadth-first search, or None when beyond ``radius_cap``."""
    if radius_cap < 0:
        raise PreconditionError("radius cap must be nonnegative")
    graph = _explore(x, radius_cap, omega, stop=y)
    if y not in graph:
        return None
    length = nx.shortest_path_length(graph, x, y)
    return length if length <= radius_cap else None


def depth_bounds(x: OrbitPoint) -> tuple[int, int]:
    """(2^{n(x)-1}, 2^{n(x)}-1) bracketing d(x, o); (0, 0) at o."""
    n = x.depth
    if n == 0:
        return 0, 0
    return 1 << (n - 1), (1 << n) - 1


def shift_point(x: OrbitPoint, n: int) -> OrbitPoint:
    """s^n x: drop the first n digits."""
    return OrbitPoint(tuple(p - n for p in x.zeros if p > n))


class InequalitySides(NamedTuple):
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def shift_inequality(x: OrbitPoint, y: OrbitPoint, n: int) -> InequalitySides:
    """d(x, y) against 2^n d(s^n x, s^n y) + 2^n - 1."""
    scale = 1 << n
    return InequalitySides(distance(x, y), scale * distance(shift_point(x, n), shift_point(y, n)) + scale - 1)


def displacement_sides(g: TreeNode, x: OrbitPoint, n: int) -> InequalitySides:
    """d(x, x.g) against 2^n (|g_{x_1..x_n}| + 1); lazy sections use their construction length."""
    image = act_point(x, g)
    prefix = (x.ray + "1" * n)[:n]
    local = section(g, prefix)
    explicit = local.to_explicit()
    length = len(explicit.word) if explicit is not None else local.construction_length
    return InequalitySides(distance(x, image), (1 << n) * (length + 1))


def displacement_check(g: TreeNode, x: OrbitPoint, n: int) -> bool:
    return displacement_sides(g, x, n).holds


def ball_graph(radius: int, omega: OmegaString = FIRST_GROUP) -> nx.Graph:
    """Orbit points with Gray index <= radius and their generator-labelled edges."""
    if radius < 0:
        raise PreconditionError("radius must be nonnegative")
    graph = nx.Graph()
    for n in range(radius + 1):
        point = from_gray_index(n)
        graph.add_node(point, index=n)
        for s, image in neighbors(point, omega):
            target = gray_index(image)
            if image == point or target > radius:
                continue
            if graph.has_edge(point, image):
                labels = set(graph.edges[point, image]["label"].split(","))
                labels.add(s)
                graph.edges[point, image]["label"] = ",".join(sorted(labels))
            else:
                graph.add_edge(point, image, label=s)
    return graph


def export_graph(radius: int, omega: OmegaString = FIRST_GROUP) -> str:
    """DOT source for the ball of Gray radius ``radius``; nodes are named by Gray index."""
    graph = ball_graph(radius, omega)
    dot = graphviz.Graph("schreier")
    for point, data in sorted(graph.nodes(data=True), key=lambda item: item[1]["index"]):
        dot.node(f"n{data['index']}", str(point))
    edges = sorted(
        (*sorted((gray_index(u), gray_index(v))), data["label"]) for u, v, data in graph.edges(data=True)
    )
    for i, j, label in edges:
        dot.edge(f"n{i}", f"n{j}", label=label)
    return dot.source


def write_distance_table(points: Iterable[OrbitPoint], path: Path) -> int:
    """CSV of (point, gray index, distance to o, n(x)); returns the row count."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["point", "gray_index", "distance_to_o", "depth"])
        for point in points:
            writer.writerow([point.serialize(), gray_index(point), distance(point, ORIGIN), point.depth])
            count += 1
    logger.info("wrote %d distance rows to %s", count, path)
    return count
