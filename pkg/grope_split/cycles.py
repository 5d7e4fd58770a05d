"""
Cycles of the quotient intersection graph: simple cycles of the multigraph on
quotient classes, loops and parallel edges included.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from grope_split.model import IntersectionEdge, IntersectionGraph


@dataclass(frozen=True)
class Cycle:
    # quotient classes in order; the last edge returns to path[0]
    path: tuple[str, ...]
    edges: tuple[IntersectionEdge, ...]

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def witness(self) -> str:
        return self.path[0]

    def sort_key(self) -> tuple:
        return self.length, self.path, tuple(edge.id for edge in self.edges)


def find_cycles(graph: IntersectionGraph, max_len: int) -> list[Cycle]:
    """ Every simple cycle of length <= max_len, shortest first """
    if max_len < 1:
        return []
    adjacency = graph.class_adjacency()
    classes = graph.classes()
    order = {klass: index for index, klass in enumerate(classes)}
    found: dict[frozenset, Cycle] = {}

    def keep(cycle: Cycle):
        key = frozenset(edge.id for edge in cycle.edges)
        if key not in found or cycle.sort_key() < found[key].sort_key():
            found[key] = cycle

    for edge in graph.edges:
        left, right = (graph.klass(end) for end in edge.endpoints)
        if left == right:
            keep(Cycle((left,), (edge,)))

    def extend(start: str, path: list[str], edges: list[IntersectionEdge]):
        current = path[-1]
        for edge, other in adjacency[current]:
            if other == current or any(edge.id == used.id for used in edges):
                continue
            if other == start:
                if edges:
                    keep(Cycle(tuple(path), tuple(edges) + (edge,)))
                continue
            if order[other] < order[start] or other in path or len(edges) + 2 > max_len:
                continue
            path.append(other)
            edges.append(edge)
            extend(start, path, edges)
            path.pop()
            edges.pop()

    if max_len >= 2:
        for start in classes:
            extend(start, [start], [])
    return sorted(found.values(), key=Cycle.sort_key)


def girth(graph: IntersectionGraph) -> float:
    """ Length of the shortest quotient cycle, `inf` for a forest """
    for edge in graph.edges:
        left, right = (graph.klass(end) for end in edge.endpoints)
        if left == right:
            return 1
    seen_pairs = set()
    for edge in graph.edges:
        key = frozenset(graph.klass(end) for end in edge.endpoints)
        if key in seen_pairs:
            return 2
        seen_pairs.add(key)
    best = math.inf
    adjacency = graph.class_adjacency()
    for root in graph.classes():
        distance, via = {root: 0}, {root: None}
        queue = deque([root])
        while queue:
            current = queue.popleft()
            for edge, other in adjacency[current]:
                if edge.id == via[current]:
                    continue
                if other in distance:
                    best = min(best, distance[current] + distance[other] + 1)
                    continue
                distance[other], via[other] = distance[current] + 1, edge.id
                queue.append(other)
    return best
