"""
Exact canonical forms of small vertex- and edge-coloured multigraphs.

Two graphs get equal forms iff a colour-preserving isomorphism exists. Trees
with a single root vertex go through AHU encoding; everything else through
colour refinement plus individualization search over the first non-singleton
cell, skipping vertices that are twins of one already tried.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Hashable, Sequence

from grope_split.errors import BudgetError

Colour = tuple
Label = tuple


class CanonicalForm:
    def __init__(self, colours: dict[Hashable, Colour], edges: Sequence[tuple[Hashable, Hashable, Label]],
                 search_limit: int = 200000):
        self.vertices = sorted(colours, key=repr)
        self.position = {vertex: index for index, vertex in enumerate(self.vertices)}
        self.colours = [colours[vertex] for vertex in self.vertices]
        self.edges = [(self.position[u], self.position[v], label) for u, v, label in edges]
        self.search_limit = search_limit
        self.searched = 0
        self.adjacency: list[list[tuple[Label, int]]] = [[] for _ in self.vertices]
        for u, v, label in self.edges:
            self.adjacency[u].append((label, v))
            self.adjacency[v].append((label, u))

    def compute(self, roots: Sequence[Hashable] = ()) -> tuple:
        root_positions = [self.position[root] for root in roots]
        if len(root_positions) == 1 and self._is_tree():
            return 'tree', self._ahu(root_positions[0], None)
        return 'graph', self._search(self._refine(self._rank(self.colours)))

    def _is_tree(self) -> bool:
        count = len(self.vertices)
        if len(self.edges) != count - 1:
            return False
        if any(u == v for u, v, _ in self.edges):
            return False
        seen, stack = {0}, [0]
        while stack:
            current = stack.pop()
            for _, other in self.adjacency[current]:
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        return len(seen) == count

    def _ahu(self, vertex: int, parent: int | None) -> tuple:
        children = sorted((label, self._ahu(other, vertex))
                          for label, other in self.adjacency[vertex] if other != parent)
        return self.colours[vertex], tuple(children)

    @staticmethod
    def _rank(keys: Sequence) -> list[int]:
        order = {key: rank for rank, key in enumerate(sorted(set(keys)))}
        return [order[key] for key in keys]

    def _refine(self, colouring: list[int]) -> list[int]:
        while True:
            signatures = [
                (colouring[vertex], tuple(sorted((label, colouring[other]) for label, other in self.adjacency[vertex])))
                for vertex in range(len(colouring))
            ]
            refined = self._rank(signatures)
            if len(set(refined)) == len(set(colouring)):
                return refined
            colouring = refined

    def _certificate(self, colouring: list[int]) -> tuple:
        order = sorted(range(len(colouring)), key=lambda vertex: colouring[vertex])
        rank = {vertex: index for index, vertex in enumerate(order)}
        edges = sorted((min(rank[u], rank[v]), max(rank[u], rank[v]), label) for u, v, label in self.edges)
        return tuple(self.colours[vertex] for vertex in order), tuple(edges)

    def _twins(self, u: int, v: int) -> bool:
        def neighbourhood(vertex, other):
            return sorted((label, n) for label, n in self.adjacency[vertex] if n != other)
        return neighbourhood(u, v) == neighbourhood(v, u)

    def _search(self, colouring: list[int]) -> tuple:
        self.searched += 1
        if self.searched > self.search_limit:
            raise BudgetError(f'Canonical labelling exceeded {self.search_limit} search nodes', stage='canonical')
        cells = defaultdict(list)
        for vertex, colour in enumerate(colouring):
            cells[colour].append(vertex)
        targets = [cells[colour] for colour in sorted(cells) if len(cells[colour]) > 1]
        if not targets:
            return self._certificate(colouring)
        best, tried = None, []
        for vertex in targets[0]:
            if any(self._twins(vertex, other) for other in tried):
                continue
            tried.append(vertex)
            individualized = self._refine(self._rank([(colour, vertex != index) for index, colour in enumerate(colouring)]))
            candidate = self._search(individualized)
            if best is None or candidate < best:
                best = candidate
        return best


def canonical_form(colours: dict[Hashable, Colour], edges: Sequence[tuple[Hashable, Hashable, Label]],
                   roots: Sequence[Hashable] = (), search_limit: int = 200000) -> tuple:
    return CanonicalForm(colours, edges, search_limit).compute(roots)
