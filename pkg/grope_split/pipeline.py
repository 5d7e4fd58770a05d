"""
Embedding pipeline for a transverse sphere pair: capped grope, splitting to
distance n, an n-sheet cyclic lift of the radius-n ball around one cap, stage
handles, push-down of the lifted intersections, projected certificate.

The `unrolled` construction replaces the lift by the non-backtracking
unrolling of the ball; it is a tree by construction.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Optional

import networkx as nx

from grope_split.common import Common
from grope_split.core import Core
from grope_split.cycles import Cycle, girth
from grope_split.errors import BudgetError, PreconditionError
from grope_split.handles import Certificate, add_stage_handles, certify, discharge_all, dual_of
from grope_split.model import (GROPE_KINDS, CappedGrope, IntersectionEdge, IntersectionGraph, Model, ModelObject,
                               dyadic_labels, sphere_to_capped_grope)
from grope_split.oracles import ball_graph, is_tree_ball
from grope_split.splitting import path_bits, split_to_distance
from grope_split.unravel import cyclic_shift

CONSTRUCTIONS = ('cyclic', 'unrolled')


@dataclass(frozen=True)
class PipelineOptions:
    pair: Optional[str] = None
    n: int = 2
    height: Optional[int] = None
    budget: Optional[int] = None
    construction: str = CONSTRUCTIONS[0]


@dataclass(frozen=True)
class TreeNode:
    index: int
    vertex: str
    parent: Optional[int] = None
    edge: Optional[IntersectionEdge] = None
    # (edge id, slot) through which the vertex was entered
    entry: Optional[tuple[str, int]] = None
    depth: int = 0
    sheet: int = 0


@dataclass(frozen=True)
class PipelineReport:
    pair: str
    n: int
    height: int
    grope: str
    root: str
    vertex_count: int
    depth: int
    tree: bool
    witness: Optional[Cycle]
    girth: float
    certificate: Certificate
    # largest number of input labels multiplied into one pushed-down label
    max_factors: int = 0
    construction: str = CONSTRUCTIONS[0]

    def to_document(self) -> dict:
        return {
            'pair': self.pair,
            'n': self.n,
            'height': self.height,
            'grope': self.grope,
            'root': self.root,
            'vertex_count': self.vertex_count,
            'depth': self.depth,
            'tree': self.tree,
            'witness': None if self.witness is None else list(self.witness.path),
            'girth': None if self.girth == float('inf') else self.girth,
            'certificate': self.certificate.verdict,
            'max_factors': self.max_factors,
            'construction': self.construction,
        }


def distinguished_cap(model: Model, grope_id: str) -> str:
    labels = dyadic_labels(model, grope_id)
    if not labels:
        return grope_id
    return min(labels, key=lambda cap: (labels[cap], cap))


def unroll(graph: IntersectionGraph, root: str, n: int, budget: int) -> list[TreeNode]:
    """ Non-backtracking unrolling of the algebraic graph around `root`, breadth-first """
    ends: dict[str, list[tuple[IntersectionEdge, int]]] = {vertex: [] for vertex in graph.vertices}
    for edge in graph.edges:
        for slot, end in enumerate(edge.endpoints):
            ends[end].append((edge, slot))

    nodes = [TreeNode(0, root)]
    queue = deque(nodes)
    while queue:
        node = queue.popleft()
        if node.depth == n:
            continue
        for edge, slot in ends[node.vertex]:
            if node.entry == (edge.id, slot):
                continue
            child = TreeNode(len(nodes), edge.endpoints[1 - slot], node.index, edge, (edge.id, 1 - slot),
                             node.depth + 1)
            nodes.append(child)
            queue.append(child)
            if len(nodes) > budget:
                raise BudgetError(f'Unrolled tree exceeds the budget {budget}', stage='unroll')
    return nodes


def vertex_depths(graph: IntersectionGraph, root: str, n: int) -> dict[str, int]:
    adjacency = graph.vertex_adjacency()
    depths = {root: 0}
    queue = deque([root])
    while queue:
        vertex = queue.popleft()
        if depths[vertex] == n:
            continue
        for _, other in adjacency[vertex]:
            if other not in depths:
                depths[other] = depths[vertex] + 1
                queue.append(other)
    return depths


def lift(graph: IntersectionGraph, root: str, n: int) -> nx.MultiGraph:
    """
    n sheets of the radius-n vertex ball around `root`. An algebraic edge runs
    from sheet i at its first end to the next sheet at its second end, so a
    closed walk of length L lifts to a closed walk only when n divides its
    net shift.
    """
    depths = vertex_depths(graph, root, n)
    lifted = nx.MultiGraph()
    for vertex in sorted(depths):
        for sheet in range(n):
            lifted.add_node((vertex, sheet))
    for edge in graph.edges:
        first, second = edge.endpoints
        if first not in depths or second not in depths:
            continue
        for sheet in range(n):
            ends = ((first, sheet), (second, cyclic_shift(sheet, n)))
            lifted.add_edge(*ends, key=(edge.id, sheet), edge=edge, ends=ends)
    return lifted


def lifted_segment(lifted: nx.MultiGraph, root: str, n: int, budget: int) -> list[TreeNode]:
    """ Breadth-first spanning tree of the lift within distance n of the root's first sheet """
    start = (root, 0)
    nodes = [TreeNode(0, root)]
    index = {start: 0}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        node = nodes[index[current]]
        if node.depth == n:
            continue
        for _, other, _, data in sorted(lifted.edges(current, keys=True, data=True), key=lambda item: item[2]):
            if other in index:
                continue
            index[other] = len(nodes)
            nodes.append(TreeNode(len(nodes), other[0], node.index, data['edge'], None, node.depth + 1, other[1]))
            queue.append(other)
            if len(nodes) > budget:
                raise BudgetError(f'Lifted segment exceeds the budget {budget}', stage='unroll')
    return nodes


def _copy_grope(model: Model, base: str) -> dict[str, str]:
    mapping = {node: model.derived_id(node) for node in model.subtree(base)}
    for node, copy in mapping.items():
        obj = model.objects[node]
        model.add_object(replace(obj, id=copy, quotient=None,
                                 parent=mapping.get(obj.parent) if obj.parent else None,
                                 children=tuple((mapping[left], mapping[right]) for left, right in obj.children)))
    original = model.gropes.get(base, CappedGrope(base, model.grope_height(base), dyadic=True))
    model.gropes[mapping[base]] = replace(original, id=mapping[base])
    return mapping


def _copy_single(model: Model, vertex: str) -> str:
    obj = model.objects[vertex]
    copy = model.derived_id(vertex)
    model.add_object(ModelObject(copy, obj.kind, genus=obj.genus, layer=obj.layer))
    return copy


def _realize(model: Model, nodes: list[TreeNode]) -> tuple[dict[int, str], dict[int, str]]:
    """ Fresh copy per tree vertex; returns tree index -> object and tree index -> grope copy base """
    realized, copies = {}, {}
    for node in nodes:
        base = model.base_of(node.vertex) if model.objects[node.vertex].kind in GROPE_KINDS else None
        if base is not None:
            mapping = _copy_grope(model, base)
            realized[node.index], copies[node.index] = mapping[node.vertex], mapping[base]
        else:
            realized[node.index] = _copy_single(model, node.vertex)
        if node.parent is not None:
            model.new_edge((realized[node.parent], realized[node.index]), node.edge.label)
    return realized, copies


def _realize_sheets(model: Model, lifted: nx.MultiGraph, nodes: list[TreeNode]
                    ) -> tuple[dict[int, str], dict[int, str], list[str]]:
    """
    One copy per lifted vertex, a grope copied once per sheet, and every
    lifted edge realized. Returns segment index -> object, segment index ->
    grope copy base, and all grope copy bases.
    """
    objects: dict[tuple[str, int], str] = {}
    bases: dict[tuple[str, int], str] = {}
    sheet_copies: dict[tuple[str, int], dict[str, str]] = {}
    for vertex, sheet in sorted(lifted.nodes):
        if model.objects[vertex].kind in GROPE_KINDS:
            base = model.base_of(vertex)
            if (base, sheet) not in sheet_copies:
                sheet_copies[base, sheet] = _copy_grope(model, base)
            mapping = sheet_copies[base, sheet]
            objects[vertex, sheet], bases[vertex, sheet] = mapping[vertex], mapping[base]
        else:
            objects[vertex, sheet] = _copy_single(model, vertex)
    for _, _, _, data in sorted(lifted.edges(keys=True, data=True), key=lambda item: item[2]):
        first, second = data['ends']
        model.new_edge((objects[first], objects[second]), data['edge'].label)

    realized = {node.index: objects[node.vertex, node.sheet] for node in nodes}
    copies = {node.index: bases[node.vertex, node.sheet] for node in nodes if (node.vertex, node.sheet) in bases}
    return realized, copies, [mapping[base] for (base, _), mapping in sorted(sheet_copies.items())]


def _attach_handles(model: Model, bases: list[str]):
    for base in bases:
        for surface in model.subtree(base):
            for index in range(len(model.objects[surface].children)):
                add_stage_handles(model, base, (surface, index))


def _ancestor_at(model: Model, obj_id: str, depth: int) -> str:
    current = obj_id
    while model.depth(current) > depth:
        current = model.objects[current].parent
    return current


def _push_down(model: Model, nodes: list[TreeNode], realized: dict[int, str], copies: dict[int, str]) -> int:
    """
    Lift every tree path between two grope copies to a transverse intersection
    of the upper copy's stage at the common prefix with the dual sphere of the
    lower copy's stage. Returns the largest number of multiplied labels.
    """
    max_factors = 0
    for node in nodes:
        if node.index not in copies or node.parent is None:
            continue
        labels, current = [], node
        while current.parent is not None:
            labels.append(current.edge.label)
            current = nodes[current.parent]
            if current.index in copies:
                break
        if current.index not in copies:
            continue
        upper, lower = realized[current.index], realized[node.index]
        upper_bits, lower_bits = path_bits(model, upper), path_bits(model, lower)
        if not upper_bits or not lower_bits:
            continue
        prefix = 0
        while prefix < min(len(upper_bits), len(lower_bits)) and upper_bits[prefix] == lower_bits[prefix]:
            prefix += 1
        surface = _ancestor_at(model, upper, min(prefix + 1, len(upper_bits)))
        target = dual_of(model, _ancestor_at(model, lower, min(prefix + 1, len(lower_bits))))
        if target is None:
            continue
        model.new_edge((surface, target), model.group.product(reversed(labels)), transverse=True)
        max_factors = max(max_factors, len(labels))
    return max_factors


def _pick_pair(model: Model, pair: Optional[str]) -> str:
    if pair is None:
        if not model.pairs:
            raise PreconditionError('Model has no transverse pairs')
        return sorted(model.pairs)[0]
    if pair not in model.pairs:
        raise PreconditionError(f'Unknown transverse pair `{pair}`', culprit=pair)
    return pair


def execute_pipeline(model: Model, options: PipelineOptions) -> tuple[Model, PipelineReport]:
    if options.n < 1:
        raise PreconditionError(f'Distance must be positive, got {options.n}')
    if options.construction not in CONSTRUCTIONS:
        raise PreconditionError(f'Unknown construction `{options.construction}`', culprit=options.construction)
    pair_id = _pick_pair(model, options.pair)
    height = options.height or Core.get_grope_height()
    budget = options.budget or Core.get_budget()
    n = options.n

    Common.cli_output(f'Building capped grope of height {height} for pair `{pair_id}`')
    result = sphere_to_capped_grope(model, pair_id, height)
    grope = result.pairs[pair_id].sphere_a
    Common.cli_output(f'Splitting `{grope}` to distance {n}')
    result = split_to_distance(result, grope, n, budget)

    root = distinguished_cap(result, grope)
    graph = IntersectionGraph.from_model(result)
    if options.construction == 'unrolled':
        nodes = unroll(graph, root, n, budget)
        Common.cli_output(f'Unrolled {len(nodes)} vertices around `{root}`')
        realized, copies = _realize(result, nodes)
        bases = sorted(set(copies.values()))
    else:
        lifted = lift(graph, root, n)
        nodes = lifted_segment(lifted, root, n, budget)
        Common.cli_output(f'Lifted {lifted.number_of_nodes()} vertices over {n} sheets, '
                          f'{len(nodes)} within distance {n} of `{root}`')
        realized, copies, bases = _realize_sheets(result, lifted, nodes)
    if result.object_count() > budget:
        raise BudgetError(f'Object budget {budget} exceeded during pipeline ({result.object_count()} objects)',
                          partial=result, stage='pipeline')
    _attach_handles(result, bases)
    max_factors = _push_down(result, nodes, realized, copies)

    root_base = copies.get(0)
    pair = result.pairs[pair_id]
    if root_base is not None:
        distinguished = result.edges[pair.distinguished]
        result.put_edge(distinguished.rewire({slot: root_base for slot, end in enumerate(distinguished.endpoints)
                                              if end == grope}))
        result.pairs[pair_id] = replace(pair, sphere_a=root_base)
    for node in reversed(result.subtree(grope)):
        result.remove_object(node)
    result.gropes.pop(grope, None)
    Common.cli_output(f'Realized {len(bases)} grope copies, {len(result.ledger.two_handles())} 2-handles')

    graph = IntersectionGraph.from_model(result)
    tree, witness = is_tree_ball(graph, realized[0], n)
    ball = set(ball_graph(graph, [realized[0]], n).nodes)
    ball_girth = girth(graph.restricted(vertex for vertex in graph.vertices if graph.klass(vertex) in ball))
    certificate = certify(discharge_all(result, assume_embedded=True).ledger)
    Common.cli_output(f'Tree: {tree}, girth: {ball_girth}, certificate: {certificate.verdict}')

    report = PipelineReport(pair_id, n, height, grope, realized[0], len(nodes), max(node.depth for node in nodes),
                            tree, witness, ball_girth, certificate, max_factors, options.construction)
    return result, report
