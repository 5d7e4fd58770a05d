"""
Brute-force checkers for the splitting engine: radius-n balls compared by
exhaustive isomorphism, tree tests and collision search, all on networkx
multigraphs built from the algebraic intersection graph.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx

from grope_split.core import Core
from grope_split.cycles import Cycle
from grope_split.errors import OracleScaleError, PreconditionError
from grope_split.group import MAX_GENERATORS, BaseGroup, FreeGroup
from grope_split.model import IntersectionGraph, Model
from grope_split.splitting import branch_caps


def to_multigraph(graph: IntersectionGraph) -> nx.MultiGraph:
    """ Quotient classes as nodes, one keyed edge per algebraic intersection """
    multigraph = nx.MultiGraph()
    for vertex in graph.vertices:
        multigraph.add_node(graph.klass(vertex), kind=graph.kinds[vertex].value)
    for edge in graph.edges:
        left, right = (graph.klass(end) for end in edge.endpoints)
        multigraph.add_edge(left, right, key=edge.id, label=str(edge.label), edge=edge)
    return multigraph


def _labels_match(first: dict, second: dict) -> bool:
    # parallel edges compare as label multisets
    return sorted(data['label'] for data in first.values()) == sorted(data['label'] for data in second.values())


def _invariant(multigraph: nx.MultiGraph) -> tuple:
    colours = sorted(str(data['colour']) for _, data in multigraph.nodes(data=True))
    labels = sorted(data['label'] for _, _, data in multigraph.edges(data=True))
    degrees = sorted((str(multigraph.nodes[node]['colour']), degree) for node, degree in multigraph.degree())
    return tuple(colours), tuple(labels), tuple(degrees)


@dataclass(frozen=True, eq=False)
class BallSignature:
    invariant: tuple
    graph: nx.MultiGraph = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, BallSignature):
            return NotImplemented
        if self.invariant != other.invariant:
            return False
        return nx.is_isomorphic(self.graph, other.graph,
                                node_match=nx.algorithms.isomorphism.categorical_node_match('colour', None),
                                edge_match=_labels_match)

    def __hash__(self):
        return hash(self.invariant)

    @property
    def size(self) -> int:
        return self.graph.number_of_nodes()


def _root_classes(graph: IntersectionGraph, roots: Iterable[str]) -> list[str]:
    classes = []
    for root in roots:
        if root not in graph.kinds:
            raise PreconditionError(f'`{root}` is not a vertex of the intersection graph', culprit=root)
        classes.append(graph.klass(root))
    return sorted(set(classes))


def ball_graph(graph: IntersectionGraph, roots: Iterable[str], n: int) -> nx.MultiGraph:
    """ Radius-n ball around the classes of `roots`, root classes marked in the node colour """
    multigraph = to_multigraph(graph)
    root_classes = _root_classes(graph, roots)
    lengths: dict[str, int] = {}
    for klass in root_classes:
        for node, length in nx.single_source_shortest_path_length(multigraph, klass, cutoff=n).items():
            lengths[node] = min(length, lengths.get(node, length))
    ball = multigraph.subgraph(lengths).copy()
    for node, data in ball.nodes(data=True):
        data['colour'] = (data['kind'], node in root_classes)
    return ball


def signature_of(ball: nx.MultiGraph, limit: Optional[int] = None) -> BallSignature:
    limit = limit or Core.get_oracle_limit()
    if ball.number_of_nodes() > limit:
        raise OracleScaleError(f'Ball of {ball.number_of_nodes()} vertices exceeds the oracle limit {limit}')
    return BallSignature(_invariant(ball), ball)


def ball(graph: IntersectionGraph, root: str, n: int, limit: Optional[int] = None,
         group: Optional[BaseGroup] = None) -> BallSignature:
    """ Signature of the radius-n ball; labels up to inversion, read in the free group unless `group` is given """
    group = group or FreeGroup(MAX_GENERATORS)
    return signature_of(ball_graph(graph.up_to_inversion(group), [root], n), limit)


def branch_signature(model: Model, grope_id: str, branch: int, n: int, limit: Optional[int] = None) -> BallSignature:
    """ Ball around every cap of one branch, labels taken up to inversion """
    graph = IntersectionGraph.from_model(model).up_to_inversion(model.group)
    caps = branch_caps(model, grope_id).get(branch, [])
    return signature_of(ball_graph(graph, caps, n), limit)


def shortest_cycle(multigraph: nx.MultiGraph) -> Optional[Cycle]:
    loops = sorted((key, node) for node, _, key in nx.selfloop_edges(multigraph, keys=True))
    if loops:
        key, node = loops[0]
        return Cycle((node,), (multigraph.edges[node, node, key]['edge'],))

    best: Optional[Cycle] = None
    for left, right in sorted({tuple(sorted((u, v))) for u, v in multigraph.edges()}):
        keys = sorted(multigraph[left][right])
        if len(keys) > 1:
            candidate = Cycle((left, right), (multigraph.edges[left, right, keys[0]]['edge'],
                                              multigraph.edges[left, right, keys[1]]['edge']))
            if best is None or candidate.sort_key() < best.sort_key():
                best = candidate
    if best is not None:
        return best

    simple = nx.Graph(multigraph)
    for left, right in sorted(tuple(sorted(pair)) for pair in simple.edges()):
        view = nx.restricted_view(simple, [], [(left, right)])
        try:
            path = nx.shortest_path(view, right, left)
        except nx.NetworkXNoPath:
            continue
        if best is not None and len(path) > best.length:
            continue
        steps = [next(iter(multigraph[u][v].values()))['edge'] for u, v in zip(path, path[1:])]
        steps.append(next(iter(multigraph[left][right].values()))['edge'])
        candidate = Cycle(tuple(path), tuple(steps))
        if best is None or candidate.sort_key() < best.sort_key():
            best = candidate
    return best


def is_tree_ball(graph: IntersectionGraph, root: str, n: int) -> tuple[bool, Optional[Cycle]]:
    """ True iff the radius-n ball around the root's class is connected and acyclic; else the shortest cycle """
    neighbourhood = ball_graph(graph, [root], n)
    cycle = shortest_cycle(neighbourhood)
    if cycle is not None:
        return False, cycle
    return nx.is_connected(neighbourhood), None


def collision_search(model: Model, n: int) -> Optional[Cycle]:
    cycle = shortest_cycle(to_multigraph(IntersectionGraph.from_model(model)))
    if cycle is not None and cycle.length <= n:
        return cycle
    return None
