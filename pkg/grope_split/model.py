"""
Data model: capped gropes, transverse sphere pairs and Whitney towers sharing
one group-labelled intersection graph.

A `Model` is treated as an immutable snapshot by every public operation: the
operation copies it and edits the copy in place through the mutators below.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional

from grope_split.errors import MalformedInputError, PreconditionError, ShapeError
from grope_split.group import BaseGroup, GroupWord
from grope_split.ledger import HandleLedger


class ObjectKind(str, Enum):
    BASE_SURFACE = 'base-surface'
    STAGE_SURFACE = 'stage-surface'
    CAP = 'cap'
    SPHERE = 'sphere'
    WHITNEY_DISK = 'whitney-disk'
    CLIFFORD_TORUS = 'clifford-torus'
    DUAL_SPHERE = 'dual-sphere'


SURFACE_KINDS = frozenset({ObjectKind.BASE_SURFACE, ObjectKind.STAGE_SURFACE})
GROPE_KINDS = frozenset({ObjectKind.BASE_SURFACE, ObjectKind.STAGE_SURFACE, ObjectKind.CAP})

# (edge id, position in edge.endpoints); a loop has two ends on one object
EdgeEnd = tuple[str, int]


@dataclass(frozen=True)
class ModelObject:
    id: str
    kind: ObjectKind
    genus: int = 0
    children: tuple[tuple[str, str], ...] = ()
    parent: Optional[str] = None
    quotient: Optional[str] = None
    layer: int = 0
    # whitney disk: pairing it cancels; clifford torus: pairing it is dual to
    pairing: Optional[str] = None
    # torus cap: dual sphere it goes over
    host: Optional[str] = None

    @property
    def klass(self) -> str:
        return self.quotient or self.id

    def child_ids(self) -> list[str]:
        return [child for dual_pair in self.children for child in dual_pair]


@dataclass(frozen=True)
class IntersectionEdge:
    id: str
    endpoints: tuple[str, str]
    label: GroupWord
    pairing: Optional[str] = None
    transverse: bool = False

    def __post_init__(self):
        if tuple(sorted(self.endpoints)) != tuple(self.endpoints):
            object.__setattr__(self, 'endpoints', tuple(sorted(self.endpoints)))

    @property
    def is_loop(self) -> bool:
        return self.endpoints[0] == self.endpoints[1]

    def other(self, slot: int) -> str:
        return self.endpoints[1 - slot]

    def touches(self, obj_id: str) -> bool:
        return obj_id in self.endpoints

    def rewire(self, mapping: dict[int, str]) -> IntersectionEdge:
        """ Новое ребро с заменёнными концами (по позициям) """
        ends = [mapping.get(slot, end) for slot, end in enumerate(self.endpoints)]
        return replace(self, endpoints=tuple(sorted(ends)))


@dataclass(frozen=True)
class CappedGrope:
    id: str
    height: int
    dyadic: bool = False


@dataclass(frozen=True)
class TransversePair:
    id: str
    sphere_a: str
    sphere_b: str
    distinguished: str


@dataclass(frozen=True)
class WhitneyTower:
    id: str
    pair: str
    layers: tuple[tuple[str, ...], ...] = ()

    @property
    def height(self) -> int:
        return len(self.layers)


@dataclass(frozen=True, order=True)
class DyadicLabel:
    branch: int
    bits: tuple[int, ...] = ()

    def __str__(self):
        return f"{self.branch}:{''.join(str(bit) for bit in self.bits)}"


@dataclass(frozen=True, order=True)
class Violation:
    object: str
    rule: str
    message: str = field(compare=False, default='')


class Model:
    """
    Single source of truth: objects, intersection edges, the structures built
    from them and the handle ledger.
    """
    def __init__(self, group: BaseGroup):
        self.group = group
        self.objects: dict[str, ModelObject] = {}
        self.edges: dict[str, IntersectionEdge] = {}
        self.gropes: dict[str, CappedGrope] = {}
        self.pairs: dict[str, TransversePair] = {}
        self.towers: dict[str, WhitneyTower] = {}
        self.ledger = HandleLedger()
        self.serial = 0
        self._incidence: dict[str, set[str]] = defaultdict(set)
        self._pairings: dict[str, set[str]] = defaultdict(set)

    def copy(self) -> Model:
        clone = Model(self.group)
        clone.objects = dict(self.objects)
        clone.edges = dict(self.edges)
        clone.gropes = dict(self.gropes)
        clone.pairs = dict(self.pairs)
        clone.towers = dict(self.towers)
        clone.ledger = self.ledger.copy()
        clone.serial = self.serial
        for key, value in self._incidence.items():
            if value:
                clone._incidence[key] = set(value)
        for key, value in self._pairings.items():
            if value:
                clone._pairings[key] = set(value)
        return clone

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (self.group == other.group and self.objects == other.objects and self.edges == other.edges
                and self.gropes == other.gropes and self.pairs == other.pairs and self.towers == other.towers
                and self.ledger == other.ledger)

    __hash__ = None

    # identifiers

    def has_id(self, name: str) -> bool:
        return (name in self.objects or name in self.edges or name in self.gropes or name in self.pairs
                or name in self.towers or name in self._pairings)

    def fresh_id(self, stem: str) -> str:
        while True:
            self.serial += 1
            candidate = f'{stem}#{self.serial}'
            if not self.has_id(candidate):
                return candidate

    def derived_id(self, source: str) -> str:
        """ Fresh id for a split part or copy of `source` """
        return self.fresh_id(source.split('#')[0])

    def unique_id(self, preferred: str) -> str:
        return preferred if not self.has_id(preferred) else self.fresh_id(preferred)

    # mutators, used on private copies only

    def add_object(self, obj: ModelObject):
        if obj.id in self.objects:
            raise MalformedInputError(f'Duplicate object id `{obj.id}`')
        self.objects[obj.id] = obj

    def put_object(self, obj: ModelObject):
        self.objects[obj.id] = obj

    def remove_object(self, obj_id: str):
        for edge_id in list(self._incidence.get(obj_id, ())):
            self.remove_edge(edge_id)
        self.objects.pop(obj_id, None)
        self._incidence.pop(obj_id, None)

    def add_edge(self, edge: IntersectionEdge):
        if edge.id in self.edges:
            raise MalformedInputError(f'Duplicate edge id `{edge.id}`')
        self.edges[edge.id] = edge
        for end in edge.endpoints:
            self._incidence[end].add(edge.id)
        if edge.pairing is not None:
            self._pairings[edge.pairing].add(edge.id)

    def put_edge(self, edge: IntersectionEdge):
        if edge.id in self.edges:
            self.remove_edge(edge.id)
        self.add_edge(edge)

    def remove_edge(self, edge_id: str):
        edge = self.edges.pop(edge_id, None)
        if edge is None:
            return
        for end in edge.endpoints:
            self._incidence[end].discard(edge_id)
        if edge.pairing is not None:
            self._pairings[edge.pairing].discard(edge_id)
            if not self._pairings[edge.pairing]:
                del self._pairings[edge.pairing]

    def new_edge(self, endpoints: Iterable[str], label: GroupWord, pairing: Optional[str] = None,
                 transverse: bool = False) -> IntersectionEdge:
        edge = IntersectionEdge(self.fresh_id('e'), tuple(sorted(endpoints)), label, pairing, transverse)
        self.add_edge(edge)
        return edge

    # queries

    def incident(self, obj_id: str) -> list[IntersectionEdge]:
        return [self.edges[edge_id] for edge_id in sorted(self._incidence.get(obj_id, ()))]

    def algebraic_incident(self, obj_id: str) -> list[IntersectionEdge]:
        return [edge for edge in self.incident(obj_id) if not edge.transverse]

    def ends(self, obj_id: str) -> list[EdgeEnd]:
        result = []
        for edge in self.incident(obj_id):
            for slot, end in enumerate(edge.endpoints):
                if end == obj_id:
                    result.append((edge.id, slot))
        return result

    def klass(self, obj_id: str) -> str:
        return self.objects[obj_id].klass

    def pairing_edges(self, pairing: str) -> list[IntersectionEdge]:
        return [self.edges[edge_id] for edge_id in sorted(self._pairings.get(pairing, ()))]

    def pairing_ids(self) -> list[str]:
        return sorted(key for key, value in self._pairings.items() if value)

    def objects_of_kind(self, *kinds: ObjectKind) -> list[ModelObject]:
        return [self.objects[key] for key in sorted(self.objects) if self.objects[key].kind in kinds]

    def subtree(self, obj_id: str) -> list[str]:
        """ Объект и все его потомки в прямом порядке """
        result = [obj_id]
        for child in self.objects[obj_id].child_ids():
            result.extend(self.subtree(child))
        return result

    def base_of(self, obj_id: str) -> Optional[str]:
        current = self.objects.get(obj_id)
        seen = set()
        while current is not None and current.parent is not None and current.id not in seen:
            seen.add(current.id)
            current = self.objects.get(current.parent)
        if current is not None and current.kind == ObjectKind.BASE_SURFACE:
            return current.id
        return None

    def depth(self, obj_id: str) -> int:
        depth, current = 0, self.objects[obj_id]
        while current.parent is not None:
            depth += 1
            current = self.objects[current.parent]
        return depth

    def attachment(self, obj_id: str) -> tuple[str, int, int]:
        """ (parent, index of dual pair, side 0/1) of a non-base grope object """
        obj = self.objects[obj_id]
        if obj.parent is None:
            raise PreconditionError(f'Object `{obj_id}` has no parent stage', culprit=obj_id)
        for index, dual_pair in enumerate(self.objects[obj.parent].children):
            if obj_id in dual_pair:
                return obj.parent, index, dual_pair.index(obj_id)
        raise PreconditionError(f'Object `{obj_id}` is not attached to `{obj.parent}`', culprit=obj_id)

    def grope_caps(self, grope_id: str) -> list[str]:
        return [node for node in self.subtree(grope_id) if self.objects[node].kind == ObjectKind.CAP]

    def grope_height(self, grope_id: str) -> int:
        caps = self.grope_caps(grope_id)
        return max((self.depth(cap) for cap in caps), default=0)

    def pair_extras(self, pair: TransversePair) -> list[IntersectionEdge]:
        edges = {edge.id: edge for sphere in (pair.sphere_a, pair.sphere_b)
                 for edge in self.algebraic_incident(sphere)}
        edges.pop(pair.distinguished, None)
        return [edges[key] for key in sorted(edges)]

    def pair_of_sphere(self, sphere: str) -> Optional[TransversePair]:
        for key in sorted(self.pairs):
            if sphere in (self.pairs[key].sphere_a, self.pairs[key].sphere_b):
                return self.pairs[key]
        return None

    def object_count(self) -> int:
        return len(self.objects)


class IntersectionGraph:
    """
    Algebraic intersection multigraph of a model: non-transverse edges, the two
    edges of a Whitney pairing collapsed to one, vertices mapped to quotient
    classes.
    """
    def __init__(self, vertices: dict[str, ObjectKind], edges: list[IntersectionEdge], quotient: dict[str, str]):
        self.kinds = dict(vertices)
        self.edges = sorted(edges, key=lambda edge: edge.id)
        self.quotient = dict(quotient)

    @staticmethod
    def from_model(model: Model) -> IntersectionGraph:
        edges, seen_pairings = [], set()
        for edge_id in sorted(model.edges):
            edge = model.edges[edge_id]
            if edge.transverse:
                continue
            if edge.pairing is not None:
                if edge.pairing in seen_pairings:
                    continue
                seen_pairings.add(edge.pairing)
            edges.append(edge)
        vertices = {key: obj.kind for key, obj in model.objects.items()}
        quotient = {key: obj.klass for key, obj in model.objects.items()}
        return IntersectionGraph(vertices, edges, quotient)

    @property
    def vertices(self) -> list[str]:
        return sorted(self.kinds)

    def klass(self, vertex: str) -> str:
        return self.quotient.get(vertex, vertex)

    def classes(self) -> list[str]:
        return sorted(set(self.klass(vertex) for vertex in self.kinds))

    def class_kind(self, klass: str) -> ObjectKind:
        for vertex in self.vertices:
            if self.klass(vertex) == klass:
                return self.kinds[vertex]
        raise KeyError(klass)

    def members(self, klass: str) -> list[str]:
        return [vertex for vertex in self.vertices if self.klass(vertex) == klass]

    def class_adjacency(self) -> dict[str, list[tuple[IntersectionEdge, str]]]:
        """ class -> [(edge, other class)]; a loop is listed once per end """
        adjacency: dict[str, list[tuple[IntersectionEdge, str]]] = {klass: [] for klass in self.classes()}
        for edge in self.edges:
            left, right = (self.klass(end) for end in edge.endpoints)
            adjacency[left].append((edge, right))
            adjacency[right].append((edge, left))
        return adjacency

    def vertex_adjacency(self) -> dict[str, list[tuple[IntersectionEdge, str]]]:
        adjacency: dict[str, list[tuple[IntersectionEdge, str]]] = {vertex: [] for vertex in self.vertices}
        for edge in self.edges:
            left, right = edge.endpoints
            adjacency[left].append((edge, right))
            adjacency[right].append((edge, left))
        return adjacency

    def up_to_inversion(self, group: BaseGroup) -> IntersectionGraph:
        """ Same graph, every label replaced by the smaller of it and its inverse """
        edges = [replace(edge, label=group.canonical(edge.label)) for edge in self.edges]
        return IntersectionGraph(self.kinds, edges, self.quotient)

    def restricted(self, vertices: Iterable[str]) -> IntersectionGraph:
        keep = set(vertices)
        kinds = {vertex: kind for vertex, kind in self.kinds.items() if vertex in keep}
        edges = [edge for edge in self.edges if set(edge.endpoints) <= keep]
        return IntersectionGraph(kinds, edges, {vertex: self.klass(vertex) for vertex in kinds})


def label_set(model: Model) -> set[GroupWord]:
    """ Distinct labels of algebraic intersections, up to inversion """
    return {model.group.canonical(edge.label) for edge in model.edges.values() if not edge.transverse}


def label_multiset(model: Model, objects: Optional[Iterable[str]] = None) -> Counter:
    chosen = None if objects is None else set(objects)
    counter: Counter = Counter()
    for edge in model.edges.values():
        if edge.transverse:
            continue
        if chosen is not None and not chosen.intersection(edge.endpoints):
            continue
        counter[model.group.canonical(edge.label)] += 1
    return counter


def dyadic_label(model: Model, obj_id: str) -> Optional[DyadicLabel]:
    """ Label read off the attachments from the base up; None outside a grope """
    bits = []
    current = model.objects[obj_id]
    while current.parent is not None:
        parent = model.objects.get(current.parent)
        if parent is None or parent.kind not in SURFACE_KINDS:
            return None
        _, index, side = model.attachment(current.id)
        bits.append(side)
        if parent.kind == ObjectKind.BASE_SURFACE:
            return DyadicLabel(index, tuple(reversed(bits)))
        current = parent
    return None


def dyadic_labels(model: Model, grope_id: str) -> dict[str, DyadicLabel]:
    base = model.objects.get(grope_id)
    if base is None or base.kind != ObjectKind.BASE_SURFACE:
        raise ShapeError(f'`{grope_id}` is not the base of a capped grope', stage=grope_id)
    labels: dict[str, DyadicLabel] = {}
    for node in model.subtree(grope_id):
        obj = model.objects[node]
        if obj.kind == ObjectKind.STAGE_SURFACE and len(obj.children) > 1:
            raise ShapeError(f'Stage `{node}` has genus {obj.genus}, branch is not dyadic', stage=node)
        if obj.kind == ObjectKind.CAP:
            labels[node] = dyadic_label(model, node)
    return labels


def validate(model: Model) -> list[Violation]:
    violations: list[Violation] = []

    def report(obj: str, rule: str, message: str):
        violations.append(Violation(obj, rule, message))

    parents_seen: dict[str, str] = {}
    for key in sorted(model.objects):
        obj = model.objects[key]
        if obj.kind in SURFACE_KINDS:
            if obj.genus != len(obj.children):
                report(key, 'genus', f'genus {obj.genus} but {len(obj.children)} dual pairs')
            if obj.kind == ObjectKind.STAGE_SURFACE and obj.genus < 1:
                report(key, 'stage-genus', 'non-base stage of genus 0')
        elif obj.children:
            report(key, 'genus', f'{obj.kind.value} cannot carry dual pairs')
        for child in obj.child_ids():
            child_obj = model.objects.get(child)
            if child_obj is None:
                report(key, 'tree', f'unknown child `{child}`')
                continue
            if child_obj.kind not in (ObjectKind.STAGE_SURFACE, ObjectKind.CAP):
                report(child, 'tree', f'{child_obj.kind.value} attached as a grope stage')
            if child_obj.parent != key:
                report(child, 'tree', f'parent is `{child_obj.parent}`, attached to `{key}`')
            if child in parents_seen:
                report(child, 'tree', f'attached to both `{parents_seen[child]}` and `{key}`')
            parents_seen[child] = key
        parent = model.objects.get(obj.parent) if obj.parent is not None else None
        if obj.parent is None:
            if obj.kind in (ObjectKind.STAGE_SURFACE, ObjectKind.CAP):
                report(key, 'tree', 'detached grope stage')
        elif parent is None:
            report(key, 'tree', f'unknown parent `{obj.parent}`')
        elif parent.kind == ObjectKind.CLIFFORD_TORUS:
            if obj.kind != ObjectKind.CAP or obj.host is None:
                report(key, 'host', 'torus cap without a host dual sphere')
        elif key not in parent.child_ids():
            report(key, 'tree', f'not listed among the children of `{obj.parent}`')
        if obj.host is not None and (obj.host not in model.objects
                                     or model.objects[obj.host].kind != ObjectKind.DUAL_SPHERE):
            report(key, 'host', f'cap host `{obj.host}` is not a dual sphere')

    for key in sorted(model.gropes):
        grope = model.gropes[key]
        base = model.objects.get(key)
        if base is None or base.kind != ObjectKind.BASE_SURFACE:
            report(key, 'tree', 'grope does not name a base surface')
            continue
        for node in model.subtree(key):
            obj = model.objects.get(node)
            if grope.dyadic and obj is not None and obj.kind == ObjectKind.STAGE_SURFACE and obj.genus > 1:
                report(node, 'dyadic', f'stage of genus {obj.genus} in a grope claimed dyadic')
        if model.grope_caps(key):
            height = model.grope_height(key)
            if height != grope.height:
                report(key, 'height', f'declared height {grope.height}, deepest cap at {height}')

    classes: dict[str, set] = defaultdict(set)
    for obj in model.objects.values():
        classes[obj.klass].add(obj.kind)
    for klass in sorted(classes):
        if len(classes[klass]) > 1:
            kinds = ', '.join(sorted(kind.value for kind in classes[klass]))
            report(klass, 'quotient', f'class mixes kinds: {kinds}')

    for key in sorted(model.edges):
        edge = model.edges[key]
        missing = [end for end in edge.endpoints if end not in model.objects]
        if missing:
            report(key, 'endpoints', f'unknown endpoints {missing}')
        if model.group.reduce(edge.label.letters) != edge.label:
            report(key, 'reduced', f'label `{edge.label}` is not in normal form')

    for pairing in model.pairing_ids():
        edges = model.pairing_edges(pairing)
        if len(edges) != 2:
            report(pairing, 'pairing', f'{len(edges)} edges instead of 2')
        elif edges[0].endpoints != edges[1].endpoints:
            report(pairing, 'pairing', 'paired edges have different endpoints')
        elif any(edge.transverse for edge in edges):
            report(pairing, 'pairing', 'transverse edge in a Whitney pairing')
        elif model.group.canonical(edges[0].label) != model.group.canonical(edges[1].label):
            report(pairing, 'pairing', f'paired edges carry different labels `{edges[0].label}` and `{edges[1].label}`')

    for key in sorted(model.pairs):
        pair = model.pairs[key]
        edge = model.edges.get(pair.distinguished)
        if pair.sphere_a not in model.objects or pair.sphere_b not in model.objects:
            report(key, 'pair', 'unknown sphere')
        elif edge is None or set(edge.endpoints) != {pair.sphere_a, pair.sphere_b}:
            report(key, 'pair', 'distinguished edge does not join the two spheres')
        elif not edge.transverse:
            report(key, 'pair', 'distinguished edge must be transverse')

    for key in sorted(model.towers):
        tower = model.towers[key]
        if tower.pair not in model.pairs:
            report(key, 'tower', f'unknown pair `{tower.pair}`')
        for depth, layer in enumerate(tower.layers, start=1):
            for disk in layer:
                obj = model.objects.get(disk)
                if obj is None or obj.kind != ObjectKind.WHITNEY_DISK or obj.layer != depth:
                    report(disk, 'tower', f'not a whitney disk of layer {depth}')
                    continue
                for edge in model.algebraic_incident(disk):
                    for end in edge.endpoints:
                        other = model.objects.get(end)
                        if other is not None and (other.kind != ObjectKind.WHITNEY_DISK or other.layer < depth):
                            report(disk, 'tower', f'edge `{edge.id}` meets `{end}` below layer {depth}')

    ledger = model.ledger
    for record in ledger.records:
        if record.dimension == 3:
            cancelled = ledger.record(record.cancels) if record.cancels is not None else None
            if cancelled is None or cancelled.dimension != 2 or cancelled.index >= record.index:
                report(f'h{record.index}', 'ledger', '3-handle does not cancel a prior 2-handle')
    for obligation in ledger.obligations:
        handle = ledger.record(obligation.handle)
        if handle is None or handle.dimension != 2:
            report(f'h{obligation.handle}', 'ledger', 'obligation for a missing 2-handle')
    for row, col, _, _ in ledger.boundary.triplets():
        row_handle, col_handle = ledger.record(row), ledger.record(col)
        if row_handle is None or col_handle is None or col_handle.dimension != 2 or row_handle.dimension != 2:
            report(f'h{row}', 'ledger', f'boundary entry ({row}, {col}) outside the ledger')
        elif not any(record.cancels == row for record in ledger.three_handles()):
            report(f'h{row}', 'ledger', f'boundary row {row} has no 3-handle')

    return sorted(violations)


def sphere_to_capped_grope(model: Model, pair_id: str, height: int) -> Model:
    """
    Replace the A-sphere of a transverse pair by a capped grope: one genus-1
    piece of the base per Whitney pairing on A, each a full dyadic tree of the
    given height. The two intersections of a pairing move to two caps.
    """
    if height < 1:
        raise PreconditionError(f'Grope height must be positive, got {height}')
    pair = model.pairs.get(pair_id)
    if pair is None:
        raise PreconditionError(f'Unknown transverse pair `{pair_id}`', culprit=pair_id)
    sphere = pair.sphere_a
    if model.objects[sphere].kind != ObjectKind.SPHERE:
        raise PreconditionError(f'`{sphere}` is not a sphere', culprit=sphere)
    for edge in model.pair_extras(pair):
        if edge.pairing is None:
            raise PreconditionError(f'Pair `{pair_id}` is not algebraically trivial: `{edge.id}` is unpaired',
                                    culprit=edge.id)
    if any(record.attaching_site in (sphere, pair.sphere_b) for record in model.ledger.records):
        raise PreconditionError(f'Pair `{pair_id}` already carries handles', culprit=pair_id)
    if any(tower.pair == pair_id for tower in model.towers.values()):
        raise PreconditionError(f'Pair `{pair_id}` carries a Whitney tower', culprit=pair_id)

    result = model.copy()
    pairings = sorted({edge.pairing for edge in result.algebraic_incident(sphere) if edge.pairing is not None})
    for pairing in pairings:
        if len(result.pairing_edges(pairing)) != 2:
            raise PreconditionError(f'Pairing `{pairing}` does not have two edges', culprit=pairing)
    dependent = [obj.id for obj in result.objects.values()
                 if obj.pairing in pairings and obj.kind in (ObjectKind.WHITNEY_DISK, ObjectKind.CLIFFORD_TORUS)]
    if dependent:
        raise PreconditionError(f'Pairing of `{sphere}` is used by `{dependent[0]}`', culprit=dependent[0])

    base_id = result.unique_id(f'{sphere}~grope')

    def node_id(branch: int, bits: str) -> str:
        return f'{base_id}.{branch}.{bits}'

    def build(branch: int, bits: str, parent: str):
        if len(bits) == height:
            result.add_object(ModelObject(node_id(branch, bits), ObjectKind.CAP, parent=parent))
            return
        this = node_id(branch, bits)
        result.add_object(ModelObject(this, ObjectKind.STAGE_SURFACE, genus=1, parent=parent,
                                      children=((node_id(branch, bits + '0'), node_id(branch, bits + '1')),)))
        build(branch, bits + '0', this)
        build(branch, bits + '1', this)

    result.add_object(ModelObject(base_id, ObjectKind.BASE_SURFACE, genus=len(pairings),
                                  children=tuple((node_id(k, '0'), node_id(k, '1')) for k in range(len(pairings)))))
    for branch, pairing in enumerate(pairings):
        build(branch, '0', base_id)
        build(branch, '1', base_id)
        first, second = result.pairing_edges(pairing)
        for edge, cap in ((first, node_id(branch, '0' * height)), (second, node_id(branch, '1' + '0' * (height - 1)))):
            moved = edge.rewire({slot: cap for slot, end in enumerate(edge.endpoints) if end == sphere})
            result.put_edge(replace(moved, pairing=None))

    distinguished = result.edges[pair.distinguished]
    result.put_edge(distinguished.rewire({slot: base_id for slot, end in enumerate(distinguished.endpoints)
                                          if end == sphere}))
    result.remove_object(sphere)
    result.pairs[pair_id] = replace(pair, sphere_a=base_id)
    result.gropes[base_id] = CappedGrope(base_id, height, dyadic=True)
    return result
