"""
Splitting of capped gropes, transverse sphere pairs and Whitney disks.

Every public operation copies its input model; the `_`-prefixed helpers and
`parallel_copy` work in place on that copy, so iterated splitting does not
copy per step.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable, Optional

from grope_split.canonical import canonical_form
from grope_split.core import Core
from grope_split.errors import BudgetError, PlanError, PreconditionError
from grope_split.ledger import HandleRecord, Obligation
from grope_split.model import (EdgeEnd, GROPE_KINDS, IntersectionGraph, Model, ObjectKind, SURFACE_KINDS,
                               TransversePair, Violation, dyadic_label, dyadic_labels)
from grope_split.cycles import find_cycles

SIDES = ('a', 'b')


@dataclass(frozen=True)
class SplitPlan:
    """
    Partition of the target's edge ends (and, for stage surfaces, of its dual
    pairs by index) into the parts inherited by the two new objects.
    """
    target: str
    first: frozenset = frozenset()
    second: frozenset = frozenset()
    first_attachments: tuple[int, ...] = ()
    second_attachments: tuple[int, ...] = ()


@dataclass(frozen=True)
class NType:
    form: tuple


@dataclass(frozen=True)
class NTypeReport:
    radius: int
    types: dict = field(default_factory=dict)

    @property
    def defined(self) -> bool:
        return all(value is not None for value in self.types.values())

    def classes(self) -> list[list[int]]:
        """ Ветви с одинаковым n-типом """
        groups: dict = defaultdict(list)
        for branch in sorted(self.types):
            groups[self.types[branch]].append(branch)
        return sorted(groups.values())

    @property
    def agree(self) -> bool:
        return self.defined and len(self.classes()) <= 1


def path_bits(model: Model, obj_id: str) -> str:
    """ 0/1 sides chosen along the path from the base; empty outside gropes """
    label = dyadic_label(model, obj_id)
    return ''.join(str(bit) for bit in label.bits) if label is not None else ''


def bits_lookup(model: Model) -> Callable[[str], str]:
    """
    `path_bits` for one unchanging model, memoized, reading every stage's
    dual pairs once instead of once per lookup.
    """
    sides: dict[str, int] = {}

    @lru_cache(maxsize=None)
    def walk(obj_id: str) -> Optional[str]:
        obj = model.objects[obj_id]
        parent = model.objects.get(obj.parent) if obj.parent is not None else None
        if parent is None or parent.kind not in SURFACE_KINDS:
            return None
        if obj_id not in sides:
            sides.update((child, side) for dual_pair in parent.children for side, child in enumerate(dual_pair))
        side = sides[obj_id] if obj_id in sides else model.attachment(obj_id)[2]
        if parent.kind == ObjectKind.BASE_SURFACE:
            return str(side)
        prefix = walk(parent.id)
        return None if prefix is None else prefix + str(side)

    return lambda obj_id: walk(obj_id) or ''


def end_units(model: Model, obj_id: str, skip: Iterable[str] = ()) -> list[list[EdgeEnd]]:
    """ Ends that must stay together: the ends of one Whitney pairing, or a single end """
    skipped = set(skip)
    units: dict = {}
    for end in model.ends(obj_id):
        if end[0] in skipped:
            continue
        edge = model.edges[end[0]]
        key = ('pairing', edge.pairing) if edge.pairing is not None else ('end', end)
        units.setdefault(key, []).append(end)
    return list(units.values())


def _plan_from_units(target: str, chosen: list[list[EdgeEnd]], units: list[list[EdgeEnd]]) -> SplitPlan:
    first = frozenset(end for unit in chosen for end in unit)
    second = frozenset(end for unit in units for end in unit) - first
    return SplitPlan(target, first, second)


def _check_plan(model: Model, plan: SplitPlan, ends: Iterable[EdgeEnd], attachments: bool):
    ends = set(ends)
    if plan.first & plan.second:
        raise PlanError(f'Plan parts for `{plan.target}` overlap')
    if plan.first | plan.second != ends:
        raise PlanError(f'Plan for `{plan.target}` does not cover exactly its incident edge ends')
    for unit in end_units(model, plan.target):
        inside = set(unit) & ends
        if inside & plan.first and inside & plan.second:
            pairing = model.edges[unit[0][0]].pairing
            raise PlanError(f'Plan separates the edges of Whitney pairing `{pairing}`')
    if attachments:
        genus = model.objects[plan.target].genus
        first, second = set(plan.first_attachments), set(plan.second_attachments)
        if first & second or first | second != set(range(genus)):
            raise PlanError(f'Plan must partition the {genus} dual pairs of `{plan.target}`')
        if not first or not second:
            raise PlanError(f'Each part of `{plan.target}` needs at least one dual pair')
    else:
        if plan.first_attachments or plan.second_attachments:
            raise PlanError(f'`{plan.target}` has no dual pairs to distribute')
        if not plan.first or not plan.second:
            raise PlanError(f'Plan for `{plan.target}` leaves one part empty')


def _check_budget(model: Model, budget: int, stage: str):
    if model.object_count() > budget:
        raise BudgetError(f'Object budget {budget} exceeded during {stage} ({model.object_count()} objects)',
                          partial=model, stage=stage)


def _rewire_ends(model: Model, obj_id: str, part: dict[EdgeEnd, str]):
    for edge in model.incident(obj_id):
        mapping = {slot: part[(edge.id, slot)] for slot, end in enumerate(edge.endpoints)
                   if end == obj_id and (edge.id, slot) in part}
        if mapping:
            model.put_edge(edge.rewire(mapping))


def parallel_copy(model: Model, originals: Iterable[str]) -> tuple[dict[str, str], dict[str, str]]:
    """
    Parallel copy of a set of objects, together with the Whitney disks of the
    pairings it drags along, in place. Returns (object map, pairing map) from
    original ids to copy ids.
    """
    copied = set(originals)
    disks_of: dict[str, set[str]] = defaultdict(set)
    for obj in model.objects.values():
        if obj.kind == ObjectKind.WHITNEY_DISK:
            disks_of[obj.pairing].add(obj.id)
    while disks_of:
        pairings = {edge.pairing for obj in copied for edge in model.incident(obj) if edge.pairing is not None}
        disks = set().union(*(disks_of.get(pairing, ()) for pairing in pairings)) - copied
        if not disks:
            break
        copied |= disks

    mapping = {obj: model.derived_id(obj) for obj in sorted(copied)}
    pairing_map: dict[str, str] = {}
    cross_maps: tuple[dict[str, str], dict[str, str]] = ({}, {})

    def renamed(pairing: Optional[str], table: dict[str, str]) -> Optional[str]:
        if pairing is None:
            return None
        if pairing not in table:
            table[pairing] = model.derived_id(pairing)
        return table[pairing]

    edges = sorted({edge.id for obj in copied for edge in model.incident(obj)})
    for obj_id in sorted(copied):
        obj = model.objects[obj_id]
        model.add_object(replace(
            obj,
            id=mapping[obj_id],
            parent=mapping.get(obj.parent, obj.parent),
            children=tuple((mapping.get(left, left), mapping.get(right, right)) for left, right in obj.children),
            quotient=None,
            pairing=renamed(obj.pairing, pairing_map) if obj.kind == ObjectKind.WHITNEY_DISK else obj.pairing,
        ))
    for edge_id in edges:
        edge = model.edges[edge_id]
        ends = [mapping.get(end, end) for end in edge.endpoints]
        model.new_edge(ends, edge.label, renamed(edge.pairing, pairing_map), edge.transverse)
        if edge.is_loop:
            original, copy = edge.endpoints[0], mapping[edge.endpoints[0]]
            for table in cross_maps:
                model.new_edge((original, copy), edge.label, renamed(edge.pairing, table), edge.transverse)

    for key in sorted(model.towers):
        tower = model.towers[key]
        layers = [layer + tuple(mapping[disk] for disk in layer if disk in mapping) for layer in tower.layers]
        model.towers[key] = replace(tower, layers=tuple(layers))
    return mapping, pairing_map


def _split_surface(model: Model, plan: SplitPlan) -> tuple[str, str]:
    target = model.objects.get(plan.target)
    if target is None:
        raise PlanError(f'Unknown split target `{plan.target}`')
    if target.kind == ObjectKind.BASE_SURFACE:
        raise PlanError(f'`{target.id}` is a base surface; split the transverse pair instead')
    parent = model.objects.get(target.parent) if target.parent is not None else None
    if target.kind not in GROPE_KINDS or parent is None or parent.kind not in SURFACE_KINDS:
        raise PlanError(f'`{target.id}` is not a stage or cap of a capped grope')
    _check_plan(model, plan, model.ends(target.id), attachments=target.kind == ObjectKind.STAGE_SURFACE)

    parent_id, index, side = model.attachment(target.id)
    dual = parent.children[index][1 - side]
    first_id, second_id = model.derived_id(target.id), model.derived_id(target.id)
    for new_id, chosen in ((first_id, plan.first_attachments), (second_id, plan.second_attachments)):
        children = tuple(target.children[i] for i in chosen)
        model.add_object(replace(target, id=new_id, genus=len(children), children=children, quotient=None))
        for child in (child for dual_pair in children for child in dual_pair):
            model.put_object(replace(model.objects[child], parent=new_id))

    part = {end: first_id for end in plan.first}
    part.update({end: second_id for end in plan.second})
    _rewire_ends(model, target.id, part)
    model.remove_object(target.id)

    copies, _ = parallel_copy(model, model.subtree(dual))
    dual_pairs = list(parent.children)
    dual_pairs[index] = (first_id, dual) if side == 0 else (dual, first_id)
    dual_pairs.append((second_id, copies[dual]) if side == 0 else (copies[dual], second_id))
    model.put_object(replace(parent, genus=len(dual_pairs), children=tuple(dual_pairs)))

    grope_id = model.base_of(parent_id)
    if grope_id in model.gropes and parent.kind == ObjectKind.STAGE_SURFACE:
        model.gropes[grope_id] = replace(model.gropes[grope_id], dyadic=False)
    return first_id, second_id


def split_surface(model: Model, plan: SplitPlan) -> Model:
    result = model.copy()
    _split_surface(result, plan)
    return result


def dyadic_conditions(model: Model, grope_id: str) -> list[Violation]:
    """ Dyadic branches plus, for every cap: no loops, one label, one dyadic label among adjacent caps """
    violations = []
    bits = bits_lookup(model)
    for node in model.subtree(grope_id):
        obj = model.objects[node]
        if obj.kind == ObjectKind.STAGE_SURFACE and obj.genus > 1:
            violations.append(Violation(node, 'dyadic', f'stage of genus {obj.genus}'))
        if obj.kind != ObjectKind.CAP:
            continue
        edges = model.algebraic_incident(node)
        if any(edge.is_loop for edge in edges):
            violations.append(Violation(node, 'cap-loop', 'cap intersects itself'))
        labels = {model.group.canonical(edge.label) for edge in edges}
        if len(labels) > 1:
            violations.append(Violation(node, 'cap-labels', f'{len(labels)} distinct group labels'))
        # bits only: a parallel copy of a dual sits over a new branch with the same bits
        neighbours = {bits(end) for edge in edges for end in edge.endpoints
                      if end != node and model.objects[end].kind == ObjectKind.CAP} - {''}
        if len(neighbours) > 1:
            violations.append(Violation(node, 'cap-neighbours', f'adjacent caps carry {len(neighbours)} dyadic labels'))
    return sorted(violations)


def _cap_repair_plan(model: Model, grope_id: str) -> Optional[SplitPlan]:
    bits = bits_lookup(model)
    for cap in sorted(model.grope_caps(grope_id)):
        units = end_units(model, cap)
        algebraic = [unit for unit in units if not model.edges[unit[0][0]].transverse]

        loops = [unit for unit in algebraic if model.edges[unit[0][0]].is_loop]
        if loops:
            unit = loops[0]
            chosen = [[unit[0]]] if model.edges[unit[0][0]].pairing is None else [unit]
            plan = _plan_from_units(cap, chosen, units)
            if not plan.second:
                raise PreconditionError(f'Cap `{cap}` carries only a paired self-intersection', culprit=cap)
            return plan

        def label_key(unit):
            return model.group.canonical(model.edges[unit[0][0]].label)

        def neighbour_key(unit):
            edge = model.edges[unit[0][0]]
            other = edge.other(unit[0][1])
            return bits(other) if model.objects[other].kind == ObjectKind.CAP else ''

        if len({label_key(unit) for unit in algebraic}) > 1:
            smallest = min(label_key(unit) for unit in algebraic)
            return _plan_from_units(cap, [unit for unit in algebraic if label_key(unit) == smallest], units)
        # ends towards non-cap objects carry '' and go into the first part
        if len({neighbour_key(unit) for unit in algebraic} - {''}) > 1:
            smallest = min(neighbour_key(unit) for unit in algebraic)
            return _plan_from_units(cap, [unit for unit in algebraic if neighbour_key(unit) == smallest], units)
    return None


def _stage_repair_plan(model: Model, grope_id: str) -> Optional[SplitPlan]:
    stages = [node for node in model.subtree(grope_id)
              if model.objects[node].kind == ObjectKind.STAGE_SURFACE and model.objects[node].genus > 1]
    if not stages:
        return None
    stage = min(stages, key=lambda node: (-model.depth(node), node))
    genus = model.objects[stage].genus
    return SplitPlan(stage, frozenset(model.ends(stage)), frozenset(), (0,), tuple(range(1, genus)))


def _split_to_dyadic(model: Model, grope_id: str, budget: int):
    if grope_id not in model.gropes:
        raise PreconditionError(f'`{grope_id}` is not a capped grope', culprit=grope_id)
    while True:
        _check_budget(model, budget, 'split_to_dyadic')
        plan = _cap_repair_plan(model, grope_id) or _stage_repair_plan(model, grope_id)
        if plan is None:
            break
        _split_surface(model, plan)
    model.gropes[grope_id] = replace(model.gropes[grope_id], dyadic=True)


def split_to_dyadic(model: Model, grope_id: str, budget: Optional[int] = None) -> Model:
    result = model.copy()
    _split_to_dyadic(result, grope_id, budget or Core.get_budget())
    return result


class EndTypes:
    """
    Depth-k type of an edge end: label, neighbour descriptor and the set of
    depth-(k-1) types of the neighbour's other ends. A set rather than a count,
    so a parallel copy never changes the type of what it meets. Types are
    interned to ints, comparable within one instance only.
    """
    def __init__(self, model: Model):
        self.model = model
        self.graph = IntersectionGraph.from_model(model)
        self.algebraic = {edge.id for edge in self.graph.edges}
        self.ends_of: dict[str, list[EdgeEnd]] = defaultdict(list)
        for edge in self.graph.edges:
            for slot, end in enumerate(edge.endpoints):
                self.ends_of[end].append((edge.id, slot))
        self.interned: dict[tuple, int] = {}
        self.memo: dict[tuple[EdgeEnd, int], int] = {}
        self.descriptors: dict[str, tuple[str, str]] = {}
        self.bits = bits_lookup(model)

    def descriptor(self, obj_id: str) -> tuple[str, str]:
        if obj_id not in self.descriptors:
            obj = self.model.objects[obj_id]
            bits = self.bits(obj_id) if obj.kind == ObjectKind.CAP else ''
            self.descriptors[obj_id] = (obj.kind.value, bits)
        return self.descriptors[obj_id]

    def type_of(self, end: EdgeEnd, depth: int) -> int:
        key = (end, depth)
        if key in self.memo:
            return self.memo[key]
        edge = self.model.edges[end[0]]
        neighbour, back = edge.other(end[1]), (edge.id, 1 - end[1])
        children: tuple = ()
        if depth > 0:
            children = tuple(sorted({self.type_of(other, depth - 1)
                                     for other in self.ends_of[neighbour] if other != back}))
        value = (str(self.model.group.canonical(edge.label)), self.descriptor(neighbour), children)
        self.memo[key] = self.interned.setdefault(value, len(self.interned))
        return self.memo[key]

    def unit_type(self, unit: list[EdgeEnd], depth: int) -> Optional[int]:
        typed = [self.type_of(end, depth) for end in unit if end[0] in self.algebraic]
        return min(typed) if typed else None

    def end_types(self, obj_id: str, n: int) -> set[int]:
        return {self.type_of(end, n - 1) for end in self.ends_of[obj_id]}

    def is_uniform(self, obj_id: str, n: int) -> bool:
        return len(self.end_types(obj_id, n)) <= 1


def _uniformity_plan(model: Model, targets: Iterable[str], n: int, skip: Iterable[str] = ()) -> Optional[SplitPlan]:
    types = EndTypes(model)
    for target in targets:
        units = end_units(model, target, skip)
        typed = [(types.unit_type(unit, n - 1), unit) for unit in units]
        values = {value for value, _ in typed if value is not None}
        if len(values) > 1:
            smallest = min(values)
            return _plan_from_units(target, [unit for value, unit in typed if value == smallest], units)
    return None


def _collision_plan(model: Model, targets: set[str], n: int, skip: Iterable[str] = ()) -> Optional[SplitPlan]:
    graph = IntersectionGraph.from_model(model)
    cycles = find_cycles(graph, n)
    for cycle in cycles:
        for position, klass in enumerate(cycle.path):
            entering = cycle.edges[position - 1]
            slot = next(slot for slot, end in enumerate(entering.endpoints) if graph.klass(end) == klass)
            obj = entering.endpoints[slot]
            if obj not in targets:
                continue
            units = end_units(model, obj, skip)
            chosen = [unit for unit in units if (entering.id, slot) in unit]
            plan = _plan_from_units(obj, chosen, units)
            if plan.first and plan.second:
                return plan
    if cycles:
        raise PreconditionError(f'Collision of length {cycles[0].length} at `{cycles[0].witness}` '
                                f'cannot be removed by splitting the target', culprit=cycles[0].witness)
    return None


def _distance_measure(model: Model, grope_id: str, n: int) -> tuple[int, int]:
    """ (cycles of length <= n, surplus end types over the caps); zero when done """
    types = EndTypes(model)
    surplus = sum(max(len(types.end_types(cap, n)) - 1, 0) for cap in model.grope_caps(grope_id))
    return len(find_cycles(IntersectionGraph.from_model(model), n)), surplus


def _distance_candidates(model: Model, grope_id: str, n: int) -> list[SplitPlan]:
    """ Cycle breaks at every cap end on a short cycle, then one plan per end type of a non-uniform cap """
    labels = dyadic_labels(model, grope_id)
    caps = sorted(labels, key=lambda cap: (labels[cap], cap))
    graph = IntersectionGraph.from_model(model)
    plans: list[SplitPlan] = []
    for cycle in find_cycles(graph, n):
        for edge in cycle.edges:
            for slot, end in enumerate(edge.endpoints):
                if end in labels:
                    units = end_units(model, end)
                    plans.append(_plan_from_units(end, [unit for unit in units if (edge.id, slot) in unit], units))
    types = EndTypes(model)
    for cap in caps:
        units = end_units(model, cap)
        typed = [(types.unit_type(unit, n - 1), unit) for unit in units]
        values = sorted({value for value, _ in typed if value is not None})
        if len(values) > 1:
            for value in values:
                plans.append(_plan_from_units(cap, [unit for unit_value, unit in typed if unit_value == value], units))
    unique: list[SplitPlan] = []
    for plan in plans:
        if plan.first and plan.second and plan not in unique:
            unique.append(plan)
    return unique


def _split_grope_to_distance(model: Model, grope_id: str, n: int, budget: int) -> Model:
    """
    Greedy descent: every step tries each candidate split on a copy, repairs
    the branches and keeps the copy with the smallest measure. A step must
    lower the measure, so the loop always ends.
    """
    _split_to_dyadic(model, grope_id, budget)
    measure = _distance_measure(model, grope_id, n)
    while measure != (0, 0):
        _check_budget(model, budget, 'split_to_distance')
        best: Optional[tuple[tuple, Model]] = None
        overflow: Optional[BudgetError] = None
        for plan in _distance_candidates(model, grope_id, n):
            trial = model.copy()
            _split_surface(trial, plan)
            try:
                _split_to_dyadic(trial, grope_id, budget)
            except BudgetError as exc:
                overflow = exc
                continue
            score = (_distance_measure(trial, grope_id, n), trial.object_count())
            if score[0] < measure and (best is None or score < best[0]):
                best = (score, trial)
        if best is None and overflow is not None:
            raise BudgetError(str(overflow), partial=model, stage='split_to_distance')
        if best is None:
            _raise_stuck(model, grope_id, n, measure)
        (measure, _), model = best
    return model


def _raise_stuck(model: Model, grope_id: str, n: int, measure: tuple[int, int]):
    cycles = find_cycles(IntersectionGraph.from_model(model), n)
    if cycles:
        raise PreconditionError(f'Collision of length {cycles[0].length} at `{cycles[0].witness}` '
                                f'cannot be removed by splitting `{grope_id}`', culprit=cycles[0].witness)
    types = EndTypes(model)
    cap = next(cap for cap in sorted(model.grope_caps(grope_id)) if not types.is_uniform(cap, n))
    raise PreconditionError(f'No split of `{grope_id}` makes cap `{cap}` {n}-uniform '
                            f'({measure[1]} surplus end types left)', culprit=cap)


def _split_pair_to_distance(model: Model, pair_id: str, n: int, budget: int, side: str):
    tracked = [pair_id]
    while True:
        _check_budget(model, budget, 'split_to_distance')
        pairs = {_sphere_on(model.pairs[key], side): key for key in tracked}
        skip = {model.pairs[key].distinguished for key in tracked}
        spheres = sorted(pairs)
        plan = _uniformity_plan(model, spheres, n, skip) or _collision_plan(model, set(spheres), n, skip)
        if plan is None:
            return
        split = pairs[plan.target]
        tracked = [key for key in tracked if key != split] + _split_transverse_pair(model, split, plan, side)


def split_to_distance(model: Model, target: str, n: int, budget: Optional[int] = None, side: str = 'a') -> Model:
    """
    Split a capped grope (or one side of a transverse pair) until every branch
    has an n-type and no cycle of length <= n remains.
    """
    if n < 1:
        raise PreconditionError(f'Distance must be positive, got {n}')
    budget = budget or Core.get_budget()
    result = model.copy()
    if target in result.gropes:
        result = _split_grope_to_distance(result, target, n, budget)
    elif target in result.pairs:
        _split_pair_to_distance(result, target, n, budget, _check_side(side))
    else:
        raise PreconditionError(f'`{target}` is neither a capped grope nor a transverse pair', culprit=target)
    return result


def _check_side(side: str) -> str:
    if side not in SIDES:
        raise PlanError(f'Unknown side `{side}`, expected one of {", ".join(SIDES)}')
    return side


def _sphere_on(pair: TransversePair, side: str) -> str:
    return pair.sphere_a if side == 'a' else pair.sphere_b


def _split_transverse_pair(model: Model, pair_id: str, plan: SplitPlan, side: str) -> list[str]:
    pair = model.pairs.get(pair_id)
    if pair is None:
        raise PreconditionError(f'Unknown transverse pair `{pair_id}`', culprit=pair_id)
    split_id = _sphere_on(pair, side)
    copy_id = pair.sphere_b if side == 'a' else pair.sphere_a
    if plan.target != split_id:
        raise PlanError(f'Plan targets `{plan.target}`, expected sphere `{split_id}`')
    _check_plan(model, plan, [end for end in model.ends(split_id) if end[0] != pair.distinguished],
                attachments=False)

    sphere = model.objects[split_id]
    first_id, second_id = model.derived_id(split_id), model.derived_id(split_id)
    model.add_object(replace(sphere, id=first_id, quotient=None))
    model.add_object(replace(sphere, id=second_id, quotient=None))
    distinguished = model.edges[pair.distinguished]
    model.remove_edge(distinguished.id)
    part = {end: first_id for end in plan.first}
    part.update({end: second_id for end in plan.second})
    _rewire_ends(model, split_id, part)
    model.remove_object(split_id)

    # intersections with the partner follow the partition: the first part keeps
    # the partner, the second meets its copy; only the rest of the partner is doubled
    shared = [edge for edge in model.incident(copy_id) if {first_id, second_id} & set(edge.endpoints)]
    for edge in shared:
        model.remove_edge(edge.id)
    copies, _ = parallel_copy(model, [copy_id])
    for edge in shared:
        if second_id in edge.endpoints:
            edge = edge.rewire({slot: copies[copy_id] for slot, end in enumerate(edge.endpoints) if end == copy_id})
        model.add_edge(edge)
    model.add_edge(distinguished.rewire({slot: first_id for slot, end in enumerate(distinguished.endpoints)
                                         if end == split_id}))
    second_distinguished = model.new_edge((second_id, copies[copy_id]), distinguished.label, transverse=True)

    second_pair_id = model.derived_id(pair.id)
    if side == 'a':
        model.pairs[pair.id] = replace(pair, sphere_a=first_id)
        model.pairs[second_pair_id] = TransversePair(second_pair_id, second_id, copies[copy_id],
                                                     second_distinguished.id)
    else:
        model.pairs[pair.id] = replace(pair, sphere_b=first_id)
        model.pairs[second_pair_id] = TransversePair(second_pair_id, copies[copy_id], second_id,
                                                     second_distinguished.id)

    index = model.ledger.next_index
    model.ledger.records.append(HandleRecord(index, 2, split_id, source=f'split:{pair.id}:{split_id}'))
    model.ledger.obligations.append(Obligation(index, (first_id, second_id)))
    return [pair.id, second_pair_id]


def split_transverse_pair(model: Model, pair_id: str, plan: SplitPlan, side: str = 'a') -> Model:
    result = model.copy()
    _split_transverse_pair(result, pair_id, plan, _check_side(side))
    return result


def split_whitney_disk(model: Model, tower_id: str, disk_id: str, plan: SplitPlan) -> Model:
    """
    Finger move along an arc of a Whitney disk: the disk becomes two disks at the
    same layer, and two new paired intersections of the surfaces it joins appear.
    """
    tower = model.towers.get(tower_id)
    if tower is None:
        raise PreconditionError(f'Unknown Whitney tower `{tower_id}`', culprit=tower_id)
    if not any(disk_id in layer for layer in tower.layers):
        raise PreconditionError(f'`{disk_id}` is not a disk of tower `{tower_id}`', culprit=disk_id)
    if plan.target != disk_id:
        raise PlanError(f'Plan targets `{plan.target}`, expected disk `{disk_id}`')
    disk = model.objects[disk_id]
    _check_plan(model, plan, model.ends(disk_id), attachments=False)
    cancelled = model.pairing_edges(disk.pairing) if disk.pairing is not None else []
    if len(cancelled) != 2:
        raise PreconditionError(f'Whitney disk `{disk_id}` does not cancel a pair of intersections',
                                culprit=disk_id)

    result = model.copy()
    new_pairing = result.derived_id(disk.pairing)
    first_id, second_id = result.derived_id(disk_id), result.derived_id(disk_id)
    result.add_object(replace(disk, id=first_id, quotient=None))
    result.add_object(replace(disk, id=second_id, quotient=None, pairing=new_pairing))
    part = {end: first_id for end in plan.first}
    part.update({end: second_id for end in plan.second})
    _rewire_ends(result, disk_id, part)
    result.remove_object(disk_id)
    for edge in cancelled:
        result.new_edge(edge.endpoints, edge.label, pairing=new_pairing)

    for key in sorted(result.towers):
        current = result.towers[key]
        layers = tuple(sum(((first_id, second_id) if disk == disk_id else (disk,) for disk in layer), ())
                       for layer in current.layers)
        result.towers[key] = replace(current, layers=layers)
    return result


def branch_caps(model: Model, grope_id: str) -> dict[int, list[str]]:
    labels = dyadic_labels(model, grope_id)
    branches: dict[int, list[str]] = defaultdict(list)
    for cap in sorted(labels, key=lambda cap: (labels[cap], cap)):
        branches[labels[cap].branch].append(cap)
    return dict(branches)


def ball_form(graph: IntersectionGraph, roots: Iterable[str], n: int, search_limit: Optional[int] = None) -> tuple:
    """ Canonical form of the radius-n quotient ball around the classes of `roots` """
    adjacency = graph.class_adjacency()
    root_classes = sorted({graph.klass(root) for root in roots})
    distance = {klass: 0 for klass in root_classes}
    frontier = list(root_classes)
    for step in range(1, n + 1):
        following = []
        for klass in frontier:
            for _, other in adjacency[klass]:
                if other not in distance:
                    distance[other] = step
                    following.append(other)
        frontier = sorted(following)
    colours = {klass: (graph.class_kind(klass).value, '1' if klass in root_classes else '0') for klass in distance}
    edges = []
    for edge in graph.edges:
        left, right = (graph.klass(end) for end in edge.endpoints)
        if left in distance and right in distance:
            edges.append((left, right, (str(edge.label),)))
    return canonical_form(colours, edges, root_classes, search_limit or Core.get_search_limit())


def ntype(model: Model, grope_id: str, branch: int, n: int) -> Optional[NType]:
    caps = branch_caps(model, grope_id).get(branch, [])
    types = EndTypes(model)
    if not all(types.is_uniform(cap, n) for cap in caps):
        return None
    graph = IntersectionGraph.from_model(model)
    return NType(ball_form(graph.up_to_inversion(model.group), caps, n))


def ntype_report(model: Model, grope_id: str, n: int) -> NTypeReport:
    branches = branch_caps(model, grope_id)
    return NTypeReport(n, {branch: ntype(model, grope_id, branch, n) for branch in sorted(branches)})
