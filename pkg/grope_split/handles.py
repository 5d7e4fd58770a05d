"""
s-cobordism handle calculus: 2-handles with their dual spheres, pending
3-handle obligations, discharge and certification of the boundary matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from grope_split.errors import (DualPairReferenceError, IdempotencyError, IncompleteLedgerError,
                                PrematureDischargeError, PreconditionError)
from grope_split.group import EPSILON
from grope_split.ledger import HandleLedger, HandleRecord, Obligation
from grope_split.model import Model, ModelObject, ObjectKind, SURFACE_KINDS, TransversePair

IDENTITY = 'identity'
UPPER_TRIANGULAR = 'upper-triangular-units'
FAIL = 'fail'


@dataclass(frozen=True)
class Certificate:
    verdict: str
    # (row, col, ((word, coeff), ...)) of the offending entry
    witness: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL


def pair_source(pair_id: str) -> str:
    return f'pair:{pair_id}'


def stage_source(grope_id: str, surface: str, index: int) -> str:
    return f'stage:{grope_id}:{surface}:{index}'


def dual_of(model: Model, obj_id: str) -> Optional[str]:
    """ Dual sphere created for `obj_id` by a 2-handle, the latest one if several """
    for record in reversed(model.ledger.records):
        if record.dimension == 2 and record.attaching_site == obj_id and record.created_duals:
            if record.created_duals[0] in model.objects:
                return record.created_duals[0]
    return None


def _add_dual(model: Model, site: str, source: str) -> tuple[str, int]:
    dual = model.unique_id(f'{site.split("#")[0]}^t')
    model.add_object(ModelObject(dual, ObjectKind.DUAL_SPHERE))
    model.new_edge((dual, site), EPSILON, transverse=True)
    index = model.ledger.next_index
    model.ledger.records.append(HandleRecord(index, 2, site, (dual,), source=source))
    model.ledger.obligations.append(Obligation(index, (site,)))
    return dual, index


def _transverse_between(model: Model, left: str, right: str) -> bool:
    return any(edge.transverse and set(edge.endpoints) == {left, right} for edge in model.incident(left))


def add_torus(model: Model, pairing: str, hosts: tuple[str, str]) -> list[str]:
    """ Clifford torus dual to a Whitney pairing, capped over the two host dual spheres """
    torus = model.unique_id(f'{pairing}^T')
    model.add_object(ModelObject(torus, ObjectKind.CLIFFORD_TORUS, pairing=pairing))
    caps = []
    for position, host in enumerate(hosts):
        cap = ModelObject(f'{torus}.{position}', ObjectKind.CAP, parent=torus, quotient=f'{torus}^c', host=host)
        model.add_object(cap)
        caps.append(cap.id)
    return caps


def connect_caps(model: Model, caps: Iterable[str]):
    """ Caps over dual spheres that meet each other intersect, labelled by the torus pairing word """
    new_caps = sorted(caps)
    torus_caps = [obj.id for obj in model.objects_of_kind(ObjectKind.CAP) if obj.host is not None]
    done = set()
    for cap in new_caps:
        for other in torus_caps:
            key = frozenset((cap, other))
            if other == cap or key in done:
                continue
            done.add(key)
            first, second = model.objects[cap], model.objects[other]
            if first.host == second.host or not _transverse_between(model, first.host, second.host):
                continue
            owner = min(first.parent, second.parent)
            label = model.pairing_edges(model.objects[owner].pairing)[0].label
            model.new_edge((cap, other), label)


def _pair_pairings(model: Model, pair: TransversePair) -> list[str]:
    pairings = {edge.pairing for sphere in (pair.sphere_a, pair.sphere_b)
                for edge in model.algebraic_incident(sphere) if edge.pairing is not None}
    tori = {obj.pairing for obj in model.objects_of_kind(ObjectKind.CLIFFORD_TORUS)}
    return sorted(pairings - tori)


def add_pair_handles(model: Model, pair_id: str, tori: bool = True) -> tuple[str, str]:
    pair = model.pairs.get(pair_id)
    if pair is None:
        raise PreconditionError(f'Unknown transverse pair `{pair_id}`', culprit=pair_id)
    if pair.distinguished not in model.edges:
        raise PreconditionError(f'Pair `{pair_id}` has no distinguished intersection', culprit=pair_id)
    source = pair_source(pair_id)
    if source in model.ledger.sources():
        raise IdempotencyError(f'Handles for pair `{pair_id}` are already attached')
    dual_a, _ = _add_dual(model, pair.sphere_a, source)
    dual_b, _ = _add_dual(model, pair.sphere_b, source)
    model.new_edge((dual_a, dual_b), EPSILON, transverse=True)
    if tori:
        local = {pair.sphere_a: dual_a, pair.sphere_b: dual_b}
        caps = []
        for pairing in _pair_pairings(model, pair):
            left, right = model.pairing_edges(pairing)[0].endpoints
            fallback = {left: local.get(right, dual_b), right: local.get(left, dual_a)}
            hosts = tuple(local.get(end) or dual_of(model, end) or fallback[end] for end in (left, right))
            caps.extend(add_torus(model, pairing, hosts))
        connect_caps(model, caps)
    return dual_a, dual_b


def attach_pair_handles(model: Model, pair_id: str) -> Model:
    result = model.copy()
    add_pair_handles(result, pair_id)
    return result


def add_stage_handles(model: Model, grope_id: str, reference: tuple[str, int]) -> tuple[str, str]:
    surface, index = reference
    obj = model.objects.get(surface)
    if obj is None or obj.kind not in SURFACE_KINDS or model.base_of(surface) != grope_id:
        raise DualPairReferenceError(f'`{surface}` is not a surface stage of grope `{grope_id}`')
    if not 0 <= index < len(obj.children):
        raise DualPairReferenceError(f'Stage `{surface}` of genus {obj.genus} has no dual pair {index}')
    source = stage_source(grope_id, surface, index)
    if source in model.ledger.sources():
        raise IdempotencyError(f'Handles for dual pair {index} of `{surface}` are already attached')
    left, right = obj.children[index]
    dual_left, _ = _add_dual(model, left, source)
    dual_right, _ = _add_dual(model, right, source)
    model.new_edge((dual_left, dual_right), EPSILON, transverse=True)
    model.new_edge((dual_left, dual_right), EPSILON, transverse=True)
    return dual_left, dual_right


def attach_stage_handles(model: Model, grope_id: str, reference: tuple[str, int]) -> Model:
    result = model.copy()
    add_stage_handles(result, grope_id, reference)
    return result


def _discharge(model: Model, sphere: str, assume_embedded: bool):
    if sphere not in model.objects:
        raise PreconditionError(f'Unknown sphere `{sphere}`', culprit=sphere)
    remaining = model.algebraic_incident(sphere)
    if remaining and not assume_embedded:
        raise PrematureDischargeError(f'`{sphere}` still has {len(remaining)} intersections, '
                                      f'first `{remaining[0].id}`')
    ledger = model.ledger
    pending = ledger.pending_for(sphere)
    if not pending:
        raise PreconditionError(f'No pending 3-handle names `{sphere}`', culprit=sphere)
    for obligation in pending:
        ledger.obligations.remove(obligation)
        ledger.records.append(HandleRecord(ledger.next_index, 3, sphere, cancels=obligation.handle,
                                           source=f'discharge:{sphere}'))
        row = obligation.handle
        ledger.boundary.add(row, row, EPSILON, 1)
        for edge in model.incident(sphere):
            if not edge.transverse:
                continue
            other = edge.other(edge.endpoints.index(sphere))
            for record in ledger.two_handles():
                if record.index > row and other in record.created_duals:
                    ledger.boundary.add(row, record.index, edge.label, 1)


def discharge_obligation(model: Model, sphere: str, assume_embedded: bool = False) -> Model:
    """
    Attach the 3-handles waiting for `sphere`. The sphere must be free of
    algebraic intersections unless `assume_embedded` is set.
    """
    result = model.copy()
    _discharge(result, sphere, assume_embedded)
    return result


def _discharge_all(model: Model, assume_embedded: bool):
    while model.ledger.obligations:
        obligation = model.ledger.obligations[0]
        candidates = [sphere for sphere in obligation.spheres if sphere in model.objects]
        ready = [sphere for sphere in candidates if assume_embedded or not model.algebraic_incident(sphere)]
        if not ready:
            raise PrematureDischargeError(f'No candidate of handle {obligation.handle} is embedded: '
                                          f'{", ".join(obligation.spheres)}')
        _discharge(model, ready[0], assume_embedded)


def discharge_all(model: Model, assume_embedded: bool = False) -> Model:
    result = model.copy()
    _discharge_all(result, assume_embedded)
    return result


def certify(ledger: HandleLedger) -> Certificate:
    if ledger.obligations:
        raise IncompleteLedgerError(f'{len(ledger.obligations)} pending 3-handle obligations',
                                    pending=tuple(ledger.obligations))
    boundary = ledger.boundary
    identity = True
    for record in ledger.two_handles():
        diagonal = boundary.get(record.index, record.index)
        if len(diagonal) != 1 or abs(next(iter(diagonal.values()))) != 1:
            return Certificate(FAIL, (record.index, record.index, tuple(sorted(diagonal.items()))))
        if diagonal != {EPSILON: 1}:
            identity = False
    for row, col in sorted(boundary.entries):
        if row == col:
            continue
        terms = tuple(sorted(boundary.entries[(row, col)].items()))
        if row > col:
            return Certificate(FAIL, (row, col, terms))
        identity = False
    return Certificate(IDENTITY if identity else UPPER_TRIANGULAR)


def whitney_move(model: Model, pairing: str) -> Model:
    """
    Cancel a Whitney pairing across its disk. The disk must be free of
    algebraic intersections; the disk and the dual Clifford torus disappear.
    """
    edges = model.pairing_edges(pairing)
    if len(edges) != 2:
        raise PreconditionError(f'`{pairing}` is not a pair of intersections', culprit=pairing)
    result = model.copy()
    for disk in result.objects_of_kind(ObjectKind.WHITNEY_DISK):
        if disk.pairing != pairing:
            continue
        if result.algebraic_incident(disk.id):
            raise PreconditionError(f'Whitney disk `{disk.id}` is not embedded', culprit=disk.id)
        result.remove_object(disk.id)
        for key, tower in sorted(result.towers.items()):
            layers = tuple(tuple(d for d in layer if d != disk.id) for layer in tower.layers)
            result.towers[key] = replace(tower, layers=layers)
    for torus in result.objects_of_kind(ObjectKind.CLIFFORD_TORUS):
        if torus.pairing != pairing:
            continue
        for obj in list(result.objects.values()):
            if obj.parent == torus.id:
                result.remove_object(obj.id)
        result.remove_object(torus.id)
    for edge in edges:
        result.remove_edge(edge.id)
    return result
