"""
Unraveling of cycles: every B-sphere of a chain of transverse pairs is
replaced by n parallel copies and the Clifford tori are capped with a cyclic
shift, turning a chain cycle of length L into one of length lcm(L, n).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from grope_split.cycles import girth
from grope_split.errors import PreconditionError
from grope_split.handles import add_pair_handles, add_torus, connect_caps, pair_source
from grope_split.model import IntersectionGraph, Model, ObjectKind, TransversePair
from grope_split.splitting import parallel_copy


def cyclic_shift(sheet: int, n: int) -> int:
    """ Sheet reached by crossing one intersection from `sheet`, out of `n` """
    return (sheet + 1) % n


@dataclass(frozen=True)
class UnravelReport:
    chain: tuple[str, ...]
    # B-sphere -> its n copies (the original first)
    copies_made: dict = field(default_factory=dict)
    # torus cap -> 1-based index of the dual sphere copy it goes over
    shift_assignment: dict = field(default_factory=dict)
    girth_before: float = math.inf
    girth_after: float = math.inf


def _roles(model: Model) -> dict[str, tuple[str, str]]:
    roles = {}
    for key in sorted(model.pairs):
        pair = model.pairs[key]
        roles[pair.sphere_a] = (key, 'a')
        roles[pair.sphere_b] = (key, 'b')
    return roles


def chain_of(model: Model, seed: str) -> tuple[list[str], dict[str, tuple[str, str]]]:
    """
    Pairs reachable from `seed` through Whitney pairings from a B-sphere to an
    A-sphere, breadth-first. Returns the pairs and pairing -> (from, to).
    """
    if seed not in model.pairs:
        raise PreconditionError(f'Unknown transverse pair `{seed}`', culprit=seed)
    roles = _roles(model)
    links: dict[str, tuple[str, str]] = {}
    order, queue, seen = [], deque([seed]), {seed}
    while queue:
        current = queue.popleft()
        order.append(current)
        pair = model.pairs[current]
        pairings = sorted({edge.pairing for sphere in (pair.sphere_a, pair.sphere_b)
                           for edge in model.algebraic_incident(sphere) if edge.pairing is not None})
        neighbours = set()
        for pairing in pairings:
            left, right = model.pairing_edges(pairing)[0].endpoints
            if left not in roles or right not in roles:
                continue
            (left_pair, left_side), (right_pair, right_side) = roles[left], roles[right]
            if left_side == right_side:
                raise PreconditionError(f'Pairing `{pairing}` joins two {left_side.upper()}-spheres: '
                                        f'collision below the unraveling scale', culprit=current)
            links[pairing] = (left_pair, right_pair) if left_side == 'b' else (right_pair, left_pair)
            neighbours.update((left_pair, right_pair))
        for neighbour in sorted(neighbours - seen):
            seen.add(neighbour)
            queue.append(neighbour)

    outgoing: dict[str, str] = {}
    incoming: dict[str, str] = {}
    for pairing in sorted(links):
        source, target = links[pairing]
        for table, key in ((outgoing, source), (incoming, target)):
            if key in table:
                raise PreconditionError(f'Chain branches at pair `{key}` (pairings `{table[key]}`, `{pairing}`)',
                                        culprit=key)
            table[key] = pairing
    return order, links


def _unravel(model: Model, chain: list[str], links: dict[str, tuple[str, str]], n: int) -> tuple[dict, dict, set]:
    before = set(model.objects)
    copies: dict[str, list[str]] = {}
    pair_copies: dict[str, list[str]] = {}
    pairing_copies: dict[str, list[str]] = {pairing: [pairing] for pairing in links}
    for key in chain:
        pair = model.pairs[key]
        copies[pair.sphere_b] = [pair.sphere_b]
        pair_copies[key] = [key]
        for _ in range(1, n):
            mapping, pairing_map = parallel_copy(model, [pair.sphere_b])
            copy = mapping[pair.sphere_b]
            copies[pair.sphere_b].append(copy)
            distinguished = next(edge for edge in model.incident(copy)
                                 if edge.transverse and set(edge.endpoints) == {pair.sphere_a, copy})
            new_pair = model.derived_id(key)
            model.pairs[new_pair] = TransversePair(new_pair, pair.sphere_a, copy, distinguished.id)
            pair_copies[key].append(new_pair)
            for pairing, (source, _) in links.items():
                if source == key:
                    pairing_copies[pairing].append(pairing_map[pairing])

    duals = {key: [add_pair_handles(model, copy, tori=False) for copy in pair_copies[key]] for key in chain}

    shift: dict[str, int] = {}
    caps = []
    for pairing in sorted(links):
        source, target = links[pairing]
        for j, copy in enumerate(pairing_copies[pairing]):
            # the B-cap has no choice; the A-cap goes over the next copy's dual
            b_cap, a_cap = add_torus(model, copy, (duals[source][j][1], duals[target][cyclic_shift(j, n)][0]))
            shift[b_cap] = j + 1
            shift[a_cap] = cyclic_shift(j, n) + 1
            caps.extend((b_cap, a_cap))
    connect_caps(model, caps)

    affected = (set(model.objects) - before) | {model.pairs[key].sphere_a for key in chain}
    affected.update(sphere for spheres in copies.values() for sphere in spheres)
    return copies, shift, affected


def unravel(model: Model, seed_pair: str, n: int) -> tuple[Model, UnravelReport]:
    if n < 1:
        raise PreconditionError(f'Number of copies must be positive, got {n}')
    chain, links = chain_of(model, seed_pair)
    for key in chain:
        if pair_source(key) in model.ledger.sources():
            raise PreconditionError(f'Pair `{key}` already carries handles', culprit=key)
        pair = model.pairs[key]
        for sphere in (pair.sphere_a, pair.sphere_b):
            if model.objects[sphere].kind != ObjectKind.SPHERE:
                raise PreconditionError(f'`{sphere}` is not a sphere', culprit=sphere)

    baseline = model.copy()
    _, _, baseline_affected = _unravel(baseline, chain, links, 1)
    girth_before = girth(IntersectionGraph.from_model(baseline).restricted(baseline_affected))

    result = model.copy()
    copies, shift, affected = _unravel(result, chain, links, n)
    girth_after = girth(IntersectionGraph.from_model(result).restricted(affected))
    return result, UnravelReport(tuple(chain), copies, shift, girth_before, girth_after)
