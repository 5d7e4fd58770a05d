"""
Seeded model generators and property checks, shared by the `fuzz` command and
the test suite. Every check takes a seed and returns its failure messages.
"""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Optional

from grope_split.common import Common
from grope_split.cycles import find_cycles
from grope_split.errors import ApplicationError, OracleScaleError
from grope_split.group import EPSILON, FreeGroup, Generator, GroupWord
from grope_split.handles import (IDENTITY, UPPER_TRIANGULAR, add_pair_handles, certify, discharge_all,
                                 whitney_move)
from grope_split.model import (IntersectionGraph, Model, ModelObject, ObjectKind, TransversePair, WhitneyTower,
                               label_set, sphere_to_capped_grope)
from grope_split.oracles import branch_signature, collision_search
from grope_split.pipeline import PipelineOptions, execute_pipeline
from grope_split.splitting import (SplitPlan, branch_caps, dyadic_conditions, end_units, ntype_report,
                                   split_surface, split_to_distance, split_to_dyadic, split_transverse_pair,
                                   split_whitney_disk)
from grope_split.unravel import unravel


@dataclass(frozen=True)
class FuzzOptions:
    seed: int = 0
    count: int = 20
    checks: tuple[str, ...] = ()
    jobs: Optional[int] = None


@dataclass(frozen=True)
class FuzzResult:
    check: str
    seed: int
    failures: tuple[str, ...] = ()


# fixtures

def letter(text: str) -> GroupWord:
    index = ord(text[0]) - ord('a')
    return GroupWord((Generator(index, text.endswith("'")),))


def random_word(rng: random.Random, group: FreeGroup, length: int = 2) -> GroupWord:
    raw = [Generator(rng.randrange(group.generator_count), rng.random() < 0.5) for _ in range(rng.randint(1, length))]
    return group.reduce(raw)


def sphere_pair(labels: list[GroupWord], rank: int = 2) -> Model:
    """
    Transverse pair `P` of spheres `A`, `B`; one Whitney pairing `w{k}` of two
    A-B intersections per label (the second carries the inverse word).
    """
    model = Model(FreeGroup(rank))
    model.add_object(ModelObject('A', ObjectKind.SPHERE))
    model.add_object(ModelObject('B', ObjectKind.SPHERE))
    distinguished = model.new_edge(('A', 'B'), EPSILON, transverse=True)
    model.pairs['P'] = TransversePair('P', 'A', 'B', distinguished.id)
    for k, label in enumerate(labels):
        model.new_edge(('A', 'B'), label, pairing=f'w{k}')
        model.new_edge(('A', 'B'), model.group.invert(label), pairing=f'w{k}')
    return model


def figure_cycle(label: str = 'a') -> Model:
    """ One transverse pair whose B-sphere is Whitney-paired back to its own A-sphere """
    return sphere_pair([letter(label)], rank=1)


def chain(length: int, closed: bool = True, labels: Optional[list[GroupWord]] = None, rank: int = 2) -> Model:
    """
    Pairs `P0`..`P{L-1}`; pairing `c{i}` joins B{i} to A{i+1}, and the last B to
    A0 when `closed`.
    """
    model = Model(FreeGroup(rank))
    for i in range(length):
        model.add_object(ModelObject(f'A{i}', ObjectKind.SPHERE))
        model.add_object(ModelObject(f'B{i}', ObjectKind.SPHERE))
        distinguished = model.new_edge((f'A{i}', f'B{i}'), EPSILON, transverse=True)
        model.pairs[f'P{i}'] = TransversePair(f'P{i}', f'A{i}', f'B{i}', distinguished.id)
    links = length if closed else length - 1
    for i in range(links):
        label = labels[i] if labels else letter('a')
        target = f'A{(i + 1) % length}'
        model.new_edge((f'B{i}', target), label, pairing=f'c{i}')
        model.new_edge((f'B{i}', target), model.group.invert(label), pairing=f'c{i}')
    return model


def random_grope(rng: random.Random, height: Optional[int] = None,
                 max_edges: int = 10) -> tuple[Model, str]:
    """ Capped grope from a random algebraically trivial pair, plus random cap intersections """
    group = FreeGroup(2)
    labels = [random_word(rng, group) for _ in range(rng.randint(1, 2))]
    model = sphere_pair(labels)
    for i in range(rng.randint(1, 2)):
        model.add_object(ModelObject(f'C{i}', ObjectKind.SPHERE))
    model = sphere_to_capped_grope(model, 'P', height or rng.randint(1, 3))
    grope = model.pairs['P'].sphere_a
    caps = model.grope_caps(grope)
    spheres = [obj.id for obj in model.objects_of_kind(ObjectKind.SPHERE) if obj.id != 'B']
    extra = rng.randint(1, max(1, max_edges - 2 * len(labels)))
    for _ in range(extra):
        cap = rng.choice(caps)
        roll = rng.random()
        if roll < 0.6:
            other = rng.choice(spheres)
        elif roll < 0.85:
            other = rng.choice(caps)
        else:
            other = cap
        model.new_edge((cap, other), random_word(rng, group))
    return model, grope


def random_tower(rng: random.Random) -> tuple[Model, str, str]:
    """ Pair with two first-layer Whitney disks that meet each other """
    group = FreeGroup(2)
    model = sphere_pair([random_word(rng, group), random_word(rng, group)])
    for k in range(2):
        model.add_object(ModelObject(f'W{k}', ObjectKind.WHITNEY_DISK, layer=1, pairing=f'w{k}'))
    for _ in range(rng.randint(2, 4)):
        model.new_edge(('W0', 'W1'), random_word(rng, group))
    model.towers['T'] = WhitneyTower('T', 'P', (('W0', 'W1'),))
    return model, 'T', 'W0'


def random_plan(rng: random.Random, model: Model, target: str, skip=()) -> Optional[SplitPlan]:
    units = end_units(model, target, skip)
    if len(units) < 2:
        return None
    rng.shuffle(units)
    cut = rng.randint(1, len(units) - 1)
    first = frozenset(end for unit in units[:cut] for end in unit)
    second = frozenset(end for unit in units[cut:] for end in unit)
    return SplitPlan(target, first, second)


# checks

def check_labels(seed: int) -> list[str]:
    """ Every splitting operation keeps the set of intersection labels """
    rng = random.Random(seed)
    failures = []
    model, grope = random_grope(rng)
    before = label_set(model)
    caps = [cap for cap in model.grope_caps(grope) if len(end_units(model, cap)) >= 2]
    if caps:
        cap = rng.choice(caps)
        if label_set(split_surface(model, random_plan(rng, model, cap))) != before:
            failures.append(f'split_surface of `{cap}` changed labels')
    if label_set(split_to_dyadic(model, grope)) != before:
        failures.append('split_to_dyadic changed labels')

    pair_model = sphere_pair([random_word(rng, FreeGroup(2)) for _ in range(rng.randint(2, 3))])
    plan = random_plan(rng, pair_model, 'A', skip=[pair_model.pairs['P'].distinguished])
    if label_set(split_transverse_pair(pair_model, 'P', plan)) != label_set(pair_model):
        failures.append('split_transverse_pair changed labels')

    tower_model, tower, disk = random_tower(rng)
    plan = random_plan(rng, tower_model, disk)
    if label_set(split_whitney_disk(tower_model, tower, disk, plan)) != label_set(tower_model):
        failures.append('split_whitney_disk changed labels')
    return failures


def check_dyadic(seed: int) -> list[str]:
    rng = random.Random(seed)
    model, grope = random_grope(rng)
    result = split_to_dyadic(model, grope)
    return [f'{violation.object}: {violation.rule}' for violation in dyadic_conditions(result, grope)]


def check_distance(seed: int) -> list[str]:
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    model, grope = random_grope(rng, height=rng.randint(1, 2), max_edges=6)
    result = split_to_distance(model, grope, n)
    failures = []
    cycle = collision_search(result, n)
    if cycle is not None:
        failures.append(f'collision of length {cycle.length} at `{cycle.witness}` after splitting to {n}')
    report = ntype_report(result, grope, n)
    if not report.defined:
        failures.append(f'branch without {n}-type')
        return failures
    branches = sorted(branch_caps(result, grope))
    for left in branches:
        for right in branches:
            if left >= right:
                continue
            try:
                same = branch_signature(result, grope, left, n) == branch_signature(result, grope, right, n)
            except OracleScaleError:
                continue
            if same != (report.types[left] == report.types[right]):
                failures.append(f'branches {left}, {right}: n-type and ball isomorphism disagree')
    return failures


def check_certificates(seed: int) -> list[str]:
    rng = random.Random(seed)
    failures = []
    model = sphere_pair([random_word(rng, FreeGroup(2)) for _ in range(rng.randint(1, 3))])
    add_pair_handles(model, 'P')
    for pairing in model.pairing_ids():
        model = whitney_move(model, pairing)
    verdict = certify(discharge_all(model).ledger).verdict
    if verdict != IDENTITY:
        failures.append(f'pair construction certified `{verdict}`')

    n = rng.randint(2, 4)
    unravelled, _ = unravel(chain(rng.randint(1, 3)), 'P0', n)
    for pairing in unravelled.pairing_ids():
        unravelled = whitney_move(unravelled, pairing)
    ledger = discharge_all(unravelled).ledger
    verdict = certify(ledger).verdict
    if verdict != UPPER_TRIANGULAR:
        failures.append(f'unravelled construction certified `{verdict}`')

    planted = ledger.copy()
    rows = sorted(record.index for record in planted.two_handles())
    planted.boundary.add(rows[-1], rows[0], EPSILON, 1)
    certificate = certify(planted)
    if certificate.ok or certificate.witness[:2] != (rows[-1], rows[0]):
        failures.append('below-diagonal entry accepted')
    return failures


def check_unravel(seed: int) -> list[str]:
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    length = rng.randint(1, 3)
    result, report = unravel(chain(length, labels=[random_word(rng, FreeGroup(2)) for _ in range(length)]), 'P0', n)
    failures = []
    if report.girth_after < n:
        failures.append(f'girth {report.girth_after} below {n} for a {length}-chain')
    cycles = find_cycles(IntersectionGraph.from_model(result), n - 1)
    if cycles:
        failures.append(f'cycle of length {cycles[0].length} at `{cycles[0].witness}`')
    return failures


def check_pipeline(seed: int) -> list[str]:
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    labels = [letter(rng.choice('ab')) for _ in range(rng.randint(1, 2))]
    _, report = execute_pipeline(sphere_pair(labels), PipelineOptions(pair='P', n=n, height=rng.randint(1, 2)))
    failures = []
    if not report.tree:
        failures.append(f'ball of radius {n} is not a tree')
    if report.max_factors > n:
        failures.append(f'label product of {report.max_factors} factors')
    if not report.certificate.ok:
        failures.append('projected certificate failed')
    return failures


CHECKS = {
    'labels':       check_labels,
    'dyadic':       check_dyadic,
    'distance':     check_distance,
    'certificates': check_certificates,
    'unravel':      check_unravel,
    'pipeline':     check_pipeline,
}


def run_check(check: str, seed: int) -> FuzzResult:
    try:
        failures = CHECKS[check](seed)
    except ApplicationError as exc:
        failures = [f'{type(exc).__name__}: {exc}']
    return FuzzResult(check, seed, tuple(failures))


def run_fuzz(options: FuzzOptions) -> dict:
    checks = options.checks or tuple(CHECKS)
    tasks = [(check, options.seed + i) for check in checks for i in range(options.count)]
    workers = options.jobs or os.cpu_count() or 1
    Common.cli_output(f'Starting pool with {workers} workers for {len(tasks)} runs')
    results: list[FuzzResult] = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(run_check, check, seed) for check, seed in tasks]
        for future in as_completed(futures):
            results.append(future.result())
            Common.update_progress(len(results) / len(tasks))
    print()
    summary = {}
    for check in checks:
        runs = sorted((result for result in results if result.check == check), key=lambda result: result.seed)
        summary[check] = {
            'runs': len(runs),
            'failures': [{'seed': result.seed, 'messages': list(result.failures)} for result in runs
                         if result.failures],
        }
    return {'seed': options.seed, 'count': options.count, 'checks': summary}
