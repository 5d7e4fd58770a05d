import random
import unittest

from grope_split.cycles import find_cycles
from grope_split.errors import BudgetError, PlanError, PreconditionError
from grope_split.fuzz import letter, random_grope, run_check, sphere_pair
from grope_split.ledger import Obligation
from grope_split.model import (IntersectionGraph, Model, ModelObject, ObjectKind, WhitneyTower, dyadic_label, dyadic_labels,
                               label_set, sphere_to_capped_grope, validate)
from grope_split.splitting import (NType, NTypeReport, SplitPlan, bits_lookup, dyadic_conditions, end_units,
                                   ntype_report, parallel_copy, path_bits, split_surface, split_to_distance, split_to_dyadic,
                                   split_transverse_pair, split_whitney_disk)

GROPE = 'A~grope'
CAP = 'A~grope.0.0'
DUAL_CAP = 'A~grope.0.1'


def grope_with_extra_cap_edge() -> tuple[Model, str]:
    """ Height-1 grope whose first cap also meets `B` with label b """
    model = sphere_to_capped_grope(sphere_pair([letter('a')]), 'P', 1)
    extra = model.new_edge((CAP, 'B'), letter('b'))
    return model, extra.id


def plan_by_edges(model: Model, target: str, first_edges: set[str]) -> SplitPlan:
    ends = model.ends(target)
    return SplitPlan(target, frozenset(end for end in ends if end[0] in first_edges),
                     frozenset(end for end in ends if end[0] not in first_edges))


class SplitSurfaceTest(unittest.TestCase):
    def setUp(self):
        self.model, self.extra = grope_with_extra_cap_edge()

    def test_cap_split_adds_dual_pair(self):
        result = split_surface(self.model, plan_by_edges(self.model, CAP, {self.extra}))
        self.assertNotIn(CAP, result.objects)
        base = result.objects[GROPE]
        self.assertEqual(base.genus, 2)
        self.assertEqual(len(result.grope_caps(GROPE)), 4)
        self.assertIn(DUAL_CAP, base.child_ids())
        self.assertEqual(validate(result), [])
        self.assertEqual(label_set(result), label_set(self.model))

    def test_each_part_gets_its_ends(self):
        result = split_surface(self.model, plan_by_edges(self.model, CAP, {self.extra}))
        first, _ = result.objects[GROPE].children[0]
        second, copy = result.objects[GROPE].children[1]
        self.assertEqual([edge.id for edge in result.incident(first)], [self.extra])
        self.assertEqual(len(result.incident(second)), 1)
        self.assertNotEqual(result.incident(second)[0].id, self.extra)
        self.assertEqual(result.objects[copy].parent, GROPE)
        self.assertEqual(len(result.algebraic_incident(copy)), 1)

    def test_input_untouched(self):
        before = self.model.copy()
        split_surface(self.model, plan_by_edges(self.model, CAP, {self.extra}))
        self.assertEqual(self.model, before)

    def test_overlapping_parts(self):
        ends = frozenset(self.model.ends(CAP))
        with self.assertRaises(PlanError):
            split_surface(self.model, SplitPlan(CAP, ends, ends))

    def test_missing_end(self):
        end = self.model.ends(CAP)[0]
        with self.assertRaises(PlanError):
            split_surface(self.model, SplitPlan(CAP, frozenset([end]), frozenset()))

    def test_base_is_not_split(self):
        with self.assertRaises(PlanError):
            split_surface(self.model, plan_by_edges(self.model, GROPE, set()))

    def test_unknown_target(self):
        with self.assertRaises(PlanError):
            split_surface(self.model, SplitPlan('nowhere'))


class SplitToDyadicTest(unittest.TestCase):
    def setUp(self):
        self.model, _ = grope_with_extra_cap_edge()
        self.model.new_edge((CAP, CAP), letter('b'))

    def test_conditions_reported(self):
        rules = {(violation.object, violation.rule) for violation in dyadic_conditions(self.model, GROPE)}
        self.assertIn((CAP, 'cap-loop'), rules)
        self.assertIn((CAP, 'cap-labels'), rules)

    def test_repairs_caps(self):
        result = split_to_dyadic(self.model, GROPE)
        self.assertEqual(dyadic_conditions(result, GROPE), [])
        self.assertTrue(result.gropes[GROPE].dyadic)
        self.assertFalse(any(edge.is_loop for edge in result.edges.values()))
        self.assertEqual(label_set(result), label_set(self.model))
        self.assertEqual(validate(result), [])

    def test_clean_grope_unchanged(self):
        clean = sphere_to_capped_grope(sphere_pair([letter('a')]), 'P', 2)
        self.assertEqual(split_to_dyadic(clean, GROPE).objects, clean.objects)

    def test_neighbours_compared_by_bits(self):
        model = sphere_to_capped_grope(sphere_pair([letter('a')] * 3), 'P', 1)
        for neighbour in ('A~grope.1.0', 'A~grope.2.0'):
            model.new_edge((CAP, neighbour), letter('a'))
        self.assertEqual(dyadic_conditions(model, GROPE), [])
        model.new_edge((CAP, 'A~grope.1.1'), letter('a'))
        rules = {(violation.object, violation.rule) for violation in dyadic_conditions(model, GROPE)}
        self.assertEqual(rules, {(CAP, 'cap-neighbours')})
        labels = dyadic_labels(model, GROPE)
        for cap in model.grope_caps(GROPE):
            self.assertEqual(labels[cap], dyadic_label(model, cap))
            self.assertEqual(path_bits(model, cap), ''.join(str(bit) for bit in labels[cap].bits))

    def test_cap_meeting_its_dual(self):
        model = sphere_to_capped_grope(sphere_pair([letter('a')]), 'P', 1)
        model.new_edge((CAP, DUAL_CAP), letter('b'))
        result = split_to_dyadic(model, GROPE, budget=50)
        self.assertEqual(dyadic_conditions(result, GROPE), [])
        self.assertEqual(validate(result), [])
        self.assertEqual(label_set(result), label_set(model))
        self.assertEqual(len(result.grope_caps(GROPE)), 8)

    def test_budget(self):
        with self.assertRaises(BudgetError) as context:
            split_to_dyadic(self.model, GROPE, budget=1)
        self.assertEqual(context.exception.stage, 'split_to_dyadic')
        self.assertIsNotNone(context.exception.partial)

    def test_not_a_grope(self):
        with self.assertRaises(PreconditionError):
            split_to_dyadic(self.model, 'B')


class PathBitsTest(unittest.TestCase):
    def test_bits_follow_sides(self):
        model = sphere_to_capped_grope(sphere_pair([letter('a')]), 'P', 2)
        self.assertEqual(path_bits(model, f'{GROPE}.0.10'), '10')
        self.assertEqual(path_bits(model, GROPE), '')
        self.assertEqual(path_bits(model, 'B'), '')

    def test_lookup_matches_path_bits(self):
        for seed in range(5):
            model, grope = random_grope(random.Random(seed))
            result = split_to_dyadic(model, grope)
            lookup = bits_lookup(result)
            for obj in sorted(result.objects):
                self.assertEqual(lookup(obj), path_bits(result, obj), f'seed {seed}, `{obj}`')


class ParallelCopyTest(unittest.TestCase):
    def test_loop_edge(self):
        model = sphere_pair([])
        loop = model.new_edge(('A', 'A'), letter('a'))
        mapping, _ = parallel_copy(model, ['A'])
        copy = mapping['A']
        self.assertIn(loop.id, model.edges)
        loops = [edge for edge in model.incident(copy) if edge.endpoints == (copy, copy)]
        cross = [edge for edge in model.incident(copy) if set(edge.endpoints) == {'A', copy}]
        self.assertEqual([edge.label for edge in loops], [letter('a')])
        self.assertEqual([edge.label for edge in cross], [letter('a'), letter('a')])
        self.assertEqual(label_set(model), {model.group.canonical(letter('a'))})

    def test_drags_whitney_disk(self):
        model = sphere_pair([letter('a')])
        model.add_object(ModelObject('W0', ObjectKind.WHITNEY_DISK, layer=1, pairing='w0'))
        mapping, pairings = parallel_copy(model, ['B'])
        self.assertEqual(sorted(mapping), ['B', 'W0'])
        self.assertEqual(model.objects[mapping['W0']].pairing, pairings['w0'])
        self.assertEqual(len(model.pairing_edges(pairings['w0'])), 2)

    def test_no_disks_copied_without_pairings(self):
        model = sphere_pair([])
        model.add_object(ModelObject('W0', ObjectKind.WHITNEY_DISK, layer=1, pairing='w0'))
        mapping, pairings = parallel_copy(model, ['B'])
        self.assertEqual((sorted(mapping), pairings), (['B'], {}))


class SplitTransversePairTest(unittest.TestCase):
    def setUp(self):
        self.model = sphere_pair([letter('a'), letter('b')])
        distinguished = self.model.pairs['P'].distinguished
        ends = [end for end in self.model.ends('A') if end[0] != distinguished]
        w0 = {edge.id for edge in self.model.pairing_edges('w0')}
        self.plan = SplitPlan('A', frozenset(end for end in ends if end[0] in w0),
                              frozenset(end for end in ends if end[0] not in w0))

    def test_two_pairs_and_obligation(self):
        result = split_transverse_pair(self.model, 'P', self.plan)
        self.assertEqual(len(result.pairs), 2)
        first = result.pairs['P'].sphere_a
        second_pair = next(pair for key, pair in result.pairs.items() if key != 'P')
        self.assertEqual(result.ledger.obligations, [Obligation(0, (first, second_pair.sphere_a))])
        self.assertEqual(result.ledger.records[0].attaching_site, 'A')
        self.assertTrue(result.edges[second_pair.distinguished].transverse)
        self.assertEqual(set(result.edges[second_pair.distinguished].endpoints),
                         {second_pair.sphere_a, second_pair.sphere_b})
        self.assertNotIn('A', result.objects)

    def test_partner_intersections_follow_partition(self):
        self.model.add_object(ModelObject('C', ObjectKind.SPHERE))
        self.model.new_edge(('B', 'C'), letter('b'))
        result = split_transverse_pair(self.model, 'P', self.plan)
        first = result.pairs['P']
        second = next(pair for key, pair in result.pairs.items() if key != 'P')
        for pair, pairing in ((first, 'w0'), (second, 'w1')):
            edges = result.algebraic_incident(pair.sphere_a)
            self.assertEqual({edge.pairing for edge in edges}, {pairing})
            self.assertTrue(all(set(edge.endpoints) == {pair.sphere_a, pair.sphere_b} for edge in edges))
        # only the partner's other intersection is doubled
        self.assertEqual(len(result.algebraic_incident('C')), 2)
        self.assertEqual(validate(result), [])

    def test_separating_a_pairing(self):
        w0 = [edge.id for edge in self.model.pairing_edges('w0')]
        ends = [end for end in self.model.ends('A') if end[0] != self.model.pairs['P'].distinguished]
        first = frozenset(end for end in ends if end[0] == w0[0])
        with self.assertRaises(PlanError):
            split_transverse_pair(self.model, 'P', SplitPlan('A', first, frozenset(ends) - first))

    def test_unknown_side(self):
        with self.assertRaises(PlanError):
            split_transverse_pair(self.model, 'P', self.plan, side='c')

    def test_wrong_target(self):
        with self.assertRaises(PlanError):
            split_transverse_pair(self.model, 'P', SplitPlan('B', self.plan.first, self.plan.second))


class SplitWhitneyDiskTest(unittest.TestCase):
    def setUp(self):
        self.model = sphere_pair([letter('a'), letter('b')])
        for k in range(2):
            self.model.add_object(ModelObject(f'W{k}', ObjectKind.WHITNEY_DISK, layer=1, pairing=f'w{k}'))
        self.first_edge = self.model.new_edge(('W0', 'W1'), letter('a')).id
        self.model.new_edge(('W0', 'W1'), letter('b'))
        self.model.towers['T'] = WhitneyTower('T', 'P', (('W0', 'W1'),))

    def test_fixture_is_valid(self):
        self.assertEqual(validate(self.model), [])

    def test_finger_move(self):
        result = split_whitney_disk(self.model, 'T', 'W0', plan_by_edges(self.model, 'W0', {self.first_edge}))
        layer = result.towers['T'].layers[0]
        self.assertEqual(len(layer), 3)
        self.assertNotIn('W0', result.objects)
        self.assertEqual(len(result.pairing_ids()), 3)
        new_pairing = next(pairing for pairing in result.pairing_ids() if pairing not in ('w0', 'w1'))
        self.assertEqual(len(result.pairing_edges(new_pairing)), 2)
        self.assertEqual({result.objects[disk].pairing for disk in layer}, {'w0', 'w1', new_pairing})
        self.assertEqual(validate(result), [])

    def test_disk_outside_tower(self):
        with self.assertRaises(PreconditionError):
            split_whitney_disk(self.model, 'T', 'A', plan_by_edges(self.model, 'A', set()))


class SplitToDistanceTest(unittest.TestCase):
    def test_pair_reaches_distance(self):
        model = sphere_pair([letter('a'), letter('b')])
        result = split_to_distance(model, 'P', 2)
        self.assertEqual(find_cycles(IntersectionGraph.from_model(result), 2), [])
        self.assertEqual(len(result.pairs), 2)
        self.assertEqual(len(result.ledger.obligations), 1)

    def test_pair_terminates_at_larger_distances(self):
        model = sphere_pair([letter('a'), letter('b')])
        for n in (4, 5):
            result = split_to_distance(model, 'P', n, budget=50)
            self.assertEqual(find_cycles(IntersectionGraph.from_model(result), n), [], f'n={n}')
            self.assertEqual(len(result.pairs), 2)
            for pair in result.pairs.values():
                self.assertEqual(len({edge.pairing for edge in result.algebraic_incident(pair.sphere_a)}), 1)

    def test_pair_with_repeated_label(self):
        result = split_to_distance(sphere_pair([letter('a'), letter('a'), letter('b')]), 'P', 4, budget=50)
        self.assertEqual(find_cycles(IntersectionGraph.from_model(result), 4), [])
        self.assertEqual(len(result.pairs), 3)

    def test_grope_double_edge(self):
        model = sphere_to_capped_grope(sphere_pair([letter('a')]), 'P', 1)
        model.add_object(ModelObject('C0', ObjectKind.SPHERE))
        for _ in range(2):
            model.new_edge((CAP, 'C0'), letter('b'))
        result = split_to_distance(model, GROPE, 2)
        self.assertEqual(find_cycles(IntersectionGraph.from_model(result), 2), [])
        self.assertEqual(len(result.grope_caps(GROPE)), 6)
        self.assertEqual(result.objects[GROPE].genus, 3)
        self.assertTrue(ntype_report(result, GROPE, 2).defined)
        self.assertEqual(label_set(result), label_set(model))
        self.assertEqual(validate(result), [])

    def test_grope_cap_meeting_its_dual(self):
        model = sphere_to_capped_grope(sphere_pair([letter('a')]), 'P', 1)
        model.new_edge((CAP, DUAL_CAP), letter('b'))
        result = split_to_distance(model, GROPE, 3, budget=100)
        self.assertEqual(result, split_to_dyadic(model, GROPE))
        self.assertEqual(find_cycles(IntersectionGraph.from_model(result), 3), [])
        self.assertTrue(ntype_report(result, GROPE, 3).defined)

    def test_grope_collision_elsewhere(self):
        model = sphere_to_capped_grope(sphere_pair([letter('a')]), 'P', 1)
        for name in ('C0', 'C1'):
            model.add_object(ModelObject(name, ObjectKind.SPHERE))
        for _ in range(2):
            model.new_edge(('C0', 'C1'), letter('b'))
        with self.assertRaises(PreconditionError) as context:
            split_to_distance(model, GROPE, 2)
        self.assertIn(context.exception.culprit, ('C0', 'C1'))

    def test_random_gropes_terminate(self):
        for seed in (23, 26):
            result = run_check('distance', seed)
            self.assertFalse(any('BudgetError' in message for message in result.failures), result.failures)

    def test_nothing_to_do(self):
        model = sphere_pair([letter('a')])
        self.assertEqual(split_to_distance(model, 'P', 3), model)

    def test_positive_distance(self):
        with self.assertRaises(PreconditionError):
            split_to_distance(sphere_pair([]), 'P', 0)

    def test_unknown_target(self):
        with self.assertRaises(PreconditionError):
            split_to_distance(sphere_pair([]), 'Q', 1)


class NTypeReportTest(unittest.TestCase):
    def test_classes(self):
        report = NTypeReport(2, {0: NType(('x',)), 1: NType(('x',)), 2: NType(('y',))})
        self.assertEqual(report.classes(), [[0, 1], [2]])
        self.assertTrue(report.defined)
        self.assertFalse(report.agree)

    def test_undefined_branch(self):
        report = NTypeReport(2, {0: NType(('x',)), 1: None})
        self.assertFalse(report.defined)
        self.assertFalse(report.agree)

    def test_symmetric_branches_agree(self):
        model = sphere_to_capped_grope(sphere_pair([letter('a'), letter('a')]), 'P', 1)
        report = ntype_report(model, GROPE, 2)
        self.assertEqual(sorted(report.types), [0, 1])
        self.assertTrue(report.agree)

    def test_different_labels_disagree(self):
        model = sphere_to_capped_grope(sphere_pair([letter('a'), letter('b')]), 'P', 1)
        report = ntype_report(model, GROPE, 2)
        self.assertTrue(report.defined)
        self.assertEqual(report.classes(), [[0], [1]])


class EndUnitsTest(unittest.TestCase):
    def test_pairing_ends_stay_together(self):
        model = sphere_pair([letter('a')])
        units = end_units(model, 'A', skip=[model.pairs['P'].distinguished])
        self.assertEqual(len(units), 1)
        self.assertEqual(len(units[0]), 2)


if __name__ == '__main__':
    unittest.main()
