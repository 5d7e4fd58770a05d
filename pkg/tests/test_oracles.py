import unittest

from grope_split.errors import OracleScaleError, PreconditionError
from grope_split.fuzz import chain, letter, sphere_pair
from grope_split.group import FreeGroup
from grope_split.model import IntersectionGraph, Model, ModelObject, ObjectKind, sphere_to_capped_grope
from grope_split.oracles import ball, branch_signature, collision_search, is_tree_ball, to_multigraph
from grope_split.splitting import ntype


def polygon(names: str, labels: str = '') -> IntersectionGraph:
    model = Model(FreeGroup(2))
    for name in names:
        model.add_object(ModelObject(name, ObjectKind.SPHERE))
    for i, name in enumerate(names):
        label = labels[i] if labels else 'a'
        model.new_edge((name, names[(i + 1) % len(names)]), letter(label))
    return IntersectionGraph.from_model(model)


def triangle(names: str = 'XYZ', labels: str = 'aab') -> IntersectionGraph:
    return polygon(names, labels)


class MultigraphTest(unittest.TestCase):
    def test_pairing_collapsed(self):
        multigraph = to_multigraph(IntersectionGraph.from_model(sphere_pair([letter('a'), letter('b')])))
        self.assertEqual(sorted(multigraph.nodes), ['A', 'B'])
        self.assertEqual(multigraph.number_of_edges(), 2)


class BallTest(unittest.TestCase):
    def test_renaming_invariance(self):
        first = ball(triangle(), 'Z', 1)
        second = ball(triangle('PQR', 'aab'), 'R', 1)
        self.assertEqual(first, second)
        self.assertEqual(hash(first), hash(second))

    def test_root_matters(self):
        # Y sits between two a-edges, X and Z touch the b-edge
        self.assertNotEqual(ball(triangle(), 'X', 1), ball(triangle(), 'Y', 1))
        self.assertEqual(ball(triangle(), 'X', 1), ball(triangle(), 'Z', 1))

    def test_labels_matter(self):
        self.assertNotEqual(ball(triangle(labels='aaa'), 'X', 1), ball(triangle(labels='aab'), 'X', 1))

    def test_labels_up_to_inversion(self):
        graphs = []
        for label in ('a', "a'"):
            model = Model(FreeGroup(2))
            for name in 'XY':
                model.add_object(ModelObject(name, ObjectKind.SPHERE))
            model.new_edge(('X', 'Y'), letter(label))
            graphs.append(IntersectionGraph.from_model(model))
        self.assertEqual(ball(graphs[0], 'X', 1), ball(graphs[1], 'X', 1))
        self.assertEqual(ball(graphs[0], 'X', 1, group=FreeGroup(2)), ball(graphs[1], 'X', 1, group=FreeGroup(2)))

    def test_size_limit(self):
        with self.assertRaises(OracleScaleError):
            ball(triangle(), 'X', 1, limit=2)
        self.assertEqual(ball(triangle(), 'X', 1, limit=3).size, 3)

    def test_unknown_root(self):
        with self.assertRaises(PreconditionError):
            ball(triangle(), 'W', 1)


class TreeBallTest(unittest.TestCase):
    def test_triangle(self):
        tree, witness = is_tree_ball(triangle(), 'X', 3)
        self.assertFalse(tree)
        self.assertEqual(witness.length, 3)
        tree, witness = is_tree_ball(triangle(), 'X', 2)
        self.assertFalse(tree)
        self.assertEqual(witness.length, 3)

    def test_cycle_longer_than_radius(self):
        # W-X-Y-Z-W: radius 2 around W already holds the whole square
        tree, witness = is_tree_ball(polygon('WXYZ'), 'W', 2)
        self.assertFalse(tree)
        self.assertEqual(witness.length, 4)
        self.assertEqual(set(witness.path), set('WXYZ'))
        self.assertEqual(is_tree_ball(polygon('WXYZ'), 'W', 1), (True, None))

    def test_open_chain(self):
        graph = IntersectionGraph.from_model(chain(3, closed=False))
        self.assertEqual(is_tree_ball(graph, 'A1', 4), (True, None))

    def test_loop(self):
        model = sphere_pair([])
        model.new_edge(('A', 'A'), letter('a'))
        tree, witness = is_tree_ball(IntersectionGraph.from_model(model), 'B', 1)
        self.assertTrue(tree)
        tree, witness = is_tree_ball(IntersectionGraph.from_model(model), 'A', 1)
        self.assertFalse(tree)
        self.assertEqual(witness.length, 1)


class CollisionSearchTest(unittest.TestCase):
    def test_bigon(self):
        model = sphere_pair([letter('a'), letter('b')])
        self.assertEqual(collision_search(model, 2).length, 2)
        self.assertIsNone(collision_search(model, 1))

    def test_no_collision(self):
        self.assertIsNone(collision_search(sphere_pair([letter('a')]), 5))


class BranchSignatureTest(unittest.TestCase):
    def test_agrees_with_ntype(self):
        for labels, equal in (('aa', True), ('ab', False)):
            model = sphere_to_capped_grope(sphere_pair([letter(label) for label in labels]), 'P', 1)
            grope = model.pairs['P'].sphere_a
            signatures = [branch_signature(model, grope, branch, 2) for branch in (0, 1)]
            types = [ntype(model, grope, branch, 2) for branch in (0, 1)]
            self.assertEqual(signatures[0] == signatures[1], equal)
            self.assertEqual(types[0] == types[1], equal)


if __name__ == '__main__':
    unittest.main()
