import unittest

from grope_split.canonical import canonical_form
from grope_split.errors import BudgetError

PLAIN = ('sphere', '0')
ROOT = ('cap', '1')


def square(names: list[str], labels: list[str]) -> list[tuple]:
    return [(names[i], names[(i + 1) % 4], (labels[i],)) for i in range(4)]


class CanonicalFormTest(unittest.TestCase):
    def test_relabelled_cycle(self):
        colours = {name: PLAIN for name in 'abcd'}
        first = canonical_form(colours, square(list('abcd'), ['x', 'y', 'x', 'y']))
        colours = {name: PLAIN for name in 'pqrs'}
        second = canonical_form(colours, square(list('rpsq'), ['y', 'x', 'y', 'x']))
        self.assertEqual(first, second)

    def test_edge_labels_matter(self):
        colours = {name: PLAIN for name in 'abcd'}
        first = canonical_form(colours, square(list('abcd'), ['x', 'x', 'y', 'y']))
        second = canonical_form(colours, square(list('abcd'), ['x', 'y', 'x', 'y']))
        self.assertNotEqual(first, second)

    def test_triangle_is_not_a_path(self):
        colours = {name: PLAIN for name in 'abcd'}
        triangle = [('a', 'b', ('x',)), ('b', 'c', ('x',)), ('c', 'a', ('x',))]
        path = [('a', 'b', ('x',)), ('b', 'c', ('x',)), ('c', 'd', ('x',))]
        self.assertNotEqual(canonical_form(colours, triangle), canonical_form(colours, path))

    def test_parallel_edges_and_loops(self):
        colours = {'a': PLAIN, 'b': PLAIN}
        double = [('a', 'b', ('x',)), ('a', 'b', ('x',))]
        looped = [('a', 'b', ('x',)), ('a', 'a', ('x',))]
        self.assertNotEqual(canonical_form(colours, double), canonical_form(colours, looped))

    def test_rooted_tree_uses_tree_encoding(self):
        colours = {'r': ROOT, 'u': PLAIN, 'v': PLAIN}
        form = canonical_form(colours, [('r', 'u', ('x',)), ('u', 'v', ('y',))], roots=['r'])
        self.assertEqual(form[0], 'tree')

    def test_root_position_matters(self):
        edges = [('a', 'b', ('x',)), ('b', 'c', ('x',))]
        end = canonical_form({'a': ROOT, 'b': PLAIN, 'c': PLAIN}, edges, roots=['a'])
        middle = canonical_form({'a': PLAIN, 'b': ROOT, 'c': PLAIN}, edges, roots=['b'])
        mirrored = canonical_form({'a': PLAIN, 'b': PLAIN, 'c': ROOT}, edges, roots=['c'])
        self.assertNotEqual(end, middle)
        self.assertEqual(end, mirrored)

    def test_search_limit(self):
        colours = {name: PLAIN for name in 'abcd'}
        with self.assertRaises(BudgetError) as context:
            canonical_form(colours, square(list('abcd'), ['x'] * 4), search_limit=0)
        self.assertEqual(context.exception.stage, 'canonical')


if __name__ == '__main__':
    unittest.main()
