import json
import os
import tempfile
import unittest

from grope_split.core import Core
from grope_split.errors import UnknownBackendError
from grope_split.fuzz import letter, sphere_pair
from grope_split.handles import attach_pair_handles
from grope_split.output import DOT_AFTER_FILE, DOT_BEFORE_FILE, MODEL_FILE, REPORT_FILE, OutputRegistry, render_dot
from grope_split.source.document import Document


class RenderDotTest(unittest.TestCase):
    def setUp(self):
        self.model = attach_pair_handles(sphere_pair([letter('a')]), 'P')
        self.dot = render_dot(self.model)

    def test_banner(self):
        self.assertTrue(self.dot.startswith(Core.compose_banner()))
        self.assertIn('graph quotient {', self.dot)
        self.assertTrue(self.dot.endswith('}\n'))

    def test_torus_caps_merged(self):
        self.assertIn('"w0^T^c" [label="w0^T^c\\ncap ×2"];', self.dot)
        self.assertNotIn('"w0^T.0" [', self.dot)

    def test_edge_styles(self):
        lines = self.dot.splitlines()
        self.assertTrue(any('"A" -- "B"' in line and 'style=dashed' in line for line in lines))
        self.assertEqual(sum('tooltip="w0"' in line for line in lines), 2)


class OutputRegistryTest(unittest.TestCase):
    def test_modes(self):
        self.assertEqual(OutputRegistry.get_available_modes_list(), ['model', 'report', 'dot'])

    def test_unknown_mode(self):
        with self.assertRaises(UnknownBackendError):
            OutputRegistry.init_output('svg', 'out')

    def test_writes_files(self):
        model = sphere_pair([letter('a')])
        with tempfile.TemporaryDirectory() as tmpdir:
            target = os.path.join(tmpdir, 'nested')
            for mode in OutputRegistry.get_available_modes_list():
                OutputRegistry.init_output(mode, target).write(model, {'status': 0})
            self.assertEqual(Document.read(os.path.join(target, MODEL_FILE)), model)
            with open(os.path.join(target, REPORT_FILE), encoding='utf-8') as f:
                self.assertEqual(json.load(f), {'status': 0})
            self.assertTrue(os.path.exists(os.path.join(target, DOT_AFTER_FILE)))
            self.assertFalse(os.path.exists(os.path.join(target, DOT_BEFORE_FILE)))

    def test_dot_with_source(self):
        source = sphere_pair([letter('a')])
        model = attach_pair_handles(source, 'P')
        with tempfile.TemporaryDirectory() as tmpdir:
            path = OutputRegistry.init_output('dot', tmpdir).write(model, {}, source)
            self.assertEqual(path, os.path.join(tmpdir, DOT_AFTER_FILE))
            for name, expected in ((DOT_BEFORE_FILE, source), (DOT_AFTER_FILE, model)):
                with open(os.path.join(tmpdir, name), encoding='utf-8') as f:
                    self.assertEqual(f.read(), render_dot(expected))


if __name__ == '__main__':
    unittest.main()
