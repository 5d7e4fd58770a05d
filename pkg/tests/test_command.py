import json
import os
import unittest

import click
from click.testing import CliRunner

from grope_split.command import EXIT_BUDGET, EXIT_FAILED, EXIT_MALFORMED, EXIT_OK, RunConfig, cli
from grope_split.fuzz import figure_cycle, letter, sphere_pair
from grope_split.handles import UPPER_TRIANGULAR, attach_pair_handles
from grope_split.output import DOT_AFTER_FILE, DOT_BEFORE_FILE, MODEL_FILE, REPORT_FILE
from grope_split.source.document import Document


def read_report(out: str = 'out') -> dict:
    with open(os.path.join(out, REPORT_FILE), encoding='utf-8') as f:
        return json.load(f)


class CommandTest(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner()

    def invoke(self, model, *args):
        Document.write(model, 'model.json')
        return self.runner.invoke(cli, [*args, 'model.json'])

    def test_validate(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(sphere_pair([letter('a')]), 'validate', '--dot')
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
            report = read_report()
            self.assertTrue(report['valid'])
            self.assertEqual(report['status'], EXIT_OK)
            for name in (DOT_BEFORE_FILE, DOT_AFTER_FILE):
                self.assertTrue(os.path.exists(os.path.join('out', name)))

    def test_malformed_document(self):
        with self.runner.isolated_filesystem():
            with open('model.json', 'w', encoding='utf-8') as f:
                f.write('{"objects": [')
            result = self.runner.invoke(cli, ['validate', 'model.json'])
            self.assertEqual(result.exit_code, EXIT_MALFORMED)
            self.assertEqual(read_report()['error'], 'MalformedInputError')
            self.assertFalse(os.path.exists(os.path.join('out', MODEL_FILE)))

    def test_certify_pending(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(attach_pair_handles(sphere_pair([]), 'P'), 'certify')
            self.assertEqual(result.exit_code, EXIT_FAILED)
            report = read_report()
            self.assertEqual(report['error'], 'IncompleteLedgerError')
            self.assertEqual([entry['handle'] for entry in report['pending']], [0, 1])

    def test_certify_assume_embedded(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(attach_pair_handles(sphere_pair([]), 'P'), 'certify', '--assume-embedded')
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
            self.assertEqual(read_report()['certificate'], 'identity')

    def test_pipeline(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(figure_cycle(), 'pipeline', '--n', '3', '--height', '1')
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
            report = read_report()
            self.assertEqual(report['certificate'], UPPER_TRIANGULAR)
            self.assertTrue(report['tree'])
            self.assertEqual(report['construction'], 'cyclic')
            Document.read(os.path.join('out', MODEL_FILE))

    def test_pipeline_unrolled(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(figure_cycle(), 'pipeline', '--n', '3', '--height', '1', '--construction', 'unrolled')
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
            self.assertEqual(read_report()['construction'], 'unrolled')

    def test_budget_keeps_partial_model(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(figure_cycle(), 'pipeline', '--n', '3', '--height', '1', '--budget', '5')
            self.assertEqual(result.exit_code, EXIT_BUDGET)
            self.assertEqual(read_report()['stage'], 'pipeline')
            self.assertTrue(os.path.exists(os.path.join('out', MODEL_FILE)))

    def test_unravel(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(figure_cycle(), 'unravel', '--n', '3')
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
            report = read_report()
            self.assertEqual(report['girth_before'], 1)
            self.assertEqual(report['girth_after'], 3)

    def test_unravel_graphs_before_and_after(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(figure_cycle(), 'unravel', '--n', '3', '--dot')
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
            graphs = []
            for name in (DOT_BEFORE_FILE, DOT_AFTER_FILE):
                with open(os.path.join('out', name), encoding='utf-8') as f:
                    graphs.append(f.read())
            self.assertNotEqual(graphs[0], graphs[1])

    def test_handles_with_whitney_and_discharge(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(sphere_pair([letter('a')]), 'handles', '--pair', 'P', '--whitney', 'w0',
                                 '--discharge', 'A', '--discharge', 'B')
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
            report = read_report()
            self.assertEqual(report['two_handles'], 2)
            self.assertEqual(report['three_handles'], 2)
            self.assertEqual(report['pending'], [])

    def test_premature_discharge(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(sphere_pair([letter('a')]), 'handles', '--pair', 'P', '--discharge', 'A')
            self.assertEqual(result.exit_code, EXIT_FAILED)
            self.assertEqual(read_report()['error'], 'PrematureDischargeError')

    def test_split_pair_bad_plan(self):
        with self.runner.isolated_filesystem():
            result = self.invoke(sphere_pair([letter('a')]), 'split-pair', '--first', 'nowhere')
            self.assertEqual(result.exit_code, EXIT_MALFORMED)

    def test_env_option(self):
        with self.runner.isolated_filesystem():
            self.addCleanup(os.environ.pop, 'GS_GROPE_HEIGHT', None)
            Document.write(figure_cycle(), 'model.json')
            result = self.runner.invoke(cli, ['-e', 'GS_GROPE_HEIGHT', '1', 'pipeline', '--n', '3', 'model.json'])
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
            self.assertEqual(read_report()['height'], 1)


class RunConfigTest(unittest.TestCase):
    def test_scale_must_be_positive(self):
        with self.assertRaises(click.UsageError):
            RunConfig('split', n=0)

    def test_params(self):
        config = RunConfig('split', params=(('target', 'G'),))
        self.assertEqual(config.param('target'), 'G')
        self.assertEqual(config.param('side', 'a'), 'a')


if __name__ == '__main__':
    unittest.main()
