import math
import os
import time
from dataclasses import dataclass
from functools import update_wrapper
from typing import Optional

import click

from grope_split import __version__
from grope_split.common import Common
from grope_split.core import Core
from grope_split.errors import (ApplicationError, BudgetError, DualPairReferenceError, IncompleteLedgerError,
                                MalformedInputError, PlanError, UnknownBackendError)
from grope_split.fuzz import CHECKS, FuzzOptions, run_fuzz
from grope_split.handles import (add_pair_handles, add_stage_handles, certify, discharge_all, discharge_obligation,
                                 whitney_move)
from grope_split.model import Model, label_set, validate
from grope_split.oracles import collision_search
from grope_split.output import OutputRegistry
from grope_split.pipeline import CONSTRUCTIONS, PipelineOptions, execute_pipeline
from grope_split.source.document import Document
from grope_split.splitting import (SIDES, SplitPlan, end_units, ntype_report, split_to_distance, split_to_dyadic,
                                   split_transverse_pair, split_whitney_disk)
from grope_split.unravel import unravel

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 2
EXIT_BUDGET = 3

# input or usage problems rather than failed checks
MALFORMED_ERRORS = (MalformedInputError, PlanError, UnknownBackendError, DualPairReferenceError)


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: Optional[str] = None
    n: int = 1
    budget: int = Core.DEFAULT_BUDGET
    seed: int = 0
    output: str = 'out'
    dot: bool = False
    jobs: Optional[int] = None
    # command specific options as sorted (name, value) pairs
    params: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise click.UsageError(f'--n must be at least 1, got {self.n}')
        if self.budget < 1:
            raise click.UsageError(f'--budget must be at least 1, got {self.budget}')

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)


def _finite(value: float):
    return None if value == math.inf else value


def _cycle_document(cycle) -> Optional[dict]:
    if cycle is None:
        return None
    return {'length': cycle.length, 'path': list(cycle.path), 'edges': [edge.id for edge in cycle.edges]}


def plan_from_edges(model: Model, target: str, edge_ids, skip=()) -> SplitPlan:
    """ Ends of the listed edges form the first part, every other end the second """
    chosen = set(edge_ids)
    if not chosen:
        raise PlanError(f'No edges chosen for the first part of `{target}`')
    units = end_units(model, target, skip)
    first = frozenset(end for unit in units for end in unit if end[0] in chosen)
    second = frozenset(end for unit in units for end in unit if end[0] not in chosen)
    return SplitPlan(target, first, second)


def _default_target(model: Model, target: Optional[str]) -> str:
    if target is not None:
        return target
    if model.gropes:
        return sorted(model.gropes)[0]
    if model.pairs:
        return sorted(model.pairs)[0]
    raise PlanError('Model has neither capped gropes nor transverse pairs to split')


def _default_pair(model: Model, pair: Optional[str]) -> str:
    pair = pair or (sorted(model.pairs)[0] if model.pairs else None)
    if pair not in model.pairs:
        raise PlanError(f'Unknown transverse pair `{pair}`')
    return pair


def run_validate(config: RunConfig, model: Model) -> tuple[Model, dict, int]:
    violations = validate(model)
    for violation in violations:
        Common.cli_output(f'{violation.object}: [{violation.rule}] {violation.message}')
    report = {
        'valid': not violations,
        'violations': [{'object': v.object, 'rule': v.rule, 'message': v.message} for v in violations],
        'objects': model.object_count(),
        'edges': len(model.edges),
    }
    return model, report, EXIT_FAILED if violations else EXIT_OK


def run_split(config: RunConfig, model: Model) -> tuple[Model, dict, int]:
    target = _default_target(model, config.param('target'))
    before = label_set(model)
    if config.param('dyadic'):
        Common.cli_output(f'Splitting `{target}` to dyadic branches')
        result = split_to_dyadic(model, target, config.budget)
    else:
        Common.cli_output(f'Splitting `{target}` to distance {config.n}')
        result = split_to_distance(model, target, config.n, config.budget, config.param('side', 'a'))
    report = {
        'target': target,
        'n': config.n,
        'objects_before': model.object_count(),
        'objects_after': result.object_count(),
        'labels_preserved': label_set(result) == before,
        'collision': _cycle_document(collision_search(result, config.n)),
    }
    if target in result.gropes:
        ntypes = ntype_report(result, target, config.n)
        report['ntypes'] = {'defined': ntypes.defined, 'classes': ntypes.classes(), 'agree': ntypes.agree}
    return result, report, EXIT_OK


def run_split_pair(config: RunConfig, model: Model) -> tuple[Model, dict, int]:
    pair_id = _default_pair(model, config.param('pair'))
    pair = model.pairs[pair_id]
    side = config.param('side', 'a')
    sphere = pair.sphere_a if side == 'a' else pair.sphere_b
    plan = plan_from_edges(model, sphere, config.param('first', ()), skip=[pair.distinguished])
    result = split_transverse_pair(model, pair_id, plan, side)
    report = {
        'pair': pair_id,
        'sphere': sphere,
        'pairs': sorted(result.pairs),
        'labels_preserved': label_set(result) == label_set(model),
        'pending': len(result.ledger.obligations),
    }
    return result, report, EXIT_OK


def run_split_tower(config: RunConfig, model: Model) -> tuple[Model, dict, int]:
    tower_id = config.param('tower') or (sorted(model.towers)[0] if model.towers else None)
    if tower_id is None:
        raise PlanError('Model has no Whitney towers')
    disk = config.param('disk')
    plan = plan_from_edges(model, disk, config.param('first', ()))
    result = split_whitney_disk(model, tower_id, disk, plan)
    report = {
        'tower': tower_id,
        'disk': disk,
        'layers': [list(layer) for layer in result.towers[tower_id].layers],
        'labels_preserved': label_set(result) == label_set(model),
    }
    return result, report, EXIT_OK


def run_handles(config: RunConfig, model: Model) -> tuple[Model, dict, int]:
    result = model.copy()
    for pairing in config.param('whitney', ()):
        Common.cli_output(f'Whitney move on `{pairing}`')
        result = whitney_move(result, pairing)
    duals = []
    surface = config.param('surface')
    if surface:
        grope = config.param('grope')
        if grope is None and surface in result.objects:
            grope = result.base_of(surface)
        duals.extend(add_stage_handles(result, grope, (surface, config.param('index', 0))))
    elif config.param('pair'):
        duals.extend(add_pair_handles(result, config.param('pair')))
    for sphere in config.param('discharge', ()):
        Common.cli_output(f'Discharging `{sphere}`')
        result = discharge_obligation(result, sphere)
    report = {
        'duals': duals,
        'two_handles': len(result.ledger.two_handles()),
        'three_handles': len(result.ledger.three_handles()),
        'pending': [{'handle': o.handle, 'spheres': list(o.spheres)} for o in result.ledger.obligations],
    }
    return result, report, EXIT_OK


def run_unravel(config: RunConfig, model: Model) -> tuple[Model, dict, int]:
    result, unravel_report = unravel(model, _default_pair(model, config.param('pair')), config.n)
    Common.cli_output(f'Girth {unravel_report.girth_before} -> {unravel_report.girth_after}')
    report = {
        'chain': list(unravel_report.chain),
        'n': config.n,
        'copies_made': {key: list(value) for key, value in unravel_report.copies_made.items()},
        'shift_assignment': dict(unravel_report.shift_assignment),
        'girth_before': _finite(unravel_report.girth_before),
        'girth_after': _finite(unravel_report.girth_after),
    }
    return result, report, EXIT_OK


def run_pipeline(config: RunConfig, model: Model) -> tuple[Model, dict, int]:
    options = PipelineOptions(pair=config.param('pair'), n=config.n, height=config.param('height'),
                              budget=config.budget, construction=config.param('construction', CONSTRUCTIONS[0]))
    result, pipeline_report = execute_pipeline(model, options)
    return result, pipeline_report.to_document(), EXIT_OK if pipeline_report.certificate.ok else EXIT_FAILED


def run_certify(config: RunConfig, model: Model) -> tuple[Model, dict, int]:
    result = discharge_all(model, assume_embedded=True) if config.param('assume_embedded') else model
    certificate = certify(result.ledger)
    Common.cli_output(f'Certificate: {certificate.verdict}')
    report = {'certificate': certificate.verdict, 'witness': None}
    if certificate.witness is not None:
        row, col, terms = certificate.witness
        report['witness'] = {'row': row, 'col': col, 'terms': [[str(word), coeff] for word, coeff in terms]}
    return result, report, EXIT_OK if certificate.ok else EXIT_FAILED


def run_fuzz_checks(config: RunConfig, model: Optional[Model]) -> tuple[Optional[Model], dict, int]:
    options = FuzzOptions(seed=config.seed, count=config.param('count', 20), checks=config.param('checks', ()),
                          jobs=config.jobs)
    report = run_fuzz(options)
    failed = sum(len(summary['failures']) for summary in report['checks'].values())
    Common.cli_output(f'{failed} failing runs')
    return None, report, EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    'validate':     run_validate,
    'split':        run_split,
    'split-pair':   run_split_pair,
    'split-tower':  run_split_tower,
    'handles':      run_handles,
    'unravel':      run_unravel,
    'pipeline':     run_pipeline,
    'certify':      run_certify,
    'fuzz':         run_fuzz_checks,
}


def write_artifacts(config: RunConfig, model: Optional[Model], report: dict, source: Optional[Model] = None):
    modes = (['model'] if model is not None else []) + ['report'] + (['dot'] if config.dot and model else [])
    for mode in modes:
        OutputRegistry.init_output(mode, config.output).write(model, report, source)


def run(config: RunConfig) -> int:
    handler = COMMANDS.get(config.command)
    if handler is None:
        raise click.UsageError(f'Unknown command `{config.command}`')
    report = {'command': config.command}
    model, source, status = None, None, EXIT_OK
    try:
        source = Document.read(config.input_path) if config.input_path else None
        model, details, status = handler(config, source)
        report.update(details)
    except BudgetError as exc:
        Common.cli_output(f'Budget exceeded at stage `{exc.stage}`: {exc}')
        model, status = exc.partial, EXIT_BUDGET
        report.update({'error': type(exc).__name__, 'message': str(exc), 'stage': exc.stage})
    except IncompleteLedgerError as exc:
        Common.cli_output(f'Incomplete ledger: {exc}')
        status = EXIT_FAILED
        report.update({'error': type(exc).__name__, 'message': str(exc),
                       'pending': [{'handle': o.handle, 'spheres': list(o.spheres)} for o in exc.pending]})
    except ApplicationError as exc:
        Common.cli_output(f'{type(exc).__name__}: {exc}')
        status = EXIT_MALFORMED if isinstance(exc, MALFORMED_ERRORS) else EXIT_FAILED
        model = None
        report.update({'error': type(exc).__name__, 'message': str(exc)})
    report['status'] = status
    write_artifacts(config, model, report, source)
    return status


def command_summary(f):
    def wrapper(**kwargs):
        start_time = time.time()
        status = f(**kwargs)
        Common.show_memory_usage()
        Common.show_execution_time(start_time)
        if status:
            click.get_current_context().exit(status)
    return update_wrapper(wrapper, f)


def _config(command: str, input_path, n, budget, out, dot, **params) -> RunConfig:
    return RunConfig(command, input_path, n=n, budget=budget or Core.get_budget(), output=out, dot=dot,
                     params=tuple(sorted((key, value) for key, value in params.items() if value is not None)))


def common_options(f):
    f = click.option('--dot', is_flag=True, help='Write the quotient graphs before and after as DOT')(f)
    f = click.option('--out', type=click.types.Path(file_okay=False), default='out', help='Output directory')(f)
    f = click.option('--budget', type=int, default=None, help='Object budget (GS_BUDGET)')(f)
    f = click.option('--n', 'n', type=int, default=1, help='Scale n')(f)
    return f


@click.group(invoke_without_command=True, no_args_is_help=True)
@click.version_option(__version__)
@click.option("-e", "--env", type=(str, str), multiple=True, help='Pass ENV params')
@click.pass_context
def cli(_, env):
    for k, v in env:
        os.environ.setdefault(k, v)


model_path = click.argument('model_path', type=click.types.Path(exists=True, dir_okay=False, readable=True))


@cli.command(name='validate')
@common_options
@model_path
@command_summary
def validate_command(n, budget, out, dot, model_path):
    """ Check structural rules of a model document """
    return run(_config('validate', model_path, n, budget, out, dot))


@cli.command(name='split')
@common_options
@click.option('--target', type=str, default=None, help='Capped grope or transverse pair to split')
@click.option('--side', type=click.Choice(SIDES), default='a', help='Sphere of a pair to split')
@click.option('--dyadic', is_flag=True, help='Only restore dyadic branches')
@model_path
@command_summary
def split_command(n, budget, out, dot, target, side, dyadic, model_path):
    """\b
    Split a capped grope (or one sphere of a transverse pair) until every
    branch has an n-type and no cycle of length <= n remains.
    """
    return run(_config('split', model_path, n, budget, out, dot, target=target, side=side, dyadic=dyadic or None))


@cli.command(name='split-pair')
@common_options
@click.option('--pair', type=str, default=None, help='Transverse pair')
@click.option('--side', type=click.Choice(SIDES), default='a', help='Sphere of the pair to split')
@click.option('--first', type=str, multiple=True, help='Edges of the first part')
@model_path
@command_summary
def split_pair_command(n, budget, out, dot, pair, side, first, model_path):
    """ Split one sphere of a transverse pair along an edge partition """
    return run(_config('split-pair', model_path, n, budget, out, dot, pair=pair, side=side, first=first))


@cli.command(name='split-tower')
@common_options
@click.option('--tower', type=str, default=None, help='Whitney tower')
@click.option('--disk', type=str, required=True, help='Whitney disk of the tower')
@click.option('--first', type=str, multiple=True, help='Edges of the first part')
@model_path
@command_summary
def split_tower_command(n, budget, out, dot, tower, disk, first, model_path):
    """ Split a Whitney disk by a finger move """
    return run(_config('split-tower', model_path, n, budget, out, dot, tower=tower, disk=disk, first=first))


@cli.command(name='handles')
@common_options
@click.option('--pair', type=str, default=None, help='Attach handles for a transverse pair')
@click.option('--grope', type=str, default=None, help='Capped grope of the stage')
@click.option('--surface', type=str, default=None, help='Stage surface carrying the dual pair')
@click.option('--index', type=int, default=None, help='Dual pair index on the stage')
@click.option('--whitney', type=str, multiple=True, help='Whitney moves applied first')
@click.option('--discharge', type=str, multiple=True, help='Spheres whose 3-handles to attach')
@model_path
@command_summary
def handles_command(n, budget, out, dot, pair, grope, surface, index, whitney, discharge, model_path):
    """ Attach 2-handles, apply Whitney moves and discharge 3-handle obligations """
    return run(_config('handles', model_path, n, budget, out, dot, pair=pair, grope=grope, surface=surface,
                       index=index, whitney=whitney, discharge=discharge))


@cli.command(name='unravel')
@common_options
@click.option('--pair', type=str, default=None, help='Seed transverse pair of the chain')
@model_path
@command_summary
def unravel_command(n, budget, out, dot, pair, model_path):
    """ Replace every B-sphere of a chain by n copies with cyclically shifted caps """
    return run(_config('unravel', model_path, n, budget, out, dot, pair=pair))


@cli.command(name='pipeline')
@common_options
@click.option('--pair', type=str, default=None, help='Transverse pair')
@click.option('--height', type=int, default=None, help='Grope height (GS_GROPE_HEIGHT)')
@click.option('--construction', type=click.Choice(CONSTRUCTIONS), default=CONSTRUCTIONS[0],
              help='Cyclic n-sheet lift or non-backtracking unrolled tree')
@model_path
@command_summary
def pipeline_command(n, budget, out, dot, pair, height, construction, model_path):
    """ Grope, splitting, lifted segment, handles and projected certificate """
    return run(_config('pipeline', model_path, n, budget, out, dot, pair=pair, height=height,
                       construction=construction))


@cli.command(name='certify')
@common_options
@click.option('--assume-embedded', is_flag=True, help='Discharge every obligation without evidence')
@model_path
@command_summary
def certify_command(n, budget, out, dot, assume_embedded, model_path):
    """ Classify the boundary matrix of the handle ledger """
    return run(_config('certify', model_path, n, budget, out, dot, assume_embedded=assume_embedded or None))


@cli.command(name='fuzz')
@click.option('--seed', type=int, default=0, help='First seed')
@click.option('--count', type=int, default=20, help='Runs per check')
@click.option('-c', '--check', 'checks', type=click.Choice(list(CHECKS)), multiple=True, help='Limit checks')
@click.option('--jobs', type=int, default=None, help='Number of worker processes to use (GS_JOBS)')
@click.option('--out', type=click.types.Path(file_okay=False), default='out', help='Output directory')
@command_summary
def fuzz_command(seed, count, checks, jobs, out):
    """ Run seeded property checks in a process pool """
    config = RunConfig('fuzz', seed=seed, output=out, jobs=jobs or Core.get_jobs(),
                       params=(('checks', tuple(checks)), ('count', count)))
    return run(config)


if __name__ == '__main__':
    cli()
