import json
import os
from abc import ABC, abstractmethod
from typing import Optional

from grope_split.common import Common
from grope_split.core import Core
from grope_split.errors import UnknownBackendError
from grope_split.model import IntersectionGraph, Model
from grope_split.source.document import Document

MODEL_FILE = 'model.json'
REPORT_FILE = 'report.json'
DOT_BEFORE_FILE = 'graph.before.dot'
DOT_AFTER_FILE = 'graph.after.dot'


class OutputRegistry:
    @staticmethod
    def get_output(alias: str):
        available = OutputRegistry.get_available_modes()
        return available.get(alias, None)

    @staticmethod
    def init_output(alias: str, output_path: str):
        _output = OutputRegistry.get_output(alias)
        if _output is None:
            raise UnknownBackendError(f'Unknown output `{alias}`, expected one of '
                                      f'{", ".join(OutputRegistry.get_available_modes_list())}')
        return _output(output_path)

    @staticmethod
    def get_available_modes() -> dict:
        return {
            'model':    ModelOutput,
            'report':   ReportOutput,
            'dot':      DotOutput,
        }

    @staticmethod
    def get_available_modes_list() -> list:
        return list(OutputRegistry.get_available_modes().keys())


class BaseOutput(ABC):
    def __init__(self, output_path: str):
        # output_path is a directory
        self.output_path = output_path

    def target(self, filename: str) -> str:
        os.makedirs(self.output_path, exist_ok=True)
        return os.path.join(self.output_path, filename)

    @abstractmethod
    def write(self, model: Model, report: dict, source: Optional[Model] = None) -> str:
        pass


class ModelOutput(BaseOutput):
    """ Итоговая модель в формате документа """
    def write(self, model: Model, report: dict, source: Optional[Model] = None) -> str:
        path = self.target(MODEL_FILE)
        Common.cli_output(f'Writing model to `{path}`')
        Document.write(model, path)
        return path


def render_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


class ReportOutput(BaseOutput):
    def write(self, model: Model, report: dict, source: Optional[Model] = None) -> str:
        path = self.target(REPORT_FILE)
        Common.cli_output(f'Writing report to `{path}`')
        with open(path, 'w', encoding='utf-8') as f:
            f.write(render_report(report))
        return path


def _escape(text: str) -> str:
    return text.replace('\\', '\\\\').replace('"', '\\"')


def _quote(text: str) -> str:
    return f'"{_escape(text)}"'


def render_dot(model: Model) -> str:
    """
    Граф пересечений по классам факторизации: объекты одного класса сливаются
    в одну вершину с пометкой кратности ×k, трансверсальные пересечения пунктиром.
    """
    graph = IntersectionGraph.from_model(model)
    lines = [Core.compose_banner().rstrip('\n'), 'graph quotient {', '  node [shape=box];']
    for klass in graph.classes():
        members = graph.members(klass)
        kind = graph.class_kind(klass).value
        if len(members) > 1:
            kind += f' ×{len(members)}'
        # \n is a line break inside DOT labels
        lines.append(f'  {_quote(klass)} [label="{_escape(klass)}\\n{kind}"];')
    for edge_id in sorted(model.edges):
        edge = model.edges[edge_id]
        left, right = (model.klass(end) for end in edge.endpoints)
        attributes = [f'label={_quote(str(edge.label))}']
        if edge.transverse:
            attributes.append('style=dashed')
        elif edge.pairing is not None:
            attributes.append(f'tooltip={_quote(edge.pairing)}')
        lines.append(f'  {_quote(left)} -- {_quote(right)} [{", ".join(attributes)}];')
    lines.append('}')
    return '\n'.join(lines) + '\n'


class DotOutput(BaseOutput):
    """ Граф до операции (если известна входная модель) и после неё """
    def write(self, model: Model, report: dict, source: Optional[Model] = None) -> str:
        if source is not None:
            self._write_graph(source, DOT_BEFORE_FILE, 'input')
        return self._write_graph(model, DOT_AFTER_FILE, 'result')

    def _write_graph(self, model: Model, filename: str, title: str) -> str:
        path = self.target(filename)
        Common.cli_output(f'Writing {title} quotient graph to `{path}`')
        with open(path, 'w', encoding='utf-8') as f:
            f.write(render_dot(model))
        return path
