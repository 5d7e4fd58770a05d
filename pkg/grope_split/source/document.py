import json

from grope_split.errors import MalformedInputError
from grope_split.group import GroupRegistry
from grope_split.ledger import GroupRingMatrix, HandleLedger, HandleRecord, Obligation
from grope_split.model import (CappedGrope, IntersectionEdge, Model, ModelObject, ObjectKind, TransversePair,
                               WhitneyTower)


class Document:
    """ Модель в виде JSON-документа: generators, objects, edges, ledger (+ gropes, pairs, towers) """

    @staticmethod
    def read(path: str) -> Model:
        try:
            with open(path, encoding='utf-8') as f:
                text = f.read()
        except OSError as exc:
            raise MalformedInputError(f'Cannot read model document `{path}`: {exc.strerror}') from exc
        return Document.parse(text)

    @staticmethod
    def write(model: Model, path: str):
        with open(path, 'w', encoding='utf-8') as f:
            f.write(Document.render(model))

    @staticmethod
    def parse(text: str) -> Model:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f'Model document is not valid JSON: {exc.msg} (line {exc.lineno})') from exc
        return Document.load(data)

    @staticmethod
    def render(model: Model) -> str:
        return json.dumps(Document.dump(model), sort_keys=True, indent=2, ensure_ascii=False) + '\n'

    @staticmethod
    def load(data) -> Model:
        if not isinstance(data, dict):
            raise MalformedInputError('Model document must be a JSON object')
        try:
            model = Model(GroupRegistry.from_document(data.get('generators', 0)))
            for record in data.get('objects', []):
                model.add_object(ModelObject(
                    id=str(record['id']),
                    kind=ObjectKind(record['kind']),
                    genus=int(record.get('genus', 0)),
                    children=tuple((str(left), str(right)) for left, right in record.get('children', [])),
                    parent=record.get('parent'),
                    quotient=record.get('quotient'),
                    layer=int(record.get('layer', 0)),
                    pairing=record.get('pairing'),
                    host=record.get('host'),
                ))
            for record in data.get('edges', []):
                left, right = record['endpoints']
                model.add_edge(IntersectionEdge(
                    id=str(record['id']),
                    endpoints=(str(left), str(right)),
                    label=model.group.parse(record.get('label', '1')),
                    pairing=record.get('pairing'),
                    transverse=bool(record.get('transverse', False)),
                ))
            for record in data.get('gropes', []):
                grope = CappedGrope(str(record['id']), int(record['height']), bool(record.get('dyadic', False)))
                model.gropes[grope.id] = grope
            for record in data.get('pairs', []):
                pair = TransversePair(str(record['id']), str(record['sphere_a']), str(record['sphere_b']),
                                      str(record['distinguished']))
                model.pairs[pair.id] = pair
            for record in data.get('towers', []):
                layers = tuple(tuple(str(disk) for disk in layer) for layer in record.get('layers', []))
                tower = WhitneyTower(str(record['id']), str(record['pair']), layers)
                model.towers[tower.id] = tower
            model.ledger = Document.load_ledger(model, data.get('ledger', {}))
        except MalformedInputError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f'Malformed model document: {exc!r}') from exc
        return model

    @staticmethod
    def load_ledger(model: Model, data) -> HandleLedger:
        ledger = HandleLedger()
        for position, record in enumerate(data.get('records', [])):
            index = int(record.get('index', position))
            if index != position:
                raise MalformedInputError(f'Handle records must be numbered in order, got {index} at {position}')
            cancels = record.get('cancels')
            ledger.records.append(HandleRecord(
                index=index,
                dimension=int(record['dimension']),
                attaching_site=str(record['site']),
                created_duals=tuple(str(dual) for dual in record.get('duals', [])),
                cancels=None if cancels is None else int(cancels),
                source=str(record.get('source', '')),
            ))
        matrix = GroupRingMatrix()
        for row, col, word, coeff in data.get('boundary', []):
            matrix.add(int(row), int(col), model.group.parse(word), int(coeff))
        ledger.boundary = matrix
        for record in data.get('obligations', []):
            ledger.obligations.append(Obligation(int(record['handle']), tuple(str(s) for s in record['spheres'])))
        return ledger

    @staticmethod
    def dump(model: Model) -> dict:
        objects = []
        for key in sorted(model.objects):
            obj = model.objects[key]
            record = {
                'id': obj.id,
                'kind': obj.kind.value,
                'genus': obj.genus,
                'children': [list(dual_pair) for dual_pair in obj.children],
            }
            if obj.parent is not None:
                record['parent'] = obj.parent
            if obj.quotient is not None and obj.quotient != obj.id:
                record['quotient'] = obj.quotient
            if obj.layer:
                record['layer'] = obj.layer
            if obj.pairing is not None:
                record['pairing'] = obj.pairing
            if obj.host is not None:
                record['host'] = obj.host
            objects.append(record)

        edges = []
        for key in sorted(model.edges):
            edge = model.edges[key]
            record = {
                'id': edge.id,
                'endpoints': list(edge.endpoints),
                'label': model.group.format(edge.label),
                'pairing': edge.pairing,
            }
            if edge.transverse:
                record['transverse'] = True
            edges.append(record)

        document = {
            'generators': model.group.to_document(),
            'objects': objects,
            'edges': edges,
            'ledger': Document.dump_ledger(model),
        }
        if model.gropes:
            document['gropes'] = [{'id': g.id, 'height': g.height, 'dyadic': g.dyadic}
                                  for g in (model.gropes[key] for key in sorted(model.gropes))]
        if model.pairs:
            document['pairs'] = [{'id': p.id, 'sphere_a': p.sphere_a, 'sphere_b': p.sphere_b,
                                  'distinguished': p.distinguished}
                                 for p in (model.pairs[key] for key in sorted(model.pairs))]
        if model.towers:
            document['towers'] = [{'id': t.id, 'pair': t.pair, 'layers': [list(layer) for layer in t.layers]}
                                  for t in (model.towers[key] for key in sorted(model.towers))]
        return document

    @staticmethod
    def dump_ledger(model: Model) -> dict:
        ledger = model.ledger
        records = []
        for record in ledger.records:
            entry = {
                'index': record.index,
                'dimension': record.dimension,
                'site': record.attaching_site,
                'duals': list(record.created_duals),
                'source': record.source,
            }
            if record.cancels is not None:
                entry['cancels'] = record.cancels
            records.append(entry)
        return {
            'records': records,
            'boundary': [[row, col, model.group.format(word), coeff]
                         for row, col, word, coeff in ledger.boundary.triplets()],
            'obligations': [{'handle': o.handle, 'spheres': list(o.spheres)} for o in ledger.obligations],
        }
