"""
Handle ledger records: 2-/3-handle attachments, pending 3-handle obligations
and the sparse boundary matrix over the integral group ring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from grope_split.group import GroupWord


@dataclass(frozen=True)
class HandleRecord:
    index: int
    dimension: int
    attaching_site: str
    created_duals: tuple[str, ...] = ()
    # 3-handles: index of the 2-handle they cancel
    cancels: Optional[int] = None
    # what triggered the attachment (pair id, stage reference, sphere id)
    source: str = ''


@dataclass(frozen=True)
class Obligation:
    """ Отложенная 3-ручка: одна из сфер должна стать вложенной """
    handle: int
    spheres: tuple[str, ...]


class GroupRingMatrix:
    """
    Sparse matrix with entries in Z[π]: {(row, col): {word: coefficient}}.
    Zero coefficients are never stored.
    """
    def __init__(self, entries: Optional[dict] = None):
        self.entries: dict[tuple[int, int], dict[GroupWord, int]] = {}
        for (row, col), terms in (entries or {}).items():
            for word, coeff in terms.items():
                self.add(row, col, word, coeff)

    def add(self, row: int, col: int, word: GroupWord, coeff: int = 1):
        terms = self.entries.setdefault((row, col), {})
        total = terms.get(word, 0) + coeff
        if total == 0:
            terms.pop(word, None)
        else:
            terms[word] = total
        if not terms:
            del self.entries[(row, col)]

    def get(self, row: int, col: int) -> dict[GroupWord, int]:
        return dict(self.entries.get((row, col), {}))

    def rows(self) -> list[int]:
        return sorted({row for row, _ in self.entries})

    def triplets(self) -> Iterator[tuple[int, int, GroupWord, int]]:
        for (row, col) in sorted(self.entries):
            for word in sorted(self.entries[(row, col)]):
                yield row, col, word, self.entries[(row, col)][word]

    def copy(self) -> GroupRingMatrix:
        return GroupRingMatrix(self.entries)

    def __eq__(self, other):
        return isinstance(other, GroupRingMatrix) and self.entries == other.entries

    def __len__(self):
        return len(self.entries)


@dataclass
class HandleLedger:
    records: list[HandleRecord] = field(default_factory=list)
    boundary: GroupRingMatrix = field(default_factory=GroupRingMatrix)
    obligations: list[Obligation] = field(default_factory=list)

    @property
    def next_index(self) -> int:
        return len(self.records)

    def record(self, index: int) -> Optional[HandleRecord]:
        if 0 <= index < len(self.records):
            return self.records[index]
        return None

    def two_handles(self) -> list[HandleRecord]:
        return [record for record in self.records if record.dimension == 2]

    def three_handles(self) -> list[HandleRecord]:
        return [record for record in self.records if record.dimension == 3]

    def pending_for(self, sphere: str) -> list[Obligation]:
        return [obligation for obligation in self.obligations if sphere in obligation.spheres]

    def sources(self) -> set[str]:
        return {record.source for record in self.records}

    def copy(self) -> HandleLedger:
        return HandleLedger(list(self.records), self.boundary.copy(), list(self.obligations))

    def is_empty(self) -> bool:
        return not self.records and not self.obligations and not len(self.boundary)
