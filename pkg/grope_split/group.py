"""
Fundamental-group elements used as intersection labels.

Words are kept in normal form by the group backend: freely reduced words for
the free group, shortlex-minimal words for a finite group given by its
multiplication table. Values are immutable, so a backend can be shared freely.
"""
from __future__ import annotations

import string
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from grope_split.errors import MalformedInputError, UnknownBackendError

IDENTITY_TEXT = '1'
MAX_GENERATORS = len(string.ascii_lowercase)


@dataclass(frozen=True, order=True)
class Generator:
    index: int
    inverted: bool = False

    def inverse(self) -> Generator:
        return Generator(self.index, not self.inverted)

    def __str__(self):
        letter = string.ascii_lowercase[self.index]
        return f"{letter}'" if self.inverted else letter


@dataclass(frozen=True, order=True)
class GroupWord:
    letters: tuple[Generator, ...] = ()

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def is_freely_reduced(self) -> bool:
        return all(left != right.inverse() for left, right in zip(self.letters, self.letters[1:]))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return IDENTITY_TEXT
        return ' '.join(str(letter) for letter in self.letters)


EPSILON = GroupWord()


def parse_letters(text: str) -> list[Generator]:
    """ Разбор текстового слова: `a b' a`, единица записывается как `1` """
    stripped = text.strip()
    if stripped == IDENTITY_TEXT or stripped == '':
        return []
    letters: list[Generator] = []
    for char in stripped:
        if char.isspace():
            continue
        if char == "'":
            if not letters or letters[-1].inverted:
                raise MalformedInputError(f'Misplaced inverse mark in word "{text}"')
            letters[-1] = letters[-1].inverse()
            continue
        if char not in string.ascii_lowercase:
            raise MalformedInputError(f'Unknown symbol "{char}" in word "{text}"')
        letters.append(Generator(string.ascii_lowercase.index(char)))
    return letters


class BaseGroup(ABC):
    """
    Base group backend: normal forms, products and inverses of words.
    """
    alias = ''

    def __init__(self, generator_count: int):
        if not 0 <= generator_count <= MAX_GENERATORS:
            raise MalformedInputError(f'Generator count must be within 0..{MAX_GENERATORS}, got {generator_count}')
        self.generator_count = generator_count

    def check(self, raw: Iterable[Generator]) -> list[Generator]:
        letters = list(raw)
        for letter in letters:
            if not 0 <= letter.index < self.generator_count:
                raise MalformedInputError(f'Generator index {letter.index} out of range 0..{self.generator_count - 1}')
        return letters

    @abstractmethod
    def reduce(self, raw: Sequence[Generator]) -> GroupWord:
        pass

    def multiply(self, u: GroupWord, v: GroupWord) -> GroupWord:
        return self.reduce(u.letters + v.letters)

    def invert(self, w: GroupWord) -> GroupWord:
        return self.reduce(tuple(letter.inverse() for letter in reversed(w.letters)))

    def product(self, words: Iterable[GroupWord]) -> GroupWord:
        result = EPSILON
        for word in words:
            result = self.multiply(result, word)
        return result

    def canonical(self, w: GroupWord) -> GroupWord:
        """ Label up to reading direction: the smaller of w and w⁻¹ """
        return min(w, self.invert(w))

    def parse(self, text: str) -> GroupWord:
        return self.reduce(parse_letters(text))

    @staticmethod
    def format(w: GroupWord) -> str:
        return str(w)

    @abstractmethod
    def to_document(self) -> dict:
        pass

    def __eq__(self, other):
        return type(self) is type(other) and self.to_document() == other.to_document()

    def __hash__(self):
        return hash((self.alias, self.generator_count))


class FreeGroup(BaseGroup):
    """
    Free group on `generator_count` letters; normal form = freely reduced word.
    """
    alias = 'free'

    def reduce(self, raw: Sequence[Generator]) -> GroupWord:
        stack: list[Generator] = []
        for letter in self.check(raw):
            if stack and stack[-1] == letter.inverse():
                stack.pop()
            else:
                stack.append(letter)
        return GroupWord(tuple(stack))

    def to_document(self) -> dict:
        return {'backend': self.alias, 'count': self.generator_count}


class FiniteGroup(BaseGroup):
    """
    Finite group given by a multiplication table over elements 0..m-1 and the
    element each generator maps to. Normal form is the shortlex-minimal word.
    """
    alias = 'finite'

    def __init__(self, table: Sequence[Sequence[int]], images: Sequence[int]):
        BaseGroup.__init__(self, len(images))
        self.table = tuple(tuple(int(cell) for cell in row) for row in table)
        self.images = tuple(int(image) for image in images)
        order = len(self.table)
        if order == 0 or any(len(row) != order for row in self.table):
            raise MalformedInputError('Multiplication table must be a non-empty square')
        if any(not 0 <= cell < order for row in self.table for cell in row):
            raise MalformedInputError('Multiplication table refers to unknown elements')
        if any(not 0 <= image < order for image in self.images):
            raise MalformedInputError('Generator image refers to unknown element')
        self.identity = self._find_identity()
        self.inverses = self._find_inverses()
        self.normal_forms = self._shortlex_forms()

    def _find_identity(self) -> int:
        order = len(self.table)
        for candidate in range(order):
            if all(self.table[candidate][x] == x and self.table[x][candidate] == x for x in range(order)):
                return candidate
        raise MalformedInputError('Multiplication table has no identity element')

    def _find_inverses(self) -> tuple[int, ...]:
        order = len(self.table)
        inverses = []
        for x in range(order):
            found = [y for y in range(order) if self.table[x][y] == self.identity]
            if not found:
                raise MalformedInputError(f'Element {x} has no inverse')
            inverses.append(found[0])
        return tuple(inverses)

    def _letter_element(self, letter: Generator) -> int:
        image = self.images[letter.index]
        return self.inverses[image] if letter.inverted else image

    def _shortlex_forms(self) -> dict[int, GroupWord]:
        alphabet = sorted(Generator(index, inverted)
                          for index in range(self.generator_count) for inverted in (False, True))
        forms = {self.identity: EPSILON}
        queue = deque([self.identity])
        while queue:
            element = queue.popleft()
            for letter in alphabet:
                target = self.table[element][self._letter_element(letter)]
                if target not in forms:
                    forms[target] = GroupWord(forms[element].letters + (letter,))
                    queue.append(target)
        return forms

    def evaluate(self, raw: Sequence[Generator]) -> int:
        element = self.identity
        for letter in self.check(raw):
            element = self.table[element][self._letter_element(letter)]
        return element

    def reduce(self, raw: Sequence[Generator]) -> GroupWord:
        return self.normal_forms[self.evaluate(raw)]

    def to_document(self) -> dict:
        return {
            'backend': self.alias,
            'count': self.generator_count,
            'table': [list(row) for row in self.table],
            'images': list(self.images),
        }


class GroupRegistry:
    """
    Registered group backends.
    """
    @staticmethod
    def get_backend(alias: str):
        available = GroupRegistry.get_available_backends()
        return available.get(alias, None)

    @staticmethod
    def get_available_backends() -> dict:
        return {
            'free':    FreeGroup,
            'finite':  FiniteGroup,
        }

    @staticmethod
    def get_available_backends_list() -> list:
        return list(GroupRegistry.get_available_backends().keys())

    @staticmethod
    def from_document(document) -> BaseGroup:
        if isinstance(document, int):
            return FreeGroup(document)
        if not isinstance(document, dict):
            raise MalformedInputError('`generators` must be an integer or an object')
        alias = document.get('backend', 'free')
        backend = GroupRegistry.get_backend(alias)
        if backend is None:
            raise UnknownBackendError(f'Unknown group backend `{alias}`')
        try:
            if backend is FiniteGroup:
                return FiniteGroup(document['table'], document['images'])
            return FreeGroup(int(document['count']))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f'Malformed `generators` section: {exc}') from exc
