"""Parameter words and the Graham-Rothschild category GR(A, X).

An m-parameter word of length n over a finite alphabet A is a word over
A together with the variables x1..xm in which every variable occurs and
the first occurrences of the variables appear in index order.

Inside a :class:`ParamWord` alphabet letters are kept as ``str`` tokens and
variables as positive ``int`` indices, so ``x1 0 x1 x2`` over ``{0}`` is
stored as ``(1, "0", 1, 2)``. Positions are 1-indexed in every public
function that talks about positions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    ArityMismatch,
    FirstOccurrenceOrder,
    ForeignSymbol,
    MissingVariable,
    SizeLimitExceeded,
)

Symbol = Union[str, int]

DEFAULT_WORD_CAP = 1_000_000

_VAR_TOKEN = re.compile(r"x([1-9][0-9]*)\Z")


def _check_alphabet(alphabet: Sequence[str]) -> tuple[str, ...]:
    alphabet = tuple(str(a) for a in alphabet)
    if len(set(alphabet)) != len(alphabet):
        raise ValueError(f"alphabet has repeated letters: {alphabet}")
    for a in alphabet:
        if _VAR_TOKEN.match(a) or not a or any(c.isspace() for c in a):
            raise ForeignSymbol(a)
    return alphabet


@dataclass(frozen=True)
class ParamWord:
    """A validated m-parameter word; build with :func:`validate` or :func:`parse`."""

    alphabet: tuple[str, ...]
    symbols: tuple[Symbol, ...]
    m: int

    @property
    def n(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return " ".join(f"x{s}" if isinstance(s, int) else s for s in self.symbols)

    def __repr__(self) -> str:
        return f"ParamWord({str(self)!r}, m={self.m})"

    def sort_key(self) -> tuple[int, ...]:
        """Rank tuple: alphabet letters first in alphabet order, then x1, x2, ..."""
        size = len(self.alphabet)
        index = {a: r for r, a in enumerate(self.alphabet)}
        return tuple(size + s - 1 if isinstance(s, int) else index[s] for s in self.symbols)

    def preimage(self, symbol: Symbol) -> frozenset[int]:
        """1-indexed positions holding ``symbol``."""
        return frozenset(p for p, s in enumerate(self.symbols, 1) if s == symbol)


def _normalize_symbol(token, alphabet: tuple[str, ...]) -> Symbol:
    if isinstance(token, bool):
        raise ForeignSymbol(token)
    if isinstance(token, int):
        if token < 1:
            raise ForeignSymbol(token)
        return token
    token = str(token)
    if token in alphabet:
        return token
    match = _VAR_TOKEN.match(token)
    if match:
        return int(match.group(1))
    raise ForeignSymbol(token)


def validate(alphabet: Sequence[str], n: int, m: int, symbols: Iterable) -> ParamWord:
    """Check both parameter-word clauses and return the word.

    ``symbols`` may mix alphabet tokens, ``"x<i>"`` strings and bare ints.
    Raises :class:`MissingVariable`, :class:`FirstOccurrenceOrder` or
    :class:`ForeignSymbol` naming the violated clause.
    """
    alphabet = _check_alphabet(alphabet)
    syms = tuple(_normalize_symbol(s, alphabet) for s in symbols)
    if n < 1 or len(syms) != n:
        raise ValueError(f"expected a word of length {n}, got {len(syms)} symbols")
    if m < 0 or m > n:
        raise ValueError(f"parameter count {m} out of range for length {n}")
    first: dict[int, int] = {}
    for p, s in enumerate(syms, 1):
        if isinstance(s, int):
            if s > m:
                raise ForeignSymbol(f"x{s}")
            first.setdefault(s, p)
    for i in range(1, m + 1):
        if i not in first:
            raise MissingVariable(i)
    for i in range(1, m):
        if first[i] > first[i + 1]:
            raise FirstOccurrenceOrder(i, i + 1)
    return ParamWord(alphabet, syms, m)


def parse(text: str, alphabet: Sequence[str] = ("0",), m: int | None = None) -> ParamWord:
    """Parse the whitespace-separated text form, e.g. ``"x1 0 x1 x2"``.

    When ``m`` is omitted it is taken to be the largest variable index.
    """
    alphabet = _check_alphabet(alphabet)
    tokens = text.split()
    syms = [_normalize_symbol(t, alphabet) for t in tokens]
    if m is None:
        m = max((s for s in syms if isinstance(s, int)), default=0)
    return validate(alphabet, len(syms), m, syms)


def identity(n: int, alphabet: Sequence[str] = ("0",)) -> ParamWord:
    """The identity morphism x1 x2 ... xn of the object n."""
    return ParamWord(_check_alphabet(alphabet), tuple(range(1, n + 1)), n)


def substitute(u: ParamWord, v: ParamWord) -> ParamWord:
    """Simultaneously replace each x_i in ``u`` by the i-th symbol of ``v``.

    This is composition in GR: for u in W^n_m and v in W^m_k the result
    lies in W^n_k.
    """
    if u.alphabet != v.alphabet:
        raise ArityMismatch(f"alphabets differ: {u.alphabet} vs {v.alphabet}")
    if u.m != v.n:
        raise ArityMismatch(f"cannot substitute a word of length {v.n} into {u.m} variables")
    vs = v.symbols
    syms = tuple(vs[s - 1] if isinstance(s, int) else s for s in u.symbols)
    word = ParamWord(u.alphabet, syms, v.m)
    # first occurrences stay ordered automatically; keep that honest
    assert validate(word.alphabet, word.n, word.m, word.symbols) == word
    return word


def variable_blocks(w: ParamWord) -> list[frozenset[int]]:
    """Position sets X_1..X_m of the variables, 1-indexed."""
    blocks: list[set[int]] = [set() for _ in range(w.m)]
    for p, s in enumerate(w.symbols, 1):
        if isinstance(s, int):
            blocks[s - 1].add(p)
    return [frozenset(b) for b in blocks]


def iter_words(alphabet: Sequence[str], n: int, m: int) -> Iterator[ParamWord]:
    """Yield W^n_m(alphabet) in canonical (rank-lexicographic) order."""
    alphabet = _check_alphabet(alphabet)
    if n < 1 or m < 0 or m > n:
        return
    word: list[Symbol] = []

    def extend(used: int) -> Iterator[ParamWord]:
        pos = len(word)
        if pos == n:
            if used == m:
                yield ParamWord(alphabet, tuple(word), m)
            return
        remaining = n - pos
        # every still-unused variable needs its own position
        if remaining > m - used:
            for a in alphabet:
                word.append(a)
                yield from extend(used)
                word.pop()
            for i in range(1, used + 1):
                word.append(i)
                yield from extend(used)
                word.pop()
        if used < m:
            word.append(used + 1)
            yield from extend(used + 1)
            word.pop()

    yield from extend(0)


def enumerate_words(alphabet: Sequence[str], n: int, m: int, cap: int = DEFAULT_WORD_CAP) -> list[ParamWord]:
    words = []
    for w in iter_words(alphabet, n, m):
        words.append(w)
        if len(words) > cap:
            raise SizeLimitExceeded(f"W^{n}_{m}", cap)
    return words
