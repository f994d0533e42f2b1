"""Tuple types, matrices and the dagger/star encoding of ordered structures.

A relation of arity r is split by the order type of its tuples: each
tuple becomes its strictly increasing list of distinct entries (its
matrix) filed under a new symbol ``(R, type)``.  The result is always
absolutely ordered and the encoding is invertible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from ..errors import (
    ClassCountMismatch,
    NotAbsolutelyOrdered,
    NotStrictlyIncreasing,
    SignatureMismatch,
)
from ..ordstruct import OrderedStructure, Signature, is_absolutely_ordered


@dataclass(frozen=True)
class TotalQuasiorder:
    """A total quasiorder on ``{1..r}`` given by its set of pairs ``(i, j)``."""

    r: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        idx = range(1, self.r + 1)
        pairs = self.pairs
        if any(not (1 <= i <= self.r and 1 <= j <= self.r) for i, j in pairs):
            raise ValueError("pair outside the index set")
        if any((i, i) not in pairs for i in idx):
            raise ValueError("not reflexive")
        if any((i, j) not in pairs and (j, i) not in pairs for i in idx for j in idx):
            raise ValueError("not total")
        for i, j in pairs:
            for l in idx:
                if (j, l) in pairs and (i, l) not in pairs:
                    raise ValueError("not transitive")

    @classmethod
    def from_ranks(cls, ranks: Sequence[int]) -> "TotalQuasiorder":
        r = len(ranks)
        return cls(r, frozenset((i, j) for i in range(1, r + 1) for j in range(1, r + 1) if ranks[i - 1] <= ranks[j - 1]))

    def equivalent(self, i: int, j: int) -> bool:
        return (i, j) in self.pairs and (j, i) in self.pairs

    @property
    def ranks(self) -> tuple[int, ...]:
        """Class index (1-based, in increasing class order) of every position."""
        # the number of strictly smaller classes, counted through representatives
        out = []
        for i in range(1, self.r + 1):
            below = {self._class_of(j) for j in range(1, self.r + 1) if (j, i) in self.pairs and (i, j) not in self.pairs}
            out.append(len(below) + 1)
        return tuple(out)

    def _class_of(self, i: int) -> frozenset[int]:
        return frozenset(j for j in range(1, self.r + 1) if self.equivalent(i, j))

    def classes(self) -> list[frozenset[int]]:
        """Equivalence classes listed in increasing order."""
        ranks = self.ranks
        return [frozenset(i for i in range(1, self.r + 1) if ranks[i - 1] == c) for c in range(1, max(ranks, default=0) + 1)]

    @property
    def class_count(self) -> int:
        return max(self.ranks, default=0)

    def label(self) -> str:
        return ".".join(map(str, self.ranks))


def tp(a: Sequence) -> TotalQuasiorder:
    if not a:
        raise ValueError("the type of an empty tuple is undefined")
    r = len(a)
    return TotalQuasiorder(r, frozenset((i, j) for i in range(1, r + 1) for j in range(1, r + 1) if a[i - 1] <= a[j - 1]))


def mat(a: Sequence) -> tuple:
    if not a:
        raise ValueError("the matrix of an empty tuple is undefined")
    sigma = tp(a)
    # one representative per class, classes in increasing order
    return tuple(a[min(cls) - 1] for cls in sigma.classes())


def tup(sigma: TotalQuasiorder, b: Sequence) -> tuple:
    b = tuple(b)
    if len(b) != sigma.class_count:
        raise ClassCountMismatch(f"{sigma.class_count} classes but {len(b)} values")
    if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
        raise NotStrictlyIncreasing(f"{b} is not strictly increasing")
    return tuple(b[rank - 1] for rank in sigma.ranks)


@lru_cache(maxsize=None)
def all_quasiorders(r: int) -> tuple[TotalQuasiorder, ...]:
    """Every total quasiorder on ``{1..r}``, ordered by rank vector."""
    out = []
    for ranks in itertools.product(range(1, r + 1), repeat=r):
        if set(ranks) == set(range(1, max(ranks) + 1)):
            out.append(TotalQuasiorder.from_ranks(ranks))
    return tuple(out)


def x_symbol(name: str, sigma: TotalQuasiorder) -> str:
    return f"{name}@{sigma.label()}"


def parse_x_symbol(symbol: str) -> tuple[str, TotalQuasiorder]:
    name, sep, label = symbol.rpartition("@")
    if not sep:
        raise SignatureMismatch(f"{symbol!r} is not a typed symbol")
    return name, TotalQuasiorder.from_ranks(tuple(int(x) for x in label.split(".")))


def x_signature(theta: Signature) -> Signature:
    """The typed language: one symbol per relation and order type of its arguments."""
    symbols = []
    for name, arity in theta:
        for sigma in all_quasiorders(arity):
            symbols.append((x_symbol(name, sigma), sigma.class_count))
    return Signature(tuple(symbols))


def theta_from_x_signature(sig: Signature) -> Signature:
    """Recover the base language from a typed one, checking it is complete."""
    seen: dict[str, int] = {}
    for symbol, arity in sig:
        name, sigma = parse_x_symbol(symbol)
        if sigma.class_count != arity:
            raise SignatureMismatch(f"{symbol} has arity {arity}, expected {sigma.class_count}")
        if seen.setdefault(name, sigma.r) != sigma.r:
            raise SignatureMismatch(f"inconsistent arities for {name}")
    theta = Signature(tuple(seen.items()))
    if x_signature(theta) != sig:
        raise SignatureMismatch("signature is not the full typed language of its base relations")
    return theta


def dagger(A: OrderedStructure) -> OrderedStructure:
    sig = x_signature(A.signature)
    buckets: dict[str, set] = {name: set() for name in sig.names}
    for name, rel in zip(A.signature.names, A.relations):
        for a in rel:
            buckets[x_symbol(name, tp(a))].add(mat(a))
    return OrderedStructure(sig, A.size, tuple(frozenset(buckets[n]) for n in sig.names))


def star(B: OrderedStructure, theta: Signature | None = None) -> OrderedStructure:
    if theta is None:
        theta = theta_from_x_signature(B.signature)
    elif B.signature != x_signature(theta):
        raise SignatureMismatch("structure is not over the typed language of the given relations")
    if not is_absolutely_ordered(B):
        raise NotAbsolutelyOrdered("star needs an absolutely ordered structure")
    out: dict[str, set] = {name: set() for name in theta.names}
    for symbol, rel in zip(B.signature.names, B.relations):
        name, sigma = parse_x_symbol(symbol)
        out[name].update(tup(sigma, a) for a in rel)
    return OrderedStructure(theta, B.size, tuple(frozenset(out[n]) for n in theta.names))
