"""Finite linearly ordered relational structures and uniform hypergraphs.

Universes are always ``{1..n}`` ordered by the natural order of integers;
the order relation is implicit and never stored as a relation.  An
embedding is a tuple ``f`` with ``f[i - 1]`` the image of vertex ``i``.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from functools import cmp_to_key, lru_cache
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    KindMismatch,
    NotAbsolutelyOrdered,
    SignatureMismatch,
    SizeLimitExceeded,
    UnknownSymbol,
)

Embedding = tuple[int, ...]
Tuple_ = tuple[int, ...]

DEFAULT_EMBEDDING_CAP = 1_000_000
DEFAULT_TARGET_CAP = 1 << 12


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise SignatureMismatch(f"repeated relation names in {names}")
        for name, arity in self.symbols:
            if not isinstance(arity, int) or arity < 1:
                raise SignatureMismatch(f"relation {name!r} has non-positive arity {arity!r}")

    @classmethod
    def of(cls, *symbols: tuple[str, int]) -> "Signature":
        return cls(tuple((str(n), int(a)) for n, a in symbols))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    def arity(self, name: str) -> int:
        for n, a in self.symbols:
            if n == name:
                return a
        raise UnknownSymbol(name)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)


@dataclass(frozen=True)
class OrderedStructure:
    """A finite structure on ``{1..size}`` with relations aligned to ``signature``."""

    signature: Signature
    size: int
    relations: tuple[frozenset[Tuple_], ...]

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("size must be non-negative")
        if len(self.relations) != len(self.signature):
            raise SignatureMismatch("one relation per signature symbol is required")
        for (name, arity), rel in zip(self.signature, self.relations):
            for t in rel:
                if len(t) != arity:
                    raise SignatureMismatch(f"tuple {t} has wrong arity for {name}/{arity}")
                if any(not 1 <= x <= self.size for x in t):
                    raise ValueError(f"tuple {t} of {name} leaves the universe 1..{self.size}")

    @classmethod
    def build(cls, signature: Signature, size: int, relations: Mapping[str, Iterable[Sequence[int]]] | None = None):
        relations = dict(relations or {})
        unknown = set(relations) - set(signature.names)
        if unknown:
            raise UnknownSymbol(", ".join(sorted(unknown)))
        rels = tuple(frozenset(tuple(int(x) for x in t) for t in relations.get(name, ())) for name in signature.names)
        return cls(signature, size, rels)

    def rel(self, name: str) -> frozenset[Tuple_]:
        for n, r in zip(self.signature.names, self.relations):
            if n == name:
                return r
        raise UnknownSymbol(name)

    def relation_map(self) -> dict[str, frozenset[Tuple_]]:
        return dict(zip(self.signature.names, self.relations))


@dataclass(frozen=True)
class Hypergraph:
    """A linearly ordered b-uniform hypergraph on ``{1..size}``; edges are sorted tuples."""

    b: int
    size: int
    edges: frozenset[Tuple_]

    def __post_init__(self):
        if self.b < 2:
            raise ValueError(f"uniformity must be at least 2, got {self.b}")
        for e in self.edges:
            if len(e) != self.b or len(set(e)) != self.b or tuple(sorted(e)) != e:
                raise ValueError(f"edge {e} is not a sorted {self.b}-set")
            if not (1 <= e[0] and e[-1] <= self.size):
                raise ValueError(f"edge {e} leaves the vertex set 1..{self.size}")

    @classmethod
    def build(cls, b: int, size: int, edges: Iterable[Iterable[int]] = ()) -> "Hypergraph":
        return cls(b, size, frozenset(tuple(sorted(int(x) for x in e)) for e in edges))


Structure = Union[OrderedStructure, Hypergraph]


def chain(n: int) -> OrderedStructure:
    """The bare n-element chain (empty signature)."""
    return OrderedStructure(Signature(()), n, ())


# embeddings ---------------------------------------------------------------

def _check_same_kind(A: Structure, B: Structure) -> None:
    if type(A) is not type(B):
        raise KindMismatch(f"cannot map a {type(A).__name__} into a {type(B).__name__}")
    if isinstance(A, Hypergraph):
        if A.b != B.b:
            raise SignatureMismatch(f"uniformity {A.b} vs {B.b}")
    elif A.signature != B.signature:
        raise SignatureMismatch("signatures differ")


def _image(f: Sequence[int], t: Sequence[int]) -> Tuple_:
    return tuple(f[x - 1] for x in t)


def is_embedding(A: Structure, B: Structure, f: Sequence[int]) -> bool:
    """True iff ``f`` is strictly increasing and preserves and reflects every relation."""
    _check_same_kind(A, B)
    f = tuple(f)
    if len(f) != A.size or any(not 1 <= y <= B.size for y in f):
        return False
    if any(f[i] >= f[i + 1] for i in range(len(f) - 1)):
        return False
    if isinstance(A, Hypergraph):
        for e in itertools.combinations(range(1, A.size + 1), A.b):
            if (e in A.edges) != (_image(f, e) in B.edges):
                return False
        return True
    for (_, arity), ra, rb in zip(A.signature, A.relations, B.relations):
        for t in itertools.product(range(1, A.size + 1), repeat=arity):
            if (t in ra) != (_image(f, t) in rb):
                return False
    return True


def _local_checks(A: Structure, B: Structure, i: int):
    """Relation checks that become decidable once vertices 1..i are mapped.

    Returns ``(tuple, source_relation, target_relation)`` triples for tuples
    over ``{1..i}`` that contain ``i``.
    """
    checks = []
    if isinstance(A, Hypergraph):
        for rest in itertools.combinations(range(1, i), A.b - 1):
            checks.append((rest + (i,), A.edges, B.edges))
        return checks
    for (_, arity), ra, rb in zip(A.signature, A.relations, B.relations):
        for t in itertools.product(range(1, i + 1), repeat=arity):
            if i in t:
                checks.append((t, ra, rb))
    return checks


def iter_embeddings(A: Structure, B: Structure):
    """Yield embeddings A -> B in lexicographic order of their image tuples."""
    _check_same_kind(A, B)
    n, N = A.size, B.size
    if n > N:
        return
    checks = [None] + [_local_checks(A, B, i) for i in range(1, n + 1)]
    f: list[int] = []

    def extend(lo: int):
        i = len(f) + 1
        if i > n:
            yield tuple(f)
            return
        # leave room for the remaining n - i vertices
        for y in range(lo, N - (n - i) + 1):
            f.append(y)
            if all((t in ra) == (_image(f, t) in rb) for t, ra, rb in checks[i]):
                yield from extend(y + 1)
            f.pop()

    yield from extend(1)


def enumerate_embeddings(A: Structure, B: Structure, cap: int = DEFAULT_EMBEDDING_CAP) -> list[Embedding]:
    out = []
    for f in iter_embeddings(A, B):
        out.append(f)
        if len(out) > cap:
            raise SizeLimitExceeded("embedding set", cap)
    return out


def compose_maps(g: Sequence[int], f: Sequence[int]) -> Embedding:
    """g after f for maps written as image tuples."""
    return tuple(g[x - 1] for x in f)


def induced(A: Structure, vertices: Sequence[int]) -> Structure:
    """Substructure induced on ``vertices``, relabelled to ``1..len(vertices)``."""
    vertices = sorted(set(vertices))
    index = {v: i for i, v in enumerate(vertices, 1)}
    if isinstance(A, Hypergraph):
        edges = [tuple(index[x] for x in e) for e in A.edges if all(x in index for x in e)]
        return Hypergraph.build(A.b, len(vertices), edges)
    rels = tuple(
        frozenset(tuple(index[x] for x in t) for t in r if all(x in index for x in t))
        for r in A.relations
    )
    return OrderedStructure(A.signature, len(vertices), rels)


# power-set orders ----------------------------------------------------------

class SetOrder(enum.Enum):
    LEX = "lex"
    ALEX = "alex"
    COLEX = "colex"


def _min_in(L: Sequence, X: frozenset, position: Mapping) -> object:
    # empty set convention: min of nothing is the top element
    if not X:
        return L[-1]
    return min(X, key=position.__getitem__)


def _max_in(L: Sequence, X: frozenset, position: Mapping) -> object:
    # empty set convention: max of nothing is the bottom element
    if not X:
        return L[0]
    return max(X, key=position.__getitem__)


def compare_sets(L: Sequence, A: Iterable, B: Iterable, order: SetOrder) -> int:
    """Compare subsets of the ordered ground set ``L``; returns -1, 0 or 1."""
    A, B = frozenset(A), frozenset(B)
    position = {x: i for i, x in enumerate(L)}
    if not (A <= position.keys() and B <= position.keys()):
        raise ValueError("sets must be subsets of the ground set")
    if A == B:
        return 0
    if order is SetOrder.COLEX:
        if A > B:
            return -1
        if A < B:
            return 1
        a = position[_min_in(L, A - B, position)]
        b = position[_min_in(L, B - A, position)]
        return -1 if a < b else 1
    if A < B:
        return -1
    if A > B:
        return 1
    if order is SetOrder.LEX:
        a = position[_min_in(L, B - A, position)]
        b = position[_min_in(L, A - B, position)]
        return -1 if a < b else 1
    a = position[_max_in(L, A - B, position)]
    b = position[_max_in(L, B - A, position)]
    return -1 if a < b else 1


def sort_sets(L: Sequence, sets: Iterable[Iterable], order: SetOrder) -> list[frozenset]:
    return sorted((frozenset(s) for s in sets), key=cmp_to_key(lambda a, b: compare_sets(L, a, b, order)))


# downsets and the GR target hypergraphs ------------------------------------

def downsets(H: Hypergraph) -> list[frozenset[int]]:
    """Singletons plus all subsets of size >= 2 of some edge, in Alex order."""
    found = {frozenset([a]) for a in range(1, H.size + 1)}
    for e in H.edges:
        for r in range(2, len(e) + 1):
            found.update(frozenset(c) for c in itertools.combinations(e, r))
    return sort_sets(range(1, H.size + 1), found, SetOrder.ALEX)


@lru_cache(maxsize=32)
def colex_subsets(n: int) -> tuple[frozenset[int], ...]:
    """All subsets of {1..n} in CoLex order; position i holds the vertex i + 1 of G(n)."""
    ground = range(1, n + 1)
    subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(ground, r)]
    return tuple(sort_sets(ground, subsets, SetOrder.COLEX))


@lru_cache(maxsize=32)
def colex_rank(n: int) -> dict[frozenset[int], int]:
    return {s: i for i, s in enumerate(colex_subsets(n), 1)}


@lru_cache(maxsize=16)
def gr_target_hypergraph(n: int, b: int, cap: int = DEFAULT_TARGET_CAP) -> Hypergraph:
    """Subsets of {1..n} as vertices (CoLex-ranked); b of them form an edge iff they share a point."""
    if n < 1:
        raise ValueError("n must be positive")
    if 2 ** n > cap:
        raise SizeLimitExceeded(f"G({n}) vertex set", cap)
    subsets = colex_subsets(n)
    edges = []
    for combo in itertools.combinations(range(1, len(subsets) + 1), b):
        if frozenset.intersection(*(subsets[i - 1] for i in combo)):
            edges.append(combo)
    return Hypergraph(b, len(subsets), frozenset(edges))


# single-relation bridge ----------------------------------------------------

def is_absolutely_ordered(A: OrderedStructure) -> bool:
    return all(all(t[i] < t[i + 1] for i in range(len(t) - 1)) for r in A.relations for t in r)


def hypergraph_to_structure(H: Hypergraph, name: str = "R") -> OrderedStructure:
    return OrderedStructure(Signature(((name, H.b),)), H.size, (frozenset(H.edges),))


def structure_to_hypergraph(A: OrderedStructure) -> Hypergraph:
    if len(A.signature) != 1:
        raise SignatureMismatch("exactly one relation symbol is required")
    if not is_absolutely_ordered(A):
        raise NotAbsolutelyOrdered("relation tuples must be strictly increasing")
    (_, arity), = A.signature.symbols
    return Hypergraph(arity, A.size, A.relations[0])


def reduct(A: OrderedStructure, sigma: Signature | Iterable[str]) -> OrderedStructure:
    names = sigma.names if isinstance(sigma, Signature) else tuple(sigma)
    rels = A.relation_map()
    for name in names:
        if name not in rels:
            raise UnknownSymbol(name)
    sub = Signature(tuple((n, A.signature.arity(n)) for n in names))
    return OrderedStructure(sub, A.size, tuple(rels[n] for n in names))


# JSON ---------------------------------------------------------------------

def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _sorted_tuples(rel: Iterable[Tuple_]) -> list[list[int]]:
    return [list(t) for t in sorted(rel)]


def structure_to_json(A: Structure) -> dict:
    if isinstance(A, Hypergraph):
        return {"kind": "hypergraph", "b": A.b, "size": A.size, "edges": _sorted_tuples(A.edges)}
    return {
        "kind": "rel",
        "signature": [[name, arity] for name, arity in A.signature],
        "size": A.size,
        "relations": {name: _sorted_tuples(r) for name, r in zip(A.signature.names, A.relations)},
    }


def structure_from_json(obj: Mapping) -> Structure:
    """Parse the JSON structure format.

    An optional ``"universe"`` list gives arbitrary vertex labels in
    increasing order; they are relabelled to ``1..n`` on ingestion.
    """
    kind = obj.get("kind")
    size = obj.get("size")
    labels = obj.get("universe")
    if labels is not None:
        if size is not None and size != len(labels):
            raise ValueError("size disagrees with the universe list")
        size = len(labels)
        if len(set(map(canonical_dumps, labels))) != size:
            raise ValueError("universe labels must be distinct")
        index = {canonical_dumps(x): i for i, x in enumerate(labels, 1)}

        def relabel(t):
            return [index[canonical_dumps(x)] for x in t]
    else:
        def relabel(t):
            return [int(x) for x in t]
    if not isinstance(size, int) or isinstance(size, bool):
        raise ValueError("structure needs an integer size")
    if kind == "hypergraph":
        return Hypergraph.build(int(obj["b"]), size, (relabel(e) for e in obj.get("edges", [])))
    if kind == "rel":
        sig = Signature.of(*((n, a) for n, a in obj.get("signature", [])))
        rels = {name: [relabel(t) for t in ts] for name, ts in obj.get("relations", {}).items()}
        return OrderedStructure.build(sig, size, rels)
    if kind == "chain":
        return chain(size)
    raise KindMismatch(f"unknown structure kind {kind!r}")
