"""Finite categories with enumerable hom-sets and the Ramsey arrow verifier.

Every category here exposes ``hom(A, B)`` as a duplicate-free list in a
canonical order, ``compose(g, f)`` (g after f) and ``identity(A)``.  The
arrow ``C -> (B)^A_k`` is decided by searching for a bad coloring of
``hom(A, C)``: a k-coloring under which no copy ``w . hom(A, B)`` with
``w`` in ``hom(B, C)`` is monochromatic.
"""

from __future__ import annotations

import enum
import itertools
import sys
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from . import paramwords as pw
from .config import DEFAULT_CONFIG, MAX_COLORS, MIN_COLORS, RunConfig
from .errors import (
    ArityMismatch,
    BudgetExceeded,
    DomainMismatch,
    Exhausted,
    KindMismatch,
    SizeLimitExceeded,
)
from .ordstruct import (
    Hypergraph,
    OrderedStructure,
    Signature,
    compose_maps,
    enumerate_embeddings,
    is_absolutely_ordered,
    structure_from_json,
    structure_to_json,
)

DEFAULT_HOM_CAP = 1_000_000


class Category:
    """Base class; subclasses provide ``_hom``, ``compose`` and ``identity``."""

    kind = "abstract"

    def __init__(self, cap: int = DEFAULT_HOM_CAP):
        self.cap = cap
        self._hom_cache: dict = {}

    def is_object(self, a) -> bool:
        return True

    def hom(self, a, b) -> list:
        key = (a, b)
        if key not in self._hom_cache:
            homs = sorted(self._hom(a, b), key=self.key)
            if len(homs) > self.cap:
                raise SizeLimitExceeded(f"hom-set of {self.kind}", self.cap)
            self._hom_cache[key] = homs
        return list(self._hom_cache[key])

    def _hom(self, a, b) -> list:
        raise NotImplementedError

    def compose(self, g, f):
        raise NotImplementedError

    def identity(self, a):
        raise NotImplementedError

    def key(self, f):
        """Canonical serialization used to order hom-sets."""
        return f

    # JSON round trips used by certificates and the CLI
    def to_json(self) -> dict:
        raise NotImplementedError

    def object_to_json(self, a):
        raise NotImplementedError

    def object_from_json(self, obj):
        raise NotImplementedError

    def morphism_to_json(self, f):
        return list(f)

    def morphism_from_json(self, obj):
        return tuple(int(x) for x in obj)


def _compose_maps_checked(g: Sequence[int], f: Sequence[int]):
    if f and max(f) > len(g):
        raise DomainMismatch(f"map {tuple(f)} lands outside the domain of {tuple(g)}")
    return compose_maps(g, f)


class ChainCategory(Category):
    """Finite chains 0, 1, 2, ... with strictly increasing maps."""

    kind = "chain"

    def is_object(self, a) -> bool:
        return isinstance(a, int) and not isinstance(a, bool) and a >= 0

    def _hom(self, a, b):
        return list(itertools.combinations(range(1, b + 1), a))

    def compose(self, g, f):
        return _compose_maps_checked(g, f)

    def identity(self, a):
        return tuple(range(1, a + 1))

    def to_json(self):
        return {"kind": "chain"}

    def object_to_json(self, a):
        return {"kind": "chain", "size": a}

    def object_from_json(self, obj):
        if obj.get("kind") != "chain":
            raise KindMismatch(f"expected a chain, got {obj.get('kind')!r}")
        return int(obj["size"])


class GRCategory(Category):
    """Graham-Rothschild category: objects are positive integers, hom(k, n) = W^n_k."""

    kind = "gr"

    def __init__(self, alphabet: Sequence[str] = ("0",), cap: int = DEFAULT_HOM_CAP):
        super().__init__(cap)
        self.alphabet = tuple(str(a) for a in alphabet)

    def is_object(self, a) -> bool:
        return isinstance(a, int) and not isinstance(a, bool) and a >= 1

    def _hom(self, k, n):
        if k > n:
            return []
        return pw.enumerate_words(self.alphabet, n, k, cap=self.cap)

    def compose(self, g, f):
        try:
            return pw.substitute(g, f)
        except ArityMismatch as exc:
            raise DomainMismatch(str(exc)) from None

    def identity(self, a):
        return pw.identity(a, self.alphabet)

    def key(self, f):
        return f.sort_key()

    def to_json(self):
        return {"kind": "gr", "alphabet": list(self.alphabet)}

    def object_to_json(self, a):
        return {"kind": "gr", "size": a}

    def object_from_json(self, obj):
        if obj.get("kind") != "gr":
            raise KindMismatch(f"expected a GR object, got {obj.get('kind')!r}")
        return int(obj["size"])

    def morphism_to_json(self, f):
        return str(f)

    def morphism_from_json(self, obj):
        return pw.parse(obj, self.alphabet)


class HypergraphCategory(Category):
    """H(b): finite linearly ordered b-uniform hypergraphs with embeddings."""

    kind = "hypergraph"

    def __init__(self, b: int, cap: int = DEFAULT_HOM_CAP):
        super().__init__(cap)
        if b < 2:
            raise ValueError("uniformity must be at least 2")
        self.b = b

    def is_object(self, a) -> bool:
        return isinstance(a, Hypergraph) and a.b == self.b

    def _hom(self, a, b):
        return enumerate_embeddings(a, b, cap=self.cap)

    def compose(self, g, f):
        return _compose_maps_checked(g, f)

    def identity(self, a):
        return tuple(range(1, a.size + 1))

    def to_json(self):
        return {"kind": "hypergraph", "b": self.b}

    def object_to_json(self, a):
        return structure_to_json(a)

    def object_from_json(self, obj):
        a = structure_from_json(obj)
        if not self.is_object(a):
            raise KindMismatch("not an object of this hypergraph category")
        return a


class RelCategory(Category):
    """Rel(signature, <), or its absolutely ordered part when ``absolute`` is set."""

    kind = "rel"

    def __init__(self, signature: Signature, absolute: bool = False, cap: int = DEFAULT_HOM_CAP):
        super().__init__(cap)
        self.signature = signature
        self.absolute = absolute

    def is_object(self, a) -> bool:
        return (
            isinstance(a, OrderedStructure)
            and a.signature == self.signature
            and (not self.absolute or is_absolutely_ordered(a))
        )

    def _hom(self, a, b):
        return enumerate_embeddings(a, b, cap=self.cap)

    def compose(self, g, f):
        return _compose_maps_checked(g, f)

    def identity(self, a):
        return tuple(range(1, a.size + 1))

    def to_json(self):
        return {
            "kind": "rel",
            "signature": [[n, a] for n, a in self.signature],
            "absolute": self.absolute,
        }

    def object_to_json(self, a):
        return structure_to_json(a)

    def object_from_json(self, obj):
        if obj.get("kind") == "chain" and not self.signature.symbols:
            return structure_from_json(obj)
        a = structure_from_json(obj)
        if not self.is_object(a):
            raise KindMismatch("not an object of this relational category")
        return a


class ProductCategory(Category):
    """Finite product; objects and morphisms are tuples with one entry per factor."""

    kind = "product"

    def __init__(self, factors: Sequence[Category], cap: int = DEFAULT_HOM_CAP):
        super().__init__(cap)
        self.factors = tuple(factors)

    def is_object(self, a) -> bool:
        return (
            isinstance(a, tuple)
            and len(a) == len(self.factors)
            and all(c.is_object(x) for c, x in zip(self.factors, a))
        )

    def _hom(self, a, b):
        return list(itertools.product(*(c.hom(x, y) for c, x, y in zip(self.factors, a, b))))

    def compose(self, g, f):
        if len(g) != len(self.factors) or len(f) != len(self.factors):
            raise DomainMismatch("product morphisms need one component per factor")
        return tuple(c.compose(gi, fi) for c, gi, fi in zip(self.factors, g, f))

    def identity(self, a):
        return tuple(c.identity(x) for c, x in zip(self.factors, a))

    def key(self, f):
        return tuple(c.key(fi) for c, fi in zip(self.factors, f))

    def to_json(self):
        return {"kind": "product", "factors": [c.to_json() for c in self.factors]}

    def object_to_json(self, a):
        return {"kind": "product", "factors": [c.object_to_json(x) for c, x in zip(self.factors, a)]}

    def object_from_json(self, obj):
        if obj.get("kind") != "product" or len(obj["factors"]) != len(self.factors):
            raise KindMismatch("not an object of this product category")
        return tuple(c.object_from_json(x) for c, x in zip(self.factors, obj["factors"]))

    def morphism_to_json(self, f):
        return [c.morphism_to_json(fi) for c, fi in zip(self.factors, f)]

    def morphism_from_json(self, obj):
        return tuple(c.morphism_from_json(x) for c, x in zip(self.factors, obj))


class SubCategory(Category):
    """A (not necessarily full) subcategory cut out by membership predicates."""

    kind = "sub"

    def __init__(
        self,
        parent: Category,
        name: str,
        is_object: Callable[[Any], bool],
        is_morphism: Callable[[Any, Any, Any], bool],
    ):
        super().__init__(parent.cap)
        self.parent = parent
        self.name = name
        self._is_object = is_object
        self._is_morphism = is_morphism

    def is_object(self, a) -> bool:
        return self.parent.is_object(a) and self._is_object(a)

    def _hom(self, a, b):
        return [f for f in self.parent.hom(a, b) if self._is_morphism(a, b, f)]

    def compose(self, g, f):
        return self.parent.compose(g, f)

    def identity(self, a):
        return self.parent.identity(a)

    def key(self, f):
        return self.parent.key(f)

    def object_to_json(self, a):
        return self.parent.object_to_json(a)

    def object_from_json(self, obj):
        return self.parent.object_from_json(obj)

    def morphism_to_json(self, f):
        return self.parent.morphism_to_json(f)

    def morphism_from_json(self, obj):
        return self.parent.morphism_from_json(obj)

    def to_json(self):
        return {"kind": "sub", "name": self.name, "parent": self.parent.to_json()}


def category_from_json(obj: Mapping) -> Category:
    kind = obj.get("kind")
    if kind == "chain":
        return ChainCategory()
    if kind == "gr":
        return GRCategory(tuple(obj.get("alphabet", ["0"])))
    if kind == "hypergraph":
        return HypergraphCategory(int(obj["b"]))
    if kind == "rel":
        sig = Signature.of(*((n, a) for n, a in obj.get("signature", [])))
        return RelCategory(sig, bool(obj.get("absolute", False)))
    if kind == "product":
        return ProductCategory([category_from_json(c) for c in obj["factors"]])
    raise KindMismatch(f"cannot rebuild a category of kind {kind!r}")


def compose(cat: Category, g, f):
    return cat.compose(g, f)


def enumerate_hom(cat: Category, a, b) -> list:
    return cat.hom(a, b)


# category laws --------------------------------------------------------------

@dataclass(frozen=True)
class LawViolation:
    law: str
    detail: str


def check_category_laws(cat: Category, objects: Sequence) -> list[LawViolation]:
    """Exhaustively check identities, closure and associativity on ``objects``."""
    violations = []
    objects = list(objects)
    homs = {(a, b): cat.hom(a, b) for a in objects for b in objects}
    members = {pair: set(hs) for pair, hs in homs.items()}
    for a in objects:
        ida = cat.identity(a)
        if ida not in members[a, a]:
            violations.append(LawViolation("identity", f"id of {a!r} is not in hom({a!r}, {a!r})"))
    for (a, b), hs in homs.items():
        ida, idb = cat.identity(a), cat.identity(b)
        for f in hs:
            if cat.compose(idb, f) != f:
                violations.append(LawViolation("left identity", f"id . {f!r} != {f!r}"))
            if cat.compose(f, ida) != f:
                violations.append(LawViolation("right identity", f"{f!r} . id != {f!r}"))
    for a, b, c in itertools.product(objects, repeat=3):
        for f in homs[a, b]:
            for g in homs[b, c]:
                gf = cat.compose(g, f)
                if gf not in members[a, c]:
                    violations.append(LawViolation("closure", f"{g!r} . {f!r} = {gf!r} is not in hom"))
                for d in objects:
                    for h in homs[c, d]:
                        if cat.compose(cat.compose(h, g), f) != cat.compose(h, gf):
                            violations.append(
                                LawViolation("associativity", f"({h!r} . {g!r}) . {f!r} != {h!r} . ({g!r} . {f!r})")
                            )
    return violations


def check_monic(cat: Category, objects: Sequence) -> list[LawViolation]:
    """Find f, g1 != g2 with f . g1 == f . g2 among the listed objects."""
    violations = []
    for a, b, c in itertools.product(objects, repeat=3):
        for f in cat.hom(b, c):
            seen: dict = {}
            for g in cat.hom(a, b):
                fg = cat.compose(f, g)
                if fg in seen:
                    violations.append(LawViolation("monic", f"{f!r} identifies {seen[fg]!r} and {g!r}"))
                seen[fg] = g
    return violations


# the arrow relation -----------------------------------------------------------

class Verdict(enum.Enum):
    WITNESSED = "witnessed"
    REFUTED = "refuted"


@dataclass(frozen=True)
class Coloring:
    domain: tuple
    colors: tuple[int, ...]

    def __post_init__(self):
        if len(self.domain) != len(self.colors):
            raise ValueError("coloring must assign one color per morphism")

    def check_range(self, k: int) -> None:
        bad = [c for c in self.colors if not 1 <= c <= k]
        if bad:
            raise ValueError(f"colors {bad} are outside 1..{k}")

    def as_dict(self) -> dict:
        return dict(zip(self.domain, self.colors))


@dataclass
class ArrowReport:
    verdict: Verdict
    k: int
    mode: str
    hom_sizes: dict
    stats: dict = field(default_factory=dict)
    bad: Coloring | None = None
    nondeterministic: bool = False

    @property
    def witnessed(self) -> bool:
        return self.verdict is Verdict.WITNESSED

    def to_json(self, cat: Category) -> dict:
        out = {
            "verdict": self.verdict.value,
            "k": self.k,
            "mode": self.mode,
            "hom_sizes": dict(self.hom_sizes),
            "stats": dict(self.stats),
            "nondeterministic": self.nondeterministic,
        }
        if self.bad is not None:
            out["bad_coloring"] = {
                "domain": [cat.morphism_to_json(f) for f in self.bad.domain],
                "colors": list(self.bad.colors),
            }
        return out


def check_colors(k: int) -> None:
    if not MIN_COLORS <= k <= MAX_COLORS:
        raise ValueError(f"number of colors must lie in {MIN_COLORS}..{MAX_COLORS}, got {k}")


def copy_index_sets(cat: Category, A, B, C):
    """Positions in ``hom(A, C)`` covered by each copy ``w . hom(A, B)``."""
    hom_ac = cat.hom(A, C)
    hom_ab = cat.hom(A, B)
    hom_bc = cat.hom(B, C)
    position = {f: i for i, f in enumerate(hom_ac)}
    copies = []
    for w in hom_bc:
        copies.append(tuple(sorted({position[cat.compose(w, u)] for u in hom_ab})))
    return hom_ac, hom_ab, hom_bc, copies


def _exhaustive(N: int, k: int, copies: list, cap: int):
    examined = 0
    for colors in itertools.product(range(1, k + 1), repeat=N):
        examined += 1
        if examined > cap:
            raise BudgetExceeded("exhaustive coloring enumeration", cap, {"colorings": examined - 1})
        for s in copies:
            c0 = colors[s[0]]
            if all(colors[p] == c0 for p in s):
                break
        else:
            return colors, examined
    return None, examined


class _Backtracker:
    """Depth-first search for a bad coloring in lexicographic order.

    Colors are tried in increasing order and a new color may only be the
    next unused one, so the first bad coloring found is the lex-least.
    A copy with all but one position colored c forbids c at the last one.
    """

    def __init__(self, N: int, k: int, copies: Sequence[Sequence[int]], cap: int):
        self.N, self.k, self.cap = N, k, cap
        self.copies = [tuple(s) for s in copies]
        self.containing = [[] for _ in range(N)]
        for idx, s in enumerate(self.copies):
            for p in s:
                self.containing[p].append(idx)
        self.assigned = [0] * len(self.copies)
        self.count = [[0] * (k + 1) for _ in self.copies]
        self.banned = [[0] * (k + 1) for _ in range(N)]
        self.colors = [0] * N
        self.nodes = 0

    def _assign(self, p: int, c: int, undo: list) -> bool:
        self.colors[p] = c
        ok = True
        for idx in self.containing[p]:
            s = self.copies[idx]
            self.assigned[idx] += 1
            self.count[idx][c] += 1
            size = len(s)
            if self.count[idx][c] == size:
                ok = False
            elif self.count[idx][c] == size - 1 and self.assigned[idx] == size - 1:
                q = next(x for x in s if self.colors[x] == 0)
                self.banned[q][c] += 1
                undo.append((q, c))
                if all(self.banned[q][x] for x in range(1, self.k + 1)):
                    ok = False
        return ok

    def _unassign(self, p: int, c: int, undo: list) -> None:
        for q, cq in undo:
            self.banned[q][cq] -= 1
        for idx in self.containing[p]:
            self.assigned[idx] -= 1
            self.count[idx][c] -= 1
        self.colors[p] = 0

    def run(self, prefix: Sequence[int] = ()) -> tuple[int, ...] | None:
        limit = sys.getrecursionlimit()
        if limit < self.N + 100:
            sys.setrecursionlimit(self.N + 100)
        return self._dfs(0, 0, tuple(prefix))

    def _dfs(self, p: int, used: int, prefix: tuple) -> tuple[int, ...] | None:
        self.nodes += 1
        if self.nodes > self.cap:
            raise BudgetExceeded("backtracking search", self.cap, {"nodes": self.nodes - 1})
        if p == self.N:
            return tuple(self.colors)
        if p < len(prefix):
            choices = (prefix[p],)
        else:
            choices = range(1, min(self.k, used + 1) + 1)
        for c in choices:
            if self.banned[p][c]:
                continue
            undo: list = []
            if self._assign(p, c, undo):
                found = self._dfs(p + 1, max(used, c), prefix)
                if found is not None:
                    return found
            self._unassign(p, c, undo)
        return None


def _growth_prefixes(length: int, k: int):
    """Restricted growth strings: each new color is the next unused one."""
    out = [((), 0)]
    for _ in range(length):
        out = [(pre + (c,), max(used, c)) for pre, used in out for c in range(1, min(k, used + 1) + 1)]
    return [pre for pre, _ in out]


def _backtrack_worker(N, k, copies, cap, prefix):
    bt = _Backtracker(N, k, copies, cap)
    try:
        return bt.run(prefix), bt.nodes, False
    except BudgetExceeded:
        return None, bt.nodes, True


def _backtrack_parallel(N: int, k: int, copies, cap: int, jobs: int):
    length = 0
    while length < N and len(_growth_prefixes(length, k)) < 4 * jobs:
        length += 1
    prefixes = _growth_prefixes(length, k)
    nodes = 0
    exceeded = False
    found = None
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        pending = {pool.submit(_backtrack_worker, N, k, copies, cap, pre) for pre in prefixes}
        while pending and found is None:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                result, n, over = fut.result()
                nodes += n
                exceeded = exceeded or over
                if result is not None and found is None:
                    found = result
        for fut in pending:
            fut.cancel()
    if found is None and exceeded:
        raise BudgetExceeded("parallel backtracking search", cap, {"nodes": nodes})
    return found, nodes


def verify_arrow(cat: Category, A, B, C, k: int, mode: str | None = None, config: RunConfig | None = None) -> ArrowReport:
    """Decide ``C -> (B)^A_k``; returns Witnessed or Refuted with a bad coloring.

    Raises :class:`BudgetExceeded` when the search is cut off.
    """
    config = config or DEFAULT_CONFIG
    mode = mode or config.mode
    check_colors(k)
    hom_ac, hom_ab, hom_bc, copies = copy_index_sets(cat, A, B, C)
    if not hom_ab:
        raise ValueError("hom(A, B) must be nonempty")
    N = len(hom_ac)
    sizes = {"AB": len(hom_ab), "AC": N, "BC": len(hom_bc)}
    stats: dict = {}
    nondeterministic = False
    if any(len(s) == 1 for s in copies):
        # a one-element copy is monochromatic under every coloring
        return ArrowReport(Verdict.WITNESSED, k, mode, sizes, {"colorings": 0, "nodes": 0})
    if mode == "exhaustive":
        if N > config.cap_hom:
            raise SizeLimitExceeded(f"|hom(A, C)| = {N} for exhaustive mode", config.cap_hom)
        bad, examined = _exhaustive(N, k, copies, config.cap_colorings)
        stats = {"colorings": examined, "nodes": examined}
    elif mode == "backtrack":
        if config.jobs > 1 and N > 0:
            bad, nodes = _backtrack_parallel(N, k, copies, config.cap_nodes, config.jobs)
            nondeterministic = True
        else:
            bt = _Backtracker(N, k, copies, config.cap_nodes)
            bad = bt.run()
            nodes = bt.nodes
        stats = {"colorings": 1 if bad is not None else 0, "nodes": nodes}
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if bad is None:
        return ArrowReport(Verdict.WITNESSED, k, mode, sizes, stats, nondeterministic=nondeterministic)
    return ArrowReport(
        Verdict.REFUTED, k, mode, sizes, stats, Coloring(tuple(hom_ac), tuple(bad)), nondeterministic
    )


def find_monochromatic(cat: Category, A, B, C, color_of: Mapping | Callable):
    """First ``w`` in ``hom(B, C)`` whose copy is monochromatic, as ``(w, color)``; else None."""
    lookup = color_of.__getitem__ if isinstance(color_of, Mapping) else color_of
    hom_ab = cat.hom(A, B)
    for w in cat.hom(B, C):
        colors = {lookup(cat.compose(w, u)) for u in hom_ab}
        if len(colors) == 1:
            return w, colors.pop()
    return None


def replay_refutation(cat: Category, A, B, C, k: int, coloring: Coloring) -> bool:
    """Independently confirm that ``coloring`` admits no monochromatic copy."""
    try:
        coloring.check_range(k)
    except ValueError:
        return False
    if sorted(map(cat.key, coloring.domain)) != sorted(map(cat.key, cat.hom(A, C))):
        return False
    if len(set(coloring.domain)) != len(coloring.domain):
        return False
    return find_monochromatic(cat, A, B, C, coloring.as_dict()) is None


def search_witness(cat: Category, A, B, k: int, candidates: Iterable, mode: str | None = None,
                   config: RunConfig | None = None):
    """First candidate C (in stream order) with ``C -> (B)^A_k``, with its report."""
    if not cat.hom(A, B):
        raise ValueError("hom(A, B) must be nonempty")
    for C in candidates:
        report = verify_arrow(cat, A, B, C, k, mode, config)
        if report.witnessed:
            return C, report
    raise Exhausted("candidate stream ended without a witness")
