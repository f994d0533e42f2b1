"""Binary diagrams of absolutely ordered structures and their closure.

The subcategory of absolutely ordered Θ-structures sits inside the
product of the single-relation categories via ``A -> (A|R1, ..., A|Rn)``.
A binary diagram there (copies of B glued along coinciding images of A)
with a compatible cone in the product is closed to a cone inside the
subcategory: the apex is the lexicographically ordered product of the
cone's components, keeping only tuples whose first coordinates increase.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..config import DEFAULT_CONFIG, RunConfig
from ..errors import (
    BudgetExceeded,
    ClosureFailed,
    ComponentArrowUnverified,
    IncompatibleCone,
    SignatureMismatch,
    SizeLimitExceeded,
)
from ..fincat import ProductCategory, RelCategory, find_monochromatic, verify_arrow
from ..ordstruct import (
    OrderedStructure,
    Signature,
    compose_maps,
    enumerate_embeddings,
    induced,
    is_absolutely_ordered,
    is_embedding,
    reduct,
)
from .preadjunction import iter_colorings

DEFAULT_CLOSURE_CAP = 1 << 14

Map = tuple[int, ...]


@dataclass(frozen=True)
class DiagramArrow:
    """A copy of A mapped by ``u`` into top copy ``i`` and by ``v`` into top copy ``j``."""

    u: Map
    v: Map
    i: int
    j: int


@dataclass(frozen=True)
class BinaryDiagram:
    bottom: OrderedStructure
    top: OrderedStructure
    arrows: tuple[DiagramArrow, ...]
    top_count: int

    def __post_init__(self):
        homs = set(enumerate_embeddings(self.bottom, self.top))
        for arr in self.arrows:
            if arr.u not in homs or arr.v not in homs:
                raise ValueError(f"diagram arrow {arr} is not labelled by embeddings A -> B")
            if not (1 <= arr.i <= self.top_count and 1 <= arr.j <= self.top_count):
                raise ValueError(f"diagram arrow {arr} refers to a missing top copy")


@dataclass(frozen=True)
class Cone:
    """Apex ``(C_1, ..., C_n)`` and one leg ``(e^1, ..., e^n)`` per top copy."""

    apex: tuple[OrderedStructure, ...]
    legs: tuple[tuple[Map, ...], ...]


@dataclass(frozen=True)
class Closure:
    D: OrderedStructure
    phis: tuple[Map, ...]
    points: tuple[tuple[int, ...], ...]


def components(A: OrderedStructure) -> tuple[OrderedStructure, ...]:
    return tuple(reduct(A, [name]) for name in A.signature.names)


def product_of_components(signature: Signature) -> ProductCategory:
    return ProductCategory([RelCategory(Signature((sym,)), absolute=True) for sym in signature])


def check_cone(diagram: BinaryDiagram, cone: Cone) -> None:
    B = diagram.top
    parts = components(B)
    if len(cone.apex) != len(parts):
        raise IncompatibleCone("apex needs one component per relation")
    if len(cone.legs) != diagram.top_count:
        raise IncompatibleCone("one leg per top copy is required")
    for s, (part, c) in enumerate(zip(parts, cone.apex)):
        if c.signature != part.signature or not is_absolutely_ordered(c):
            raise IncompatibleCone(f"apex component {s + 1} is not an absolutely ordered {part.signature.names}-structure")
    for idx, leg in enumerate(cone.legs, 1):
        if len(leg) != len(parts):
            raise IncompatibleCone(f"leg {idx} needs one map per relation")
        for s, (part, c, e) in enumerate(zip(parts, cone.apex, leg)):
            if not is_embedding(part, c, e):
                raise IncompatibleCone(f"leg {idx}, component {s + 1} is not an embedding")
    for arr in diagram.arrows:
        for s in range(len(parts)):
            if compose_maps(cone.legs[arr.i - 1][s], arr.u) != compose_maps(cone.legs[arr.j - 1][s], arr.v):
                raise IncompatibleCone(f"legs {arr.i} and {arr.j} disagree on {arr} in component {s + 1}")


def close_binary_diagram_rel(diagram: BinaryDiagram, cone: Cone, cap: int = DEFAULT_CLOSURE_CAP) -> Closure:
    """Build the apex D inside the subcategory together with its legs."""
    check_cone(diagram, cone)
    B = diagram.top
    sig = B.signature
    if not sig.symbols:
        raise ClosureFailed("the product construction needs at least one relation")
    sizes = [c.size for c in cone.apex]
    total = 1
    for n in sizes:
        total *= n
    if total > cap:
        raise SizeLimitExceeded("closure universe", cap)
    points = tuple(itertools.product(*(range(1, n + 1) for n in sizes)))
    rank = {p: i for i, p in enumerate(points, 1)}
    relations = []
    for s, ((name, arity), c) in enumerate(zip(sig, cone.apex)):
        rel = set()
        others = [range(1, n + 1) if t != s else None for t, n in enumerate(sizes)]
        for t in c.relations[0]:
            # each d_j has s-th coordinate t[j]; the rest is free
            choices = []
            for x in t:
                pts = itertools.product(*((x,) if rng is None else rng for rng in others))
                choices.append(list(pts))
            for ds in itertools.product(*choices):
                if all(ds[j][0] < ds[j + 1][0] for j in range(arity - 1)):
                    rel.add(tuple(rank[d] for d in ds))
        relations.append(frozenset(rel))
    D = OrderedStructure(sig, len(points), tuple(relations))
    phis = tuple(
        tuple(rank[tuple(leg[s][b - 1] for s in range(len(sizes)))] for b in range(1, B.size + 1))
        for leg in cone.legs
    )
    if not is_absolutely_ordered(D):
        raise ClosureFailed("closure is not absolutely ordered")
    for idx, f in enumerate(phis, 1):
        if not is_embedding(B, D, f):
            raise ClosureFailed(f"leg {idx} is not an embedding into the closure")
    for arr in diagram.arrows:
        if compose_maps(phis[arr.i - 1], arr.u) != compose_maps(phis[arr.j - 1], arr.v):
            raise ClosureFailed(f"closure legs do not commute over {arr}")
    return Closure(D, phis, points)


def coincidence_diagram(A: OrderedStructure, B: OrderedStructure, legs: Sequence[Sequence[Map]]) -> BinaryDiagram:
    """All coincidences ``e_i . u == e_j . v`` among the given legs, u, v in hom(A, B)."""
    homs = enumerate_embeddings(A, B)
    images: dict = {}
    arrows = []
    for i, leg in enumerate(legs, 1):
        for u in homs:
            key = tuple(compose_maps(e, u) for e in leg)
            for j, v in images.get(key, []):
                arrows.append(DiagramArrow(v, u, j, i))
            images.setdefault(key, []).append((i, u))
    return BinaryDiagram(A, B, tuple(arrows), len(legs))


@dataclass
class SubcategoryWitness:
    A: OrderedStructure
    B: OrderedStructure
    k: int
    parent: tuple
    legs: tuple
    closure: Closure

    @property
    def D(self) -> OrderedStructure:
        return self.closure.D

    def decode(self, color_of: Mapping):
        """Pull a coloring of hom(A, D) back to the parent and return ``(f_l, color)``."""
        A, B, D = self.A, self.B, self.D
        prod = product_of_components(A.signature)
        Abar, Bbar = components(A), components(B)
        n = len(Abar)
        pulled: dict = {}
        for leg, f in zip(self.legs, self.closure.phis):
            for u in enumerate_embeddings(A, B):
                color = color_of[compose_maps(f, u)]
                if color >= 2:
                    key = prod.compose(leg, (u,) * n)
                    if pulled.setdefault(key, color) != color:
                        raise ClosureFailed("pulled-back coloring is not well defined")
        found = find_monochromatic(prod, Abar, Bbar, self.parent, lambda e: pulled.get(e, 1))
        if found is None:
            raise ComponentArrowUnverified("parent arrow fails for the pulled-back coloring")
        e, color = found
        f = self.closure.phis[self.legs.index(e)]
        for u in enumerate_embeddings(A, B):
            if color_of[compose_maps(f, u)] != color:
                raise ClosureFailed("decoded copy is not monochromatic")
        return f, color


def subcategory_transfer(A: OrderedStructure, B: OrderedStructure, k: int, parent: Sequence[OrderedStructure],
                         config: RunConfig | None = None, parent_report=None,
                         direct: bool = True) -> tuple[SubcategoryWitness, dict]:
    """From a product witness for (A|R1, ..., A|Rn) build a witness D in the subcategory.

    D is checked directly against ``D -> (B)^A_k`` when the search fits the
    budget, otherwise through the coloring pull-back on sampled colorings.
    """
    config = config or DEFAULT_CONFIG
    if A.signature != B.signature:
        raise SignatureMismatch("A and B must share a signature")
    if not (is_absolutely_ordered(A) and is_absolutely_ordered(B)):
        raise ClosureFailed("A and B must be absolutely ordered")
    parent = tuple(parent)
    prod = product_of_components(A.signature)
    Abar, Bbar = components(A), components(B)
    if parent_report is None:
        parent_report = verify_arrow(prod, Abar, Bbar, parent, k, "backtrack", config)
    if not parent_report.witnessed:
        raise ComponentArrowUnverified("parent does not arrow the product images")
    legs = tuple(prod.hom(Bbar, parent))
    diagram = coincidence_diagram(A, B, legs)
    closure = close_binary_diagram_rel(diagram, Cone(parent, legs))
    witness = SubcategoryWitness(A, B, k, parent, legs, closure)
    summary = {"legs": len(legs), "diagram_arrows": len(diagram.arrows), "closure_size": closure.D.size}
    cat = RelCategory(A.signature, absolute=True)
    if direct:
        try:
            report = verify_arrow(cat, A, B, closure.D, k, "backtrack", config)
        except (BudgetExceeded, SizeLimitExceeded):
            report = None
        if report is not None:
            if not report.witnessed:
                raise ClosureFailed("closure does not arrow (B)^A")
            summary.update({"verification": "exhaustive", "stats": report.stats})
            return witness, summary
    label, colorings = iter_colorings(cat.hom(A, closure.D), k, config)
    count = 0
    for chi in colorings:
        witness.decode(chi)
        count += 1
    summary.update({"verification": label, "decoded_colorings": count})
    return witness, summary


def random_structure(rng: random.Random, signature: Signature, size: int, density: float = 0.5) -> OrderedStructure:
    """A random absolutely ordered structure."""
    rels = []
    for _, arity in signature:
        rels.append(frozenset(t for t in itertools.combinations(range(1, size + 1), arity) if rng.random() < density))
    return OrderedStructure(signature, size, tuple(rels))


def random_extension(rng: random.Random, part: OrderedStructure, extra: int, density: float = 0.5) -> OrderedStructure:
    """Insert ``extra`` new points at random places, keeping ``part`` as an induced substructure."""
    size = part.size + extra
    old = sorted(rng.sample(range(1, size + 1), part.size))
    image = dict(zip(range(1, part.size + 1), old))
    rels = []
    for rel, (_, arity) in zip(part.relations, part.signature):
        mapped = {tuple(image[x] for x in t) for t in rel}
        oldset = set(old)
        for t in itertools.combinations(range(1, size + 1), arity):
            if not set(t) <= oldset and rng.random() < density:
                mapped.add(t)
        rels.append(frozenset(mapped))
    return OrderedStructure(part.signature, size, tuple(rels))


def random_diagram(rng: random.Random, max_relations: int = 2, max_top: int = 3, max_size: int = 3,
                   max_extra: int = 2) -> tuple[BinaryDiagram, Cone]:
    """A random consistent binary diagram with a compatible cone in the product."""
    n = rng.randint(1, max_relations)
    sig = Signature(tuple((f"R{s + 1}", rng.randint(1, 2)) for s in range(n)))
    B = random_structure(rng, sig, rng.randint(1, max_size))
    keep = sorted(rng.sample(range(1, B.size + 1), rng.randint(1, B.size)))
    A = induced(B, keep)
    apex = tuple(random_extension(rng, part, rng.randint(0, max_extra)) for part in components(B))
    homs = [enumerate_embeddings(part, c) for part, c in zip(components(B), apex)]
    legs = tuple(tuple(rng.choice(h) for h in homs) for _ in range(rng.randint(1, max_top)))
    return coincidence_diagram(A, B, legs), Cone(apex, legs)
