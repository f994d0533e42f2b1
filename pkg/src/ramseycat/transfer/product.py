"""Ramsey witnesses in finite products of categories.

For two factors the first component is colored with k colors and the
second with k^t colors, t = |hom(A1, C1)|: a k-coloring of product
morphisms is read as a vector-valued coloring of the second factor.
More factors are handled by treating the tail as one product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..config import DEFAULT_CONFIG, MAX_COLORS, RunConfig
from ..errors import ComponentArrowUnverified
from ..fincat import Category, ProductCategory, find_monochromatic, search_witness, verify_arrow


def _encode(colors: Sequence[int], k: int) -> int:
    """Vector of colors in 1..k as a single color in 1..k^len."""
    code = 0
    for c in colors:
        code = code * k + (c - 1)
    return code + 1


def component_colors(cats: Sequence[Category], A: Sequence, C: Sequence, k: int) -> list[int]:
    """Color counts the factors need: k, then k^t1, then (k^t1)^t2, ..."""
    out = [k]
    for cat, a, c in zip(cats[:-1], A[:-1], C[:-1]):
        out.append(out[-1] ** len(cat.hom(a, c)))
    return out


@dataclass
class ProductWitness:
    cats: tuple
    A: tuple
    B: tuple
    C: tuple
    k: int
    colors: list = field(default_factory=list)

    @property
    def category(self) -> ProductCategory:
        return ProductCategory(self.cats)

    def decode(self, color_of: Mapping):
        """A morphism (w1, ..., wn) whose copy is monochromatic, with its color."""
        w, color = _decode(self.cats, self.A, self.B, self.C, self.k, color_of)
        prod = self.category
        seen = {color_of[prod.compose(w, u)] for u in prod.hom(self.A, self.B)}
        if seen != {color}:
            raise ComponentArrowUnverified(f"decoded copy shows colors {sorted(seen)}")
        return w, color


def _decode(cats, A, B, C, k, color_of):
    if len(cats) == 1:
        found = find_monochromatic(cats[0], A[0], B[0], C[0], lambda f: color_of[(f,)])
        if found is None:
            raise ComponentArrowUnverified("first factor arrow does not hold for this coloring")
        return (found[0],), found[1]
    head, tail = cats[0], cats[1:]
    hom1 = head.hom(A[0], C[0])
    tail_cat = ProductCategory(tail)
    hom_tail = tail_cat.hom(tuple(A[1:]), tuple(C[1:]))
    # read the coloring as a k^t coloring of the tail
    vector = {e: _encode([color_of[(e1,) + e] for e1 in hom1], k) for e in hom_tail}
    k_tail = k ** len(hom1)
    w_tail, _ = _decode(tail, A[1:], B[1:], C[1:], k_tail, vector)
    e = tail_cat.compose(w_tail, tail_cat.hom(tuple(A[1:]), tuple(B[1:]))[0])
    found = find_monochromatic(head, A[0], B[0], C[0], lambda e1: color_of[(e1,) + e])
    if found is None:
        raise ComponentArrowUnverified("first factor arrow does not hold for the induced coloring")
    w1, color = found
    return (w1,) + w_tail, color


def product_arrow(cats: Sequence[Category], A: Sequence, B: Sequence, C: Sequence, k: int,
                  config: RunConfig | None = None, verify_components: bool = True) -> tuple[ProductWitness, dict]:
    """Assemble a product witness from per-factor witnesses.

    Factor i must satisfy ``C_i -> (B_i)^{A_i}_{k_i}`` with the color
    counts from :func:`component_colors`; these arrows are checked unless
    ``verify_components`` is off.
    """
    config = config or DEFAULT_CONFIG
    cats, A, B, C = tuple(cats), tuple(A), tuple(B), tuple(C)
    if not (len(cats) == len(A) == len(B) == len(C)) or not cats:
        raise ValueError("need one object of each kind per factor")
    colors = component_colors(cats, A, C, k)
    reports = []
    if verify_components:
        for i, (cat, a, b, c, ki) in enumerate(zip(cats, A, B, C, colors)):
            if ki > MAX_COLORS:
                raise ComponentArrowUnverified(f"factor {i + 1} needs {ki} colors, above the limit of {MAX_COLORS}")
            report = verify_arrow(cat, a, b, c, ki, "backtrack", config)
            if not report.witnessed:
                raise ComponentArrowUnverified(f"factor {i + 1}: C does not arrow (B)^A with {ki} colors")
            reports.append({"factor": i + 1, "colors": ki, "verdict": report.verdict.value, "stats": report.stats})
    witness = ProductWitness(cats, A, B, C, k, colors)
    return witness, {"component_colors": colors, "components": reports}


def find_product_witness(cats: Sequence[Category], A: Sequence, B: Sequence, k: int,
                         config: RunConfig | None = None, max_extra: int = 16) -> tuple:
    """Smallest C_i factor by factor, each for the color count the earlier factors force.

    Only categories whose objects are sizes (chains, parameter words) are searched.
    """
    config = config or DEFAULT_CONFIG
    C = []
    ki = k
    for i, (cat, a, b) in enumerate(zip(cats, A, B)):
        if ki > MAX_COLORS:
            raise ComponentArrowUnverified(f"factor {i + 1} needs {ki} colors, above the limit of {MAX_COLORS}")
        if not isinstance(b, int):
            raise ComponentArrowUnverified(f"factor {i + 1}: witness search needs integer objects")
        c, _ = search_witness(cat, a, b, ki, range(b, b + max_extra + 1), "backtrack", config)
        C.append(c)
        ki = ki ** len(cat.hom(a, c))
    return tuple(C)
