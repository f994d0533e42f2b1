"""Pre-adjunctions and the one from ordered hypergraphs to GR({0}).

A hypergraph H is sent to the number of its downsets; a length n goes to
the hypergraph G(n) on all subsets of {1..n}.  A parameter word u with one
variable per downset places vertex i at the union of the variable blocks
of the downsets containing i.

For b >= 3 the plain downsets are not closed under preimages of
embeddings (a pair inside an edge of A can pull back to a pair of B that
lies in no edge), and the lifting square then fails.  The index family
used here adds every set of 2..b-1 vertices, which keeps phi an embedding
and makes every preimage an index set again.  For b = 2 both families
coincide.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

from .. import paramwords as pw
from ..config import DEFAULT_CONFIG, RunConfig
from ..errors import (
    ArityMismatch,
    ComponentArrowUnverified,
    EmbeddingCheckFailed,
    NotAnEmbedding,
    PreAdjunctionViolated,
)
from ..fincat import Category, GRCategory, HypergraphCategory, find_monochromatic, search_witness, verify_arrow
from ..ordstruct import (
    Hypergraph,
    SetOrder,
    colex_rank,
    colex_subsets,
    compare_sets,
    compose_maps,
    downsets,
    gr_target_hypergraph,
    is_embedding,
    sort_sets,
)

ZERO = ("0",)


def index_sets(H: Hypergraph) -> list[frozenset[int]]:
    """Downsets of H, plus all sets of 2..b-1 vertices when b >= 3, in Alex order."""
    if H.b == 2:
        return downsets(H)
    found = set(downsets(H))
    for r in range(2, H.b):
        found.update(frozenset(c) for c in itertools.combinations(range(1, H.size + 1), r))
    return sort_sets(range(1, H.size + 1), found, SetOrder.ALEX)


def downset_count_F(H: Hypergraph) -> int:
    return len(index_sets(H))


def phi_vertex_sets(H: Hypergraph, u: pw.ParamWord) -> list[frozenset[int]]:
    """The subsets a_1..a_|H| that the vertices of H are sent to."""
    ds = index_sets(H)
    if u.m != len(ds):
        raise ArityMismatch(f"word has {u.m} variables but the hypergraph has {len(ds)} downsets")
    blocks = pw.variable_blocks(u)
    return [
        frozenset().union(*(blocks[alpha] for alpha, d in enumerate(ds) if i in d))
        for i in range(1, H.size + 1)
    ]


def phi_checks(H: Hypergraph, n: int, sets: Sequence[frozenset[int]]) -> dict[str, int]:
    """Failure counts of the three embedding conditions for a candidate image."""
    failures = {"edge_preservation": 0, "edge_reflection": 0, "order": 0}
    for combo in itertools.combinations(range(1, H.size + 1), H.b):
        meets = bool(frozenset.intersection(*(sets[i - 1] for i in combo)))
        if combo in H.edges and not meets:
            failures["edge_preservation"] += 1
        if combo not in H.edges and meets:
            failures["edge_reflection"] += 1
    ground = range(1, n + 1)
    for i in range(1, H.size):
        if compare_sets(ground, sets[i - 1], sets[i], SetOrder.COLEX) >= 0:
            failures["order"] += 1
    return failures


def phi(H: Hypergraph, n: int, u: pw.ParamWord, b: int | None = None) -> tuple[int, ...]:
    """Embedding of H into G(n) determined by ``u``; vertices of G(n) are CoLex ranks."""
    if b is not None and b != H.b:
        raise ArityMismatch(f"hypergraph is {H.b}-uniform, not {b}-uniform")
    if u.n != n:
        raise ArityMismatch(f"word has length {u.n}, expected {n}")
    if u.alphabet != ZERO:
        raise ArityMismatch("only the alphabet {0} is supported")
    sets = phi_vertex_sets(H, u)
    failures = phi_checks(H, n, sets)
    if any(failures.values()):
        raise EmbeddingCheckFailed(f"phi({u}) failed {failures}")
    rank = colex_rank(n)
    return tuple(rank[s] for s in sets)


def lift_word(f: Sequence[int], A: Hypergraph, B: Hypergraph) -> pw.ParamWord:
    """The word h in W^m_d with phi(A, n, u) . f == phi(B, n, u . h) for all u.

    ``f`` embeds B into A; letter i of h is x_j when the preimage of the
    i-th downset of A is the j-th downset of B, and 0 otherwise.
    """
    f = tuple(f)
    if not is_embedding(B, A, f):
        raise NotAnEmbedding(f"{f} is not an embedding of B into A")
    ds_a = index_sets(A)
    index_b = {d: j for j, d in enumerate(index_sets(B), 1)}
    letters = []
    for d in ds_a:
        pre = frozenset(j for j in range(1, B.size + 1) if f[j - 1] in d)
        letters.append(index_b.get(pre, "0"))
    try:
        return pw.validate(ZERO, len(letters), len(index_b), letters)
    except pw.ParamWordError as exc:
        raise PreAdjunctionViolated(f"lifted word {letters} is not a parameter word: {exc}") from None


def check_pa(A: Hypergraph, B: Hypergraph, f: Sequence[int], u: pw.ParamWord, h: pw.ParamWord | None = None) -> bool:
    """Does the (PA) square commute for this u and f?"""
    if h is None:
        h = lift_word(f, A, B)
    n = u.n
    return compose_maps(phi(A, n, u), f) == phi(B, n, pw.substitute(u, h))


@dataclass
class PreAdjunction:
    """Object maps F: D -> C, G: C -> D, hom maps phi and the lifting of (PA)."""

    c_cat: Category
    d_cat: Category
    F: Callable[[Any], Any]
    G: Callable[[Any], Any]
    phi: Callable[[Any, Any, Any], Any]
    lift: Callable[[Any, Any, Any], Any]

    def square_commutes(self, E, D, C, u, f) -> bool:
        v = self.lift(f, E, D)
        lhs = self.d_cat.compose(self.phi(D, C, u), f)
        rhs = self.phi(E, C, self.c_cat.compose(u, v))
        return lhs == rhs


def hypergraph_preadjunction(b: int) -> PreAdjunction:
    return PreAdjunction(
        c_cat=GRCategory(ZERO),
        d_cat=HypergraphCategory(b),
        F=downset_count_F,
        G=lambda n: gr_target_hypergraph(n, b),
        phi=lambda Y, n, u: phi(Y, n, u, b),
        lift=lambda f, E, D: lift_word(f, D, E),
    )


@dataclass
class PreAdjunctionWitness:
    """``G(C)`` for a C-side witness, with the constructive coloring pull-back."""

    pa: PreAdjunction
    E: Any
    D: Any
    C: Any
    k: int

    @property
    def target(self):
        return self.pa.G(self.C)

    def decode(self, color_of: Mapping):
        """Monochromatic ``phi(u)`` for a coloring of ``hom_D(E, G(C))``, as ``(w, color)``."""
        pa, E, D, C = self.pa, self.E, self.D, self.C
        pulled = {u: color_of[pa.phi(E, C, u)] for u in pa.c_cat.hom(pa.F(E), C)}
        found = find_monochromatic(pa.c_cat, pa.F(E), pa.F(D), C, pulled)
        if found is None:
            raise ComponentArrowUnverified("pulled-back coloring has no monochromatic copy")
        u, color = found
        w = pa.phi(D, C, u)
        for f in pa.d_cat.hom(E, D):
            if color_of[pa.d_cat.compose(w, f)] != color:
                raise PreAdjunctionViolated(f"phi({u}) . {f} leaves color {color}")
        return w, color


def spot_check_pa(pa: PreAdjunction, E, D, C, limit: int = 2000, seed: int = 0) -> tuple[int, str]:
    """Check (PA) on all pairs (u, f), or on a seeded sample when there are more than ``limit``."""
    us = pa.c_cat.hom(pa.F(D), C)
    fs = pa.d_cat.hom(E, D)
    pairs = [(u, f) for u in us for f in fs]
    label = "exhaustive"
    if len(pairs) > limit:
        pairs = random.Random(seed).sample(pairs, limit)
        label = f"sampled({seed})"
    for u, f in pairs:
        if not pa.square_commutes(E, D, C, u, f):
            raise PreAdjunctionViolated(f"(PA) fails for u={u}, f={f}")
    return len(pairs), label


def iter_colorings(domain: Sequence, k: int, config: RunConfig, samples: int = 256):
    """All colorings of ``domain`` when affordable, else a seeded sample; yields dicts."""
    domain = list(domain)
    if k ** len(domain) <= min(config.cap_colorings, 1 << 16):
        label = "exhaustive"
        colorings = (dict(zip(domain, cs)) for cs in itertools.product(range(1, k + 1), repeat=len(domain)))
    else:
        label = f"sampled({config.seed})"
        rng = random.Random(config.seed)
        colorings = ({f: rng.randint(1, k) for f in domain} for _ in range(samples))
    return label, colorings


def transfer_preadjunction(pa: PreAdjunction, E, D, C, k: int, config: RunConfig | None = None,
                           c_report=None, verify: bool = True) -> tuple[PreAdjunctionWitness, dict]:
    """Turn ``C -> (F(D))^{F(E)}_k`` into ``G(C) -> (D)^E_k`` and check the decoding."""
    config = config or DEFAULT_CONFIG
    if c_report is None:
        c_report = verify_arrow(pa.c_cat, pa.F(E), pa.F(D), C, k, "backtrack", config)
    if not c_report.witnessed:
        raise ComponentArrowUnverified("the C-side arrow does not hold")
    checked, pa_label = spot_check_pa(pa, E, D, C, seed=config.seed)
    witness = PreAdjunctionWitness(pa, E, D, C, k)
    summary = {"pa_checks": checked, "pa_verification": pa_label}
    if verify:
        domain = pa.d_cat.hom(E, witness.target)
        label, colorings = iter_colorings(domain, k, config)
        count = 0
        for chi in colorings:
            witness.decode(chi)
            count += 1
        summary.update({"decoded_colorings": count, "verification": label})
    return witness, summary


def gr_witness(F_E: int, F_D: int, k: int, max_n: int, config: RunConfig | None = None):
    """Smallest n <= max_n with ``n -> (F_D)^{F_E}_k`` in GR({0}), by backtracking."""
    return search_witness(GRCategory(ZERO), F_E, F_D, k, range(F_D, max_n + 1), "backtrack", config)
