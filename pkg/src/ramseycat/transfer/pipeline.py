"""End-to-end construction of Ramsey witnesses for ordered structures.

The stages run in order: embed, dagger, sigma-reduce, one witness per
kept relation (chain, unary or gr + phi-transfer), product, closure,
expand, star and a final direct check.  Each completed stage appends a
certificate to the trace; a stage that runs out of budget ends the trace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .. import certificates as certs
from ..config import DEFAULT_CONFIG, MAX_COLORS, RunConfig
from ..errors import BudgetExceeded, Exhausted, NoEmbedding, SizeLimitExceeded
from ..fincat import ArrowReport, ChainCategory, GRCategory, RelCategory, Verdict, search_witness, verify_arrow
from ..ordstruct import (
    OrderedStructure,
    Signature,
    gr_target_hypergraph,
    hypergraph_to_structure,
    iter_embeddings,
    reduct,
    structure_to_hypergraph,
    structure_to_json,
)
from .diagrams import components, product_of_components, subcategory_transfer
from .preadjunction import (
    ZERO,
    downset_count_F,
    gr_witness,
    hypergraph_preadjunction,
    iter_colorings,
    transfer_preadjunction,
)
from .product import ProductWitness, component_colors
from .quasiorder import dagger, star
from .reduction import expand_witness, sigma_reduce

DEFAULT_MAX_GR_N = 7
UNARY_EXTRA_POINTS = 6


@dataclass
class PipelineTrace:
    A: OrderedStructure
    B: OrderedStructure
    k: int
    stages: list = field(default_factory=list)
    status: str = "running"
    failed_stage: str | None = None
    detail: str | None = None
    witness: OrderedStructure | None = None

    def certificate(self, config: RunConfig, max_gr_n: int) -> dict:
        labels = [c["verification"] for c in self.stages]
        if self.status != "witness":
            label = "budget-exceeded"
        else:
            sampled = [x for x in labels if x.startswith("sampled")]
            label = sampled[0] if sampled else "exhaustive"
        construction = {
            "k": self.k,
            "config": config.to_json(),
            "max_gr_n": max_gr_n,
            "status": self.status,
            "failed_stage": self.failed_stage,
            "detail": self.detail,
            "trace": self.stages,
            "witness": structure_to_json(self.witness) if self.witness is not None else None,
        }
        objects = {"A": structure_to_json(self.A), "B": structure_to_json(self.B)}
        return certs.make_certificate("pipeline", objects, construction, label, config.seed)


class _Abort(Exception):
    def __init__(self, stage: str, detail: str):
        super().__init__(detail)
        self.stage = stage
        self.detail = detail


def _budget_certificate(stage: str, objects: dict, detail: str, config: RunConfig, **extra) -> dict:
    return certs.make_certificate(stage, objects, {"detail": detail, **extra}, "budget-exceeded", config.seed)


def _unary_candidates(name: str, lo: int, hi: int):
    sig = Signature(((name, 1),))
    for m in range(lo, hi + 1):
        for bits in itertools.product((0, 1), repeat=m):
            rel = frozenset((i,) for i, bit in enumerate(bits, 1) if bit)
            yield OrderedStructure(sig, m, (rel,))


def _factor_witness(trace: PipelineTrace, a: OrderedStructure, b: OrderedStructure, k: int,
                    config: RunConfig, max_gr_n: int) -> OrderedStructure:
    """A witness ``c -> (b)^a_k`` for a single absolutely ordered relation."""
    (name, arity), = a.signature
    objects = {"A": structure_to_json(a), "B": structure_to_json(b)}
    if arity == 1:
        cat = RelCategory(a.signature, absolute=True)
        try:
            c, report = search_witness(cat, a, b, k, _unary_candidates(name, b.size, b.size + UNARY_EXTRA_POINTS),
                                       "backtrack", config)
        except (Exhausted, BudgetExceeded, SizeLimitExceeded) as exc:
            trace.stages.append(_budget_certificate("unary", objects, str(exc), config, k=k))
            raise _Abort("unary", str(exc))
        trace.stages.append(certs.arrow_certificate("unary", cat, a, b, c, k, report, config.seed))
        return c
    E, D = structure_to_hypergraph(a), structure_to_hypergraph(b)
    F_E, F_D = downset_count_F(E), downset_count_F(D)
    try:
        n, report = gr_witness(F_E, F_D, k, max_gr_n, config)
    except (Exhausted, BudgetExceeded, SizeLimitExceeded) as exc:
        detail = f"no n <= {max_gr_n} with n -> ({F_D})^{F_E}_{k} in GR: {exc}"
        trace.stages.append(_budget_certificate(
            "gr", {"A": F_E, "B": F_D}, detail, config, k=k, max_n=max_gr_n, category=GRCategory(ZERO).to_json()))
        raise _Abort("gr", detail)
    trace.stages.append(certs.arrow_certificate("gr", GRCategory(ZERO), F_E, F_D, n, k, report, config.seed))
    pa = hypergraph_preadjunction(arity)
    try:
        _, summary = transfer_preadjunction(pa, E, D, n, k, config, c_report=report)
    except (BudgetExceeded, SizeLimitExceeded) as exc:
        trace.stages.append(_budget_certificate("phi-transfer", {"E": structure_to_json(E), "D": structure_to_json(D)},
                                                str(exc), config, n=n, k=k))
        raise _Abort("phi-transfer", str(exc))
    c = hypergraph_to_structure(gr_target_hypergraph(n, arity), name)
    trace.stages.append(certs.make_certificate(
        "phi-transfer",
        {"E": structure_to_json(E), "D": structure_to_json(D)},
        {"n": n, "b": arity, "k": k, "relation": name, "output": structure_to_json(c), "summary": summary},
        summary["verification"],
        config.seed,
    ))
    return c


def _product_stage(trace, As, Bs, parent, k, config) -> None:
    cats = tuple(product_of_components(As.signature).factors)
    Abar, Bbar = components(As), components(Bs)
    witness = ProductWitness(cats, Abar, Bbar, parent, k, component_colors(cats, Abar, parent, k))
    prod = witness.category
    label, colorings = iter_colorings(prod.hom(Abar, parent), k, config)
    count = 0
    for chi in colorings:
        witness.decode(chi)
        count += 1
    trace.stages.append(certs.make_certificate(
        "product",
        {"A": prod.object_to_json(Abar), "B": prod.object_to_json(Bbar), "C": prod.object_to_json(parent)},
        {"factors": [c.to_json() for c in cats], "k": k, "component_colors": witness.colors,
         "decoded_colorings": count},
        label,
        config.seed,
    ))


def _closure_stage(trace, As, Bs, parent, k, config) -> OrderedStructure:
    prod = product_of_components(As.signature)
    assumed = ArrowReport(Verdict.WITNESSED, k, "product-transfer", {})
    try:
        witness, summary = subcategory_transfer(As, Bs, k, parent, config, parent_report=assumed)
    except (BudgetExceeded, SizeLimitExceeded) as exc:
        trace.stages.append(_budget_certificate(
            "closure", {"A": structure_to_json(As), "B": structure_to_json(Bs)}, str(exc), config, k=k))
        raise _Abort("closure", str(exc))
    closure = witness.closure
    arrows = []
    from .diagrams import coincidence_diagram

    for arr in coincidence_diagram(As, Bs, witness.legs).arrows:
        arrows.append({"u": list(arr.u), "v": list(arr.v), "i": arr.i, "j": arr.j})
    trace.stages.append(certs.make_certificate(
        "closure",
        {"A": structure_to_json(As), "B": structure_to_json(Bs)},
        {
            "k": k,
            "apex": [structure_to_json(c) for c in parent],
            "legs": [prod.morphism_to_json(leg) for leg in witness.legs],
            "arrows": arrows,
            "output": structure_to_json(closure.D),
            "phis": [list(p) for p in closure.phis],
            "summary": summary,
        },
        summary["verification"],
        config.seed,
    ))
    return closure.D


def nesetril_rodl_pipeline(A: OrderedStructure, B: OrderedStructure, k: int, config: RunConfig | None = None,
                           max_gr_n: int = DEFAULT_MAX_GR_N) -> PipelineTrace:
    """Build C with ``C -> (B)^A_k`` in the category of ordered structures, stage by stage.

    Raises :class:`NoEmbedding` when A does not embed into B.  Running out
    of budget is not an error: the returned trace has status
    ``"budget-exceeded"`` and names the stage that stopped.
    """
    config = config or DEFAULT_CONFIG
    if A.signature != B.signature:
        raise NoEmbedding("A and B have different signatures")
    trace = PipelineTrace(A, B, k)
    seed = config.seed
    f = next(iter_embeddings(A, B), None)
    if f is None:
        raise NoEmbedding("A does not embed into B")
    trace.stages.append(certs.make_certificate(
        "embed", {"A": structure_to_json(A), "B": structure_to_json(B)}, {"embedding": list(f)}, "exhaustive", seed))

    Ad, Bd = dagger(A), dagger(B)
    for name, src, out in (("A", A, Ad), ("B", B, Bd)):
        trace.stages.append(certs.make_certificate(
            "dagger", {"A": structure_to_json(src)}, {"part": name, "output": structure_to_json(out)}, "exhaustive", seed))

    red = sigma_reduce(Ad, Bd)
    trace.stages.append(certs.make_certificate(
        "sigma-reduce", {"A": structure_to_json(Ad), "B": structure_to_json(Bd)}, {"reduction": red.to_json()},
        "exhaustive", seed))
    As, Bs = reduct(Ad, red.sigma), reduct(Bd, red.sigma)

    try:
        if len(red.sigma) == 0:
            cat = ChainCategory()
            try:
                n, report = search_witness(cat, As.size, Bs.size, k, range(Bs.size, Bs.size + 64), "backtrack", config)
            except (Exhausted, BudgetExceeded, SizeLimitExceeded) as exc:
                trace.stages.append(_budget_certificate("chain", {"A": As.size, "B": Bs.size}, str(exc), config, k=k))
                raise _Abort("chain", str(exc))
            trace.stages.append(certs.arrow_certificate("chain", cat, As.size, Bs.size, n, k, report, seed))
            C_sigma = OrderedStructure(red.sigma, n, ())
        else:
            parts_a, parts_b = components(As), components(Bs)
            parent = []
            ks = k
            for a, b in zip(parts_a, parts_b):
                if ks > MAX_COLORS:
                    detail = f"factor needs {ks} colors, above the limit of {MAX_COLORS}"
                    trace.stages.append(_budget_certificate(
                        "product", {"A": structure_to_json(a), "B": structure_to_json(b)}, detail, config, k=ks))
                    raise _Abort("product", detail)
                c = _factor_witness(trace, a, b, ks, config, max_gr_n)
                parent.append(c)
                ks = ks ** len(list(iter_embeddings(a, c)))
            parent = tuple(parent)
            if len(parent) > 1:
                _product_stage(trace, As, Bs, parent, k, config)
            C_sigma = _closure_stage(trace, As, Bs, parent, k, config)
    except _Abort as exc:
        trace.status = "budget-exceeded"
        trace.failed_stage = exc.stage
        trace.detail = exc.detail
        return trace

    theta_x = Ad.signature
    C_star = expand_witness(C_sigma, red, theta_x)
    trace.stages.append(certs.make_certificate(
        "expand", {"C": structure_to_json(C_sigma)},
        {"reduction": red.to_json(), "theta": [[n, a] for n, a in theta_x], "output": structure_to_json(C_star)},
        "exhaustive", seed))
    C = star(C_star, A.signature)
    trace.stages.append(certs.make_certificate(
        "star", {"B": structure_to_json(C_star)}, {"output": structure_to_json(C)}, "exhaustive", seed))

    cat = RelCategory(A.signature)
    try:
        report = verify_arrow(cat, A, B, C, k, "backtrack", config)
    except (BudgetExceeded, SizeLimitExceeded) as exc:
        trace.stages.append(_budget_certificate(
            "final", {"A": structure_to_json(A), "B": structure_to_json(B), "C": structure_to_json(C)},
            str(exc), config, k=k, category=cat.to_json()))
    else:
        if not report.witnessed:
            raise AssertionError("pipeline produced a structure that fails the arrow")
        trace.stages.append(certs.arrow_certificate("final", cat, A, B, C, k, report, seed))
    trace.status = "witness"
    trace.witness = C
    return trace
