"""Hash-stable certificates and their independent replay.

A certificate is a JSON object::

    {"stage": ..., "inputs": {name: sha256}, "construction": {...},
     "verification": "exhaustive" | "sampled(<seed>)" | "budget-exceeded"}

The objects a claim is about are embedded under ``construction.objects`` so
that :func:`replay` can recompute every claim from the certificate alone.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from typing import Callable

from . import paramwords as pw
from .config import DEFAULT_CONFIG, RunConfig
from .errors import BudgetExceeded, RamseyCatError, SizeLimitExceeded
from .fincat import (
    Category,
    Coloring,
    ProductCategory,
    Verdict,
    category_from_json,
    replay_refutation,
    verify_arrow,
)
from .ordstruct import (
    canonical_dumps,
    gr_target_hypergraph,
    hypergraph_to_structure,
    is_embedding,
    structure_from_json,
    structure_to_json,
)

OK, FAILED, UNREPLAYABLE = 0, 1, 2


def digest(obj) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode("ascii")).hexdigest()


def make_certificate(stage: str, objects: dict, construction: dict, verification: str, seed: int = 0) -> dict:
    body = dict(construction)
    body["objects"] = objects
    body["seed"] = seed
    return {
        "stage": stage,
        "inputs": {name: digest(obj) for name, obj in objects.items()},
        "construction": body,
        "verification": verification,
    }


def dumps(cert: dict) -> str:
    return canonical_dumps(cert) + "\n"


class ReplayFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail(message: str):
    raise ReplayFailure(FAILED, message)


def _unreplayable(message: str):
    raise ReplayFailure(UNREPLAYABLE, message)


# claims -----------------------------------------------------------------

def arrow_certificate(stage: str, cat: Category, A, B, C, k: int, report, seed: int = 0) -> dict:
    objects = {"A": cat.object_to_json(A), "B": cat.object_to_json(B), "C": cat.object_to_json(C)}
    construction = {"category": cat.to_json(), "k": k, "report": report.to_json(cat)}
    return make_certificate(stage, objects, construction, "exhaustive", seed)


def _replay_arrow(cert: dict, config: RunConfig) -> None:
    body = cert["construction"]
    cat = category_from_json(body["category"])
    objs = body["objects"]
    A, B, C = (cat.object_from_json(objs[n]) for n in ("A", "B", "C"))
    k = int(body["k"])
    report = body["report"]
    if report["verdict"] == Verdict.REFUTED.value:
        bad = report.get("bad_coloring")
        if bad is None:
            _fail("refutation without a bad coloring")
        coloring = Coloring(tuple(cat.morphism_from_json(f) for f in bad["domain"]), tuple(bad["colors"]))
        if not replay_refutation(cat, A, B, C, k, coloring):
            _fail("bad coloring has a monochromatic copy")
        return
    mode = report.get("mode", "backtrack")
    if mode == "exhaustive" and len(cat.hom(A, C)) > config.cap_hom:
        _unreplayable(f"exhaustive claim over {len(cat.hom(A, C))} morphisms exceeds cap {config.cap_hom}")
    try:
        again = verify_arrow(cat, A, B, C, k, mode, config)
    except (BudgetExceeded, SizeLimitExceeded) as exc:
        _unreplayable(str(exc))
    if again.verdict.value != report["verdict"]:
        _fail(f"arrow claimed {report['verdict']} but replays as {again.verdict.value}")


def _replay_embed(cert, config):
    objs = cert["construction"]["objects"]
    A, B = structure_from_json(objs["A"]), structure_from_json(objs["B"])
    if not is_embedding(A, B, tuple(cert["construction"]["embedding"])):
        _fail("recorded map is not an embedding")


def _replay_dagger(cert, config):
    from .transfer.quasiorder import dagger, star

    objs = cert["construction"]["objects"]
    A, out = structure_from_json(objs["A"]), structure_from_json(cert["construction"]["output"])
    if dagger(A) != out:
        _fail("dagger output differs")
    if digest(structure_to_json(star(out, A.signature))) != cert["inputs"]["A"]:
        _fail("star of the output does not hash to the input")


def _replay_star(cert, config):
    from .transfer.quasiorder import dagger, star

    objs = cert["construction"]["objects"]
    B, out = structure_from_json(objs["B"]), structure_from_json(cert["construction"]["output"])
    if star(B) != out:
        _fail("star output differs")
    if digest(structure_to_json(dagger(out))) != cert["inputs"]["B"]:
        _fail("dagger of the output does not hash to the input")


def _replay_sigma(cert, config):
    from .transfer.reduction import sigma_reduce

    objs = cert["construction"]["objects"]
    red = sigma_reduce(structure_from_json(objs["A"]), structure_from_json(objs["B"]))
    if red.to_json() != cert["construction"]["reduction"]:
        _fail("reduction differs")


def _replay_expand(cert, config):
    from .ordstruct import Signature
    from .transfer.reduction import SigmaReduction, expand_witness

    body = cert["construction"]
    C = structure_from_json(body["objects"]["C"])
    red = body["reduction"]
    reduction = SigmaReduction(
        Signature.of(*red["sigma"]), tuple(sorted(red["remap"].items(), key=lambda kv: kv[0]))
    )
    theta = Signature.of(*body["theta"])
    if structure_to_json(expand_witness(C, reduction, theta)) != body["output"]:
        _fail("expanded witness differs")


def _replay_phi(cert, config):
    from .transfer.preadjunction import phi

    body = cert["construction"]
    H = structure_from_json(body["objects"]["H"])
    u = pw.parse(body["word"])
    image = tuple(body["image"])
    if phi(H, u.n, u) != image:
        _fail("phi image differs")
    if not is_embedding(H, gr_target_hypergraph(u.n, H.b), image):
        _fail("phi image is not an embedding into G(n)")


def _replay_lift(cert, config):
    from .transfer.preadjunction import check_pa, downset_count_F, lift_word

    body = cert["construction"]
    A = structure_from_json(body["objects"]["A"])
    B = structure_from_json(body["objects"]["B"])
    f = tuple(body["embedding"])
    h = pw.parse(body["word"], m=downset_count_F(B))
    if lift_word(f, A, B) != h:
        _fail("lifted word differs")
    m = downset_count_F(A)
    for n in (m, m + 1):
        for u in pw.iter_words(("0",), n, m):
            if not check_pa(A, B, f, u, h):
                _fail(f"(PA) fails at u = {u}")


def _replay_gr_target(cert, config):
    from .transfer.preadjunction import PreAdjunctionWitness, hypergraph_preadjunction

    body = cert["construction"]
    n, b, k = int(body["n"]), int(body["b"]), int(body["k"])
    G = gr_target_hypergraph(n, b)
    if structure_to_json(hypergraph_to_structure(G, body["relation"])) != body["output"]:
        _fail("G(n) differs")
    objs = body["objects"]
    E, D = structure_from_json(objs["E"]), structure_from_json(objs["D"])
    witness = PreAdjunctionWitness(hypergraph_preadjunction(b), E, D, n, k)
    domain = witness.pa.d_cat.hom(E, G)
    label = cert["verification"]
    if label == "exhaustive" and k ** len(domain) > config.cap_colorings:
        _unreplayable("exhaustive decoding claim exceeds the coloring cap")
    for chi in _colorings(domain, k, label):
        try:
            witness.decode(chi)
        except RamseyCatError as exc:
            _fail(f"decoding failed: {exc}")


def _colorings(domain, k, label):
    if label == "exhaustive":
        for cs in itertools.product(range(1, k + 1), repeat=len(domain)):
            yield dict(zip(domain, cs))
        return
    seed = int(label[len("sampled("):-1])
    rng = random.Random(seed)
    for _ in range(256):
        yield {f: rng.randint(1, k) for f in domain}


def _replay_product(cert, config):
    from .transfer.product import ProductWitness

    body = cert["construction"]
    cats = [category_from_json(c) for c in body["factors"]]
    prod = ProductCategory(cats)
    objs = body["objects"]
    A, B, C = (prod.object_from_json(objs[n]) for n in ("A", "B", "C"))
    k = int(body["k"])
    witness = ProductWitness(tuple(cats), A, B, C, k)
    label = cert["verification"]
    domain = prod.hom(A, C)
    if label == "exhaustive" and k ** len(domain) > config.cap_colorings:
        _unreplayable("exhaustive decoding claim exceeds the coloring cap")
    if label == "budget-exceeded":
        return
    for chi in _colorings(domain, k, label):
        try:
            witness.decode(chi)
        except RamseyCatError as exc:
            _fail(f"decoding failed: {exc}")


def _replay_closure(cert, config):
    from .transfer.diagrams import BinaryDiagram, Cone, DiagramArrow, close_binary_diagram_rel

    body = cert["construction"]
    objs = body["objects"]
    A, B = structure_from_json(objs["A"]), structure_from_json(objs["B"])
    apex = tuple(structure_from_json(c) for c in body["apex"])
    legs = tuple(tuple(tuple(e) for e in leg) for leg in body["legs"])
    arrows = tuple(DiagramArrow(tuple(a["u"]), tuple(a["v"]), a["i"], a["j"]) for a in body["arrows"])
    closure = close_binary_diagram_rel(BinaryDiagram(A, B, arrows, len(legs)), Cone(apex, legs))
    if structure_to_json(closure.D) != body["output"] or [list(p) for p in closure.phis] != body["phis"]:
        _fail("closure differs")


def _replay_pipeline(cert, config):
    body = cert["construction"]
    for sub in body["trace"]:
        code, message = replay(sub, config)
        if code != OK:
            raise ReplayFailure(code, f"stage {sub['stage']}: {message}")
    if body["status"] == "witness":
        final = body["trace"][-1]
        if final["stage"] != "final" or final["construction"]["objects"]["C"] != body["witness"]:
            _fail("witness does not match the final stage")
        objs = body["objects"]
        if final["construction"]["objects"]["A"] != objs["A"] or final["construction"]["objects"]["B"] != objs["B"]:
            _fail("final stage is about different structures")


REPLAYERS: dict[str, Callable] = {
    "verify": _replay_arrow,
    "search": _replay_arrow,
    "chain": _replay_arrow,
    "gr": _replay_arrow,
    "unary": _replay_arrow,
    "final": _replay_arrow,
    "embed": _replay_embed,
    "dagger": _replay_dagger,
    "star": _replay_star,
    "sigma-reduce": _replay_sigma,
    "expand": _replay_expand,
    "phi": _replay_phi,
    "lift": _replay_lift,
    "phi-transfer": _replay_gr_target,
    "product": _replay_product,
    "closure": _replay_closure,
    "pipeline": _replay_pipeline,
}


def replay(cert: dict, config: RunConfig | None = None) -> tuple[int, str]:
    """Re-check every claim of a certificate: returns (exit code, message)."""
    config = config or DEFAULT_CONFIG
    try:
        stage = cert["stage"]
        objects = cert["construction"]["objects"]
        if set(objects) != set(cert["inputs"]):
            return FAILED, "input list does not match the embedded objects"
        for name, obj in objects.items():
            if digest(obj) != cert["inputs"][name]:
                return FAILED, f"input {name} does not match its hash"
        if cert["verification"] == "budget-exceeded" and stage not in ("pipeline", "product"):
            return OK, "no verification claim to replay"
        replayer = REPLAYERS.get(stage)
        if replayer is None:
            return UNREPLAYABLE, f"unknown stage {stage!r}"
        replayer(cert, config)
    except ReplayFailure as exc:
        return exc.code, str(exc)
    except (KeyError, TypeError, ValueError, RamseyCatError) as exc:
        return FAILED, f"malformed or inconsistent certificate: {type(exc).__name__}: {exc}"
    return OK, "all claims replayed"
