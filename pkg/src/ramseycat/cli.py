"""Command-line front end.

Exit codes: ``verify`` returns 0 (witnessed), 1 (refuted), 2 (budget
exceeded); ``search`` returns 0 (found), 1 (none in range), 2 (budget);
``check`` returns 0 (replayed), 1 (a claim fails), 2 (unreplayable).
Parse and usage errors return 3.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from typing import Sequence

from . import certificates as certs
from . import paramwords as pw
from .config import RunConfig
from .errors import BudgetExceeded, Exhausted, RamseyCatError, SizeLimitExceeded
from .fincat import (
    Category,
    ChainCategory,
    GRCategory,
    HypergraphCategory,
    ProductCategory,
    RelCategory,
    search_witness,
    verify_arrow,
)
from .ordstruct import (
    Hypergraph,
    OrderedStructure,
    enumerate_embeddings,
    structure_from_json,
    structure_to_json,
)

USAGE_ERROR = 3
STAGES = ("phi", "lift", "product", "closure", "dagger", "star", "sigma-reduce", "pipeline")


class UsageError(Exception):
    pass


# input ----------------------------------------------------------------------

def load_json(arg: str):
    """A JSON value from a file path, or the argument itself parsed as JSON."""
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = arg
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse {arg!r} as JSON: {exc}") from None


def category_for(obj, kind: str | None = None) -> Category:
    """The category an object JSON (or a bare integer with ``kind``) lives in."""
    if isinstance(obj, int):
        kind = kind or "chain"
    elif isinstance(obj, dict):
        kind = kind or obj.get("kind")
    elif isinstance(obj, list):
        return ProductCategory([category_for(x, kind) for x in obj])
    if kind == "chain":
        return ChainCategory()
    if kind == "gr":
        return GRCategory()
    if kind == "hypergraph":
        if not isinstance(obj, dict) or "b" not in obj:
            raise UsageError("hypergraph objects need a 'b' field")
        return HypergraphCategory(int(obj["b"]))
    if kind == "rel":
        if not isinstance(obj, dict):
            raise UsageError("relational objects must be JSON structures")
        A = structure_from_json(obj)
        return RelCategory(A.signature, absolute=bool(obj.get("absolute", False)))
    raise UsageError(f"unknown object kind {kind!r}")


def parse_object(cat: Category, obj):
    if isinstance(cat, ProductCategory):
        if not isinstance(obj, list) or len(obj) != len(cat.factors):
            raise UsageError("product objects are JSON lists with one entry per factor")
        return tuple(parse_object(c, x) for c, x in zip(cat.factors, obj))
    if isinstance(obj, int) and isinstance(cat, (ChainCategory, GRCategory)):
        return obj
    return cat.object_from_json(obj)


def load_structure(arg: str):
    obj = load_json(arg)
    if not isinstance(obj, dict):
        raise UsageError(f"{arg!r} is not a JSON structure")
    return structure_from_json(obj)


def config_from(args) -> RunConfig:
    try:
        return RunConfig(
            cap_hom=args.cap_hom,
            cap_colorings=args.cap_colorings,
            cap_nodes=args.cap_nodes,
            mode=args.mode,
            seed=args.seed,
            out=args.out,
            jobs=args.jobs,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def emit(obj, config: RunConfig) -> None:
    text = certs.dumps(obj)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# commands -------------------------------------------------------------------

def _arrow_inputs(args):
    A_obj, B_obj = load_json(args.A), load_json(args.B)
    cat = category_for(A_obj, args.category)
    return cat, A_obj, B_obj, parse_object(cat, A_obj), parse_object(cat, B_obj)


def cmd_verify(args) -> int:
    config = config_from(args)
    cat, _, _, A, B = _arrow_inputs(args)
    C = parse_object(cat, load_json(args.C))
    try:
        report = verify_arrow(cat, A, B, C, args.k, config.mode, config)
    except (BudgetExceeded, SizeLimitExceeded) as exc:
        objects = {n: cat.object_to_json(x) for n, x in (("A", A), ("B", B), ("C", C))}
        emit(certs.make_certificate("verify", objects, {"category": cat.to_json(), "k": args.k, "detail": str(exc),
                                                        "config": config.to_json()},
                                    "budget-exceeded", config.seed), config)
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    cert = certs.arrow_certificate("verify", cat, A, B, C, args.k, report, config.seed)
    cert["construction"]["config"] = config.to_json()
    emit(cert, config)
    print(report.verdict.value, file=sys.stderr)
    return 0 if report.witnessed else 1


def _hypergraph_candidates(b: int, lo: int, hi: int):
    for n in range(lo, hi + 1):
        slots = list(itertools.combinations(range(1, n + 1), b))
        for bits in itertools.product((0, 1), repeat=len(slots)):
            yield Hypergraph.build(b, n, [e for e, bit in zip(slots, bits) if bit])


def _rel_candidates(cat: RelCategory, lo: int, hi: int):
    for n in range(lo, hi + 1):
        pools = []
        for _, arity in cat.signature:
            if cat.absolute:
                pools.append(list(itertools.combinations(range(1, n + 1), arity)))
            else:
                pools.append(list(itertools.product(range(1, n + 1), repeat=arity)))
        flat = [(i, t) for i, pool in enumerate(pools) for t in pool]
        for bits in itertools.product((0, 1), repeat=len(flat)):
            rels = [set() for _ in pools]
            for (i, t), bit in zip(flat, bits):
                if bit:
                    rels[i].add(t)
            yield OrderedStructure(cat.signature, n, tuple(frozenset(r) for r in rels))


def candidates_for(cat: Category, B, max_size: int):
    if isinstance(cat, (ChainCategory, GRCategory)):
        return range(B, max_size + 1)
    if isinstance(cat, HypergraphCategory):
        return _hypergraph_candidates(cat.b, B.size, max_size)
    if isinstance(cat, RelCategory):
        return _rel_candidates(cat, B.size, max_size)
    raise UsageError("search supports chain, gr, hypergraph and rel objects")


def cmd_search(args) -> int:
    config = config_from(args)
    cat, _, _, A, B = _arrow_inputs(args)
    try:
        C, report = search_witness(cat, A, B, args.k, candidates_for(cat, B, args.max_size), config.mode, config)
    except Exhausted as exc:
        print(f"no witness up to size {args.max_size}: {exc}", file=sys.stderr)
        return 1
    except (BudgetExceeded, SizeLimitExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    cert = certs.arrow_certificate("search", cat, A, B, C, args.k, report, config.seed)
    cert["construction"]["config"] = config.to_json()
    emit(cert, config)
    return 0


def _transfer_phi(args, config):
    from .transfer.preadjunction import phi

    H = load_structure(args.hypergraph)
    if not isinstance(H, Hypergraph):
        raise UsageError("phi needs a hypergraph")
    u = pw.parse(args.word)
    image = phi(H, u.n, u)
    return certs.make_certificate("phi", {"H": structure_to_json(H)}, {"word": str(u), "image": list(image)},
                                  "exhaustive", config.seed)


def _transfer_lift(args, config):
    from .transfer.preadjunction import lift_word

    A, B = load_structure(args.A), load_structure(args.B)
    if args.embedding:
        f = tuple(int(x) for x in args.embedding.split(","))
    else:
        homs = enumerate_embeddings(B, A)
        if not homs:
            raise UsageError("B does not embed into A")
        f = homs[0]
    h = lift_word(f, A, B)
    return certs.make_certificate("lift", {"A": structure_to_json(A), "B": structure_to_json(B)},
                                  {"embedding": list(f), "word": str(h)}, "exhaustive", config.seed)


def _transfer_product(args, config):
    from .transfer.preadjunction import iter_colorings
    from .transfer.product import find_product_witness, product_arrow

    A_obj, B_obj = load_json(args.A), load_json(args.B)
    if not isinstance(A_obj, list):
        raise UsageError("product objects are JSON lists with one entry per factor")
    prod = category_for(A_obj, args.category)
    A, B = parse_object(prod, A_obj), parse_object(prod, B_obj)
    cats = prod.factors
    C = parse_object(prod, load_json(args.C)) if args.C else find_product_witness(cats, A, B, args.k, config)
    witness, summary = product_arrow(cats, A, B, C, args.k, config)
    label, colorings = iter_colorings(prod.hom(A, C), args.k, config)
    count = 0
    for chi in colorings:
        witness.decode(chi)
        count += 1
    objects = {"A": prod.object_to_json(A), "B": prod.object_to_json(B), "C": prod.object_to_json(C)}
    construction = {"factors": [c.to_json() for c in cats], "k": args.k, "component_colors": summary["component_colors"],
                    "components": summary["components"], "decoded_colorings": count}
    return certs.make_certificate("product", objects, construction, label, config.seed)


def _transfer_closure(args, config):
    from .transfer.diagrams import BinaryDiagram, Cone, DiagramArrow, close_binary_diagram_rel

    spec = load_json(args.diagram)
    try:
        A, B = structure_from_json(spec["A"]), structure_from_json(spec["B"])
        apex = tuple(structure_from_json(c) for c in spec["apex"])
        legs = tuple(tuple(tuple(e) for e in leg) for leg in spec["legs"])
        arrows = tuple(DiagramArrow(tuple(a["u"]), tuple(a["v"]), a["i"], a["j"]) for a in spec.get("arrows", []))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"diagram file is missing {exc}") from None
    closure = close_binary_diagram_rel(BinaryDiagram(A, B, arrows, len(legs)), Cone(apex, legs))
    construction = {
        "apex": [structure_to_json(c) for c in apex],
        "legs": [[list(e) for e in leg] for leg in legs],
        "arrows": [{"u": list(a.u), "v": list(a.v), "i": a.i, "j": a.j} for a in arrows],
        "output": structure_to_json(closure.D),
        "phis": [list(p) for p in closure.phis],
    }
    return certs.make_certificate("closure", {"A": structure_to_json(A), "B": structure_to_json(B)},
                                  construction, "exhaustive", config.seed)


def _transfer_dagger(args, config):
    from .transfer.quasiorder import dagger

    A = load_structure(args.A)
    return certs.make_certificate("dagger", {"A": structure_to_json(A)},
                                  {"output": structure_to_json(dagger(A))}, "exhaustive", config.seed)


def _transfer_star(args, config):
    from .transfer.quasiorder import star

    B = load_structure(args.B)
    return certs.make_certificate("star", {"B": structure_to_json(B)},
                                  {"output": structure_to_json(star(B))}, "exhaustive", config.seed)


def _transfer_sigma(args, config):
    from .transfer.reduction import sigma_reduce

    A, B = load_structure(args.A), load_structure(args.B)
    red = sigma_reduce(A, B)
    return certs.make_certificate("sigma-reduce", {"A": structure_to_json(A), "B": structure_to_json(B)},
                                  {"reduction": red.to_json()}, "exhaustive", config.seed)


def _transfer_pipeline(args, config):
    from .transfer.pipeline import nesetril_rodl_pipeline

    A, B = load_structure(args.A), load_structure(args.B)
    if isinstance(A, Hypergraph) or isinstance(B, Hypergraph):
        from .ordstruct import hypergraph_to_structure

        A = hypergraph_to_structure(A) if isinstance(A, Hypergraph) else A
        B = hypergraph_to_structure(B) if isinstance(B, Hypergraph) else B
    trace = nesetril_rodl_pipeline(A, B, args.k, config, args.max_gr_n)
    return trace.certificate(config, args.max_gr_n)


TRANSFERS = {
    "phi": _transfer_phi,
    "lift": _transfer_lift,
    "product": _transfer_product,
    "closure": _transfer_closure,
    "dagger": _transfer_dagger,
    "star": _transfer_star,
    "sigma-reduce": _transfer_sigma,
    "pipeline": _transfer_pipeline,
}

REQUIRED = {
    "phi": ("hypergraph", "word"),
    "lift": ("A", "B"),
    "product": ("A", "B"),
    "closure": ("diagram",),
    "dagger": ("A",),
    "star": ("B",),
    "sigma-reduce": ("A", "B"),
    "pipeline": ("A", "B"),
}


def cmd_transfer(args) -> int:
    config = config_from(args)
    missing = [name for name in REQUIRED[args.stage] if getattr(args, name) is None]
    if missing:
        raise UsageError(f"transfer {args.stage} needs " + ", ".join(f"--{m}" if len(m) > 1 else f"-{m}" for m in missing))
    try:
        cert = TRANSFERS[args.stage](args, config)
    except (BudgetExceeded, SizeLimitExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    emit(cert, config)
    if cert["verification"] == "budget-exceeded":
        print(f"{args.stage}: budget exceeded at {cert['construction'].get('failed_stage')}", file=sys.stderr)
    return 0


def cmd_check(args) -> int:
    config = config_from(args)
    cert = load_json(args.certificate)
    if not isinstance(cert, dict):
        raise UsageError("a certificate is a JSON object")
    code, message = certs.replay(cert, config)
    print(("ok: " if code == 0 else "fail: ") + message, file=sys.stderr)
    return code


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    defaults = RunConfig()
    common.add_argument("--cap-hom", type=int, default=defaults.cap_hom, help="largest hom(A, C) for exhaustive mode")
    common.add_argument("--cap-colorings", type=int, default=defaults.cap_colorings)
    common.add_argument("--cap-nodes", type=int, default=defaults.cap_nodes, help="node budget of the backtracking search")
    common.add_argument("--mode", choices=("exhaustive", "backtrack"), default=defaults.mode)
    common.add_argument("--seed", type=int, default=defaults.seed)
    common.add_argument("--jobs", type=int, default=defaults.jobs)
    common.add_argument("--out", default=None, help="write the JSON result here instead of stdout")

    parser = argparse.ArgumentParser(prog="ramseycat", description="Structural Ramsey arrows with checkable certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def arrow_args(p):
        p.add_argument("-A", required=True, help="object JSON (file or inline)")
        p.add_argument("-B", required=True)
        p.add_argument("-k", type=int, default=2, help="number of colors")
        p.add_argument("--category", choices=("chain", "gr", "hypergraph", "rel"), default=None,
                       help="category of bare integer objects (default chain)")

    p = sub.add_parser("verify", parents=[common], help="decide C -> (B)^A_k")
    arrow_args(p)
    p.add_argument("-C", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[common], help="smallest C with C -> (B)^A_k")
    arrow_args(p)
    p.add_argument("--max-size", type=int, default=8)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("transfer", parents=[common], help="run one transfer stage and write its certificate")
    p.add_argument("stage", choices=STAGES)
    p.add_argument("-A")
    p.add_argument("-B")
    p.add_argument("-C")
    p.add_argument("-k", type=int, default=2)
    p.add_argument("--category", choices=("chain", "gr", "hypergraph", "rel"), default=None)
    p.add_argument("--hypergraph")
    p.add_argument("--word")
    p.add_argument("--embedding", help="comma separated images, e.g. 1,3")
    p.add_argument("--diagram")
    p.add_argument("--max-gr-n", type=int, default=7)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("check", parents=[common], help="replay a certificate")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else USAGE_ERROR
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (RamseyCatError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
