"""Reduction to a finite nonredundant sublanguage and expansion back."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ..errors import NoEmbedding, SignatureMismatch, UnknownSymbol
from ..ordstruct import OrderedStructure, Signature, iter_embeddings


@dataclass(frozen=True)
class SigmaReduction:
    sigma: Signature
    remap: tuple[tuple[str, Optional[str]], ...]

    def remap_dict(self) -> dict[str, Optional[str]]:
        return dict(self.remap)

    def to_json(self) -> dict:
        return {
            "sigma": [[n, a] for n, a in self.sigma],
            "remap": {name: target for name, target in self.remap},
        }


def sigma_reduce(A: OrderedStructure, B: OrderedStructure) -> SigmaReduction:
    """Keep one representative per distinct nonempty relation of ``B``.

    Every other symbol is remapped to the earliest kept symbol with the same
    extension on ``B``, or to ``None`` when it is empty on ``B``.
    """
    if A.signature != B.signature:
        raise SignatureMismatch("A and B must share a signature")
    if next(iter_embeddings(A, B), None) is None:
        raise NoEmbedding("A does not embed into B")
    kept: list[tuple[str, int]] = []
    remap: list[tuple[str, Optional[str]]] = []
    rb = B.relation_map()
    ra = A.relation_map()
    for name, arity in B.signature:
        if not rb[name]:
            assert not ra[name], f"{name} is empty on B but not on A"
            remap.append((name, None))
            continue
        for s, _ in kept:
            if rb[s] == rb[name]:
                assert ra[s] == ra[name], f"{name} and {s} agree on B but not on A"
                remap.append((name, s))
                break
        else:
            kept.append((name, arity))
    return SigmaReduction(Signature(tuple(kept)), tuple(remap))


def expand_witness(C: OrderedStructure, reduction: SigmaReduction, theta: Signature) -> OrderedStructure:
    """Extend a structure over the kept symbols to the full language."""
    if C.signature != reduction.sigma:
        raise SignatureMismatch("witness must be over the reduced signature")
    kept = C.relation_map()
    remap: Mapping[str, Optional[str]] = reduction.remap_dict()
    rels = []
    for name, arity in theta:
        if name in kept:
            rels.append(kept[name])
        elif name in remap:
            target = remap[name]
            if target is None:
                rels.append(frozenset())
            else:
                if target not in kept or reduction.sigma.arity(target) != arity:
                    raise SignatureMismatch(f"{name} cannot be copied from {target}")
                rels.append(kept[target])
        else:
            raise UnknownSymbol(name)
    return OrderedStructure(theta, C.size, tuple(rels))
