from __future__ import annotations

import pytest

from ramseycat import certificates as certs
from ramseycat.config import RunConfig
from ramseycat.errors import NoEmbedding, SignatureMismatch
from ramseycat.fincat import RelCategory, verify_arrow
from ramseycat.ordstruct import OrderedStructure, Signature, reduct
from ramseycat.transfer.pipeline import nesetril_rodl_pipeline
from ramseycat.transfer.reduction import expand_witness, sigma_reduce

R5 = Signature.of(*[(f"R{i}", 2) for i in range(1, 6)])
EMPTY = Signature(())


def test_sigma_reduce_groups_equal_and_empty_relations():
    B = OrderedStructure.build(R5, 3, {"R1": [(1, 2)], "R2": [(1, 2)]})
    A = OrderedStructure.build(R5, 2, {"R1": [(1, 2)], "R2": [(1, 2)]})
    red = sigma_reduce(A, B)
    assert red.sigma == Signature.of(("R1", 2))
    assert red.remap_dict() == {"R2": "R1", "R3": None, "R4": None, "R5": None}


def test_sigma_reduce_keeps_distinct_relations():
    sig = Signature.of(("P", 1), ("R", 2))
    B = OrderedStructure.build(sig, 2, {"P": [(1,)], "R": [(1, 2)]})
    red = sigma_reduce(B, B)
    assert red.sigma == sig and red.remap == ()


def test_sigma_reduce_requires_an_embedding():
    A = OrderedStructure.build(R5, 2, {"R3": [(1, 2)]})
    B = OrderedStructure.build(R5, 2, {"R1": [(1, 2)]})
    with pytest.raises(NoEmbedding):
        sigma_reduce(A, B)


def test_expand_copies_and_empties():
    B = OrderedStructure.build(R5, 3, {"R1": [(1, 2)], "R2": [(1, 2)]})
    red = sigma_reduce(B, B)
    C = OrderedStructure.build(red.sigma, 4, {"R1": [(1, 2), (3, 4)]})
    Cx = expand_witness(C, red, R5)
    assert Cx.rel("R2") == Cx.rel("R1") == C.rel("R1")
    assert all(not Cx.rel(f"R{i}") for i in (3, 4, 5))
    assert reduct(Cx, red.sigma) == C
    with pytest.raises(SignatureMismatch):
        expand_witness(OrderedStructure.build(R5, 1), red, R5)


def test_expand_with_no_remap_is_identity():
    sig = Signature.of(("R", 2))
    C = OrderedStructure.build(sig, 3, {"R": [(1, 3)]})
    red = sigma_reduce(C, C)
    assert expand_witness(C, red, sig) == C


def test_expanded_witness_still_arrows():
    sig = Signature.of(("R1", 1), ("R2", 1))
    A = OrderedStructure.build(sig, 1, {"R1": [(1,)], "R2": [(1,)]})
    B = OrderedStructure.build(sig, 2, {"R1": [(1,), (2,)], "R2": [(1,), (2,)]})
    red = sigma_reduce(A, B)
    assert red.remap_dict() == {"R2": "R1"}
    C = OrderedStructure.build(red.sigma, 3, {"R1": [(1,), (2,), (3,)]})
    Cx = expand_witness(C, red, sig)
    assert verify_arrow(RelCategory(sig), A, B, Cx, 2, "exhaustive").witnessed


def replay_all(trace, config):
    cert = trace.certificate(config, 7)
    assert certs.replay(cert, config)[0] == certs.OK
    for stage in trace.stages:
        assert certs.replay(stage, config)[0] == certs.OK, stage["stage"]
    return cert


def test_pipeline_point_into_point():
    P = OrderedStructure.build(EMPTY, 1)
    trace = nesetril_rodl_pipeline(P, P, 2)
    assert trace.status == "witness" and trace.witness.size == 1
    replay_all(trace, RunConfig())


def test_pipeline_point_into_two_chain():
    P, B = OrderedStructure.build(EMPTY, 1), OrderedStructure.build(EMPTY, 2)
    trace = nesetril_rodl_pipeline(P, B, 2)
    assert trace.status == "witness" and trace.witness.size == 3
    assert [c["stage"] for c in trace.stages] == ["embed", "dagger", "dagger", "sigma-reduce", "chain", "expand",
                                                  "star", "final"]
    replay_all(trace, RunConfig())


def test_pipeline_point_into_edge_stops_at_gr():
    sig = Signature.of(("R", 2))
    P = OrderedStructure.build(sig, 1)
    K2 = OrderedStructure.build(sig, 2, {"R": [(1, 2)]})
    trace = nesetril_rodl_pipeline(P, K2, 2, max_gr_n=5)
    assert trace.status == "budget-exceeded" and trace.failed_stage == "gr"
    assert trace.witness is None
    replay_all(trace, RunConfig())


def test_pipeline_with_unary_relations_uses_product_and_closure():
    sig = Signature.of(("P", 1), ("Q", 1))
    A = OrderedStructure.build(sig, 1, {"P": [(1,)]})
    B = OrderedStructure.build(sig, 2, {"P": [(1,)], "Q": [(2,)]})
    trace = nesetril_rodl_pipeline(A, B, 2)
    assert trace.status == "witness"
    stages = [c["stage"] for c in trace.stages]
    assert "product" in stages and "closure" in stages
    assert verify_arrow(RelCategory(sig), A, B, trace.witness, 2, "backtrack").witnessed
    replay_all(trace, RunConfig())


def test_pipeline_with_non_absolute_relation():
    sig = Signature.of(("R", 2))
    A = OrderedStructure.build(sig, 1, {"R": [(1, 1)]})
    trace = nesetril_rodl_pipeline(A, A, 3)
    assert trace.status == "witness" and trace.witness == A


def test_pipeline_rejects_non_embedding():
    sig = Signature.of(("R", 2))
    with pytest.raises(NoEmbedding):
        nesetril_rodl_pipeline(OrderedStructure.build(sig, 2, {"R": [(1, 2)]}), OrderedStructure.build(sig, 2), 2)


def test_pipeline_is_deterministic():
    P, B = OrderedStructure.build(EMPTY, 1), OrderedStructure.build(EMPTY, 2)
    cfg = RunConfig(seed=4)
    one = certs.dumps(nesetril_rodl_pipeline(P, B, 2, cfg).certificate(cfg, 7))
    two = certs.dumps(nesetril_rodl_pipeline(P, B, 2, cfg).certificate(cfg, 7))
    assert one == two


def test_pipeline_edge_into_edge_goes_through_gr():
    sig = Signature.of(("R", 2))
    K2 = OrderedStructure.build(sig, 2, {"R": [(1, 2)]})
    trace = nesetril_rodl_pipeline(K2, K2, 2)
    assert trace.status == "witness"
    stages = [c["stage"] for c in trace.stages]
    assert "gr" in stages and "phi-transfer" in stages
    assert verify_arrow(RelCategory(sig), K2, K2, trace.witness, 2, "backtrack").witnessed
    replay_all(trace, RunConfig())
