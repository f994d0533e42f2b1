from __future__ import annotations

import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramseycat import ordstruct as os_
from ramseycat.errors import (
    KindMismatch,
    NotAbsolutelyOrdered,
    SignatureMismatch,
    SizeLimitExceeded,
    UnknownSymbol,
)
from ramseycat.ordstruct import (
    Hypergraph,
    OrderedStructure,
    SetOrder,
    Signature,
    canonical_dumps,
    compare_sets,
    downsets,
    enumerate_embeddings,
    gr_target_hypergraph,
    hypergraph_to_structure,
    is_absolutely_ordered,
    is_embedding,
    reduct,
    sort_sets,
    structure_from_json,
    structure_to_hypergraph,
    structure_to_json,
)

from oracles import all_graphs, colex_via_complement, downsets_naive, lex_less, naive_embeddings

R2 = Signature.of(("R", 2))
K2 = Hypergraph.build(2, 2, [(1, 2)])
PATH = Hypergraph.build(2, 3, [(1, 2), (2, 3)])


def powerset(L):
    return [frozenset(c) for r in range(len(L) + 1) for c in itertools.combinations(L, r)]


# embeddings -------------------------------------------------------------------

def test_identity_is_embedding():
    A = OrderedStructure.build(R2, 3, {"R": [(2, 1), (3, 3)]})
    assert is_embedding(A, A, (1, 2, 3))
    assert is_embedding(PATH, PATH, (1, 2, 3))


def test_edge_not_preserved_is_rejected():
    assert not is_embedding(K2, Hypergraph.build(2, 2), (1, 2))


def test_non_monotone_map_is_rejected():
    E = Hypergraph.build(2, 2)
    assert not is_embedding(E, E, (2, 1))


def test_embedding_kind_and_signature_checks():
    with pytest.raises(KindMismatch):
        is_embedding(K2, hypergraph_to_structure(K2), (1, 2))
    other = OrderedStructure.build(Signature.of(("S", 2)), 2)
    with pytest.raises(SignatureMismatch):
        is_embedding(OrderedStructure.build(R2, 2), other, (1, 2))


def test_enumerate_embeddings_examples():
    assert enumerate_embeddings(K2, PATH) == [(1, 2), (2, 3)]
    assert enumerate_embeddings(K2, Hypergraph.build(2, 4)) == []
    for a in range(0, 5):
        for b in range(0, 6):
            assert len(enumerate_embeddings(os_.chain(a), os_.chain(b))) == comb(b, a)


def test_enumerate_embeddings_cap():
    with pytest.raises(SizeLimitExceeded):
        enumerate_embeddings(os_.chain(3), os_.chain(10), cap=50)


def _rels(A):
    return {name: set(rel) for name, rel in A.relation_map().items()}


def test_embeddings_agree_with_naive_filter_on_graphs():
    graphs = [g for n in range(0, 5) for g in all_graphs(n)]
    targets = [g for n in range(0, 6) for g in all_graphs(n) if n <= 4] + list(itertools.islice(all_graphs(5), 0, 1024, 37))
    for n, edges in graphs[:40]:
        A = hypergraph_to_structure(Hypergraph.build(2, n, edges))
        for m, fedges in targets:
            B = hypergraph_to_structure(Hypergraph.build(2, m, fedges))
            assert enumerate_embeddings(A, B) == naive_embeddings(n, _rels(A), m, _rels(B))


def test_embeddings_agree_with_naive_filter_on_non_absolute_structures():
    import random

    rng = random.Random(7)
    sig = Signature.of(("R", 2), ("P", 1))
    for _ in range(150):
        def rand(size):
            rel = {t for t in itertools.product(range(1, size + 1), repeat=2) if rng.random() < 0.3}
            unary = {(x,) for x in range(1, size + 1) if rng.random() < 0.5}
            return OrderedStructure.build(sig, size, {"R": rel, "P": unary})

        A, B = rand(rng.randint(0, 3)), rand(rng.randint(0, 6))
        assert enumerate_embeddings(A, B) == naive_embeddings(A.size, _rels(A), B.size, _rels(B))


# set orders -------------------------------------------------------------------

def test_set_order_examples():
    L = [1, 2, 3]
    assert compare_sets(L, {1, 2}, {3}, SetOrder.ALEX) == -1
    assert compare_sets(L, {1, 3}, {2, 3}, SetOrder.COLEX) == -1
    assert compare_sets(L, {1}, {1, 2}, SetOrder.LEX) == -1
    assert compare_sets(L, {1, 2}, {1}, SetOrder.COLEX) == -1


@pytest.mark.parametrize("order", list(SetOrder))
def test_set_orders_are_strict_total_orders(order):
    for size in range(0, 5):
        L = list(range(1, size + 1))
        P = powerset(L)
        less = {(a, b): compare_sets(L, a, b, order) < 0 for a in P for b in P}
        for a in P:
            assert not less[a, a]
            for b in P:
                if a != b:
                    assert less[a, b] != less[b, a]
                    assert compare_sets(L, a, b, order) == -compare_sets(L, b, a, order)
        ranked = sort_sets(L, P, order)
        for i, a in enumerate(ranked):
            for b in ranked[i + 1:]:
                assert less[a, b]


def test_lex_matches_oracle_and_colex_duality():
    for size in range(0, 6):
        L = list(range(1, size + 1))
        P = powerset(L)
        for a in P:
            for b in P:
                assert (compare_sets(L, a, b, SetOrder.LEX) < 0) == lex_less(L, a, b)
                assert (compare_sets(L, a, b, SetOrder.COLEX) < 0) == colex_via_complement(L, a, b)


def test_set_orders_respect_non_integer_ground_sets():
    L = ["c", "a", "b"]
    assert compare_sets(L, {"c"}, {"a"}, SetOrder.ALEX) == -1
    assert compare_sets(L, {"c"}, {"a"}, SetOrder.LEX) == 1


def test_empty_set_convention_never_fires_in_comparisons(monkeypatch):
    calls = []
    real_min, real_max = os_._min_in, os_._max_in

    def spy_min(L, X, pos):
        calls.append(len(X))
        return real_min(L, X, pos)

    def spy_max(L, X, pos):
        calls.append(len(X))
        return real_max(L, X, pos)

    monkeypatch.setattr(os_, "_min_in", spy_min)
    monkeypatch.setattr(os_, "_max_in", spy_max)
    for size in range(0, 5):
        L = list(range(1, size + 1))
        P = powerset(L)
        for order in SetOrder:
            for a in P:
                for b in P:
                    compare_sets(L, a, b, order)
    assert calls and 0 not in calls
    # the convention itself: min of nothing is the top, max of nothing the bottom
    assert real_min([1, 2, 3], frozenset(), {1: 0, 2: 1, 3: 2}) == 3
    assert real_max([1, 2, 3], frozenset(), {1: 0, 2: 1, 3: 2}) == 1


# downsets and G(n) --------------------------------------------------------------

def test_downsets_examples():
    assert downsets(K2) == [frozenset({1}), frozenset({2}), frozenset({1, 2})]
    assert downsets(PATH) == [frozenset(s) for s in ({1}, {2}, {1, 2}, {3}, {2, 3})]
    assert downsets(Hypergraph.build(2, 4)) == [frozenset({i}) for i in range(1, 5)]


def test_downsets_agree_with_oracle():
    for b in (2, 3):
        for n in range(0, 5):
            slots = list(itertools.combinations(range(1, n + 1), b))
            for bits in itertools.product((0, 1), repeat=len(slots)):
                edges = [e for e, bit in zip(slots, bits) if bit]
                ds = downsets(Hypergraph.build(b, n, edges))
                assert set(ds) == downsets_naive(n, edges) and len(ds) == len(set(ds))
                L = list(range(1, n + 1))
                assert all(compare_sets(L, x, y, SetOrder.ALEX) < 0 for x, y in zip(ds, ds[1:]))


def test_gr_target_examples():
    G1 = gr_target_hypergraph(1, 2)
    assert G1.size == 2 and not G1.edges
    G2 = gr_target_hypergraph(2, 2)
    assert G2.size == 4
    # supersets come first, and {1} precedes {2} since min({1} - {2}) < min({2} - {1})
    assert os_.colex_subsets(2) == (frozenset({1, 2}), frozenset({1}), frozenset({2}), frozenset())
    assert sorted(G2.edges) == [(1, 2), (1, 3)]


def test_gr_target_empty_set_is_isolated_and_edges_are_meets():
    for n in range(1, 5):
        for b in (2, 3):
            G = gr_target_hypergraph(n, b)
            subsets = os_.colex_subsets(n)
            empty = subsets.index(frozenset()) + 1
            assert all(empty not in e for e in G.edges)
            for combo in itertools.combinations(range(1, 2 ** n + 1), b):
                meets = bool(frozenset.intersection(*(subsets[i - 1] for i in combo)))
                assert (combo in G.edges) == meets


def test_gr_target_cap():
    with pytest.raises(SizeLimitExceeded):
        gr_target_hypergraph(13, 2)


# bridge, reducts, JSON ----------------------------------------------------------------

def test_hypergraph_bridge_round_trip():
    assert hypergraph_to_structure(K2) == OrderedStructure.build(R2, 2, {"R": [(1, 2)]})
    assert hypergraph_to_structure(Hypergraph.build(2, 3)).relations == (frozenset(),)
    for n in range(0, 5):
        for _, edges in all_graphs(n):
            H = Hypergraph.build(2, n, edges)
            assert structure_to_hypergraph(hypergraph_to_structure(H)) == H
    with pytest.raises(NotAbsolutelyOrdered):
        structure_to_hypergraph(OrderedStructure.build(R2, 2, {"R": [(2, 1)]}))


def test_bridge_preserves_embedding_sets():
    for n, edges in all_graphs(3):
        A = Hypergraph.build(2, n, edges)
        for m, fedges in all_graphs(4):
            B = Hypergraph.build(2, m, fedges)
            assert enumerate_embeddings(A, B) == enumerate_embeddings(hypergraph_to_structure(A), hypergraph_to_structure(B))


def test_absolutely_ordered_examples():
    assert is_absolutely_ordered(OrderedStructure.build(R2, 2, {"R": [(1, 2)]}))
    assert not is_absolutely_ordered(OrderedStructure.build(R2, 2, {"R": [(2, 1)]}))
    assert is_absolutely_ordered(OrderedStructure.build(R2, 3))


def test_reducts():
    sig = Signature.of(("R", 2), ("P", 1))
    A = OrderedStructure.build(sig, 3, {"R": [(1, 2)], "P": [(3,)]})
    assert reduct(A, sig) == A
    assert reduct(A, []) == os_.chain(3)
    assert reduct(A, ["P"]).relation_map() == {"P": frozenset({(3,)})}
    with pytest.raises(UnknownSymbol):
        reduct(A, ["Q"])


def test_signature_validation():
    with pytest.raises(SignatureMismatch):
        Signature.of(("R", 2), ("R", 1))
    with pytest.raises(SignatureMismatch):
        Signature.of(("R", 0))


def test_structure_rejects_out_of_range_tuples():
    with pytest.raises(ValueError):
        OrderedStructure.build(R2, 2, {"R": [(1, 3)]})
    with pytest.raises(ValueError):
        Hypergraph.build(2, 3, [(1, 1)])


def test_json_relabels_arbitrary_universe():
    obj = {"kind": "rel", "signature": [["R", 2]], "universe": ["a", "b", "c"], "relations": {"R": [["c", "a"]]}}
    A = structure_from_json(obj)
    assert A.size == 3 and A.rel("R") == frozenset({(3, 1)})


@st.composite
def structures(draw):
    arities = draw(st.lists(st.integers(1, 3), max_size=3))
    sig = Signature(tuple((f"R{i}", a) for i, a in enumerate(arities)))
    size = draw(st.integers(0, 4))
    rels = {}
    for name, a in sig:
        pool = list(itertools.product(range(1, size + 1), repeat=a))
        rels[name] = draw(st.lists(st.sampled_from(pool), max_size=6)) if pool else []
    return OrderedStructure.build(sig, size, rels)


@settings(max_examples=200, deadline=None)
@given(structures())
def test_json_round_trip_is_byte_stable(A):
    text = canonical_dumps(structure_to_json(A))
    B = structure_from_json(structure_to_json(A))
    assert B == A
    assert canonical_dumps(structure_to_json(B)) == text


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 5), st.integers(2, 3), st.data())
def test_hypergraph_json_round_trip(n, b, data):
    slots = list(itertools.combinations(range(1, n + 1), b))
    edges = data.draw(st.lists(st.sampled_from(slots), max_size=5)) if slots else []
    H = Hypergraph.build(b, n, edges)
    assert structure_from_json(structure_to_json(H)) == H


def test_json_rejects_unknown_kind():
    with pytest.raises(KindMismatch):
        structure_from_json({"kind": "tree", "size": 2})
