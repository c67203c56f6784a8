import itertools
import json
from math import comb

import numpy as np
import pytest

from cayleyci.families import (AffineClass, ConnectionSet, FamilyError, GroupElement, PolyMap,
                               b_partners, build_family, subsets_O, undirected_closure)
from cayleyci.gfp import FpVec


@pytest.mark.parametrize("family,size", [("rank2p3", 729), ("rank4p2", 891), ("rankbinom", 314928)])
def test_sizes_p3(family, size):
    S, T, _ = build_family(family, 3)
    assert S.size == T.size == size


def test_size_rank2p3_p5():
    S, T, _ = build_family("rank2p3", 5)
    assert S.size == (2 * 6 + 1) * 5 ** 6 == 203125


@pytest.mark.parametrize("p", [3, 5])
def test_dimensions(p):
    S, _, phi = build_family("rank2p3", p)
    assert (S.du, S.dv, len(S.classes)) == (p + 1, p + 2, 2 * p + 3)
    S, _, phi = build_family("rank4p2", p)
    assert (S.du, S.dv, len(S.classes)) == (2 * p - 1, 2 * p - 1, 4 * p - 1)
    S, _, phi = build_family("rankbinom", p)
    assert (S.du, S.dv) == (2 * p - 1, comb(2 * p - 1, p))
    assert len(phi.components) == S.dv


def test_c_class_rhs():
    assert build_family("rank2p3", 3)[1].by_label("C_1").rhs == 1
    assert build_family("rank4p2", 3)[1].by_label("C_1").rhs == 2
    assert build_family("rankbinom", 3)[1].by_label("C_1").rhs == 1
    assert build_family("rank2p3", 3)[0].by_label("C_0").rhs == 0


def test_b_partners_examples():
    assert b_partners((1, 2, 3), 3) == [(1, 4, 5), (2, 4, 5), (3, 4, 5)]
    assert len(subsets_O(3)) == 10
    with pytest.raises(FamilyError):
        b_partners((1, 2), 3)


@pytest.mark.parametrize("p", [3, 5])
def test_b_partners_brute(p):
    universe = range(1, 2 * p)
    for k in itertools.combinations(universe, p):
        brute = [q for q in itertools.combinations(universe, p) if len(set(k) & set(q)) == 1]
        assert b_partners(k, p) == brute and len(brute) == p


def test_rankbinom_dv_cap():
    with pytest.raises(FamilyError):
        build_family("rankbinom", 7)
    with pytest.raises(FamilyError):
        build_family("nope", 3)


def _rank2p3_membership_oracle(u, v, p, rhs_c):
    """Membership written straight from the construction, one class at a time."""
    du = p + 1
    hits = []
    for i in range(1, du + 1):
        if u == tuple(int(j == i - 1) for j in range(du)) and (v[0] + v[i]) % p == 0:
            hits.append(f"A_{i}")
        if u == tuple(int(j != i - 1) for j in range(du)) and (sum(v) + v[i]) % p == 0:
            hits.append(f"B_{i}")
    if u == (1,) * du and sum(v) % p == rhs_c:
        hits.append("C")
    return hits


@pytest.mark.parametrize("which", ["S", "T"])
def test_rank2p3_membership_exhaustive_p3(which):
    p = 3
    S, T, _ = build_family("rank2p3", p)
    X = S if which == "S" else T
    rhs_c = 0 if which == "S" else 1
    count = 0
    for u in itertools.product(range(p), repeat=p + 1):
        for v in itertools.product(range(p), repeat=p + 2):
            hits = _rank2p3_membership_oracle(u, v, p, rhs_c)
            assert len(hits) <= 1
            g = GroupElement(FpVec(u, p), FpVec(v, p))
            assert X.contains(g) == bool(hits)
            count += bool(hits)
    assert count == X.size == 729


@pytest.mark.parametrize("family", ["rank2p3", "rank4p2"])
def test_member_array_distinct_and_counted(family):
    S, _, _ = build_family(family, 3)
    arr = S.member_array()
    assert len(arr) == S.size
    assert len({tuple(r) for r in arr}) == S.size
    assert not np.any(np.all(arr == 0, axis=1))


def test_contains_examples():
    S, T, _ = build_family("rank2p3", 3)
    g = GroupElement(FpVec((1, 0, 0, 0), 3), FpVec((1, 2, 0, 0, 0), 3))
    assert S.contains(g) and S.class_of(g).label == "A_1"
    assert not S.contains(GroupElement(FpVec((1, 0, 0, 0), 3), FpVec((1, 1, 0, 0, 0), 3)))
    c = GroupElement(FpVec((1, 1, 1, 1), 3), FpVec((1, 0, 0, 0, 0), 3))
    assert T.contains(c) and not S.contains(c)


def test_overlapping_classes_rejected():
    p = 3
    a = AffineClass("a", FpVec.basis(0, 1, p), FpVec.of((1, 0), p), 0)
    b = AffineClass("b", FpVec.basis(0, 1, p), FpVec.of((0, 1), p), 0)
    with pytest.raises(FamilyError):
        ConnectionSet("x", p, 1, 2, [a, b])
    same = AffineClass("c", FpVec.basis(0, 1, p), FpVec.of((2, 0), p), 0)
    assert a.relation(same) == "equal"
    with pytest.raises(FamilyError):
        AffineClass("z", FpVec.zero(1, p), FpVec.of((1, 0), p), 0)


@pytest.mark.parametrize("family", ["rank2p3", "rank4p2", "rankbinom"])
def test_closure(family):
    S, _, _ = build_family(family, 3)
    Sbar = undirected_closure(S)
    assert Sbar.size == 2 * S.size
    assert Sbar.same_set(Sbar.negated())
    again = undirected_closure(Sbar)
    assert again.same_set(Sbar) and again.size == Sbar.size


def test_closure_rejects_overlap():
    p = 3
    a = AffineClass("a", FpVec.of((1,), p), FpVec.of((1, 0), p), 0)
    b = AffineClass("b", FpVec.of((2,), p), FpVec.of((0, 1), p), 0)
    with pytest.raises(FamilyError):
        undirected_closure(ConnectionSet("x", p, 1, 2, [a, b]))


def test_json_round_trip(tmp_path):
    S, T, phi = build_family("rank2p3", 3)
    d = json.loads(json.dumps(S.to_json()))
    S2 = ConnectionSet.from_json(d)
    assert S2.same_set(S) and S2.size == d["size"] == 729
    phi2 = PolyMap.from_json(json.loads(json.dumps(phi.to_json())))
    assert all(a == b for a, b in zip(phi.components, phi2.components))
