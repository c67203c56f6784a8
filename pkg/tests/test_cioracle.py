import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cayleyci.cioracle import (OracleError, SmallDigraph, cayley_canon, cayley_digraph, ci_scan, digraph_canon,
                               gl_enumerate, gl_order, group_elements)
from cayleyci.gfp import FpMat


def to_nx(g):
    G = nx.DiGraph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges())
    return G


def test_gl_orders():
    assert gl_order(2, 3) == 48
    assert gl_order(3, 2) == 168
    assert len(gl_enumerate(2, 3)) == 48
    assert len(gl_enumerate(1, 5)) == 4
    with pytest.raises(OracleError):
        gl_enumerate(2, 4)


def test_canon_examples():
    a = SmallDigraph.from_edges(3, [(0, 1), (1, 2)])
    b = SmallDigraph.from_edges(3, [(2, 0), (0, 1)])
    c = SmallDigraph.from_edges(3, [(0, 1), (2, 1)])
    assert digraph_canon(a) == digraph_canon(b)
    assert digraph_canon(a) != digraph_canon(c)
    with pytest.raises(OracleError):
        SmallDigraph.from_edges(2, [(0, 0)])
    with pytest.raises(OracleError):
        SmallDigraph(13, (0,) * 13)


def random_digraph(rng, n, density):
    return SmallDigraph.from_edges(n, [(i, j) for i in range(n) for j in range(n)
                                       if i != j and rng.random() < density])


def test_canon_invariant_under_relabelling():
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randint(1, 9)
        g = random_digraph(rng, n, rng.random())
        perm = list(range(n))
        rng.shuffle(perm)
        assert digraph_canon(g.relabel(perm)) == digraph_canon(g)


def test_canon_on_vertex_transitive_graphs():
    # Cayley digraphs are the hard case for refinement: every vertex looks alike
    el = group_elements(2, 3)
    idx = {g: i for i, g in enumerate(el)}
    rng = random.Random(3)
    for _ in range(30):
        S = set(rng.sample(range(1, 9), rng.randint(1, 5)))
        g = cayley_digraph(el, idx, S, 3)
        perm = list(range(9))
        rng.shuffle(perm)
        assert digraph_canon(g.relabel(perm)) == digraph_canon(g)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 7), st.data())
def test_canon_agrees_with_networkx(n, data):
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    e1 = data.draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    e2 = data.draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    g1, g2 = SmallDigraph.from_edges(n, e1), SmallDigraph.from_edges(n, e2)
    assert (digraph_canon(g1) == digraph_canon(g2)) == nx.is_isomorphic(to_nx(g1), to_nx(g2))


def test_scan_trivial_group():
    rep = ci_scan(1, 3)
    assert rep["connection_sets"] == 4 and rep["ci"]
    assert rep["orbits"] == 3  # {}, {1,2} and the orbit {{1},{2}}


def test_scan_z3_squared():
    rep = ci_scan(2, 3)
    assert rep["connection_sets"] == 256 and rep["orbits"] == 18
    assert rep["ci"] and rep["counterexample_count"] == 0 and not rep["definitional_failures"]


def test_scan_z2_cubed():
    rep = ci_scan(3, 2)
    assert rep["connection_sets"] == 128 and rep["ci"]


def test_scan_caps():
    with pytest.raises(OracleError):
        ci_scan(3, 3)
    with pytest.raises(OracleError):
        ci_scan(2, 4)


def test_identity_subgroup_control():
    rep = ci_scan(2, 3, matrices=[FpMat.identity(2, 3)])
    assert not rep["ci"] and rep["counterexample_count"] > 0
    assert rep["isomorphism_classes"] == 18


@pytest.mark.parametrize("n,p", [(1, 5), (1, 7), (2, 3)])
def test_scan_against_pairwise_networkx(n, p):
    """Count isomorphism classes with networkx and orbit classes by hand."""
    el = group_elements(n, p)
    idx = {g: i for i, g in enumerate(el)}
    nz = range(1, len(el))
    sets = [frozenset(s) for r in range(len(el)) for s in itertools.combinations(nz, r)]
    mats = gl_enumerate(n, p)
    act = [[idx[tuple(sum(row[k] * g[k] for k in range(n)) % p for row in M.rows)] for g in el] for M in mats]
    reps, seen = [], set()
    for s in sets:
        if s in seen:
            continue
        reps.append(s)
        seen |= {frozenset(a[x] for x in s) for a in act}
    graphs = [to_nx(cayley_digraph(el, idx, s, p)) for s in reps]
    iso_pairs = sum(nx.is_isomorphic(a, b) for a, b in itertools.combinations(graphs, 2))
    rep = ci_scan(n, p)
    assert rep["orbits"] == len(reps)
    assert rep["counterexample_count"] == iso_pairs == 0


def test_scan_with_zero_doubles_everything():
    rep = ci_scan(2, 3, include_zero=True)
    assert rep["connection_sets"] == 512 and rep["orbits"] == 2 * 18
    assert rep["ci"] and rep["counterexample_count"] == 0


def test_loop_flag_separates_graphs():
    el = group_elements(1, 3)
    idx = {g: i for i, g in enumerate(el)}
    assert cayley_canon(el, idx, {0, 1}, 3) != cayley_canon(el, idx, {1}, 3)
    assert cayley_canon(el, idx, {0, 1}, 3) == cayley_canon(el, idx, {0, 2}, 3)
