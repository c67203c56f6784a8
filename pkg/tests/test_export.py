import io
import itertools

import networkx as nx
import numpy as np
import pytest

from cayleyci.export import (ExportError, _SixPacker, is_symmetric, read_digraph6, read_graph6,
                             recount_edge_list, size_prefix, to_bytes, vertex_coords, write_graph6)
from cayleyci.families import AffineClass, ConnectionSet, build_family, undirected_closure
from cayleyci.gfp import FpVec


def small_set(p=3, symmetric=False):
    """du = 1, dv = 2: a 27-vertex Cayley digraph."""
    classes = [AffineClass("a", FpVec.of((1,), p), FpVec.of((1, 1), p), 1)]
    S = ConnectionSet("small", p, 1, 2, classes)
    return undirected_closure(S) if symmetric else S


def arcs_by_definition(S):
    """Arcs g -> h with h - g in S, straight from the member list."""
    p, dim = S.p, S.du + S.dv
    pts = list(itertools.product(range(p), repeat=dim))
    index = {g: i for i, g in enumerate(pts)}
    members = {tuple(int(x) for x in r) for r in S.member_array()}
    return len(pts), {(index[g], index[h]) for g in pts for h in pts
                      if tuple((b - a) % p for a, b in zip(g, h)) in members}


def test_vertex_numbering():
    c = vertex_coords(3, 3)
    assert c[0].tolist() == [0, 0, 0] and c[1].tolist() == [0, 0, 1] and c[9].tolist() == [1, 0, 0]


def test_size_prefix_examples():
    assert size_prefix(0) == b"?"
    assert size_prefix(30) == bytes([93])
    assert size_prefix(63) == b"~??~"
    assert size_prefix(12345) == bytes([126, 66, 63, 120])
    assert size_prefix(460175067) == bytes([126, 126, 63, 90, 90, 90, 90, 90])


def test_digraph6_reference_string():
    # 5 vertices, arcs 0->2, 0->4, 3->1, 3->4
    bits = np.zeros(25, dtype=np.uint8)
    for i, j in [(0, 2), (0, 4), (3, 1), (3, 4)]:
        bits[5 * i + j] = 1
    buf = io.BytesIO()
    buf.write(b"&" + size_prefix(5))
    pk = _SixPacker(buf)
    pk.push(bits)
    pk.close()
    assert buf.getvalue() == b"&DI?AO?"
    assert read_digraph6(buf.getvalue()) == (5, [(0, 2), (0, 4), (3, 1), (3, 4)])


def test_graph6_matches_networkx():
    S = small_set(symmetric=True)
    n, arcs = arcs_by_definition(S)
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_edges_from(arcs)
    ours = to_bytes(S, "graph6")
    assert ours == nx.to_graph6_bytes(G, header=False)
    m, edges = read_graph6(ours)
    assert m == n and len(edges) == G.number_of_edges()


def test_graph6_refuses_directed():
    with pytest.raises(ExportError):
        to_bytes(small_set(), "graph6")


def test_digraph6_round_trip():
    S = small_set()
    n, arcs = arcs_by_definition(S)
    m, edges = read_digraph6(to_bytes(S, "digraph6"))
    assert m == n and set(edges) == arcs


def test_edges_and_dimacs():
    S = small_set()
    n, arcs = arcs_by_definition(S)
    lines = to_bytes(S, "edges").splitlines()
    assert {tuple(map(int, l.split())) for l in lines} == arcs and len(lines) == len(arcs)
    dim = to_bytes(S, "dimacs").splitlines()
    assert dim[0] == b"p edge %d %d" % (n, len(arcs))
    Sb = small_set(symmetric=True)
    n, arcs = arcs_by_definition(Sb)
    dim = to_bytes(Sb, "dimacs").splitlines()
    assert dim[0] == b"p edge %d %d" % (n, len(arcs) // 2)
    und = {tuple(int(x) - 1 for x in l.split()[1:]) for l in dim[1:]}
    assert und == {(a, b) for a, b in arcs if a < b}


def test_empty_connection_set():
    S = ConnectionSet("empty", 3, 1, 1, [])
    assert is_symmetric(S)
    assert to_bytes(S, "dimacs") == b"p edge 9 0\n"
    assert to_bytes(S, "edges") == b""
    assert read_graph6(to_bytes(S, "graph6")) == (9, [])


def test_cap_and_format_errors():
    S, _, _ = build_family("rank2p3", 3)
    with pytest.raises(ExportError):
        to_bytes(S, "edges", cap=1000)
    with pytest.raises(ExportError):
        to_bytes(small_set(), "gml")


def test_recount_catches_a_bad_file(tmp_path):
    S = small_set()
    good = tmp_path / "good.txt"
    good.write_bytes(to_bytes(S, "edges"))
    rep = recount_edge_list(good, S)
    assert rep["ok"] and rep["lines"] == 27 * S.size
    lines = good.read_bytes().splitlines()
    lines[5] = b"0 0"
    bad = tmp_path / "bad.txt"
    bad.write_bytes(b"\n".join(lines) + b"\n")
    rep = recount_edge_list(bad, S, chunk=64)
    assert not rep["ok"] and rep["invalid_arcs"] == 1


def test_recount_chunking_agrees(tmp_path):
    S = small_set(p=5)
    f = tmp_path / "e.txt"
    f.write_bytes(to_bytes(S, "edges"))
    assert recount_edge_list(f, S, chunk=37) == recount_edge_list(f, S)


@pytest.mark.slow
def test_closure_graph6_edge_count_p3():
    S, _, _ = build_family("rank2p3", 3)
    Sbar = undirected_closure(S)
    data = to_bytes(Sbar, "graph6")
    body = np.frombuffer(data[4:-1], dtype=np.uint8) - 63
    assert size_prefix(3 ** 9) == data[:4]
    assert int(np.unpackbits(body).sum()) == 3 ** 9 * 1458 // 2 == 14348907
