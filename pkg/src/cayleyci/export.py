"""Write Cayley graphs of the constructions as benchmark files.

Vertices are numbered by the mixed-radix value of their coordinates
(u-part first, coordinate 0 most significant). There is an arc g -> h for
every h with h - g in the connection set.
"""

from __future__ import annotations

import io
from typing import BinaryIO, Iterator

import numpy as np

from .families import ConnectionSet

FORMATS = ("edges", "digraph6", "graph6", "dimacs")
DEFAULT_EDGE_CAP = 2 * 10 ** 7


class ExportError(ValueError):
    pass


def vertex_coords(p: int, dim: int) -> np.ndarray:
    """Row i holds the coordinates of vertex i."""
    n = p ** dim
    idx = np.arange(n, dtype=np.int64)
    out = np.empty((n, dim), dtype=np.int64)
    for k in range(dim - 1, -1, -1):
        out[:, k] = idx % p
        idx //= p
    return out


def _weights(p: int, dim: int) -> np.ndarray:
    return p ** np.arange(dim - 1, -1, -1, dtype=np.int64)


def is_symmetric(S: ConnectionSet) -> bool:
    return S.same_set(S.negated())


def neighbours(S: ConnectionSet) -> Iterator[np.ndarray]:
    """For each vertex g in order, the sorted indices of g + s, s in S."""
    p, dim = S.p, S.du + S.dv
    coords = vertex_coords(p, dim)
    members = S.member_array()
    w = _weights(p, dim)
    for g in range(p ** dim):
        yield np.sort(((coords[g] + members) % p) @ w)


def _check_cap(S: ConnectionSet, cap: int, undirected: bool = False) -> int:
    """Number of arcs; the cap applies to edges when they are written once."""
    arcs = p_pow(S) * S.size
    written = arcs // 2 if undirected else arcs
    if written > cap:
        raise ExportError(f"{written} edges exceeds the cap of {cap}")
    return arcs


def p_pow(S: ConnectionSet) -> int:
    return S.p ** (S.du + S.dv)


def write_edges(S: ConnectionSet, out: BinaryIO, cap: int = DEFAULT_EDGE_CAP) -> int:
    _check_cap(S, cap)
    n = p_pow(S)
    ids = [b"%d" % i for i in range(n)]
    count = 0
    for g, nb in enumerate(neighbours(S)):
        head = ids[g] + b" "
        out.write(b"".join([head + ids[h] + b"\n" for h in nb.tolist()]))
        count += len(nb)
    return count


def write_dimacs(S: ConnectionSet, out: BinaryIO, cap: int = DEFAULT_EDGE_CAP) -> int:
    """``p edge n m`` header then ``e u v`` lines, 1-indexed.

    Symmetric sets are written as undirected edges (each once, u < v);
    otherwise every arc gets its own line.
    """
    sym = is_symmetric(S)
    arcs = _check_cap(S, cap, sym)
    n = p_pow(S)
    m = arcs // 2 if sym else arcs
    out.write(b"p edge %d %d\n" % (n, m))
    count = 0
    for g, nb in enumerate(neighbours(S)):
        if sym:
            nb = nb[nb > g]
        out.write(b"".join([b"e %d %d\n" % (g + 1, h + 1) for h in nb.tolist()]))
        count += len(nb)
    assert count == m
    return count


def size_prefix(n: int) -> bytes:
    """The N(n) header shared by graph6 and digraph6."""
    if n < 0:
        raise ExportError("negative vertex count")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return b"~" + bytes(63 + (n >> s & 63) for s in (12, 6, 0))
    if n <= 68719476735:
        return b"~~" + bytes(63 + (n >> s & 63) for s in (30, 24, 18, 12, 6, 0))
    raise ExportError(f"{n} vertices is too many for graph6/digraph6")


class _SixPacker:
    """Buffers bits and writes them six at a time as printable bytes."""

    def __init__(self, out: BinaryIO):
        self.out = out
        self.pending = np.zeros(0, dtype=np.uint8)
        self.weights = np.array([32, 16, 8, 4, 2, 1], dtype=np.uint8)

    def push(self, bits: np.ndarray):
        buf = np.concatenate([self.pending, bits.astype(np.uint8)])
        k = len(buf) // 6 * 6
        if k:
            self.out.write((buf[:k].reshape(-1, 6) @ self.weights + 63).astype(np.uint8).tobytes())
        self.pending = buf[k:]

    def close(self):
        if len(self.pending):
            pad = np.zeros(6 - len(self.pending), dtype=np.uint8)
            self.push(pad)


def write_digraph6(S: ConnectionSet, out: BinaryIO, cap: int = DEFAULT_EDGE_CAP) -> int:
    arcs = _check_cap(S, cap)
    n = p_pow(S)
    out.write(b"&" + size_prefix(n))
    pack = _SixPacker(out)
    row = np.zeros(n, dtype=np.uint8)
    for nb in neighbours(S):
        row[:] = 0
        row[nb] = 1
        pack.push(row)
    pack.close()
    out.write(b"\n")
    return arcs


def write_graph6(S: ConnectionSet, out: BinaryIO, cap: int = DEFAULT_EDGE_CAP) -> int:
    if not is_symmetric(S):
        raise ExportError("graph6 needs an undirected graph; export the closure (Sbar/Tbar)")
    arcs = _check_cap(S, cap, True)
    n = p_pow(S)
    out.write(size_prefix(n))
    pack = _SixPacker(out)
    row = np.zeros(n, dtype=np.uint8)
    # upper triangle column by column = row j restricted to i < j, by symmetry
    for j, nb in enumerate(neighbours(S)):
        if j == 0:
            continue
        row[:] = 0
        row[nb] = 1
        pack.push(row[:j])
    pack.close()
    out.write(b"\n")
    return arcs // 2


WRITERS = {"edges": write_edges, "digraph6": write_digraph6,
           "graph6": write_graph6, "dimacs": write_dimacs}


def export(S: ConnectionSet, fmt: str, out: BinaryIO, cap: int = DEFAULT_EDGE_CAP) -> int:
    if fmt not in WRITERS:
        raise ExportError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    return WRITERS[fmt](S, out, cap)


def _parse_size(data: bytes) -> tuple[int, bytes]:
    if data[0] != 126:
        return data[0] - 63, data[1:]
    if data[1] != 126:
        return sum((c - 63) << s for c, s in zip(data[1:4], (12, 6, 0))), data[4:]
    return sum((c - 63) << s for c, s in zip(data[2:8], (30, 24, 18, 12, 6, 0))), data[8:]


def _unpack(body: bytes) -> np.ndarray:
    vals = np.frombuffer(body, dtype=np.uint8) - 63
    return np.unpackbits(vals[:, None], axis=1)[:, 2:].reshape(-1)


def read_digraph6(line: bytes) -> tuple[int, list[tuple[int, int]]]:
    line = line.strip()
    if line.startswith(b">>digraph6<<"):
        line = line[12:]
    if not line.startswith(b"&"):
        raise ExportError("not a digraph6 string")
    n, body = _parse_size(line[1:])
    bits = _unpack(body)[: n * n].reshape(n, n)
    return n, [tuple(map(int, e)) for e in np.argwhere(bits)]


def read_graph6(line: bytes) -> tuple[int, list[tuple[int, int]]]:
    line = line.strip()
    if line.startswith(b">>graph6<<"):
        line = line[10:]
    n, body = _parse_size(line)
    bits = _unpack(body)
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return n, edges


def recount_edge_list(path, S: ConnectionSet, chunk: int = 1 << 26) -> dict:
    """Stream an edge-list file back in and check it against S.

    Counts lines, checks every arc g -> h has h - g in S, and that each
    vertex has exactly |S| distinct out-neighbours.
    """
    p, dim = S.p, S.du + S.dv
    n = p ** dim
    coords = vertex_coords(p, dim)
    w = _weights(p, dim)
    member = np.zeros(n, dtype=bool)
    member[(S.member_array() % p) @ w] = True
    outdeg = np.zeros(n, dtype=np.int64)
    lines = bad = dup = 0
    last = None
    with open(path, "rb") as fh:
        tail = b""
        while True:
            block = fh.read(chunk)
            if not block and not tail:
                break
            data = tail + block
            if block:
                cut = data.rfind(b"\n") + 1
                data, tail = data[:cut], data[cut:]
            else:
                tail = b""
            if not data:
                continue
            pairs = np.array(data.split(), dtype=np.int64).reshape(-1, 2)
            g, h = pairs[:, 0], pairs[:, 1]
            lines += len(pairs)
            diff = ((coords[h] - coords[g]) % p) @ w
            bad += int((~member[diff]).sum())
            np.add.at(outdeg, g, 1)
            seq = g * n + h
            if last is not None:
                seq = np.concatenate([[last], seq])
            dup += int((np.diff(seq) <= 0).sum())
            last = int(seq[-1])
    ok = bad == 0 and dup == 0 and bool((outdeg == S.size).all())
    return {"lines": lines, "invalid_arcs": bad, "out_of_order_or_duplicate": dup,
            "uniform_out_degree": bool((outdeg == S.size).all()), "ok": ok}


def to_bytes(S: ConnectionSet, fmt: str, cap: int = DEFAULT_EDGE_CAP) -> bytes:
    buf = io.BytesIO()
    export(S, fmt, buf, cap)
    return buf.getvalue()
