"""Brute-force ground truth on tiny elementary abelian groups.

Compares graph isomorphism of Cayley digraphs (via a canonical form) with
Cayley isomorphism (via the action of GL(n, p)) over every connection set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .gfp import FpMat, is_prime

MAX_VERTICES = 12
SCAN_VERTEX_CAP = 10
GL_CAP = 10 ** 6


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class SmallDigraph:
    n: int
    rows: tuple[int, ...]  # rows[i] has bit j set iff i -> j

    def __post_init__(self):
        if self.n > MAX_VERTICES:
            raise OracleError(f"{self.n} vertices exceeds the limit of {MAX_VERTICES}")
        if len(self.rows) != self.n:
            raise OracleError("adjacency has the wrong number of rows")
        if any(r >> i & 1 for i, r in enumerate(self.rows)):
            raise OracleError("self-loops are not allowed")

    @classmethod
    def from_edges(cls, n: int, edges) -> "SmallDigraph":
        rows = [0] * n
        for a, b in edges:
            rows[a] |= 1 << b
        return cls(n, tuple(rows))

    def has(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def edges(self):
        return [(i, j) for i in range(self.n) for j in range(self.n) if self.has(i, j)]

    def relabel(self, perm) -> "SmallDigraph":
        """Vertex i becomes perm[i]."""
        return SmallDigraph.from_edges(self.n, [(perm[i], perm[j]) for i, j in self.edges()])


def _refine(g: SmallDigraph, cells: list[list[int]], cols: list[int]) -> list[list[int]]:
    """Split cells by (out, in) neighbour counts per cell until stable."""
    n = g.n
    while True:
        where = [0] * n
        for ci, cell in enumerate(cells):
            for v in cell:
                where[v] = ci
        new = []
        for cell in cells:
            if len(cell) == 1:
                new.append(cell)
                continue
            sig = {}
            for v in cell:
                out = [0] * len(cells)
                inn = [0] * len(cells)
                row = g.rows[v]
                for u in range(n):
                    if row >> u & 1:
                        out[where[u]] += 1
                    if cols[v] >> u & 1:
                        inn[where[u]] += 1
                sig.setdefault((tuple(out), tuple(inn)), []).append(v)
            new.extend(sig[k] for k in sorted(sig))
        if len(new) == len(cells):
            return new
        cells = new


def _code(g: SmallDigraph, order: list[int]) -> bytes:
    bits = 0
    for v in order:
        row = g.rows[v]
        for u in order:
            bits = bits << 1 | (row >> u & 1)
    nbits = g.n * g.n
    return bytes([g.n]) + bits.to_bytes((nbits + 7) // 8, "big")


def _orbits(points: list[int], gens: list[tuple[int, ...]]) -> dict[int, int]:
    parent = {x: x for x in points}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x in points:
            y = g[x]
            if y in parent:
                a, b = find(x), find(y)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return {x: find(x) for x in points}


def digraph_canon(g: SmallDigraph) -> bytes:
    """Canonical form: equal for two digraphs iff they are isomorphic.

    Individualization-refinement search; the form is the smallest adjacency
    code over the leaves of the search tree. Subtrees that are images of an
    already explored one under a known automorphism are skipped.
    """
    n = g.n
    if n == 0:
        return b"\x00"
    cols = [0] * n
    for i in range(n):
        for j in range(n):
            if g.rows[i] >> j & 1:
                cols[j] |= 1 << i
    state = {"best": None, "best_order": None, "first": None, "first_order": None}
    autos: list[tuple[int, ...]] = []

    def leaf(order):
        code = _code(g, order)
        for key in ("first", "best"):
            if state[key] == code:
                ref = state[key + "_order"]
                perm = [0] * n
                for a, b in zip(ref, order):
                    perm[a] = b
                autos.append(tuple(perm))
        if state["first"] is None:
            state["first"], state["first_order"] = code, order
        if state["best"] is None or code < state["best"]:
            state["best"], state["best_order"] = code, order

    def search(cells, prefix):
        cells = _refine(g, cells, cols)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            leaf([c[0] for c in cells])
            return
        cell = sorted(cells[target])
        done = []
        for v in cell:
            gens = [a for a in autos if all(a[x] == x for x in prefix)]
            orb = _orbits(cell, gens)
            if any(orb[v] == orb[w] for w in done):
                continue
            child = cells[:target] + [[v], [w for w in cells[target] if w != v]] + cells[target + 1:]
            search(child, prefix + [v])
            done.append(v)

    search([list(range(n))], [])
    return state["best"]


def gl_order(n: int, p: int) -> int:
    out = 1
    for i in range(n):
        out *= p ** n - p ** i
    return out


def gl_enumerate(n: int, p: int, cap: int = GL_CAP) -> list[FpMat]:
    """All invertible n x n matrices over Z_p, rows chosen lexicographically."""
    if not is_prime(p):
        raise OracleError(f"{p} is not prime")
    size = gl_order(n, p)
    if size > cap:
        raise OracleError(f"|GL({n},{p})| = {size} exceeds the cap {cap}")
    vectors = list(itertools.product(range(p), repeat=n))
    out = []

    def extend(rows, span):
        if len(rows) == n:
            out.append(FpMat(tuple(rows), p))
            return
        for v in vectors:
            if v in span:
                continue
            new_span = {tuple((a + c * b) % p for a, b in zip(s, v)) for s in span for c in range(p)}
            extend(rows + [v], new_span)

    extend([], {(0,) * n})
    assert len(out) == size
    return out


def group_elements(n: int, p: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(p), repeat=n))


def cayley_digraph(elements, index, S: set[int], p: int) -> SmallDigraph:
    """g -> h iff g - h is in S (S given as element indices, 0 excluded)."""
    rows = []
    for g in elements:
        row = 0
        for j, h in enumerate(elements):
            if index[tuple((a - b) % p for a, b in zip(g, h))] in S:
                row |= 1 << j
        rows.append(row)
    return SmallDigraph(len(elements), tuple(rows))


def cayley_canon(elements, index, S: set[int], p: int) -> bytes:
    """Canonical form of Cay(G, S), allowing 0 in S.

    0 in S puts a loop on every vertex at once, so the loop flag followed by
    the canonical form of the loop-free part is again a complete invariant.
    """
    zero = index[(0,) * len(elements[0])]
    loops = zero in S
    return bytes([loops]) + digraph_canon(cayley_digraph(elements, index, S - {zero}, p))


def ci_scan(n: int, p: int, vertex_cap: int = SCAN_VERTEX_CAP, gl_cap: int = GL_CAP,
            matrices: list[FpMat] | None = None, include_zero: bool = False) -> dict:
    """Check CI-ness of Z_p^n over every connection set avoiding 0, or over
    every subset of G when ``include_zero`` is set.

    ``matrices`` replaces GL(n, p) by a caller-supplied list (a subgroup makes
    a negative control: it misses Cayley isomorphisms and must report them).
    """
    if not is_prime(p):
        raise OracleError(f"{p} is not prime")
    if p ** n > vertex_cap:
        raise OracleError(f"{p ** n} vertices exceeds the cap {vertex_cap}")
    elements = group_elements(n, p)
    index = {g: i for i, g in enumerate(elements)}
    pool = list(range(0 if include_zero else 1, len(elements)))
    bit = {x: i for i, x in enumerate(pool)}
    mats = gl_enumerate(n, p, gl_cap) if matrices is None else matrices
    perms = []
    for M in mats:
        perms.append(tuple(index[tuple(sum(r[k] * g[k] for k in range(n)) % p for r in M.rows)]
                           for g in elements))

    def subset(mask):
        return {pool[i] for i in range(len(pool)) if mask >> i & 1}

    def to_mask(s):
        return sum(1 << bit[x] for x in s)

    total = 1 << len(pool)
    orbit_of = [-1] * total
    orbits = []
    for mask in range(total):
        if orbit_of[mask] >= 0:
            continue
        s = subset(mask)
        members = sorted({to_mask({pi[x] for x in s}) for pi in perms})
        for m in members:
            orbit_of[m] = len(orbits)
        orbits.append(members)

    canon = {}
    definitional = []
    orbit_canon = []
    for oi, members in enumerate(orbits):
        forms = {}
        for m in members:
            forms[m] = cayley_canon(elements, index, subset(m), p)
        distinct = set(forms.values())
        if len(distinct) != 1:
            definitional.append({"orbit": oi, "masks": members})
        c = forms[members[0]]
        orbit_canon.append(c)
        canon.setdefault(c, []).append(oi)

    counterexamples = []
    for c, ois in canon.items():
        for a, b in itertools.combinations(ois, 2):
            counterexamples.append({"S": sorted(elements[x] for x in subset(orbits[a][0])),
                                    "T": sorted(elements[x] for x in subset(orbits[b][0]))})
    return {"n": n, "p": p, "vertices": len(elements), "include_zero": include_zero,
            "connection_sets": total,
            "gl_order": len(mats), "orbits": len(orbits), "isomorphism_classes": len(canon),
            "definitional_failures": definitional, "counterexample_count": len(counterexamples),
            "counterexamples": counterexamples[:50], "ci": not counterexamples and not definitional}
