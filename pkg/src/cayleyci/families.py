"""Connection sets built from affine hyperplane pieces, and the polynomial
maps that carry one member of each pair onto the other.

Every connection set here lives in G = U + V with U = Z_p^du, V = Z_p^dv and
is a disjoint union of classes ``u + {v in V : <v, w> = c}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .gfp import FpVec, check_modulus, fp_dot, normalize_functional
from .polyring import Poly, build_l, build_r

FAMILIES = ("rank2p3", "rank4p2", "rankbinom")
DEFAULT_DV_CAP = 300


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class GroupElement:
    u: FpVec
    v: FpVec

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.u - other.u, self.v - other.v)

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.u, -self.v)


@dataclass(frozen=True)
class AffineClass:
    label: str
    u_offset: FpVec
    functional: FpVec
    rhs: int

    def __post_init__(self):
        if self.u_offset.is_zero():
            raise FamilyError(f"class {self.label}: offset must be nonzero")
        if self.functional.is_zero():
            raise FamilyError(f"class {self.label}: functional must be nonzero")
        object.__setattr__(self, "rhs", self.rhs % self.functional.p)

    @property
    def p(self) -> int:
        return self.functional.p

    def contains(self, g: GroupElement) -> bool:
        return g.u == self.u_offset and fp_dot(g.v, self.functional) == self.rhs

    def negated(self, label: str | None = None) -> "AffineClass":
        return AffineClass(label or _neg_label(self.label), -self.u_offset, self.functional, -self.rhs)

    def key(self):
        """Set identity: offset plus the normalized hyperplane equation."""
        w, c = normalize_functional(self.functional, self.rhs)
        return self.u_offset.coords, w.coords, c

    def relation(self, other: "AffineClass") -> str:
        """'equal', 'disjoint' or 'overlap' as subsets of G."""
        if self.u_offset != other.u_offset:
            return "disjoint"
        _, w1, c1 = self.key()
        _, w2, c2 = other.key()
        if w1 == w2:
            return "equal" if c1 == c2 else "disjoint"
        return "overlap"  # non-parallel hyperplanes always meet

    def points(self) -> Iterator[GroupElement]:
        dv, p = self.functional.dim, self.p
        for v in itertools.product(range(p), repeat=dv):
            fv = FpVec(v, p)
            if fp_dot(fv, self.functional) == self.rhs:
                yield GroupElement(self.u_offset, fv)

    def sample_v(self, rng) -> FpVec:
        """Uniform random v with <v, w> = c."""
        p, w = self.p, self.functional
        t = next(i for i, x in enumerate(w.coords) if x)
        v = [rng.randrange(p) for _ in range(w.dim)]
        v[t] = 0
        rest = sum(a * b for a, b in zip(v, w.coords)) % p
        v[t] = ((self.rhs - rest) * pow(w[t], p - 2, p)) % p
        return FpVec(tuple(v), p)

    def to_json(self) -> dict:
        return {"label": self.label, "offset": list(self.u_offset.coords),
                "functional": list(self.functional.coords), "rhs": self.rhs}

    @classmethod
    def from_json(cls, d: dict, p: int) -> "AffineClass":
        return cls(d["label"], FpVec(tuple(d["offset"]), p), FpVec(tuple(d["functional"]), p), d["rhs"])


def _neg_label(label: str) -> str:
    return label[1:] if label.startswith("-") else "-" + label


@dataclass
class ConnectionSet:
    family: str
    p: int
    du: int
    dv: int
    classes: list[AffineClass]
    v_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        for c in self.classes:
            if c.u_offset.dim != self.du or c.functional.dim != self.dv or c.p != self.p:
                raise FamilyError(f"class {c.label} does not fit ({self.du}, {self.dv}, p={self.p})")
        labels = [c.label for c in self.classes]
        if len(set(labels)) != len(labels):
            raise FamilyError("duplicate class labels")
        self._by_offset: dict[tuple, list[AffineClass]] = {}
        for c in self.classes:
            for other in self._by_offset.get(c.u_offset.coords, []):
                if c.relation(other) != "disjoint":
                    raise FamilyError(f"classes {other.label} and {c.label} are not disjoint")
            self._by_offset.setdefault(c.u_offset.coords, []).append(c)

    @property
    def size(self) -> int:
        return len(self.classes) * self.p ** (self.dv - 1)

    def __len__(self):
        return self.size

    def offsets(self) -> list[FpVec]:
        return [c.u_offset for c in self.classes]

    def by_label(self, label: str) -> AffineClass:
        for c in self.classes:
            if c.label == label:
                return c
        raise KeyError(label)

    def classes_at(self, u: FpVec) -> list[AffineClass]:
        return self._by_offset.get(u.coords, [])

    def contains(self, g: GroupElement) -> bool:
        return any(fp_dot(g.v, c.functional) == c.rhs for c in self.classes_at(g.u))

    def class_of(self, g: GroupElement) -> AffineClass | None:
        for c in self.classes_at(g.u):
            if fp_dot(g.v, c.functional) == c.rhs:
                return c
        return None

    def members(self) -> Iterator[GroupElement]:
        for c in self.classes:
            yield from c.points()

    def member_array(self) -> np.ndarray:
        """All members as rows (u | v) of an int64 array, class by class."""
        p, dv = self.p, self.dv
        vs = np.array(list(itertools.product(range(p), repeat=dv)), dtype=np.int64).reshape(-1, dv)
        blocks = []
        for c in self.classes:
            w = np.array(c.functional.coords, dtype=np.int64)
            hit = vs[(vs @ w) % p == c.rhs]
            u = np.broadcast_to(np.array(c.u_offset.coords, dtype=np.int64), (len(hit), self.du))
            blocks.append(np.hstack([u, hit]))
        if not blocks:
            return np.zeros((0, self.du + dv), dtype=np.int64)
        return np.vstack(blocks)

    def with_classes(self, classes: Iterable[AffineClass], family: str | None = None) -> "ConnectionSet":
        return ConnectionSet(family or self.family, self.p, self.du, self.dv, list(classes), self.v_labels)

    def negated(self) -> "ConnectionSet":
        return self.with_classes(c.negated() for c in self.classes)

    def class_keys(self) -> set:
        return {c.key() for c in self.classes}

    def same_set(self, other: "ConnectionSet") -> bool:
        return (self.p, self.du, self.dv) == (other.p, other.du, other.dv) and \
            self.class_keys() == other.class_keys()

    def to_json(self) -> dict:
        return {"schema": 1, "family": self.family, "p": self.p, "du": self.du, "dv": self.dv,
                "size": self.size, "v_basis": self.v_labels,
                "classes": [c.to_json() for c in self.classes]}

    @classmethod
    def from_json(cls, d: dict) -> "ConnectionSet":
        p = d["p"]
        return cls(d["family"], p, d["du"], d["dv"],
                   [AffineClass.from_json(c, p) for c in d["classes"]], d.get("v_basis", []))


@dataclass
class PolyMap:
    """v -> v + (q_0(u), ..., q_{dv-1}(u)) on each coset u + V."""

    p: int
    du: int
    dv: int
    components: list[Poly]
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.components) != self.dv:
            raise FamilyError(f"expected {self.dv} components, got {len(self.components)}")
        for q in self.components:
            if q.nvars != self.du or q.p != self.p:
                raise FamilyError("component polynomial lives in the wrong ring")

    def to_json(self) -> dict:
        return {"schema": 1, "p": self.p, "du": self.du, "dv": self.dv,
                "components": [{"name": n, "terms": q.to_json()}
                               for n, q in zip(self.names or [""] * self.dv, self.components)]}

    @classmethod
    def from_json(cls, d: dict) -> "PolyMap":
        comps = [Poly.from_json(c["terms"], d["du"], d["p"]) for c in d["components"]]
        return cls(d["p"], d["du"], d["dv"], comps, [c["name"] for c in d["components"]])


def subsets_O(p: int) -> list[tuple[int, ...]]:
    """p-subsets of {1..2p-1} in lexicographic order."""
    return list(itertools.combinations(range(1, 2 * p), p))


def b_partners(k: Sequence[int], p: int) -> list[tuple[int, ...]]:
    """The members of O meeting ``k`` in exactly one element."""
    k = tuple(sorted(k))
    if len(k) != p or not set(k) <= set(range(1, 2 * p)):
        raise FamilyError(f"{k} is not a {p}-subset of 1..{2 * p - 1}")
    ks = set(k)
    out = [q for q in subsets_O(p) if len(ks & set(q)) == 1]
    if len(out) != p:
        raise AssertionError(f"{k} has {len(out)} partners, expected {p}")
    return out


def _set_label(k: Sequence[int]) -> str:
    return "{" + ",".join(map(str, k)) + "}"


def build_family(name: str, p: int, dv_cap: int = DEFAULT_DV_CAP):
    """Return (S, T, phi) for one of the three constructions."""
    p = check_modulus(p)
    if name == "rank2p3":
        return _rank2p3(p)
    if name == "rank4p2":
        return _rank4p2(p)
    if name == "rankbinom":
        dv = comb(2 * p - 1, p)
        if dv > dv_cap:
            raise FamilyError(f"rankbinom at p={p} has dv={dv} > cap {dv_cap}")
        return _rankbinom(p)
    raise FamilyError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


def _pair(family, p, du, dv, shared, c_offset, c_functional, rhs_t, v_labels, phi):
    c0 = AffineClass("C_0", c_offset, c_functional, 0)
    c1 = AffineClass("C_1", c_offset, c_functional, rhs_t)
    S = ConnectionSet(family, p, du, dv, shared + [c0], v_labels)
    T = ConnectionSet(family, p, du, dv, shared + [c1], v_labels)
    return S, T, phi


def _rank2p3(p):
    du, dv = p + 1, p + 2
    e = lambda idx: FpVec.indicator(idx, du, p)
    all_f = FpVec((1,) * dv, p)
    shared = []
    for i in range(1, du + 1):
        shared.append(AffineClass(f"A_{i}", e([i - 1]), FpVec.indicator([0, i], dv, p), 0))
    for i in range(1, du + 1):
        shared.append(AffineClass(f"B_{i}", e(j for j in range(du) if j != i - 1),
                                  all_f + FpVec.basis(i, dv, p), 0))
    rs = build_r(p)
    phi = PolyMap(p, du, dv, rs, [f"r_{i}" for i in range(dv)])
    return _pair("rank2p3", p, du, dv, shared, e(range(du)), all_f, 1,
                 [f"f_{i}" for i in range(dv)], phi)


def _rank4p2(p):
    n = 2 * p - 1
    e = lambda idx: FpVec.indicator(idx, n, p)
    all_f = FpVec((1,) * n, p)
    shared = []
    for i in range(1, n + 1):
        shared.append(AffineClass(f"A_{i}", e([i - 1]), FpVec.basis(i - 1, n, p), 0))
    for i in range(1, n + 1):
        shared.append(AffineClass(f"B_{i}", e(j for j in range(n) if j != i - 1),
                                  all_f + FpVec.basis(i - 1, n, p), 0))
    phi = PolyMap(p, n, n, build_l(p), [f"l_{i}" for i in range(1, n + 1)])
    return _pair("rank4p2", p, n, n, shared, e(range(n)), all_f, -1,
                 [f"f'_{i}" for i in range(1, n + 1)], phi)


def _rankbinom(p):
    n = 2 * p - 1
    O = subsets_O(p)
    pos = {k: j for j, k in enumerate(O)}
    dv = len(O)
    e = lambda idx: FpVec.indicator(idx, n, p)
    shared = []
    for i in range(1, n + 1):
        w = FpVec.indicator((pos[k] for k in O if i not in k), dv, p)
        shared.append(AffineClass(f"A_{i}", e([i - 1]), w, 0))
    for k in O:
        w = FpVec.indicator((pos[q] for q in b_partners(k, p)), dv, p)
        shared.append(AffineClass(f"B_{_set_label(k)}", e(j - 1 for j in k), w, 0))
    comps = [Poly.monomial(tuple(int(j + 1 in k) for j in range(n)), 1, p) for k in O]
    phi = PolyMap(p, n, dv, comps, [f"x^{_set_label(k)}" for k in O])
    return _pair("rankbinom", p, n, dv, shared, e(range(n)), FpVec((1,) * dv, p), 1,
                 [f"f''_{_set_label(k)}" for k in O], phi)


def undirected_closure(S: ConnectionSet) -> ConnectionSet:
    """S together with -S.

    A set that is already symmetric comes back unchanged; otherwise S and -S
    must be disjoint.
    """
    negs = [c.negated() for c in S.classes]
    if all(any(n.relation(c) == "equal" for c in S.classes) for n in negs):
        return S.with_classes(S.classes)
    for n in negs:
        for c in S.classes:
            if n.relation(c) != "disjoint":
                raise FamilyError(f"{n.label} meets {c.label}: S and -S intersect")
    return S.with_classes(S.classes + negs)
