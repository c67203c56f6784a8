"""Checking that a polynomial map is an isomorphism Cay(G, S) -> Cay(G, T).

The map fixes the U-part and translates each coset u + V by a vector that
depends on u only, so it is a bijection of G. If b - a lies in a class of S
with offset d and functional w, then

    <phi(b) - phi(a), w> - <b - a, w> = Delta_d (sum_j w_j q_j)(a.u)

and the map sends S-arcs to T-arcs exactly when that difference is the
constant ``rhs_T - rhs_S`` of the matching T class. The symbolic checker
computes the difference polynomial; the pointwise checker walks actual
group elements and only uses membership in T.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .families import AffineClass, ConnectionSet, GroupElement, PolyMap
from .gfp import FpVec, fp_dot, normalize_functional
from .polyring import delta, linear_combination

EXHAUSTIVE_LIMIT = 10 ** 6


@dataclass
class IsoReport:
    family: str
    p: int
    mode: str
    entries: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(e["verdict"] == "pass" for e in self.entries)

    def entry(self, label: str) -> dict:
        return next(e for e in self.entries if e["class"] == label)

    def to_json(self) -> dict:
        return {"family": self.family, "p": self.p, "mode": self.mode,
                "verdict": "pass" if self.passed else "fail",
                "entries": self.entries, "notes": self.notes}


def apply_polymap(phi: PolyMap, g: GroupElement) -> GroupElement:
    return GroupElement(g.u, g.v + translation(phi, g.u))


def translation(phi: PolyMap, u: FpVec) -> FpVec:
    """The vector by which phi shifts the coset u + V."""
    return FpVec(tuple(q.evaluate(u.coords) for q in phi.components), phi.p)


def match_classes(S: ConnectionSet, T: ConnectionSet) -> list[tuple[AffineClass, AffineClass | None]]:
    """Pair each S class with the T class at the same offset and parallel functional."""
    pairs = []
    for c in S.classes:
        w, _ = normalize_functional(c.functional, c.rhs)
        match = None
        for d in T.classes_at(c.u_offset):
            if normalize_functional(d.functional, d.rhs)[0] == w:
                match = d
                break
        pairs.append((c, match))
    return pairs


def _digest(poly) -> str:
    blob = json.dumps(poly.to_json(), separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _symbolic_entry(args):
    c, d, phi = args
    w, rhs_s = normalize_functional(c.functional, c.rhs)
    entry = {"class": c.label}
    if d is None:
        entry.update(verdict="fail", reason="no T class with this offset and direction")
        return entry
    _, rhs_t = normalize_functional(d.functional, d.rhs)
    target = (rhs_t - rhs_s) % phi.p
    combo = linear_combination(w.coords, phi.components)
    diff = delta(combo, c.u_offset)
    entry.update(target_class=d.label, target=target, terms=len(diff), digest=_digest(diff))
    if not diff.is_constant():
        entry.update(verdict="fail", reason="difference polynomial is not constant",
                     difference=diff.to_json()[:20])
    else:
        entry.update(constant=diff.constant_term(),
                     verdict="pass" if diff.constant_term() == target else "fail")
    return entry


def _pool_map(fn, items, threads: int):
    workers = os.cpu_count() if threads == 0 else threads
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def verify_polymap_symbolic(S: ConnectionSet, T: ConnectionSet, phi: PolyMap, threads: int = 1) -> IsoReport:
    _check_dims(S, T, phi)
    report = IsoReport(S.family, S.p, "symbolic")
    jobs = [(c, d, phi) for c, d in match_classes(S, T)]
    report.entries = _pool_map(_symbolic_entry, jobs, threads)
    report.notes = {"sizes_equal": S.size == T.size, "classes": len(S.classes)}
    if S.size != T.size:
        report.entries.append({"class": "*", "verdict": "fail", "reason": "|S| != |T|"})
    return report


def _check_dims(S, T, phi):
    if (S.p, S.du, S.dv) != (T.p, T.du, T.dv) or (phi.p, phi.du, phi.dv) != (S.p, S.du, S.dv):
        raise ValueError("S, T and phi do not share (p, du, dv)")


def verify_polymap_pointwise(S: ConnectionSet, T: ConnectionSet, phi: PolyMap,
                             budget: int | str = "exhaustive", seed: int = 0) -> IsoReport:
    """Walk base points x in U; for each class of S take two random arcs
    a -> b with a.u = x and b - a in the class, and test phi(b) - phi(a) in T.

    ``budget`` is "exhaustive" (every x, needs p^du <= 10^6) or a sample size.
    """
    _check_dims(S, T, phi)
    p, du, dv = S.p, S.du, S.dv
    rng = random.Random(seed)
    if budget == "exhaustive":
        if p ** du > EXHAUSTIVE_LIMIT:
            raise ValueError(f"p^du = {p ** du} exceeds the exhaustive limit")
        bases = (FpVec(x, p) for x in itertools.product(range(p), repeat=du))
        nbase = p ** du
    else:
        nbase = int(budget)
        bases = (FpVec(tuple(rng.randrange(p) for _ in range(du)), p) for _ in range(nbase))

    cache: dict[tuple, FpVec] = {}

    def shift(u: FpVec) -> FpVec:
        t = cache.get(u.coords)
        if t is None:
            t = cache[u.coords] = translation(phi, u)
        return t

    status = {c.label: {"class": c.label, "checked": 0, "verdict": "pass"} for c in S.classes}
    for x in bases:
        for c in S.classes:
            st = status[c.label]
            if st["verdict"] == "fail":
                continue
            seen = set()
            for _ in range(2):
                a = GroupElement(x, FpVec(tuple(rng.randrange(p) for _ in range(dv)), p))
                b = a + GroupElement(c.u_offset, c.sample_v(rng))
                img = GroupElement(b.u, b.v + shift(b.u)) - GroupElement(a.u, a.v + shift(a.u))
                st["checked"] += 1
                hit = T.class_of(img)
                if hit is None:
                    st.update(verdict="fail", witness={"base": list(x.coords), "a_v": list(a.v.coords),
                                                       "b_v": list(b.v.coords)})
                    break
                seen.add((hit.label, fp_dot(img.v, c.functional)))
            else:
                if len(seen) != 1:
                    st.update(verdict="fail", reason="result depends on the v choice",
                              witness={"base": list(x.coords)})
            if st["verdict"] == "pass":
                st.setdefault("target_class", next(iter(seen))[0])
    report = IsoReport(S.family, p, "pointwise", list(status.values()))
    report.notes = {"budget": budget, "base_points": nbase, "seed": seed}
    return report
