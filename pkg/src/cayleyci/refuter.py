"""Machine check that no linear automorphism of G carries S onto T.

The refutation mirrors the hand argument step by step:

1. separation  - 2a - b never lands in S for a, b in different classes, so a
                 linear sigma with sigma(S) = T must map classes to classes;
2. span        - the class directions span V, hence sigma(V) = V;
3. hat         - on the offsets, the only linear permutations compatible
                 with the pairing structure are permutation matrices;
4. normalize   - coordinate permutations are automorphisms of Cay(G, S), so
                 the U-block of sigma may be taken to be the identity;
5. infeasible  - what is left is a linear system in the lower-left block of
                 sigma, and it has no solution.

Each step stores enough data to be rechecked without this module.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

from .families import AffineClass, ConnectionSet, FamilyError, subsets_O, undirected_closure
from .gfp import FpMat, FpVec, check_infeasibility_witness, hyperplane_basis, mat_rank, solve_linear
from .results import FAIL, INAPPLICABLE, PASS, Check, verdict

REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"
FAILED = "failed"


@dataclass
class RefutationCertificate:
    family: str
    p: int
    mode: str
    steps: list[Check] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def conclusion(self) -> str:
        statuses = [s.status for s in self.steps]
        if statuses and all(s == PASS for s in statuses):
            return REFUTED
        if FAIL in statuses:
            return FAILED
        return INCONCLUSIVE

    def step(self, name: str) -> Check:
        return next(s for s in self.steps if s.name == name)

    def to_json(self) -> dict:
        return {"family": self.family, "p": self.p, "mode": self.mode,
                "steps": [s.to_json() for s in self.steps],
                "conclusion": self.conclusion, "notes": self.notes}


def _vec(u: FpVec) -> list[int]:
    return list(u.coords)


def _separation_pair(S: ConnectionSet, ci: AffineClass, cj: AffineClass, ck: AffineClass):
    """Solve for a in ci, b in cj with 2a - b in ck (v-parts only).

    Unknowns are (a.v, b.v); three equations. Returns a witness pair or the
    infeasibility combination.
    """
    p, dv = S.p, S.dv
    zero = (0,) * dv
    rows = [
        ci.functional.coords + zero,
        zero + cj.functional.coords,
        tuple(2 * x for x in ck.functional.coords) + tuple(-x for x in ck.functional.coords),
    ]
    res = solve_linear(FpMat(tuple(rows), p), FpVec((ci.rhs, cj.rhs, ck.rhs), p))
    return res


def separation_check(S: ConnectionSet) -> Check:
    """For classes i != j, 2a - b is never in S when a in S_i, b in S_j."""
    u_level = 0
    v_level = []
    offsets = {c.u_offset.coords for c in S.classes}
    for ci, cj in itertools.permutations(S.classes, 2):
        z = ci.u_offset.scale(2) - cj.u_offset
        if z.coords not in offsets:
            u_level += 1
            continue
        for ck in S.classes_at(z):
            res = _separation_pair(S, ci, cj, ck)
            if res.feasible:
                a_v = FpVec(res.x.coords[:S.dv], S.p)
                b_v = FpVec(res.x.coords[S.dv:], S.p)
                return verdict("separation", False, "2a - b is never in S",
                               witness={"a_class": ci.label, "b_class": cj.label, "hit": ck.label,
                                        "a_v": _vec(a_v), "b_v": _vec(b_v)})
            v_level.append({"a_class": ci.label, "b_class": cj.label, "collides_with": ck.label,
                            "lambda": _vec(res.witness)})
    return verdict("separation", True, "2a - b is never in S for a, b in distinct classes",
                   ordered_pairs=len(S.classes) * (len(S.classes) - 1),
                   cleared_at_u_level=u_level, cleared_at_v_level=v_level)


def span_check(S: ConnectionSet, nclasses: int | None = None) -> Check:
    """Directions of the first ``nclasses`` classes (default du) span V."""
    n = S.du if nclasses is None else nclasses
    rows = [v.coords for c in S.classes[:n] for v in hyperplane_basis(c.functional)]
    rank = mat_rank(FpMat(tuple(rows), S.p)) if rows else 0
    return verdict("span", rank == S.dv, "class directions span V",
                   classes_used=[c.label for c in S.classes[:n]], rank=rank, dv=S.dv)


def _sum_elements(hat: list[FpVec]) -> list[FpVec]:
    """Offsets z that equal x + y for offsets x, y other than z."""
    sums = {(x + y).coords for x, y in itertools.combinations_with_replacement(hat, 2)}
    return [z for z in hat if z.coords in sums]


def hat_analysis(S: ConnectionSet, T: ConnectionSet | None = None) -> Check:
    """Pin down the U-block of a would-be sigma from the offset set alone.

    Finds the unique offset e that is a sum of two others, pairs the rest by
    x + y = e, and enumerates every choice of one element per pair. The
    images of the standard basis must be such a choice, sum to e and be
    linearly independent; when the standard basis is the only survivor the
    U-block is a permutation matrix.
    """
    p, du = S.p, S.du
    if p <= 2:
        return Check("hat", INAPPLICABLE, "needs p > 2", {"p": p})
    hat = sorted({c.u_offset for c in S.classes}, key=lambda v: v.coords)
    ev = {"hat": [_vec(h) for h in hat]}
    if T is not None and {c.u_offset.coords for c in T.classes} != {h.coords for h in hat}:
        return Check("hat", FAIL, "S and T have the same offset set", ev)
    sums = _sum_elements(hat)
    ev["sum_elements"] = [_vec(z) for z in sums]
    if len(sums) != 1:
        return Check("hat", INAPPLICABLE, "exactly one offset is a sum of two others", ev)
    e = sums[0]
    rest = [h for h in hat if h != e]
    index = {h.coords: h for h in rest}
    pairs, used = [], set()
    for h in rest:
        if h.coords in used:
            continue
        partner = (e - h).coords
        if partner not in index or partner == h.coords:
            ev["unpaired"] = _vec(h)
            return Check("hat", INAPPLICABLE, "remaining offsets pair up with sum e", ev)
        used |= {h.coords, partner}
        pairs.append((h, index[partner]))
    basis = [FpVec.basis(i, du, p) for i in range(du)]
    basis_set = {b.coords for b in basis}
    if len(pairs) != du or not basis_set <= set(index) or \
            any({x.coords, y.coords} <= basis_set for x, y in pairs):
        ev["pairs"] = len(pairs)
        return Check("hat", INAPPLICABLE, "standard basis picks one element of each of du pairs", ev)
    survivors = []
    for pick in itertools.product((0, 1), repeat=len(pairs)):
        H = [pair[b] for pair, b in zip(pairs, pick)]
        total = FpVec.zero(du, p)
        for h in H:
            total = total + h
        if total == e and mat_rank(FpMat(tuple(h.coords for h in H), p)) == du:
            survivors.append(sorted(_vec(h) for h in H))
    ev.update(e=_vec(e), pairs=[[_vec(x), _vec(y)] for x, y in pairs],
              selections=2 ** len(pairs), survivors=survivors)
    expected = sorted(_vec(b) for b in basis)
    if survivors == [expected]:
        return Check("hat", PASS, "U-block of sigma is a permutation matrix", ev)
    return Check("hat", INAPPLICABLE,
                 "more than one basis image survives; the permutation argument does not apply", ev)


def v_permutation(S: ConnectionSet, perm: list[int]) -> list[int]:
    """How a permutation of the U coordinates acts on the V coordinates.

    ``perm`` is 0-based on U; the result maps old V index to new V index.
    """
    if S.family == "rank2p3":
        return [0] + [perm[i] + 1 for i in range(S.du)]
    if S.family == "rank4p2":
        return list(perm)
    if S.family == "rankbinom":
        O = subsets_O(S.p)
        pos = {k: j for j, k in enumerate(O)}
        return [pos[tuple(sorted(perm[i - 1] + 1 for i in k))] for k in O]
    raise FamilyError(f"no coordinate action known for family {S.family!r}")


def _permute(v: FpVec, perm: list[int]) -> FpVec:
    out = [0] * v.dim
    for i, x in enumerate(v.coords):
        out[perm[i]] = x
    return FpVec(tuple(out), v.p)


def normalization_check(S: ConnectionSet) -> Check:
    """Every adjacent transposition of U coordinates (with its V action)
    maps the class list of S onto itself."""
    keys = {c.key(): c.label for c in S.classes}
    moves = {}
    for t in range(S.du - 1):
        perm = list(range(S.du))
        perm[t], perm[t + 1] = perm[t + 1], perm[t]
        vp = v_permutation(S, perm)
        mapping = {}
        for c in S.classes:
            img = AffineClass(c.label, _permute(c.u_offset, perm), _permute(c.functional, vp), c.rhs)
            hit = keys.get(img.key())
            if hit is None:
                return verdict("normalize", False, "coordinate permutations preserve S",
                               transposition=[t + 1, t + 2], broken_class=c.label)
            mapping[c.label] = hit
        moves[f"({t + 1} {t + 2})"] = {k: v for k, v in mapping.items() if k != v}
    return verdict("normalize", True, "adjacent transpositions are automorphisms of Cay(G,S)",
                   transpositions=moves)


def infeasibility_system(S: ConnectionSet, T: ConnectionSet):
    """Constraints on the lower-left block M21 once the U-block is the identity.

    Each class of S with rhs 0 contains (u, 0); its image (u, M21 u) must lie
    in the T class at offset u, giving <M21 u, w_T> = rhs_T. Unknown
    M21[r][c] sits at index r * du + c. Rows for classes that S and T share
    are written with the sign flipped so that the plain sum of all rows is
    the hand argument: the shared constraints add up to the negative of the
    C-constraint's left side.
    """
    p, du, dv = S.p, S.du, S.dv
    rows, rhs, labels, shared = [], [], [], []
    skipped = []
    for c in S.classes:
        if c.rhs != 0:
            skipped.append(c.label)
            continue
        targets = T.classes_at(c.u_offset)
        if len(targets) != 1:
            skipped.append(c.label)
            continue
        d = targets[0]
        same = c.key() == d.key()
        sign = -1 if same else 1
        row = [0] * (dv * du)
        for r in range(dv):
            for col in range(du):
                row[r * du + col] = sign * d.functional[r] * c.u_offset[col]
        rows.append(tuple(row))
        rhs.append(sign * d.rhs)
        labels.append(c.label if same else f"{c.label}->{d.label}")
        shared.append(same)
    return FpMat(tuple(rows), p), FpVec(tuple(rhs), p), labels, shared, skipped


def linear_infeasibility(S: ConnectionSet, T: ConnectionSet) -> Check:
    A, b, labels, shared, skipped = infeasibility_system(S, T)
    ev = {"equations": A.nrows, "unknowns": A.ncols, "rows": labels, "skipped": skipped,
          "A": [list(r) for r in A.rows], "b": list(b.coords)}
    res = solve_linear(A, b)
    if res.feasible:
        ev["solution"] = list(res.x.coords)
        return Check("infeasible", FAIL, "no M21 satisfies the class constraints", ev)
    ev["lambda"] = list(res.witness.coords)
    ones = FpVec((1,) * A.nrows, A.p)
    ev["all_ones_valid"] = check_infeasibility_witness(A, b, ones)
    ev["all_ones_lambda_b"] = sum(b.coords) % A.p
    # the hand argument: add up the shared constraints, compare with the rest
    hand_ok = ev["all_ones_valid"] or _scaled_combination(A, b, shared, ev)
    ok = check_infeasibility_witness(A, b, res.witness) and hand_ok
    return Check("infeasible", PASS if ok else FAIL,
                 "no M21 satisfies the class constraints", ev)


def _scaled_combination(A: FpMat, b: FpVec, shared: list[bool], ev: dict) -> bool:
    """Ones on shared rows and one common scalar on the others."""
    p = A.p
    for mu in range(1, p):
        lam = FpVec(tuple(1 if s else mu for s in shared), p)
        if check_infeasibility_witness(A, b, lam):
            ev["hand_lambda"] = list(lam.coords)
            return True
    return False


def refute_directed(S: ConnectionSet, T: ConnectionSet) -> RefutationCertificate:
    if (S.family, S.p, S.du, S.dv) != (T.family, T.p, T.du, T.dv):
        raise ValueError("S and T must come from the same family and prime")
    cert = RefutationCertificate(S.family, S.p, "directed")
    sep_s, sep_t = separation_check(S), separation_check(T)
    sep = verdict("separation", sep_s.passed and sep_t.passed,
                  "2a - b is never in S (resp. T) for a, b in distinct classes",
                  S=sep_s.evidence, T=sep_t.evidence)
    cert.steps.append(sep)
    cert.steps.append(span_check(S))
    hat = hat_analysis(S, T)
    cert.steps.append(hat)
    norm = normalization_check(S)
    cert.steps.append(norm)
    if hat.passed and norm.passed:
        cert.steps.append(linear_infeasibility(S, T))
    else:
        cert.steps.append(Check("infeasible", INAPPLICABLE,
                                "needs the U-block normalized to the identity",
                                {"reason": "hat or normalize step did not pass"}))
    return cert


def induced_offset_graph(offsets: list[FpVec]) -> dict[tuple, set[tuple]]:
    """Graph on the offsets with x ~ y iff x - y is an offset."""
    members = {o.coords for o in offsets}
    adj = {o.coords: set() for o in offsets}
    for x in offsets:
        for y in offsets:
            if x != y and (x - y).coords in members:
                adj[x.coords].add(y.coords)
    return adj


def refute_undirected(S: ConnectionSet, T: ConnectionSet,
                      Sbar: ConnectionSet | None = None, Tbar: ConnectionSet | None = None
                      ) -> RefutationCertificate:
    p = S.p
    cert = RefutationCertificate(S.family, p, "undirected")
    if p <= 3:
        cert.steps.append(Check("hypothesis", INAPPLICABLE, "the undirected argument needs p > 3",
                                {"p": p, "message": f"p = {p}: the undirected argument only covers primes p > 3"}))
        return cert
    cert.steps.append(verdict("hypothesis", True, "p > 3", p=p))
    Sbar = Sbar or undirected_closure(S)
    Tbar = Tbar or undirected_closure(T)
    sep_s, sep_t = separation_check(Sbar), separation_check(Tbar)
    cert.steps.append(verdict("separation", sep_s.passed and sep_t.passed,
                              "2a - b is never in Sbar (resp. Tbar) for a, b in distinct classes",
                              S=sep_s.evidence, T=sep_t.evidence))
    cert.steps.append(span_check(Sbar))

    hat = [c.u_offset for c in S.classes]
    hat_keys = {h.coords for h in hat}
    neg_keys = {(-h).coords for h in hat}
    cert.steps.append(verdict("offsets_disjoint", not (hat_keys & neg_keys), "hat(S) and -hat(S) are disjoint",
                              overlap=sorted(hat_keys & neg_keys)))

    tilde = hat + [-h for h in hat]
    adj = induced_offset_graph(tilde)
    degrees = {k: len(v) for k, v in adj.items()}
    sums = _sum_elements(sorted(hat, key=lambda v: v.coords))
    ev = {"vertices": len(tilde),
          "degree_profile": {str(d): n for d, n in sorted(Counter(degrees.values()).items())},
          "degrees": [[list(k), d] for k, d in sorted(degrees.items())]}
    ok = len(sums) == 1
    if ok:
        e = sums[0]
        big = len(hat) - 1  # N(e) should be all of hat(S) except e
        expected = {k: (big if k in (e.coords, (-e).coords) else 2) for k in degrees}
        ok = degrees == expected
        ok = ok and adj[e.coords] == hat_keys - {e.coords}
        ok = ok and adj[(-e).coords] == neg_keys - {(-e).coords}
        ev.update(e=_vec(e), expected_high_degree=big)
    cert.steps.append(Check("degree_profile", PASS if ok else FAIL,
                            "e and -e are the only vertices of high degree; N(e) = hat minus e", ev))

    pos = {c.key() for c in Tbar.classes if c.u_offset.coords in hat_keys}
    neg = {c.key() for c in Tbar.classes if c.u_offset.coords in neg_keys}
    ok = pos == T.class_keys() and neg == T.negated().class_keys() and Tbar.same_set(Tbar.negated())
    cert.steps.append(verdict("class_matching", ok,
                              "Tbar restricted to hat(S) is T, restricted to -hat(S) is -T, Tbar = -Tbar"))

    directed = refute_directed(S, T)
    cert.notes["directed"] = directed.to_json()
    cert.steps.append(Check("reduction", PASS if directed.conclusion == REFUTED else
                            (FAIL if directed.conclusion == FAILED else INAPPLICABLE),
                            "sigma or -sigma fixes e and maps S onto T, which the directed run excludes",
                            {"cases": {"sigma(e) = e": directed.conclusion,
                                       "sigma(e) = -e": directed.conclusion},
                             "directed_conclusion": directed.conclusion}))
    return cert


def recheck_certificate(data: dict) -> bool:
    """Re-verify the numeric evidence of a serialized certificate.

    Uses plain integer arithmetic only, independent of the elimination code.
    """
    p = data["p"]
    for step in data["steps"]:
        ev = step.get("evidence", {})
        if step["name"] == "infeasible" and step["verdict"] == PASS:
            A, b, lam = ev["A"], ev["b"], ev["lambda"]
            for j in range(len(A[0]) if A else 0):
                if sum(l * row[j] for l, row in zip(lam, A)) % p:
                    return False
            if sum(l * y for l, y in zip(lam, b)) % p == 0:
                return False
            if ev.get("all_ones_valid"):
                if any(sum(row[j] for row in A) % p for j in range(len(A[0]))):
                    return False
        if step["name"] == "hat" and step["verdict"] == PASS:
            e = ev["e"]
            for H in ev["survivors"]:
                if [sum(col) % p for col in zip(*H)] != e:
                    return False
        if step["name"] == "degree_profile" and step["verdict"] == PASS:
            verts = [tuple(v) for v, _ in ev["degrees"]]
            members = set(verts)
            for v, d in ev["degrees"]:
                nbrs = sum(1 for w in verts if w != tuple(v) and
                           tuple((a - b) % p for a, b in zip(v, w)) in members)
                if nbrs != d:
                    return False
    if "directed" in data.get("notes", {}):
        return recheck_certificate(data["notes"]["directed"])
    return True
