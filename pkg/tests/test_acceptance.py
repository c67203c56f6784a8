"""Acceptance suite: one test per criterion, each with its time limit.

Every criterion prints a single PASS/FAIL line; under pytest the lines are
gathered into an "acceptance criteria" section of the terminal summary.
Run with ``pytest tests/test_acceptance.py -v`` or
``python3 tests/test_acceptance.py``.
"""

import os
import random
import sys
import tempfile
import time
from dataclasses import replace
from math import comb

import pytest

from cayleyci.cioracle import ci_scan
from cayleyci.cli import main
from cayleyci.export import recount_edge_list, write_edges
from cayleyci.families import b_partners, build_family, subsets_O
from cayleyci.isomap import verify_polymap_pointwise, verify_polymap_symbolic
from cayleyci.polyring import (check_lemma1, check_lemma2, check_lemma5, check_lemma6,
                               check_power_congruence)
from cayleyci.refuter import REFUTED, recheck_certificate, refute_directed, refute_undirected


# collected for the terminal summary in conftest.py
LINES = {}


def report(num, title, ok, elapsed, limit, detail=""):
    within = elapsed < limit
    line = (f"{'PASS' if ok and within else 'FAIL'} criterion {num}: {title} "
            f"({elapsed:.2f} s, limit {limit} s){' - ' + detail if detail else ''}")
    LINES[num] = line
    print(line, flush=True)
    assert ok, line
    assert within, line


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def criterion_1():
    def run():
        s3, t3, _ = build_family("rank2p3", 3)
        s5, t5, _ = build_family("rank2p3", 5)
        return s3.size, t3.size, s5.size, t5.size
    sizes, dt = timed(run)
    ok = sizes == (729, 729, 203125, 203125) and 729 == (2 * 3 + 3) * 3 ** 4 and 203125 == 13 * 5 ** 6
    return ok, dt, 1, f"|S|,|T| = {sizes}"


def criterion_2():
    def run():
        fails = []
        for p in (3, 5, 7):
            for chk in (check_lemma1, check_lemma2, check_power_congruence):
                if not chk(p).passed:
                    fails.append(f"{chk.__name__}({p})")
        for p in (3, 5):
            if not check_lemma6(p).passed:
                fails.append(f"check_lemma6({p})")
            rng = random.Random(p)
            nv = 2 * p - 1
            for _ in range(500):
                n = [0] * nv
                for i in rng.sample(range(nv), p):
                    n[i] = 1
                m = [rng.randrange(2) for _ in range(nv)]
                if not check_lemma5(p, tuple(n), tuple(m)).passed:
                    fails.append(f"check_lemma5({p}, {n}, {m})")
        return fails
    fails, dt = timed(run)
    return not fails, dt, 30, "all identities hold" if not fails else ", ".join(fails[:5])


EXPECTED_C = {"rank2p3": 1, "rank4p2": -1, "rankbinom": 1}


def criterion_3():
    def run():
        bad = []
        for fam, p in [("rank2p3", 3), ("rank4p2", 3), ("rankbinom", 3), ("rank2p3", 5), ("rank4p2", 5)]:
            S, T, phi = build_family(fam, p)
            rep = verify_polymap_symbolic(S, T, phi)
            if not rep.passed or rep.entry("C_0")["constant"] != EXPECTED_C[fam] % p:
                bad.append(f"symbolic {fam} p={p}")
            if p == 3:
                pw = verify_polymap_pointwise(S, T, phi, "exhaustive")
                if not pw.passed or pw.notes["base_points"] != 3 ** S.du:
                    bad.append(f"pointwise {fam}")
        return bad
    bad, dt = timed(run)
    return not bad, dt, 120, "C constants +1, -1, +1; 81/243/243 base points" if not bad else ", ".join(bad)


def criterion_4():
    def run():
        out = []
        for p in (3, 5):
            S, T, _ = build_family("rank2p3", p)
            rc = refute_directed(S, T)
            ev = rc.step("infeasible").evidence
            A, b = ev["A"], ev["b"]
            # independent re-check of the all-ones combination with plain ints
            zero = all(sum(row[j] for row in A) % p == 0 for j in range(len(A[0])))
            out.append(rc.conclusion == REFUTED and zero and sum(b) % p == 1
                       and recheck_certificate(rc.to_json()))
        return out
    out, dt = timed(run)
    return all(out), dt, 10, "lambda = all-ones, lambda^T A = 0, lambda^T b = 1 at p = 3, 5"


def criterion_5():
    def run():
        S, T, _ = build_family("rank2p3", 5)
        rc = refute_undirected(S, T)
        profile = rc.step("degree_profile").evidence["degree_profile"]
        S3, T3, _ = build_family("rank2p3", 3)
        rc3 = refute_undirected(S3, T3)
        hyp = rc3.step("hypothesis")
        with tempfile.TemporaryDirectory() as d:
            code = main(["refute", "--p", "3", "--mode", "undirected", "--out", os.path.join(d, "c.json")])
        return profile, rc.conclusion, code, hyp.evidence["message"]
    (profile, concl, code, msg), dt = timed(run)
    ok = profile == {"2": 24, "12": 2} and concl == REFUTED and code == 2 and "p > 3" in msg
    return ok, dt, 10, f"profile {profile}, {concl}; p=3 exit {code}"


def criterion_6():
    def run():
        counts = [len(b_partners(k, 3)) for k in subsets_O(3)]
        S, _, _ = build_family("rankbinom", 3)
        return counts, S.du + S.dv
    (counts, rank), dt = timed(run)
    ok = counts == [3] * 10 and rank == 15 == 2 * 3 - 1 + comb(5, 3)
    return ok, dt, 1, f"10 subsets x 3 partners, rank {rank}"


def criterion_7():
    def run():
        a = ci_scan(2, 3, include_zero=True)
        b = ci_scan(3, 2)
        return a, b
    (a, b), dt = timed(run)
    ok = (a["connection_sets"] == 512 and b["connection_sets"] == 128
          and a["counterexample_count"] == b["counterexample_count"] == 0
          and not a["definitional_failures"] and not b["definitional_failures"])
    return ok, dt, 300, "Z_3^2: 512 sets, Z_2^3: 128 sets, 0 counterexamples"


def criterion_8():
    def run():
        S, T, phi = build_family("rank2p3", 3)
        c = T.by_label("A_1")
        Tbad = T.with_classes([replace(x, rhs=(x.rhs + 1) % 3) if x is c else x for x in T.classes])
        sym = verify_polymap_symbolic(S, Tbad, phi)
        pw = verify_polymap_pointwise(S, Tbad, phi, "exhaustive")
        witness = "witness" in pw.entry("A_1")
        rc = refute_directed(S, S)
        return sym.passed, pw.passed, witness, rc.conclusion
    (sym, pw, witness, concl), dt = timed(run)
    ok = not sym and not pw and witness and concl != REFUTED
    return ok, dt, 60, f"corrupted A_1 caught with witness; refute(S, S) -> {concl}"


def criterion_9(tmpdir):
    def run():
        S, _, _ = build_family("rank2p3", 3)
        path = os.path.join(tmpdir, "rank2p3_p3.edges")
        with open(path, "wb") as fh:
            written = write_edges(S, fh)
        rep = recount_edge_list(path, S)
        os.remove(path)
        return written, rep
    (written, rep), dt = timed(run)
    ok = written == rep["lines"] == 14348907 and rep["ok"]
    return ok, dt, 120, f"{rep['lines']} lines, recount ok={rep['ok']}"


TITLES = {
    1: "connection-set sizes",
    2: "lemma suite",
    3: "isomorphism maps",
    4: "directed refutation",
    5: "undirected refutation",
    6: "rankbinom structure",
    7: "CI oracle ground truth",
    8: "negative controls",
    9: "edge-list export",
}
CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8}


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num):
    ok, dt, limit, detail = CRITERIA[num]()
    report(num, TITLES[num], ok, dt, limit, detail)


def test_criterion_9(tmp_path):
    ok, dt, limit, detail = criterion_9(str(tmp_path))
    report(9, TITLES[9], ok, dt, limit, detail)


if __name__ == "__main__":
    failed = 0
    for num in range(1, 10):
        try:
            if num == 9:
                with tempfile.TemporaryDirectory() as d:
                    ok, dt, limit, detail = criterion_9(d)
            else:
                ok, dt, limit, detail = CRITERIA[num]()
            report(num, TITLES[num], ok, dt, limit, detail)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
