"""Command line entry point.

Exit codes: 0 pass, 1 a check failed, 2 inconclusive by design (a case the
hand argument does not cover), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import certificate
from .cioracle import OracleError, ci_scan
from .export import FORMATS, ExportError, export
from .families import FAMILIES, FamilyError, build_family, undirected_closure
from .gfp import FieldError, check_modulus
from .isomap import EXHAUSTIVE_LIMIT, verify_polymap_pointwise, verify_polymap_symbolic
from .polyring import run_all_lemmas
from .refuter import FAILED, REFUTED, refute_directed, refute_undirected

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
MAX_LEMMA_P = 13


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _prime(text: str) -> int:
    try:
        return check_modulus(int(text))
    except (ValueError, FieldError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _emit(cert: dict, out: str | None):
    text = certificate.dumps(cert)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _args_dict(ns: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(ns).items() if k not in ("func", "out", "threads")}


def cmd_lemmas(ns) -> int:
    if ns.p > MAX_LEMMA_P:
        raise UsageError(f"lemmas supports p <= {MAX_LEMMA_P}")
    checks = run_all_lemmas(ns.p, lemma5_samples=ns.samples, seed=ns.seed)
    ok = all(c.passed for c in checks)
    for c in checks:
        print(f"{c.name:18s} {c.status}", file=sys.stderr)
    cert = certificate.make("lemmas", _args_dict(ns), {"checks": [c.to_json() for c in checks]},
                            "pass" if ok else "fail")
    _emit(cert, ns.out)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_build(ns) -> int:
    S, T, phi = build_family(ns.family, ns.p)
    out = Path(ns.out or f"{ns.family}_p{ns.p}")
    out.mkdir(parents=True, exist_ok=True)
    for name, obj in (("S", S), ("T", T), ("phi", phi)):
        (out / f"{name}.json").write_text(json.dumps(obj.to_json(), indent=1) + "\n")
    print(f"{ns.family} p={ns.p}: {len(S.classes)} classes, |S| = {S.size}, du={S.du}, dv={S.dv} -> {out}",
          file=sys.stderr)
    return EXIT_PASS


def cmd_verify_iso(ns) -> int:
    S, T, phi = build_family(ns.family, ns.p)
    reports = []
    if ns.mode in ("symbolic", "both"):
        reports.append(verify_polymap_symbolic(S, T, phi, threads=ns.threads))
    if ns.mode in ("pointwise", "both"):
        budget = ns.budget
        if budget is None:
            budget = "exhaustive" if S.p ** S.du <= EXHAUSTIVE_LIMIT else "1000"
        reports.append(verify_polymap_pointwise(S, T, phi, budget if budget == "exhaustive" else int(budget),
                                                seed=ns.seed))
    ok = all(r.passed for r in reports)
    for r in reports:
        print(f"{r.mode:10s} {'pass' if r.passed else 'fail'} ({len(r.entries)} classes)", file=sys.stderr)
    cert = certificate.make("verify-iso", _args_dict(ns), {"reports": [r.to_json() for r in reports]},
                            "pass" if ok else "fail")
    _emit(cert, ns.out)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_refute(ns) -> int:
    S, T, _ = build_family(ns.family, ns.p)
    if ns.mode == "directed":
        rc = refute_directed(S, T)
    else:
        rc = refute_undirected(S, T)
    for s in rc.steps:
        print(f"{s.name:18s} {s.status}", file=sys.stderr)
        if s.name == "hypothesis" and not s.passed:
            print(s.evidence["message"], file=sys.stderr)
    print(f"conclusion: {rc.conclusion}", file=sys.stderr)
    cert = certificate.make("refute", _args_dict(ns), {"certificate": rc.to_json()}, rc.conclusion)
    _emit(cert, ns.out)
    if rc.conclusion == REFUTED:
        return EXIT_PASS
    return EXIT_FAIL if rc.conclusion == FAILED else EXIT_INCONCLUSIVE


def cmd_export(ns) -> int:
    S, T, _ = build_family(ns.family, ns.p)
    target = {"S": S, "T": T}.get(ns.which)
    if target is None:
        target = undirected_closure(S if ns.which == "Sbar" else T)
    if ns.out:
        with open(ns.out, "wb") as fh:
            n = export(target, ns.format, fh, ns.cap)
    else:
        n = export(target, ns.format, sys.stdout.buffer, ns.cap)
    print(f"{ns.which} ({ns.family}, p={ns.p}) -> {ns.format}: "
          f"{target.p ** (target.du + target.dv)} vertices, {n} edges", file=sys.stderr)
    return EXIT_PASS


def cmd_oracle(ns) -> int:
    report = ci_scan(ns.n, ns.p, include_zero=ns.include_zero)
    print(f"Z_{ns.p}^{ns.n}: {report['connection_sets']} connection sets, {report['orbits']} orbits, "
          f"{report['counterexample_count']} counterexamples, "
          f"{len(report['definitional_failures'])} definitional failures", file=sys.stderr)
    if report["definitional_failures"]:
        verdict, code = "fail", EXIT_FAIL
    elif report["counterexample_count"]:
        verdict, code = "not-ci", EXIT_FAIL
    else:
        verdict, code = "pass", EXIT_PASS
    cert = certificate.make("oracle", _args_dict(ns), {"report": report}, verdict)
    _emit(cert, ns.out)
    return code


def cmd_recheck(ns) -> int:
    cert = certificate.load(ns.certificate)
    got = certificate.recheck(cert)
    print(f"{cert['command']}: recorded {cert['verdict']}, recheck {got}", file=sys.stderr)
    return EXIT_PASS if got == cert["verdict"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cayleyci", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1, help="worker processes, 0 = all cores")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, family=True):
        sp.add_argument("--p", type=_prime, required=True, help="odd prime")
        if family:
            sp.add_argument("--family", choices=FAMILIES, default="rank2p3")
        sp.add_argument("--out", help="output path (certificate JSON; default stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    sp = sub.add_parser("lemmas", help="check the polynomial identities")
    common(sp, family=False)
    sp.add_argument("--samples", type=int, default=500, help="random (n, m) pairs for the monomial difference formula")
    sp.set_defaults(func=cmd_lemmas)

    sp = sub.add_parser("build", help="write S.json, T.json and phi.json")
    common(sp)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("verify-iso", help="check that phi maps Cay(G,S) onto Cay(G,T)")
    common(sp)
    sp.add_argument("--mode", choices=("symbolic", "pointwise", "both"), default="both")
    sp.add_argument("--budget", help="'exhaustive' or a number of sampled base points")
    sp.set_defaults(func=cmd_verify_iso)

    sp = sub.add_parser("refute", help="check that no automorphism of G maps S to T")
    common(sp)
    sp.add_argument("--mode", choices=("directed", "undirected"), default="directed")
    sp.set_defaults(func=cmd_refute)

    sp = sub.add_parser("export", help="write a Cayley graph as a benchmark file")
    common(sp)
    sp.add_argument("--which", choices=("S", "T", "Sbar", "Tbar"), default="S")
    sp.add_argument("--format", choices=FORMATS, default="edges")
    sp.add_argument("--cap", type=int, default=2 * 10 ** 7, help="maximum number of arcs")
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("oracle", help="brute-force CI check of Z_p^n for tiny groups")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True, help="prime (2 allowed here)")
    sp.add_argument("--include-zero", action="store_true", help="also scan connection sets containing 0")
    sp.add_argument("--out")
    sp.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("recheck", help="re-verify the evidence in a certificate")
    sp.add_argument("certificate")
    sp.set_defaults(func=cmd_recheck)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    if getattr(ns, "threads", 1) < 0:
        ap.error("--threads must be >= 0")
    try:
        return ns.func(ns)
    except (UsageError, FamilyError, OracleError, ExportError, FieldError) as exc:
        print(f"cayleyci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
