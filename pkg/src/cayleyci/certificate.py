"""Run certificates: one JSON document per CLI run, re-checkable offline."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from math import comb

from . import __version__
from .refuter import recheck_certificate

SCHEMA = 1


def make(command: str, args: dict, payload: dict, verdict: str) -> dict:
    return {
        "schema": SCHEMA,
        "tool": "cayleyci",
        "version": __version__,
        "command": command,
        "args": args,
        "p": args.get("p"),
        "family": args.get("family"),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "payload": payload,
        "verdict": verdict,
    }


def dumps(cert: dict) -> str:
    return json.dumps(cert, indent=2, sort_keys=True) + "\n"


def load(path) -> dict:
    with open(path) as fh:
        cert = json.load(fh)
    if cert.get("schema") != SCHEMA:
        raise ValueError(f"unsupported certificate schema {cert.get('schema')!r}")
    return cert


def _recheck_lemmas(payload: dict, p: int) -> bool:
    for c in payload["checks"]:
        ev = c["evidence"]
        if c["name"] == "power_congruence" and c["verdict"] == "pass":
            if any(v % (p * p) for v in ev["coefficients"].values()):
                return False
        if c["name"] == "lemma6" and c["verdict"] == "pass":
            if comb(2 * p - 1, p) % p != 1 or ev["binom_2p1_p_mod_p"] != 1:
                return False
            if any(comb(2 * p - 1 - int(k), p - int(k)) % p != v for k, v in ev["binom_b"].items()):
                return False
    return True


def _recheck_iso(payload: dict) -> bool:
    for rep in payload["reports"]:
        if rep["mode"] == "symbolic":
            for e in rep["entries"]:
                if e["verdict"] == "pass" and e.get("constant") != e.get("target"):
                    return False
    return True


def recheck(cert: dict) -> str:
    """Re-verify the embedded evidence and return the verdict it supports."""
    payload, cmd = cert["payload"], cert["command"]
    if cmd == "refute":
        ok = recheck_certificate(payload["certificate"])
    elif cmd == "lemmas":
        ok = _recheck_lemmas(payload, cert["p"])
    elif cmd == "verify-iso":
        ok = _recheck_iso(payload)
    elif cmd == "oracle":
        rep = payload["report"]
        ok = rep["ci"] == (rep["counterexample_count"] == 0 and not rep["definitional_failures"])
    else:
        ok = True
    return cert["verdict"] if ok else "recheck-failed"
