"""Verdict records shared by the checkers and the certificate writer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"


@dataclass
class Check:
    name: str
    status: str
    claim: str = ""
    evidence: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "claim": self.claim, "verdict": self.status,
                "evidence": self.evidence}

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Check":
        return cls(d["name"], d["verdict"], d.get("claim", ""), d.get("evidence", {}))


def verdict(name: str, ok: bool, claim: str = "", **evidence) -> Check:
    return Check(name, PASS if ok else FAIL, claim, evidence)
