"""Verdict records shared by the relation validator and the theorem checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

HOLDS = "holds"
FAILS = "fails"
SKIPPED = "skipped"


@dataclass
class VerdictReport:
    claim: str
    phi: str
    ring: str
    i: Optional[str] = None
    j: Optional[str] = None
    verdict: str = SKIPPED
    sizes: Dict[str, Optional[int]] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None
    millis: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (HOLDS, FAILS, SKIPPED):
            raise ValueError(f"bad verdict {self.verdict!r}")

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def fail(self, witness: Dict[str, Any]) -> "VerdictReport":
        self.verdict = FAILS
        self.witness = witness
        return self

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "claim": self.claim,
            "phi": self.phi,
            "ring": self.ring,
            "i": self.i,
            "j": self.j,
            "verdict": self.verdict,
            "sizes": dict(self.sizes),
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        out["millis"] = self.millis
        return out


def matrix_witness(mat, **extra) -> Dict[str, Any]:
    w: Dict[str, Any] = {"matrix": [[int(v) for v in row] for row in mat]}
    w.update(extra)
    return w


def combine(verdicts: List[str]) -> str:
    if FAILS in verdicts:
        return FAILS
    if verdicts and all(v == HOLDS for v in verdicts):
        return HOLDS
    return SKIPPED
