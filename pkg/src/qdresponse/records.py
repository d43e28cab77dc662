"""Sweep output records shared by the steady and sweep modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

__all__ = ["Flag", "SpectrumRecord"]


class Flag(Enum):
    NON_PHYSICAL = "NonPhysical"
    POLE_SKIPPED = "PoleSkipped"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class SpectrumRecord:
    """One row of a sweep: swept value, branch id, observable, flags."""

    x: float
    branch_id: int
    w0: float
    value_re: float
    value_im: float
    flags: frozenset = field(default_factory=frozenset)

    def flags_text(self) -> str:
        return "|".join(sorted(f.value for f in self.flags))
