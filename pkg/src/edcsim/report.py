"""Experiment output record."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

UNAVAILABLE = "oracle unavailable"


def _ratio(num, den):
    if num is None or den is None:
        return None
    if den == 0:
        return 1.0 if num == 0 else None
    return num / den


@dataclass
class ApproxReport:
    """Measured solution sizes against oracle optima.

    ``matching_ratio`` is ``|M| / MM(G)`` (at most 1); ``cover_ratio`` is
    ``|C| / VC`` against the exact cover when known, otherwise against the
    lower bound named in ``vc_kind``.
    """

    instance: str
    algorithm: str
    seed: int
    matching_size: int | None = None
    cover_size: int | None = None
    oracle_mm: int | None = None
    oracle_vc: int | None = None
    vc_kind: str = "exact"
    resources: dict[str, Any] = field(default_factory=dict)

    @property
    def matching_ratio(self) -> float | None:
        return _ratio(self.matching_size, self.oracle_mm)

    @property
    def cover_ratio(self) -> float | None:
        return _ratio(self.cover_size, self.oracle_vc)

    def as_dict(self) -> dict[str, Any]:
        def show(x):
            return UNAVAILABLE if x is None else x

        row = {
            "instance": self.instance,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "matching_size": show(self.matching_size),
            "cover_size": show(self.cover_size),
            "oracle_mm": show(self.oracle_mm),
            "oracle_vc": show(self.oracle_vc),
            "vc_kind": self.vc_kind,
            "matching_ratio": show(self.matching_ratio),
            "cover_ratio": show(self.cover_ratio),
        }
        row.update(self.resources)
        return row
