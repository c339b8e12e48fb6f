"""Flavour sets, determinant splits and partition-function results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, SeparationError, UnsupportedError, ValidationError
from .linalg import SEPARATION


def _complex_tuple(values) -> tuple:
    out = []
    for v in values:
        if isinstance(v, dict):
            v = complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
        out.append(complex(v))
    return tuple(out)


def check_distinct(values, what: str = "flavour arguments") -> None:
    v = np.asarray(values, dtype=complex)
    if v.size < 2:
        return
    scale = max(float(np.max(np.abs(v))), 1.0)
    gaps = np.abs(v[:, None] - v[None, :])[np.triu_indices(v.size, 1)]
    if np.min(gaps) <= SEPARATION * scale:
        raise SeparationError(f"{what} are not separated (min gap {np.min(gaps):.3e})")


@dataclass(frozen=True)
class FlavorSet:
    """Bosonic (denominator) and fermionic (numerator) flavour masses."""

    bosonic: tuple = ()
    fermionic: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bosonic", _complex_tuple(self.bosonic))
        object.__setattr__(self, "fermionic", _complex_tuple(self.fermionic))
        check_distinct(self.bosonic + self.fermionic)

    @property
    def k1(self) -> int:
        return len(self.bosonic)

    @property
    def k2(self) -> int:
        return len(self.fermionic)

    def require_offaxis_bosons(self) -> None:
        for k in self.bosonic:
            if abs(k.imag) <= SEPARATION * max(1.0, abs(k)):
                raise DomainError(f"bosonic flavour {k} needs a non-zero imaginary part")

    def permuted(self, pb=None, pf=None) -> "FlavorSet":
        b = self.bosonic if pb is None else tuple(self.bosonic[i] for i in pb)
        f = self.fermionic if pf is None else tuple(self.fermionic[i] for i in pf)
        return FlavorSet(b, f)

    def to_dict(self) -> dict:
        enc = lambda zs: [{"re": z.real, "im": z.imag} for z in zs]
        return {"bosonic": enc(self.bosonic), "fermionic": enc(self.fermionic)}

    @classmethod
    def from_dict(cls, obj: dict) -> "FlavorSet":
        return cls(obj.get("bosonic", ()), obj.get("fermionic", ()))


@dataclass(frozen=True)
class DetSplit:
    """Assignment of ``l11`` bosons and ``l21`` fermions to the first group."""

    l11: int
    l21: int

    def dims(self, n: int, k1: int, k2: int) -> tuple[int, int]:
        l12, l22 = k1 - self.l11, k2 - self.l21
        return n + self.l21 - self.l11, n + l22 - l12

    def validate(self, n: int, k1: int, k2: int) -> tuple[int, int]:
        if not (0 <= self.l11 <= k1 and 0 <= self.l21 <= k2):
            raise ValidationError(f"split {self} incompatible with (k1, k2) = ({k1}, {k2})")
        d1, d2 = self.dims(n, k1, k2)
        if d1 < 0 or d2 < 0 or d1 > d2:
            raise UnsupportedError(f"split {self} gives d1 = {d1}, d2 = {d2}; need 0 <= d1 <= d2")
        return d1, d2


def valid_splits(n: int, k1: int, k2: int) -> list[DetSplit]:
    out = []
    for l11 in range(k1 + 1):
        for l21 in range(k2 + 1):
            s = DetSplit(l11, l21)
            d1, d2 = s.dims(n, k1, k2)
            if 0 <= d1 <= d2:
                out.append(s)
    return out


@dataclass(frozen=True)
class PartitionResult:
    value: complex
    method: str
    normalization: str = "ratio-to-Z00"
    stderr: Optional[float] = None
    warnings: tuple = ()
    info: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        out = {
            "value": {"re": self.value.real, "im": self.value.imag},
            "method": self.method,
            "normalization": self.normalization,
            "stderr": self.stderr,
            "warnings": list(self.warnings),
        }
        if self.info:
            out["info"] = self.info
        return out
