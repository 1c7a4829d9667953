"""Extended real numbers and open parameter intervals.

Infinite endpoints are carried as tags, never as IEEE infinities, so interval
logic can branch on them without NaN leaking into arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Literal, Union

Kind = Literal["finite", "-inf", "+inf"]


@total_ordering
@dataclass(frozen=True)
class ExtReal:
    kind: Kind
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("finite", "-inf", "+inf"):
            raise ValueError(f"unknown extended-real kind {self.kind!r}")
        if self.kind == "finite" and not math.isfinite(self.value):
            raise ValueError("finite ExtReal needs a finite value")
        if self.kind != "finite" and self.value != 0.0:
            object.__setattr__(self, "value", 0.0)

    @classmethod
    def of(cls, x: "ExtRealLike") -> "ExtReal":
        """Coerce a float (IEEE infinities allowed), string or ExtReal."""
        if isinstance(x, ExtReal):
            return x
        if isinstance(x, str):
            s = x.strip().lower()
            if s in ("inf", "+inf", "infinity", "+infinity"):
                return POS_INF
            if s in ("-inf", "-infinity"):
                return NEG_INF
            x = float(s)
        x = float(x)
        if math.isnan(x):
            raise ValueError("NaN is not an extended real")
        if x == math.inf:
            return POS_INF
        if x == -math.inf:
            return NEG_INF
        return cls("finite", x)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def __float__(self) -> float:
        # Only for display and plotting, never inside solver arithmetic.
        if self.kind == "+inf":
            return math.inf
        if self.kind == "-inf":
            return -math.inf
        return self.value

    def _rank(self):
        return {"-inf": (0, 0.0), "finite": (1, self.value), "+inf": (2, 0.0)}[self.kind]

    def __lt__(self, other):
        if not isinstance(other, ExtReal):
            other = ExtReal.of(other)
        return self._rank() < other._rank()

    def __eq__(self, other):
        if not isinstance(other, (ExtReal, int, float)):
            return NotImplemented
        other = ExtReal.of(other)
        return self._rank() == other._rank()

    def __hash__(self):
        return hash(self._rank())

    def reciprocal(self) -> "ExtReal":
        """1/x for x >= 0 with the conventions 1/(+inf) = 0 and 1/0 = +inf."""
        if self.kind == "+inf":
            return ExtReal("finite", 0.0)
        if self.kind == "-inf" or self.value < 0:
            raise ValueError("reciprocal only defined on [0, +inf]")
        if self.value == 0.0:
            return POS_INF
        return ExtReal("finite", 1.0 / self.value)

    def to_json(self) -> Union[float, str]:
        if self.kind == "finite":
            return self.value
        return "inf" if self.kind == "+inf" else "-inf"

    def __repr__(self):
        return f"ExtReal({self.to_json()!r})"


ExtRealLike = Union[ExtReal, float, int, str]

POS_INF = ExtReal("+inf")
NEG_INF = ExtReal("-inf")


def ext_max(*xs: ExtRealLike) -> ExtReal:
    return max(ExtReal.of(x) for x in xs)


def ext_min(*xs: ExtRealLike) -> ExtReal:
    return min(ExtReal.of(x) for x in xs)


@dataclass(frozen=True)
class ParameterInterval:
    """The open interval ]a, b[ of admissible multipliers."""

    a: ExtReal
    b: ExtReal

    def __init__(self, a: ExtRealLike, b: ExtRealLike):
        object.__setattr__(self, "a", ExtReal.of(a))
        object.__setattr__(self, "b", ExtReal.of(b))
        if not self.a < self.b:
            raise ValueError(f"empty parameter interval ]{self.a.to_json()}, {self.b.to_json()}[")
        if self.a == POS_INF or self.b == NEG_INF:
            raise ValueError("degenerate parameter interval")

    def contains(self, lam: float) -> bool:
        """Strict membership in the open interval."""
        lam = float(lam)
        if not math.isfinite(lam):
            return False
        above = self.a.kind == "-inf" or lam > self.a.value
        below = self.b.kind == "+inf" or lam < self.b.value
        return above and below

    # Reparametrization onto t in ]0, 1[, used by bracketing and default grids.

    def from_unit(self, t: float) -> float:
        a, b = self.a, self.b
        if a.is_finite and b.is_finite:
            return a.value + (b.value - a.value) * t
        if a.is_finite:
            return a.value + t / (1.0 - t)
        if b.is_finite:
            return b.value - (1.0 - t) / t
        return math.tan(math.pi * (t - 0.5))

    def to_unit(self, lam: float) -> float:
        a, b = self.a, self.b
        if a.is_finite and b.is_finite:
            return (lam - a.value) / (b.value - a.value)
        if a.is_finite:
            s = lam - a.value
            return s / (1.0 + s)
        if b.is_finite:
            s = b.value - lam
            return 1.0 / (1.0 + s)
        return math.atan(lam) / math.pi + 0.5

    def reciprocal(self) -> "ParameterInterval":
        """]1/b, 1/a[ for a >= 0 (the multiplier range after swapping J and Phi)."""
        return ParameterInterval(self.b.reciprocal(), self.a.reciprocal())

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json()}

    def __repr__(self):
        return f"ParameterInterval({self.a.to_json()!r}, {self.b.to_json()!r})"
