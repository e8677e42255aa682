"""Eventually periodic subsets of the natural numbers.

A set is stored as a bit-string prefix followed by a bit-string period that
repeats forever. Instances are kept in canonical form (shortest period, then
shortest prefix), so two instances denote the same set iff they are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import lcm
from typing import Iterable

from .errors import NotSeparableError, NbhdError


def _minimal_period(word: str) -> str:
    # failure function: the shortest root of a word that tiles it
    n = len(word)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and word[i] != word[k]:
            k = fail[k - 1]
        if word[i] == word[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return word[:p] if n % p == 0 else word


@lru_cache(maxsize=1 << 16)
def canonicalize(prefix: str, period: str) -> tuple[str, str]:
    if not period:
        raise NbhdError("period must be non-empty")
    if set(prefix) - {"0", "1"} or set(period) - {"0", "1"}:
        raise NbhdError("prefix and period must be bit strings")
    period = _minimal_period(period)
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1] + period[:-1]
    return prefix, period


_FLIP = str.maketrans("01", "10")


@dataclass(frozen=True)
class EPSet:
    prefix: str = ""
    period: str = "0"

    def __post_init__(self):
        prefix, period = canonicalize(self.prefix, self.period)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    @classmethod
    def _raw(cls, prefix: str, period: str) -> "EPSet":
        # bypasses the dataclass __init__; arguments are canonicalized here
        obj = object.__new__(cls)
        prefix, period = canonicalize(prefix, period)
        object.__setattr__(obj, "prefix", prefix)
        object.__setattr__(obj, "period", period)
        return obj

    # constructors

    @classmethod
    def empty(cls) -> "EPSet":
        return cls("", "0")

    @classmethod
    def full(cls) -> "EPSet":
        return cls("", "1")

    @classmethod
    def finite(cls, members: Iterable[int]) -> "EPSet":
        members = set(members)
        if not members:
            return cls.empty()
        return cls("".join("1" if i in members else "0" for i in range(max(members) + 1)), "0")

    @classmethod
    def cofinite(cls, excluded: Iterable[int]) -> "EPSet":
        return ~cls.finite(excluded)

    @classmethod
    def tail_from(cls, start: int) -> "EPSet":
        return cls("0" * start, "1")

    # membership and windows

    def __contains__(self, i: int) -> bool:
        if i < 0:
            return False
        if i < len(self.prefix):
            return self.prefix[i] == "1"
        return self.period[(i - len(self.prefix)) % len(self.period)] == "1"

    def window(self, length: int) -> str:
        """Characteristic bits of ``0 .. length - 1``."""
        ell, p = len(self.prefix), len(self.period)
        if length <= ell:
            return self.prefix[:length]
        rest = length - ell
        return self.prefix + (self.period * (rest // p + 1))[:rest]

    # Boolean operations

    def _aligned_ints(self, other: "EPSet") -> tuple[int, int, int, int]:
        # both sets as integers over a common prefix length and period length
        ell = max(len(self.prefix), len(other.prefix))
        p = lcm(len(self.period), len(other.period))
        return int(self.window(ell + p), 2), int(other.window(ell + p), 2), ell, p

    def _from_int(self, bits: int, ell: int, p: int) -> "EPSet":
        w = format(bits & ((1 << (ell + p)) - 1), f"0{ell + p}b")
        return EPSet._raw(w[:ell], w[ell:])

    def __and__(self, other: "EPSet") -> "EPSet":
        a, b, ell, p = self._aligned_ints(other)
        return self._from_int(a & b, ell, p)

    def __or__(self, other: "EPSet") -> "EPSet":
        a, b, ell, p = self._aligned_ints(other)
        return self._from_int(a | b, ell, p)

    def __sub__(self, other: "EPSet") -> "EPSet":
        a, b, ell, p = self._aligned_ints(other)
        return self._from_int(a & ~b, ell, p)

    def __invert__(self) -> "EPSet":
        return EPSet._raw(self.prefix.translate(_FLIP), self.period.translate(_FLIP))

    def __le__(self, other: "EPSet") -> bool:
        return (self - other).is_empty()

    def is_empty(self) -> bool:
        return self.prefix == "" and self.period == "0"

    def is_finite(self) -> bool:
        return self.period == "0"

    def is_cofinite(self) -> bool:
        return self.period == "1"

    def min_element(self) -> int | None:
        i = self.prefix.find("1")
        if i >= 0:
            return i
        j = self.period.find("1")
        return None if j < 0 else len(self.prefix) + j

    def to_json(self) -> dict:
        return {"prefix": self.prefix, "period": self.period}

    @classmethod
    def from_json(cls, data: dict) -> "EPSet":
        return cls(data["prefix"], data["period"])

    def __str__(self):
        return f"{self.prefix}({self.period})"


EVENS = EPSet("", "10")
ODDS = EPSet("", "01")


def ep_union(x: EPSet, y: EPSet) -> EPSet:
    return x | y


def ep_intersection(x: EPSet, y: EPSet) -> EPSet:
    return x & y


def ep_complement(x: EPSet) -> EPSet:
    return ~x


def ep_subset(x: EPSet, y: EPSet) -> bool:
    return x <= y


def ep_is_cofinite(x: EPSet) -> bool:
    return x.is_cofinite()


@dataclass(frozen=True)
class ParametricFamily:
    """A countable family of EP sets.

    ``explicit`` holds a finite list; ``co_singleton`` is the family of all
    complements of singletons and ``tail`` the family of all final segments.
    """

    kind: str
    members: tuple[EPSet, ...] = ()

    KINDS = ("explicit", "co_singleton", "tail")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise NbhdError(f"unknown family kind {self.kind!r}")
        if self.kind == "explicit" and not self.members:
            raise NbhdError("explicit families must be non-empty")
        if self.kind != "explicit" and self.members:
            raise NbhdError(f"{self.kind} families take no explicit members")

    @classmethod
    def explicit(cls, members: Iterable[EPSet]) -> "ParametricFamily":
        return cls("explicit", tuple(members))

    @classmethod
    def co_singleton(cls) -> "ParametricFamily":
        return cls("co_singleton")

    @classmethod
    def tail(cls) -> "ParametricFamily":
        return cls("tail")

    def member(self, i: int) -> EPSet:
        if self.kind == "explicit":
            return self.members[i]
        if self.kind == "co_singleton":
            return EPSet.cofinite([i])
        return EPSet.tail_from(i)

    def member_excluding(self, n: int) -> int | None:
        """Index of some member that does not contain ``n``, if any."""
        if self.kind == "co_singleton":
            return n
        if self.kind == "tail":
            return n + 1
        for i, X in enumerate(self.members):
            if n not in X:
                return i
        return None


def family_meet(F: ParametricFamily) -> EPSet:
    """Greatest lower bound of ``F`` in the EP algebra.

    Every supported kind has one: the infinite kinds have no non-empty lower
    bound, since any lower bound misses every ``i``.
    """
    if F.kind == "explicit":
        out = F.members[0]
        for X in F.members[1:]:
            out = out & X
        return out
    return EPSet.empty()


def ep_principal_ultrafilter_is_q(n: int, S: Iterable[ParametricFamily]) -> bool:
    """Q condition for ``{X : n in X}``: every family fully inside the
    ultrafilter has its meet inside too."""
    for F in S:
        if F.member_excluding(n) is not None:
            continue
        if n not in family_meet(F):
            return False
    return True


def ep_separate(a: EPSet, b: EPSet, S: Iterable[ParametricFamily] = ()) -> int:
    """Least ``n`` in ``a - b``; the principal ultrafilter at ``n`` separates."""
    n = (a - b).min_element()
    if n is None:
        raise NotSeparableError("not separable: a is a subset of b")
    assert ep_principal_ultrafilter_is_q(n, S)
    return n
