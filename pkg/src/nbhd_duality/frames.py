"""Finite neighborhood frames.

Worlds are ``0 .. m-1``; a set of worlds is an integer bitmask ("subset
code"), and each world carries a sorted tuple of subset codes. A whole
neighborhood family can also be packed into one integer ("family code") with
bit ``X`` set iff subset ``X`` belongs to the family; enumeration uses that
packing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import FrameError

MAX_WORLDS = 12
FLAG_NAMES = ("monotonic", "topped", "cufi")


@dataclass(frozen=True)
class NeighborhoodFrame:
    world_count: int
    nbhd: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = self.world_count
        if not isinstance(m, int) or m < 1:
            raise FrameError(f"world count must be a positive integer, got {m!r}")
        if len(self.nbhd) != m:
            raise FrameError(f"expected {m} neighborhood families, got {len(self.nbhd)}")
        full = 1 << m
        normalized = []
        for c, fam in enumerate(self.nbhd):
            fam = [int(X) for X in fam]
            for X in fam:
                if not 0 <= X < full:
                    raise FrameError(f"world {c}: subset code {X} out of range")
            if len(set(fam)) != len(fam):
                raise FrameError(f"world {c}: duplicate subsets in neighborhood family")
            normalized.append(tuple(sorted(fam)))
        object.__setattr__(self, "nbhd", tuple(normalized))

    @property
    def worlds(self) -> range:
        return range(self.world_count)

    @property
    def full(self) -> int:
        return (1 << self.world_count) - 1

    @cached_property
    def families(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(f) for f in self.nbhd)

    def box(self, X: int) -> int:
        """Worlds whose neighborhood family contains ``X``."""
        out = 0
        for c, fam in enumerate(self.families):
            if X in fam:
                out |= 1 << c
        return out

    def to_json(self) -> dict:
        return {"worlds": self.world_count, "nbhd": [list(f) for f in self.nbhd]}

    @classmethod
    def from_json(cls, data: dict) -> "NeighborhoodFrame":
        try:
            return cls(int(data["worlds"]), tuple(tuple(f) for f in data["nbhd"]))
        except KeyError as e:
            raise FrameError(f"frame JSON is missing key {e}") from None

    @classmethod
    def from_family_codes(cls, m: int, codes: Sequence[int]) -> "NeighborhoodFrame":
        return cls(m, tuple(family_members(code, m) for code in codes))


def family_members(code: int, m: int) -> tuple[int, ...]:
    return tuple(X for X in range(1 << m) if code >> X & 1)


def upward_closure(family: Iterable[int], m: int) -> frozenset[int]:
    """All supersets (within ``m`` worlds) of members of ``family``."""
    seen = set(family)
    stack = list(seen)
    while stack:
        X = stack.pop()
        for w in range(m):
            Y = X | (1 << w)
            if Y not in seen:
                seen.add(Y)
                stack.append(Y)
    return frozenset(seen)


@dataclass(frozen=True)
class FrameProperties:
    monotonic: bool
    topped: bool
    cufi: bool

    def flags(self) -> frozenset[str]:
        return frozenset(k for k in FLAG_NAMES if getattr(self, k))

    def satisfies(self, required: Iterable[str]) -> bool:
        return set(required) <= self.flags()

    def to_json(self) -> dict:
        return {"monotonic": self.monotonic, "topped": self.topped, "cufi": self.cufi}


def family_properties(fam: frozenset[int] | set[int], m: int) -> FrameProperties:
    full = (1 << m) - 1
    # one-element extensions suffice for upward closure
    monotonic = all(X | (1 << w) in fam for X in fam for w in range(m))
    topped = full in fam
    # binary intersections suffice for finite ones
    cufi = all(X & Y in fam for X in fam for Y in fam)
    return FrameProperties(monotonic, topped, cufi)


def check_frame_properties(Z: NeighborhoodFrame) -> FrameProperties:
    props = [family_properties(fam, Z.world_count) for fam in Z.families]
    return FrameProperties(
        all(p.monotonic for p in props),
        all(p.topped for p in props),
        all(p.cufi for p in props),
    )


def preimage(f: Sequence[int], X: int, m1: int) -> int:
    out = 0
    for c in range(m1):
        if X >> f[c] & 1:
            out |= 1 << c
    return out


def is_frame_homomorphism(f: Sequence[int], Z1: NeighborhoodFrame,
                          Z2: NeighborhoodFrame) -> bool:
    """True iff ``f^-1[X] in V1(c)  <=>  X in V2(f(c))`` for all ``c`` and ``X``."""
    f = list(f)
    if len(f) != Z1.world_count or any(not 0 <= d < Z2.world_count for d in f):
        return False
    for c in Z1.worlds:
        fam1, fam2 = Z1.families[c], Z2.families[f[c]]
        for X in range(1 << Z2.world_count):
            if (preimage(f, X, Z1.world_count) in fam1) != (X in fam2):
                return False
    return True


@lru_cache(maxsize=None)
def _family_flags(code: int, m: int) -> frozenset[str]:
    return family_properties(frozenset(family_members(code, m)), m).flags()


def enumerate_frames(m: int, required_properties: Iterable[str] = (),
                     budget: int | None = None) -> Iterator[NeighborhoodFrame]:
    """Frames on ``m`` worlds whose flags include ``required_properties``.

    Order: family codes of world 0 vary slowest, each ascending. Frame
    flags are conjunctions of per-world flags, so filtering is per world.
    """
    if not 1 <= m <= 4:
        raise FrameError("enumerate_frames supports 1 <= m <= 4")
    required = frozenset(required_properties)
    unknown = required - set(FLAG_NAMES)
    if unknown:
        raise FrameError(f"unknown frame properties: {sorted(unknown)}")
    if budget is not None and budget <= 0:
        return
    n_codes = 1 << (1 << m)

    def allowed() -> Iterator[int]:
        for code in range(n_codes):
            if required <= _family_flags(code, m):
                yield code

    def rec(prefix: list[int]) -> Iterator[list[int]]:
        if len(prefix) == m:
            yield prefix
            return
        for code in allowed():
            yield from rec(prefix + [code])

    count = 0
    for codes in rec([]):
        yield NeighborhoodFrame.from_family_codes(m, codes)
        count += 1
        if budget is not None and count >= budget:
            return


def local_family_flags(m: int) -> list[frozenset[str]]:
    """Flags of every family code on ``m`` worlds, indexed by code."""
    return [_family_flags(code, m) for code in range(1 << (1 << m))]
