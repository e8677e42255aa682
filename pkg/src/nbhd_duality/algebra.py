"""Finite Boolean and modal algebras over powersets of atoms.

Elements are integer codes ``0 .. 2**n - 1`` read as characteristic vectors
over ``n`` atoms, so meet/join/complement are bitwise operations. The Box
operator is an arbitrary total table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import AlgebraError, NotSeparableError

MAX_ATOMS = 12


@dataclass(frozen=True)
class FiniteModalAlgebra:
    atom_count: int
    box_table: tuple[int, ...]

    def __post_init__(self):
        n = self.atom_count
        if not isinstance(n, int) or not 1 <= n <= MAX_ATOMS:
            raise AlgebraError(f"atom count must be in 1..{MAX_ATOMS}, got {n!r}")
        table = tuple(self.box_table)
        if len(table) != 1 << n:
            raise AlgebraError(
                f"box table has {len(table)} entries, expected {1 << n}")
        for i, c in enumerate(table):
            if not isinstance(c, (int, np.integer)) or not 0 <= c < (1 << n):
                raise AlgebraError(f"box table entry {i} is out of range: {c!r}")
        object.__setattr__(self, "box_table", tuple(int(c) for c in table))

    @property
    def size(self) -> int:
        return 1 << self.atom_count

    @property
    def top(self) -> int:
        return (1 << self.atom_count) - 1

    bottom = 0

    @property
    def atoms(self) -> list[int]:
        return [1 << i for i in range(self.atom_count)]

    def elements(self) -> range:
        return range(self.size)

    def meet(self, x: int, y: int) -> int:
        return x & y

    def join(self, x: int, y: int) -> int:
        return x | y

    def complement(self, x: int) -> int:
        return self.top ^ x

    def leq(self, x: int, y: int) -> bool:
        return x & ~y == 0

    def box(self, x: int) -> int:
        return self.box_table[x]

    def meet_all(self, xs: Iterable[int]) -> int:
        """Meet of a finite family; the empty meet is the top element."""
        return reduce(lambda a, b: a & b, xs, self.top)

    def to_json(self) -> dict:
        return {"atoms": self.atom_count, "box": list(self.box_table)}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteModalAlgebra":
        try:
            return cls(int(data["atoms"]), tuple(data["box"]))
        except KeyError as e:
            raise AlgebraError(f"algebra JSON is missing key {e}") from None


def make_powerset_algebra(n: int, box_table: Sequence[int]) -> FiniteModalAlgebra:
    return FiniteModalAlgebra(n, tuple(box_table))


def identity_algebra(n: int) -> FiniteModalAlgebra:
    return FiniteModalAlgebra(n, tuple(range(1 << n)))


@dataclass(frozen=True)
class AlgebraProperties:
    monotonic: bool
    topped: bool
    cufi: bool

    def flags(self) -> frozenset[str]:
        return frozenset(k for k in ("monotonic", "topped", "cufi") if getattr(self, k))

    def to_json(self) -> dict:
        return {"monotonic": self.monotonic, "topped": self.topped, "cufi": self.cufi}


def check_algebra_properties(A: FiniteModalAlgebra) -> AlgebraProperties:
    box = np.asarray(A.box_table, dtype=np.int64)
    codes = np.arange(A.size, dtype=np.int64)
    monotonic = cufi = True
    for x in range(A.size):
        lhs_meet = box[x & codes]
        rhs_meet = box[x] & box
        # Box(x & y) <= Box x & Box y
        if monotonic and np.any(lhs_meet & ~rhs_meet):
            monotonic = False
        # Box x & Box y <= Box(x & y)
        if cufi and np.any(rhs_meet & ~lhs_meet):
            cufi = False
        if not (monotonic or cufi):
            break
    return AlgebraProperties(monotonic, A.box(A.top) == A.top, cufi)


@dataclass(frozen=True)
class Filter:
    algebra: FiniteModalAlgebra = field(repr=False)
    elements: frozenset[int]

    def __contains__(self, x: int) -> bool:
        return x in self.elements

    @classmethod
    def principal(cls, A: FiniteModalAlgebra, a: int) -> "Filter":
        return cls(A, frozenset(x for x in A.elements() if A.leq(a, x)))

    def generator(self) -> int:
        return self.algebra.meet_all(self.elements)

    def is_filter(self) -> bool:
        # finite case: a filter is exactly the up-set of its own meet
        if not self.elements:
            return False
        A = self.algebra
        m = self.generator()
        return self.elements == frozenset(y for y in A.elements() if A.leq(m, y))

    def is_proper(self) -> bool:
        return 0 not in self.elements

    def is_prime(self) -> bool:
        # up-set of m is prime iff m is an atom
        if not (self.is_filter() and self.is_proper()):
            return False
        m = self.generator()
        return m & (m - 1) == 0

    def to_json(self) -> list[int]:
        return sorted(self.elements)


def enumerate_prime_filters(A: FiniteModalAlgebra) -> list[Filter]:
    """Prime filters of a finite Boolean algebra, one per atom, in atom order."""
    return [Filter.principal(A, a) for a in A.atoms]


@dataclass(frozen=True)
class MeetFamilySet:
    families: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "families", tuple(tuple(int(c) for c in X) for X in self.families))

    def __iter__(self):
        return iter(self.families)

    def __len__(self):
        return len(self.families)

    def validate(self, A: FiniteModalAlgebra) -> "MeetFamilySet":
        for i, X in enumerate(self.families):
            for c in X:
                if not 0 <= c < A.size:
                    raise AlgebraError(f"family {i} contains code {c} outside the carrier")
        return self

    def to_json(self) -> list[list[int]]:
        return [list(X) for X in self.families]


def as_meet_families(S, A: FiniteModalAlgebra | None = None) -> MeetFamilySet:
    if S is None:
        S = MeetFamilySet(())
    elif not isinstance(S, MeetFamilySet):
        S = MeetFamilySet(tuple(tuple(X) for X in S))
    if A is not None:
        S.validate(A)
    return S


def is_q_filter(A: FiniteModalAlgebra, F: Filter, S) -> bool:
    """True iff the prime filter ``F`` contains the meet of every family of
    ``S`` that it contains elementwise. Finite meets always exist here."""
    if not F.is_prime():
        raise AlgebraError("is_q_filter requires a prime filter")
    for X in as_meet_families(S, A):
        if all(x in F for x in X) and A.meet_all(X) not in F:
            return False
    return True


def q_filters(A: FiniteModalAlgebra, S) -> list[Filter]:
    return [F for F in enumerate_prime_filters(A) if is_q_filter(A, F, S)]


def separate(A: FiniteModalAlgebra, a: int, b: int, S=None) -> Filter:
    """A Q-filter for ``S`` containing ``a`` but not ``b``.

    Picks the lowest atom below ``a`` and not below ``b``; its principal
    filter is prime, and in a finite algebra every prime filter is a Q-filter.
    """
    if A.leq(a, b):
        raise NotSeparableError(f"not separable: {a} <= {b}")
    diff = a & ~b
    atom = diff & -diff
    F = Filter.principal(A, atom)
    assert is_q_filter(A, F, S)
    return F


def check_box_meet_equation(A: FiniteModalAlgebra, X: Sequence[int]) -> bool:
    if not X:
        raise AlgebraError("the family must be non-empty")
    return A.box(A.meet_all(X)) == A.meet_all(A.box(x) for x in X)


def is_algebra_homomorphism(f: Sequence[int], A: FiniteModalAlgebra,
                            B: FiniteModalAlgebra) -> bool:
    """True iff ``f`` preserves meet, complement, 0, 1 and Box."""
    f = list(f)
    if len(f) != A.size or any(not 0 <= c < B.size for c in f):
        return False
    if f[0] != 0 or f[A.top] != B.top:
        return False
    for x in A.elements():
        if f[A.complement(x)] != B.complement(f[x]):
            return False
        if f[A.box(x)] != B.box(f[x]):
            return False
        for y in A.elements():
            if f[x & y] != f[x] & f[y]:
                return False
    return True
