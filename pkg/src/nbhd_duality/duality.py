"""Frames from algebras, algebras from frames, and the representation map.

Worlds of the frame built from an algebra are its Q-filters, listed in the
order of :func:`enumerate_prime_filters`. A world set is a bitmask over that
list, so ``f(x)`` is the bitmask of Q-filters containing ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    FiniteModalAlgebra,
    Filter,
    as_meet_families,
    check_algebra_properties,
    q_filters,
    separate,
)
from .errors import NotMonotonicError, ResourceError
from .frames import MAX_WORLDS, NeighborhoodFrame, upward_closure

VARIANTS = ("J", "Jbar")


def _worlds_and_map(A: FiniteModalAlgebra, S) -> tuple[list[Filter], list[int]]:
    worlds = q_filters(A, as_meet_families(S, A))
    f = []
    for x in A.elements():
        mask = 0
        for i, F in enumerate(worlds):
            if x in F:
                mask |= 1 << i
        f.append(mask)
    return worlds, f


def _generators(A: FiniteModalAlgebra, worlds: list[Filter], f: list[int]) -> list[set[int]]:
    # {f(x) : Box x in F} for each world F
    gens = [set() for _ in worlds]
    for x in A.elements():
        bx = A.box(x)
        for i, F in enumerate(worlds):
            if bx in F:
                gens[i].add(f[x])
    return gens


def build_J(A: FiniteModalAlgebra, S=None) -> NeighborhoodFrame:
    """Monotonic frame on the Q-filters of a monotonic algebra."""
    if not check_algebra_properties(A).monotonic:
        raise NotMonotonicError(
            "build_J needs a monotonic algebra; use build_Jbar for the general case")
    worlds, f = _worlds_and_map(A, S)
    m = len(worlds)
    gens = _generators(A, worlds, f)
    return NeighborhoodFrame(m, tuple(tuple(upward_closure(g, m)) for g in gens))


def build_Jbar(A: FiniteModalAlgebra, S=None) -> NeighborhoodFrame:
    """Frame on the Q-filters without upward closure; any algebra."""
    worlds, f = _worlds_and_map(A, S)
    gens = _generators(A, worlds, f)
    return NeighborhoodFrame(len(worlds), tuple(tuple(g) for g in gens))


def build_K(Z: NeighborhoodFrame) -> FiniteModalAlgebra:
    """Dual algebra: powerset of worlds with ``Box X = {c : X in V(c)}``."""
    if Z.world_count > MAX_WORLDS:
        raise ResourceError(
            f"dual algebra of {Z.world_count} worlds exceeds the {MAX_WORLDS}-world cap")
    table = [0] * (1 << Z.world_count)
    for c, fam in enumerate(Z.nbhd):
        bit = 1 << c
        for X in fam:
            table[X] |= bit
    return FiniteModalAlgebra(Z.world_count, tuple(table))


@dataclass
class EmbeddingReport:
    injective: bool
    boolean_homomorphism: bool
    box_preserved: bool
    meets_preserved: bool
    surjective: bool = False
    variant: str = "J"
    separations_checked: int = 0
    witnesses: dict[str, list[int]] = field(default_factory=dict)

    @property
    def monomorphism(self) -> bool:
        return (self.injective and self.boolean_homomorphism
                and self.box_preserved and self.meets_preserved)

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "injective": self.injective,
            "boolean_homomorphism": self.boolean_homomorphism,
            "box_preserved": self.box_preserved,
            "meets_preserved": self.meets_preserved,
            "surjective": self.surjective,
            "monomorphism": self.monomorphism,
            "separations_checked": self.separations_checked,
            "witnesses": {k: list(v) for k, v in self.witnesses.items()},
        }


def _verify_box_separations(A, S, worlds, f, variant) -> tuple[int, list[int]]:
    """Re-run the separation step behind Box preservation.

    For each world F with ``Box x`` not in F and each ``y`` with ``Box y`` in
    F, obtain a Q-filter telling ``y`` from ``x`` and check the resulting
    ``f(y) != f(x)`` (for J: ``f(y)`` not below ``f(x)``) on the spot.
    """
    checked, bad = 0, []
    in_world = [[A.box(x) in F for F in worlds] for x in A.elements()]
    index = {F.elements: i for i, F in enumerate(worlds)}
    for i in range(len(worlds)):
        outside = [x for x in A.elements() if not in_world[x][i]]
        inside = [y for y in A.elements() if in_world[y][i]]
        for x in outside:
            for y in inside:
                if variant == "J":
                    G = separate(A, y, x, S)
                    ok = (f[y] & ~f[x]) != 0 and (f[y] >> index[G.elements]) & 1
                else:
                    G = separate(A, y, x, S) if not A.leq(y, x) else separate(A, x, y, S)
                    ok = f[y] != f[x]
                checked += 1
                if not ok:
                    bad.append(x)
    return checked, sorted(set(bad))


def stone_map(A: FiniteModalAlgebra, S=None, variant: str = "J",
              verify_separations: bool | None = None) -> tuple[list[int], EmbeddingReport]:
    """The map ``x -> {F : x in F}`` into ``K(J_S(A))`` or ``K(Jbar_S(A))``,
    with every monomorphism condition checked exhaustively.

    The separation re-check is quadratic in the carrier per world, so by
    default it only runs for algebras with at most 4 atoms.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    S = as_meet_families(S, A)
    frame = build_J(A, S) if variant == "J" else build_Jbar(A, S)
    K = build_K(frame)
    worlds, f = _worlds_and_map(A, S)

    fa = np.asarray(f, dtype=np.int64)
    codes = np.arange(A.size, dtype=np.int64)
    witnesses: dict[str, list[int]] = {}

    first_seen: dict[int, int] = {}
    inj_bad = []
    for x, y in enumerate(f):
        if y in first_seen:
            inj_bad.append(x)
        first_seen.setdefault(y, x)
    bool_bad = []
    if f[0] != 0:
        bool_bad.append(0)
    if f[A.top] != K.top:
        bool_bad.append(A.top)
    for x in A.elements():
        if f[A.complement(x)] != K.complement(f[x]) or np.any(fa[x & codes] != (fa[x] & fa)):
            bool_bad.append(x)
    box_bad = [x for x in A.elements() if f[A.box(x)] != K.box(f[x])]
    meet_bad = []
    for j, X in enumerate(S):
        want = K.top
        for x in X:
            want &= f[x]
        if f[A.meet_all(X)] != want:
            meet_bad.append(j)

    if verify_separations is None:
        verify_separations = A.atom_count <= 4
    checked, sep_bad = (0, [])
    if verify_separations:
        checked, sep_bad = _verify_box_separations(A, S, worlds, f, variant)
        box_bad = sorted(set(box_bad) | set(sep_bad))

    for key, bad in (("injective", inj_bad), ("boolean_homomorphism", sorted(set(bool_bad))),
                     ("box_preserved", box_bad), ("meets_preserved", meet_bad)):
        if bad:
            witnesses[key] = bad

    report = EmbeddingReport(
        injective=not inj_bad,
        boolean_homomorphism=not bool_bad,
        box_preserved=not box_bad,
        meets_preserved=not meet_bad,
        surjective=len(set(f)) == K.size,
        variant=variant,
        separations_checked=checked,
        witnesses=witnesses,
    )
    return f, report


def transported_box(A: FiniteModalAlgebra, S=None, variant: str = "Jbar") -> tuple[int, ...]:
    """Box of ``K`` of the constructed frame, pulled back along ``f``.

    For finite algebras ``f`` is a bijection, so this recovers ``A``'s table.
    """
    frame = build_J(A, S) if variant == "J" else build_Jbar(A, S)
    K = build_K(frame)
    _, f = _worlds_and_map(A, as_meet_families(S, A))
    inverse = {y: x for x, y in enumerate(f)}
    return tuple(inverse[K.box(f[x])] for x in A.elements())
