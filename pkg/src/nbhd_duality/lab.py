"""Decision procedure, Lindenbaum fragments, model existence and the
Barcan countermodels.

Validity in the least logic of a class (frames that are monotonic and/or
topped and/or cufi) is decided semantically by type elimination. A *type*
fixes a truth value for every atom and every Box-subformula ("basis item").
A set ``W`` of types is realizable in the class iff, at each member, some
neighborhood family in the class contains the extensions of its true boxes
and none of the false ones. The smallest candidate family is the closure of
the true extensions under the class operations, so realizability reduces to
witness conditions of the form "``W`` has a type satisfying ``chi``".
Witness conditions survive enlarging ``W``, so the largest realizable set
is a greatest fixpoint; a formula is valid iff no surviving type refutes it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import syntax as sx
from .algebra import FiniteModalAlgebra, MeetFamilySet
from .duality import EmbeddingReport, build_J, build_Jbar, stone_map
from .epsets import EPSet, ParametricFamily, family_meet
from .errors import BoundOverflowError, CapExceededError, LanguageError, NbhdError
from .frames import FLAG_NAMES, NeighborhoodFrame, check_frame_properties, local_family_flags, upward_closure
from .semantics import PropositionalModel, eval_prop, frame_valid, model_valid

DEFAULT_MAX_BASIS = 5
FRAGMENT_CAP_ATOMS = 12

ASSUMPTION = ("membership in the least logic of the class is identified with validity "
              "over the class of frames (soundness and completeness for the eight classes)")


@dataclass(frozen=True)
class LogicClass:
    flags: frozenset[str] = frozenset()

    def __post_init__(self):
        flags = frozenset(self.flags)
        unknown = flags - set(FLAG_NAMES)
        if unknown:
            raise NbhdError(f"unknown class flags {sorted(unknown)}")
        object.__setattr__(self, "flags", flags)

    @classmethod
    def parse(cls, text: str) -> "LogicClass":
        letters = {"m": "monotonic", "t": "topped", "c": "cufi"}
        flags = set()
        for part in text.replace(" ", "").split(","):
            if not part:
                continue
            if part in letters:
                flags.add(letters[part])
            elif part in FLAG_NAMES:
                flags.add(part)
            else:
                raise NbhdError(f"unknown class flag {part!r}; use m, t, c")
        return cls(frozenset(flags))

    @property
    def monotonic(self) -> bool:
        return "monotonic" in self.flags

    @property
    def topped(self) -> bool:
        return "topped" in self.flags

    @property
    def cufi(self) -> bool:
        return "cufi" in self.flags

    @property
    def short(self) -> str:
        return ",".join(f[0] for f in FLAG_NAMES if f in self.flags)

    def __str__(self):
        return "{" + self.short + "}"


ALL_CLASSES = tuple(LogicClass(frozenset(c))
                    for r in range(4) for c in itertools.combinations(FLAG_NAMES, r))

M_AXIOM = sx.parse("[](p & q) -> []p & []q")
N_AXIOM = sx.parse("[]T")
C_AXIOM = sx.parse("[]p & []q -> [](p & q)")


def _normalize(phi: sx.Formula) -> sx.Formula:
    if isinstance(phi, sx.Diamond):
        return sx.Not(sx.Box(sx.Not(_normalize(phi.sub))))
    if isinstance(phi, (sx.Pred, sx.Forall, sx.Exists)):
        raise LanguageError("the decision procedure handles propositional formulas only")
    if isinstance(phi, sx.OmegaAnd):
        raise LanguageError("omega-indexed conjunctions are outside the decision procedure")
    return sx.map_children(phi, _normalize)


def basis(formulas: Iterable[sx.Formula]) -> tuple[list[str], list[sx.Box]]:
    """Atoms and Box-subformulas (inner ones first) of the given formulas."""
    names: set[str] = set()
    boxes: dict[sx.Box, None] = {}
    for phi in formulas:
        phi = _normalize(sx.as_formula(phi))
        for psi in sx.subformulas_ordered(phi):
            if isinstance(psi, sx.Prop):
                names.add(psi.name)
            elif isinstance(psi, sx.Box):
                boxes.setdefault(psi, None)
    return sorted(names), list(boxes)


def basis_size(phi: sx.Formula) -> int:
    names, boxes = basis([phi])
    return len(names) + len(boxes)


class TypeSpace:
    """All types over a basis, their witness conditions, and the largest
    realizable set of types for a logic class."""

    def __init__(self, formulas: Sequence[sx.Formula], L: LogicClass):
        self.L = L
        self.formulas = [sx.as_formula(phi) for phi in formulas]
        self.atom_names, self.boxes = basis(self.formulas)
        self.k = len(self.atom_names) + len(self.boxes)
        self.n_types = 1 << self.k
        self.ALL = (1 << self.n_types) - 1
        self._item_ext = [self._bit_ext(j) for j in range(self.k)]
        self._atom_index = {a: j for j, a in enumerate(self.atom_names)}
        self._box_index = {b: len(self.atom_names) + j for j, b in enumerate(self.boxes)}
        self._ext_cache: dict[sx.Formula, int] = {}
        self.arg_ext = [self.ext(b.sub) for b in self.boxes]
        self._needs: dict[int, list[int]] = {}
        self.realizable = self._greatest_fixpoint()

    def _bit_ext(self, j: int) -> int:
        out = 0
        for t in range(self.n_types):
            if t >> j & 1:
                out |= 1 << t
        return out

    def ext(self, phi: sx.Formula) -> int:
        """Bitmask of the types (over all types) at which ``phi`` is true."""
        phi = sx.as_formula(phi)
        hit = self._ext_cache.get(phi)
        if hit is not None:
            return hit
        out = self._ext(_normalize(phi))
        self._ext_cache[phi] = out
        return out

    def _ext(self, phi: sx.Formula) -> int:
        ALL = self.ALL
        if isinstance(phi, sx.Prop):
            return self._item_ext[self._atom_index[phi.name]]
        if isinstance(phi, sx.Box):
            return self._item_ext[self._box_index[phi]]
        if isinstance(phi, sx.Top):
            return ALL
        if isinstance(phi, sx.Bot):
            return 0
        if isinstance(phi, sx.Not):
            return ALL ^ self._ext(phi.sub)
        if isinstance(phi, sx.And):
            out = ALL
            for x in phi.items:
                out &= self._ext(x)
            return out
        if isinstance(phi, sx.Or):
            out = 0
            for x in phi.items:
                out |= self._ext(x)
            return out
        if isinstance(phi, sx.Implies):
            return (ALL ^ self._ext(phi.left)) | self._ext(phi.right)
        if isinstance(phi, sx.Iff):
            return ALL ^ (self._ext(phi.left) ^ self._ext(phi.right))
        raise LanguageError(f"unsupported node {type(phi).__name__}")

    def box_bits(self, t: int) -> tuple[list[int], list[int]]:
        """Indices (into ``self.boxes``) of the boxes true / false at type ``t``."""
        a = len(self.atom_names)
        pos = [i for i in range(len(self.boxes)) if t >> (a + i) & 1]
        neg = [i for i in range(len(self.boxes)) if not t >> (a + i) & 1]
        return pos, neg

    def needs(self, t: int) -> list[int]:
        """Witness conditions of type ``t``: each mask must meet ``W``."""
        hit = self._needs.get(t)
        if hit is not None:
            return hit
        L, ALL, e = self.L, self.ALL, self.arg_ext
        pos, neg = self.box_bits(t)
        out = []
        groups = [(i,) for i in pos]
        if L.cufi:
            groups += [g for r in range(2, len(pos) + 1) for g in itertools.combinations(pos, r)]
        for g in groups:
            meet = ALL
            for i in g:
                meet &= e[i]
            for j in neg:
                # monotonic: meet not below e[j]; otherwise: meet differs from e[j]
                out.append(meet & ~e[j] & ALL if L.monotonic else meet ^ e[j])
        if L.topped:
            out.extend(ALL & ~e[j] for j in neg)
        self._needs[t] = out
        return out

    def unmet(self, t: int, W: int) -> int | None:
        for need in self.needs(t):
            if not need & W:
                return need
        return None

    def consistent(self, W: int) -> bool:
        return all(self.unmet(t, W) is None for t in _bits(W))

    def _greatest_fixpoint(self) -> int:
        W = self.ALL
        changed = True
        while changed:
            changed = False
            for t in _bits(W):
                if self.unmet(t, W) is not None:
                    W &= ~(1 << t)
                    changed = True
        return W

    def falsifiers(self, phi: sx.Formula) -> int:
        return self.realizable & ~self.ext(phi) & self.ALL

    def closure_from(self, seeds: int, max_size: int) -> int | None:
        """Smallest realizable superset of ``seeds`` with at most ``max_size``
        types, found by witness-driven search with iterative deepening."""
        seeds &= self.realizable
        for limit in range(max(1, _popcount(seeds)), max_size + 1):
            found = self._dfs(seeds, limit, set())
            if found is not None:
                return found
        return None

    def _dfs(self, W: int, limit: int, seen: set[int], found: list[int] | None = None) -> int | None:
        """Witness-driven search; with ``found``, collects every hit instead
        of stopping at the first."""
        if W in seen:
            return None
        seen.add(W)
        for t in _bits(W):
            need = self.unmet(t, W)
            if need is not None:
                break
        else:
            if found is not None:
                found.append(W)
            return W
        if _popcount(W) >= limit:
            return None
        for s in _bits(need & self.realizable):
            hit = self._dfs(W | (1 << s), limit, seen, found)
            if hit is not None and found is None:
                return hit
        return None

    def greedy_closure(self, seeds: int) -> int:
        W = seeds & self.realizable
        while True:
            for t in _bits(W):
                need = self.unmet(t, W)
                if need is not None:
                    W |= _lowest(need & self.realizable)
                    break
            else:
                return W

    def countermodel_types(self, phi: sx.Formula, max_worlds: int | None = None) -> int | None:
        """Type set of the first countermodel: fewest worlds, then least
        frame (family codes world by world), then least valuation with the
        first atom varying fastest."""
        bad = self.falsifiers(phi)
        if not bad:
            return None
        cap = _popcount(self.realizable) if max_worlds is None else max_worlds
        for limit in range(1, cap + 1):
            if max_worlds is None and limit > 6:
                return self.greedy_closure(_lowest(bad))
            found: list[int] = []
            seen: set[int] = set()
            for t in _bits(bad):
                self._dfs(1 << t, limit, seen, found)
            if found:
                return min(set(found), key=self._model_key)
        return None

    def _model_key(self, W: int) -> tuple:
        M, _ = self.model(W)
        codes = tuple(sum(1 << X for X in fam) for fam in M.frame.nbhd)
        vals = tuple(M.valuation[a] for a in reversed(self.atom_names))
        return (M.frame.world_count, codes, vals)

    def model(self, W: int) -> tuple[PropositionalModel, list[int]]:
        """Model on the types of ``W`` (ascending) with least neighborhoods."""
        types = list(_bits(W))
        m = len(types)
        index = {t: i for i, t in enumerate(types)}

        def to_worlds(mask: int) -> int:
            out = 0
            for t in _bits(mask & W):
                out |= 1 << index[t]
            return out

        full = (1 << m) - 1
        nbhd = []
        for t in types:
            pos, _ = self.box_bits(t)
            fam = {to_worlds(self.arg_ext[i]) for i in pos}
            nbhd.append(tuple(sorted(close_family(fam, m, self.L))))
        valuation = {a: to_worlds(self._item_ext[j]) for j, a in enumerate(self.atom_names)}
        return PropositionalModel(NeighborhoodFrame(m, tuple(nbhd)), valuation), types


def close_family(fam: set[int], m: int, L: LogicClass) -> frozenset[int]:
    """Least family containing ``fam`` that has the flags of ``L``."""
    fam = set(fam)
    if L.topped:
        fam.add((1 << m) - 1)
    if L.cufi:
        pending = list(fam)
        while pending:
            X = pending.pop()
            for Y in list(fam):
                Z = X & Y
                if Z not in fam:
                    fam.add(Z)
                    pending.append(Z)
    if L.monotonic:
        return upward_closure(fam, m)
    return frozenset(fam)


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _lowest(mask: int) -> int:
    return mask & -mask


# decision procedure

@dataclass
class Verdict:
    status: str
    bound: int
    logic_class: LogicClass
    basis_size: int
    countermodel: PropositionalModel | None = None
    world: int | None = None

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "bound": self.bound,
            "class": self.logic_class.short,
            "basis_size": self.basis_size,
            "countermodel": None if self.countermodel is None else self.countermodel.to_json(),
            "world": self.world,
            "assumption": ASSUMPTION,
        }


def _check_basis(phi: sx.Formula, max_basis: int) -> int:
    k = basis_size(phi)
    if k > max_basis:
        raise BoundOverflowError(
            f"formula has {k} atoms and boxed subformulas, above the bound {max_basis}; "
            f"raise max_basis (--bound) to decide it anyway")
    return k


def _certified(space: TypeSpace, phi: sx.Formula, W: int) -> tuple[PropositionalModel, int]:
    M, types = space.model(W)
    bad = [i for i, t in enumerate(types) if space.ext(phi) >> t & 1 == 0]
    world = bad[0]
    if eval_prop(M, phi) >> world & 1:
        raise NbhdError("internal error: countermodel does not refute the formula")
    if not check_frame_properties(M.frame).satisfies(space.L.flags):
        raise NbhdError("internal error: countermodel frame lacks the class flags")
    return M, world


def decide_valid(phi, L: LogicClass = LogicClass(), max_basis: int = DEFAULT_MAX_BASIS) -> Verdict:
    """Valid, or Invalid with a smallest countermodel on a frame of class ``L``."""
    phi = sx.as_formula(phi)
    k = _check_basis(phi, max_basis)
    space = TypeSpace([phi], L)
    W = space.countermodel_types(phi)
    if W is None:
        return Verdict("valid", 1 << k, L, k)
    M, world = _certified(space, phi, W)
    return Verdict("invalid", 1 << k, L, k, M, world)


def find_countermodel(phi, L: LogicClass = LogicClass(), max_worlds: int = 4,
                      max_basis: int = DEFAULT_MAX_BASIS) -> PropositionalModel | None:
    """A countermodel with at most ``max_worlds`` worlds, or None if there is none."""
    phi = sx.as_formula(phi)
    _check_basis(phi, max_basis)
    space = TypeSpace([phi], L)
    W = space.countermodel_types(phi, max_worlds=max_worlds)
    if W is None:
        return None
    return _certified(space, phi, W)[0]


# Lindenbaum fragments and model existence

@dataclass
class FragmentAlgebra:
    """Finite algebra generated by the subformula classes of a formula set.

    Atom ``i`` of ``base`` is the type ``types[i]``; the code of a formula is
    the set of atoms at which it holds. ``reduced`` marks a fragment built on
    a realizable subset of types rather than on all of them (a quotient of
    the generated algebra, used when the full one exceeds the atom cap).
    """

    base: FiniteModalAlgebra
    labels: dict[int, sx.Formula]
    meets: MeetFamilySet
    types: tuple[int, ...]
    space: TypeSpace = field(repr=False)
    reduced: bool = False

    def code(self, phi) -> int:
        ext = self.space.ext(sx.as_formula(phi))
        out = 0
        for i, t in enumerate(self.types):
            if ext >> t & 1:
                out |= 1 << i
        return out

    def label(self, code: int) -> sx.Formula:
        """A formula whose class is ``code``: a subformula label when one
        exists, otherwise a disjunction of type descriptions."""
        if code in self.labels:
            return self.labels[code]
        if code == 0:
            return sx.Bot()
        disjuncts = []
        for i, t in enumerate(self.types):
            if code >> i & 1:
                disjuncts.append(self._describe(t))
        return disjuncts[0] if len(disjuncts) == 1 else sx.Or(tuple(disjuncts))

    def _describe(self, t: int) -> sx.Formula:
        sp = self.space
        lits = []
        items = [sx.Prop(a) for a in sp.atom_names] + list(sp.boxes)
        for j, item in enumerate(items):
            lits.append(item if t >> j & 1 else sx.Not(item))
        if not lits:
            return sx.Top()
        return lits[0] if len(lits) == 1 else sx.And(tuple(lits))


def _sub_labels(formulas: Sequence[sx.Formula]) -> list[sx.Formula]:
    out: dict[sx.Formula, None] = {}
    for phi in formulas:
        for psi in sx.subformulas_ordered(phi):
            out.setdefault(psi, None)
    return list(out)


def _fragment_on(space: TypeSpace, formulas, W: int, reduced: bool) -> FragmentAlgebra:
    types = tuple(_bits(W))
    n = len(types)
    if n > FRAGMENT_CAP_ATOMS:
        raise CapExceededError(
            f"fragment has {n} atoms ({1 << n} elements), above the cap of "
            f"{1 << FRAGMENT_CAP_ATOMS} elements")
    M, _ = space.model(W)
    # Box on the fragment: least class-closed neighborhoods over its atoms
    table = [0] * (1 << n)
    for c, fam in enumerate(M.frame.nbhd):
        for X in fam:
            table[X] |= 1 << c
    base = FiniteModalAlgebra(n, tuple(table))
    frag = FragmentAlgebra(base, {}, MeetFamilySet(()), types, space, reduced)

    labels: dict[int, sx.Formula] = {}
    families = []
    for psi in _sub_labels(formulas):
        code = frag.code(psi)
        labels.setdefault(code, psi)
        if isinstance(psi, sx.And):
            fam = tuple(frag.code(x) for x in psi.items)
            if base.meet_all(fam) != code:
                raise NbhdError(f"meet equation fails for {psi}")
            families.append(fam)
        elif isinstance(psi, sx.Box):
            if base.box(frag.code(psi.sub)) != code:
                raise NbhdError(f"Box equation fails for {psi}")
        elif isinstance(psi, sx.Diamond):
            if base.complement(base.box(base.complement(frag.code(psi.sub)))) != code:
                raise NbhdError(f"Diamond equation fails for {psi}")
    frag.labels = labels
    frag.meets = MeetFamilySet(tuple(dict.fromkeys(families)))
    return frag


def lindenbaum_fragment(U, L: LogicClass = LogicClass(), max_basis: int = 10,
                        verify: bool = True) -> FragmentAlgebra:
    """Subalgebra of the Lindenbaum algebra generated by the subformulas of ``U``.

    With ``verify``, every pair of subformula labels is re-decided with
    :func:`decide_valid` on the biconditional: same code iff equivalent.
    """
    formulas = [sx.as_formula(phi) for phi in U]
    names, boxes = basis(formulas)
    if len(names) + len(boxes) > max_basis:
        raise BoundOverflowError(
            f"formula set has basis size {len(names) + len(boxes)}, above {max_basis}")
    space = TypeSpace(formulas, L)
    frag = _fragment_on(space, formulas, space.realizable, reduced=False)
    if verify:
        _verify_labels(frag, formulas, L, max_basis)
    return frag


def _verify_labels(frag: FragmentAlgebra, formulas, L: LogicClass, max_basis: int):
    subs = _sub_labels(formulas)
    codes = [frag.code(psi) for psi in subs]
    top = frag.base.top
    for psi, c in zip(subs, codes):
        if c == top and not decide_valid(psi, L, max_basis).valid:
            raise NbhdError(f"top label {psi} is not valid in {L}")
    for (a, ca), (b, cb) in itertools.combinations(zip(subs, codes), 2):
        same = decide_valid(sx.Iff(a, b), L, max_basis).valid
        if same != (ca == cb):
            raise NbhdError(f"label codes disagree with equivalence for {a} and {b}")


def reduced_fragment(U, L: LogicClass = LogicClass()) -> FragmentAlgebra:
    """Fragment over a small realizable type set: the union of least
    countermodel type sets of the invalid members of ``U``."""
    formulas = [sx.as_formula(phi) for phi in U]
    space = TypeSpace(formulas, L)
    W = 0
    for phi in formulas:
        found = space.countermodel_types(phi)
        if found is not None:
            W |= found
    if not W:
        W = space.closure_from(_lowest(space.realizable), FRAGMENT_CAP_ATOMS) or 0
    if not W:
        raise NbhdError("no realizable type")
    return _fragment_on(space, formulas, W, reduced=True)


@dataclass
class ModelExistenceResult:
    model: PropositionalModel
    fragment: FragmentAlgebra
    embedding: list[int]
    report: EmbeddingReport
    variant: str
    agreement: dict[str, dict]

    def to_json(self) -> dict:
        return {
            "model": self.model.to_json(),
            "variant": self.variant,
            "fragment_atoms": self.fragment.base.atom_count,
            "reduced": self.fragment.reduced,
            "embedding": self.report.to_json(),
            "agreement": self.agreement,
        }


def model_existence_report(U, L: LogicClass = LogicClass(),
                           max_basis: int = 10) -> ModelExistenceResult:
    formulas = [sx.as_formula(phi) for phi in U]
    try:
        frag = lindenbaum_fragment(formulas, L, max_basis=max_basis)
    except CapExceededError:
        frag = reduced_fragment(formulas, L)
    variant = "J" if L.monotonic else "Jbar"
    A, S = frag.base, frag.meets
    frame = build_J(A, S) if variant == "J" else build_Jbar(A, S)
    f, report = stone_map(A, S, variant)
    if not report.monomorphism:
        raise NbhdError(f"embedding check failed: {report.to_json()}")
    valuation = {a: f[frag.code(sx.Prop(a))] for a in frag.space.atom_names}
    M = PropositionalModel(frame, valuation)
    agreement = {}
    for phi in formulas:
        agreement[sx.to_text(phi)] = {
            "in_logic": decide_valid(phi, L, max_basis=max_basis).valid,
            "model_validates": model_valid(M, phi),
        }
    return ModelExistenceResult(M, frag, f, report, variant, agreement)


def model_existence(U, L: LogicClass = LogicClass()) -> PropositionalModel:
    """A model of class ``L`` validating exactly the members of ``U`` that
    belong to the least logic of ``L``."""
    return model_existence_report(U, L).model


# the cofinite frame and the Barcan countermodels

@dataclass(frozen=True)
class CofiniteFrame:
    """Worlds are the naturals; every world's neighborhoods are the cofinite sets."""

    def contains(self, c: int, X: EPSet) -> bool:
        return X.is_cofinite()

    def box(self, X: EPSet) -> EPSet:
        return EPSet.full() if X.is_cofinite() else EPSet.empty()

    def certify_flags(self, max_prefix: int = 3, max_period: int = 3) -> dict:
        """Check the three closure conditions over every EP set with a short
        description. Membership depends only on the period being all ones,
        which superset and intersection preserve; the sweep confirms it."""
        sample = sorted(set(_small_epsets(max_prefix, max_period)), key=str)
        c = 0
        monotonic = all(self.contains(c, Y) for X in sample if self.contains(c, X)
                        for Y in sample if X <= Y)
        topped = self.contains(c, EPSet.full())
        cufi = all(self.contains(c, X & Y) for X in sample if self.contains(c, X)
                   for Y in sample if self.contains(c, Y))
        return {"monotonic": monotonic, "topped": topped, "cufi": cufi,
                "sets_checked": len(sample)}


def _small_epsets(max_prefix: int, max_period: int):
    for ell in range(max_prefix + 1):
        for p in range(1, max_period + 1):
            for a in range(1 << ell):
                for b in range(1 << p):
                    yield EPSet(format(a, f"0{ell}b") if ell else "", format(b, f"0{p}b"))


def _truth_of_diagonal_atom(d: int) -> EPSet:
    """Worlds ``c`` where ``d`` lies in ``I(c, P) = omega - {c}``.

    Worlds ``c <= d`` are checked one by one; every ``c > d`` differs from
    ``d``, so the tail is all ones.
    """
    interp = lambda c: EPSet.cofinite([c])
    prefix = "".join("1" if d in interp(c) else "0" for c in range(d + 1))
    return EPSet(prefix, "1")


BF = sx.parse("(A x. []P(x)) -> []A x. P(x)")
OMEGA_BF = sx.Implies(sx.OmegaAnd("i", sx.Box(sx.Prop("p_i"))),
                      sx.Box(sx.OmegaAnd("i", sx.Prop("p_i"))))


def bf_countermodel(spot_checks: int = 100) -> dict:
    """Constant-domain model on the cofinite frame refuting the Barcan formula
    at world 0: domain omega, ``I(c, P) = omega - {c}``."""
    frame = CofiniteFrame()
    fam = ParametricFamily.co_singleton()
    world = 0
    # each instance P(d) is true exactly off world d: the co-singleton family
    spot = [(d, _truth_of_diagonal_atom(d)) for d in range(spot_checks + 1)]
    spot_ok = all(X == fam.member(d) and frame.contains(world, X) for d, X in spot)
    uniform_ok = fam.kind == "co_singleton"   # every member omega - {d} is cofinite
    premise = spot_ok and uniform_ok
    meet = family_meet(fam)
    conclusion = world in frame.box(meet)
    flags = frame.certify_flags()
    return {
        "formula": sx.to_text(BF),
        "world": world,
        "premise": "holds" if premise else "fails",
        "conclusion": "holds" if conclusion else "fails",
        "refuted": premise and not conclusion,
        "frame_flags": flags,
        "truth_sets": {
            "P(d)": {"family": "co_singleton", "spot_checks": len(spot)},
            "A x. P(x)": meet.to_json(),
            "[]A x. P(x)": frame.box(meet).to_json(),
        },
    }


def omega_bf_countermodel(spot_checks: int = 100, finite_k: int = 3, finite_m: int = 3) -> dict:
    """Valuation ``v(p_i) = omega - {i}`` on the cofinite frame refutes the
    omega-Barcan formula at world 0, while every finite instance with at most
    ``finite_k`` conjuncts is valid on all cufi frames of up to ``finite_m``
    worlds."""
    frame = CofiniteFrame()
    fam = ParametricFamily.co_singleton()
    world = 0
    spot = [fam.member(i) for i in range(spot_checks + 1)]
    spot_ok = all(X == EPSet.cofinite([i]) and frame.contains(world, X)
                  for i, X in enumerate(spot))
    premise = spot_ok and fam.kind == "co_singleton"
    meet = family_meet(fam)
    conclusion = world in frame.box(meet)

    contrast = {}
    for k in range(1, finite_k + 1):
        phi = finite_bf_instance(k)
        for m in range(1, finite_m + 1):
            res = class_sweep(phi, m, classes=[LogicClass(frozenset({"cufi"}))])
            contrast[f"k={k},m={m}"] = res[LogicClass(frozenset({"cufi"}))].valid
    return {
        "formula": sx.to_text(OMEGA_BF),
        "world": world,
        "premise": "holds" if premise else "fails",
        "conclusion": "holds" if conclusion else "fails",
        "refuted": premise and not conclusion,
        "frame_flags": frame.certify_flags(),
        "meet_of_p_i": meet.to_json(),
        "finite_instances_valid_on_cufi": contrast,
        "finite_contrast_holds": all(contrast.values()),
    }


def finite_bf_instance(k: int) -> sx.Formula:
    ps = [sx.Prop(f"p_{i}") for i in range(k)]
    boxes = [sx.Box(p) for p in ps]
    lhs = boxes[0] if k == 1 else sx.And(tuple(boxes))
    inner = ps[0] if k == 1 else sx.And(tuple(ps))
    return sx.Implies(lhs, sx.Box(inner))


# exhaustive frame sweeps for formulas of modal depth <= 1

def _boxfree_ext(phi: sx.Formula, val: dict[str, int], full: int) -> int:
    M = PropositionalModel(NeighborhoodFrame(max(full.bit_length(), 1), ((),) * max(full.bit_length(), 1)), val)
    return eval_prop(M, phi)


def local_validity(phi, m: int) -> np.ndarray:
    """``out[c, F]``: the formula is true at world ``c`` under every valuation
    whenever ``V(c)`` is the family with code ``F``.

    For modal depth at most 1 the truth at ``c`` depends on ``V(c)`` alone,
    so validity of a frame is the conjunction of these entries.
    """
    phi = _normalize(sx.as_formula(phi))
    if sx.modal_depth(phi) > 1:
        raise LanguageError("local validity needs modal depth at most 1")
    nfam = 1 << (1 << m)
    full = (1 << m) - 1
    member = ((np.arange(nfam, dtype=np.int64)[:, None] >> np.arange(1 << m)[None, :]) & 1).astype(bool)
    names = sx.atoms(phi)
    out = np.ones((m, nfam), dtype=bool)
    for values in itertools.product(range(full + 1), repeat=len(names)):
        val = dict(zip(names, values))
        for c in range(m):
            out[c] &= _local_truth(phi, val, c, member, full)
    return out


def _local_truth(phi, val, c, member, full):
    if isinstance(phi, sx.Prop):
        return bool(val.get(phi.name, 0) >> c & 1)
    if isinstance(phi, sx.Top):
        return True
    if isinstance(phi, sx.Bot):
        return False
    if isinstance(phi, sx.Box):
        return member[:, _boxfree_ext(phi.sub, val, full)]
    if isinstance(phi, sx.Not):
        return np.logical_not(_local_truth(phi.sub, val, c, member, full))
    if isinstance(phi, (sx.And, sx.Or)):
        parts = [_local_truth(x, val, c, member, full) for x in phi.items]
        op = np.logical_and if isinstance(phi, sx.And) else np.logical_or
        out = parts[0]
        for p in parts[1:]:
            out = op(out, p)
        return out
    if isinstance(phi, sx.Implies):
        return np.logical_or(np.logical_not(_local_truth(phi.left, val, c, member, full)),
                             _local_truth(phi.right, val, c, member, full))
    if isinstance(phi, sx.Iff):
        return np.equal(_local_truth(phi.left, val, c, member, full),
                        _local_truth(phi.right, val, c, member, full))
    raise LanguageError(f"unsupported node {type(phi).__name__}")


@dataclass
class SweepResult:
    frames_in_class: int
    refuting_frames: int
    example: NeighborhoodFrame | None

    @property
    def valid(self) -> bool:
        return self.refuting_frames == 0

    def to_json(self) -> dict:
        return {"frames_in_class": self.frames_in_class, "refuting_frames": self.refuting_frames,
                "valid": self.valid,
                "example": None if self.example is None else self.example.to_json()}


@lru_cache(maxsize=None)
def _flag_arrays(m: int) -> dict[str, np.ndarray]:
    flags = local_family_flags(m)
    return {name: np.array([name in f for f in flags], dtype=bool) for name in FLAG_NAMES}


def class_sweep(phi, m: int, classes: Sequence[LogicClass] = ALL_CLASSES,
                confirm: bool = True) -> dict[LogicClass, SweepResult]:
    """Validity of a depth-one formula on every frame with ``m`` worlds
    (``m <= 3``), split by class.

    All ``(2**2**m)**m`` frames are materialized as an ``m``-dimensional
    boolean array. With ``confirm``, the first refuting frame of each class
    is re-checked with :func:`frame_valid`.
    """
    if not 1 <= m <= 3:
        raise NbhdError("class_sweep supports 1 <= m <= 3")
    phi = sx.as_formula(phi)
    lv = local_validity(phi, m)
    flags = _flag_arrays(m)
    nfam = lv.shape[1]

    def outer(vectors):
        out = vectors[0]
        for v in vectors[1:]:
            out = np.logical_and.outer(out, v)
        return out

    valid = outer([lv[c] for c in range(m)])
    results = {}
    for L in classes:
        ok = np.ones(nfam, dtype=bool)
        for name in L.flags:
            ok &= flags[name]
        in_class = outer([ok] * m)
        refuting = in_class & ~valid
        n_ref = int(refuting.sum())
        example = None
        if n_ref:
            idx = np.unravel_index(int(np.argmax(refuting)), refuting.shape)
            example = NeighborhoodFrame.from_family_codes(m, [int(i) for i in idx])
            if confirm and frame_valid(example, phi):
                raise NbhdError(f"sweep disagrees with direct evaluation on {example}")
        results[L] = SweepResult(int(in_class.sum()), n_ref, example)
    return results
