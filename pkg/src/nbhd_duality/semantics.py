"""Truth sets of formulas in finite neighborhood models.

A truth set is a bitmask over the worlds of the underlying frame.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import AssignmentError, FrameError, LanguageError
from .frames import NeighborhoodFrame
from .syntax import (
    And, Bot, Box, Diamond, Exists, Forall, Formula, Iff, Implies, Not, OmegaAnd, Or,
    Pred, Prop, Top, as_formula, atoms, free_vars, predicates, walk,
)


@dataclass(frozen=True)
class PropositionalModel:
    frame: NeighborhoodFrame
    valuation: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        full = self.frame.full
        for name, X in self.valuation.items():
            if not 0 <= X <= full:
                raise FrameError(f"valuation of {name!r} is out of range: {X}")

    def to_json(self) -> dict:
        out = self.frame.to_json()
        out["valuation"] = {k: self.valuation[k] for k in sorted(self.valuation)}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PropositionalModel":
        return cls(NeighborhoodFrame.from_json(data),
                   {k: int(v) for k, v in data.get("valuation", {}).items()})


@dataclass(frozen=True)
class PredicateModel:
    """Constant-domain model; ``interp[(world, P)]`` is a set of tuples."""

    frame: NeighborhoodFrame
    domain_size: int
    interp: Mapping[tuple[int, str], frozenset[tuple[int, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        if self.domain_size < 1:
            raise FrameError("domain must be non-empty")
        arity: dict[str, int] = {}
        for (c, P), rel in self.interp.items():
            if c not in self.frame.worlds:
                raise FrameError(f"interpretation mentions unknown world {c}")
            for tup in rel:
                if arity.setdefault(P, len(tup)) != len(tup):
                    raise FrameError(f"predicate {P} has tuples of different arities")
                if any(not 0 <= d < self.domain_size for d in tup):
                    raise FrameError(f"predicate {P} has a tuple outside the domain: {tup}")

    def relation(self, c: int, P: str) -> frozenset:
        return self.interp.get((c, P), frozenset())

    def to_json(self) -> dict:
        out = self.frame.to_json()
        out["domain"] = self.domain_size
        out["interp"] = [
            {"world": c, "pred": P, "tuples": sorted(list(t) for t in rel)}
            for (c, P), rel in sorted(self.interp.items())
        ]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PredicateModel":
        interp = {(int(e["world"]), e["pred"]): frozenset(tuple(t) for t in e["tuples"])
                  for e in data.get("interp", [])}
        return cls(NeighborhoodFrame.from_json(data), int(data["domain"]), interp)


def eval_prop(M: PropositionalModel, phi: Formula) -> int:
    """Truth set of a propositional formula; unknown atoms are false everywhere."""
    frame = M.frame
    full = frame.full

    def ev(psi: Formula) -> int:
        if isinstance(psi, Prop):
            return M.valuation.get(psi.name, 0)
        if isinstance(psi, Top):
            return full
        if isinstance(psi, Bot):
            return 0
        if isinstance(psi, Not):
            return full ^ ev(psi.sub)
        if isinstance(psi, And):
            out = full
            for x in psi.items:
                out &= ev(x)
            return out
        if isinstance(psi, Or):
            out = 0
            for x in psi.items:
                out |= ev(x)
            return out
        if isinstance(psi, Implies):
            return (full ^ ev(psi.left)) | ev(psi.right)
        if isinstance(psi, Iff):
            return full ^ (ev(psi.left) ^ ev(psi.right))
        if isinstance(psi, Box):
            return frame.box(ev(psi.sub))
        if isinstance(psi, Diamond):
            return full ^ frame.box(full ^ ev(psi.sub))
        if isinstance(psi, OmegaAnd):
            raise LanguageError("omega-indexed conjunctions have no finite evaluation")
        raise LanguageError(f"{type(psi).__name__} is not part of the propositional language")

    return ev(as_formula(phi))


def eval_pred(M: PredicateModel, assignment: Mapping[str, int], phi: Formula) -> int:
    """Truth set of a predicate formula under an assignment of its free variables."""
    phi = as_formula(phi)
    frame = M.frame
    full = frame.full
    missing = free_vars(phi) - set(assignment)
    if missing:
        raise AssignmentError(f"assignment misses free variables {sorted(missing)}")
    for v, d in assignment.items():
        if not 0 <= d < M.domain_size:
            raise AssignmentError(f"variable {v} is assigned {d}, outside the domain")
    arities = predicates(phi)
    for (c, P), rel in M.interp.items():
        if P in arities and any(len(t) != arities[P] for t in rel):
            raise AssignmentError(f"predicate {P} is used with arity {arities[P]} "
                                  f"but interpreted with another")

    def ev(psi: Formula, env: dict[str, int]) -> int:
        if isinstance(psi, Pred):
            tup = tuple(env[v] for v in psi.args)
            out = 0
            for c in frame.worlds:
                if tup in M.relation(c, psi.name):
                    out |= 1 << c
            return out
        if isinstance(psi, Top):
            return full
        if isinstance(psi, Bot):
            return 0
        if isinstance(psi, Not):
            return full ^ ev(psi.sub, env)
        if isinstance(psi, And):
            out = full
            for x in psi.items:
                out &= ev(x, env)
            return out
        if isinstance(psi, Or):
            out = 0
            for x in psi.items:
                out |= ev(x, env)
            return out
        if isinstance(psi, Implies):
            return (full ^ ev(psi.left, env)) | ev(psi.right, env)
        if isinstance(psi, Iff):
            return full ^ (ev(psi.left, env) ^ ev(psi.right, env))
        if isinstance(psi, Box):
            return frame.box(ev(psi.sub, env))
        if isinstance(psi, Diamond):
            return full ^ frame.box(full ^ ev(psi.sub, env))
        if isinstance(psi, Forall):
            out = full
            for d in range(M.domain_size):
                out &= ev(psi.body, {**env, psi.var: d})
            return out
        if isinstance(psi, Exists):
            out = 0
            for d in range(M.domain_size):
                out |= ev(psi.body, {**env, psi.var: d})
            return out
        raise LanguageError(f"{type(psi).__name__} is not part of the predicate language")

    return ev(phi, dict(assignment))


def assignments(variables: Iterable[str], domain_size: int) -> Iterator[dict[str, int]]:
    variables = sorted(variables)
    for values in itertools.product(range(domain_size), repeat=len(variables)):
        yield dict(zip(variables, values))


def model_valid(M, phi: Formula) -> bool:
    phi = as_formula(phi)
    if isinstance(M, PropositionalModel):
        return eval_prop(M, phi) == M.frame.full
    # closed formulas need a single assignment
    return all(eval_pred(M, A, phi) == M.frame.full
               for A in assignments(free_vars(phi), M.domain_size))


def valuations(frame: NeighborhoodFrame, names: Iterable[str]) -> Iterator[dict[str, int]]:
    names = list(names)
    for values in itertools.product(range(frame.full + 1), repeat=len(names)):
        yield dict(zip(names, values))


def interpretations(frame: NeighborhoodFrame, arities: Mapping[str, int],
                    domain_size: int) -> Iterator[dict]:
    """Every interpretation of the given predicates over a fixed domain."""
    slots = [(c, P) for c in frame.worlds for P in sorted(arities)]
    per_slot = []
    for c, P in slots:
        tuples = list(itertools.product(range(domain_size), repeat=arities[P]))
        per_slot.append([frozenset(t for i, t in enumerate(tuples) if bits >> i & 1)
                         for bits in range(1 << len(tuples))])
    for choice in itertools.product(*per_slot):
        yield dict(zip(slots, choice))


def frame_valid(Z: NeighborhoodFrame, phi: Formula, max_domain: int = 2) -> bool:
    """Validity on a frame.

    Propositional formulas: exact, over every valuation of their atoms.
    Predicate formulas: only domains of size ``1 .. max_domain`` are checked,
    so ``True`` means "no countermodel up to that domain size".
    """
    phi = as_formula(phi)
    if not any(isinstance(psi, (Pred, Forall, Exists)) for psi in walk(phi)):
        return all(eval_prop(PropositionalModel(Z, v), phi) == Z.full
                   for v in valuations(Z, atoms(phi)))
    arities = predicates(phi)
    for d in range(1, max_domain + 1):
        for interp in interpretations(Z, arities, d):
            if not model_valid(PredicateModel(Z, d, interp), phi):
                return False
    return True


def class_valid(frames: Iterable[NeighborhoodFrame], phi: Formula, max_domain: int = 2) -> bool:
    return all(frame_valid(Z, phi, max_domain) for Z in frames)
