"""Formula trees for the propositional, predicate and bounded infinitary
modal languages, with an ASCII parser and printer.

Grammar::

    T  F  p  P(x, y)  ~f  []f  <>f  A x. f  E x. f
    f & g   f | g   f -> g   f <-> g
    /\\{f, ...}   \\/{f, ...}   /\\ i. f   (the last is an omega-indexed conjunction)

Precedence, tightest first: unary, ``&``, ``|``, ``->``, ``<->``. The
binary operators ``&`` and ``|`` associate to the left, ``->`` and ``<->``
to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import NbhdError


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)

    def __rshift__(self, other):
        return Implies(self, other)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    items: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise NbhdError("conjunctions must be non-empty")


@dataclass(frozen=True)
class Or(Formula):
    items: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise NbhdError("disjunctions must be non-empty")


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    sub: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class OmegaAnd(Formula):
    """Schematic conjunction over ``i in omega``.

    ``body`` mentions the index through propositional variables named
    ``<stem>_<index>``; instance ``k`` renames them to ``<stem>_k``.
    """

    index: str
    body: Formula

    def instance(self, k: int) -> Formula:
        suffix = "_" + self.index

        def go(phi):
            if isinstance(phi, Prop) and phi.name.endswith(suffix):
                return Prop(phi.name[: -len(self.index)] + str(k))
            return map_children(phi, go)

        return go(self.body)


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (And, Or)):
        return phi.items
    if isinstance(phi, (Not, Box, Diamond)):
        return (phi.sub,)
    if isinstance(phi, (Implies, Iff)):
        return (phi.left, phi.right)
    if isinstance(phi, (Forall, Exists, OmegaAnd)):
        return (phi.body,)
    return ()


def map_children(phi: Formula, fn) -> Formula:
    if isinstance(phi, And):
        return And(tuple(fn(x) for x in phi.items))
    if isinstance(phi, Or):
        return Or(tuple(fn(x) for x in phi.items))
    if isinstance(phi, (Not, Box, Diamond)):
        return type(phi)(fn(phi.sub))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(fn(phi.left), fn(phi.right))
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(phi.var, fn(phi.body))
    if isinstance(phi, OmegaAnd):
        return OmegaAnd(phi.index, fn(phi.body))
    return phi


def walk(phi: Formula) -> Iterator[Formula]:
    yield phi
    for c in children(phi):
        yield from walk(c)


def subformulas(phi: Formula) -> set[Formula]:
    out = {phi}
    for c in children(phi):
        out |= subformulas(c)
    return out


def subformulas_ordered(phi: Formula) -> list[Formula]:
    """Subformulas, each listed once, children before parents."""
    seen: dict[Formula, None] = {}

    def go(psi):
        for c in children(psi):
            go(c)
        seen.setdefault(psi, None)

    go(phi)
    return list(seen)


def atoms(phi: Formula) -> list[str]:
    return sorted({psi.name for psi in walk(phi) if isinstance(psi, Prop)})


def predicates(phi: Formula) -> dict[str, int]:
    """Predicate symbols with their arities; raises on inconsistent use."""
    out: dict[str, int] = {}
    for psi in walk(phi):
        if isinstance(psi, Pred):
            if out.setdefault(psi.name, len(psi.args)) != len(psi.args):
                raise NbhdError(f"predicate {psi.name} used with arities "
                                f"{out[psi.name]} and {len(psi.args)}")
    return out


def modal_depth(phi: Formula) -> int:
    inner = max((modal_depth(c) for c in children(phi)), default=0)
    return inner + 1 if isinstance(phi, (Box, Diamond)) else inner


def is_propositional(phi: Formula) -> bool:
    return not any(isinstance(psi, (Pred, Forall, Exists)) for psi in walk(phi))


def desugar(phi: Formula) -> Formula:
    """Rewrite into Top, Bot, Prop, Pred, Not, And, Box, Forall only."""
    if isinstance(phi, Or):
        return Not(And(tuple(Not(desugar(x)) for x in phi.items)))
    if isinstance(phi, Implies):
        return Not(And((desugar(phi.left), Not(desugar(phi.right)))))
    if isinstance(phi, Iff):
        a, b = desugar(phi.left), desugar(phi.right)
        return And((Not(And((a, Not(b)))), Not(And((b, Not(a))))))
    if isinstance(phi, Diamond):
        return Not(Box(Not(desugar(phi.sub))))
    if isinstance(phi, Exists):
        return Not(Forall(phi.var, Not(desugar(phi.body))))
    return map_children(phi, desugar)


# variables and substitution

def free_vars(phi: Formula) -> set[str]:
    if isinstance(phi, Pred):
        return set(phi.args)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var}
    out: set[str] = set()
    for c in children(phi):
        out |= free_vars(c)
    return out


def all_vars(phi: Formula) -> set[str]:
    out: set[str] = set()
    for psi in walk(phi):
        if isinstance(psi, Pred):
            out.update(psi.args)
        elif isinstance(psi, (Forall, Exists)):
            out.add(psi.var)
    return out


def fresh_var(base: str, avoid: set[str]) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def substitute(phi: Formula, x: str, y: str) -> Formula:
    """Replace free occurrences of variable ``x`` by ``y``, renaming bound
    variables that would capture ``y``."""
    if x == y:
        return phi
    if isinstance(phi, Pred):
        return Pred(phi.name, tuple(y if v == x else v for v in phi.args))
    if isinstance(phi, (Forall, Exists)):
        if phi.var == x or x not in free_vars(phi.body):
            return phi
        if phi.var == y:
            z = fresh_var(y, all_vars(phi.body) | {x, y})
            body = substitute(phi.body, y, z)
            return type(phi)(z, substitute(body, x, y))
        return type(phi)(phi.var, substitute(phi.body, x, y))
    return map_children(phi, lambda c: substitute(c, x, y))


# printing

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_UNARY = 5


def _prec(phi: Formula) -> int:
    if isinstance(phi, (And, Or)) and len(phi.items) != 2:
        return _UNARY  # printed in braces
    return _PREC.get(type(phi), _UNARY)


def to_text(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Bot):
        return "F"
    if isinstance(phi, Prop):
        return phi.name
    if isinstance(phi, Pred):
        return f"{phi.name}({', '.join(phi.args)})"
    if isinstance(phi, (Not, Box, Diamond)):
        op = {Not: "~", Box: "[]", Diamond: "<>"}[type(phi)]
        return op + _wrap(phi.sub, _UNARY)
    if isinstance(phi, (Forall, Exists)):
        q = "A" if isinstance(phi, Forall) else "E"
        return f"{q} {phi.var}. " + _wrap(phi.body, _UNARY)
    if isinstance(phi, OmegaAnd):
        return f"/\\ {phi.index}. " + _wrap(phi.body, _UNARY)
    if isinstance(phi, (And, Or)):
        sym = "&" if isinstance(phi, And) else "|"
        if len(phi.items) != 2:
            brace = "/\\" if isinstance(phi, And) else "\\/"
            return brace + "{" + ", ".join(to_text(x) for x in phi.items) + "}"
        p = _PREC[type(phi)]
        left, right = phi.items
        return f"{_wrap(left, p)} {sym} {_wrap(right, p + 1)}"
    if isinstance(phi, (Implies, Iff)):
        sym = "->" if isinstance(phi, Implies) else "<->"
        p = _PREC[type(phi)]
        return f"{_wrap(phi.left, p + 1)} {sym} {_wrap(phi.right, p)}"
    raise TypeError(f"not a formula: {phi!r}")


def _wrap(phi: Formula, min_prec: int) -> str:
    text = to_text(phi)
    return text if _prec(phi) >= min_prec else f"({text})"


# parsing

class ParseError(NbhdError, ValueError):
    def __init__(self, message: str, position: int, expected: set[str]):
        self.position = position
        self.expected = frozenset(expected)
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"{message} at position {position}; expected one of: {exp}")


_TOKEN = re.compile(r"\s*(?:(<->|->|<>|\[\]|/\\|\\/|[~&|(){},.])|([A-Za-z_][A-Za-z0-9_']*))")
_KEYWORDS = {"T", "F", "A", "E"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos,
                             {"operator", "identifier"})
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            tokens.append(("op", m.group(1), start))
        else:
            word = m.group(2)
            tokens.append(("kw" if word in _KEYWORDS else "ident", word, start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.peek()
        if val != value or kind not in ("op", "kw"):
            raise ParseError(f"unexpected {val or 'end of input'!r}", pos, {value})
        return self.take()

    def ident(self) -> str:
        kind, val, pos = self.peek()
        if kind != "ident":
            raise ParseError(f"unexpected {val or 'end of input'!r}", pos, {"identifier"})
        self.take()
        return val

    def parse(self) -> Formula:
        phi = self.iff()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {val!r}", pos, {"&", "|", "->", "<->", "end of input"})
        return phi

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek()[1] == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        phi = self.conj()
        while self.peek()[1] == "|":
            self.take()
            phi = Or((phi, self.conj()))
        return phi

    def conj(self) -> Formula:
        phi = self.unary()
        while self.peek()[1] == "&":
            self.take()
            phi = And((phi, self.unary()))
        return phi

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "~":
            self.take()
            return Not(self.unary())
        if val == "[]":
            self.take()
            return Box(self.unary())
        if val == "<>":
            self.take()
            return Diamond(self.unary())
        if kind == "kw" and val in ("A", "E"):
            self.take()
            var = self.ident()
            self.expect(".")
            body = self.unary()
            return Forall(var, body) if val == "A" else Exists(var, body)
        if val in ("/\\", "\\/"):
            self.take()
            if val == "/\\" and self.peek()[0] == "ident":
                index = self.ident()
                self.expect(".")
                return OmegaAnd(index, self.unary())
            self.expect("{")
            items = [self.iff()]
            while self.peek()[1] == ",":
                self.take()
                items.append(self.iff())
            self.expect("}")
            return And(tuple(items)) if val == "/\\" else Or(tuple(items))
        if val == "(":
            self.take()
            phi = self.iff()
            self.expect(")")
            return phi
        if kind == "kw" and val == "T":
            self.take()
            return Top()
        if kind == "kw" and val == "F":
            self.take()
            return Bot()
        if kind == "ident":
            self.take()
            if self.peek()[1] == "(":
                self.take()
                args = [self.ident()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.ident())
                self.expect(")")
                return Pred(val, tuple(args))
            return Prop(val)
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos,
                         {"~", "[]", "<>", "A", "E", "/\\", "\\/", "(", "T", "F", "identifier"})


def parse(text: str) -> Formula:
    return _Parser(text).parse()


FormulaLike = Union[str, Formula]


def as_formula(phi: FormulaLike) -> Formula:
    return parse(phi) if isinstance(phi, str) else phi


def to_json(phi: Formula):
    """Nested JSON form: ``[kind, ...fields]``."""
    name = type(phi).__name__
    if isinstance(phi, (Top, Bot)):
        return [name]
    if isinstance(phi, Prop):
        return [name, phi.name]
    if isinstance(phi, Pred):
        return [name, phi.name, list(phi.args)]
    if isinstance(phi, (Forall, Exists)):
        return [name, phi.var, to_json(phi.body)]
    if isinstance(phi, OmegaAnd):
        return [name, phi.index, to_json(phi.body)]
    return [name] + [to_json(c) for c in children(phi)]
