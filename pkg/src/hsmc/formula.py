"""HS formulas over the modalities A, Ā, B, E (plus parsed-but-rejected B̄, Ē).

Formulas are immutable dataclass trees.  ``normalize`` rewrites into the
``Letter | Top | Bottom | Not | Or | Diamond`` core used by the checker.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator

from .errors import FormulaSyntaxError


class Mod(enum.Enum):
    A = "A"
    ABAR = "~A"
    B = "B"
    BBAR = "~B"
    E = "E"
    EBAR = "~E"

    @property
    def mirror(self) -> "Mod":
        return _MIRROR[self]


_MIRROR = {
    Mod.A: Mod.ABAR,
    Mod.ABAR: Mod.A,
    Mod.B: Mod.E,
    Mod.E: Mod.B,
    Mod.BBAR: Mod.EBAR,
    Mod.EBAR: Mod.BBAR,
}


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Letter(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    mod: Mod
    arg: Formula


@dataclass(frozen=True)
class Box(Formula):
    mod: Mod
    arg: Formula


def _cached_hash(self):
    # dataclass hashing would re-walk the whole subtree on every lookup
    try:
        return self.__dict__["_hash"]
    except KeyError:
        h = hash((type(self).__name__,) + tuple(self.__dict__[f] for f in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
        return h


for _cls in (Letter, Top, Bottom, Not, Or, And, Implies, Iff, Diamond, Box):
    _cls.__hash__ = _cached_hash

TRUE = Top()
FALSE = Bottom()
BINARY = (Or, And, Implies, Iff)


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (Not, Diamond, Box)):
        return (phi.arg,)
    if isinstance(phi, BINARY):
        return (phi.left, phi.right)
    return ()


def walk(phi: Formula) -> Iterator[Formula]:
    """Pre-order traversal (with repetitions)."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def subformulas(phi: Formula) -> list[Formula]:
    """Distinct subformulas, children before parents."""
    seen: dict[Formula, None] = {}

    def visit(node):
        if node in seen:
            return
        for c in children(node):
            visit(c)
        seen[node] = None

    visit(phi)
    return list(seen)


def letters(phi: Formula) -> set[str]:
    return {n.name for n in walk(phi) if isinstance(n, Letter)}


def size(phi: Formula) -> int:
    """Number of AST nodes."""
    return sum(1 for _ in walk(phi))


def modal_depth(phi: Formula) -> int:
    if isinstance(phi, (Diamond, Box)):
        return 1 + modal_depth(phi.arg)
    return max((modal_depth(c) for c in children(phi)), default=0)


# convenience constructors ----------------------------------------------------


def conj(*parts: Formula) -> Formula:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def dia(mod: Mod | str, phi: Formula, times: int = 1) -> Formula:
    mod = Mod(mod)
    for _ in range(times):
        phi = Diamond(mod, phi)
    return phi


def box(mod: Mod | str, phi: Formula, times: int = 1) -> Formula:
    mod = Mod(mod)
    for _ in range(times):
        phi = Box(mod, phi)
    return phi


# normalization ---------------------------------------------------------------


def normalize(phi: Formula) -> Formula:
    """Rewrite And/Implies/Iff/Box away; no double-negation removal."""
    if isinstance(phi, (Letter, Top, Bottom)):
        return phi
    if isinstance(phi, Not):
        return Not(normalize(phi.arg))
    if isinstance(phi, Or):
        return Or(normalize(phi.left), normalize(phi.right))
    if isinstance(phi, And):
        return Not(Or(Not(normalize(phi.left)), Not(normalize(phi.right))))
    if isinstance(phi, Implies):
        return Or(Not(normalize(phi.left)), normalize(phi.right))
    if isinstance(phi, Iff):
        return normalize(And(Implies(phi.left, phi.right), Implies(phi.right, phi.left)))
    if isinstance(phi, Diamond):
        return Diamond(phi.mod, normalize(phi.arg))
    if isinstance(phi, Box):
        return Not(Diamond(phi.mod, Not(normalize(phi.arg))))
    raise TypeError(f"not a formula: {phi!r}")


def is_normal(phi: Formula) -> bool:
    return all(isinstance(n, (Letter, Top, Bottom, Not, Or, Diamond)) for n in walk(phi))


def mirror(phi: Formula) -> Formula:
    """Swap A with Ā and B with E at every modality."""
    if isinstance(phi, Diamond):
        return Diamond(phi.mod.mirror, mirror(phi.arg))
    if isinstance(phi, Box):
        return Box(phi.mod.mirror, mirror(phi.arg))
    if isinstance(phi, Not):
        return Not(mirror(phi.arg))
    if isinstance(phi, BINARY):
        return type(phi)(mirror(phi.left), mirror(phi.right))
    return phi


def mods(psi: Formula) -> list[Diamond]:
    """A/Ā diamonds of ``psi`` not nested under another A/Ā modality.

    Structural duplicates are collapsed; order is left-to-right.
    """
    found: dict[Formula, None] = {}

    def visit(node):
        if isinstance(node, Diamond) and node.mod in (Mod.A, Mod.ABAR):
            found.setdefault(node, None)
            return
        for c in children(node):
            visit(c)

    visit(psi)
    return list(found)


# fragments -------------------------------------------------------------------


@dataclass(frozen=True)
class Fragment:
    kind: str
    reason: str | None = None

    @property
    def supported(self) -> bool:
        return self.kind != "unsupported"

    def __str__(self) -> str:
        if self.reason:
            return f"{self.kind} ({self.reason})"
        return self.kind


AAB = Fragment("AAbarB")
AAE = Fragment("AAbarE")
AA = Fragment("AAbar")


def fragment_of(phi: Formula) -> Fragment:
    used = {n.mod for n in walk(phi) if isinstance(n, (Diamond, Box))}
    bad = sorted(m.value for m in used & {Mod.BBAR, Mod.EBAR})
    if bad:
        return Fragment("unsupported", "uses " + ", ".join(f"<{m}>" for m in bad))
    has_b, has_e = Mod.B in used, Mod.E in used
    if has_b and has_e:
        return Fragment("unsupported", "mixes B and E")
    if has_b:
        return AAB
    if has_e:
        return AAE
    return AA


# printing --------------------------------------------------------------------

# binding strength: higher binds tighter
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def to_text(phi: Formula) -> str:
    """Render in the ASCII grammar accepted by :func:`parse`."""

    def go(node, ctx):
        if isinstance(node, Letter):
            return node.name
        if isinstance(node, Top):
            return "true"
        if isinstance(node, Bottom):
            return "false"
        if isinstance(node, Not):
            return "~" + go(node.arg, 9)
        if isinstance(node, Diamond):
            return f"<{node.mod.value}>" + go(node.arg, 9)
        if isinstance(node, Box):
            return f"[{node.mod.value}]" + go(node.arg, 9)
        prec = _PREC[type(node)]
        if type(node) is Implies:
            text = f"{go(node.left, prec + 1)} -> {go(node.right, prec)}"
        else:
            text = f"{go(node.left, prec)} {_OPS[type(node)]} {go(node.right, prec + 1)}"
        return f"({text})" if prec < ctx else text

    return go(phi, 0)


# parsing ---------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<dia><~?[ABE]>)
  | (?P<box>\[~?[ABE]\])
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<pow>\^)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[~&|()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "sym":
                kind = val
            toks.append((kind, val, pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "eof" else repr(kind)
            got = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise FormulaSyntaxError(tok[2], f"expected {want}, got {got}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        phi = self.iff()
        self.take("eof")
        return phi

    def iff(self):
        left = self.imp()
        while self.peek()[0] == "iff":
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.peek()[0] == "imp":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[0] == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[0] == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "~":
            self.take()
            return Not(self.unary())
        if kind in ("dia", "box"):
            self.take()
            mod = Mod(val[1:-1])
            times = 1
            if self.peek()[0] == "pow":
                self.take()
                times = int(self.take("num")[1])
                if times < 1:
                    raise FormulaSyntaxError(pos, "modality power must be at least 1")
            arg = self.unary()
            return (dia if kind == "dia" else box)(mod, arg, times)
        if kind == "(":
            self.take()
            phi = self.iff()
            self.take(")")
            return phi
        if kind == "ident":
            self.take()
            if val == "true":
                return TRUE
            if val == "false":
                return FALSE
            return Letter(val)
        what = "end of input" if kind == "eof" else repr(val)
        raise FormulaSyntaxError(pos, f"expected a formula, got {what}")


def parse(text: str) -> Formula:
    """Parse the ASCII formula grammar.

    Precedence from tightest: ``~``/modalities, ``&``, ``|``, ``->`` (right
    associative), ``<->``.  ``<E>^3 phi`` abbreviates ``<E><E><E> phi``.
    """
    return _Parser(text).parse()
