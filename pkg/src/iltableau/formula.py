"""Formulas of interpretability logic.

The AST has five user-facing constructors (variables, negation,
implication, box and the binary interpretability modality) plus ``BoxAt``,
the label-indexed box that only the tableau rules introduce.  Everything
else the parser accepts is sugar:

    A & B    ~(A -> ~B)
    A | B    ~A -> B
    A <-> B  (A -> B) & (B -> A)
    <>A      ~[]~A
    true     _top -> _top
    false    ~true

Binding strength, strongest first: ``~ [] <>``, then ``& |`` (equal,
left-associative), then ``|>`` (non-associative), then ``->``
(right-associative), then ``<->`` (non-associative).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union


class _Node:
    """Mixin caching the structural hash; formulas are hashed constantly by the tableau."""

    __slots__ = ()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self._fields))
            object.__setattr__(self, "_hash", h)
        return h


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Var(_Node):
    _fields = ('name',)
    __hash__ = _Node.__hash__

    name: str


@dataclass(frozen=True)
class Neg(_Node):
    _fields = ('sub',)
    __hash__ = _Node.__hash__

    sub: "Formula"


@dataclass(frozen=True)
class Imp(_Node):
    _fields = ('left', 'right')
    __hash__ = _Node.__hash__

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Box(_Node):
    _fields = ('sub',)
    __hash__ = _Node.__hash__

    sub: "Formula"


@dataclass(frozen=True)
class Rhd(_Node):
    _fields = ('left', 'right')
    __hash__ = _Node.__hash__

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class BoxAt(_Node):
    """``□_ρ A``: A holds at every S_ρ-successor."""

    _fields = ('label', 'sub')
    __hash__ = _Node.__hash__

    label: object
    sub: "Formula"


Formula = Union[Var, Neg, Imp, Box, Rhd, BoxAt]

# Variable behind true/false; the tokenizer rejects identifiers starting with "_".
TOP_VAR = Var("_top")
TOP = Imp(TOP_VAR, TOP_VAR)
BOT = Neg(TOP)


def conj(a: Formula, b: Formula) -> Formula:
    return Neg(Imp(a, Neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Imp(Neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Imp(a, b), Imp(b, a))


def dia(a: Formula) -> Formula:
    return Neg(Box(Neg(a)))


def is_literal(f: Formula) -> bool:
    return isinstance(f, Var) or (isinstance(f, Neg) and isinstance(f.sub, Var))


def size(f: Formula) -> int:
    if isinstance(f, Var):
        return 1
    if isinstance(f, (Neg, Box, BoxAt)):
        return 1 + size(f.sub)
    return 1 + size(f.left) + size(f.right)


def variables(f: Formula) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, (Neg, Box, BoxAt)):
        return variables(f.sub)
    return variables(f.left) | variables(f.right)


def contains_box_at(f: Formula) -> bool:
    if isinstance(f, BoxAt):
        return True
    if isinstance(f, Var):
        return False
    if isinstance(f, (Neg, Box)):
        return contains_box_at(f.sub)
    return contains_box_at(f.left) or contains_box_at(f.right)


def subformulas(f: Formula) -> set:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (Neg, Box, BoxAt)):
            stack.append(g.sub)
        elif isinstance(g, (Imp, Rhd)):
            stack.append(g.left)
            stack.append(g.right)
    return out


def closure_set(gamma: Iterable[Formula]) -> set:
    """Subformulas of ``gamma`` together with their single negations."""
    sub = set()
    for f in gamma:
        sub |= subformulas(f)
    return sub | {Neg(a) for a in sub}


# --- parsing -------------------------------------------------------------

_TOKEN_SPEC = [
    ("WS", r"\s+"),
    ("RESERVED", r"\[_|_[A-Za-z0-9_']*"),
    ("IFF", r"<->|↔"),
    ("IMP", r"->|→"),
    ("DIA", r"<>|◇"),
    ("BOX", r"\[\]|□"),
    ("RHD", r"\|>|▷|⊳"),
    ("AND", r"&|∧"),
    ("OR", r"\||∨"),
    ("NOT", r"~|¬"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("TRUE", r"⊤"),
    ("FALSE", r"⊥"),
    ("IDENT", r"[A-Za-z][A-Za-z0-9_']*"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC))


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group()
        if kind == "RESERVED":
            raise FormulaSyntaxError(f"reserved token {value!r}", pos)
        if kind == "IDENT" and value == "true":
            kind = "TRUE"
        elif kind == "IDENT" and value == "false":
            kind = "FALSE"
        if kind != "WS":
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str | None = None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = tok[1] or "end of input"
            raise FormulaSyntaxError(f"expected {kind}, found {what!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        self.take("EOF")
        return f

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek() == "IFF":
            self.take()
            right = self.imp()
            if self.peek() == "IFF":
                raise FormulaSyntaxError("'<->' is non-associative", self.tokens[self.i][2])
            return iff(left, right)
        return left

    def imp(self) -> Formula:
        left = self.rhd()
        if self.peek() == "IMP":
            self.take()
            return Imp(left, self.imp())
        return left

    def rhd(self) -> Formula:
        left = self.conj()
        if self.peek() == "RHD":
            self.take()
            right = self.conj()
            if self.peek() == "RHD":
                raise FormulaSyntaxError("'|>' is non-associative", self.tokens[self.i][2])
            return Rhd(left, right)
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek() in ("AND", "OR"):
            kind = self.take()[0]
            right = self.unary()
            left = conj(left, right) if kind == "AND" else disj(left, right)
        return left

    def unary(self) -> Formula:
        kind = self.peek()
        if kind == "NOT":
            self.take()
            return Neg(self.unary())
        if kind == "BOX":
            self.take()
            return Box(self.unary())
        if kind == "DIA":
            self.take()
            return dia(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "IDENT":
            return Var(value)
        if kind == "TRUE":
            return TOP
        if kind == "FALSE":
            return BOT
        if kind == "LPAREN":
            f = self.iff()
            self.take("RPAREN")
            return f
        raise FormulaSyntaxError(f"unexpected {value or 'end of input'!r}", pos)


def parse(text: str) -> Formula:
    return _Parser(text).parse()


# --- rendering -----------------------------------------------------------

_ASCII = {"not": "~", "box": "[]", "dia": "<>", "and": " & ", "rhd": " |> ",
          "imp": " -> ", "true": "true", "false": "false"}
_UNICODE = {"not": "¬", "box": "□", "dia": "◇", "and": " ∧ ", "rhd": " ▷ ",
            "imp": " → ", "true": "⊤", "false": "⊥"}

# precedence levels used by the printer
_IMP, _RHD, _AND, _UNARY = 1, 2, 3, 4


def _is_and(f: Formula) -> bool:
    return isinstance(f, Neg) and isinstance(f.sub, Imp) and isinstance(f.sub.right, Neg)


def _is_dia(f: Formula) -> bool:
    return isinstance(f, Neg) and isinstance(f.sub, Box) and isinstance(f.sub.sub, Neg)


def _render(f: Formula, sym: dict) -> tuple[str, int]:
    if f == TOP:
        return sym["true"], _UNARY
    if f == BOT:
        return sym["false"], _UNARY
    if isinstance(f, Var):
        return f.name, _UNARY
    if _is_and(f):
        left = _wrap(f.sub.left, sym, lambda lv: lv < _AND)
        right = _wrap(f.sub.right.sub, sym, lambda lv: lv <= _AND)
        return left + sym["and"] + right, _AND
    if _is_dia(f):
        return sym["dia"] + _wrap(f.sub.sub.sub, sym, lambda lv: lv < _UNARY), _UNARY
    if isinstance(f, Neg):
        return sym["not"] + _wrap(f.sub, sym, lambda lv: lv < _UNARY), _UNARY
    if isinstance(f, Box):
        return sym["box"] + _wrap(f.sub, sym, lambda lv: lv < _UNARY), _UNARY
    if isinstance(f, BoxAt):
        return f"[_{f.label}]" + _wrap(f.sub, sym, lambda lv: lv < _UNARY), _UNARY
    if isinstance(f, Rhd):
        left = _wrap(f.left, sym, lambda lv: lv <= _RHD)
        right = _wrap(f.right, sym, lambda lv: lv <= _RHD)
        return left + sym["rhd"] + right, _RHD
    if isinstance(f, Imp):
        left = _wrap(f.left, sym, lambda lv: lv <= _IMP)
        right = _wrap(f.right, sym, lambda lv: lv < _IMP)
        return left + sym["imp"] + right, _IMP
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula, sym: dict, needs_parens) -> str:
    text, level = _render(f, sym)
    return f"({text})" if needs_parens(level) else text


def render(f: Formula, unicode: bool = False) -> str:
    """Print ``f`` with minimal parentheses; conjunction, ◇ and ⊤/⊥ are re-sugared."""
    return _render(f, _UNICODE if unicode else _ASCII)[0]
