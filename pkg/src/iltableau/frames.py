"""Strict universal Horn frame conditions over ``R(x,y)`` and ``S(x;y,z)``.

File format: one clause per line, ``#`` starts a comment::

    R(x,y), R(y,z), S(x;z,u) -> S(y;z,u)

``S(x;y,z)`` reads "y S_x z".  Every head variable must occur in the body,
so applying a clause never introduces new worlds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path


class FrameSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    pred: str  # "R" or "S"
    args: tuple[str, ...]

    def __str__(self):
        if self.pred == "R":
            return f"R({self.args[0]},{self.args[1]})"
        return f"S({self.args[0]};{self.args[1]},{self.args[2]})"


@dataclass(frozen=True)
class HornClause:
    body: tuple[Atom, ...]
    head: Atom

    def __post_init__(self):
        body_vars = {v for atom in self.body for v in atom.args}
        missing = [v for v in self.head.args if v not in body_vars]
        if missing:
            raise FrameSyntaxError(
                f"head variable(s) {', '.join(sorted(set(missing)))} do not occur in the body"
            )

    @property
    def variables(self) -> list[str]:
        seen = []
        for atom in self.body + (self.head,):
            for v in atom.args:
                if v not in seen:
                    seen.append(v)
        return seen

    def __str__(self):
        return ", ".join(str(a) for a in self.body) + " -> " + str(self.head)


@dataclass(frozen=True)
class FrameCondition:
    clauses: tuple[HornClause, ...] = ()
    name: str = "custom"

    def __str__(self):
        return "\n".join(str(c) for c in self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)


_VAR = r"[A-Za-z][A-Za-z0-9_']*"
_R_ATOM = re.compile(rf"R\(\s*({_VAR})\s*,\s*({_VAR})\s*\)")
_S_ATOM = re.compile(rf"S\(\s*({_VAR})\s*;\s*({_VAR})\s*,\s*({_VAR})\s*\)")


def _parse_atom(text: str, lineno: int) -> Atom:
    text = text.strip()
    m = _R_ATOM.fullmatch(text)
    if m:
        return Atom("R", m.groups())
    m = _S_ATOM.fullmatch(text)
    if m:
        return Atom("S", m.groups())
    raise FrameSyntaxError(f"line {lineno}: not an atom: {text!r}")


def _split_atoms(text: str) -> list[str]:
    # commas also separate arguments, so split only at depth 0
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_clause(line: str, lineno: int = 1) -> HornClause:
    if "->" not in line:
        raise FrameSyntaxError(f"line {lineno}: missing '->'")
    body_text, _, head_text = line.rpartition("->")
    head_parts = _split_atoms(head_text)
    if len(head_parts) != 1:
        raise FrameSyntaxError(f"line {lineno}: head must be a single atom")
    head = _parse_atom(head_parts[0], lineno)
    body_text = body_text.strip()
    body = tuple(_parse_atom(p, lineno) for p in _split_atoms(body_text)) if body_text else ()
    try:
        return HornClause(body, head)
    except FrameSyntaxError as exc:
        raise FrameSyntaxError(f"line {lineno}: {exc}") from None


def parse_horn(text: str, name: str = "custom") -> FrameCondition:
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            clauses.append(parse_clause(line, lineno))
    return FrameCondition(tuple(clauses), name)


def load_horn(path) -> FrameCondition:
    path = Path(path)
    return parse_horn(path.read_text(encoding="utf-8"), name=path.stem)


_PRESETS = {
    "IL": "",
    # Montagna's principle: y S_x z R u implies y R u
    "ILM": "S(x;y,z), R(z,u) -> R(y,u)",
    # persistence: x R y R z S_x u implies z S_y u
    "ILP": "R(x,y), R(y,z), S(x;z,u) -> S(y;z,u)",
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> FrameCondition:
    key = name.upper()
    if key not in _PRESETS:
        raise KeyError(f"unknown logic {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return parse_horn(_PRESETS[key], name=key)
