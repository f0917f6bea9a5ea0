"""Tableau labels: ``0``, ``σRn`` and ``σS_ρn``.

A label names a prospective world.  Its steps record how it was created:
an R-step is a fresh successor, an S-step a fresh S_ρ-successor where ρ is
a strict prefix of the label being extended.

Rendering puts the base of an S-step in braces and separates the index by a
space, e.g. ``0R0S_{0} 1``, so that every label has exactly one reading.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class PrefixViolation(ValueError):
    """Raised when an S-step base is not a strict prefix of the extended label."""


class LabelSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class RStep:
    n: int


@dataclass(frozen=True)
class SStep:
    base: "Label"
    n: int


class Label:
    """Immutable label; the root is the label with no steps."""

    __slots__ = ("steps", "_hash", "_key", "_text")

    def __init__(self, steps: tuple = ()):
        object.__setattr__(self, "steps", tuple(steps))
        object.__setattr__(self, "_hash", hash(self.steps))
        object.__setattr__(self, "_key", None)
        object.__setattr__(self, "_text", None)

    def __setattr__(self, name, value):
        raise AttributeError("Label is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Label):
            return NotImplemented
        return self._hash == other._hash and self.steps == other.steps

    def __hash__(self):
        return self._hash

    @property
    def key(self) -> tuple:
        """Sort key; prefixes sort before their extensions."""
        if self._key is None:
            parts = []
            for step in self.steps:
                if isinstance(step, RStep):
                    parts.append((0, step.n))
                else:
                    parts.append((1, step.base.key, step.n))
            object.__setattr__(self, "_key", tuple(parts))
        return self._key

    def __lt__(self, other: "Label") -> bool:
        return self.key < other.key

    def __le__(self, other: "Label") -> bool:
        return self.key <= other.key

    def __gt__(self, other: "Label") -> bool:
        return self.key > other.key

    def __ge__(self, other: "Label") -> bool:
        return self.key >= other.key

    def __len__(self) -> int:
        return len(self.steps) + 1

    def __str__(self) -> str:
        if self._text is None:
            out = ["0"]
            for step in self.steps:
                if isinstance(step, RStep):
                    out.append(f"R{step.n}")
                else:
                    out.append(f"S_{{{step.base}}} {step.n}")
            object.__setattr__(self, "_text", "".join(out))
        return self._text

    def __repr__(self) -> str:
        return f"Label({str(self)!r})"

    def __reduce__(self):
        return (Label, (self.steps,))

    @property
    def is_root(self) -> bool:
        return not self.steps

    @property
    def parent(self) -> "Label | None":
        if not self.steps:
            return None
        return Label(self.steps[:-1])

    def prefixes(self):
        """All strict prefixes, shortest first."""
        return [Label(self.steps[:i]) for i in range(len(self.steps))]


ROOT = Label()


def root() -> Label:
    return ROOT


def extend_r(sigma: Label, n: int) -> Label:
    if n < 0:
        raise ValueError("label index must be a natural number")
    return Label(sigma.steps + (RStep(n),))


def extend_s(sigma: Label, rho: Label, n: int) -> Label:
    if n < 0:
        raise ValueError("label index must be a natural number")
    if not is_strict_prefix(rho, sigma):
        raise PrefixViolation(f"{rho} is not a strict prefix of {sigma}")
    return Label(sigma.steps + (SStep(rho, n),))


def is_strict_prefix(rho: Label, sigma: Label) -> bool:
    k = len(rho.steps)
    return k < len(sigma.steps) and sigma.steps[:k] == rho.steps


_DIGITS = re.compile(r"\d+")


def scan_label(text: str, pos: int = 0) -> tuple[Label, int]:
    """Read one label starting at ``pos``; return it and the end position.

    Scanning is greedy: an ``R`` or ``S_{`` right after a complete label
    continues that label.
    """
    if pos >= len(text) or text[pos] != "0":
        raise LabelSyntaxError(f"expected '0' at position {pos}")
    pos += 1
    steps: list = []
    while pos < len(text):
        ch = text[pos]
        if ch == "R":
            m = _DIGITS.match(text, pos + 1)
            if not m:
                break
            steps.append(RStep(int(m.group())))
            pos = m.end()
        elif text.startswith("S_{", pos):
            base, end = scan_label(text, pos + 3)
            if end >= len(text) or text[end] != "}":
                raise LabelSyntaxError(f"expected '}}' at position {end}")
            m = re.compile(r" (\d+)").match(text, end + 1)
            if not m:
                raise LabelSyntaxError(f"expected ' <n>' at position {end + 1}")
            current = Label(tuple(steps))
            if not is_strict_prefix(base, current):
                raise PrefixViolation(f"{base} is not a strict prefix of {current}")
            steps.append(SStep(base, int(m.group(1))))
            pos = m.end()
        else:
            break
    return Label(tuple(steps)), pos


def parse_label(text: str) -> Label:
    text = text.strip()
    label, end = scan_label(text)
    if end != len(text):
        raise LabelSyntaxError(f"trailing input at position {end}: {text[end:]!r}")
    return label
