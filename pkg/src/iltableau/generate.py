"""Seeded random formulas for property tests and the acceptance corpus."""

from __future__ import annotations

import random

from .formula import Box, Formula, Imp, Neg, Rhd, Var


def random_formula(rng: random.Random, depth: int = 4, names=("p", "q", "r")) -> Formula:
    """A BoxAt-free formula of depth at most ``depth`` over ``names``."""
    if depth <= 0 or rng.random() < 0.2:
        return Var(rng.choice(names))
    kind = rng.choice(("neg", "neg", "imp", "imp", "box", "rhd"))
    if kind == "neg":
        return Neg(random_formula(rng, depth - 1, names))
    if kind == "box":
        return Box(random_formula(rng, depth - 1, names))
    left = random_formula(rng, depth - 1, names)
    right = random_formula(rng, depth - 1, names)
    return Imp(left, right) if kind == "imp" else Rhd(left, right)


def corpus(n: int, seed: int = 0, depth: int = 4, names=("p", "q", "r")) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, depth, names) for _ in range(n)]
