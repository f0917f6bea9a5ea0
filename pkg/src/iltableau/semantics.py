"""Finite Veltman models and everything evaluated on them.

A model is ``(W, R, S, V)`` with S stored as triples ``(x, y, z)`` meaning
``y S_x z``.  Worlds are opaque hashables; models read off a tableau branch
use the branch labels themselves as worlds, so the interpretation of a
label is the label.

Text format (``write_model``/``read_model`` round-trip exactly)::

    worlds: 0 0R0
    R: 0 0R0
    S: 0; 0R0 0R0
    V p: 0R0
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import product

from .formula import Box, BoxAt, Formula, Imp, Neg, Rhd, Var, variables
from .frames import FrameCondition
from .labels import Label, LabelSyntaxError, scan_label
from .structure import horn_closure


class EvaluationError(ValueError):
    pass


class HintikkaViolation(ValueError):
    pass


class CyclicR(ValueError):
    pass


class TruthLemmaViolation(AssertionError):
    pass


def _world_key(w):
    if isinstance(w, Label):
        return (0, w.key, "")
    return (1, (), str(w))


class Model:
    def __init__(self, worlds, R, S, V):
        self.worlds = tuple(sorted(set(worlds), key=_world_key))
        self.R = frozenset(R)
        self.S = frozenset(S)
        self.V = {p: frozenset(ws) for p, ws in V.items()}
        self._world_set = frozenset(self.worlds)
        self._succ = {w: set() for w in self.worlds}
        for x, y in self.R:
            self._succ[x].add(y)
        self._s_succ = {}
        for x, y, z in self.S:
            self._s_succ.setdefault((x, y), set()).add(z)

    def __contains__(self, w):
        return w in self._world_set

    def successors(self, x):
        return self._succ[x]

    def s_successors(self, x, y):
        """All z with y S_x z."""
        return self._s_succ.get((x, y), ())

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (self.worlds == other.worlds and self.R == other.R and self.S == other.S
                and {p: v for p, v in self.V.items() if v} == {p: v for p, v in other.V.items() if v})

    def __repr__(self):
        return f"Model({len(self.worlds)} worlds, {len(self.R)} R, {len(self.S)} S)"


def evaluate(m: Model, w, f: Formula, interp=None) -> bool:
    """``m, w ⊩ f``.  ``interp`` maps the labels of ``BoxAt`` to worlds."""
    if w not in m:
        raise EvaluationError(f"world {w} is not in the model")
    return _ev(m, w, f, interp)


def _ev(m: Model, w, f: Formula, interp) -> bool:
    if isinstance(f, Var):
        return w in m.V.get(f.name, ())
    if isinstance(f, Neg):
        return not _ev(m, w, f.sub, interp)
    if isinstance(f, Imp):
        return not _ev(m, w, f.left, interp) or _ev(m, w, f.right, interp)
    if isinstance(f, Box):
        return all(_ev(m, y, f.sub, interp) for y in m.successors(w))
    if isinstance(f, Rhd):
        for y in m.successors(w):
            if _ev(m, y, f.left, interp) and not any(
                _ev(m, z, f.right, interp) for z in m.s_successors(w, y)
            ):
                return False
        return True
    if isinstance(f, BoxAt):
        if interp is not None and f.label in interp:
            base = interp[f.label]
        elif f.label in m:
            base = f.label
        else:
            raise EvaluationError(f"cannot resolve the base {f.label} of a labelled box")
        return all(_ev(m, z, f.sub, interp) for z in m.s_successors(base, w))
    raise TypeError(f"not a formula: {f!r}")


def is_valid_in(m: Model, f: Formula) -> bool:
    return all(evaluate(m, w, f) for w in m.worlds)


def check_model(m: Model) -> list[str]:
    """IL-frame invariants; returns human-readable violations (empty if none)."""
    problems = []
    for x, y in m.R:
        if x not in m or y not in m:
            problems.append(f"R pair ({x}, {y}) leaves the model")
    for x, y in m.R:
        for z in m.successors(y):
            if (x, z) not in m.R:
                problems.append(f"R not transitive at {x} {y} {z}")
    if any(x == y for x, y in m.R):
        problems.append("R has a cycle")
    elif _has_cycle(m):
        problems.append("R has a cycle")
    for x, y, z in m.S:
        if (x, y) not in m.R or (x, z) not in m.R:
            problems.append(f"S triple ({x}; {y}, {z}) outside the R-successors of {x}")
    for x in m.worlds:
        succ = m.successors(x)
        for y in succ:
            if (x, y, y) not in m.S:
                problems.append(f"S_{x} not reflexive at {y}")
            for z in m.successors(y):
                if (x, y, z) not in m.S:
                    problems.append(f"{x} R {y} R {z} but not {y} S_{x} {z}")
    for x, y, z in m.S:
        for u in m.s_successors(x, z):
            if (x, y, u) not in m.S:
                problems.append(f"S_{x} not transitive at {y} {z} {u}")
    return problems


def _has_cycle(m: Model) -> bool:
    state = {}

    def visit(w):
        state[w] = 1
        for y in m.successors(w):
            s = state.get(y, 0)
            if s == 1 or (s == 0 and visit(y)):
                return True
        state[w] = 2
        return False

    return any(state.get(w, 0) == 0 and visit(w) for w in m.worlds)


@dataclass(frozen=True)
class FrameViolation:
    clause: object
    assignment: dict


def _assignments(m: Model, body, binding):
    if not body:
        yield binding
        return
    atom, rest = body[0], body[1:]
    rel = m.R if atom.pred == "R" else m.S
    for fact in rel:
        b = dict(binding)
        for v, value in zip(atom.args, fact):
            if b.setdefault(v, value) != value:
                break
        else:
            yield from _assignments(m, rest, b)


def check_frame(m: Model, condition: FrameCondition) -> tuple[bool, FrameViolation | None]:
    for clause in condition.clauses:
        for binding in _assignments(m, clause.body, {}):
            head = tuple(binding[v] for v in clause.head.args)
            rel = m.R if clause.head.pred == "R" else m.S
            if head not in rel:
                return False, FrameViolation(clause, binding)
    return True, None


# --- branches ------------------------------------------------------------

def verify_hintikka(branch) -> tuple[bool, str | None]:
    """Check the ten Hintikka conditions on ``branch.formulas`` literally.

    Returns ``(True, None)`` or ``(False, description of the first failure)``.
    """
    fs = set((lf[0], lf[1]) for lf in branch.formulas)
    ls = branch.structure
    labels = {lab for lab, _ in fs}

    def has(lab, f):
        return (lab, f) in fs

    for lab, f in sorted(fs, key=lambda t: (t[0].key, repr(t[1]))):
        if has(lab, Neg(f)):
            return False, f"(i) {lab} carries both A and ~A"
        if isinstance(f, Neg):
            g = f.sub
            if isinstance(g, Neg) and not has(lab, g.sub):
                return False, f"(ii) {lab}: double negation not unpacked"
            if isinstance(g, Imp) and not (has(lab, g.left) and has(lab, Neg(g.right))):
                return False, f"(iv) {lab}: negated implication not unpacked"
            if isinstance(g, Rhd):
                if not any(has(t, g.left) and has(t, BoxAt(lab, Neg(g.right)))
                           for t in labels if ls.r_related(lab, t)):
                    return False, f"(vi) {lab}: no witness for a negated interpretability"
            if isinstance(g, Box):
                if not any(has(t, Neg(g.sub)) for t in labels if ls.r_related(lab, t)):
                    return False, f"(viii) {lab}: no witness for a negated box"
            if isinstance(g, BoxAt):
                if not any(has(t, Neg(g.sub)) for t in labels if ls.s_related(g.label, lab, t)):
                    return False, f"(x) {lab}: no witness for a negated labelled box"
        elif isinstance(f, Imp):
            if not (has(lab, Neg(f.left)) or has(lab, f.right)):
                return False, f"(iii) {lab}: implication not split"
        elif isinstance(f, Rhd):
            for t in labels:
                if ls.r_related(lab, t) and not (
                    has(t, Neg(f.left)) or has(t, Neg(BoxAt(lab, Neg(f.right))))
                ):
                    return False, f"(v) {lab}: interpretability not propagated to {t}"
        elif isinstance(f, Box):
            for t in labels:
                if ls.r_related(lab, t) and not has(t, f.sub):
                    return False, f"(vii) {lab}: box not propagated to {t}"
        elif isinstance(f, BoxAt):
            for t in labels:
                if ls.s_related(f.label, lab, t) and not has(t, f.sub):
                    return False, f"(ix) {lab}: labelled box not propagated to {t}"
    return True, None


def extract_model(branch) -> Model:
    """Read a model off a Hintikka branch and check it satisfies the branch."""
    ok, why = verify_hintikka(branch)
    if not ok:
        raise HintikkaViolation(why)
    ls = branch.structure
    if ls.has_r_cycle():
        raise CyclicR("the branch relation R is cyclic")
    fs = [(lf[0], lf[1]) for lf in branch.formulas]
    names = set()
    for _, f in fs:
        names |= variables(f)
    V = {p: {lab for lab, f in fs if f == Var(p)} for p in sorted(names)}
    model = Model(ls.labels, ls.R, ls.S, V)
    for lab, f in fs:
        if not evaluate(model, lab, f):
            raise TruthLemmaViolation(f"extracted model falsifies a branch formula at {lab}")
    return model


# --- random models -------------------------------------------------------

def random_model(n_worlds: int, condition: FrameCondition, seed, variables=("p", "q", "r"),
                 edge_prob: float = 0.45, extra_s_prob: float = 0.25,
                 max_tries: int = 100) -> Model:
    """A random model of the IL frame laws and ``condition``, deterministic per seed."""
    if not 1 <= n_worlds <= 8:
        raise ValueError("n_worlds must be between 1 and 8")
    rng = random.Random(seed)
    worlds = [f"w{i}" for i in range(n_worlds)]
    for _ in range(max_tries):
        order = worlds[:]
        rng.shuffle(order)
        R = {(order[i], order[j]) for i in range(n_worlds) for j in range(i + 1, n_worlds)
             if rng.random() < edge_prob}
        R, S = horn_closure(R, (), FrameCondition())
        extra = set()
        for x in worlds:
            succ = sorted(y for (a, y) in R if a == x)
            for y, z in product(succ, succ):
                if y != z and rng.random() < extra_s_prob:
                    extra.add((x, y, z))
        R, S = horn_closure(R, S | extra, condition)
        if any(a == b for a, b in R):
            continue
        V = {p: {w for w in worlds if rng.random() < 0.5} for p in variables}
        return Model(worlds, R, S, V)
    raise RuntimeError(f"no acyclic model after {max_tries} attempts")


# --- text and JSON formats -----------------------------------------------

def write_model(m: Model) -> str:
    def key2(t):
        return tuple(_world_key(x) for x in t)

    lines = ["worlds: " + " ".join(str(w) for w in m.worlds)]
    lines += [f"R: {a} {b}" for a, b in sorted(m.R, key=key2)]
    lines += [f"S: {a}; {b} {c}" for a, b, c in sorted(m.S, key=key2)]
    for p in sorted(m.V):
        ws = sorted(m.V[p], key=_world_key)
        lines.append(f"V {p}:" + "".join(" " + str(w) for w in ws))
    return "\n".join(lines) + "\n"


def _scan_worlds(text: str) -> list:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos] in " \t":
            pos += 1
        if pos >= len(text):
            return out
        try:
            label, end = scan_label(text, pos)
            if end == len(text) or text[end] in " \t;":
                out.append(label)
                pos = end
                continue
        except LabelSyntaxError:
            pass
        end = pos
        while end < len(text) and text[end] not in " \t;":
            end += 1
        out.append(text[pos:end])
        pos = end


def read_model(text: str) -> Model:
    worlds, R, S, V = None, set(), set(), {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: missing ':'")
        head = head.strip()
        if head == "worlds":
            worlds = _scan_worlds(rest)
        elif head == "R":
            pair = _scan_worlds(rest)
            if len(pair) != 2:
                raise ValueError(f"line {lineno}: R needs two worlds")
            R.add(tuple(pair))
        elif head == "S":
            base, semi, tail = rest.partition(";")
            b = _scan_worlds(base)
            yz = _scan_worlds(tail)
            if not semi or len(b) != 1 or len(yz) != 2:
                raise ValueError(f"line {lineno}: S needs 'x; y z'")
            S.add((b[0], yz[0], yz[1]))
        elif head.startswith("V "):
            V[head[2:].strip()] = set(_scan_worlds(rest))
        else:
            raise ValueError(f"line {lineno}: unknown field {head!r}")
    if worlds is None:
        raise ValueError("missing 'worlds:' line")
    return Model(worlds, R, S, V)


def model_to_json(m: Model) -> dict:
    return {
        "worlds": [str(w) for w in m.worlds],
        "R": [[str(a), str(b)] for a, b in sorted(m.R, key=lambda t: tuple(map(_world_key, t)))],
        "S": [[str(a), str(b), str(c)] for a, b, c in sorted(m.S, key=lambda t: tuple(map(_world_key, t)))],
        "V": {p: [str(w) for w in sorted(m.V[p], key=_world_key)] for p in sorted(m.V)},
    }


def model_from_json(data) -> Model:
    if isinstance(data, str):
        data = json.loads(data)

    def world(s):
        found = _scan_worlds(s)
        return found[0] if len(found) == 1 else s

    return Model(
        [world(w) for w in data["worlds"]],
        {(world(a), world(b)) for a, b in data["R"]},
        {(world(a), world(b), world(c)) for a, b, c in data["S"]},
        {p: {world(w) for w in ws} for p, ws in data["V"].items()},
    )
