"""Least R/S relations on a set of labels, closed under a Horn frame condition.

The relations are the least fixed point of

* seed facts: ``R(σ, σRn)`` and ``S(ρ; σ, σS_ρn)`` for labels present in Λ;
* the IL frame laws (R transitive, S_x reflexive on and confined to the
  R-successors of x, ``xRyRz ⇒ y S_x z``, S_x transitive);
* the clauses of the frame condition.

Evaluation is semi-naive: every round joins only against facts derived in
the previous round.  ``add_label`` reuses the fixed point of the smaller
label set and reports exactly the tuples it adds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .frames import Atom, FrameCondition, parse_clause
from .labels import Label, RStep

IL_LAWS = tuple(
    parse_clause(line)
    for line in (
        "R(x,y), R(y,z) -> R(x,z)",
        "R(x,y) -> S(x;y,y)",
        "R(x,y), R(y,z) -> S(x;y,z)",
        "S(x;y,z), S(x;z,u) -> S(x;y,u)",
        "S(x;y,z) -> R(x,y)",
        "S(x;y,z) -> R(x,z)",
    )
)

_ARITY = {"R": 2, "S": 3}


@dataclass(frozen=True)
class _Step:
    pred: str
    bound: tuple      # positions whose value is known before the lookup
    bound_vars: tuple
    free: tuple       # (position, var) pairs bound by this atom


class HornEngine:
    """Compiled join plans for a fixed list of Horn clauses over R and S."""

    def __init__(self, clauses):
        self.clauses = tuple(clauses)
        self.plans = []
        patterns = {("R", (0,)), ("R", (1,)), ("S", (0, 1))}
        for clause in self.clauses:
            for i, first in enumerate(clause.body):
                steps = self._plan(clause.body, i)
                for step in steps:
                    if 0 < len(step.bound) < _ARITY[step.pred]:
                        patterns.add((step.pred, step.bound))
                self.plans.append((first, steps, clause.head))
        self.patterns = tuple(sorted(patterns))

    @staticmethod
    def _plan(body, first_index):
        bound = set(body[first_index].args)
        rest = [a for j, a in enumerate(body) if j != first_index]
        steps = []
        while rest:
            # most-constrained atom next
            rest.sort(key=lambda a: -sum(v in bound for v in a.args))
            atom = rest.pop(0)
            positions, names, free = [], [], []
            seen_here = set()
            for pos, v in enumerate(atom.args):
                if v in bound:
                    positions.append(pos)
                    names.append(v)
                elif v in seen_here:
                    # repeated fresh variable: checked as an equality after lookup
                    free.append((pos, v))
                else:
                    free.append((pos, v))
                    seen_here.add(v)
            steps.append(_Step(atom.pred, tuple(positions), tuple(names), tuple(free)))
            bound |= set(atom.args)
        return steps


@lru_cache(maxsize=None)
def _engine_for(condition: FrameCondition) -> HornEngine:
    return HornEngine(IL_LAWS + tuple(condition.clauses))


def _unify(atom: Atom, fact: tuple, binding: dict) -> dict | None:
    out = dict(binding)
    for v, value in zip(atom.args, fact):
        if v in out:
            if out[v] != value:
                return None
        else:
            out[v] = value
    return out


class FactStore:
    """Mutable R/S fact sets plus the lookup indexes an engine needs."""

    def __init__(self, engine: HornEngine):
        self.engine = engine
        self.facts = {"R": set(), "S": set()}
        self.index = {pat: {} for pat in engine.patterns}
        self._by_pred = {"R": [], "S": []}
        for pat in engine.patterns:
            self._by_pred[pat[0]].append(pat)

    def copy(self) -> "FactStore":
        new = FactStore.__new__(FactStore)
        new.engine = self.engine
        new.facts = {k: set(v) for k, v in self.facts.items()}
        new.index = {pat: {k: set(v) for k, v in d.items()} for pat, d in self.index.items()}
        new._by_pred = self._by_pred
        return new

    def _insert(self, pred: str, fact: tuple) -> bool:
        rel = self.facts[pred]
        if fact in rel:
            return False
        rel.add(fact)
        for pat in self._by_pred[pred]:
            key = tuple(fact[p] for p in pat[1])
            bucket = self.index[pat].get(key)
            if bucket is None:
                self.index[pat][key] = {fact}
            else:
                bucket.add(fact)
        return True

    def lookup(self, pred: str, positions: tuple, key: tuple):
        if not positions:
            return self.facts[pred]
        if len(positions) == _ARITY[pred]:
            return (key,) if key in self.facts[pred] else ()
        return self.index[(pred, positions)].get(key, ())

    def _join(self, steps, k, binding, head, out):
        if k == len(steps):
            fact = tuple(binding[v] for v in head.args)
            if fact not in self.facts[head.pred]:
                out[head.pred].add(fact)
            return
        step = steps[k]
        key = tuple(binding[v] for v in step.bound_vars)
        if len(step.bound) == _ARITY[step.pred]:
            if key in self.facts[step.pred]:
                self._join(steps, k + 1, binding, head, out)
            return
        for cand in list(self.lookup(step.pred, step.bound, key)):
            b = binding
            ok = True
            extended = False
            for pos, v in step.free:
                value = cand[pos]
                if v in b:
                    if b[v] != value:
                        ok = False
                        break
                else:
                    if not extended:
                        b = dict(b)
                        extended = True
                    b[v] = value
            if ok:
                self._join(steps, k + 1, b, head, out)

    def saturate(self, seeds: dict) -> dict:
        """Add ``seeds`` and everything they entail; return all new facts."""
        added = {"R": set(), "S": set()}
        delta = {"R": set(), "S": set()}
        for pred, facts in seeds.items():
            for fact in facts:
                if self._insert(pred, fact):
                    delta[pred].add(fact)
        while delta["R"] or delta["S"]:
            for pred in delta:
                added[pred] |= delta[pred]
            new = {"R": set(), "S": set()}
            for first, steps, head in self.engine.plans:
                for fact in delta[first.pred]:
                    binding = _unify(first, fact, {})
                    if binding is not None:
                        self._join(steps, 0, binding, head, new)
            delta = {"R": set(), "S": set()}
            for pred, facts in new.items():
                for fact in facts:
                    if self._insert(pred, fact):
                        delta[pred].add(fact)
        return added


def _tuple_key(t: tuple):
    return tuple(x.key for x in t)


@dataclass(frozen=True)
class Delta:
    """Tuples added by ``add_label``, in canonical label order."""

    r: tuple
    s: tuple


def _seeds_for(label: Label, lam) -> dict:
    """Syntactic R/S seed facts in which ``label`` is the extension."""
    out = {"R": set(), "S": set()}
    parent = label.parent
    if parent is None or parent not in lam:
        return out
    step = label.steps[-1]
    if isinstance(step, RStep):
        out["R"].add((parent, label))
    elif step.base in lam:
        out["S"].add((step.base, parent, label))
    return out


class LabelStructure:
    """A label set Λ with its least relations R and S.  Treat as immutable."""

    def __init__(self, labels, condition: FrameCondition, store: FactStore):
        self._labels = frozenset(labels)
        self.condition = condition
        self._store = store
        self._succ_cache = {}

    @property
    def labels(self) -> frozenset:
        return self._labels

    @property
    def R(self) -> frozenset:
        return frozenset(self._store.facts["R"])

    @property
    def S(self) -> frozenset:
        return frozenset(self._store.facts["S"])

    def __len__(self):
        return len(self._labels)

    def __contains__(self, label):
        return label in self._labels

    def _require(self, *labels):
        for lab in labels:
            if lab not in self._labels:
                raise KeyError(f"label {lab} is not in the structure")

    def r_related(self, sigma: Label, tau: Label) -> bool:
        self._require(sigma, tau)
        return (sigma, tau) in self._store.facts["R"]

    def s_related(self, rho: Label, sigma: Label, tau: Label) -> bool:
        self._require(rho, sigma, tau)
        return (rho, sigma, tau) in self._store.facts["S"]

    def successors(self, sigma: Label) -> list:
        """All τ with σ R τ, sorted."""
        key = ("R", sigma)
        if key not in self._succ_cache:
            found = self._store.lookup("R", (0,), (sigma,))
            self._succ_cache[key] = sorted(t[1] for t in found)
        return list(self._succ_cache[key])

    def s_successors(self, rho: Label, sigma: Label) -> list:
        """All τ with σ S_ρ τ, sorted."""
        key = ("S", rho, sigma)
        if key not in self._succ_cache:
            found = self._store.lookup("S", (0, 1), (rho, sigma))
            self._succ_cache[key] = sorted(t[2] for t in found)
        return list(self._succ_cache[key])

    def has_r_cycle(self) -> bool:
        # R is transitively closed, so a cycle shows up as a reflexive pair
        return any(a == b for a, b in self._store.facts["R"])

    def add_label(self, new: Label) -> tuple["LabelStructure", Delta]:
        if new in self._labels:
            raise ValueError(f"duplicate label {new}")
        lam = self._labels | {new}
        seeds = _seeds_for(new, lam)
        for lab in self._labels:
            if lab.parent == new or any(
                not isinstance(s, RStep) and s.base == new for s in lab.steps[-1:]
            ):
                for pred, facts in _seeds_for(lab, lam).items():
                    seeds[pred] |= facts
        store = self._store.copy()
        added = store.saturate(seeds)
        delta = Delta(
            tuple(sorted(added["R"], key=_tuple_key)),
            tuple(sorted(added["S"], key=_tuple_key)),
        )
        return LabelStructure(lam, self.condition, store), delta

    def dump(self) -> str:
        lines = [f"R {a} {b}" for a, b in sorted(self._store.facts["R"], key=_tuple_key)]
        lines += [f"S {a} {b} {c}" for a, b, c in sorted(self._store.facts["S"], key=_tuple_key)]
        return "\n".join(lines)

    def __eq__(self, other):
        if not isinstance(other, LabelStructure):
            return NotImplemented
        return (self._labels == other._labels and self.condition == other.condition
                and self._store.facts == other._store.facts)

    def __repr__(self):
        return (f"LabelStructure({len(self._labels)} labels, {len(self._store.facts['R'])} R, "
                f"{len(self._store.facts['S'])} S, {self.condition.name})")


def close(labels, condition: FrameCondition | None = None) -> LabelStructure:
    condition = condition if condition is not None else FrameCondition(name="IL")
    lam = frozenset(labels)
    seeds = {"R": set(), "S": set()}
    for lab in lam:
        for pred, facts in _seeds_for(lab, lam).items():
            seeds[pred] |= facts
    store = FactStore(_engine_for(condition))
    store.saturate(seeds)
    return LabelStructure(lam, condition, store)


def horn_closure(r_pairs, s_triples, condition: FrameCondition) -> tuple[set, set]:
    """Close arbitrary R/S relations under the IL frame laws and ``condition``."""
    store = FactStore(_engine_for(condition))
    store.saturate({"R": set(r_pairs), "S": set(s_triples)})
    return set(store.facts["R"]), set(store.facts["S"])
