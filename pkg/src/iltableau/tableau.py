"""Labelled tableaux and the systematic staged procedure.

Each stage picks the awake node closest to the root (leftmost on ties) and
applies its rule to every open branch through it.  Nodes are marked awake,
asleep or finished; box-like nodes fall asleep after saturating over the
labels currently related to them and are woken again when a fresh label
creates a new relation.

The procedure need not terminate, so ``run`` is bounded by a stage budget
and a per-branch label budget and reports ``EXHAUSTED`` when either trips.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

from .formula import Box, BoxAt, Formula, Imp, Neg, Rhd, contains_box_at, render
from .frames import FrameCondition
from .labels import ROOT, Label, PrefixViolation, extend_r, extend_s
from .structure import LabelStructure, close


class LabelledFormula(NamedTuple):
    label: Label
    formula: Formula

    def __str__(self):
        return f"{self.label} :: {render(self.formula)}"


class Mark(str, Enum):
    AWAKE = "awake"
    ASLEEP = "asleep"
    FINISHED = "finished"


class RuleId(str, Enum):
    NEG = "neg"
    IMP = "imp"
    NEG_IMP = "neg_imp"
    NU_BOX = "nu_box"
    NU_S = "nu_s"
    NU_RHD = "nu_rhd"
    PI_BOX = "pi_box"
    PI_S = "pi_s"
    PI_RHD = "pi_rhd"


NU_RULES = (RuleId.NU_BOX, RuleId.NU_S, RuleId.NU_RHD)
PI_RULES = (RuleId.PI_BOX, RuleId.PI_S, RuleId.PI_RHD)


class RuleError(ValueError):
    pass


class ShapeMismatch(RuleError):
    pass


class NoEligibleWitness(RuleError):
    pass


class FreshLabelCollision(RuleError):
    pass


def rule_for(f: Formula) -> RuleId | None:
    """The rule whose antecedent has the shape of ``f``; None for literals."""
    if isinstance(f, Imp):
        return RuleId.IMP
    if isinstance(f, Box):
        return RuleId.NU_BOX
    if isinstance(f, BoxAt):
        return RuleId.NU_S
    if isinstance(f, Rhd):
        return RuleId.NU_RHD
    if isinstance(f, Neg):
        g = f.sub
        if isinstance(g, Neg):
            return RuleId.NEG
        if isinstance(g, Imp):
            return RuleId.NEG_IMP
        if isinstance(g, Box):
            return RuleId.PI_BOX
        if isinstance(g, BoxAt):
            return RuleId.PI_S
        if isinstance(g, Rhd):
            return RuleId.PI_RHD
    return None


def fresh_label(sigma: Label, f: Formula, n: int) -> Label:
    """The label a π-rule on ``sigma :: f`` creates with index ``n``."""
    if isinstance(f.sub, BoxAt):
        return extend_s(sigma, f.sub.label, n)
    return extend_r(sigma, n)


def succedents(rule: RuleId, lf: LabelledFormula, other: Label | None = None) -> list[list[LabelledFormula]]:
    """The forks of one rule instance.

    ``other`` is the related label τ for ν-rules and the fresh label for
    π-rules; propositional rules ignore it.
    """
    sigma, f = lf
    if rule_for(f) is not rule:
        raise ShapeMismatch(f"{rule.value} does not apply to {lf}")
    L = LabelledFormula
    if rule is RuleId.NEG:
        return [[L(sigma, f.sub.sub)]]
    if rule is RuleId.IMP:
        return [[L(sigma, Neg(f.left))], [L(sigma, f.right)]]
    if rule is RuleId.NEG_IMP:
        return [[L(sigma, f.sub.left), L(sigma, Neg(f.sub.right))]]
    if rule is RuleId.NU_BOX or rule is RuleId.NU_S:
        return [[L(other, f.sub)]]
    if rule is RuleId.NU_RHD:
        return [[L(other, Neg(f.left))], [L(other, Neg(BoxAt(sigma, Neg(f.right))))]]
    if rule is RuleId.PI_BOX or rule is RuleId.PI_S:
        a = f.sub.sub
        return [[L(other, Neg(a)), L(other, Box(a))]]
    # PI_RHD
    a, b = f.sub.left, f.sub.right
    return [[L(other, a), L(other, BoxAt(sigma, Neg(b))), L(other, Box(Neg(a)))]]


@lru_cache(maxsize=1 << 14)
def _cached_succedents(rule, lf, other):
    return succedents(rule, lf, other)


class Node:
    __slots__ = ("item", "parent", "children", "mark", "birth_stage", "depth", "path", "state", "nid")

    def __init__(self, item, parent, birth_stage, path, nid):
        self.item = item
        self.parent = parent
        self.children = []
        self.mark = Mark.AWAKE
        self.birth_stage = birth_stage
        self.depth = 0 if parent is None else parent.depth + 1
        # child choices at binary splits only; orders nodes of equal depth left to right
        self.path = path
        self.state = None
        self.nid = nid

    def __repr__(self):
        return f"Node({self.item}, {self.mark.value})"


class _BranchState:
    __slots__ = ("formulas", "structure", "closed", "closed_at")

    def __init__(self, formulas, structure, closed=False, closed_at=None):
        self.formulas = formulas
        self.structure = structure
        self.closed = closed
        self.closed_at = closed_at

    def copy(self):
        return _BranchState(set(self.formulas), self.structure, self.closed, self.closed_at)


def _contradicts(formulas, f: Formula, label: Label) -> bool:
    if (label, Neg(f)) in formulas:
        return True
    return isinstance(f, Neg) and (label, f.sub) in formulas


@dataclass
class Branch:
    """A root-to-leaf path together with the label structure over its labels."""

    nodes: list
    structure: LabelStructure

    @property
    def formulas(self) -> list[LabelledFormula]:
        return [n.item for n in self.nodes]

    @property
    def labels(self) -> frozenset:
        return self.structure.labels

    @property
    def closed(self) -> bool:
        seen = set()
        for lf in self.formulas:
            if _contradicts(seen, lf.formula, lf.label):
                return True
            seen.add(lf)
        return False

    @classmethod
    def from_formulas(cls, items, condition: FrameCondition | None = None) -> "Branch":
        """A detached branch holding ``items`` in order (for tests and tools)."""
        nodes, parent = [], None
        for i, item in enumerate(items):
            node = Node(LabelledFormula(*item), parent, 0, (), i)
            nodes.append(node)
            parent = node
        labels = {lf.label for lf in (n.item for n in nodes)}
        return cls(nodes, close(labels, condition))


def least_fresh_index(sigma: Label, f: Formula, labels) -> int:
    n = 0
    while fresh_label(sigma, f, n) in labels:
        n += 1
    return n


@dataclass
class RuleApplication:
    forks: list
    fresh: Label | None = None


def witnesses(branch: Branch, node_index: int) -> list[Label]:
    """Labels τ to which the ν-rule at ``node_index`` applies, sorted."""
    sigma, f = branch.nodes[node_index].item
    if isinstance(f, BoxAt):
        return branch.structure.s_successors(f.label, sigma)
    if isinstance(f, (Box, Rhd)):
        return branch.structure.successors(sigma)
    raise ShapeMismatch(f"{branch.nodes[node_index].item} is not the antecedent of a ν-rule")


def apply_rule(branch: Branch, node_index: int, rule: RuleId, *, tau: Label | None = None,
               n: int | None = None) -> RuleApplication:
    """One rule instance on the labelled formula at ``node_index``.

    ν-rules need the related label ``tau``; π-rules take the index ``n`` of
    the fresh label, defaulting to the least one not in ``lab(branch)``.
    """
    rule = RuleId(rule)
    lf = branch.nodes[node_index].item
    if rule_for(lf.formula) is not rule:
        raise ShapeMismatch(f"{rule.value} does not apply to {lf}")
    if rule in NU_RULES:
        if tau is None or tau not in witnesses(branch, node_index):
            raise NoEligibleWitness(f"{tau} is not related as {rule.value} requires")
        return RuleApplication(succedents(rule, lf, tau))
    if rule in PI_RULES:
        labels = branch.structure.labels
        if n is None:
            n = least_fresh_index(lf.label, lf.formula, labels)
        new = fresh_label(lf.label, lf.formula, n)
        if new in labels:
            raise FreshLabelCollision(f"{new} already occurs on the branch")
        return RuleApplication(succedents(rule, lf, new), new)
    return RuleApplication(succedents(rule, lf))


@dataclass(frozen=True)
class Bounds:
    max_stages: int = 2000
    max_labels_per_branch: int = 64

    def __post_init__(self):
        if self.max_stages <= 0 or self.max_labels_per_branch <= 0:
            raise ValueError("bounds must be positive")


class _Exhausted(Exception):
    pass


class _Unsupported(Exception):
    pass


class Tableau:
    """Mutable state of one systematic tableau run."""

    def __init__(self, gamma, condition: FrameCondition | None = None, bounds: Bounds | None = None):
        gamma = list(dict.fromkeys(gamma))
        if not gamma:
            raise ValueError("need at least one formula")
        for f in gamma:
            if contains_box_at(f):
                raise ValueError("input formulas may not contain labelled boxes")
        self.gamma = gamma
        self.condition = condition if condition is not None else FrameCondition(name="IL")
        self.bounds = bounds or Bounds()
        self.stage = 0
        self._ids = itertools.count()
        self._seq = itertools.count()
        self._heap = []
        self.all_labels = {ROOT}
        self.label_counts = [1]
        self.last_visited = None
        state = _BranchState(set(), close({ROOT}, self.condition))
        self.root = None
        leaf = None
        for f in gamma:
            node = self._new_node(LabelledFormula(ROOT, f), leaf, leaf.path if leaf else ())
            if leaf is None:
                self.root = node
            else:
                leaf.children.append(node)
            self._record(state, node)
            leaf = node
        leaf.state = state
        self.leaves = [leaf]

    # -- construction helpers ---------------------------------------------

    def _new_node(self, item, parent, path) -> Node:
        node = Node(item, parent, self.stage, path, next(self._ids))
        heapq.heappush(self._heap, (node.depth, node.path, next(self._seq), node))
        return node

    def _record(self, state: _BranchState, node: Node):
        label, f = node.item
        if not state.closed and _contradicts(state.formulas, f, label):
            state.closed = True
            state.closed_at = self.stage
        state.formulas.add(node.item)

    def _append(self, leaf: Node, items) -> Node:
        state = leaf.state
        for item in items:
            if state.closed:
                break
            node = self._new_node(item, leaf, leaf.path)
            leaf.children.append(node)
            leaf.state = None
            node.state = state
            self._record(state, node)
            leaf = node
        return leaf

    def _split(self, leaf: Node, left, right) -> list[Node]:
        state = leaf.state
        leaf.state = None
        out = []
        states = (state, state.copy())
        for i, items in enumerate((left, right)):
            st = states[i]
            first = self._new_node(items[0], leaf, leaf.path + (i,))
            leaf.children.append(first)
            first.state = st
            self._record(st, first)
            out.append(self._append(first, items[1:]))
        return out

    def _wake(self, node: Node):
        node.mark = Mark.AWAKE
        heapq.heappush(self._heap, (node.depth, node.path, next(self._seq), node))

    # -- queries ----------------------------------------------------------

    def branch(self, leaf: Node) -> Branch:
        nodes = []
        node = leaf
        while node is not None:
            nodes.append(node)
            node = node.parent
        nodes.reverse()
        return Branch(nodes, leaf.state.structure)

    def open_leaves(self) -> list[Node]:
        return [leaf for leaf in self.leaves if not leaf.state.closed]

    @property
    def closed(self) -> bool:
        return all(leaf.state.closed for leaf in self.leaves)

    def has_awake(self) -> bool:
        while self._heap and self._heap[0][3].mark is not Mark.AWAKE:
            heapq.heappop(self._heap)
        return bool(self._heap)

    def saturated_leaf(self) -> Node | None:
        """Leftmost open leaf with no awake node on its branch."""
        for leaf in self.leaves:
            if leaf.state.closed:
                continue
            node = leaf
            while node is not None and node.mark is not Mark.AWAKE:
                node = node.parent
            if node is None:
                return leaf
        return None

    def nodes(self):
        """All nodes in preorder."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    # -- the stage procedure ----------------------------------------------

    def step(self) -> bool:
        """Run one stage; False if there was no awake node to visit."""
        if not self.has_awake():
            return False
        node = heapq.heappop(self._heap)[3]
        self.stage += 1
        self.last_visited = node
        sigma, f = node.item
        rule = rule_for(f)
        node.mark = Mark.ASLEEP if rule in NU_RULES else Mark.FINISHED
        if rule is not None:
            targets = [leaf for leaf in self.leaves
                       if not leaf.state.closed and _below(leaf, node)]
            grown = {}
            for leaf in targets:
                grown[leaf.nid] = self._expand(leaf, node, rule)
            if grown:
                leaves = []
                for leaf in self.leaves:
                    leaves.extend(grown.get(leaf.nid, (leaf,)))
                self.leaves = leaves
        self.label_counts.append(len(self.all_labels))
        return True

    def _expand(self, leaf: Node, node: Node, rule: RuleId) -> list[Node]:
        lf = node.item
        sigma, f = lf
        state = leaf.state
        present = state.formulas

        if rule is RuleId.IMP:
            left, right = _cached_succedents(rule, lf, None)
            if left[0] in present or right[0] in present:
                return [leaf]
            return self._split(leaf, left, right)
        if rule in (RuleId.NEG, RuleId.NEG_IMP):
            items = [x for x in _cached_succedents(rule, lf, None)[0] if x not in present]
            return [self._append(leaf, items)]
        if rule in (RuleId.NU_BOX, RuleId.NU_S):
            if rule is RuleId.NU_BOX:
                taus = state.structure.successors(sigma)
            else:
                taus = state.structure.s_successors(f.label, sigma)
            items = [_cached_succedents(rule, lf, t)[0][0] for t in taus]
            return [self._append(leaf, [x for x in items if x not in present])]
        if rule is RuleId.NU_RHD:
            current = [leaf]
            for tau in state.structure.successors(sigma):
                left, right = _cached_succedents(rule, lf, tau)
                nxt = []
                for cur in current:
                    st = cur.state
                    if st.closed or left[0] in st.formulas or right[0] in st.formulas:
                        nxt.append(cur)
                    else:
                        nxt.extend(self._split(cur, left, right))
                current = nxt
            return current
        # π-rules
        labels = state.structure.labels
        n = least_fresh_index(sigma, f, labels)
        try:
            new = fresh_label(sigma, f, n)
        except PrefixViolation as exc:
            raise _Unsupported(str(exc)) from None
        if len(labels) + 1 > self.bounds.max_labels_per_branch:
            raise _Exhausted(f"branch label budget of {self.bounds.max_labels_per_branch} reached")
        structure, delta = state.structure.add_label(new)
        state.structure = structure
        self.all_labels.add(new)
        end = self._append(leaf, _cached_succedents(rule, lf, new)[0])
        self._reawaken(end, delta)
        return [end]

    def _reawaken(self, leaf: Node, delta):
        r_sources = {a for a, _ in delta.r}
        s_sources = {(rho, a) for rho, a, _ in delta.s}
        if not r_sources and not s_sources:
            return
        node = leaf
        while node is not None:
            if node.mark is Mark.ASLEEP:
                tau, f = node.item
                if isinstance(f, (Box, Rhd)) and tau in r_sources:
                    self._wake(node)
                elif isinstance(f, BoxAt) and (f.label, tau) in s_sources:
                    self._wake(node)
            node = node.parent


def _below(leaf: Node, node: Node) -> bool:
    """Whether ``node`` lies on the branch ending in ``leaf``."""
    if leaf.depth < node.depth:
        return False
    k = len(node.path)
    return leaf.path[:k] == node.path


class Status(str, Enum):
    CLOSED = "closed"
    OPEN = "open"
    EXHAUSTED = "exhausted"
    UNSUPPORTED = "unsupported"


@dataclass
class ProverResult:
    status: Status
    tableau: Tableau
    stages: int
    branch: Branch | None = None
    model: object = None
    reason: str | None = None
    labels: int = field(default=0)


def init(gamma, condition: FrameCondition | None = None, bounds: Bounds | None = None) -> Tableau:
    return Tableau(gamma, condition, bounds)


def step(state: Tableau) -> Tableau:
    state.step()
    return state


def run(gamma, condition: FrameCondition | None = None, bounds: Bounds | None = None) -> ProverResult:
    from .semantics import CyclicR, extract_model

    tab = Tableau(gamma, condition, bounds)
    reason = None
    try:
        while True:
            if tab.closed:
                return ProverResult(Status.CLOSED, tab, tab.stage, labels=len(tab.all_labels))
            leaf = tab.saturated_leaf()
            if leaf is not None:
                branch = tab.branch(leaf)
                try:
                    model = extract_model(branch)
                except CyclicR:
                    return ProverResult(Status.UNSUPPORTED, tab, tab.stage, branch=branch,
                                        reason="open branch has a cyclic R relation",
                                        labels=len(branch.labels))
                return ProverResult(Status.OPEN, tab, tab.stage, branch=branch, model=model,
                                    labels=len(branch.labels))
            if tab.stage >= tab.bounds.max_stages:
                reason = f"stage budget of {tab.bounds.max_stages} reached"
                break
            tab.step()
    except _Exhausted as exc:
        reason = str(exc)
    except _Unsupported as exc:
        return ProverResult(Status.UNSUPPORTED, tab, tab.stage, reason=str(exc),
                            labels=len(tab.all_labels))
    return ProverResult(Status.EXHAUSTED, tab, tab.stage, reason=reason, labels=len(tab.all_labels))


def prove(a: Formula, condition: FrameCondition | None = None, bounds: Bounds | None = None) -> ProverResult:
    """Try to close the systematic tableau for ``{~a}``."""
    return run([Neg(a)], condition, bounds)


def satisfiable(gamma, condition: FrameCondition | None = None, bounds: Bounds | None = None) -> ProverResult:
    return run(list(gamma), condition, bounds)

