import random

import pytest

from iltableau.formula import Box, BoxAt, Imp, Neg, Rhd, Var, parse
from iltableau.frames import parse_horn, preset
from iltableau.generate import random_formula
from iltableau.labels import ROOT, extend_r, extend_s
from iltableau.tableau import (
    Bounds, Branch, FreshLabelCollision, LabelledFormula, Mark, NoEligibleWitness, RuleId,
    ShapeMismatch, Status, apply_rule, init, prove, run, satisfiable, witnesses,
)

IL = preset("IL")
p, q = Var("p"), Var("q")
A = LabelledFormula
R0 = extend_r(ROOT, 0)


# -- init -------------------------------------------------------------------

def test_init_single():
    tab = init([p])
    assert [n.item for n in tab.nodes()] == [A(ROOT, p)]
    assert tab.root.mark is Mark.AWAKE
    assert tab.leaves[0].state.structure.labels == {ROOT}


def test_init_contradiction_closes_immediately():
    tab = init([p, Neg(p)])
    assert [n.item for n in tab.nodes()] == [A(ROOT, p), A(ROOT, Neg(p))]
    assert tab.closed


def test_init_keeps_input_order_and_drops_duplicates():
    tab = init([Neg(Rhd(p, q)), p, Neg(Rhd(p, q))])
    assert [n.item.formula for n in tab.nodes()] == [Neg(Rhd(p, q)), p]


def test_init_rejects_bad_input():
    with pytest.raises(ValueError):
        init([])
    with pytest.raises(ValueError):
        init([BoxAt(ROOT, p)])


# -- apply_rule ---------------------------------------------------------------

def test_pi_rhd_example():
    br = Branch.from_formulas([(ROOT, Neg(Rhd(p, q)))])
    app = apply_rule(br, 0, RuleId.PI_RHD, n=0)
    assert app.fresh == R0
    assert app.forks == [[A(R0, p), A(R0, BoxAt(ROOT, Neg(q))), A(R0, Box(Neg(p)))]]


def test_nu_rhd_example():
    br = Branch.from_formulas([(ROOT, Rhd(p, q)), (R0, p)])
    app = apply_rule(br, 0, RuleId.NU_RHD, tau=R0)
    assert app.forks == [[A(R0, Neg(p))], [A(R0, Neg(BoxAt(ROOT, Neg(q))))]]


def test_pi_s_example():
    br = Branch.from_formulas([(ROOT, p), (R0, Neg(BoxAt(ROOT, Neg(q))))])
    app = apply_rule(br, 1, RuleId.PI_S, n=0)
    new = extend_s(R0, ROOT, 0)
    assert str(new) == "0R0S_{0} 0"
    assert app.forks == [[A(new, Neg(Neg(q))), A(new, Box(Neg(q)))]]


def test_rule_errors():
    br = Branch.from_formulas([(ROOT, Box(p)), (R0, Neg(Box(q)))])
    with pytest.raises(ShapeMismatch):
        apply_rule(br, 0, RuleId.PI_BOX)
    with pytest.raises(NoEligibleWitness):
        apply_rule(br, 0, RuleId.NU_BOX, tau=ROOT)
    with pytest.raises(FreshLabelCollision):
        apply_rule(Branch.from_formulas([(ROOT, Neg(Box(q))), (R0, p)]), 0, RuleId.PI_BOX, n=0)
    assert apply_rule(br, 0, RuleId.NU_BOX, tau=R0).forks == [[A(R0, p)]]


def test_default_fresh_index_is_least_unused():
    br = Branch.from_formulas([(ROOT, Neg(Box(q))), (R0, p), (extend_r(ROOT, 1), p)])
    assert apply_rule(br, 0, RuleId.PI_BOX).fresh == extend_r(ROOT, 2)


def _template(rule, sigma, f, other):
    """The rule tables written out directly."""
    if rule == "neg":
        return [[(sigma, f.sub.sub)]]
    if rule == "imp":
        return [[(sigma, Neg(f.left))], [(sigma, f.right)]]
    if rule == "neg_imp":
        return [[(sigma, f.sub.left), (sigma, Neg(f.sub.right))]]
    if rule in ("nu_box", "nu_s"):
        return [[(other, f.sub)]]
    if rule == "nu_rhd":
        return [[(other, Neg(f.left))], [(other, Neg(BoxAt(sigma, Neg(f.right))))]]
    if rule in ("pi_box", "pi_s"):
        return [[(other, Neg(f.sub.sub)), (other, Box(f.sub.sub))]]
    return [[(other, f.sub.left), (other, BoxAt(sigma, Neg(f.sub.right))),
             (other, Box(Neg(f.sub.left)))]]


_SHAPES = {
    "neg": lambda a, b: Neg(Neg(a)),
    "imp": Imp,
    "neg_imp": lambda a, b: Neg(Imp(a, b)),
    "nu_box": lambda a, b: Box(a),
    "nu_s": lambda a, b: BoxAt(ROOT, a),
    "nu_rhd": Rhd,
    "pi_box": lambda a, b: Neg(Box(a)),
    "pi_s": lambda a, b: Neg(BoxAt(ROOT, a)),
    "pi_rhd": lambda a, b: Neg(Rhd(a, b)),
}


@pytest.mark.parametrize("rule", list(_SHAPES))
def test_rule_shape_fidelity(rule):
    rng = random.Random(rule)
    for _ in range(50):
        f = _SHAPES[rule](random_formula(rng, 3), random_formula(rng, 3))
        # S-rules need a base strictly below the labelled formula's label
        sigma = R0 if rule in ("nu_s", "pi_s") else ROOT
        br = Branch.from_formulas([(ROOT, p), (sigma, f), (R0, q)])
        if rule.startswith("nu"):
            for tau in witnesses(br, 1):
                got = apply_rule(br, 1, rule, tau=tau).forks
                assert got == _template(rule, sigma, f, tau)
        elif rule.startswith("pi"):
            app = apply_rule(br, 1, rule)
            assert app.fresh not in br.labels
            assert app.forks == _template(rule, sigma, f, app.fresh)
        else:
            assert apply_rule(br, 1, rule).forks == _template(rule, sigma, f, None)


# -- stages -------------------------------------------------------------------

def test_literal_is_finished():
    tab = init([p])
    tab.step()
    assert [n.item for n in tab.nodes()] == [A(ROOT, p)]
    assert tab.root.mark is Mark.FINISHED
    assert not tab.has_awake()


def test_negated_box_creates_world():
    tab = init([Neg(Box(p))])
    tab.step()
    items = [n.item for n in tab.nodes()]
    assert items == [A(ROOT, Neg(Box(p))), A(R0, Neg(p)), A(R0, Box(p))]
    assert tab.root.mark is Mark.FINISHED
    assert all(n.mark is Mark.AWAKE for n in list(tab.nodes())[1:])


def test_box_is_reawakened_by_new_world():
    tab = init([Box(q), Neg(Box(p))])
    box = tab.root
    tab.step()
    assert box.mark is Mark.ASLEEP
    assert len(list(tab.nodes())) == 2
    tab.step()   # the negated box creates 0R0 and wakes the box
    assert box.mark is Mark.AWAKE
    tab.step()
    assert A(R0, q) in [n.item for n in tab.nodes()]
    assert box.mark is Mark.ASLEEP


def _snapshot(tab):
    return {n.nid: (n.item, n.parent.nid if n.parent else None) for n in tab.nodes()}


_ALLOWED = {
    (Mark.AWAKE, Mark.AWAKE), (Mark.AWAKE, Mark.ASLEEP), (Mark.AWAKE, Mark.FINISHED),
    (Mark.ASLEEP, Mark.ASLEEP), (Mark.ASLEEP, Mark.AWAKE), (Mark.FINISHED, Mark.FINISHED),
}


@pytest.mark.parametrize("text", [
    "~(p |> q -> p & []r |> q & []r)",
    "~([](p -> q) -> p |> q)",
    "<>p & (p |> q) & (q |> p)",
    "~(p |> q -> (<>p -> <>q))",
])
def test_stage_invariants(text):
    tab = init([parse(text)], IL, Bounds(max_stages=150))
    before = _snapshot(tab)
    marks = {n.nid: n.mark for n in tab.nodes()}
    closed_leaves = set()
    for _ in range(150):
        labels_before = {leaf.nid: leaf.state.structure.labels for leaf in tab.leaves}
        awake = [n for n in tab.nodes() if n.mark is Mark.AWAKE]
        if not tab.step():
            break
        after = _snapshot(tab)
        # T_n is a prefix of T_{n+1}
        assert all(after[nid] == v for nid, v in before.items())
        visited = []
        for node in tab.nodes():
            old = marks.get(node.nid, Mark.AWAKE)
            assert (old, node.mark) in _ALLOWED
            if old is Mark.AWAKE and node.mark is not Mark.AWAKE and node.nid in before:
                visited.append(node)
            marks[node.nid] = node.mark
        # the visited node is the awake one closest to the root, leftmost on ties
        assert len(visited) == 1
        assert (visited[0].depth, visited[0].path) == min((n.depth, n.path) for n in awake)
        # nothing grows below a branch once it is closed
        for nid in closed_leaves:
            assert after[nid] and not [c for c, (_, par) in after.items() if par == nid]
        for leaf in tab.leaves:
            if leaf.state.closed:
                closed_leaves.add(leaf.nid)
        # fresh labels were not on the branch before the stage
        for leaf in tab.leaves:
            node, prev = leaf, None
            while node is not None and node.nid not in labels_before:
                node = node.parent
            if node is not None:
                prev = labels_before[node.nid]
                new = leaf.state.structure.labels - prev
                assert len(new) <= 1
                branch_labels = {n.item.label for n in tab.branch(leaf).nodes}
                assert branch_labels == leaf.state.structure.labels
        before = after


def test_frozen_branch_record():
    res = prove(parse("[](p -> q) -> ([]p -> []q)"), IL)
    for leaf in res.tableau.leaves:
        assert leaf.state.closed
        assert leaf.state.closed_at is not None


# -- run ----------------------------------------------------------------------

def test_run_closes_j5():
    res = run([Neg(parse("<>p |> p"))], IL)
    assert res.status is Status.CLOSED


def test_run_open_single_world():
    res = run([p], IL)
    assert res.status is Status.OPEN
    assert res.model.worlds == (ROOT,)
    assert res.model.V["p"] == {ROOT}


def test_run_sentinel_is_exhausted():
    res = satisfiable([parse("<>p"), parse("p |> q"), parse("q |> p")], IL, Bounds(max_stages=200))
    assert res.status is Status.EXHAUSTED
    assert res.stages == 200
    counts = res.tableau.label_counts
    assert counts[0] < counts[50] < counts[100] < counts[200]


def test_label_budget_trips():
    res = satisfiable([parse("<>p"), parse("p |> q"), parse("q |> p")], IL,
                      Bounds(max_stages=10_000, max_labels_per_branch=6))
    assert res.status is Status.EXHAUSTED
    assert "label budget" in res.reason


def test_cyclic_condition_closes_boxed_worlds():
    # every fresh world carries some []A and ~A, so an R-loop through it is contradictory
    sym = parse_horn("R(x,y) -> R(y,x)", name="sym")
    assert satisfiable([parse("<>p")], sym).status is Status.CLOSED
    assert satisfiable([parse("<>p")], IL).status is Status.OPEN


def test_open_branch_is_leftmost_saturated():
    res = prove(parse("p | q"), IL)
    assert res.status is Status.OPEN
    assert res.branch.structure.labels == {ROOT}
    assert res.tableau.saturated_leaf() is res.branch.nodes[-1]


def test_runs_are_deterministic():
    f = parse("p |> q -> p & []r |> q & []r")
    a, b = prove(f, IL), prove(f, IL)
    assert a.stages == b.stages
    assert [n.item for n in a.tableau.nodes()] == [n.item for n in b.tableau.nodes()]


@pytest.mark.parametrize("logic, closed", [("IL", False), ("ILM", True), ("ILP", False)])
def test_m_verdicts(logic, closed):
    res = prove(parse("p |> q -> p & []r |> q & []r"), preset(logic))
    assert (res.status is Status.CLOSED) == closed
    assert res.status in (Status.CLOSED, Status.OPEN)


@pytest.mark.parametrize("logic, closed", [("IL", False), ("ILM", False), ("ILP", True)])
def test_p_verdicts(logic, closed):
    res = prove(parse("p |> q -> [](p |> q)"), preset(logic))
    assert (res.status is Status.CLOSED) == closed
    assert res.status in (Status.CLOSED, Status.OPEN)
