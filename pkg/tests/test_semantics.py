import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iltableau.formula import BOT, Box, BoxAt, Imp, Neg, Rhd, Var, dia, parse
from iltableau.frames import parse_horn, preset
from iltableau.generate import random_formula
from iltableau.labels import ROOT, extend_r
from iltableau.semantics import (
    CyclicR, EvaluationError, HintikkaViolation, Model, check_frame, check_model, evaluate,
    extract_model, is_valid_in, model_from_json, model_to_json, random_model, read_model,
    verify_hintikka, write_model,
)
from iltableau.tableau import Branch, Status, prove, run

IL, ILM, ILP = preset("IL"), preset("ILM"), preset("ILP")
p, q, r = Var("p"), Var("q"), Var("r")
R0 = extend_r(ROOT, 0)

AXIOMS = {
    "L1": "[](p -> q) -> ([]p -> []q)",
    "L2": "[]([]p -> p) -> []p",
    "J1": "[](p -> q) -> p |> q",
    "J2": "(p |> q) & (q |> r) -> p |> r",
    "J3": "(p |> r) & (q |> r) -> p | q |> r",
    "J4": "p |> q -> (<>p -> <>q)",
    "J5": "<>p |> p",
    "Lemma-1": "<>p -> <>(p & []~p)",
    "Lemma-2": "q |> q & []~q",
}


def _two_worlds(q_at_y=False):
    V = {"p": {"y"}, "q": {"y"} if q_at_y else set()}
    return Model(["x", "y"], {("x", "y")}, {("x", "y", "y")}, V)


def test_one_world_vacuous():
    m = Model(["w"], set(), set(), {})
    assert evaluate(m, "w", Box(BOT))
    assert evaluate(m, "w", Rhd(p, q))


def test_two_world_rhd():
    m = _two_worlds()
    assert evaluate(m, "x", Rhd(p, p))
    assert evaluate(m, "x", dia(p))
    assert not evaluate(m, "x", Rhd(p, q))
    assert evaluate(_two_worlds(q_at_y=True), "x", Rhd(p, q))


def test_labelled_box():
    m = _two_worlds()
    assert evaluate(m, "y", BoxAt(ROOT, p), interp={ROOT: "x"})
    assert not evaluate(m, "y", BoxAt(ROOT, q), interp={ROOT: "x"})
    with pytest.raises(EvaluationError):
        evaluate(m, "y", BoxAt(ROOT, p))
    with pytest.raises(EvaluationError):
        evaluate(m, "nowhere", p)


def _random_il_models(count, seed=0):
    rng = random.Random(seed)
    for i in range(count):
        yield random_model(rng.randint(1, 6), IL, seed=seed * 100_000 + i)


def test_random_model_single_world():
    m = random_model(1, IL, seed=3)
    assert m.worlds == ("w0",) and not m.R and not m.S


def test_random_model_ilp_example():
    m = random_model(4, ILP, seed=7)
    assert check_model(m) == []
    assert check_frame(m, ILP) == (True, None)


def test_random_models_satisfy_invariants():
    for m in _random_il_models(1000):
        assert check_model(m) == []
    rng = random.Random(1)
    for i in range(200):
        for cond in (ILM, ILP):
            m = random_model(rng.randint(1, 6), cond, seed=i)
            assert check_model(m) == []
            assert check_frame(m, cond)[0]


def test_random_model_is_deterministic():
    assert random_model(5, ILP, seed=11) == random_model(5, ILP, seed=11)


def test_random_model_bounds():
    with pytest.raises(ValueError):
        random_model(9, IL, seed=0)


def test_check_frame_il_is_trivial():
    for m in _random_il_models(20):
        assert check_frame(m, IL) == (True, None)


def _chain(extra_s=()):
    R = {("x", "y"), ("y", "z"), ("x", "z")}
    S = {("x", "y", "y"), ("x", "z", "z"), ("x", "y", "z"), ("y", "z", "z")} | set(extra_s)
    return Model(["x", "y", "z", "u"], R, S, {})


def test_check_frame_ilp_chain():
    assert check_frame(_chain(), ILP) == (True, None)


def test_check_frame_ilp_violation_witness():
    m = Model(["x", "y", "z", "u"],
              {("x", "y"), ("y", "z"), ("x", "z"), ("x", "u")},
              {("x", "y", "y"), ("x", "z", "z"), ("x", "y", "z"), ("y", "z", "z"),
               ("x", "u", "u"), ("x", "z", "u")},
              {})
    ok, why = check_frame(m, ILP)
    assert not ok
    assert why.assignment == {"x": "x", "y": "y", "z": "z", "u": "u"}


def test_check_model_reports_problems():
    bad = Model(["a", "b"], {("a", "b"), ("b", "a")}, set(), {})
    problems = check_model(bad)
    assert any("cycle" in s for s in problems)
    assert any("reflexive" in s for s in problems)


@pytest.mark.parametrize("name", list(AXIOMS))
def test_axioms_hold_on_random_il_models(name):
    f = parse(AXIOMS[name])
    for m in _random_il_models(150, seed=len(name)):
        assert is_valid_in(m, f)


def test_m_and_p_hold_on_their_frames():
    m_ax = parse("p |> q -> p & []r |> q & []r")
    p_ax = parse("p |> q -> [](p |> q)")
    for i in range(150):
        assert is_valid_in(random_model(1 + i % 6, ILM, seed=i), m_ax)
        assert is_valid_in(random_model(1 + i % 6, ILP, seed=i), p_ax)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_diamond_is_dual_of_box(seed):
    rng = random.Random(seed)
    m = random_model(rng.randint(1, 5), IL, seed=seed)
    a = random_formula(rng, 3)
    for w in m.worlds:
        assert evaluate(m, w, dia(a)) == (not evaluate(m, w, Box(Neg(a))))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_rhd_translation(seed):
    rng = random.Random(seed)
    m = random_model(rng.randint(1, 6), IL, seed=seed)
    a, b = random_formula(rng, 3), random_formula(rng, 3)
    for x in m.worlds:
        via_box = Box(Imp(a, Neg(BoxAt(ROOT, Neg(b)))))
        assert evaluate(m, x, Rhd(a, b)) == evaluate(m, x, via_box, interp={ROOT: x})


# -- branches -----------------------------------------------------------------

def test_hintikka_examples():
    assert verify_hintikka(Branch.from_formulas([(ROOT, p)])) == (True, None)
    ok, why = verify_hintikka(Branch.from_formulas([(ROOT, p), (ROOT, Neg(p))]))
    assert not ok and why.startswith("(i)")
    ok, why = verify_hintikka(Branch.from_formulas([(ROOT, Box(p)), (R0, q)]))
    assert not ok and why.startswith("(vii)")
    ok, why = verify_hintikka(Branch.from_formulas([(ROOT, Neg(Box(p)))]))
    assert not ok and why.startswith("(viii)")


def test_extract_single_world():
    m = extract_model(Branch.from_formulas([(ROOT, p)]))
    assert m.worlds == (ROOT,)
    assert m.V == {"p": {ROOT}}


def test_extract_refuses_non_hintikka():
    with pytest.raises(HintikkaViolation):
        extract_model(Branch.from_formulas([(ROOT, Neg(Neg(p)))]))


def test_extract_refuses_cyclic_structure():
    sym = parse_horn("R(x,y) -> R(y,x)")
    with pytest.raises(CyclicR):
        extract_model(Branch.from_formulas([(ROOT, p), (R0, q)], sym))


def test_extract_from_diamond_run():
    res = run([dia(p)], IL)
    assert res.status is Status.OPEN
    m = res.model
    assert m.worlds == (ROOT, R0)
    assert m.R == {(ROOT, R0)}
    assert m.V["p"] == {R0}


def test_countermodel_for_m_under_il():
    m_ax = parse("p |> q -> p & []r |> q & []r")
    res = prove(m_ax, IL)
    assert res.status is Status.OPEN
    assert verify_hintikka(res.branch) == (True, None)
    assert check_model(res.model) == []
    assert not evaluate(res.model, ROOT, m_ax)
    assert not check_frame(res.model, ILM)[0]


@pytest.mark.parametrize("seed", range(3))
def test_truth_lemma_on_small_corpus(seed):
    rng = random.Random(seed)
    for _ in range(30):
        f = random_formula(rng, 3)
        res = prove(f, IL)
        if res.status is Status.OPEN:
            assert verify_hintikka(res.branch)[0]
            for lab, g in res.branch.formulas:
                assert evaluate(res.model, lab, g)
            assert not evaluate(res.model, ROOT, f)


# -- formats ------------------------------------------------------------------

def test_model_text_round_trip():
    for i, m in enumerate(_random_il_models(50, seed=9)):
        text = write_model(m)
        assert read_model(text) == m
        assert write_model(read_model(text)) == text


def test_label_worlds_round_trip():
    res = prove(parse("p |> q -> p & []r |> q & []r"), IL)
    text = write_model(res.model)
    assert "0R0S_{0} 0" in text
    assert read_model(text) == res.model
    assert model_from_json(json.dumps(model_to_json(res.model))) == res.model


def test_model_text_format():
    m = _two_worlds()
    assert write_model(m) == "worlds: x y\nR: x y\nS: x; y y\nV p: y\nV q:\n"


@pytest.mark.parametrize("text", ["R: a b\n", "worlds: a\nR: a\n", "worlds: a\nT: a\n", "worlds a\n"])
def test_model_text_errors(text):
    with pytest.raises(ValueError):
        read_model(text)
