import random

import pytest
from hypothesis import given, strategies as st

from gologsynth import logic as L
from gologsynth import ltlf as T
from gologsynth import oracle as O
from gologsynth import program as P
from gologsynth.corpus import generate as corpus
from gologsynth.errors import CyclicTheoryError, NotSituationDeterminedError, ParseError
from gologsynth.frontend import desugar as D
from gologsynth.frontend import printer as PR
from gologsynth.frontend import syntax as S

import generators as G

HEAD = """golog-synth v1
objects: a, b
fluents: pa/1, qb/2, s/0
actions: go/1, e/0
environment actions: e
"""


def mini(initial=(), program="@go(a)", spec="true", ssas="", extra=""):
    txt = HEAD + extra
    if initial:
        txt += "initial:\n" + "".join(f"  - {f}\n" for f in initial)
    txt += "preconditions:\n  poss go(x): !pa(x)\n"
    txt += "successor state axioms:\n  ssa pa(x):\n    + go(x) when s\n    - e\n" + ssas
    txt += f"program:\n  {program}\nspecification:\n  {spec}\n"
    return txt


def test_minimal_file():
    pf = S.parse(mini(), "mini")
    assert pf.objects == ("a", "b")
    assert dict(pf.fluents) == {"pa": 1, "qb": 2, "s": 0}
    assert pf.environment == ("e",)
    prob, warnings = D.desugar(pf)
    assert prob.env_functions == {"e"}
    assert warnings == []


def test_precondition_becomes_test():
    prob, _ = D.desugar(S.parse(mini(program="@go(a); go(b)")))
    assert P.pfmt(P.canonical_program(prob.program)) == "test(!pa(a)); go(a); go(b)"


@pytest.mark.parametrize("text, msg", [
    ("objects: a\n", "header"),
    (HEAD.replace("fluents: pa/1", "fluents: F/1"), "reserved word"),
    (HEAD.replace("objects: a, b", "objects: a, _b"), "underscore"),
])
def test_header_and_lexical_errors(text, msg):
    with pytest.raises(ParseError) as e:
        S.parse(text + "program:\n  nil\nspecification:\n  true\n")
    assert msg in str(e.value)


def test_error_positions():
    with pytest.raises(ParseError) as e:
        S.parse(mini(program="@go(a) ;; go(b)"), "f.gl")
    assert e.value.line is not None and str(e.value).startswith("f.gl:")


def test_three_variables_rejected():
    with pytest.raises(ParseError, match="variable"):
        S.parse(mini(initial=["forall x. forall y. forall z. qb(x, y) | qb(y, z)"]))


def test_variable_may_not_shadow_object():
    with pytest.raises(ParseError):
        S.parse(mini(initial=["forall a. pa(a)"]))


def test_undeclared_symbols():
    with pytest.raises(ParseError):
        S.parse(mini(program="jump(a)"))
    with pytest.raises(ParseError):
        S.parse(mini(initial=["zz(a)"]))


def test_pick_uses_colon():
    pf = S.parse(mini(program="pick x : {a, b}. @go(x)"))
    prob, _ = D.desugar(pf)
    assert len(P.characteristic_graph(prob.program).edges) == 2


def test_cyclic_theory():
    txt = mini(ssas="  ssa s:\n    + e : pa(a)\n").replace("+ go(x) when s", "+ go(x) : s")
    with pytest.raises(CyclicTheoryError):
        D.desugar(S.parse(txt))


def test_not_situation_determined():
    with pytest.raises(NotSituationDeterminedError):
        D.desugar(S.parse(mini(program="{go(a); go(a)} | {go(a); e}")))


def test_unbounded_quantifier_warning():
    pf = S.parse(mini(spec="F exists x. s & qb(x, x)"))
    _, warnings = D.desugar(pf)
    assert any("qb" in w for w in warnings)


@pytest.mark.parametrize("name", corpus.names())
def test_corpus_round_trip(name):
    pf = S.parse_file(corpus.path(name))
    again = S.parse(PR.print_problem(pf))
    assert again == pf
    assert PR.print_problem(again) == PR.print_problem(pf)


def test_corpus_files_are_current():
    for name, text in corpus.corpus().items():
        assert corpus.path(name).read_text() == text


def test_warning_profile_of_domains():
    _, w = D.desugar(S.parse_file(corpus.path("dishwasher_r1_d1.gl")))
    assert w == []
    _, w = D.desugar(S.parse_file(corpus.path("warehouse_b1.gl")))
    assert w


FL = {"pa": 1, "qb": 2, "s": 0}
NAMES = [L.Name("a"), L.Name("b")]


@given(st.integers(0, 10**9))
def test_formula_print_parse_round_trip(seed):
    f = G.random_formula(random.Random(seed), FL, NAMES, depth=4)
    pf = S.parse(mini(initial=[L.fmt(f)]))
    [g] = pf.initial
    assert L.fmt(g) == L.fmt(f)
    assert L.canonicalize(g) is L.canonicalize(f)


@given(st.integers(0, 10**9))
def test_temporal_print_parse_round_trip(seed):
    rng = random.Random(seed)
    atoms = [L.Atom("s"), L.Atom("pa", (NAMES[0],)), L.Exists(L.Var("x"), L.Atom("qb", (L.Var("x"), NAMES[1])))]
    f = G.random_ltlf(rng, atoms, 3)
    text = PR.fmt_temporal(f)
    g = S.parse(mini(spec=text)).spec
    assert PR.fmt_temporal(g) == text
    # same meaning on every short trace of a two-action world
    prob, _ = D.desugar(S.parse(mini(spec=text)))
    w = O.WorldModel(prob.bat, {L.Atom("s")})
    acts = [L.ActionTerm("go", (NAMES[0],)), L.ActionTerm("e")]
    for tr in G.traces(acts, 3):
        assert T.eval_trace(w, (), tr, f) == T.eval_trace(w, (), tr, g)
