import itertools
import random

import pytest
from hypothesis import given, strategies as st

from gologsynth import logic as L
from gologsynth import oracle as O
from gologsynth.errors import SortError
from gologsynth.reasoner import (Reasoner, TheoryHandle, Universe, Verdict, bounded_positions,
                                 equivalent, parse_sexpr, sexpr_to_formula, to_sexpr,
                                 unbounded_quantifiers)

from generators import random_formula

x, y = L.Var("x"), L.Var("y")
a, b = L.Name("a"), L.Name("b")
P = lambda t: L.Atom("P", (t,))


def test_universe_padding():
    u = Universe(("b", "a"), 2)
    assert [o.text for o in u.objects] == ["a", "b", "_o1", "_o2"]
    assert len(u) == 4
    with pytest.raises(ValueError):
        Universe(("a",), -1)


def test_theory_rejects_open_formulas():
    with pytest.raises(SortError):
        TheoryHandle([P(x)], Universe(("a",)))


def test_three_valued_verdicts():
    r = Reasoner(TheoryHandle([P(a)], Universe(("a", "b"))))
    assert r.decide(L.Exists(x, P(x))) is Verdict.ENTAILED
    assert r.decide(L.Not(P(a))) is Verdict.REFUTED
    assert r.decide(P(b)) is Verdict.OPEN
    assert r.decide(P(b), [(P(b), True)]) is Verdict.ENTAILED
    assert Verdict.OPEN.as_bool() is None


def test_padding_object_is_anonymous():
    # the theory says nothing about unnamed objects, so "everything is named"
    # is open with one padding object and refuted by a count of 3
    r = Reasoner(TheoryHandle([], Universe(("a", "b"), 1)))
    claim = L.Forall(x, L.disj(L.Eq(x, a), L.Eq(x, b)))
    assert r.decide(claim) is Verdict.REFUTED
    assert r.decide(L.CountGeq(3, x, L.TOP)) is Verdict.ENTAILED


def test_inconsistent_base():
    r = Reasoner(TheoryHandle([P(a), L.Not(P(a))], Universe(("a",))))
    assert not r.base_consistent


@given(st.integers(0, 10**9))
def test_entailment_matches_model_enumeration(seed):
    rng = random.Random(seed)
    fl = {"P": 1, "Q": 2}
    u = Universe(("a", "b"), 1)
    th = [random_formula(rng, fl, [a, b], depth=2)]
    phi = random_formula(rng, fl, [a, b], depth=3)
    models = O.enumerate_models(th, fl, u.objects, max_atoms=20)
    r = Reasoner(TheoryHandle(th, u))
    truths = {O.evaluate(phi, m, u.objects) for m in models}
    expect = (Verdict.ENTAILED if truths == {True} else Verdict.REFUTED if truths == {False}
              else Verdict.OPEN)
    if not models:
        assert not r.base_consistent
    else:
        assert r.decide(phi) is expect


def test_equivalent_on_open_formulas():
    u = Universe(("a",), 1)
    assert equivalent(L.Not(L.And(P(x), P(a))), L.Or(L.Not(P(x)), L.Not(P(a))), u)
    assert not equivalent(P(x), P(a), u)


def test_bounded_positions():
    th = [L.Forall(x, L.implies(P(x), L.disj(L.Eq(x, a), L.Eq(x, b))))]
    r = Reasoner(TheoryHandle(th, Universe(("a", "b"))))
    assert bounded_positions(r, {"P": 1, "Q": 1}) == {("P", 0)}


def test_unbounded_quantifier_lint():
    bounded = {("P", 0)}
    Q = lambda t: L.Atom("Q", (t,))
    assert unbounded_quantifiers(L.Exists(x, P(x)), bounded) == []
    assert unbounded_quantifiers(L.Exists(x, Q(x)), bounded) == [L.Exists(x, Q(x))]
    # equality between two variables ties a padding object to another one
    f = L.Forall(x, L.Exists(y, L.And(P(y), L.Eq(x, y))))
    assert unbounded_quantifiers(f, bounded)
    assert unbounded_quantifiers(L.CountGeq(1, x, L.And(P(x), Q(x))), bounded) == []
    assert unbounded_quantifiers(L.CountLeq(1, x, P(x)), bounded)


def test_sexpr_round_trip():
    f = L.Forall(x, L.implies(P(x), L.CountGeq(2, y, L.Atom("Q", (x, y)))))
    assert sexpr_to_formula(parse_sexpr(to_sexpr(f))) is f
