import itertools
import random

import pytest
from hypothesis import given, strategies as st

from gologsynth import logic as L
from gologsynth import oracle as O
from gologsynth.errors import C2Error, SortError

from generators import random_formula

x, y, z = L.Var("x"), L.Var("y"), L.Var("z")
a, b = L.Name("a"), L.Name("b")
FLUENTS = {"P": 1, "Q": 2, "s": 0}
NAMES = [a, b]
OBJECTS = (a, b, L.Name("_o1"))
ATOMS = O.ground_atoms(FLUENTS, OBJECTS)


def equivalent_by_models(f, g, free=()):
    """Independent check: truth in every valuation over a 3-object domain."""
    for bits in itertools.product((False, True), repeat=len(ATOMS)):
        val = frozenset(t for t, on in zip(ATOMS, bits) if on)
        for env in itertools.product(OBJECTS, repeat=len(free)):
            e = dict(zip(free, env))
            if O.evaluate(f, val, OBJECTS, e) != O.evaluate(g, val, OBJECTS, e):
                return False
    return True


def test_hash_consing_gives_identity():
    assert L.Atom("P", (x,)) is L.Atom("P", (x,))
    assert L.And(L.Atom("s"), L.TOP) is L.And(L.Atom("s"), L.TOP)
    assert L.Name("a") is a


def test_sort_errors():
    with pytest.raises(SortError):
        L.Atom("P", (L.ActionTerm("go"),))
    with pytest.raises(SortError):
        L.ActionTerm("go", (x,))
    with pytest.raises(SortError):
        L.Forall(a, L.TOP)


def test_builders_fold_units():
    s = L.Atom("s")
    assert L.conj(s, L.TOP) is s
    assert L.conj(s, L.BOT) is L.BOT
    assert L.disj() is L.BOT
    assert L.neg(L.neg(s)) is s


def test_free_vars_and_sentences():
    f = L.Forall(x, L.Atom("Q", (x, y)))
    assert L.free_vars(f) == {y}
    assert not L.is_sentence(f)
    assert L.is_sentence(L.Exists(y, f))


def test_c2_check():
    ok = L.Forall(x, L.Exists(y, L.Forall(x, L.Atom("Q", (x, y)))))
    assert L.check_c2(ok)
    with pytest.raises(C2Error):
        L.check_c2(L.Forall(x, L.Forall(y, L.Forall(z, L.Atom("Q", (x, y))))))
    with pytest.raises(C2Error):
        L.check_c2(L.Atom("R", (a, a, a)))


def test_substitution_respects_binding():
    f = L.And(L.Atom("P", (x,)), L.Exists(x, L.Atom("Q", (x, y))))
    g = L.subst(f, {x: a, y: b})
    assert g is L.And(L.Atom("P", (a,)), L.Exists(x, L.Atom("Q", (x, b))))


def test_counting_semantics():
    val = frozenset({L.Atom("P", (a,)), L.Atom("P", (b,))})
    assert O.evaluate(L.CountGeq(2, x, L.Atom("P", (x,))), val, OBJECTS)
    assert not O.evaluate(L.CountGeq(3, x, L.Atom("P", (x,))), val, OBJECTS)
    assert O.evaluate(L.CountLeq(2, x, L.Atom("P", (x,))), val, OBJECTS)
    assert not O.evaluate(L.CountLeq(1, x, L.Atom("P", (x,))), val, OBJECTS)


def test_nnf_dualises_counting():
    f = L.Not(L.CountGeq(2, x, L.Atom("P", (x,))))
    assert L.to_nnf(f) is L.CountLeq(1, x, L.Atom("P", (x,)))
    g = L.Not(L.CountLeq(1, x, L.Atom("P", (x,))))
    assert L.to_nnf(g) is L.CountGeq(2, x, L.Atom("P", (x,)))


def test_canonicalize_unique_names_and_one_point():
    assert L.canonicalize(L.Eq(a, b)) is L.BOT
    assert L.canonicalize(L.Eq(a, a)) is L.TOP
    f = L.Exists(x, L.And(L.Eq(x, a), L.Atom("P", (x,))))
    assert L.canonicalize(f) is L.Atom("P", (a,))


def test_canonicalize_complementary_literals():
    s = L.Atom("s")
    assert L.canonicalize(L.And(s, L.Not(s))) is L.BOT
    assert L.canonicalize(L.Or(s, L.Not(s))) is L.TOP


def test_fmt_is_stable_and_readable():
    f = L.Forall(x, L.implies(L.Atom("P", (x,)), L.Exists(y, L.Atom("Q", (x, y)))))
    assert L.fmt(f) == "forall x. !P(x) | (exists y. Q(x, y))"


@given(st.integers(0, 10**9))
def test_canonicalize_idempotent(seed):
    f = random_formula(random.Random(seed), FLUENTS, NAMES, depth=4)
    c = L.canonicalize(f)
    assert L.canonicalize(c) is c


@given(st.integers(0, 10**9))
def test_canonicalize_preserves_truth(seed):
    rng = random.Random(seed)
    free = (x,) if rng.random() < 0.4 else ()
    f = random_formula(rng, FLUENTS, NAMES, free, depth=3)
    assert equivalent_by_models(f, L.canonicalize(f), free)


@given(st.integers(0, 10**9))
def test_nnf_preserves_truth(seed):
    f = random_formula(random.Random(seed), FLUENTS, NAMES, depth=3)
    assert equivalent_by_models(f, L.to_nnf(f))
