import random

import pytest
from hypothesis import given, strategies as st

from gologsynth import logic as L
from gologsynth import ltlf as T
from gologsynth.errors import NotNNFError

import generators as G

BAT = G.small_bat()
WORLDS = G.fixed_worlds(BAT, 4)
p, q = T.TFluent(G.p), T.TFluent(G.q)
a, b, c = G.ACTIONS


def reference(w, z, zp, f):
    """Truth straight from the finite-trace definitions (quantifying over
    positions), without the backward recurrence used by eval_trace."""
    full = tuple(z) + tuple(zp)
    s, m = len(z), len(zp)

    def at(g, k):
        if isinstance(g, T.TFluent):
            return w.holds(g.phi, full[:s + k])
        if g is T.TAIL:
            return k == m
        if g is T.TRUE:
            return True
        if g is T.FALSE:
            return False
        if isinstance(g, T.TNot):
            return not at(g.body, k)
        if isinstance(g, T.TAnd):
            return all(at(h, k) for h in g.children)
        if isinstance(g, T.TOr):
            return any(at(h, k) for h in g.children)
        if isinstance(g, T.Next):
            return k < m and at(g.body, k + 1)
        if isinstance(g, T.WeakNext):
            return k == m or at(g.body, k + 1)
        if isinstance(g, T.Until):
            return any(at(g.right, j) and all(at(g.left, i) for i in range(k, j))
                       for j in range(k, m + 1))
        if isinstance(g, T.Release):
            return all(at(g.right, j) or any(at(g.left, i) for i in range(k, j))
                       for j in range(k, m + 1))
        raise TypeError(g)

    return at(f, 0)


@given(st.integers(0, 10**9))
def test_eval_trace_matches_definitions(seed):
    rng = random.Random(seed)
    f = G.random_ltlf(rng, rng.sample(G.SENTENCES, 3), 3)
    for w in WORLDS:
        for tr in G.traces(G.ACTIONS, 3):
            k = rng.randint(0, len(tr))
            assert T.eval_trace(w, tr[:k], tr[k:], f) == reference(w, tr[:k], tr[k:], f)


def test_simple_truths():
    w = WORLDS[0]   # nothing true initially
    assert not T.eval_trace(w, (), (), p)
    assert T.eval_trace(w, (), (a,), T.Next(p))          # a makes p true
    assert not T.eval_trace(w, (), (), T.Next(T.TRUE))   # no successor
    assert T.eval_trace(w, (), (), T.WeakNext(T.FALSE))
    assert T.eval_trace(w, (), (a, b), T.eventually(T.tand(p, T.Next(T.tnot(p)))))
    assert T.eval_trace(w, (a,), (), p)                  # situation after a
    assert T.eval_trace(w, (), (a, a), T.always(T.tor(T.TAIL, T.Next(p))))


def test_nnf():
    f = T.tnot(T.Until(p, T.Next(q)))
    n = T.nnf(f)
    assert T.is_nnf(n)
    assert n == T.Release(T.tnot(p), T.WeakNext(T.tnot(q)))
    assert not T.is_nnf(f)


def test_tnf_requires_nnf():
    with pytest.raises(NotNNFError):
        T.tnf(T.tnot(T.Next(p)))


def test_tnf_shape():
    assert T.tnf(T.Next(p)) == T.TAnd(T.TAnd(T.TNot(T.TAIL), T.Next(p)), T.Until(T.TRUE, T.TAIL))


def test_xnf_unrolls_until():
    u = T.Until(p, q)
    assert T.xnf(u) == T.TOr(q, T.TAnd(p, T.Next(u)))
    r = T.Release(p, q)
    assert T.xnf(r) == T.TAnd(q, T.TOr(p, T.Next(r)))


def test_tcanon_folds_and_sorts():
    assert T.tcanon(T.TAnd(p, T.TRUE, p)) == p
    assert T.tcanon(T.TAnd(p, T.TNot(p))) is T.FALSE
    assert T.tcanon(T.TOr(q, p)) == T.tcanon(T.TOr(p, q))
    assert T.tcanon(T.TFluent(L.Not(G.p))) == T.TNot(p)
    assert T.tcanon(T.Until(p, T.FALSE)) is T.FALSE


def test_propositional_atoms():
    f = T.TAnd(p, T.TNot(T.TAIL), T.Next(T.Until(p, q)))
    assert T.propositional_atoms(f) == {p, T.TAIL, T.Next(T.Until(p, q))}


def test_assignments_are_prime_and_split_L_X_T():
    f = T.xnf(T.tcanon(T.tnf(T.eventually(p))))
    assigns = T.enumerate_assignments(f)
    assert assigns
    for P in assigns:
        assert all(isinstance(x, T.TNode) for x in P.X)
        assert isinstance(P.T, bool)
    # prime: no assignment's literal set contains another's
    sets = [P.literals for P in assigns]
    assert not any(s1 < s2 for s1 in sets for s2 in sets)


def test_contradictory_next_has_one_assignment_and_no_trace():
    # X a and X !a are distinct propositional atoms, so the abstraction is
    # satisfiable although the temporal formula is not
    f = T.TAnd(T.Next(p), T.Next(T.TNot(p)))
    assigns = T.enumerate_assignments(T.xnf(f))
    assert len(assigns) == 1
    assert assigns[0].X == {p, T.TNot(p)}
    for w in G.fixed_worlds(BAT):
        for tr in G.traces(G.ACTIONS, 4):
            assert not T.eval_trace(w, (), tr, f)


def test_negated_next_in_assignment_is_rejected():
    with pytest.raises(ValueError):
        T.PropAssignment([(T.Next(p), False)])
